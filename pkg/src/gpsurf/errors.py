"""Exception types shared across the package."""


class GpsurfError(Exception):
    """Base class for all package-specific errors."""


class InvalidKernelError(GpsurfError):
    """An ACVF descriptor violates its parameter-domain constraints."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("invalid ACVF: " + "; ".join(self.diagnostics))


class GridTooLargeError(GpsurfError):
    """A grid exceeds the point cap for exact dense sampling."""

    def __init__(self, n_points, cap):
        self.n_points = n_points
        self.cap = cap
        super().__init__(
            f"grid has {n_points} points but exact dense sampling is capped at "
            f"{cap}; use a smaller grid or raise the cap at your own memory risk"
        )


class NotPositiveSemidefiniteError(GpsurfError):
    """Cholesky factorization failed even at the maximum jitter."""

    def __init__(self, pivot, max_jitter):
        self.pivot = pivot
        self.max_jitter = max_jitter
        super().__init__(
            "matrix is not positive semidefinite within tolerance "
            f"(factorization failed at pivot {pivot} with jitter {max_jitter:g})"
        )


class FileFormatError(GpsurfError):
    """A data file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(GpsurfError):
    """A configuration document violates the schema."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class FitError(GpsurfError):
    """Model selection failed for every candidate."""

    def __init__(self, message, per_candidate=()):
        self.per_candidate = list(per_candidate)
        if self.per_candidate:
            message += "; " + "; ".join(self.per_candidate)
        super().__init__(message)
