"""Text file formats and the strict configuration schema.

Everything is text-first and diffable: surface grids and PSD estimates are
``#``-headed column files whose header is a single JSON object, and model
configurations are JSON documents.  Heights are printed with shortest
round-trip decimals, so read(write(field)) reproduces them bit-exactly.
Configuration parsing is strict: unknown fields are rejected with the path
to the offending key, surfacing typos early.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from gpsurf.errors import ConfigError, FileFormatError
from gpsurf.kernels import (
    AdditiveAcvf,
    ExponentialRotatedAcvf,
    SpectralMixtureAcvf,
    WhiteNoiseAcvf,
)
from gpsurf.sampling import Grid, SurfaceField
from gpsurf.spectral import PsdEstimate


def _fmt(x):
    # repr of a Python float is the shortest decimal that round-trips
    return repr(float(x))


# ---------------------------------------------------------------------------
# ACVF descriptors <-> JSON
# ---------------------------------------------------------------------------


def acvf_to_json(acvf):
    if isinstance(acvf, WhiteNoiseAcvf):
        return {"type": "white_noise", "variance": acvf.variance, "dimension": acvf.dim}
    if isinstance(acvf, ExponentialRotatedAcvf):
        return {
            "type": "exponential_rotated",
            "variance": acvf.variance,
            "lengthscale_a": acvf.lengthscale_a,
            "lengthscale_b": acvf.lengthscale_b,
            "angle": acvf.angle,
            "dimension": acvf.dim,
        }
    if isinstance(acvf, SpectralMixtureAcvf):
        doc = {
            "type": "spectral_mixture",
            "weights": list(acvf.weights),
            "means": [list(row) for row in acvf.means],
            "variances": [list(row) for row in acvf.variances],
        }
        if acvf.dim == 1:
            doc["means"] = [row[0] for row in acvf.means]
            doc["variances"] = [row[0] for row in acvf.variances]
        return doc
    if isinstance(acvf, AdditiveAcvf):
        return {
            "type": "additive",
            "r_x": acvf_to_json(acvf.r_x),
            "r_y": acvf_to_json(acvf.r_y),
        }
    raise TypeError(f"unknown ACVF type: {type(acvf).__name__}")


def acvf_from_json(doc, path="kernel"):
    if not isinstance(doc, dict):
        raise ConfigError(path, "kernel must be a JSON object")
    kind = doc.get("type")
    if kind == "white_noise":
        _check_fields(doc, path, {"type", "variance"}, {"dimension"})
        return WhiteNoiseAcvf(
            variance=_number(doc, path, "variance"),
            dim=int(doc.get("dimension", 1)),
        )
    if kind == "exponential_rotated":
        _check_fields(
            doc, path, {"type", "variance", "lengthscale_a", "lengthscale_b", "angle"}, {"dimension"}
        )
        return ExponentialRotatedAcvf(
            variance=_number(doc, path, "variance"),
            lengthscale_a=_number(doc, path, "lengthscale_a"),
            lengthscale_b=_number(doc, path, "lengthscale_b"),
            angle=_number(doc, path, "angle"),
            dim=int(doc.get("dimension", 2)),
        )
    if kind == "spectral_mixture":
        _check_fields(doc, path, {"type", "weights", "means", "variances"}, set())
        return SpectralMixtureAcvf(
            weights=_number_list(doc, path, "weights"),
            means=_nested_numbers(doc, path, "means"),
            variances=_nested_numbers(doc, path, "variances"),
        )
    if kind == "additive":
        _check_fields(doc, path, {"type", "r_x", "r_y"}, set())
        return AdditiveAcvf(
            r_x=acvf_from_json(doc["r_x"], f"{path}.r_x"),
            r_y=acvf_from_json(doc["r_y"], f"{path}.r_y"),
        )
    raise ConfigError(f"{path}.type", f"unknown kernel type {kind!r}")


# ---------------------------------------------------------------------------
# strict schema helpers
# ---------------------------------------------------------------------------


def _check_fields(doc, path, required, optional):
    for key in doc:
        if key not in required and key not in optional:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown field")
    for key in required:
        if key not in doc:
            raise ConfigError(path, f"missing required field {key!r}")


def _number(doc, path, key):
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}", "must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{path}.{key}", "must be finite")
    return value


def _integer(doc, path, key):
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}", "must be an integer")
    return int(value)


def _number_list(doc, path, key):
    value = doc[key]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}.{key}", "must be a non-empty array of numbers")
    out = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{path}.{key}[{i}]", "must be a number")
        out.append(float(item))
    return out


def _nested_numbers(doc, path, key):
    value = doc[key]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}.{key}", "must be a non-empty array")
    if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return [float(v) for v in value]
    out = []
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise ConfigError(f"{path}.{key}[{i}]", "must be an array of numbers")
        out.append([float(v) for v in row])
    return out


# ---------------------------------------------------------------------------
# model configuration documents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimulationConfig:
    grid: Grid
    kernel: object
    noise_sigma: float
    seed: int
    description: str = ""


@dataclass(frozen=True)
class HoningStepConfig:
    variance: float
    lengthscale_a: float
    lengthscale_b: float
    angle: float
    seed_pos: int = None
    seed_neg: int = None


@dataclass(frozen=True)
class HoningConfig:
    grid: Grid
    steps: tuple
    noise_sigma: float
    seed: int
    description: str = ""


def _grid_from_json(doc, path="grid"):
    if not isinstance(doc, dict):
        raise ConfigError(path, "grid must be a JSON object")
    _check_fields(doc, path, {"shape", "spacing"}, {"dimension", "origin"})
    shape = doc["shape"]
    spacing = doc["spacing"]
    if not isinstance(shape, list) or not all(
        isinstance(n, int) and not isinstance(n, bool) for n in shape
    ):
        raise ConfigError(f"{path}.shape", "must be an array of integers")
    if not isinstance(spacing, list):
        raise ConfigError(f"{path}.spacing", "must be an array of numbers")
    if "dimension" in doc and doc["dimension"] != len(shape):
        raise ConfigError(f"{path}.dimension", "does not match the shape length")
    origin = doc.get("origin")
    try:
        return Grid(shape=shape, spacing=spacing, origin=origin)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def grid_to_json(grid):
    return {
        "dimension": grid.dim,
        "shape": list(grid.shape),
        "spacing": list(grid.spacing),
        "origin": list(grid.origin),
    }


def parse_model_config(doc):
    """Parse a simulation or honing configuration from a JSON document.

    Unknown fields anywhere in the document are rejected with the dotted
    path to the field.
    """
    if not isinstance(doc, dict):
        raise ConfigError("", "configuration must be a JSON object")
    if "steps" in doc:
        _check_fields(doc, "", {"grid", "steps", "noise_sigma", "seed"}, {"description"})
        steps_doc = doc["steps"]
        if not isinstance(steps_doc, list) or not steps_doc:
            raise ConfigError("steps", "must be a non-empty array of honing steps")
        steps = []
        for i, step in enumerate(steps_doc):
            spath = f"steps[{i}]"
            if not isinstance(step, dict):
                raise ConfigError(spath, "must be a JSON object")
            _check_fields(
                step,
                spath,
                {"variance", "lengthscale_a", "lengthscale_b", "angle"},
                {"seed_pos", "seed_neg"},
            )
            steps.append(
                HoningStepConfig(
                    variance=_number(step, spath, "variance"),
                    lengthscale_a=_number(step, spath, "lengthscale_a"),
                    lengthscale_b=_number(step, spath, "lengthscale_b"),
                    angle=_number(step, spath, "angle"),
                    seed_pos=_integer(step, spath, "seed_pos") if "seed_pos" in step else None,
                    seed_neg=_integer(step, spath, "seed_neg") if "seed_neg" in step else None,
                )
            )
        return HoningConfig(
            grid=_grid_from_json(doc["grid"]),
            steps=tuple(steps),
            noise_sigma=_number(doc, "", "noise_sigma"),
            seed=_integer(doc, "", "seed"),
            description=str(doc.get("description", "")),
        )
    _check_fields(doc, "", {"grid", "kernel", "noise_sigma", "seed"}, {"description"})
    return SimulationConfig(
        grid=_grid_from_json(doc["grid"]),
        kernel=acvf_from_json(doc["kernel"]),
        noise_sigma=_number(doc, "", "noise_sigma"),
        seed=_integer(doc, "", "seed"),
        description=str(doc.get("description", "")),
    )


def load_model_config(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"not valid JSON: {exc}") from exc
    return parse_model_config(doc)


def model_config_to_json(grid, kernel, noise_sigma, seed, description=""):
    doc = {}
    if description:
        doc["description"] = description
    doc["grid"] = grid_to_json(grid)
    doc["kernel"] = acvf_to_json(kernel)
    doc["noise_sigma"] = float(noise_sigma)
    doc["seed"] = int(seed)
    return doc


# ---------------------------------------------------------------------------
# surface grid files
# ---------------------------------------------------------------------------


def write_surface(field, stream):
    """Write a SurfaceField as a header line plus rows of decimals."""
    header = {
        "format": "gpsurf-surface",
        "version": 1,
        "dimension": field.grid.dim,
        "shape": list(field.grid.shape),
        "spacing": list(field.grid.spacing),
        "origin": list(field.grid.origin),
        "kind": field.kind,
        "meta": field.meta,
    }
    stream.write("# " + json.dumps(header, sort_keys=True) + "\n")
    if field.grid.dim == 1:
        for value in field.heights:
            stream.write(_fmt(value) + "\n")
    else:
        rows = field.heights.reshape(field.grid.shape)
        for row in rows:
            stream.write(" ".join(_fmt(v) for v in row) + "\n")


def write_surface_file(field, path):
    with open(path, "w", encoding="utf-8") as handle:
        write_surface(field, handle)


def read_surface(stream):
    first = stream.readline()
    if not first.startswith("# "):
        raise FileFormatError("expected a '# ' JSON metadata header", line=1)
    try:
        header = json.loads(first[2:])
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"header is not valid JSON: {exc}", line=1) from exc
    for key in ("format", "shape", "spacing", "kind"):
        if key not in header:
            raise FileFormatError(f"header is missing {key!r}", line=1)
    if header["format"] != "gpsurf-surface":
        raise FileFormatError(f"not a surface file (format={header['format']!r})", line=1)
    try:
        grid = Grid(shape=header["shape"], spacing=header["spacing"], origin=header.get("origin"))
    except (ValueError, TypeError) as exc:
        raise FileFormatError(f"bad grid metadata: {exc}", line=1) from exc

    values = []
    expected_cols = 1 if grid.dim == 1 else grid.shape[1]
    n_rows = grid.shape[0]
    line_no = 1
    for raw in stream:
        line_no += 1
        text = raw.strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != expected_cols:
            raise FileFormatError(
                f"expected {expected_cols} value(s) per line, found {len(parts)}", line=line_no
            )
        try:
            values.extend(float(p) for p in parts)
        except ValueError as exc:
            raise FileFormatError(f"bad number: {exc}", line=line_no) from exc
        if len(values) > grid.n_points:
            raise FileFormatError("more data lines than grid points", line=line_no)
    if len(values) != grid.n_points:
        raise FileFormatError(
            f"expected {n_rows} data line(s), file ended early", line=line_no
        )
    heights = np.asarray(values, dtype=np.float64)
    try:
        return SurfaceField(grid, heights, kind=header["kind"], meta=header.get("meta", {}))
    except ValueError as exc:
        raise FileFormatError(str(exc), line=line_no) from exc


def read_surface_file(path):
    with open(path, "r", encoding="utf-8") as handle:
        return read_surface(handle)


# ---------------------------------------------------------------------------
# PSD files
# ---------------------------------------------------------------------------


def write_psd(psd, stream):
    header = {
        "format": "gpsurf-psd",
        "version": 1,
        "method": psd.method,
        "peak_frequency": psd.peak_frequency(),
        "meta": psd.meta,
    }
    stream.write("# " + json.dumps(header, sort_keys=True) + "\n")
    for f, s in zip(psd.frequencies, psd.densities):
        stream.write(_fmt(f) + " " + _fmt(s) + "\n")


def write_psd_file(psd, path):
    with open(path, "w", encoding="utf-8") as handle:
        write_psd(psd, handle)


def read_psd(stream):
    first = stream.readline()
    if not first.startswith("# "):
        raise FileFormatError("expected a '# ' JSON metadata header", line=1)
    try:
        header = json.loads(first[2:])
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"header is not valid JSON: {exc}", line=1) from exc
    if header.get("format") != "gpsurf-psd":
        raise FileFormatError("not a PSD file", line=1)
    freqs = []
    dens = []
    line_no = 1
    for raw in stream:
        line_no += 1
        text = raw.strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise FileFormatError("expected two columns (frequency, density)", line=line_no)
        try:
            freqs.append(float(parts[0]))
            dens.append(float(parts[1]))
        except ValueError as exc:
            raise FileFormatError(f"bad number: {exc}", line=line_no) from exc
    if len(freqs) < 2:
        raise FileFormatError("PSD file has fewer than two rows", line=line_no)
    return PsdEstimate(
        frequencies=np.asarray(freqs),
        densities=np.asarray(dens),
        method=header.get("method", "unknown"),
        meta=header.get("meta", {}),
    )


def read_psd_file(path):
    with open(path, "r", encoding="utf-8") as handle:
        return read_psd(handle)


# ---------------------------------------------------------------------------
# fit reports
# ---------------------------------------------------------------------------


def params_to_json(params):
    return {
        "weights": list(params.weights),
        "means": list(params.means),
        "variances": list(params.variances),
        "noise_variance": params.noise_variance,
    }


def fit_report_to_json(report):
    return {
        "best_index": report.best_index,
        "candidates": [
            {
                "source": c.source,
                "seed": c.seed,
                "log_marginal_likelihood_initial": c.lml_init,
                "log_marginal_likelihood_final": c.lml_final,
                "iterations": c.n_iterations,
                "converged": c.converged,
                "failure": c.failure,
                "params_initial": params_to_json(c.params_init),
                "params_final": params_to_json(c.params_final) if c.params_final else None,
            }
            for c in report.candidates
        ],
    }
