"""Command-line interface.

Commands: ``simulate``, ``estimate-psd``, ``fit``, ``validate``,
``compose``.  Diagnostics go to stderr; data goes to the files named by
``--out`` (or to stdout with ``--out -`` where a single stream makes
sense).

Exit codes are stable:

* 0 success
* 1 other error (I/O and similar)
* 2 grid exceeds the exact-sampling point cap
* 3 invalid kernel, configuration or parameter
* 4 malformed input data file (message carries the line number)
* 5 model fitting failed for every candidate
* 64 command-line usage error
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

from gpsurf import fileio
from gpsurf.composition import HoningStepSpec, min_compose, simulate_honed
from gpsurf.errors import (
    ConfigError,
    FileFormatError,
    FitError,
    GpsurfError,
    GridTooLargeError,
    InvalidKernelError,
)
from gpsurf.fitting import FitConfig, fit, fit_additive
from gpsurf.sampling import (
    DEFAULT_POINT_CAP,
    add_gaussian_noise,
    predicted_covariance_mae,
    sample_covariance_mae,
    sample_latent,
)
from gpsurf.spectral import Profile, periodogram, welch

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_GRID_CAP = 2
EXIT_INVALID = 3
EXIT_BAD_INPUT = 4
EXIT_FIT_FAILED = 5
EXIT_USAGE = 64

#: Seed offsets: replicate r of a simulation shifts the master seed by
#: r * REPLICATE_SEED_STRIDE, and its observation noise uses master +
#: NOISE_SEED_OFFSET + r, keeping all streams disjoint from the honing-step
#: seeds derived in :mod:`gpsurf.composition`.
NOISE_SEED_OFFSET = 50_000_000
REPLICATE_SEED_STRIDE = 1_000_000


def _info(args, message):
    if not getattr(args, "quiet", False):
        print(message, file=sys.stderr)


def _write_surface_out(field, path, args):
    if path == "-":
        buffer = io.StringIO()
        fileio.write_surface(field, buffer)
        sys.stdout.write(buffer.getvalue())
    else:
        fileio.write_surface_file(field, path)
        _info(args, f"wrote {path}")


def _profile_from_field(field):
    if field.grid.dim != 1:
        raise FileFormatError("expected a 1-D profile file (2-D surface given)", line=1)
    try:
        return Profile(field.heights, field.grid.spacing[0])
    except ValueError as exc:  # e.g. too short for spectral estimation
        raise FileFormatError(str(exc), line=1) from exc


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _cmd_simulate(args):
    config = fileio.load_model_config(args.config)
    seed = args.seed if args.seed is not None else config.seed
    count = args.count
    if count < 1:
        raise ValueError("count must be at least 1")
    single_file = count == 1 and args.noisy_only and not args.keep_intermediates
    if args.out == "-" and not single_file:
        raise ValueError(
            "--out - requires --count 1 with --noisy-only and no --keep-intermediates"
        )

    if isinstance(config, fileio.HoningConfig):
        _simulate_honing(args, config, seed, count)
        return EXIT_OK

    kernel_json = fileio.acvf_to_json(config.kernel)
    latents = sample_latent(config.grid, config.kernel, seed, count, args.max_points)
    for index, latent in enumerate(latents):
        latent.meta.update({"kernel": kernel_json, "config_seed": seed})
        noisy = add_gaussian_noise(latent, config.noise_sigma, seed + NOISE_SEED_OFFSET + index)
        if not args.noisy_only:
            _write_surface_out(latent, _indexed(args.out, "latent", index, count), args)
        _write_surface_out(noisy, _indexed(args.out, "noisy", index, count), args)
    return EXIT_OK


def _simulate_honing(args, config, seed, count):
    kernel_meta = [
        {
            "variance": s.variance,
            "lengthscale_a": s.lengthscale_a,
            "lengthscale_b": s.lengthscale_b,
            "angle": s.angle,
        }
        for s in config.steps
    ]
    for index in range(count):
        master = seed + REPLICATE_SEED_STRIDE * index
        steps = []
        for p, step in enumerate(config.steps):
            derived = HoningStepSpec.from_master_seed(
                master, p, step.variance, step.lengthscale_a, step.lengthscale_b, step.angle
            )
            if step.seed_pos is not None or step.seed_neg is not None:
                derived = HoningStepSpec(
                    variance=step.variance,
                    lengthscale_a=step.lengthscale_a,
                    lengthscale_b=step.lengthscale_b,
                    angle=step.angle,
                    seed_pos=step.seed_pos if step.seed_pos is not None else derived.seed_pos,
                    seed_neg=step.seed_neg if step.seed_neg is not None else derived.seed_neg,
                )
            steps.append(derived)
        result = simulate_honed(
            config.grid, steps, max_points=args.max_points, keep_intermediates=args.keep_intermediates
        )
        if args.keep_intermediates:
            surface, one_steps, realizations = result
            for p, ((pos, neg), one) in enumerate(zip(realizations, one_steps)):
                _write_surface_out(pos, _indexed(args.out, f"step{p}_pos", index, count), args)
                _write_surface_out(neg, _indexed(args.out, f"step{p}_neg", index, count), args)
                _write_surface_out(one, _indexed(args.out, f"step{p}_min", index, count), args)
        else:
            surface = result
        surface.meta.update({"honing_steps": kernel_meta, "config_seed": seed, "master_seed": master})
        noisy = add_gaussian_noise(surface, config.noise_sigma, master + NOISE_SEED_OFFSET)
        if not args.noisy_only:
            _write_surface_out(surface, _indexed(args.out, "latent", index, count), args)
        _write_surface_out(noisy, _indexed(args.out, "noisy", index, count), args)


def _indexed(prefix, tag, index, count):
    if prefix == "-":
        return "-"
    suffix = f"_{tag}" if tag else ""
    if count > 1:
        suffix += f"_{index:03d}"
    return f"{prefix}{suffix}.txt"


# ---------------------------------------------------------------------------
# estimate-psd
# ---------------------------------------------------------------------------


def _cmd_estimate_psd(args):
    field = fileio.read_surface_file(args.input)
    profile = _profile_from_field(field)
    if args.method == "periodogram":
        psd = periodogram(profile)
    else:
        psd = welch(
            profile,
            segment_len=args.segment_len,
            overlap_fraction=args.overlap,
            window=args.window,
        )
    _info(
        args,
        f"{args.method}: parseval total {psd.meta['parseval_total']:.12g} vs sample variance "
        f"{psd.meta['sample_variance']:.12g} (rel err {psd.meta['parseval_rel_error']:.3g}); "
        f"peak at f = {psd.peak_frequency():.6g}",
    )
    if args.out == "-":
        buffer = io.StringIO()
        fileio.write_psd(psd, buffer)
        sys.stdout.write(buffer.getvalue())
    else:
        fileio.write_psd_file(psd, args.out)
        _info(args, f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


def _cmd_fit(args):
    if args.q < 1:
        raise ValueError("Q must be >= 1")
    field = fileio.read_surface_file(args.input)
    cfg = FitConfig(
        n_psd_samples=args.psd_samples,
        n_restarts=args.restarts,
        max_iterations=args.max_iter,
        tol=args.tol,
        seed=args.seed if args.seed is not None else 0,
        max_likelihood_points=args.likelihood_points,
    )
    if args.axis_mode == "profile":
        profile = _profile_from_field(field)
        report = fit(profile, args.q, cfg)
        params = report.best_params
        kernel = params.to_acvf()
        noise_sigma = math.sqrt(params.noise_variance)
        report_doc = {"mode": "profile", "fit": fileio.fit_report_to_json(report)}
        grid = field.grid
    else:
        if field.grid.dim != 2:
            raise FileFormatError("additive fitting expects a 2-D surface file", line=1)
        result = fit_additive(field, args.q, cfg)
        kernel = result.acvf
        noise_sigma = math.sqrt(result.noise_variance)
        report_doc = {
            "mode": "additive",
            "fit_x": fileio.fit_report_to_json(result.report_x),
            "fit_y": fileio.fit_report_to_json(result.report_y),
        }
        grid = field.grid
    model = fileio.model_config_to_json(
        grid, kernel, noise_sigma, cfg.seed, description="fitted model"
    )
    text = json.dumps(model, indent=2, sort_keys=True) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        _info(args, f"wrote {args.out}")
    report_path = args.report
    if report_path is None and args.out != "-":
        report_path = args.out + ".report.json"
    if report_path is not None:
        with open(report_path, "w", encoding="utf-8") as handle:
            json.dump(report_doc, handle, indent=2, sort_keys=True)
            handle.write("\n")
        _info(args, f"wrote {report_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def _cmd_validate(args):
    config = fileio.load_model_config(args.config)
    if isinstance(config, fileio.HoningConfig):
        raise ConfigError("steps", "validate expects a kernel configuration, not a honing one")
    if args.samples < 2:
        raise ValueError("need at least 2 samples")
    seed = args.seed if args.seed is not None else config.seed
    mae = sample_covariance_mae(config.grid, config.kernel, args.samples, seed, args.max_points)
    predicted = predicted_covariance_mae(config.grid, config.kernel, args.samples, args.max_points)
    print(f"samples: {args.samples}")
    print(f"covariance_mae: {mae:.10g}")
    print(f"predicted_monte_carlo_scale: {predicted:.10g}")
    print(f"ratio: {mae / predicted:.6g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# compose
# ---------------------------------------------------------------------------


def _cmd_compose(args):
    fields = [fileio.read_surface_file(path) for path in args.inputs]
    composed = min_compose(fields)
    composed.meta["composed_from"] = list(args.inputs)
    _write_surface_out(composed, args.out, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gpsurf",
        description="Simulate rough profiles/surfaces as Gaussian processes and "
        "identify stationary covariance models from data.",
        epilog="Exit codes: 0 ok, 1 error, 2 grid over the sampling cap, "
        "3 invalid kernel/config, 4 malformed input file, 5 fit failed, 64 usage.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="sample surfaces from a model configuration")
    sim.add_argument("config", help="model configuration JSON (kernel or honing variant)")
    sim.add_argument("--out", required=True, help="output path prefix ('-' for stdout)")
    sim.add_argument("--count", type=int, default=1, help="number of independent samples")
    sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    sim.add_argument("--noisy-only", action="store_true", help="skip the latent output files")
    sim.add_argument(
        "--keep-intermediates",
        action="store_true",
        help="for honing configs, also write the per-step constituents",
    )
    sim.add_argument("--max-points", type=int, default=DEFAULT_POINT_CAP)
    sim.add_argument("--quiet", action="store_true")
    sim.set_defaults(func=_cmd_simulate)

    est = sub.add_parser("estimate-psd", help="two-sided PSD of a profile file")
    est.add_argument("input", help="1-D surface/profile file")
    est.add_argument("--method", choices=("periodogram", "welch"), default="periodogram")
    est.add_argument("--segment-len", type=int, default=None, help="Welch segment length")
    est.add_argument("--overlap", type=float, default=0.5, help="Welch overlap fraction")
    est.add_argument("--window", choices=("hann", "rectangular"), default="hann")
    est.add_argument("--out", required=True, help="output PSD file ('-' for stdout)")
    est.add_argument("--quiet", action="store_true")
    est.set_defaults(func=_cmd_estimate_psd)

    fit_p = sub.add_parser("fit", help="fit a spectral-mixture model to measured data")
    fit_p.add_argument("input", help="profile or surface file")
    fit_p.add_argument("--q", type=int, required=True, help="number of mixture components")
    fit_p.add_argument("--axis-mode", choices=("profile", "additive"), default="profile")
    fit_p.add_argument("--restarts", type=int, default=10)
    fit_p.add_argument("--psd-samples", type=int, default=10_000)
    fit_p.add_argument("--max-iter", type=int, default=500)
    fit_p.add_argument("--tol", type=float, default=1e-6)
    fit_p.add_argument("--likelihood-points", type=int, default=512)
    fit_p.add_argument("--seed", type=int, default=None)
    fit_p.add_argument("--out", required=True, help="fitted model JSON ('-' for stdout)")
    fit_p.add_argument("--report", default=None, help="candidate report path")
    fit_p.add_argument("--quiet", action="store_true")
    fit_p.set_defaults(func=_cmd_fit)

    val = sub.add_parser("validate", help="sample-covariance consistency check")
    val.add_argument("config", help="model configuration JSON (kernel variant)")
    val.add_argument("--samples", type=int, required=True)
    val.add_argument("--seed", type=int, default=None)
    val.add_argument("--max-points", type=int, default=DEFAULT_POINT_CAP)
    val.add_argument("--quiet", action="store_true")
    val.set_defaults(func=_cmd_validate)

    comp = sub.add_parser("compose", help="pointwise minimum of surface files")
    comp.add_argument("inputs", nargs="+", help="two or more surface files on one grid")
    comp.add_argument("--out", required=True, help="output path ('-' for stdout)")
    comp.add_argument("--quiet", action="store_true")
    comp.set_defaults(func=_cmd_compose)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except GridTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRID_CAP
    except (InvalidKernelError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FileFormatError as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except FitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT_FAILED
    except (GpsurfError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
