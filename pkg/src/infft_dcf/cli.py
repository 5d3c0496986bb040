"""``infft-dcf``: experiment runner.

Experiments
-----------
phantom
    Shepp-Logan phantom sampled on a spiral, reconstructed with each scheme.
pulse_pointwise
    Triangular pulse on a modified polar grid; pointwise error images for
    real samples ``f(x_j)`` and artificial (periodized) samples.
pulse_table
    Triangular pulse on logarithmic modified polar grids of growing size;
    one table row per ``R`` next to known reference values.
weights_only
    Weights for a user trajectory (CSV) or a generated grid.

Settings come from built-in defaults, then an optional ``key = value``
config file, then command-line flags.  Every run writes ``manifest.txt``
with the resolved settings, versions and timings.
"""
from __future__ import annotations

import argparse
import logging
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dcf import SCHEMES, SolverOptions, compute_weights
from .fourier_core import Bandwidth, SamplingSet
from .grids import KINDS, LOG_RATE, GridSpec, generate
from .io import (
    ParseError,
    fmt,
    parse_config,
    read_trajectory,
    write_grid,
    write_pgm,
    write_table,
    write_weights,
)
from .signals import (
    TriangularPulse,
    image_row,
    periodized_samples,
    pointwise_error_image,
    reconstruct,
    relative_error,
    shepp_logan,
)

log = logging.getLogger("infft_dcf")

EXPERIMENTS = ("phantom", "pulse_pointwise", "pulse_table", "weights_only")
SAMPLE_KINDS = ("real", "artificial")

#: Reference rows for the pulse table (M = 64, b = 24):
#: R -> (N, second kind, Frobenius, sinc_ls).
REFERENCE_TABLE = {
    40: (3565, 4.4908e-01, 1.7608e-01, 2.0475e-01),
    48: (5145, 1.0886e-01, 2.0690e-02, 1.5829e-01),
    56: (7149, 3.6632e-02, 8.0215e-03, 1.5401e-01),
    64: (9429, 2.5109e-02, 4.7988e-03, 1.8337e-01),
    72: (11965, 7.6871e-03, 4.1096e-03, 2.0633e-01),
    80: (14909, 5.5991e-03, 3.8507e-03, 2.1932e-01),
    88: (18153, 3.8889e-03, 3.9853e-03, 2.2665e-01),
    96: (21589, 4.2240e-03, 3.7917e-03, 2.3092e-01),
}
TABLE_SCHEMES = ("second_kind", "frobenius", "sinc_ls")

# key -> parser; every accepted config key is listed here
_FIELDS = {
    "M": int,
    "d": int,
    "grid": str,
    "R": int,
    "T": int,
    "seed": int,
    "log_rate": float,
    "trajectory": str,
    "schemes": lambda s: tuple(p.strip() for p in s.split(",") if p.strip()),
    "samples": lambda s: tuple(p.strip() for p in s.split(",") if p.strip()),
    "halfwidth": int,
    "R_list": lambda s: tuple(int(p) for p in s.split(",") if p.strip()),
    "row": int,
    "tol": float,
    "max_iter": lambda s: None if s.lower() == "none" else int(s),
    "transform": str,
    "nfft_m": int,
    "nfft_sigma": float,
    "frobenius_mode": str,
    "gram_solver": str,
    "export_grid": lambda s: s.lower() in ("1", "true", "yes"),
}

_DEFAULTS = {
    "phantom": dict(M=64, grid="spiral", R=64, T=128,
                    schemes=("second_kind", "first_kind", "frobenius"),
                    samples=("real",), row=52),
    "pulse_pointwise": dict(M=32, grid="modified_polar", R=64, T=128, halfwidth=12,
                            schemes=("second_kind", "frobenius", "sinc_ls"),
                            samples=SAMPLE_KINDS),
    "pulse_table": dict(M=64, grid="log_modified_polar", halfwidth=24,
                        R_list=tuple(range(40, 97, 8)), schemes=TABLE_SCHEMES,
                        samples=("real",)),
    "weights_only": dict(M=8, grid="modified_polar", R=16, T=32,
                         schemes=("second_kind",), samples=("real",)),
}
_COMMON = dict(d=2, seed=0, log_rate=LOG_RATE, trajectory="", tol=1e-10, max_iter=None,
               transform="auto", nfft_m=7, nfft_sigma=2.0, frobenius_mode="auto",
               gram_solver="auto", export_grid=False, T=None, R=None, halfwidth=None,
               R_list=(), row=52, samples=("real",))


@dataclass
class ExperimentConfig:
    """Fully resolved settings of one run."""

    experiment: str
    values: dict
    out: Path
    sources: list = field(default_factory=list)

    def __getattr__(self, name):
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def band(self) -> Bandwidth:
        return Bandwidth(self.values["d"], self.values["M"])

    @property
    def solver(self) -> SolverOptions:
        v = self.values
        return SolverOptions(tol=v["tol"], max_iter=v["max_iter"], transform=v["transform"],
                             nfft=dict(m=v["nfft_m"], sigma=v["nfft_sigma"]),
                             gram_solver=v["gram_solver"])

    def grid_spec(self, R=None) -> GridSpec:
        v = self.values
        R = R if R is not None else v["R"]
        T = v["T"] if R == v["R"] else None
        d = v["d"] if v["grid"] in ("equispaced", "jittered") else 2
        return GridSpec(v["grid"], R, T, d=d, seed=v["seed"], log_rate=v["log_rate"])

    def lines(self):
        yield f"experiment = {self.experiment}"
        for key in sorted(self.values):
            val = self.values[key]
            if isinstance(val, tuple):
                val = ",".join(map(str, val))
            yield f"{key} = {val}"


def resolve_config(experiment, config_text=None, overrides=None, out=None, source="<config>"):
    """Merge defaults, config file text and flag overrides; validate the result.

    Raises
    ------
    ParseError
        Unknown key or unparsable value in the config file.
    ValueError
        Invalid combination of settings.
    """
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    values = dict(_COMMON)
    values.update(_DEFAULTS[experiment])
    sources = ["defaults"]
    if config_text is not None:
        raw = parse_config(config_text, source)
        named = raw.pop("experiment", experiment)
        if named != experiment:
            raise ParseError(f"{source}: config is for experiment {named!r}, "
                             f"not {experiment!r}")
        file_out = raw.pop("out", None)
        if out is None:
            out = file_out
        for key, text in raw.items():
            if key not in _FIELDS:
                raise ParseError(f"{source}: unknown key {key!r}")
            try:
                values[key] = _FIELDS[key](text)
            except ValueError as exc:
                raise ParseError(f"{source}: bad value for {key!r}: {text!r}") from exc
        sources.append(source)
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    if overrides and any(v is not None for v in overrides.values()):
        sources.append("flags")
    # a changed R keeps the T = 2R convention unless T was given explicitly
    if overrides and overrides.get("R") is not None and overrides.get("T") is None:
        values["T"] = 2 * values["R"]
    _validate(experiment, values)
    out = Path(out if out is not None else f"out_{experiment}")
    return ExperimentConfig(experiment, values, out, sources)


def _validate(experiment, v):
    for s in v["schemes"]:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}; expected one of {SCHEMES}")
    for s in v["samples"]:
        if s not in SAMPLE_KINDS:
            raise ValueError(f"unknown sample kind {s!r}; expected real or artificial")
    if v["grid"] not in KINDS:
        raise ValueError(f"unknown grid kind {v['grid']!r}; expected one of {KINDS}")
    if v["transform"] not in ("auto", "exact", "fast"):
        raise ValueError("transform must be auto, exact or fast")
    if experiment != "weights_only" and v["d"] != 2:
        raise ValueError(f"the {experiment} experiment is two-dimensional (d = 2)")
    if experiment == "pulse_table" and not v["R_list"]:
        raise ValueError("R_list must name at least one grid size")
    if experiment != "pulse_table" and not v["trajectory"] and v["R"] is None:
        raise ValueError("grid size R is required")


def _sampling(cfg) -> SamplingSet:
    if cfg.trajectory:
        pts = read_trajectory(cfg.trajectory)
        if cfg.experiment != "weights_only" and pts.shape[1] != cfg.d:
            raise ValueError(f"trajectory has {pts.shape[1]} columns but d = {cfg.d}")
        return SamplingSet(pts)
    return generate(cfg.grid_spec())


class _Run:
    """Collects timings and result rows, and writes the output directory."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.out = cfg.out
        self.out.mkdir(parents=True, exist_ok=True)
        self.timings = {}
        self.notes = []
        self.residual_rows = []
        self.error_rows = []

    def timed(self, label, fn, *args, **kwargs):
        t0 = time.perf_counter()
        result = fn(*args, **kwargs)
        self.timings[label] = time.perf_counter() - t0
        return result

    def weights(self, scheme, sampling, band, tag=""):
        cfg = self.cfg
        wv, report = self.timed(f"weights_{scheme}{tag}", compute_weights, scheme, sampling,
                                band, cfg.solver, cfg.frobenius_mode)
        res = wv.residual
        self.residual_rows.append([
            tag.strip("_") or "-", scheme, sampling.N, band.doubled().size,
            "yes" if wv.exact_regime else "no", res.max_abs, res.l2, res.at_zero_error,
            report.iterations if report else 0,
            ("yes" if report.converged else "no") if report else "-",
            report.stop_reason if report else "closed form",
        ])
        write_weights(self.out / f"weights_{scheme}{tag}.csv", wv)
        return wv

    def finish(self):
        write_table(self.out / "residuals.csv",
                    ["case", "scheme", "N", "size_I_2M", "exact_regime", "residual_max_abs",
                     "residual_l2", "residual_at_zero", "iterations", "converged",
                     "stop_reason"], self.residual_rows)
        if self.error_rows:
            write_table(self.out / "errors.csv",
                        ["case", "scheme", "samples", "relative_error", "max_error"],
                        self.error_rows)
        lines = [f"# infft-dcf {__version__}", *self.cfg.lines(),
                 f"out = {self.out}", f"config_sources = {' + '.join(self.cfg.sources)}",
                 f"version = {__version__}", f"python = {platform.python_version()}",
                 f"numpy = {np.__version__}"]
        lines += [f"time_{k} = {v:.3f} s" for k, v in self.timings.items()]
        lines += [f"note = {n}" for n in self.notes]
        (self.out / "manifest.txt").write_text("\n".join(lines) + "\n")


def run_phantom(cfg: ExperimentConfig) -> Path:
    run = _Run(cfg)
    band = cfg.band
    sampling = run.timed("grid", _sampling, cfg)
    phantom = shepp_logan(band.M)
    fhat = phantom.coefficients
    f = periodized_samples(fhat, sampling, band, cfg.transform)
    regime = band.doubled().size <= sampling.N
    run.notes.append(f"|I_2M| = {band.doubled().size}, N = {sampling.N}, "
                     f"exactness condition {'holds' if regime else 'violated'}")
    log.info(run.notes[-1])
    row = min(cfg.row, band.M)
    write_pgm(cfg.out / "phantom.pgm", phantom.pixels, 0.0, 1.0)
    for scheme in cfg.schemes:
        try:
            wv = run.weights(scheme, sampling, band)
        except Exception as exc:  # noqa: BLE001 - record and continue with other schemes
            run.notes.append(f"{scheme} failed: {exc}")
            log.error("%s failed: %s", scheme, exc)
            continue
        h = reconstruct(f, wv, band, cfg.transform)
        image = h.real.reshape(band.M, band.M)
        err = relative_error(h, fhat)
        run.error_rows.append(["phantom", scheme, "real", err, float(np.abs(h - fhat).max())])
        log.info("%s: relative error %.4e", scheme, err)
        write_pgm(cfg.out / f"recon_{scheme}.pgm", image, 0.0, 1.0)
        write_pgm(cfg.out / f"err_{scheme}_real.pgm", pointwise_error_image(h, fhat))
        write_table(cfg.out / f"row{row}_{scheme}.csv", ["column", "phantom", "reconstruction"],
                    [[i + 1, float(p), float(r)] for i, (p, r) in
                     enumerate(zip(image_row(phantom.pixels, row), image_row(image, row)))])
    if cfg.export_grid:
        write_grid(cfg.out / "grid.csv", sampling)
    run.finish()
    return cfg.out


def run_pulse_pointwise(cfg: ExperimentConfig) -> Path:
    run = _Run(cfg)
    band = cfg.band
    sampling = run.timed("grid", _sampling, cfg)
    pulse = TriangularPulse(band, cfg.halfwidth)
    fhat = pulse.spectrum_on_grid()
    data = {"real": pulse.samples(sampling),
            "artificial": periodized_samples(fhat, sampling, band, cfg.transform)}
    for scheme in cfg.schemes:
        try:
            wv = run.weights(scheme, sampling, band)
        except Exception as exc:  # noqa: BLE001
            run.notes.append(f"{scheme} failed: {exc}")
            log.error("%s failed: %s", scheme, exc)
            continue
        for kind in cfg.samples:
            h = reconstruct(data[kind], wv, band, cfg.transform)
            err_img = pointwise_error_image(h, fhat)
            err = relative_error(h, fhat)
            run.error_rows.append(["pulse", scheme, kind, err, float(err_img.max())])
            log.info("%s, %s samples: relative error %.4e", scheme, kind, err)
            write_pgm(cfg.out / f"err_{scheme}_{kind}.pgm", err_img)
            write_pgm(cfg.out / f"recon_{scheme}_{kind}.pgm", h.real.reshape(band.M, band.M))
    if cfg.export_grid:
        write_grid(cfg.out / "grid.csv", sampling)
    run.finish()
    return cfg.out


def run_pulse_table(cfg: ExperimentConfig) -> Path:
    run = _Run(cfg)
    band = cfg.band
    pulse = TriangularPulse(band, cfg.halfwidth)
    fhat = pulse.spectrum_on_grid()
    header = ["R", "N", "reference_N"]
    for s in cfg.schemes:
        header += [f"err_{s}", f"reference_err_{s}"]
    rows = []
    for R in cfg.R_list:
        sampling = generate(cfg.grid_spec(R))
        ref = REFERENCE_TABLE.get(R) if band.M == 64 and cfg.halfwidth == 24 else None
        row = [R, sampling.N, ref[0] if ref else "-"]
        f = pulse.samples(sampling)
        for s in cfg.schemes:
            try:
                wv = run.weights(s, sampling, band, tag=f"_R{R}")
                err = relative_error(reconstruct(f, wv, band, cfg.transform), fhat)
                run.error_rows.append([f"R={R}", s, "real", err, float("nan")])
            except Exception as exc:  # noqa: BLE001 - per-row failures are recorded
                run.notes.append(f"R={R} {s} failed: {exc}")
                log.error("R=%d %s failed: %s", R, s, exc)
                err = float("nan")
            refval = ref[1 + TABLE_SCHEMES.index(s)] if ref and s in TABLE_SCHEMES else "-"
            row += [err, refval]
        rows.append(row)
        print("  ".join(_cell(v) for v in row), flush=True)
    write_table(cfg.out / "table.csv", header, rows)
    run.finish()
    return cfg.out


def _cell(v):
    return f"{v:.4e}" if isinstance(v, float) else str(v)


def run_weights_only(cfg: ExperimentConfig) -> Path:
    run = _Run(cfg)
    sampling = run.timed("grid", _sampling, cfg)
    # a trajectory file fixes the dimension
    band = Bandwidth(sampling.d, cfg.M)
    for scheme in cfg.schemes:
        wv = run.weights(scheme, sampling, band)
        print(f"{scheme}: N={sampling.N} residual max {fmt(wv.residual.max_abs)}")
    if cfg.export_grid:
        write_grid(cfg.out / "grid.csv", sampling)
    run.finish()
    return cfg.out


RUNNERS = {
    "phantom": run_phantom,
    "pulse_pointwise": run_pulse_pointwise,
    "pulse_table": run_pulse_table,
    "weights_only": run_weights_only,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="infft-dcf", description=__doc__.split("\n")[0])
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", type=Path, help="flat 'key = value' settings file")
    p.add_argument("--M", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--grid", choices=KINDS)
    p.add_argument("--R", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--scheme", action="append", choices=SCHEMES,
                   help="repeat to select several schemes")
    p.add_argument("--samples", choices=SAMPLE_KINDS)
    p.add_argument("--halfwidth", type=int, help="triangular pulse half-width b")
    p.add_argument("--trajectory", help="CSV of nodes with header x1[,x2]")
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--exact-transform", action="store_true",
                   help="use direct summation instead of the NFFT")
    p.add_argument("--export-grid", action="store_true", help="also write grid.csv")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = dict(M=args.M, d=args.d, grid=args.grid, R=args.R, T=args.T, seed=args.seed,
                     trajectory=args.trajectory, max_iter=args.max_iter,
                     halfwidth=args.halfwidth,
                     schemes=tuple(args.scheme) if args.scheme else None,
                     samples=(args.samples,) if args.samples else None,
                     transform="exact" if args.exact_transform else None,
                     export_grid=True if args.export_grid else None)
    try:
        text = args.config.read_text() if args.config else None
        cfg = resolve_config(args.experiment, text, overrides, args.out,
                             source=str(args.config) if args.config else "<config>")
        out = RUNNERS[args.experiment](cfg)
    except (ParseError, ValueError, OSError) as exc:
        print(f"infft-dcf {args.experiment}: error: {exc}", file=sys.stderr)
        return 2
    print(f"outputs written to {out}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
