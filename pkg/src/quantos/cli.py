"""Command-line entry point: config resolution, sweeps, CSV emission.

Every subcommand resolves its configuration from three layers (built-in
defaults, then an optional INI-style config file, then explicit flags),
writes its CSV outputs atomically (temp file + rename), and finishes by
writing manifest.txt with the fully-resolved configuration, the package
version, and the wall time, so a run can be reproduced from its manifest
alone.

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    classical_edge_shift,
    cramer_rao_check,
    fisher_vs_n,
    fit_growth_rate,
    omega_scan,
    phase_diagram,
    t1_resonance_scan,
)
from .errors import NoLinearWindowError, QuantosError
from .model import ModelParams, winding_number

__all__ = ["main", "build_parser", "resolve_config", "ConfigError"]


class ConfigError(Exception):
    """Invalid configuration (bad key, bad value, unreadable file)."""


def _float_list(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in str(raw).split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {raw!r}") from exc


def _int_list(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in str(raw).split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {raw!r}") from exc


COMMON_SCHEMA = {
    "t1": float,
    "t2": float,
    "gamma": float,
    "big_gamma": float,
    "n_modes": int,
    "omega": float,
    "probe_amplitude": float,
    "probe_port": int,
    "out": str,
    "seed": int,
}

COMMON_DEFAULTS = {
    "t1": 1.0,
    "t2": 0.5,
    "gamma": 0.7,
    "big_gamma": 0.0,
    "n_modes": 21,
    "omega": 0.0,
    "probe_amplitude": 2.0,
    "probe_port": 0,
    "out": ".",
    "seed": 42,
}

SUB_SCHEMA: dict[str, dict] = {
    "winding": {},
    "phase-diagram": {
        "t1_min": float, "t1_max": float, "t1_points": int,
        "t2_min": float, "t2_max": float, "t2_points": int,
    },
    "fisher-scaling": {"n_min": int, "n_max": int},
    "resonance-t1": {"t1_list": _float_list, "n_min": int, "n_max": int},
    "resonance-omega": {
        "omega_min": float, "omega_max": float, "omega_points": int,
        "n_list": _int_list,
    },
    "classical-shift": {"n_min": int, "n_max": int},
    "validate-cr": {
        "n_samples": int, "batches": int, "true_gamma": float,
        "bracket_lo": float, "bracket_hi": float,
    },
}

SUB_DEFAULTS: dict[str, dict] = {
    "winding": {},
    "phase-diagram": {
        "t1_min": 0.04, "t1_max": 2.0, "t1_points": 50,
        "t2_min": 0.04, "t2_max": 2.0, "t2_points": 50,
    },
    "fisher-scaling": {"n_min": 11, "n_max": 41, "big_gamma": 1e-11},
    "resonance-t1": {
        "t1_list": (0.5, 0.6, 0.65, 0.69),
        "n_min": 5, "n_max": 41, "big_gamma": 1e-11,
    },
    "resonance-omega": {
        "omega_min": -0.02, "omega_max": 0.02, "omega_points": 801,
        "n_list": (31, 41), "t1": 0.69, "big_gamma": 1e-11,
    },
    "classical-shift": {"n_min": 5, "n_max": 41, "big_gamma": 1e-8, "t1": 0.69},
    "validate-cr": {
        "n_samples": 10000, "batches": 200, "true_gamma": 0.3,
        "bracket_lo": 0.0, "bracket_hi": 0.6,
    },
}

HELP = {
    "winding": "print the winding number for one parameter set",
    "phase-diagram": "winding number over a (t1, t2) grid -> phase.csv",
    "fisher-scaling": "Fisher information vs N plus growth fit -> fisher_n.csv, fit.csv",
    "resonance-t1": "fitted growth rate per t1 -> alpha_t1.csv",
    "resonance-omega": "Fisher information vs drive frequency per N -> fisher_omega.csv",
    "classical-shift": "edge-eigenvalue shift vs N -> classical.csv",
    "validate-cr": "batch-MLE variance against the Cramér-Rao bound -> cr.csv",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantos",
        description="dissipative topological lattice sensor toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name, extra in SUB_SCHEMA.items():
        sp = subs.add_parser(name, help=HELP[name])
        sp.add_argument("--config", default=None,
                        help="INI config file ([common] plus per-subcommand sections)")
        for key, conv in {**COMMON_SCHEMA, **extra}.items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key,
                            type=conv, default=None,
                            help=f"override {key}")
    return parser


def resolve_config(sub: str, args: argparse.Namespace) -> dict:
    """Layer defaults, config file, and flags into one flat dict."""
    schema = {**COMMON_SCHEMA, **SUB_SCHEMA[sub]}
    cfg = dict(COMMON_DEFAULTS)
    cfg.update(SUB_DEFAULTS[sub])
    path = getattr(args, "config", None)
    if path is not None:
        ini = configparser.ConfigParser()
        try:
            loaded = ini.read([path])
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
        if not loaded:
            raise ConfigError(f"config file not found: {path}")
        for section in ini.sections():
            if section not in ("common", *SUB_SCHEMA):
                raise ConfigError(f"unknown config section [{section}]")
        for section in ("common", sub):
            if not ini.has_section(section):
                continue
            allowed = COMMON_SCHEMA if section == "common" else schema
            for key, raw in ini.items(section):
                if key not in allowed:
                    raise ConfigError(
                        f"unknown key {key!r} in section [{section}]"
                    )
                try:
                    cfg[key] = allowed[key](raw)
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise ConfigError(
                        f"bad value for {key!r} in [{section}]: {raw!r}"
                    ) from exc
    for key in schema:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _params(cfg: dict, **overrides) -> ModelParams:
    fields = {
        "t1": cfg["t1"], "t2": cfg["t2"], "gamma": cfg["gamma"],
        "big_gamma": cfg["big_gamma"], "n_modes": cfg["n_modes"],
        "omega": cfg["omega"], "probe_amplitude": cfg["probe_amplitude"],
        "probe_port": cfg["probe_port"],
    }
    fields.update(overrides)
    return ModelParams(**fields)


def _odd_range(n_min: int, n_max: int) -> tuple[int, ...]:
    if n_min % 2 == 0 or n_min < 3 or n_max < n_min:
        raise ConfigError(f"need odd n_min >= 3 and n_max >= n_min, "
                          f"got {n_min}..{n_max}")
    return tuple(range(n_min, n_max + 1, 2))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _write_csv(path: Path, header: list[str], rows) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _write_manifest(outdir: Path, sub: str, cfg: dict, t0: float) -> None:
    lines = [
        f"subcommand = {sub}",
        f"version = {__version__}",
        f"wall_time_s = {time.perf_counter() - t0:.3f}",
    ]
    for key in sorted(cfg):
        lines.append(f"{key} = {_fmt(cfg[key])}")
    tmp = outdir / "manifest.txt.tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, outdir / "manifest.txt")


def _run_winding(cfg: dict, outdir: Path) -> None:
    print(winding_number(_params(cfg)))


def _run_phase_diagram(cfg: dict, outdir: Path) -> None:
    t1s = np.linspace(cfg["t1_min"], cfg["t1_max"], cfg["t1_points"])
    t2s = np.linspace(cfg["t2_min"], cfg["t2_max"], cfg["t2_points"])
    grid = phase_diagram(t1s, t2s, cfg["gamma"])
    rows = [(p.t1, p.t2, p.gamma, p.nu) for row in grid for p in row]
    _write_csv(outdir / "phase.csv", ["t1", "t2", "gamma", "nu"], rows)


FISHER_N_HEADER = ["N", "t1", "t2", "gamma", "big_gamma", "omega",
                   "fisher", "mean_term", "cov_term", "nu", "stable"]
FIT_HEADER = ["alpha", "two_alpha", "intercept", "window_min", "window_max",
              "r_squared", "saturated_value", "reason"]


def _sweep_csv_rows(sweep):
    for r in sweep.rows:
        p = r.params
        yield (p.n_modes, p.t1, p.t2, p.gamma, p.big_gamma, p.omega,
               r.fisher, r.mean_term, r.cov_term, r.nu, r.stable)


def _run_fisher_scaling(cfg: dict, outdir: Path) -> None:
    params = _params(cfg)
    sweep = fisher_vs_n(params, _odd_range(cfg["n_min"], cfg["n_max"]))
    _write_csv(outdir / "fisher_n.csv", FISHER_N_HEADER, _sweep_csv_rows(sweep))
    try:
        fit = fit_growth_rate(sweep)
        row = (fit.alpha, 2.0 * fit.alpha, fit.intercept, fit.window[0],
               fit.window[1], fit.r_squared, fit.saturated_value, "")
    except NoLinearWindowError:
        row = (None, None, None, None, None, None, None, "no_linear_window")
    _write_csv(outdir / "fit.csv", FIT_HEADER, [row])


def _run_resonance_t1(cfg: dict, outdir: Path) -> None:
    params = _params(cfg)
    n_list = _odd_range(cfg["n_min"], cfg["n_max"])
    points = t1_resonance_scan(cfg["t1_list"], params, n_list)
    rows = []
    for pt in points:
        if pt.fit is None:
            rows.append((pt.t1, pt.omega, None, None, None))
        else:
            rows.append((pt.t1, pt.omega, pt.fit.alpha, 2.0 * pt.fit.alpha,
                         pt.fit.r_squared))
    _write_csv(outdir / "alpha_t1.csv",
               ["t1", "omega", "alpha", "two_alpha", "r_squared"], rows)


def _run_resonance_omega(cfg: dict, outdir: Path) -> None:
    params = _params(cfg, t1=cfg["t1"])
    omegas = np.linspace(cfg["omega_min"], cfg["omega_max"],
                         cfg["omega_points"])
    for n in cfg["n_list"]:
        if n % 2 == 0 or n < 3:
            raise ConfigError(f"n_list entries must be odd >= 3, got {n}")
    sweep = omega_scan(omegas, cfg["n_list"], params)
    peak_at = {p["n_modes"]: p["omega_peak"] for p in sweep.metadata["peaks"]}
    rows = []
    for r in sweep.rows:
        flag = int(peak_at.get(r.params.n_modes) == r.params.omega)
        rows.append((r.params.omega, r.params.n_modes, r.fisher, flag))
    _write_csv(outdir / "fisher_omega.csv",
               ["omega", "N", "fisher", "peak_flag"], rows)


def _run_classical_shift(cfg: dict, outdir: Path) -> None:
    params = _params(cfg, big_gamma=0.0)
    shifts = classical_edge_shift(params, _odd_range(cfg["n_min"], cfg["n_max"]),
                                  big_gamma=cfg["big_gamma"])
    rows = [(s.n_modes, s.big_gamma, s.delta_e0, s.alpha_c) for s in shifts]
    _write_csv(outdir / "classical.csv",
               ["N", "big_gamma", "delta_e0", "alpha_c_running"], rows)


def _run_validate_cr(cfg: dict, outdir: Path) -> None:
    check = cramer_rao_check(
        true_gamma=cfg["true_gamma"],
        bracket=(cfg["bracket_lo"], cfg["bracket_hi"]),
        n_samples=cfg["n_samples"], n_batches=cfg["batches"],
        seed=cfg["seed"],
    )
    _write_csv(outdir / "cr.csv",
               ["n_samples", "batches", "mle_variance", "inverse_fisher",
                "ratio"],
               [(check.n_samples, check.n_batches, check.mle_variance,
                 check.inverse_fisher, check.ratio)])


RUNNERS = {
    "winding": _run_winding,
    "phase-diagram": _run_phase_diagram,
    "fisher-scaling": _run_fisher_scaling,
    "resonance-t1": _run_resonance_t1,
    "resonance-omega": _run_resonance_omega,
    "classical-shift": _run_classical_shift,
    "validate-cr": _run_validate_cr,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.subcommand, args)
        outdir = Path(cfg["out"])
        outdir.mkdir(parents=True, exist_ok=True)
        t0 = time.perf_counter()
        RUNNERS[args.subcommand](cfg, outdir)
        _write_manifest(outdir, args.subcommand, cfg, t0)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except QuantosError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
