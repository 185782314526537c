"""Command-line driver.

Subcommands: generate (correlator sweep of the exchange model), readout
(probe-based population tomography), certify (metrology certificates from a
grid), oracle-check (brute-force cross-validation).  Every report writes
delimited text plus a rendered figure, with a .meta.json sidecar recording
the conventions; reruns with the same configuration are byte-identical.

Exit codes: 0 success, 1 failed check, 2 bad configuration, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .certify import certification_scan, certify
from .generation import CentralSpinParams, effective_model_deficit, sweep
from .oracle import oracle_suite
from .readout import (
    ReadoutGrid,
    ReconstructionError,
    SymmetricDensityMatrix,
    direct_grid,
    population_spectrum,
    simulate_probe_run,
    twisted_readout_state,
)
from .serialize import write_csv, write_json
from .spincore import HalfInteger, coherent_state

__all__ = ["main"]


class ConfigError(ValueError):
    pass


_DEFAULTS = {
    "generate": {
        "mu": 8,
        "omega_probe": 11.0,
        "omega_sys": 1.0,
        "g": 0.05,
        "time_max": math.pi,
        "points": 201,
        "azimuth_grid": 96,
    },
    "readout": {
        "n": 64,
        "state": "ghz",
        "chi_t": 0.3,
        "n_theta": 0,  # 0 means 4(N+1)
        "coupling": 1.0,
    },
    "certify": {
        "n": 8,
        "state": "ghz",
        "chi_t": 0.3,
        "n_theta": 0,
        "grid": "",
    },
    "oracle-check": {
        "mu": 8,
        "n": 8,
    },
}

_STATES = ("css", "ghz", "oat", "mixed")


def _merge_config(command: str, config_path: str | None, overrides: dict) -> dict:
    cfg = dict(_DEFAULTS[command])
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(data) - set(cfg))
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
        cfg.update(data)
    for key, val in overrides.items():
        if val is not None:
            cfg[key] = val
    for key, default in _DEFAULTS[command].items():
        val = cfg[key]
        try:
            if isinstance(default, str):
                cfg[key] = str(val)
            elif isinstance(default, int):
                if int(val) != val:
                    raise ValueError
                cfg[key] = int(val)
            else:
                cfg[key] = float(val)
        except (TypeError, ValueError):
            raise ConfigError(f"config key {key} has the wrong type: {val!r}") from None
    return cfg


def _state_and_oracle(kind: str, n: int, chi_t: float):
    if kind == "mixed":
        return SymmetricDensityMatrix.maximally_mixed(n), None
    if kind == "css":
        vec = coherent_state(HalfInteger(n), math.pi / 2.0, 0.0)
    elif kind == "ghz":
        vec = np.zeros(n + 1, dtype=complex)
        vec[0] = vec[-1] = 1.0 / math.sqrt(2.0)
    elif kind == "oat":
        vec = twisted_readout_state(n, chi_t)
    else:
        raise ConfigError(f"unknown state {kind!r}; choose from {', '.join(_STATES)}")
    return SymmetricDensityMatrix.from_state(vec), vec


def _conventions() -> dict:
    return {
        "row_order": "descending z label n = +N/2 .. -N/2",
        "coherence_normalization": "a(0) = 1; physical off-diagonal is a/2",
        "tick_time": "t_k = pi*k / (2*J*(N+1))",
        "float_format": ".12g",
    }


def _cmd_generate(cfg: dict, outdir: Path, seed: int) -> int:
    if cfg["mu"] < 3:
        raise ConfigError("mu must be at least 3 (probe plus a twistable ensemble)")
    if cfg["points"] < 2:
        raise ConfigError("points must be at least 2")
    if cfg["time_max"] <= 0.0:
        raise ConfigError("time_max must be positive")
    if cfg["azimuth_grid"] < 8:
        raise ConfigError("azimuth_grid must be at least 8")
    try:
        params = CentralSpinParams(cfg["omega_probe"], cfg["omega_sys"], cfg["g"])
        if params.g == 0.0:
            raise ValueError("coupling g must be nonzero")
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    times = np.linspace(0.0, cfg["time_max"], cfg["points"])
    result = sweep(params, cfg["mu"] - 1, times, cfg["azimuth_grid"])
    deficit = effective_model_deficit(params, cfg["mu"] - 1)
    rows = zip(result.times, result.q_exact, result.q_oat, result.azimuth_star)
    write_csv(outdir / "generate.csv", ["chi_t", "q_exact", "q_oat", "azimuth_star"], rows)
    meta = {
        "command": "generate",
        "config": cfg,
        "seed": seed,
        "conventions": _conventions(),
        "q_ceiling": cfg["mu"] - 2,
        "q_eff": list(result.q_eff),
        "max_exact_vs_eff": float(np.max(np.abs(result.q_exact - result.q_eff))),
        "model_infidelity_window": deficit,
    }
    write_json(outdir / "generate.meta.json", meta)
    from .figures import fig_generate

    fig_generate(result, outdir / "generate.png")
    print(
        f"generate: {cfg['points']} points, mu={cfg['mu']}, "
        f"max Q_exact = {np.max(result.q_exact):.6f} -> {outdir / 'generate.csv'}"
    )
    return 0


def _cmd_readout(cfg: dict, outdir: Path, seed: int) -> int:
    n = cfg["n"]
    if n < 1:
        raise ConfigError("n must be at least 1")
    n_theta = cfg["n_theta"] if cfg["n_theta"] > 0 else 4 * (n + 1)
    if n_theta < 2 * n + 2:
        raise ConfigError(f"n_theta must be at least 2N+2 = {2 * n + 2}")
    if cfg["coupling"] == 0.0:
        raise ConfigError("coupling must be nonzero")
    state, _ = _state_and_oracle(cfg["state"], n, cfg["chi_t"])
    grid, samples = simulate_probe_run(state, n_theta, cfg["coupling"])
    freqs, mags = population_spectrum(grid)
    grid_rows = (
        (grid.thetas[j], grid.labels[i], grid.p[i, j])
        for j in range(n_theta)
        for i in range(n + 1)
    )
    write_csv(outdir / "readout_grid.csv", ["theta", "n", "p"], grid_rows)
    sample_rows = (
        (grid.thetas[j], s.tau, s.value.real, s.value.imag, s.p_up)
        for j in range(n_theta)
        for s in samples[j]
    )
    write_csv(outdir / "probe_samples.csv", ["theta", "tau", "re_a", "im_a", "P"], sample_rows)
    write_csv(outdir / "spectrum.csv", ["frequency", "magnitude"], zip(freqs, mags))
    meta = {
        "command": "readout",
        "config": cfg,
        "seed": seed,
        "conventions": _conventions(),
        "n_theta": n_theta,
        "provenance": grid.provenance,
        "spectrum_row_label": float(grid.labels[n // 2]),
    }
    write_json(outdir / "readout.meta.json", meta)
    from .figures import fig_readout

    fig_readout(grid, freqs, mags, outdir / "readout.png")
    print(
        f"readout: N={n}, state={cfg['state']}, {n_theta} angles "
        f"-> {outdir / 'readout_grid.csv'}"
    )
    return 0


def _load_grid(path: str) -> ReadoutGrid:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read grid file: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"grid file is not theta,n,p CSV: {exc}") from exc
    if data.shape[1] != 3:
        raise ConfigError("grid file must have exactly theta,n,p columns")
    thetas = np.unique(data[:, 0])
    labels = np.unique(data[:, 1])[::-1]
    n = labels.shape[0] - 1
    if data.shape[0] != thetas.shape[0] * labels.shape[0]:
        raise ConfigError("grid file does not tabulate a full theta x n matrix")
    p = np.zeros((n + 1, thetas.shape[0]))
    col = np.searchsorted(thetas, data[:, 0])
    row = np.rint(labels[0] - data[:, 1]).astype(int)
    p[row, col] = data[:, 2]
    try:
        return ReadoutGrid(n, thetas, p, provenance="file")
    except ValueError as exc:
        raise ConfigError(f"grid file failed validation: {exc}") from exc


def _cmd_certify(cfg: dict, outdir: Path, seed: int) -> int:
    if cfg["grid"]:
        grid = _load_grid(cfg["grid"])
        oracle_vec = None
    else:
        n = cfg["n"]
        if n < 2:
            raise ConfigError("n must be at least 2")
        # the derivative-based certificates need a much denser default than
        # the readout Nyquist floor: central differences bias the Fisher
        # estimate, which can undercut the depth bound or overshoot the QFI
        # ceiling within the hierarchy tolerance
        n_theta = cfg["n_theta"] if cfg["n_theta"] > 0 else max(4096, 4 * (n + 1))
        if n_theta < 2 * n + 2:
            raise ConfigError(f"n_theta must be at least 2N+2 = {2 * n + 2}")
        state, oracle_vec = _state_and_oracle(cfg["state"], n, cfg["chi_t"])
        grid = direct_grid(state, n_theta)
    report = certify(grid, state_oracle=oracle_vec)
    write_json(outdir / "certify.json", report.to_dict())
    meta = {
        "command": "certify",
        "config": cfg,
        "seed": seed,
        "conventions": _conventions(),
        "n_qubits": grid.n_qubits,
        "n_theta": int(grid.thetas.shape[0]),
        "provenance": grid.provenance,
        "has_state_oracle": oracle_vec is not None,
    }
    write_json(outdir / "certify.meta.json", meta)
    xi2_arr, fisher_arr = certification_scan(grid)
    from .figures import fig_certify

    fig_certify(grid, xi2_arr, fisher_arr, report.theta_star, outdir / "certify.png")
    status = "ok" if report.hierarchy_ok else "HIERARCHY VIOLATED"
    print(
        f"certify: N={grid.n_qubits}, fisher={report.fisher:.6g}, "
        f"depth>={report.depth_bound}, {status} -> {outdir / 'certify.json'}"
    )
    return 0 if report.hierarchy_ok else 1


def _cmd_oracle_check(cfg: dict, outdir: Path, seed: int) -> int:
    if not (3 <= cfg["mu"] <= 12):
        raise ConfigError("mu must be between 3 and 12 for full tensor checks")
    if not (2 <= cfg["n"] <= 10):
        raise ConfigError("n must be between 2 and 10 for full tensor checks")
    records = oracle_suite(seed=seed, n_ensemble=cfg["mu"] - 1, n_readout=cfg["n"])
    write_json(
        outdir / "oracle_check.json",
        {"command": "oracle-check", "config": cfg, "seed": seed, "checks": records},
    )
    from .figures import fig_oracle

    fig_oracle(records, outdir / "oracle_check.png")
    all_ok = True
    for rec in records:
        mark = "ok  " if rec["passed"] else "FAIL"
        print(
            f"{mark} {rec['check']}: deviation {rec['max_deviation']:.3e} "
            f"(tolerance {rec['tolerance']:.0e})"
        )
        all_ok = all_ok and rec["passed"]
    return 0 if all_ok else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probebell",
        description="collective-spin Bell correlation generation, probe readout, certification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with configuration keys")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=7, help="seed for randomized checks")

    p = sub.add_parser("generate", help="sweep the correlator across twisting phases")
    common(p)
    p.add_argument("--mu", type=int)
    p.add_argument("--omega-probe", dest="omega_probe", type=float)
    p.add_argument("--omega-sys", dest="omega_sys", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--time-max", dest="time_max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--azimuth-grid", dest="azimuth_grid", type=int)

    p = sub.add_parser("readout", help="simulate the probe tomography protocol")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--state", choices=_STATES)
    p.add_argument("--chi-t", dest="chi_t", type=float)
    p.add_argument("--n-theta", dest="n_theta", type=int)
    p.add_argument("--coupling", type=float)

    p = sub.add_parser("certify", help="compute metrology certificates from a grid")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--state", choices=_STATES)
    p.add_argument("--chi-t", dest="chi_t", type=float)
    p.add_argument("--n-theta", dest="n_theta", type=int)
    p.add_argument("--grid", help="previously written theta,n,p CSV to certify")

    p = sub.add_parser("oracle-check", help="run the brute-force cross-checks")
    common(p)
    p.add_argument("--mu", type=int)
    p.add_argument("--n", type=int)

    return parser


_HANDLERS = {
    "generate": _cmd_generate,
    "readout": _cmd_readout,
    "certify": _cmd_certify,
    "oracle-check": _cmd_oracle_check,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {
        k: v
        for k, v in vars(args).items()
        if k in _DEFAULTS[args.command]
    }
    try:
        cfg = _merge_config(args.command, args.config, overrides)
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return _HANDLERS[args.command](cfg, outdir, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ReconstructionError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
