"""Batch command line front end.

Reads a JSON scenario file, dispatches to the analytic and/or Fock engines,
and writes CSV time series plus plain-text summary reports. Exit codes:
0 success, 1 scenario parse error, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import analytic, fock, structures
from .model import (Lct, ModeParams, MomentState, PhysicalConstants,
                    TwoModeSystem, assert_physical, lct_from_position_block,
                    vacuum_state, validate_lct)


class ParseError(Exception):
    """Malformed scenario file (bad JSON, missing/unknown keys, bad types)."""


class ValidationError(Exception):
    """Well-formed scenario violating a physical or structural invariant."""


_QUAD = ("x1", "p1", "x2", "p2")
_COV_PAIRS = [(i, j) for i in range(4) for j in range(i, 4)]


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


@dataclass(frozen=True)
class Scenario:
    system: TwoModeSystem
    initial: dict
    times: np.ndarray
    engine: str
    fock_dim: int
    lct: Lct | None
    seed: int


_MISSING = object()


def _get(d: dict, key: str, kind, default=_MISSING):
    if key not in d:
        if default is _MISSING:
            raise ParseError(f"missing scenario key: {key!r}")
        return default
    value = d[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ParseError(f"scenario key {key!r} has wrong type: "
                         f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_mode(d: dict, label: str) -> ModeParams:
    if not isinstance(d, dict):
        raise ParseError(f"scenario key {label!r} must be an object")
    try:
        return ModeParams(mass=_get(d, "mass", float),
                          omega=_get(d, "omega", float),
                          kappa=_get(d, "kappa", float))
    except ValueError as exc:
        raise ValidationError(f"{label}: {exc}") from exc


def _parse_lct(d: dict) -> Lct:
    if not isinstance(d, dict) or "M" not in d:
        raise ParseError("lct spec must be an object with key 'M'")
    try:
        m = np.asarray(d["M"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"lct position block is not numeric: {exc}") from exc
    try:
        if "N" in d:
            lct = Lct(M=m, N=np.asarray(d["N"], dtype=float))
            violations = validate_lct(lct)
            if violations:
                raise ValueError("invalid LCT: " + "; ".join(violations))
            return lct
        return lct_from_position_block(m)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def load_scenario(path: str) -> Scenario:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("scenario root must be a JSON object")

    sysd = _get(raw, "system", dict)
    try:
        constants = PhysicalConstants(hbar=_get(sysd, "hbar", float, 1.0))
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    system = TwoModeSystem(mode1=_parse_mode(_get(sysd, "mode1", dict), "mode1"),
                           mode2=_parse_mode(_get(sysd, "mode2", dict), "mode2"),
                           constants=constants)

    grid = _get(raw, "time_grid", dict)
    t_start = _get(grid, "t_start", float)
    t_end = _get(grid, "t_end", float)
    n_steps = _get(grid, "n_steps", int)
    if t_start < 0 or t_end <= t_start or n_steps < 1:
        raise ValidationError(
            f"time grid requires 0 <= t_start < t_end and n_steps >= 1, "
            f"got t_start={t_start}, t_end={t_end}, n_steps={n_steps}")
    times = (np.array([t_start]) if n_steps == 1
             else np.linspace(t_start, t_end, n_steps))

    engine = _get(raw, "engine", str, "analytic")
    if engine not in ("analytic", "fock", "both"):
        raise ValidationError(f"unknown engine {engine!r}")
    fock_dim = _get(raw, "fock_dim", int, 32)
    if fock_dim < 2:
        raise ValidationError(f"fock_dim must be >= 2, got {fock_dim}")

    initial = _get(raw, "initial", dict, {"type": "vacuum"})
    if _get(initial, "type", str) not in ("vacuum", "coherent", "moments",
                                          "density"):
        raise ValidationError(f"unknown initial state type "
                              f"{initial['type']!r}")

    lct = _parse_lct(raw["lct"]) if "lct" in raw else None
    seed = _get(raw, "seed", int, 0)
    return Scenario(system=system, initial=initial, times=times,
                    engine=engine, fock_dim=fock_dim, lct=lct, seed=seed)


def _coherent_displacements(initial: dict) -> tuple[complex, complex]:
    out = []
    for key in ("alpha1", "alpha2"):
        v = initial.get(key, 0.0)
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(v))
        elif isinstance(v, list) and len(v) == 2:
            out.append(complex(v[0], v[1]))
        else:
            raise ParseError(f"{key} must be a number or [re, im] pair")
    return out[0], out[1]


def initial_moment_state(scenario: Scenario) -> MomentState:
    system, initial = scenario.system, scenario.initial
    kind = initial["type"]
    if kind == "vacuum":
        return vacuum_state(system)
    if kind == "coherent":
        a1, a2 = _coherent_displacements(initial)
        hbar = system.constants.hbar
        mean = []
        for alpha, mode in zip((a1, a2), system.modes):
            mean.append(np.sqrt(2.0 * hbar / (mode.mass * mode.omega)) * alpha.real)
            mean.append(np.sqrt(2.0 * hbar * mode.mass * mode.omega) * alpha.imag)
        return MomentState(mean=np.array(mean), cov=vacuum_state(system).cov)
    if kind == "moments":
        try:
            state = MomentState(mean=np.asarray(_get(initial, "mean", list), dtype=float),
                                cov=np.asarray(_get(initial, "cov", list), dtype=float))
            assert_physical(state, system.constants.hbar)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"initial moments: {exc}") from exc
        return state
    # density: extract the moments through the Fock engine at t = 0
    rho = initial_density(scenario)
    return fock.two_mode_moments(rho, system, 0.0, scenario.fock_dim)


def initial_density(scenario: Scenario) -> np.ndarray:
    initial, dim = scenario.initial, scenario.fock_dim
    kind = initial["type"]
    if kind == "vacuum":
        return np.kron(fock.fock_density(0, dim), fock.fock_density(0, dim))
    if kind == "coherent":
        a1, a2 = _coherent_displacements(initial)
        try:
            return np.kron(fock.coherent_density(a1, dim),
                           fock.coherent_density(a2, dim))
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
    if kind == "density":
        real = initial.get("real")
        imag = initial.get("imag")
        try:
            rho = np.asarray(real, dtype=float).astype(complex)
            if imag is not None:
                rho = rho + 1j * np.asarray(imag, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"density matrix is not numeric: {exc}") from exc
        if rho.shape != (dim * dim, dim * dim):
            raise ValidationError(
                f"density matrix shape {rho.shape} does not match "
                f"fock_dim^2 = {dim * dim}")
        try:
            fock._check_density(rho)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        return rho
    raise ValidationError(
        "the fock engine needs an initial state expressible as a density "
        f"matrix; {kind!r} is not")


def _state_columns(lct: Lct | None) -> list[str]:
    cols = ["t"]
    cols += [f"mean_{q}" for q in _QUAD]
    cols += [f"cov_{_QUAD[i]}_{_QUAD[j]}" for i, j in _COV_PAIRS]
    cols += ["uncertainty_mode1", "uncertainty_mode2"]
    if lct is not None:
        cols += ["mean_XA", "mean_PA", "mean_xiB", "mean_piB",
                 "product_A", "product_B", "cov_XA_xiB", "cov_PA_piB"]
    return cols


def _state_row(t: float, state: MomentState, lct: Lct | None) -> list[str]:
    row = [_fmt(t)]
    row += [_fmt(v) for v in state.mean]
    row += [_fmt(state.cov[i, j]) for i, j in _COV_PAIRS]
    row += [_fmt(analytic.uncertainty_product(state, 1)),
            _fmt(analytic.uncertainty_product(state, 2))]
    if lct is not None:
        ts = structures.transform_state(state, lct)
        row += [_fmt(v) for v in ts.mean]
        row += [_fmt(np.sqrt(ts.cov[0, 0] * ts.cov[1, 1])),
                _fmt(np.sqrt(ts.cov[2, 2] * ts.cov[3, 3])),
                _fmt(ts.cov[0, 2]), _fmt(ts.cov[1, 3])]
    return row


def _atomic_write(path: str, content: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _decay_fit_slope(times: np.ndarray,
                     trajectory: list[MomentState]) -> float | None:
    """Least-squares slope of log|cov(x1,x2)| vs t; None if degenerate."""
    c = np.array([abs(s.cov[0, 2]) for s in trajectory])
    mask = c > 1e-290
    if mask.sum() < 2 or np.ptp(times[mask]) == 0:
        return None
    slope = np.polyfit(times[mask], np.log(c[mask]), 1)[0]
    return float(slope)


def run_evolve(scenario: Scenario, out_dir: str) -> None:
    system, times, lct = scenario.system, scenario.times, scenario.lct
    state0 = initial_moment_state(scenario)
    trajectories: dict[str, list[MomentState]] = {}
    if scenario.engine in ("analytic", "both"):
        trajectories["analytic"] = [analytic.evolve_state(state0, system, t)
                                    for t in times]
    if scenario.engine in ("fock", "both"):
        rho0 = initial_density(scenario)
        trajectories["fock"] = [fock.two_mode_moments(rho0, system, t,
                                                      scenario.fock_dim)
                                for t in times]

    primary = trajectories.get("analytic", trajectories.get("fock"))
    lines = [",".join(_state_columns(lct))]
    for t, state in zip(times, primary):
        lines.append(",".join(_state_row(t, state, lct)))
    _atomic_write(os.path.join(out_dir, "trajectory.csv"),
                  "\n".join(lines) + "\n")

    summary = [f"engine: {scenario.engine}",
               f"samples: {len(times)}",
               f"t_final: {_fmt(times[-1])}"]
    final = primary[-1]
    summary.append("final uncertainty products: "
                   f"{_fmt(analytic.uncertainty_product(final, 1))} "
                   f"{_fmt(analytic.uncertainty_product(final, 2))}")
    if system.mode1.kappa > 0 and system.mode2.kappa > 0:
        asym = analytic.asymptotic_state(system)
        summary.append("asymptotic cov diagonal: "
                       + " ".join(_fmt(v) for v in np.diag(asym.cov)))
    slope = _decay_fit_slope(times, primary)
    summary.append("covariance decay fit slope (x1,x2): "
                   + (_fmt(slope) if slope is not None else "n/a"))
    if scenario.engine == "both":
        dev = max(
            max(np.max(np.abs(a.mean - f.mean)), np.max(np.abs(a.cov - f.cov)))
            for a, f in zip(trajectories["analytic"], trajectories["fock"]))
        summary.append(f"max analytic-vs-fock deviation: {_fmt(dev)}")
    _atomic_write(os.path.join(out_dir, "summary.txt"),
                  "\n".join(summary) + "\n")


def run_oracle(scenario: Scenario, out_dir: str) -> None:
    system, dim = scenario.system, scenario.fock_dim
    rho0 = initial_density(scenario)
    state0 = initial_moment_state(scenario)
    lines = [f"fock_dim: {dim}"]
    worst_dev = 0.0
    for t in scenario.times:
        defects = [fock.completeness_defect(
            fock.kraus_operators(mode.kappa, t, dim)) for mode in system.modes]
        residuals = [fock.bh_identity_residual(mode.kappa, t, dim)
                     for mode in system.modes]
        a = analytic.evolve_state(state0, system, t)
        f = fock.two_mode_moments(rho0, system, t, dim)
        dev = max(np.max(np.abs(a.mean - f.mean)),
                  np.max(np.abs(a.cov - f.cov)))
        worst_dev = max(worst_dev, dev)
        lines.append(f"t={_fmt(t)} completeness={_fmt(max(defects))} "
                     f"bh_residual={_fmt(max(residuals))} "
                     f"engine_deviation={_fmt(dev)}")
    lines.append(f"max engine deviation: {_fmt(worst_dev)}")
    _atomic_write(os.path.join(out_dir, "oracle_report.txt"),
                  "\n".join(lines) + "\n")


def run_structure(scenario: Scenario, out_dir: str) -> None:
    if scenario.lct is None:
        raise ValidationError("the structure command needs an 'lct' entry "
                              "in the scenario")
    report = structures.evaluate_structure(scenario.lct.M, scenario.system)
    lines = ["position block M: "
             + " ".join(_fmt(v) for v in report.lct.M.ravel()),
             "momentum block N: "
             + " ".join(_fmt(v) for v in report.lct.N.ravel()),
             f"product_A: {_fmt(report.product_A)}",
             f"product_B: {_fmt(report.product_B)}",
             f"cov_xx: {_fmt(report.cov_xx)}",
             f"cov_pp: {_fmt(report.cov_pp)}",
             f"residual: {_fmt(report.residual)}"]
    _atomic_write(os.path.join(out_dir, "structure.txt"),
                  "\n".join(lines) + "\n")


def run_classicality(scenario: Scenario, out_dir: str) -> None:
    config = structures.SearchConfig(seed=scenario.seed)
    report, trace = structures.search_classical_structure(scenario.system,
                                                          config)
    lines = [f"seed: {scenario.seed}",
             f"restarts: {config.restarts}",
             f"best residual: {_fmt(report.residual)}",
             "best position block M: "
             + " ".join(_fmt(v) for v in report.lct.M.ravel()),
             f"product_A: {_fmt(report.product_A)}",
             f"product_B: {_fmt(report.product_B)}",
             f"cov_xx: {_fmt(report.cov_xx)}",
             f"cov_pp: {_fmt(report.cov_pp)}"]
    _atomic_write(os.path.join(out_dir, "classicality.txt"),
                  "\n".join(lines) + "\n")
    rows = ["restart,residual,iterations,trivial"]
    rows += [f"{r.index},{_fmt(r.residual)},{r.iterations},"
             f"{int(r.trivial)}" for r in trace]
    _atomic_write(os.path.join(out_dir, "search_trace.csv"),
                  "\n".join(rows) + "\n")


_COMMANDS = {"evolve": run_evolve, "oracle": run_oracle,
             "structure": run_structure, "classicality": run_classicality}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dampsim",
        description="Two-mode amplitude damping simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("evolve", "sample moment trajectories"),
                            ("oracle", "Fock-oracle consistency report"),
                            ("structure", "evaluate a given LCT structure"),
                            ("classicality", "search for classical-like "
                                             "alternate structures")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON scenario file")
        p.add_argument("--output", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.config)
        if args.seed is not None:
            scenario = Scenario(system=scenario.system,
                                initial=scenario.initial,
                                times=scenario.times, engine=scenario.engine,
                                fock_dim=scenario.fock_dim, lct=scenario.lct,
                                seed=args.seed)
        os.makedirs(args.output, exist_ok=True)
        _COMMANDS[args.command](scenario, args.output)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
