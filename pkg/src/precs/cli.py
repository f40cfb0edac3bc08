"""``precs <command> --config path`` front end.

Exit codes: 0 success (warnings are reported in the JSON output), 2 config
error, 3 grid coverage or truncation error, 4 numeric contract violation.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import dynamics, lindblad_field, parametric
from .config import RunConfig
from .errors import ConfigError, NumericError, PrecsError
from .io import write_csv, write_json
from .models import (
    PureDephasingModel,
    jc_classical_equation,
    pd_classical_equation,
    strong_coupling_report,
)
from .operators import projector, span_residual

log = logging.getLogger("precs")


def _outdir(cfg: RunConfig) -> Path:
    out = Path(os.environ.get("PRECS_OUT") or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _matrix(M):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


def cmd_decompose(cfg: RunConfig) -> dict:
    out = _outdir(cfg)
    psi = cfg.initial_state()
    field = parametric.decompose(psi, cfg.grid(), cfg.tolerances)
    parametric.write_field_csv(field, out / "field.csv")
    report = {
        "chi2_norm_dev": field.norm_deviation(),
        "reconstruction_err": parametric.reconstruction_error(psi, field),
        "n_points": int(field.grid.size),
        "n_masked": int(np.sum(field.mask)),
    }
    write_json(out / "decompose_report.json", report)
    return report


def _state_at(cfg: RunConfig, t: float):
    psi0 = cfg.initial_state()
    if t == 0:
        return psi0
    if t < 0:
        raise ConfigError("--t must be non-negative")
    H = cfg.model_obj().hamiltonian(cfg.n_max)
    return dynamics.evolve_exact(H, psi0, [t], cfg.tolerances).states[-1]


def cmd_lindblad_field(cfg: RunConfig, t: float) -> dict:
    out = _outdir(cfg)
    model = cfg.model_obj()
    psi = _state_at(cfg, t)
    field = parametric.decompose(psi, cfg.grid(), cfg.tolerances)
    lf = lindblad_field.assemble(field, model.terms())
    lindblad_field.write_F_csv(lf, out / "lindblad_field.csv")
    rhs = lindblad_field.gksl_rhs(lf)
    idx = np.flatnonzero(lf.assembled)
    finite = bool(np.all(np.isfinite(lf.F[idx])) and np.all(np.isfinite(lf.L[lf.active])))
    report = {
        "t": t,
        "n_assembled": int(idx.size),
        "all_finite": finite,
        "trace_gksl_rhs": float(abs(np.trace(rhs))),
        "gksl_rhs": _matrix(rhs),
        "chi2_norm_dev": field.norm_deviation(),
    }
    if isinstance(model, PureDephasingModel):
        report["max_span_residual"] = max(
            (span_residual(lf.F[j, k]) for j in idx for k in range(2)), default=0.0
        )
    write_json(out / "lindblad_field_report.json", report)
    if not finite:
        raise NumericError("non-finite operators in the assembled field")
    return report


def _classical(cfg: RunConfig):
    model = cfg.model_obj()
    if isinstance(model, PureDephasingModel):
        return pd_classical_equation(model, cfg.field_h)
    return jc_classical_equation(model)


def _run_engine(cfg: RunConfig, engine: str, dt: float):
    times = cfg.times()
    if engine == "exact":
        H = cfg.model_obj().hamiltonian(cfg.n_max)
        return dynamics.evolve_exact(H, cfg.initial_state(), times, cfg.tolerances)
    H_eff, jump = _classical(cfg)
    if engine == "gksl":
        rho0 = projector(cfg.qubit)
        return dynamics.evolve_gksl(H_eff, [jump], rho0, times, dt=dt, tol=cfg.tolerances)
    if engine == "decoupled":
        branches = cfg.branches or [(1.0, cfg.qubit)]
        bs = [dynamics.Branch(w, q, [jump]) for w, q in branches]
        return dynamics.evolve_decoupled_markov(H_eff, bs, times, dt=dt, tol=cfg.tolerances)
    raise ConfigError(f"unknown engine {engine!r}")


def cmd_evolve(cfg: RunConfig, engine: str) -> dict:
    out = _outdir(cfg)
    traj = _run_engine(cfg, engine, cfg.dt)
    dynamics.write_trajectory_csv(traj, out / f"trajectory_{engine}.csv")
    diag = traj.diagnostics()
    report = {
        "engine": engine,
        "max_trace_dev": float(np.max(diag["trace_dev"])),
        "max_herm_residual": float(np.max(diag["herm"])),
        "min_eig": float(np.min(diag["min_eig"])),
        "warnings": list(traj.warnings),
        "positivity_warning": bool(traj.warnings),
    }
    if engine == "exact":
        norms = np.array([s.norm for s in traj.states])
        report["norm_drift"] = float(np.max(np.abs(norms - 1.0)))
    elif cfg.order_check:
        # Successive-halving differences shrink by 2^4 for a 4th-order scheme.
        r1 = _run_engine(cfg, engine, cfg.dt / 2).densities()
        r2 = _run_engine(cfg, engine, cfg.dt / 4).densities()
        e1 = float(np.max(np.abs(traj.densities() - r1)))
        e2 = float(np.max(np.abs(r1 - r2)))
        report["order_check"] = {"diff_dt_dt2": e1, "diff_dt2_dt4": e2, "ratio": e1 / e2 if e2 else None}
        log.info("dt-halving error ratio %s", report["order_check"]["ratio"])
    write_json(out / f"evolve_{engine}_report.json", report)
    for w in traj.warnings:
        log.warning(w)
    return report


def cmd_gamma_curve(cfg: RunConfig, g_list) -> dict:
    out = _outdir(cfg)
    curves = strong_coupling_report(cfg.omega, g_list, cfg.curve_samples, cfg.threshold)
    rows = []
    for i, c in enumerate(curves):
        write_csv(out / f"gamma_curve_{i:02d}.csv", ("t", "T", "T_normalized"), np.column_stack([c.t, c.T, c.normalized]))
        rows.append((c.g, c.fraction_below))
    write_csv(out / "gamma_fractions.csv", ("g", "fraction_below"), rows)
    fractions = [f for _, f in rows]
    report = {
        "g_list": [c.g for c in curves],
        "fraction_below": fractions,
        "threshold": cfg.threshold,
        "monotone": bool(all(b >= a for a, b in zip(fractions, fractions[1:]))),
    }
    write_json(out / "gamma_curve_report.json", report)
    return report


def _parse_g_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--g-list must be comma-separated numbers, got {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="precs", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="cap the BLAS worker pool")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--config", required=True)
        return sp

    add("decompose", "parametric decomposition of the initial state")
    sp = add("lindblad-field", "label-local F and L operators at time t")
    sp.add_argument("--t", type=float, default=0.0)
    sp = add("evolve", "integrate the reduced dynamics")
    sp.add_argument("--engine", choices=("exact", "gksl", "decoupled"), default="exact")
    sp = add("gamma-curve", "normalized dephasing-rate curves over a coupling ladder")
    sp.add_argument("--g-list", default=None, help="comma-separated couplings")
    return p


def _limits(threads):
    if threads is None:
        return contextlib.nullcontext()
    if threads < 1:
        raise ConfigError("--threads must be at least 1")
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=threads)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig.load(args.config)
        with _limits(args.threads):
            if args.command == "decompose":
                cmd_decompose(cfg)
            elif args.command == "lindblad-field":
                cmd_lindblad_field(cfg, args.t)
            elif args.command == "evolve":
                cmd_evolve(cfg, args.engine)
            elif args.command == "gamma-curve":
                g_list = _parse_g_list(args.g_list) if args.g_list else cfg.g_list
                cmd_gamma_curve(cfg, g_list)
    except PrecsError as exc:
        print(f"precs: error: {exc}", file=sys.stderr)
        deficit = getattr(exc, "deficit", None)
        if deficit is not None:
            print(f"precs: normalization deficit {deficit:.6g}", file=sys.stderr)
        return exc.exit_code
    return 0


def main():
    sys.exit(run())
