"""Batch command-line front end.

Four subcommands (simulate, equilibrium, casimir, spectrum) wire the
library modules to files on disk.  Every run writes a key: value
manifest echoing all parameters and the package version, so a run can
be reproduced exactly from its output directory.

Exit codes are a stable contract:
    0  success
    1  file or solver failure
    2  usage error / malformed function spec
    3  equilibrium iteration did not converge
    4  certified nonexistent
    5  kernel-membership check failed
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .casimir import (
    PiecewiseMonotone,
    check_kernel_membership,
    detect_plateaus,
    kernel_field,
    load_function,
)
from .demo import eigenmix, make_plateau_demo, plateau_generator
from .dynamics import SimConfig, simulate, write_diagnostics_csv
from .elliptic import eigenpairs
from .equilibrium import (
    EquilibriumSpec,
    certificate_csv,
    certificate_text,
    existence_condition,
    fixed_point_solve,
    prop1_certificate,
    prop2_certificate,
    write_trace_csv,
)
from .errors import BoundaryConditionError, FieldFormatError, SolverError, SupnormError
from .grid import ScalarField, make_grid, read_field, write_field


def _write_manifest(out_dir, command, params):
    lines = [f"command: {command}", f"version: {__version__}"]
    lines += [f"{k}: {v}" for k, v in sorted(params.items())]
    with open(os.path.join(out_dir, "manifest.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _load_init(init, n):
    grid = make_grid(n)
    if init == "eigenmix":
        return eigenmix(grid)
    if init == "plateau-demo":
        return make_plateau_demo(grid).omega
    if init.startswith("file:"):
        return read_field(init[len("file:"):])
    raise ValueError(
        f"unknown init {init!r}: expected eigenmix, plateau-demo or file:<path>"
    )


def _load_generator(path):
    try:
        return load_function(path)
    except OSError as exc:
        raise _Fail(1, f"cannot read function spec {path}: {exc}") from exc
    except ValueError as exc:
        raise _Fail(2, f"malformed function spec {path}: {exc}") from exc


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def cmd_simulate(args):
    omega0 = _load_init(args.init, args.n)
    casimirs = [_load_generator(p).primitive for p in args.casimir]
    cfg = SimConfig(
        dt=args.dt,
        t_end=args.t_end,
        solver_tol=args.solver_tol,
        diag_every=args.diag_every,
        casimir_list=casimirs,
        supnorm_cap=args.supnorm_cap,
        checkpoint_every=args.checkpoint_every,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    _write_manifest(
        args.out_dir,
        "simulate",
        {
            "n": args.n,
            "dt": args.dt,
            "t_end": args.t_end,
            "init": args.init,
            "casimir": ";".join(args.casimir),
            "diag_every": args.diag_every,
            "supnorm_cap": args.supnorm_cap,
            "solver_tol": args.solver_tol,
            "checkpoint_every": args.checkpoint_every,
        },
    )

    def checkpoint(step, t, om):
        write_field(os.path.join(args.out_dir, f"ckpt_{step:06d}.fld"), om)

    try:
        final, rows = simulate(omega0, cfg, on_checkpoint=checkpoint)
    except SupnormError as exc:
        write_diagnostics_csv(os.path.join(args.out_dir, "diagnostics.csv"), exc.rows)
        raise _Fail(1, f"watchdog abort: {exc}") from exc
    write_diagnostics_csv(os.path.join(args.out_dir, "diagnostics.csv"), rows)
    write_field(os.path.join(args.out_dir, "final.fld"), final)
    print(f"simulate: {len(rows)} diagnostics rows, final t = {rows[-1].t:g}")
    return 0


def _parse_certify(text):
    if text == "existence":
        return ("existence",)
    if text.startswith("prop1:"):
        return ("prop1", float(text[len("prop1:"):]))
    if text.startswith("prop2:"):
        parts = text[len("prop2:"):].split(",")
        if len(parts) != 3:
            raise ValueError("prop2 takes <j>,<A>,<B>")
        return ("prop2", int(parts[0]), float(parts[1]), float(parts[2]))
    raise ValueError(
        f"unknown certificate {text!r}: expected existence, prop1:<c> or prop2:<j>,<A>,<B>"
    )


def cmd_equilibrium(args):
    grid = make_grid(args.n)
    f = _load_generator(args.f)
    try:
        spec = EquilibriumSpec(
            f=f,
            relax=args.relax,
            max_iter=args.max_iter,
            fp_tol=args.fp_tol,
            solver_tol=args.solver_tol,
        )
    except ValueError as exc:
        raise _Fail(2, f"invalid equilibrium spec: {exc}") from exc
    os.makedirs(args.out_dir, exist_ok=True)
    _write_manifest(
        args.out_dir,
        "equilibrium",
        {
            "n": args.n,
            "f": args.f,
            "relax": args.relax,
            "max_iter": args.max_iter,
            "fp_tol": args.fp_tol,
            "solver_tol": args.solver_tol,
            "certify": args.certify or "",
        },
    )
    omega0 = ScalarField(grid, np.zeros(grid.shape), zero_trace=True)
    result = fixed_point_solve(spec, omega0)
    write_field(os.path.join(args.out_dir, "equilibrium.fld"), result.omega)
    write_field(os.path.join(args.out_dir, "phi.fld"), result.phi)
    write_trace_csv(os.path.join(args.out_dir, "trace.csv"), result)

    certified_nonexistent = False
    if args.certify:
        kind = _parse_certify(args.certify)
        if kind[0] == "existence":
            spectral = eigenpairs(grid, 1, tol=args.solver_tol)
            cert = existence_condition(f, grid, spectral)
        elif kind[0] == "prop1":
            spectral = eigenpairs(grid, 1, tol=args.solver_tol)
            cert = prop1_certificate(kind[1], spectral)
        else:
            j = kind[1]
            spectral = eigenpairs(grid, max(j, 1), tol=args.solver_tol)
            cert = prop2_certificate(j, kind[2], kind[3], spectral)
        with open(os.path.join(args.out_dir, "certificate.txt"), "w") as fh:
            fh.write(certificate_text(cert))
        with open(os.path.join(args.out_dir, "certificate.csv"), "w") as fh:
            fh.write(certificate_csv(cert))
        print(f"certificate: {cert.kind} -> {cert.verdict}")
        certified_nonexistent = cert.verdict == "nonexistent"

    print(
        f"equilibrium: converged={result.converged} iterations={result.iterations} "
        f"residual={result.residual_semilinear:.3e}"
    )
    if certified_nonexistent:
        return 4
    return 0 if result.converged else 3


def cmd_casimir(args):
    demo = None
    if args.omega == "plateau-demo":
        if args.n is None:
            raise _Fail(2, "--omega plateau-demo requires --n")
        demo = make_plateau_demo(make_grid(args.n))
        omega = demo.omega
    else:
        omega = read_field(args.omega)
    if args.g == "plateau-demo":
        g = plateau_generator()
    else:
        g = _load_generator(args.g)
    fill_flag = args.fill
    if fill_flag is None:
        # the demo ships its own H1 ramp selection; midpoint otherwise
        fill_flag = "demo-ramp" if demo is not None else "midpoint"
    if fill_flag == "midpoint":
        fill = "midpoint"
    elif fill_flag == "demo-ramp":
        if demo is None:
            raise _Fail(2, "--fill demo-ramp only applies with --omega plateau-demo")
        fill = demo.fill
    elif fill_flag.startswith("file:"):
        fill = read_field(fill_flag[len("file:"):])
    else:
        raise _Fail(2, f"unknown fill {fill_flag!r}: expected midpoint, demo-ramp or file:<path>")
    os.makedirs(args.out_dir, exist_ok=True)
    _write_manifest(
        args.out_dir,
        "casimir",
        {
            "omega": args.omega,
            "g": args.g,
            "n": args.n if args.n is not None else omega.grid.n,
            "fill": fill_flag,
            "tol": args.tol if args.tol is not None else "default",
            "value_tol": args.value_tol if args.value_tol is not None else "default",
        },
    )
    write_field(os.path.join(args.out_dir, "omega.fld"), omega)
    report = detect_plateaus(omega, value_tol=args.value_tol)
    with open(os.path.join(args.out_dir, "plateaus.txt"), "w") as fh:
        fh.write(f"count: {len(report)}\n")
        fh.write(f"value_tol: {float(report.value_tol)!r}\n")
        fh.write(f"min_area: {float(report.min_area)!r}\n")
        for i, p in enumerate(report):
            fh.write(f"plateau_{i}_value: {float(p.value)!r}\n")
            fh.write(f"plateau_{i}_area: {float(p.area)!r}\n")
            fh.write(f"plateau_{i}_count: {p.count}\n")
    try:
        psi = kernel_field(g, omega, plateau_fill=fill, value_tol=args.value_tol)
    except BoundaryConditionError as exc:
        raise _Fail(5, f"boundary condition violated: {exc}") from exc
    write_field(os.path.join(args.out_dir, "psi.fld"), psi)
    kr = check_kernel_membership(omega, psi, tol=args.tol)
    with open(os.path.join(args.out_dir, "kernel.txt"), "w") as fh:
        fh.write(f"weak_residual: {float(kr.weak)!r}\n")
        fh.write(f"scale: {float(kr.scale)!r}\n")
        fh.write(f"tol: {float(kr.tol)!r}\n")
        fh.write(f"threshold: {float(kr.threshold)!r}\n")
        fh.write(f"passed: {kr.passed}\n")
    print(
        f"casimir: plateaus={len(report)} weak_residual={kr.weak:.3e} "
        f"threshold={kr.threshold:.3e} passed={kr.passed}"
    )
    return 0 if kr.passed else 5


def cmd_spectrum(args):
    grid = make_grid(args.n)
    os.makedirs(args.out_dir, exist_ok=True)
    _write_manifest(
        args.out_dir,
        "spectrum",
        {"n": args.n, "k": args.k, "tol": args.tol},
    )
    spectral = eigenpairs(grid, args.k, tol=args.tol)
    with open(os.path.join(args.out_dir, "eigenvalues.csv"), "w") as fh:
        fh.write("index,eigenvalue\n")
        for i, lam in enumerate(spectral.eigenvalues, start=1):
            fh.write(f"{i},{float(lam)!r}\n")
    for i, phi in enumerate(spectral.eigenfunctions, start=1):
        write_field(os.path.join(args.out_dir, f"phi_{i:03d}.fld"), phi)
    print(f"spectrum: k={args.k} lambda_1={spectral.eigenvalues[0]:.6f}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="caslab",
        description="Vorticity-bracket laboratory: simulation, equilibria, "
        "Casimir construction and Laplacian spectra on the unit square.",
    )
    ap.add_argument("--version", action="version", version=f"caslab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="advance the vorticity equation")
    sim.add_argument("--n", type=int, required=True, help="interior nodes per side")
    sim.add_argument("--dt", type=float, required=True)
    sim.add_argument("--t-end", type=float, required=True)
    sim.add_argument("--init", required=True, help="eigenmix | plateau-demo | file:<path>")
    sim.add_argument("--casimir", action="append", default=[], metavar="SPEC", help="generator spec file; repeatable")
    sim.add_argument("--out-dir", required=True)
    sim.add_argument("--diag-every", type=int, default=10)
    sim.add_argument("--supnorm-cap", type=float, default=1e6)
    sim.add_argument("--solver-tol", type=float, default=1e-10)
    sim.add_argument("--checkpoint-every", type=int, default=0)
    sim.set_defaults(func=cmd_simulate)

    eq = sub.add_parser("equilibrium", help="solve omega = f(K omega) and certify")
    eq.add_argument("--n", type=int, required=True)
    eq.add_argument("--f", required=True, help="profile spec file")
    eq.add_argument("--relax", type=float, default=0.5)
    eq.add_argument("--max-iter", type=int, default=200)
    eq.add_argument("--fp-tol", type=float, default=1e-10)
    eq.add_argument("--solver-tol", type=float, default=1e-10)
    eq.add_argument("--certify", default=None, help="existence | prop1:<c> | prop2:<j>,<A>,<B>")
    eq.add_argument("--out-dir", required=True)
    eq.set_defaults(func=cmd_equilibrium)

    cas = sub.add_parser("casimir", help="plateaus, kernel field, membership check")
    cas.add_argument("--omega", required=True, help=".fld path or plateau-demo")
    cas.add_argument("--g", required=True, help="generator spec file or plateau-demo")
    cas.add_argument("--n", type=int, default=None, help="grid size for plateau-demo")
    cas.add_argument("--fill", default=None, help="midpoint | demo-ramp | file:<path> (default: demo-ramp for plateau-demo, else midpoint)")
    cas.add_argument("--tol", type=float, default=None, help="membership tolerance (default 8 h^2)")
    cas.add_argument("--value-tol", type=float, default=None)
    cas.add_argument("--out-dir", required=True)
    cas.set_defaults(func=cmd_casimir)

    spec = sub.add_parser("spectrum", help="lowest Dirichlet Laplacian eigenpairs")
    spec.add_argument("--n", type=int, required=True)
    spec.add_argument("--k", type=int, default=3)
    spec.add_argument("--tol", type=float, default=1e-10)
    spec.add_argument("--out-dir", required=True)
    spec.set_defaults(func=cmd_spectrum)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (FieldFormatError, OSError) as exc:
        print(f"error: cannot read field: {exc}", file=sys.stderr)
        return 1
    except (SolverError, SupnormError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
