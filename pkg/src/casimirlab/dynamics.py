"""Time evolution of the vorticity transport equation.

The state is the scalar vorticity omega; its streamfunction phi solves
the Dirichlet Poisson problem and the tendency is the conservative
bracket {omega, phi}.  Classical fixed-step RK4 advances the state, so
the quadratic invariants (energy, enstrophy) drift only through the
time discretization — the spatial production terms vanish identically
for zero-trace data.  Arbitrary Casimir functionals can be monitored
alongside; only the quadratic ones are conserved by the spatial scheme,
so their drift tolerance is documented separately.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .bracket import bracket
from .casimir import casimir_functional
from .elliptic import solve_poisson
from .errors import SolverError, SupnormError
from .grid import ScalarField, inner, supnorm


@dataclass
class SimConfig:
    """Run parameters for `simulate`.

    casimir_list holds Primitive objects G; each contributes one
    diagnostics column h^2 * sum G(omega).  checkpoint_every = 0 turns
    checkpoint callbacks off.
    """

    dt: float
    t_end: float
    solver_tol: float = 1e-10
    diag_every: int = 10
    casimir_list: list = field(default_factory=list)
    supnorm_cap: float = 1e6
    method: str = "dst"
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end < self.dt:
            raise ValueError("t_end must be at least one step")
        if self.supnorm_cap <= 0.0:
            raise ValueError("supnorm_cap must be positive")
        if self.diag_every < 1:
            raise ValueError("diag_every must be >= 1")
        if self.solver_tol <= 0.0:
            raise ValueError("solver_tol must be positive")


@dataclass
class DiagnosticsRow:
    t: float
    energy: float
    enstrophy: float
    supnorm: float
    casimirs: tuple = ()


DIAG_COLUMNS = ("t", "energy", "enstrophy", "supnorm")


def hamiltonian(omega: ScalarField, tol: float = 1e-10, method: str = "dst") -> float:
    """H(omega) = 1/2 inner(K omega, omega), the kinetic energy."""
    phi = solve_poisson(omega, tol=tol, method=method)
    return 0.5 * inner(phi, omega)


def rhs(omega: ScalarField, tol: float = 1e-10, method: str = "dst") -> ScalarField:
    """Tendency {omega, K omega}."""
    phi = solve_poisson(omega, tol=tol, method=method)
    return bracket(omega, phi)


def step_rk4(omega: ScalarField, dt: float, tol: float = 1e-10, method: str = "dst") -> ScalarField:
    """One classical Runge-Kutta step; dt may be negative (time reversal)."""
    g = omega.grid
    zt = omega.zero_trace

    def f(values):
        return rhs(ScalarField(g, values, zero_trace=zt), tol=tol, method=method).values

    v = omega.values
    k1 = f(v)
    k2 = f(v + 0.5 * dt * k1)
    k3 = f(v + 0.5 * dt * k2)
    k4 = f(v + dt * k3)
    return ScalarField(g, v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), zero_trace=zt)


def _diag_row(omega: ScalarField, t: float, cfg: SimConfig) -> DiagnosticsRow:
    row = DiagnosticsRow(
        t=t,
        energy=hamiltonian(omega, tol=cfg.solver_tol, method=cfg.method),
        enstrophy=0.5 * inner(omega, omega),
        supnorm=supnorm(omega),
        casimirs=tuple(casimir_functional(G, omega) for G in cfg.casimir_list),
    )
    vals = (row.energy, row.enstrophy, row.supnorm) + row.casimirs
    if not all(np.isfinite(x) for x in vals):
        raise SolverError(f"non-finite diagnostics at t={t:g}")
    return row


def simulate(omega0: ScalarField, cfg: SimConfig, on_checkpoint=None):
    """Advance omega0 to t_end; returns (final field, diagnostics rows).

    Diagnostics are recorded at t=0, every diag_every steps and at the
    final step.  The run aborts with SupnormError (carrying the rows so
    far) as soon as the sup-norm watchdog trips — including on the
    initial condition itself.
    """
    steps = max(1, int(round(cfg.t_end / cfg.dt)))
    rows = []
    omega = omega0

    def watchdog(step, t):
        s = supnorm(omega)
        if s > cfg.supnorm_cap:
            raise SupnormError(
                f"sup-norm {s:.6g} exceeded cap {cfg.supnorm_cap:.6g} "
                f"at step {step}, t={t:.6g}",
                step=step,
                time=t,
                supnorm=s,
                rows=rows,
            )

    watchdog(0, 0.0)
    rows.append(_diag_row(omega, 0.0, cfg))
    for step in range(1, steps + 1):
        omega = step_rk4(omega, cfg.dt, tol=cfg.solver_tol, method=cfg.method)
        t = step * cfg.dt
        watchdog(step, t)
        if step % cfg.diag_every == 0 or step == steps:
            rows.append(_diag_row(omega, t, cfg))
        if on_checkpoint is not None and cfg.checkpoint_every > 0 and (
            step % cfg.checkpoint_every == 0 or step == steps
        ):
            on_checkpoint(step, t, omega)
    return omega, rows


def write_diagnostics_csv(path, rows) -> None:
    """Fixed column order: t, energy, enstrophy, supnorm, casimir_1..k."""
    ncas = len(rows[0].casimirs) if rows else 0
    header = list(DIAG_COLUMNS) + [f"casimir_{i + 1}" for i in range(ncas)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow(
                [repr(r.t), repr(r.energy), repr(r.enstrophy), repr(r.supnorm)]
                + [repr(c) for c in r.casimirs]
            )
