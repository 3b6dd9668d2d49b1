"""Ready-made fields and generator functions used by the CLI and tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .casimir import PiecewiseMonotone, evaluate
from .grid import Grid, ScalarField

# the flat interval of the demo profile, in streamfunction values
PLATEAU_LO = 0.3
PLATEAU_HI = 0.6


def eigenfunction_field(grid: Grid, p: int = 1, q: int = 1, amplitude: float = 1.0) -> ScalarField:
    """amplitude * 2 sin(p pi x) sin(q pi y): unit discrete L2 norm at amplitude 1."""
    x, y = grid.nodes()
    v = amplitude * 2.0 * np.sin(p * np.pi * x) * np.sin(q * np.pi * y)
    return ScalarField(grid, v, zero_trace=True)


def eigenmix(grid: Grid) -> ScalarField:
    """Two-mode initial condition phi_11 + (1/2) phi_21, interior supported."""
    a = eigenfunction_field(grid, 1, 1, 1.0)
    b = eigenfunction_field(grid, 2, 1, 0.5)
    return ScalarField(grid, a.values + b.values, zero_trace=True)


def plateau_profile() -> PiecewiseMonotone:
    """f with a flat interval on [0.3, 0.6]: identity+1 below, identity+0.7 above."""
    return PiecewiseMonotone(
        breakpoints=[0.0, PLATEAU_LO, PLATEAU_HI],
        pieces=[(1.0, 1.0), (0.0, 1.0 + PLATEAU_LO), (1.0, 0.7)],
    )


@dataclass
class PlateauDemo:
    """The constructed singular-Casimir example.

    fill is the natural selection inside the step: a ramp in the
    underlying streamfunction that sweeps [psi_minus, psi_plus]
    continuously across the plateau, so psi stays grid-H1 (a constant
    fill would jump at the plateau edges and lose the h^2 residual
    decay of the membership check).
    """

    omega: ScalarField
    g: PiecewiseMonotone
    f: PiecewiseMonotone
    fill: ScalarField
    plateau_value: float
    psi_minus: float
    psi_plus: float


def plateau_generator() -> PiecewiseMonotone:
    """Step generator matched to the demo plateau.

    Zero on a band around the wall vorticity (so the boundary condition
    passes despite extrapolation noise in the trace) with a filled jump
    of gap 0.5 exactly at the plateau value 1.3.
    """
    return PiecewiseMonotone(
        breakpoints=[0.0, 1.1],
        pieces=[(0.0, 0.0), (1.0, -1.1)],
        jumps=[(1.0 + PLATEAU_LO, 0.5)],
    )


def make_plateau_demo(grid: Grid) -> PlateauDemo:
    """Vorticity with a genuine plateau and a matching step generator.

    phi = sin(pi x) sin(pi y) ranges over (0, 1); omega = f(phi) with f
    flat on [0.3, 0.6] is exactly constant (= 1.3) on the region where
    phi crosses that band, and equals 1 on the wall.
    """
    x, y = grid.nodes()
    phi = np.sin(np.pi * x) * np.sin(np.pi * y)
    f = plateau_profile()
    omega = ScalarField(grid, f(phi))
    value = 1.0 + PLATEAU_LO
    g = plateau_generator()
    step = evaluate(g, value)
    ramp = step.lo + (step.hi - step.lo) * np.clip(
        (phi - PLATEAU_LO) / (PLATEAU_HI - PLATEAU_LO), 0.0, 1.0
    )
    return PlateauDemo(
        omega=omega,
        g=g,
        f=f,
        fill=ScalarField(grid, ramp),
        plateau_value=value,
        psi_minus=step.lo,
        psi_plus=step.hi,
    )


def mismatched_generator() -> PiecewiseMonotone:
    """Same shape as the demo g but with the jump off the plateau value.

    The step at 1.45 falls where omega crosses that level transversally,
    so psi = g(omega) acquires an O(alpha) discontinuity along a curve
    and the weak bracket residual is O(1) instead of O(h^2).
    """
    return PiecewiseMonotone(
        breakpoints=[0.0, 1.1],
        pieces=[(0.0, 0.0), (1.0, -1.1)],
        jumps=[(1.45, 0.5)],
    )


def smooth_saturating_profile(lo: float = -6.0, hi: float = 6.0, num: int = 481) -> PiecewiseMonotone:
    """Chord interpolant of 0.1 tanh(eta) + 0.05: Lipschitz 0.1, strictly increasing."""
    return PiecewiseMonotone.interpolate(lambda e: 0.1 * np.tanh(e) + 0.05, lo, hi, num)


def affine_profile(slope: float, intercept: float) -> PiecewiseMonotone:
    """f(eta) = slope*eta + intercept as a single-piece function."""
    return PiecewiseMonotone(breakpoints=[0.0], pieces=[(slope, intercept)])
