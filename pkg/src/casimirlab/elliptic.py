"""Dirichlet Laplacian, Green operator, spectrum, and Hodge projection.

The 5-point operator -lap_h with homogeneous Dirichlet trace is symmetric
positive definite in the h^2-weighted inner product and diagonalizes
exactly in the discrete sine basis, so `solve_poisson` applies the Green
operator K = (-lap_h)^{-1} by DST-I with machine-level residual.  A
matrix-free conjugate-gradient path is kept alongside it (iteration cap
20*n) for settings where transforms are not wanted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dstn, idstn

from .errors import SolverError
from .grid import (
    Grid,
    ScalarField,
    VectorField2,
    inner,
    norm,
    padded,
    velocity_from_streamfunction,
)

_MU_CACHE: dict[int, np.ndarray] = {}


def _mode_eigenvalues(grid: Grid) -> np.ndarray:
    """lambda_pq of -lap_h: (4/h^2)(sin^2(p pi h/2) + sin^2(q pi h/2))."""
    lam = _MU_CACHE.get(grid.n)
    if lam is None:
        h = grid.h
        p = np.arange(1, grid.n + 1)
        mu = (4.0 / (h * h)) * np.sin(p * np.pi * h / 2.0) ** 2
        lam = mu[:, None] + mu[None, :]
        _MU_CACHE[grid.n] = lam
    return lam


def apply_laplacian(phi: ScalarField) -> ScalarField:
    """-lap_h phi with the 5-point stencil and zero Dirichlet trace."""
    if not phi.zero_trace:
        raise ValueError("apply_laplacian requires a zero-trace field")
    p = padded(phi)
    h2 = phi.grid.h ** 2
    out = (4.0 * p[1:-1, 1:-1] - p[2:, 1:-1] - p[:-2, 1:-1] - p[1:-1, 2:] - p[1:-1, :-2]) / h2
    return ScalarField(phi.grid, out, zero_trace=False)


def _solve_dst(grid: Grid, rhs: np.ndarray, shift: float = 0.0) -> np.ndarray:
    """(-lap_h - shift)^{-1} rhs via sine-transform diagonalization."""
    den = _mode_eigenvalues(grid) - shift
    small = np.abs(den) < 1e-12 * _mode_eigenvalues(grid)[0, 0]
    if np.any(small):
        den = den + np.where(small, 1e-10 * (1.0 + abs(shift)), 0.0)
    coeff = dstn(rhs, type=1, norm="ortho")
    return idstn(coeff / den, type=1, norm="ortho")


def _apply_neg_lap(grid: Grid, v: np.ndarray) -> np.ndarray:
    h2 = grid.h ** 2
    out = 4.0 * v
    out[1:, :] -= v[:-1, :]
    out[:-1, :] -= v[1:, :]
    out[:, 1:] -= v[:, :-1]
    out[:, :-1] -= v[:, 1:]
    return out / h2


def _cg(apply_op, b: np.ndarray, tol: float, maxiter: int):
    """Plain conjugate gradients on arrays; returns (x, relres, iters)."""
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return np.zeros_like(b), 0.0, 0
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = float(np.dot(r.ravel(), r.ravel()))
    for it in range(1, maxiter + 1):
        ap = apply_op(p)
        alpha = rs / float(np.dot(p.ravel(), ap.ravel()))
        x += alpha * p
        r -= alpha * ap
        rs_new = float(np.dot(r.ravel(), r.ravel()))
        if np.sqrt(rs_new) <= tol * bnorm:
            return x, np.sqrt(rs_new) / bnorm, it
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x, np.sqrt(rs) / bnorm, maxiter


def solve_poisson(omega: ScalarField, tol: float = 1e-10, method: str = "dst") -> ScalarField:
    """Green operator: phi with -lap_h phi = omega and zero trace.

    Args:
        omega: right-hand side (any trace policy; only interior values enter).
        tol: relative residual bound ||lap phi + omega|| <= tol * ||omega||.
        method: "dst" (exact transform solve, default) or "cg" (matrix-free
            conjugate gradients, iteration cap 20*n).

    Raises:
        SolverError: the CG path ran out of iterations; carries the residual.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    grid = omega.grid
    if not np.any(omega.values):
        return ScalarField(grid, np.zeros(grid.shape), zero_trace=True)
    if method == "dst":
        phi = _solve_dst(grid, omega.values)
    elif method == "cg":
        phi, relres, iters = _cg(
            lambda v: _apply_neg_lap(grid, v), omega.values, tol, 20 * grid.n
        )
        if relres > tol:
            raise SolverError(
                f"poisson CG stalled at relative residual {relres:.3e} "
                f"after {iters} iterations (tol {tol:.1e})",
                residual=relres,
                iterations=iters,
            )
    else:
        raise ValueError(f"unknown poisson method {method!r}")
    return ScalarField(grid, phi, zero_trace=True)


@dataclass
class SpectralData:
    """Leading Dirichlet eigenpairs of -lap_h, ascending and L^2-orthonormal."""

    grid: Grid
    eigenvalues: np.ndarray
    eigenfunctions: list


def _deflate(grid: Grid, x: np.ndarray, basis: list) -> np.ndarray:
    h2 = grid.h ** 2
    for q in basis:
        x = x - (h2 * float(np.sum(x * q))) * q
    return x


def eigenpairs(grid: Grid, k: int, tol: float = 1e-10, max_iter: int = 400) -> SpectralData:
    """First k Dirichlet eigenpairs by shifted inverse iteration.

    Plain inverse iterations (Green-operator solves) warm up each mode,
    then Rayleigh-quotient shifts finish it; previously found modes are
    removed by Gram-Schmidt deflation every sweep.  Residual target is
    ||(-lap_h - lambda) phi|| <= tol * lambda.
    """
    if k < 1 or k > 20:
        raise ValueError("k must be between 1 and 20")
    rng = np.random.default_rng(1000 + grid.n)
    h = grid.h
    basis: list[np.ndarray] = []
    values: list[float] = []
    for _ in range(k):
        x = rng.standard_normal(grid.shape)
        x = _deflate(grid, x, basis)
        x /= h * np.linalg.norm(x)
        rho = 0.0
        converged = False
        locked = False
        for it in range(max_iter):
            # Plain (unshifted) sweeps converge to the smallest remaining
            # eigenvalue; only hand over to Rayleigh shifts once the quotient
            # has settled, or a nearby larger mode can capture the iteration
            # when the deflated start is poor in a degenerate eigenspace.
            rho_prev = rho
            shift = rho if locked else 0.0
            y = _solve_dst(grid, x, shift=shift)
            y = _deflate(grid, y, basis)
            ynorm = h * np.linalg.norm(y)
            if ynorm == 0.0:
                raise SolverError("inverse iteration collapsed onto the deflated span")
            x = y / ynorm
            lap = _apply_neg_lap(grid, x)
            rho = h * h * float(np.sum(x * lap))
            res = h * np.linalg.norm(lap - rho * x)
            if res <= tol * rho:
                converged = True
                break
            if not locked and it >= 3 and abs(rho - rho_prev) <= 1e-3 * rho:
                locked = True
        if not converged:
            raise SolverError(
                f"eigen iteration for mode {len(values) + 1} stalled "
                f"(residual {res:.3e}, target {tol * rho:.3e})",
                residual=res,
                iterations=max_iter,
            )
        basis.append(x)
        values.append(rho)
    order = np.argsort(values, kind="stable")
    lams = np.array([values[i] for i in order])
    funcs = []
    for pos, i in enumerate(order):
        v = basis[i]
        # deterministic sign: principal mode nonnegative, others keyed to
        # their largest-magnitude sample
        if pos == 0:
            if float(np.sum(v)) < 0.0:
                v = -v
        else:
            flat = np.argmax(np.abs(v))
            if v.ravel()[flat] < 0.0:
                v = -v
        funcs.append(ScalarField(grid, v, zero_trace=True))
    return SpectralData(grid=grid, eigenvalues=lams, eigenfunctions=funcs)


def _zero_closure_curl(grid: Grid, ux: np.ndarray, uy: np.ndarray) -> np.ndarray:
    """Wide-stencil d_x uy - d_y ux with components taken as zero on the wall.

    This is the exact h^2-inner-product adjoint of the streamfunction map
    phi -> (D_y phi, -D_x phi) with zero-trace closure.
    """
    h2 = 2.0 * grid.h
    px = np.zeros((grid.n + 2, grid.n + 2))
    px[1:-1, 1:-1] = uy
    py = np.zeros((grid.n + 2, grid.n + 2))
    py[1:-1, 1:-1] = ux
    return (px[2:, 1:-1] - px[:-2, 1:-1]) / h2 - (py[1:-1, 2:] - py[1:-1, :-2]) / h2


def project_solenoidal(v: VectorField2, tol: float = 1e-10) -> VectorField2:
    """Orthogonal projection onto discrete streamfunction velocities.

    Solves the normal equations A^T A psi = A^T v by matrix-free CG, with
    A psi = grad(psi) x e_z under the zero-trace closure, then returns
    A psi.  Being a least-squares projection it is idempotent and
    self-adjoint to solver tolerance by construction.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    grid = v.grid

    def a_op(psi_values: np.ndarray) -> VectorField2:
        psi = ScalarField(grid, psi_values, zero_trace=True)
        return velocity_from_streamfunction(psi)

    def normal_op(psi_values: np.ndarray) -> np.ndarray:
        u = a_op(psi_values)
        return _zero_closure_curl(grid, u.ux, u.uy)

    b = _zero_closure_curl(grid, v.ux, v.uy)
    psi, relres, iters = _cg(normal_op, b, tol * 1e-2, 40 * grid.n)
    if relres > tol:
        raise SolverError(
            f"solenoidal projection CG stalled at residual {relres:.3e}",
            residual=relres,
            iterations=iters,
        )
    return a_op(psi)


def greens_energy(omega: ScalarField, tol: float = 1e-10) -> float:
    """inner(K omega, omega); nonnegative since K is positive."""
    return inner(solve_poisson(omega, tol), omega)
