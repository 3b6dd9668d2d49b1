"""Steady states omega = f(K omega) and existence/nonexistence certificates.

The semilinear Dirichlet problem -lap(phi) = f(phi) is attacked by a
damped Picard iteration on omega = f(K omega); for f with Lipschitz
constant below the first Laplacian eigenvalue the undamped map is a
contraction and the residual trace decreases geometrically.  Alongside
the constructive solver sit three certificates: the sufficient
existence condition comparing a sublinearity constant L of f against a
geometry constant M of the domain, and two Fredholm-type nonexistence
obstructions obtained by testing the equation against a Laplacian
eigenfunction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bracket import bracket, weak_residual
from .casimir import PiecewiseMonotone
from .elliptic import SpectralData, apply_laplacian, solve_poisson
from .grid import ScalarField, Grid, gradient, inner2, norm, supnorm


@dataclass
class EquilibriumSpec:
    """Problem data for `fixed_point_solve`.

    f must be continuous (no jumps) and monotone nondecreasing; a flat
    piece is allowed and produces a vorticity plateau in the solution.
    """

    f: PiecewiseMonotone
    relax: float = 0.5
    max_iter: int = 200
    fp_tol: float = 1e-10
    solver_tol: float = 1e-10
    method: str = "dst"

    def __post_init__(self):
        if self.f.jumps:
            raise ValueError("f must be continuous: filled jumps are not allowed here")
        if not self.f.monotone:
            raise ValueError("f must be monotone nondecreasing")
        if not 0.0 < self.relax <= 1.0:
            raise ValueError("relax must lie in (0, 1]")
        if self.max_iter < 1 or self.fp_tol <= 0.0 or self.solver_tol <= 0.0:
            raise ValueError("iteration parameters must be positive")


@dataclass
class EquilibriumResult:
    omega: ScalarField
    phi: ScalarField
    residual_semilinear: float
    stationarity_residual: float
    iterations: int
    converged: bool
    trace: list


def residual_semilinear(phi: ScalarField, f: PiecewiseMonotone) -> float:
    """Discrete L2 norm of -lap(phi) - f(phi).

    apply_laplacian already returns the positive operator -lap_h.
    """
    lap = apply_laplacian(phi)
    r = lap.values - f(phi.values)
    return norm(ScalarField(phi.grid, r))


def fixed_point_solve(spec: EquilibriumSpec, omega0: ScalarField) -> EquilibriumResult:
    """Damped Picard iteration omega <- (1-theta) omega + theta f(K omega).

    The residual ||-lap(phi) - f(phi)|| is tracked each iteration; a step
    that increases it is rejected and retried with theta halved (down to
    a floor, after which the step is taken anyway so that divergent
    problems still produce an informative trace).  Nonconvergence is
    reported, not raised: it is evidence for the nonexistence
    certificates.
    """
    grid = omega0.grid
    f = spec.f
    omega = ScalarField(grid, omega0.values.copy(), zero_trace=omega0.zero_trace)
    trace = []
    converged = False
    iterations = 0
    phi = solve_poisson(omega, tol=spec.solver_tol, method=spec.method)

    def res_of(phi_k):
        scale = max(norm(ScalarField(grid, f(phi_k.values))), 1e-300)
        return residual_semilinear(phi_k, f), scale

    r, scale = res_of(phi)
    trace.append(r)
    while iterations < spec.max_iter:
        if r <= spec.fp_tol * scale:
            converged = True
            break
        theta = spec.relax
        while True:
            cand_vals = (1.0 - theta) * omega.values + theta * f(phi.values)
            cand = ScalarField(grid, cand_vals, zero_trace=False)
            cand_phi = solve_poisson(cand, tol=spec.solver_tol, method=spec.method)
            r_cand, scale_cand = res_of(cand_phi)
            if r_cand < r or theta <= 1e-4:
                break
            theta *= 0.5
        omega, phi, r, scale = cand, cand_phi, r_cand, scale_cand
        iterations += 1
        trace.append(r)
    else:
        # max_iter exhausted without meeting the tolerance
        converged = r <= spec.fp_tol * scale
    stat = weak_residual(bracket(omega, phi), spec.solver_tol)
    return EquilibriumResult(
        omega=omega,
        phi=phi,
        residual_semilinear=r,
        stationarity_residual=stat,
        iterations=iterations,
        converged=converged,
        trace=trace,
    )


# ---------------------------------------------------------------------------
# existence condition: L vs M


@dataclass
class LReport:
    """Sublinearity constant of f, sampled on (0, eta_max].

    symmetric = inf over eta>0 of max(|f(eta)|, |f(-eta)|)/eta, the form
    the existence proof actually uses; literal = inf |f(eta)|/|eta| over
    both signs, reported for comparison (it can be much smaller, e.g. 0
    for affine f with a root).
    """

    symmetric: float
    literal: float
    eta_max: float
    samples: int
    argmin_eta: float


def estimate_L_report(f: PiecewiseMonotone, eta_max: float, samples: int = 1000) -> LReport:
    if eta_max <= 0.0:
        raise ValueError("eta_max must be positive")
    if samples < 100:
        raise ValueError("need at least 100 samples")
    eta = np.linspace(eta_max / samples, eta_max, samples)
    fp = np.abs(f(eta))
    fm = np.abs(f(-eta))
    ratios = np.maximum(fp, fm) / eta
    k = int(np.argmin(ratios))
    literal = float(min((fp / eta).min(), (fm / eta).min()))
    return LReport(
        symmetric=float(ratios[k]),
        literal=literal,
        eta_max=eta_max,
        samples=samples,
        argmin_eta=float(eta[k]),
    )


def estimate_L(f: PiecewiseMonotone, eta_max: float, samples: int = 1000) -> float:
    """Two-sided sublinearity constant inf max(|f(eta)|,|f(-eta)|)/eta."""
    return estimate_L_report(f, eta_max, samples).symmetric


@dataclass
class MEstimate:
    """Geometry constant M = 1/(sqrt|Omega| * c_s * c_p).

    c1 = c2 = 1/sqrt(lambda_1h) are the sharp discrete Poincare
    constants; c_s is a sampled lower bound on the embedding constant
    sup|phi| / (||phi|| + ||grad phi|| + ||lap phi||), so M is an upper
    estimate and carries the ESTIMATE flag.
    """

    M: float
    c1: float
    c2: float
    cs: float
    cp: float
    samples: int
    flag: str = "ESTIMATE"


def estimate_M(grid: Grid, spectral: SpectralData, samples: int = 32) -> MEstimate:
    if spectral.eigenvalues.size < 1:
        raise ValueError("spectral data must hold at least one eigenpair")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    lam1 = float(spectral.eigenvalues[0])
    c1 = 1.0 / np.sqrt(lam1)
    c2 = c1
    cp = c2 * c1 + c2 + 1.0
    x, y = grid.nodes()
    modes = [(p, q) for p in range(1, 5) for q in range(1, 5)]
    rng = np.random.default_rng(2024)
    cs = 0.0
    # prefix sampling: the k-sample estimate extends the (k-1)-sample one,
    # so cs grows (and M shrinks) monotonically with the sample count
    for _ in range(samples):
        coef = rng.standard_normal(len(modes))
        v = np.zeros(grid.shape)
        for c, (p, q) in zip(coef, modes):
            v += c * np.sin(p * np.pi * x) * np.sin(q * np.pi * y)
        phi = ScalarField(grid, v, zero_trace=True)
        g = gradient(phi)
        lap = apply_laplacian(phi)
        denom = norm(phi) + float(np.sqrt(max(inner2(g, g), 0.0))) + norm(lap)
        if denom > 0.0:
            cs = max(cs, supnorm(phi) / denom)
    area = 1.0  # unit square
    return MEstimate(
        M=1.0 / (np.sqrt(area) * cs * cp),
        c1=float(c1),
        c2=float(c2),
        cs=float(cs),
        cp=float(cp),
        samples=samples,
    )


# ---------------------------------------------------------------------------
# certificates


@dataclass
class Certificate:
    """Verdict of an existence or nonexistence test.

    The verdict is a pure function of the stated inequalities; evidence
    holds every number entering them so the check is reproducible.
    """

    kind: str
    verdict: str
    L: float = None
    M: float = None
    obstruction_value: float = None
    evidence: dict = field(default_factory=dict)


def existence_condition(
    f: PiecewiseMonotone,
    grid: Grid,
    spectral: SpectralData,
    eta_max: float = 1e3,
    samples: int = 1000,
) -> Certificate:
    """Sufficient condition L < M for solvability of -lap(phi) = f(phi).

    Never certifies nonexistence: failure of a sufficient condition is
    merely inconclusive.  M rests on a sampled embedding constant, so a
    met verdict reads 'under estimated constants'.
    """
    lrep = estimate_L_report(f, eta_max, samples)
    mrep = estimate_M(grid, spectral)
    met = lrep.symmetric < mrep.M
    return Certificate(
        kind="existence-condition",
        verdict="sufficient-condition-met" if met else "inconclusive",
        L=lrep.symmetric,
        M=mrep.M,
        evidence={
            "L_literal": lrep.literal,
            "eta_max": lrep.eta_max,
            "L_argmin_eta": lrep.argmin_eta,
            "c1": mrep.c1,
            "c2": mrep.c2,
            "cs": mrep.cs,
            "cp": mrep.cp,
            "M_flag": mrep.flag,
        },
    )


def prop1_certificate(theta_lower: float, spectral: SpectralData) -> Certificate:
    """Nonexistence for f(phi) = lambda_1 phi + theta(phi) with theta >= theta_lower > 0.

    Testing against the first eigenfunction forces (theta(phi), phi_1) = 0,
    impossible since phi_1 > 0; the obstruction value is the certified
    lower bound theta_lower * integral(phi_1).
    """
    if theta_lower <= 0.0:
        raise ValueError("theta_lower must be strictly positive")
    phi1 = spectral.eigenfunctions[0]
    h2 = phi1.grid.h ** 2
    integral = h2 * float(np.sum(phi1.values))
    obstruction = theta_lower * integral
    if obstruction <= 0.0:
        raise ValueError("first eigenfunction integral is not positive")
    return Certificate(
        kind="prop1-obstruction",
        verdict="nonexistent",
        obstruction_value=obstruction,
        evidence={
            "eigenindex": 1,
            "theta_lower": theta_lower,
            "integral_phi1": integral,
            "lambda_1": float(spectral.eigenvalues[0]),
        },
    )


def prop2_certificate(j: int, A: float, B: float, spectral: SpectralData) -> Certificate:
    """Nonexistence for f(phi) = lambda_j phi + theta(phi), A <= theta <= B.

    With P+ and P- the positive and negative masses of the j-th
    eigenfunction, the compatibility (theta(phi), phi_j) = 0 requires
    A P+ - B P- < 0 < B P+ - A P-; the certificate reports nonexistent
    exactly when one of those inequalities is impossible.
    """
    if not 0.0 < A < B:
        raise ValueError("need 0 < A < B")
    if j < 2:
        raise ValueError("prop2 requires j >= 2 (j = 1 is the prop1 case)")
    if j > spectral.eigenvalues.size:
        raise ValueError(f"spectral data holds only {spectral.eigenvalues.size} modes")
    phij = spectral.eigenfunctions[j - 1]
    h2 = phij.grid.h ** 2
    v = phij.values
    p_plus = h2 * float(np.sum(v[v > 0.0]))
    p_minus = -h2 * float(np.sum(v[v < 0.0]))
    if p_plus <= 0.0 or p_minus <= 0.0:
        raise ValueError("eigenfunction does not change sign; prop2 does not apply")
    ratio = p_minus / p_plus
    nonexistent = (ratio < 1.0 and A / B >= ratio) or (ratio > 1.0 and B / A <= ratio)
    return Certificate(
        kind="prop2-obstruction",
        verdict="nonexistent" if nonexistent else "inconclusive",
        evidence={
            "eigenindex": j,
            "A": A,
            "B": B,
            "P_plus": p_plus,
            "P_minus": p_minus,
            "ratio": ratio,
            "lambda_j": float(spectral.eigenvalues[j - 1]),
        },
    )


def _plain(value):
    """Render ints/floats/str uniformly (no numpy scalar reprs, no quotes)."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def certificate_text(cert: Certificate) -> str:
    """Plain-text report, one key: value per line."""
    lines = [f"kind: {cert.kind}", f"verdict: {cert.verdict}"]
    if cert.L is not None:
        lines.append(f"L: {_plain(cert.L)}")
    if cert.M is not None:
        lines.append(f"M: {_plain(cert.M)}")
    if cert.obstruction_value is not None:
        lines.append(f"obstruction_value: {_plain(cert.obstruction_value)}")
    for k in sorted(cert.evidence):
        lines.append(f"{k}: {_plain(cert.evidence[k])}")
    return "\n".join(lines) + "\n"


def certificate_csv(cert: Certificate) -> str:
    """Two-line CSV (header + row) with the same content as the text form."""
    cols = ["kind", "verdict", "L", "M", "obstruction_value"] + sorted(cert.evidence)
    vals = [cert.kind, cert.verdict]
    vals += ["" if x is None else _plain(x) for x in (cert.L, cert.M, cert.obstruction_value)]
    vals += [_plain(cert.evidence[k]) for k in sorted(cert.evidence)]
    return ",".join(cols) + "\n" + ",".join(vals) + "\n"


def write_trace_csv(path, result: EquilibriumResult) -> None:
    """Per-iteration residual trace (iter, residual)."""
    with open(path, "w", newline="") as fh:
        fh.write("iter,residual\n")
        for i, r in enumerate(result.trace):
            fh.write(f"{i},{r!r}\n")
