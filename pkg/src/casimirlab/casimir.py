"""Casimir functionals built from piecewise-affine monotone functions.

A candidate Casimir density derivative g is a Lipschitz piecewise-affine
function plus finitely many *filled* upward steps: at a jump location w
the value set is the closed interval [g(w-), g(w-) + alpha].  Its
primitive G is piecewise quadratic with kinks at the jumps, and the
Clarke gradient of G (convex hull of limit slopes) recovers exactly the
filled-step graph of g.  C_G(omega) = integral of G(omega) is the
associated functional; on plateaus of omega, where g may be multivalued,
any selection inside the step produces a kernel element of the vorticity
bracket, which `kernel_field` constructs and `check_kernel_membership`
verifies in the weak residual norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import BoundaryConditionError
from .grid import (
    ScalarField,
    VectorField2,
    boundary_trace,
    gradient,
    inner2,
    supnorm,
    velocity_from_streamfunction,
)
from .bracket import bracket, weak_residual

_CONTINUITY_TOL = 1e-9


class Interval(NamedTuple):
    """Closed value interval [lo, hi]; degenerate (lo == hi) off jumps."""

    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


class Primitive:
    """Piecewise-quadratic primitive G of a piecewise-affine g, G(0) = 0.

    Stores per-segment quadratic coefficients (a, b, c) on the partition
    induced by the generator's knots and jumps, plus the kink gap at each
    node.  The derivative formula (2*a)*xi + b reproduces the generator's
    affine pieces bitwise because a is stored as slope/2.
    """

    def __init__(self, nodes, gaps, slopes, intercepts):
        self.nodes = np.asarray(nodes, dtype=float)
        self.gaps = np.asarray(gaps, dtype=float)
        self._slopes = np.asarray(slopes, dtype=float)
        self._b = np.asarray(intercepts, dtype=float)
        self._a = self._slopes / 2.0
        self._c = self._stitch()

    def _stitch(self) -> np.ndarray:
        m = self.nodes.size
        c = np.zeros(m + 1)
        # continuity of G across each node, then shift so G(0) = 0
        for j in range(m):
            x = self.nodes[j]
            left = self._a[j] * x * x + self._b[j] * x + c[j]
            right_wo = self._a[j + 1] * x * x + self._b[j + 1] * x
            c[j + 1] = left - right_wo
        s0 = int(np.searchsorted(self.nodes, 0.0, side="right"))
        zero_val = self._c0_eval(0.0, s0, c)
        return c - zero_val

    def _c0_eval(self, x, seg, c):
        return self._a[seg] * x * x + self._b[seg] * x + c[seg]

    def __call__(self, xi):
        """G evaluated at xi (scalar or array)."""
        x = np.asarray(xi, dtype=float)
        seg = np.searchsorted(self.nodes, x, side="right")
        val = self._a[seg] * x * x + self._b[seg] * x + self._c[seg]
        return float(val) if np.isscalar(xi) else val

    def gradient_interval(self, xi: float) -> Interval:
        """Clarke gradient of G at xi: hull of the one-sided derivatives."""
        lo, hi = self.gradient_many(np.array([float(xi)]))
        return Interval(float(lo[0]), float(hi[0]))

    def gradient_many(self, x: np.ndarray):
        x = np.asarray(x, dtype=float)
        seg = np.searchsorted(self.nodes, x, side="right")
        if self.nodes.size == 0:
            lo = (2.0 * self._a[seg]) * x + self._b[seg]
            return lo, lo.copy()
        idx = np.searchsorted(self.nodes, x, side="left")
        safe = np.minimum(idx, self.nodes.size - 1)
        at_node = (idx < self.nodes.size) & (self.nodes[safe] == x)
        # one-sided slope from the left segment at nodes, the own segment off them
        seg_lo = np.where(at_node, idx, seg)
        lo = (2.0 * self._a[seg_lo]) * x + self._b[seg_lo]
        gap = np.where(at_node, self.gaps[safe], 0.0)
        hi = lo + gap
        return lo, hi


@dataclass
class PiecewiseMonotone:
    """Piecewise-affine function with filled upward steps.

    ``breakpoints[i]`` starts piece i = (slope, intercept); the first
    piece also extends to -infinity, so breakpoints[0] is an anchor
    rather than a transition.  The affine part must be continuous at
    every interior breakpoint.  ``jumps`` is a list of (location, gap)
    with gap > 0; evaluation at a jump returns the closed interval
    [g(w-), g(w-) + gap].
    """

    breakpoints: list
    pieces: list
    jumps: list = field(default_factory=list)

    def __post_init__(self):
        bp = [float(x) for x in self.breakpoints]
        if not bp:
            raise ValueError("at least one knot is required")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ValueError("knots must be strictly ascending")
        pieces = [(float(s), float(c)) for s, c in self.pieces]
        if len(pieces) != len(bp):
            raise ValueError("one (slope, intercept) piece per knot is required")
        for i in range(1, len(bp)):
            x = bp[i]
            left = pieces[i - 1][0] * x + pieces[i - 1][1]
            right = pieces[i][0] * x + pieces[i][1]
            scale = max(1.0, abs(left), abs(right))
            if abs(left - right) > _CONTINUITY_TOL * scale:
                raise ValueError(
                    f"affine part discontinuous at knot {x!r}: {left!r} vs {right!r}"
                )
        jumps = [(float(w), float(a)) for w, a in self.jumps]
        jumps.sort(key=lambda t: t[0])
        if any(a <= 0.0 for _, a in jumps):
            raise ValueError("jump gaps must be positive (filled upward steps)")
        if any(w1 <= w0 for (w0, _), (w1, _) in zip(jumps, jumps[1:])):
            raise ValueError("jump locations must be distinct")
        self.breakpoints = bp
        self.pieces = pieces
        self.jumps = jumps
        self.monotone = all(s >= 0.0 for s, _ in pieces)
        self.lipschitz = max(abs(s) for s, _ in pieces)
        self._build_segments()
        self.primitive = Primitive(self._nodes, self._gaps, self._slopes, self._icepts)

    def _build_segments(self):
        # merged partition: interior knots plus jump locations, with the
        # accumulated jump mass folded into each segment's intercept
        transitions = sorted(set(self.breakpoints[1:]) | {w for w, _ in self.jumps})
        nodes = np.array(transitions, dtype=float)
        gapmap = dict(self.jumps)
        gaps = np.array([gapmap.get(x, 0.0) for x in transitions])
        bp = np.array(self.breakpoints)
        slopes = np.empty(nodes.size + 1)
        icepts = np.empty(nodes.size + 1)
        acc = 0.0
        for seg in range(nodes.size + 1):
            if seg == 0:
                rep = bp[0]
            else:
                rep = nodes[seg - 1]
                acc += gaps[seg - 1]
            piece = max(0, int(np.searchsorted(bp, rep, side="right")) - 1)
            slopes[seg] = self.pieces[piece][0]
            icepts[seg] = self.pieces[piece][1] + acc
        self._nodes = nodes
        self._gaps = gaps
        self._slopes = slopes
        self._icepts = icepts

    def evaluate_many(self, x: np.ndarray):
        """Vectorized value intervals: arrays (lo, hi)."""
        x = np.asarray(x, dtype=float)
        seg = np.searchsorted(self._nodes, x, side="right")
        idx = np.searchsorted(self._nodes, x, side="left")
        safe = np.minimum(idx, max(self._nodes.size - 1, 0))
        if self._nodes.size:
            at_node = (idx < self._nodes.size) & (self._nodes[safe] == x)
        else:
            at_node = np.zeros(x.shape, dtype=bool)
        seg_lo = np.where(at_node, idx, seg)
        lo = self._slopes[seg_lo] * x + self._icepts[seg_lo]
        gap = np.where(at_node, self._gaps[safe] if self._gaps.size else 0.0, 0.0)
        hi = lo + gap
        return lo, hi

    def __call__(self, xi):
        """Single canonical value: interval midpoint (= the value off jumps)."""
        lo, hi = self.evaluate_many(np.atleast_1d(np.asarray(xi, dtype=float)))
        mid = 0.5 * (lo + hi)
        return float(mid[0]) if np.isscalar(xi) else mid.reshape(np.shape(xi))

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        lines = [
            f"knot {x!r} slope {s!r} intercept {c!r}"
            for x, (s, c) in zip(self.breakpoints, self.pieces)
        ]
        lines += [f"jump {w!r} {a!r}" for w, a in self.jumps]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PiecewiseMonotone":
        knots, pieces, jumps = [], [], []
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tok = line.split()
            try:
                if tok[0] == "knot" and len(tok) == 6 and tok[2] == "slope" and tok[4] == "intercept":
                    knots.append(float(tok[1]))
                    pieces.append((float(tok[3]), float(tok[5])))
                elif tok[0] == "jump" and len(tok) == 3:
                    jumps.append((float(tok[1]), float(tok[2])))
                else:
                    raise ValueError
            except ValueError:
                raise ValueError(f"malformed function spec at line {ln}: {raw!r}") from None
        return cls(knots, pieces, jumps)

    @classmethod
    def interpolate(cls, fn, lo: float, hi: float, num: int = 200) -> "PiecewiseMonotone":
        """Chord interpolant of a callable on [lo, hi], extended affinely."""
        if num < 2:
            raise ValueError("need at least two interpolation knots")
        xs = np.linspace(lo, hi, num)
        ys = np.array([fn(x) for x in xs], dtype=float)
        slopes = np.diff(ys) / np.diff(xs)
        pieces = [(s, y - s * x) for s, x, y in zip(slopes, xs[:-1], ys[:-1])]
        pieces.append(pieces[-1])
        return cls(list(xs), pieces)

    def reversed_function(self) -> "PiecewiseMonotone":
        """The inverse of -g for strictly increasing g.

        Affine pieces reverse to slope -1/s; filled jumps flatten into
        plateaus of the inverse.  Requires every slope positive.
        """
        if any(s <= 0.0 for s, _ in self.pieces):
            raise ValueError("reversal requires strictly increasing affine pieces")
        nodes, gaps = self._nodes, self._gaps
        slopes, icepts = self._slopes, self._icepts

        def rev_piece(seg):
            s, c = slopes[seg], icepts[seg]
            return (-1.0 / s, -c / s)

        knots, pieces = [], []
        m = nodes.size
        # sweep xi downward: eta = -g(xi) ascends
        if m == 0:
            anchor = -icepts[0]
            return PiecewiseMonotone([anchor], [rev_piece(0)])
        top = nodes[m - 1]
        eta_start = -(slopes[m] * top + icepts[m])
        knots.append(eta_start - 1.0)
        pieces.append(rev_piece(m))
        for j in range(m - 1, -1, -1):
            x = nodes[j]
            left_val = slopes[j] * x + icepts[j]
            right_val = slopes[j + 1] * x + icepts[j + 1]
            if gaps[j] > 0.0:
                knots.append(-right_val)
                pieces.append((0.0, x))
            knots.append(-left_val)
            pieces.append(rev_piece(j))
        return PiecewiseMonotone(knots, pieces)


def evaluate(g: PiecewiseMonotone, xi: float) -> Interval:
    """Value set of g at xi: degenerate off jumps, [g(xi-), g(xi-)+alpha] at one."""
    lo, hi = g.evaluate_many(np.array([float(xi)]))
    return Interval(float(lo[0]), float(hi[0]))


def primitive(g: PiecewiseMonotone) -> Primitive:
    """The primitive G with G(0) = 0 (also available as g.primitive)."""
    return g.primitive


def clarke_gradient_of_primitive(G: Primitive, xi: float) -> Interval:
    """Generalized derivative of G at xi as a closed interval."""
    return G.gradient_interval(xi)


def casimir_functional(G: Primitive, omega: ScalarField) -> float:
    """C_G(omega) = h^2 * sum G(omega_ij)."""
    h = omega.grid.h
    return h * h * float(np.sum(G(omega.values)))


def save_function(path, g: PiecewiseMonotone) -> None:
    with open(path, "w") as fh:
        fh.write(g.to_text())


def load_function(path) -> PiecewiseMonotone:
    with open(path) as fh:
        return PiecewiseMonotone.from_text(fh.read())


# ---------------------------------------------------------------------------
# plateau detection and kernel elements


@dataclass
class Plateau:
    value: float
    area: float
    count: int
    mask: np.ndarray


@dataclass
class PlateauReport:
    plateaus: list
    value_tol: float
    min_area: float

    def __iter__(self):
        return iter(self.plateaus)

    def __len__(self):
        return len(self.plateaus)


def detect_plateaus(omega: ScalarField, value_tol: float = None, min_area: float = None) -> PlateauReport:
    """Connected near-constant regions of omega.

    Components are grown over the 4-neighborhood in deterministic scan
    order while (componentwise max - min) <= value_tol; components whose
    area (node count * h^2) reaches min_area are reported with their mean
    value.  min_area must cover at least four cells.
    """
    v = omega.values
    n = omega.grid.n
    h2 = omega.grid.h ** 2
    if value_tol is None:
        spread = float(v.max() - v.min())
        value_tol = 1e-9 * (spread if spread > 0.0 else max(1.0, float(np.abs(v).max())))
    if value_tol <= 0.0:
        raise ValueError("value_tol must be positive")
    if min_area is None:
        min_area = 4.0 * h2
    if min_area < 4.0 * h2 * (1.0 - 1e-12):
        raise ValueError("min_area must cover at least four cells")
    visited = np.zeros((n, n), dtype=bool)
    plateaus = []
    for si in range(n):
        for sj in range(n):
            if visited[si, sj]:
                continue
            cmin = cmax = v[si, sj]
            members = [(si, sj)]
            visited[si, sj] = True
            stack = [(si, sj)]
            while stack:
                i, j = stack.pop()
                for ni, nj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                    if 0 <= ni < n and 0 <= nj < n and not visited[ni, nj]:
                        val = v[ni, nj]
                        lo = val if val < cmin else cmin
                        hi = val if val > cmax else cmax
                        if hi - lo <= value_tol:
                            visited[ni, nj] = True
                            cmin, cmax = lo, hi
                            members.append((ni, nj))
                            stack.append((ni, nj))
            if len(members) * h2 >= min_area:
                mask = np.zeros((n, n), dtype=bool)
                rows, cols = zip(*members)
                mask[rows, cols] = True
                plateaus.append(
                    Plateau(
                        value=float(np.mean(v[mask])),
                        area=len(members) * h2,
                        count=len(members),
                        mask=mask,
                    )
                )
    plateaus.sort(key=lambda p: -p.area)
    return PlateauReport(plateaus=plateaus, value_tol=value_tol, min_area=min_area)


def kernel_field(
    g: PiecewiseMonotone,
    omega: ScalarField,
    plateau_fill="midpoint",
    bc_tol: float = 1e-8,
    value_tol: float = None,
    min_area: float = None,
) -> ScalarField:
    """psi = g(omega) as a zero-trace field, with plateau selections.

    Off plateaus g is single-valued and applied pointwise.  On a detected
    plateau whose value meets a jump of g, psi is filled with the
    midpoint of [psi-, psi+] or with the values of a caller-supplied
    ScalarField (rejected if they leave the step interval).  The chain
    rule argument behind kernel membership needs g(omega) = 0 on the
    wall, which is checked on the extrapolated boundary trace first.
    """
    trace = boundary_trace(omega)
    lo_t, hi_t = g.evaluate_many(trace)
    viol = float(np.max(np.maximum(np.abs(lo_t), np.abs(hi_t)))) if trace.size else 0.0
    if viol > bc_tol:
        raise BoundaryConditionError(
            f"g on the boundary trace reaches |g| = {viol:.3e} > {bc_tol:.1e}; "
            "a kernel element needs g(omega)|_wall = 0",
            residual=viol,
        )
    lo, hi = g.evaluate_many(omega.values)
    psi = 0.5 * (lo + hi)
    report = detect_plateaus(omega, value_tol=value_tol, min_area=min_area)
    jump_locs = np.array([w for w, _ in g.jumps])
    for p in report:
        if not jump_locs.size:
            break
        d = np.abs(jump_locs - p.value)
        j = int(np.argmin(d))
        if d[j] > max(report.value_tol, 1e-12 * max(1.0, abs(p.value))):
            continue
        step = evaluate(g, float(jump_locs[j]))
        if isinstance(plateau_fill, ScalarField):
            fill = plateau_fill.values[p.mask]
            span = max(step.width, 1e-12)
            if np.any(fill < step.lo - 1e-12 * span) or np.any(fill > step.hi + 1e-12 * span):
                raise ValueError(
                    f"plateau fill leaves the step interval [{step.lo!r}, {step.hi!r}]"
                )
            psi[p.mask] = fill
        elif plateau_fill == "midpoint":
            psi[p.mask] = 0.5 * (step.lo + step.hi)
        else:
            raise ValueError(f"unknown plateau fill {plateau_fill!r}")
    return ScalarField(omega.grid, psi, zero_trace=True)


@dataclass
class KernelReport:
    """Outcome of a weak kernel-membership test."""

    weak: float
    scale: float
    tol: float
    threshold: float
    passed: bool


def check_kernel_membership(
    omega: ScalarField,
    psi: ScalarField,
    tol: float = None,
    solver_tol: float = 1e-10,
) -> KernelReport:
    """Weak test of {omega, psi} = 0.

    The residual is measured in the negative norm and compared against
    tol * ||omega||_sup * ||grad psi||, the natural size of the bracket;
    tol defaults to 8 h^2.
    """
    if tol is None:
        tol = 8.0 * omega.grid.h ** 2
    r = bracket(omega, psi)
    weak = weak_residual(r, solver_tol)
    gpsi = gradient(psi)
    scale = supnorm(omega) * float(np.sqrt(max(inner2(gpsi, gpsi), 0.0)))
    threshold = tol * scale
    return KernelReport(weak=weak, scale=scale, tol=tol, threshold=threshold, passed=weak <= threshold)


def casimir_gradient_velocity(g: PiecewiseMonotone, omega: ScalarField, **kernel_kwargs) -> VectorField2:
    """Velocity representer grad(g(omega)) x e_z of the Casimir gradient."""
    psi = kernel_field(g, omega, **kernel_kwargs)
    return velocity_from_streamfunction(psi)
