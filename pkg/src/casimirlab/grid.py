"""Uniform interior-node grid on the unit square and field containers.

Fields live on the nx x ny interior nodes of [0,1]^2 with spacing
h = 1/(n+1); node (i, j) sits at ((i+1)h, (j+1)h).  Boundary values are
not stored.  A field either carries a homogeneous Dirichlet trace
(streamfunction-class, ``zero_trace=True``) or no boundary condition at
all, in which case stencils see a quadratically extrapolated trace.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import FieldFormatError

_FLD_MAGIC = b"CASF"
_FLD_VERSION = 1


@dataclass(frozen=True)
class Grid:
    """Interior-node discretization of the unit square."""

    n: int

    @property
    def h(self) -> float:
        return 1.0 / (self.n + 1)

    @property
    def shape(self):
        return (self.n, self.n)

    def nodes(self):
        """Coordinate arrays (x, y) of the interior nodes, each shape (n, n)."""
        c = (np.arange(1, self.n + 1)) * self.h
        return np.broadcast_to(c[:, None], self.shape), np.broadcast_to(c[None, :], self.shape)


def make_grid(n: int) -> Grid:
    """Build an n x n interior-node grid; n >= 8.

    The lower bound keeps one-sided extrapolation stencils and the
    coarsest convergence sweeps meaningful.
    """
    if n < 8:
        raise ValueError(f"grid too coarse: n = {n} < 8")
    return Grid(int(n))


@dataclass
class ScalarField:
    """Real scalar samples over the interior nodes.

    values[i, j] is the sample at x = (i+1)h, y = (j+1)h (row-major in i).
    ``zero_trace`` selects the boundary policy: exact zeros for
    H^1_0-class fields, quadratic extrapolation otherwise.
    """

    grid: Grid
    values: np.ndarray
    zero_trace: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy(), self.zero_trace)


@dataclass
class VectorField2:
    """Planar vector field; components share the grid and carry no trace."""

    grid: Grid
    ux: np.ndarray
    uy: np.ndarray

    def __post_init__(self):
        self.ux = np.asarray(self.ux, dtype=float)
        self.uy = np.asarray(self.uy, dtype=float)
        if self.ux.shape != self.grid.shape or self.uy.shape != self.grid.shape:
            raise ValueError("component shape does not match grid")


def _check_same_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid.n != g.n:
            raise ValueError("fields live on different grids")
    return g


def _extrapolate_edge(v0, v1, v2):
    # quadratic extrapolation one spacing beyond three equispaced samples
    return 3.0 * v0 - 3.0 * v1 + v2


def padded(f: ScalarField) -> np.ndarray:
    """(n+2) x (n+2) array of f with its boundary trace filled in.

    Zero-trace fields get exact zeros on the frame; otherwise each edge is
    quadratically extrapolated from the three nearest interior samples and
    corners are extrapolated along the filled edges.
    """
    n = f.grid.n
    out = np.zeros((n + 2, n + 2))
    out[1:-1, 1:-1] = f.values
    if f.zero_trace:
        return out
    v = f.values
    out[0, 1:-1] = _extrapolate_edge(v[0, :], v[1, :], v[2, :])
    out[-1, 1:-1] = _extrapolate_edge(v[-1, :], v[-2, :], v[-3, :])
    out[1:-1, 0] = _extrapolate_edge(v[:, 0], v[:, 1], v[:, 2])
    out[1:-1, -1] = _extrapolate_edge(v[:, -1], v[:, -2], v[:, -3])
    for row in (0, -1):
        out[row, 0] = _extrapolate_edge(out[row, 1], out[row, 2], out[row, 3])
        out[row, -1] = _extrapolate_edge(out[row, -2], out[row, -3], out[row, -4])
    return out


def boundary_trace(f: ScalarField) -> np.ndarray:
    """All boundary-frame values of f (zeros or extrapolated), flattened."""
    p = padded(f)
    return np.concatenate([p[0, :], p[-1, :], p[1:-1, 0], p[1:-1, -1]])


def inner(a: ScalarField, b: ScalarField) -> float:
    """Discrete L^2 pairing h^2 * sum(a * b) over interior nodes."""
    g = _check_same_grid(a, b)
    return g.h * g.h * float(np.sum(a.values * b.values))


def norm(a: ScalarField) -> float:
    """Discrete L^2 norm sqrt(inner(a, a))."""
    g = a.grid
    return g.h * float(np.linalg.norm(a.values))


def inner2(u: VectorField2, v: VectorField2) -> float:
    """Discrete L^2 pairing of planar vector fields."""
    g = _check_same_grid(u, v)
    return g.h * g.h * float(np.sum(u.ux * v.ux + u.uy * v.uy))


def norm2(u: VectorField2) -> float:
    return np.sqrt(max(inner2(u, u), 0.0))


def gradient(a: ScalarField) -> VectorField2:
    """Centered O(h^2) gradient; stencils next to the boundary use the
    field's trace (exact zeros or extrapolation)."""
    p = padded(a)
    h2 = 2.0 * a.grid.h
    gx = (p[2:, 1:-1] - p[:-2, 1:-1]) / h2
    gy = (p[1:-1, 2:] - p[1:-1, :-2]) / h2
    return VectorField2(a.grid, gx, gy)


def velocity_from_streamfunction(phi: ScalarField) -> VectorField2:
    """u = grad(phi) x e_z = (d_y phi, -d_x phi).

    Requires a zero-trace streamfunction; the resulting velocity is
    tangential at the wall and discretely divergence-free to O(h^2).
    """
    if not phi.zero_trace:
        raise ValueError("streamfunction must carry a zero boundary trace")
    g = gradient(phi)
    return VectorField2(phi.grid, g.uy, -g.ux)


def _component_field(grid: Grid, values: np.ndarray) -> ScalarField:
    return ScalarField(grid, values, zero_trace=False)


def divergence(v: VectorField2) -> ScalarField:
    """Centered divergence d_x ux + d_y uy (components extrapolated at the wall)."""
    gx = gradient(_component_field(v.grid, v.ux))
    gy = gradient(_component_field(v.grid, v.uy))
    return ScalarField(v.grid, gx.ux + gy.uy)


def curl2d(v: VectorField2) -> ScalarField:
    """Scalar curl d_x uy - d_y ux (components extrapolated at the wall)."""
    gy = gradient(_component_field(v.grid, v.uy))
    gx = gradient(_component_field(v.grid, v.ux))
    return ScalarField(v.grid, gy.ux - gx.uy)


def supnorm(a: ScalarField) -> float:
    return float(np.max(np.abs(a.values)))


# ---------------------------------------------------------------------------
# .fld binary format: magic "CASF", little-endian u32 version=1, u32 nx,
# u32 ny, four f64 extents x0 x1 y0 y1, then nx*ny f64 interior values
# row-major.  Only square unit-extent fields are accepted on read.

def write_field(path, f: ScalarField) -> None:
    n = f.grid.n
    header = struct.pack("<4sIII4d", _FLD_MAGIC, _FLD_VERSION, n, n, 0.0, 1.0, 0.0, 1.0)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_field(path, zero_trace: bool = False) -> ScalarField:
    with open(path, "rb") as fh:
        header = fh.read(struct.calcsize("<4sIII4d"))
        if len(header) < struct.calcsize("<4sIII4d"):
            raise FieldFormatError(f"truncated field file: {path}")
        magic, version, nx, ny, x0, x1, y0, y1 = struct.unpack("<4sIII4d", header)
        if magic != _FLD_MAGIC:
            raise FieldFormatError(f"bad magic {magic!r} in {path}")
        if version != _FLD_VERSION:
            raise FieldFormatError(f"unsupported field version {version} in {path}")
        if nx != ny:
            raise FieldFormatError(f"only square grids are supported, got {nx} x {ny}")
        if (x0, x1, y0, y1) != (0.0, 1.0, 0.0, 1.0):
            raise FieldFormatError("field extent must be the unit square")
        data = np.frombuffer(fh.read(8 * nx * ny), dtype="<f8")
        if data.size != nx * ny:
            raise FieldFormatError(f"truncated field data in {path}")
    grid = make_grid(nx)
    return ScalarField(grid, data.reshape(nx, ny).astype(float), zero_trace=zero_trace)
