"""Read-only loaders for the field and diagnostics file contracts.

Two on-disk formats are consumed, both produced by the ``caslab``
toolchain (or by anything else honouring the same layout):

* ``.fld`` -- binary field snapshot.  Little-endian header packed as
  ``<4sIII4d``: magic ``b"CASF"``, version ``1``, ``nx``, ``ny``, then
  the domain extents ``x0 x1 y0 y1`` as float64.  The header is
  followed by ``nx * ny`` float64 samples in row-major order.  Samples
  live on the interior nodes of a uniform grid over the unit square,
  so the mesh width is ``h = 1/(nx + 1)`` and node ``(i, j)`` sits at
  ``((i + 1) h, (j + 1) h)``.  Only square unit-extent fields are
  accepted.
* diagnostics ``.csv`` -- header ``t,energy,enstrophy,supnorm`` plus
  zero or more ``casimir_<k>`` columns, one row of floats per sample
  time.

This package never writes or mutates these inputs; loaded arrays are
returned read-only.
"""

from dataclasses import dataclass
import csv
import struct

import numpy as np

_MAGIC = b"CASF"
_VERSION = 1
_HEADER = struct.Struct("<4sIII4d")


class FieldReadError(Exception):
    """Raised when a .fld file violates the format contract."""


@dataclass(frozen=True)
class FieldData:
    """A square interior-node field sample loaded from a .fld file."""

    values: np.ndarray  # (n, n) float64, read-only
    h: float            # mesh width 1/(n + 1)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def node_coords(self):
        """Interior node coordinate axes, x_i = (i + 1) h."""
        axis = (np.arange(self.n) + 1.0) * self.h
        return axis, axis.copy()


def read_field(path) -> FieldData:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise FieldReadError(f"truncated field file: {path}")
        magic, version, nx, ny, x0, x1, y0, y1 = _HEADER.unpack(raw)
        if magic != _MAGIC:
            raise FieldReadError(f"bad magic {magic!r} in {path}")
        if version != _VERSION:
            raise FieldReadError(f"unsupported field version {version} in {path}")
        if nx != ny:
            raise FieldReadError(f"only square grids are supported, got {nx} x {ny}")
        if (x0, x1, y0, y1) != (0.0, 1.0, 0.0, 1.0):
            raise FieldReadError("field extent must be the unit square")
        data = np.frombuffer(fh.read(8 * nx * ny), dtype="<f8")
        if data.size != nx * ny:
            raise FieldReadError(f"truncated field data in {path}")
    values = data.reshape(nx, ny).astype(float)
    values.setflags(write=False)
    return FieldData(values=values, h=1.0 / (nx + 1))


@dataclass(frozen=True)
class Diagnostics:
    """Diagnostics table: column names in file order and a float matrix."""

    columns: tuple
    data: np.ndarray  # (rows, len(columns)) float64, read-only

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise ValueError(f"missing column: {name}")
        return self.data[:, self.columns.index(name)]


def read_diagnostics(path) -> Diagnostics:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"empty diagnostics file: {path}") from None
        rows = []
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"row at line {ln} has {len(row)} fields, expected {len(header)}"
                )
            try:
                rows.append([float(tok) for tok in row])
            except ValueError:
                raise ValueError(
                    f"malformed diagnostics row at line {ln}: {row!r}"
                ) from None
    if not rows:
        raise ValueError(f"no data rows in diagnostics file: {path}")
    data = np.array(rows, dtype=float)
    data.setflags(write=False)
    return Diagnostics(columns=tuple(name.strip() for name in header), data=data)
