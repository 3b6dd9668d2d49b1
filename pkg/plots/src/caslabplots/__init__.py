"""Read-only plotting companion for field snapshots and run diagnostics.

Consumes the ``.fld`` binary field format and the diagnostics CSV
contract; produces contour, duality-scatter and conservation-drift
figures plus small numeric reports.  This package performs no PDE
numerics of its own and never mutates its inputs.
"""

from .figures import (
    DriftFigure,
    DualityColumn,
    DualityFigure,
    FieldFigure,
    plot_drift,
    plot_duality,
    plot_field,
)
from .io import Diagnostics, FieldData, FieldReadError, read_diagnostics, read_field

__version__ = "0.1.0"

__all__ = [
    "Diagnostics",
    "DriftFigure",
    "DualityColumn",
    "DualityFigure",
    "FieldData",
    "FieldFigure",
    "FieldReadError",
    "__version__",
    "plot_drift",
    "plot_duality",
    "plot_field",
    "read_diagnostics",
    "read_field",
]
