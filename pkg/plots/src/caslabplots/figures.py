"""Figure builders for field snapshots, duality scatters and drift curves.

All three routines are read-only consumers of the file contracts in
:mod:`caslabplots.io`.  The only numerics performed here are value
binning (clustering equal samples) and a monotone least-squares fit of
the scatter; no PDE machinery lives in this package.  Each routine
writes a PNG and returns a small frozen report so the extracted numbers
can be asserted without parsing the image; re-running on the same
inputs reproduces the report exactly (image bytes may differ between
matplotlib builds).
"""

from dataclasses import dataclass
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import read_diagnostics, read_field

__all__ = [
    "DriftFigure",
    "DualityColumn",
    "DualityFigure",
    "FieldFigure",
    "plot_drift",
    "plot_duality",
    "plot_field",
]


# ---------------------------------------------------------------------------
# shared helpers

def _value_clusters(sorted_vals: np.ndarray, value_tol: float):
    """Split an ascending value array into clusters separated by > value_tol.

    Returns (starts, stops) index arrays; cluster k is
    sorted_vals[starts[k]:stops[k]].
    """
    breaks = np.nonzero(np.diff(sorted_vals) > value_tol)[0]
    starts = np.concatenate([[0], breaks + 1])
    stops = np.concatenate([breaks + 1, [sorted_vals.size]])
    return starts, stops


def _pava(y: np.ndarray) -> np.ndarray:
    """Least-squares nondecreasing fit of y (pool adjacent violators)."""
    blocks = []  # (mean, count), means nondecreasing
    for v in y:
        m, c = float(v), 1
        while blocks and blocks[-1][0] > m:
            pm, pc = blocks.pop()
            m = (m * c + pm * pc) / (c + pc)
            c += pc
        blocks.append((m, c))
    out = np.empty(y.size)
    pos = 0
    for m, c in blocks:
        out[pos:pos + c] = m
        pos += c
    return out


# ---------------------------------------------------------------------------
# field contour figure

@dataclass(frozen=True)
class FieldFigure:
    """Numbers extracted while rendering a contour figure."""

    n: int
    h: float
    levels: tuple
    closed_level: float | None  # outermost level whose region closes inside
    flat_value: float           # value of the largest equal-value cluster
    flat_count: int
    flat_area: float            # flat_count * h**2


def _outermost_closed_level(vals: np.ndarray, levels: np.ndarray):
    """Outermost contour level whose level region stays off the boundary ring.

    Levels are scanned from the outside inward on the dominant-sign side
    of the field: the first level whose super-(or sub-)level region is
    nonempty and touches no edge node is the outermost closed one.
    """
    upward = abs(float(vals.max())) >= abs(float(vals.min()))
    ordered = np.sort(levels) if upward else np.sort(levels)[::-1]
    for lev in ordered:
        mask = vals >= lev if upward else vals <= lev
        if not mask.any():
            continue
        ring = mask[0, :].any() or mask[-1, :].any() or mask[:, 0].any() or mask[:, -1].any()
        if not ring:
            return float(lev)
    return None


def plot_field(fld_path, out_png, *, num_levels: int = 13,
               value_tol: float | None = None) -> FieldFigure:
    """Contour plot of a .fld snapshot with the outermost closed level bolded.

    Also reports the largest cluster of (near-)equal sample values: for a
    field with a genuine flat region this is the plateau, with area
    ``count * h**2``; for a generic smooth field it is a handful of
    symmetry-related samples of negligible area.
    """
    field = read_field(fld_path)
    vals = field.values
    vmin, vmax = float(vals.min()), float(vals.max())
    spread = vmax - vmin
    if value_tol is None:
        value_tol = 1e-9 * spread

    if spread == 0.0:
        flat_value, flat_count = vmin, int(vals.size)
        levels = np.array([vmin])
    else:
        flat = np.sort(vals.ravel())
        starts, stops = _value_clusters(flat, value_tol)
        widths = stops - starts
        k = int(np.argmax(widths))
        flat_count = int(widths[k])
        flat_value = float(flat[starts[k]:stops[k]].mean())
        levels = np.linspace(vmin, vmax, num_levels + 2)[1:-1]
    flat_area = flat_count * field.h ** 2
    closed_level = _outermost_closed_level(vals, levels)

    x, y = field.node_coords()
    X, Y = np.meshgrid(x, y, indexing="ij")
    fig, ax = plt.subplots(figsize=(6.0, 5.4))
    if spread > 0.0:
        cs = ax.contour(X, Y, vals, levels=levels, linewidths=0.9, cmap="viridis")
        ax.clabel(cs, fontsize=6, fmt="%.3g")
        if closed_level is not None:
            ax.contour(X, Y, vals, levels=[closed_level],
                       colors="crimson", linewidths=2.2)
    else:
        ax.text(0.5, 0.5, f"constant field: {vmin:g}", ha="center", va="center")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(os.path.basename(str(fld_path)))
    fig.tight_layout()
    fig.savefig(out_png, dpi=110)
    plt.close(fig)

    return FieldFigure(
        n=field.n,
        h=field.h,
        levels=tuple(float(v) for v in levels),
        closed_level=closed_level,
        flat_value=flat_value,
        flat_count=flat_count,
        flat_area=float(flat_area),
    )


# ---------------------------------------------------------------------------
# duality scatter figure

@dataclass(frozen=True)
class DualityColumn:
    """A vertical column of the scatter: many samples sharing one omega."""

    omega: float
    count: int
    psi_lo: float
    psi_hi: float

    @property
    def psi_span(self) -> float:
        return self.psi_hi - self.psi_lo


@dataclass(frozen=True)
class DualityFigure:
    """Numbers extracted while rendering the (omega, psi) scatter."""

    n_points: int
    value_tol: float     # omega clustering tolerance
    min_count: int       # samples needed before a cluster counts as a column
    omega_bin: float     # plotting bin width on the omega axis
    psi_bin: float       # plotting bin width on the psi axis
    columns: tuple       # DualityColumn, largest first
    fit_residual: float  # max |psi - monotone fit(omega)|
    fit_direction: str   # "nondecreasing" or "nonincreasing"


def plot_duality(omega_fld, psi_fld, out_png, *, bins: int = 100,
                 value_tol: float | None = None,
                 min_count: int | None = None) -> DualityFigure:
    """Scatter of (omega_ij, psi_ij) with equal-omega columns marked.

    A functional relation psi = g(omega) collapses the scatter onto one
    monotone curve (fit residual ~ 0); a flat band in omega paired with a
    genuinely multivalued psi shows up as a vertical column, which is
    rendered in a distinct colour.  The monotone fit is a least-squares
    pool-adjacent-violators fit, tried in both directions.
    """
    om_field = read_field(omega_fld)
    ps_field = read_field(psi_fld)
    if om_field.n != ps_field.n:
        raise ValueError(
            f"grid mismatch: omega is {om_field.n} x {om_field.n}, "
            f"psi is {ps_field.n} x {ps_field.n}"
        )
    om = om_field.values.ravel()
    ps = ps_field.values.ravel()
    om_spread = float(om.max() - om.min())
    ps_spread = float(ps.max() - ps.min())
    if value_tol is None:
        value_tol = 1e-9 * om_spread
    if min_count is None:
        min_count = max(16, om.size // 100)
    omega_bin = om_spread / bins if om_spread > 0.0 else 1.0
    psi_bin = ps_spread / bins if ps_spread > 0.0 else 1.0

    # columns: clusters of (near-)equal omega with enough samples
    order = np.lexsort((ps, om))
    som, sps = om[order], ps[order]
    starts, stops = _value_clusters(som, value_tol)
    col_mask = np.zeros(som.size, dtype=bool)
    columns = []
    for a, b in zip(starts, stops):
        if b - a >= min_count:
            columns.append(DualityColumn(
                omega=float(som[a:b].mean()),
                count=int(b - a),
                psi_lo=float(sps[a:b].min()),
                psi_hi=float(sps[a:b].max()),
            ))
            col_mask[a:b] = True
    columns.sort(key=lambda c: (-c.count, c.omega))

    # monotone least-squares fit, each direction with its favourable tie order
    fit_up = _pava(sps)
    res_up = float(np.max(np.abs(sps - fit_up)))
    order_dn = np.lexsort((-ps, om))
    sps_dn = ps[order_dn]
    fit_dn = -_pava(-sps_dn)
    res_dn = float(np.max(np.abs(sps_dn - fit_dn)))
    if res_up <= res_dn:
        fit_residual, fit_direction, fit_curve = res_up, "nondecreasing", fit_up
        fit_x = som
    else:
        fit_residual, fit_direction, fit_curve = res_dn, "nonincreasing", fit_dn
        fit_x = om[order_dn]

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.plot(som[~col_mask], sps[~col_mask], ".", ms=2.5, color="steelblue",
            alpha=0.6, label="samples")
    if col_mask.any():
        ax.plot(som[col_mask], sps[col_mask], ".", ms=3.5, color="crimson",
                alpha=0.8, label="flat-band column")
    ax.plot(fit_x, fit_curve, "-", lw=1.0, color="0.3",
            label=f"monotone fit ({fit_direction})")
    ax.set_xlabel("omega")
    ax.set_ylabel("psi")
    ax.set_title(f"{os.path.basename(str(omega_fld))} vs "
                 f"{os.path.basename(str(psi_fld))}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=110)
    plt.close(fig)

    return DualityFigure(
        n_points=int(om.size),
        value_tol=float(value_tol),
        min_count=int(min_count),
        omega_bin=float(omega_bin),
        psi_bin=float(psi_bin),
        columns=tuple(columns),
        fit_residual=fit_residual,
        fit_direction=fit_direction,
    )


# ---------------------------------------------------------------------------
# conservation drift figure

@dataclass(frozen=True)
class DriftFigure:
    """Numbers extracted while rendering the relative-drift curves."""

    columns: tuple    # tracked quantities, file order
    n_rows: int
    max_drift: tuple  # max relative drift per tracked column


def plot_drift(diagnostics_csv, out_png, *, floor: float = 1e-18) -> DriftFigure:
    """Log-scale relative drift |X(t) - X(0)| / |X(0)| of each invariant.

    Tracks energy, enstrophy and every ``casimir_<k>`` column.  Exact
    zeros are displayed at the plot floor (a log axis cannot show zero);
    the returned report keeps the true values.  A single-row table
    yields flat zero-drift lines.
    """
    diag = read_diagnostics(diagnostics_csv)
    for required in ("t", "energy", "enstrophy"):
        if required not in diag.columns:
            raise ValueError(f"missing column: {required}")
    tracked = ["energy", "enstrophy"]
    tracked += [c for c in diag.columns if c.startswith("casimir_")]
    t = diag.column("t")

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    maxima = []
    for name in tracked:
        x = diag.column(name)
        ref = float(x[0])
        drift = np.abs(x - ref) / max(abs(ref), floor)
        maxima.append(float(drift.max()))
        shown = np.maximum(drift, floor)
        if t.size == 1:
            ax.plot([t[0], t[0] + 1.0], [shown[0], shown[0]], lw=1.4, label=name)
        else:
            ax.plot(t, shown, lw=1.4, label=name)
    ax.set_yscale("log")
    ax.axhline(floor, color="0.85", lw=0.8, ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel("relative drift")
    ax.set_title(os.path.basename(str(diagnostics_csv)))
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=110)
    plt.close(fig)

    return DriftFigure(
        columns=tuple(tracked),
        n_rows=int(t.size),
        max_drift=tuple(maxima),
    )
