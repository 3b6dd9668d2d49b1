"""Command-line front end: caslab-plot {field,duality,drift}.

Exit codes: 0 success, 1 unreadable or malformed input file, 2 usage or
contract violation (grid mismatch, missing column, bad arguments).
"""

import argparse
import sys

from . import __version__
from .figures import plot_drift, plot_duality, plot_field
from .io import FieldReadError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="caslab-plot",
        description="Render figures from .fld snapshots and diagnostics CSV files.",
    )
    p.add_argument("--version", action="version", version=f"caslab-plot {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("field", help="contour plot of a .fld snapshot")
    f.add_argument("fld", help="path to the .fld file")
    f.add_argument("--out", required=True, help="output PNG path")
    f.add_argument("--levels", type=int, default=13, help="number of contour levels")

    d = sub.add_parser("duality", help="scatter of (omega, psi) sample pairs")
    d.add_argument("omega", help="path to the omega .fld file")
    d.add_argument("psi", help="path to the psi .fld file")
    d.add_argument("--out", required=True, help="output PNG path")
    d.add_argument("--bins", type=int, default=100, help="plotting bins per axis")

    r = sub.add_parser("drift", help="relative drift of invariants over a run")
    r.add_argument("csv", help="path to the diagnostics CSV file")
    r.add_argument("--out", required=True, help="output PNG path")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "field":
            rep = plot_field(args.fld, args.out, num_levels=args.levels)
            print(
                f"field: n={rep.n} closed_level={rep.closed_level} "
                f"flat_value={rep.flat_value:g} flat_area={rep.flat_area:.6g}"
            )
        elif args.command == "duality":
            rep = plot_duality(args.omega, args.psi, args.out, bins=args.bins)
            print(
                f"duality: points={rep.n_points} columns={len(rep.columns)} "
                f"fit_residual={rep.fit_residual:.3e} ({rep.fit_direction})"
            )
        else:
            rep = plot_drift(args.csv, args.out)
            drifts = " ".join(
                f"{c}={m:.3e}" for c, m in zip(rep.columns, rep.max_drift)
            )
            print(f"drift: rows={rep.n_rows} {drifts}")
    except (FieldReadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
