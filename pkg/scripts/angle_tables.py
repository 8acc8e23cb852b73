"""Compiled waveplate angles for a list of B values, next to the tabulated ones.

Single-HWP slots agree with the tables modulo the 90 degree HWP period; the
QWP/HWP pair on the last coin is not unique, so those rows list whichever
solution the solver finds.
"""

from __future__ import annotations

import argparse
import csv
import sys

from semisic.optics import realize_schedule
from semisic.povm import b_label, build_semi_sic
from semisic.reference import REALIZATION_ANGLES
from semisic.walk import compile_povm


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--B", nargs="+", default=["1/12", "1/13", "1/14", "1/15"])
    ap.add_argument("--out", default="-", help="CSV path ('-' for stdout)")
    args = ap.parse_args(argv)

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["B", "label", "kind", "angle_deg", "tabulated_deg"])
    for B in args.B:
        label = b_label(B)
        _, chains = realize_schedule(compile_povm(build_semi_sic(B)))
        table = REALIZATION_ANGLES.get(label, {})
        for chain in chains:
            for p in chain.plates:
                writer.writerow([label, p.label, p.kind, f"{p.angle:.4f}", table.get(p.label, "45" if p.label in ("HWP4", "HWP7") else "")])
    if fh is not sys.stdout:
        fh.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
