"""Cubic B-splines on [0, 5] and their second-derivative penalty.

Run:  python3 demos/basis_and_penalty.py [--out DIR]

Prints the facts that everything else rests on and draws the basis.
"""

import argparse
from pathlib import Path

import numpy as np

from pspline_ci.basis import build_design, build_penalty, eval_basis, make_knots
from pspline_ci.svg import PALETTE, Canvas


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="demo_out")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    knots = make_knots((0.0, 5.0), 24, 4)
    print(f"{len(knots.interior)} interior knots -> {knots.n_basis} cubic basis functions")

    x = np.linspace(0, 5, 1001)
    B = eval_basis(knots, x)
    print(f"partition of unity, worst error: {np.max(np.abs(B.sum(axis=1) - 1)):.2e}")

    D = build_penalty(knots)
    ev = np.linalg.eigvalsh(D)
    print("smallest penalty eigenvalues:", np.array2string(ev[:4], precision=3))
    print("two (near) zeros: constants and straight lines are free of penalty")

    # x^2 has f'' = 2, so its roughness over [0, 5] is 4 * 5 = 20
    beta = np.linalg.lstsq(build_design(knots, x), x**2, rcond=None)[0]
    print(f"roughness of x^2: {beta @ D @ beta:.10f} (exact value 20)")

    c = Canvas((0, 5), (0, 1.05), "Cubic B-spline basis, 24 interior knots", "x", "B_j(x)")
    for j in range(knots.n_basis):
        c.polyline(x, B[:, j], PALETTE[j % len(PALETTE)], 1.0)
    (out / "basis.svg").write_text(c.render())
    print(f"wrote {out / 'basis.svg'}")


if __name__ == "__main__":
    main()
