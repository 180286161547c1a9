"""Regenerate ``fossil_standin.csv``.

A synthetic dataset shaped like the SemiPar ``fossil`` data (106 rows,
``age`` in millions of years, ``strontium.ratio``). It is NOT the real
data; it exists so the fossil workflow runs end to end without network
access. Drop the real CSV in with the same column names to reproduce the
original analysis.
"""

from pathlib import Path

import numpy as np

N = 106
AGE_RANGE = (91.3, 122.9)


def trend(age):
    u = (np.asarray(age) - AGE_RANGE[0]) / (AGE_RANGE[1] - AGE_RANGE[0])
    return 0.707375 + 0.000085 * np.sin(2.6 * np.pi * u + 0.4) * np.exp(-1.2 * u) - 0.00006 * u


def main(path=Path(__file__).with_name("fossil_standin.csv")):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([1997, 106])))
    lo, hi = AGE_RANGE
    # stratified ages so every knot interval holds data
    edges = np.linspace(lo, hi, N + 1)
    age = np.sort(edges[:-1] + rng.random(N) * np.diff(edges))
    age[0], age[-1] = lo, hi
    sr = trend(age) + 2.2e-5 * rng.standard_normal(N)
    lines = ["age,strontium.ratio"] + [f"{a:.2f},{s:.6f}" for a, s in zip(age, sr)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
