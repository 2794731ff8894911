"""Walk through the coefficient forms of a rank-2 lattice over F_3.

Samples a frame over a chamber point, computes alpha, E and g, and shows
that log|Delta| depends only on the point and is affine along a segment.

    python3 demos/rank_two_forms.py
"""

from fractions import Fraction

import numpy as np

from drinfeld_forms.building import ApartmentPoint, fiber_sample
from drinfeld_forms.forms import alpha_series, coefficient_forms
from drinfeld_forms.scalars import PolyA, carlitz_coeffs
from drinfeld_forms.series import series_ground


def main():
    q = 3
    g = series_ground(q, 1, 2, 2, 240)
    rng = np.random.default_rng(1)

    print("Carlitz module rho_(T^2+1):")
    for i, c in enumerate(carlitz_coeffs(PolyA.parse("T^2+1", q))):
        print(f"  tau^{i}: {c.to_expr()}")

    x = ApartmentPoint((Fraction(3, 2), 0))
    frame = fiber_sample(g, x, 1, rng)[0]
    prof = alpha_series(frame, kmax=4)
    print(f"\nframe over x = {x.to_list()}, stabilized at truncation degree {prof.d_used}")
    for k in range(1, 5):
        print(f"  log|alpha_{k}| = {prof.alpha[k].logq_abs()}"
              f"   log|E_{q**k - 1}| = {prof.eisenstein(k).logq_abs()}")
    print(f"  log|g_1| = {prof.g[1].logq_abs()}   log|Delta| = {prof.delta.logq_abs()}")

    ell = coefficient_forms(prof, PolyA.parse("T^2", q))
    print("\nphi_(T^2) coefficient sizes:", [str(c.logq_abs()) for c in ell])

    print("\nlog|Delta| over several frames on one fiber:")
    for fr in fiber_sample(g, x, 4, rng):
        print("  ", alpha_series(fr).delta.logq_abs())

    print("\nlog|Delta| along the segment from 0 to k_1:")
    for t in (0, Fraction(1, 2), 1, Fraction(3, 2), 2):
        fr = fiber_sample(g, ApartmentPoint((t, 0)), 1, rng)[0]
        print(f"  x_1 = {t}: {alpha_series(fr).delta.logq_abs()}")


if __name__ == "__main__":
    main()
