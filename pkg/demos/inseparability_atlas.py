"""Print the inseparability loci W(k) in rank 3 and check them against lattices.

For each vertex of a small box the predicted membership is compared with the
spectrum of an actual truncated lattice sampled over the vertex.

    python3 demos/inseparability_atlas.py
"""

import numpy as np

from drinfeld_forms.building import (WeylVertex, fiber_sample, spectrum_of_truncation,
                                     wk_member, wk_vertices)
from drinfeld_forms.series import series_ground


def main():
    for k in range(1, 5):
        labels = [v.label() for v in wk_vertices(3, k, 3)]
        print(f"W({k}) vertices with coefficients <= 3: {', '.join(labels)}")

    g = series_ground(2, 1, 3, 1, 60)
    rng = np.random.default_rng(0)
    print("\nvertex   spectrum of degree-4 truncation   in W(1..3)")
    for a in range(3):
        for b in range(3):
            v = WeylVertex((a, b))
            frame = fiber_sample(g, v.point(), 1, rng)[0]
            spec = spectrum_of_truncation(frame, 4)
            computed = [spec.inseparable_at(k) for k in (1, 2, 3)]
            predicted = [wk_member(v.point(), k) for k in (1, 2, 3)]
            mark = "" if computed == predicted else "  MISMATCH"
            print(f"{v.label():>8}   {','.join(spec.to_list()):<32}  "
                  f"{''.join('x' if c else '.' for c in computed)}{mark}")


if __name__ == "__main__":
    main()
