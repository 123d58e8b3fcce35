"""Admissible Strichartz triples and a measured (5, 10, 1) ratio across
dyadic frequency scales.

The ratio ||u||_{L^5_t L^10_x} / ||(u0, u1)||_{H^1 x L^2} is evaluated on
random data localised at frequency 2^j.  A uniform bound means the ratio
stays within a fixed factor as j grows.
"""
from cylwave.propagator import admissible, strichartz_sweep

for q, r in ((5, 10), (5, 5), (4, 12), (3, 4)):
    t = admissible(q, r)
    print(f"(q, r) = ({q}, {r}): " + ("not admissible" if t is None else f"beta = {t.beta}"))

rows = strichartz_sweep(js=range(3, 8), q=5, r=10)
print("\n j     h          ratio")
for j, h, q, r, beta, ratio, T, n_t in rows:
    print(f"{j:2d}  {h:.5f}  {ratio:.5f}")
ratios = [row[5] for row in rows]
print(f"spread max / min = {max(ratios) / min(ratios):.3f}")
