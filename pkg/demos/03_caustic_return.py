"""Where does the wave emitted at distance a from the boundary come back?

Ray optics predicts a return to x = a at t_1 = 4 sqrt(a (1 + a)).  At a
finite frequency 1/h only a handful of whispering-gallery modes live between
the boundary and x = a, and the rephasing time is set by the actual spacing
of the Airy zeros rather than its asymptotic law.  This script prints the sup
norm profile around t_1 together with both predictions.
"""
import numpy as np

from cylwave.green import caustic_profile, caustic_times, local_maxima, quantized_return_time

h = 2.0 ** -6
for a in (0.0625, 0.25):
    t1 = caustic_times(a)[0]
    ts = np.linspace(0.6 * t1, 1.4 * t1, 33)
    prof = caustic_profile(h, a, ts)
    peaks = set(local_maxima(prof))
    print(f"\na = {a}: ray return t_1 = {t1:.4f}, quantized return at this h = "
          f"{quantized_return_time(h, a):.4f}")
    for i, (t, v) in enumerate(zip(ts, prof / prof.max())):
        mark = " <- local max" if i in peaks else ""
        print(f"  t = {t:7.4f}  {'#' * int(60 * v):60s} {v:.3f}{mark}")

print("\nquantized return time / t_1 as h -> 0 (a = 0.25):")
for j in (6, 8, 10, 12, 14):
    print(f"  h = 2^-{j}: {quantized_return_time(2.0 ** -j, 0.25) / caustic_times(0.25)[0]:.4f}")
