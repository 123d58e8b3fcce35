"""Sup norm of the frequency-localised Green function over {x <= a} against
the envelope h^-3 min{1, (h/t)^(3/4)}.

By default this runs the two coarsest frequency scales (about a minute);
``--full`` runs h = 2^-4 .. 2^-7 as in the acceptance sweep (several minutes).
The fitted constant is the largest ratio sup / envelope; watch how it moves
with h and where the maximum sits.
"""
import argparse
import math
import time

from cylwave.green import CutoffProfile, dispersive_sweep, fit_envelope

p = argparse.ArgumentParser()
p.add_argument("--full", action="store_true")
p.add_argument("--n-t", type=int, default=16)
args = p.parse_args()

hs = (2 ** -4, 2 ** -5, 2 ** -6, 2 ** -7) if args.full else (2 ** -4, 2 ** -5)
t0 = time.time()
samples = dispersive_sweep(hs, n_t=args.n_t, prof=CutoffProfile())
fit = fit_envelope(samples)
print(f"{len(samples)} samples in {time.time() - t0:.0f} s")
print(f"fitted C = {fit.C:.4g} (geometric mean ratio {fit.C_lsq:.4g})")
am = fit.argmax
print(f"worst sample: h = {am.h:g}, a = {am.a:.4g}, t = {am.t:.4g}, sup = {am.sup_norm:.4g}")
for h, r in sorted(fit.per_h.items(), reverse=True):
    print(f"  h = 2^{round(math.log2(h))}: max ratio {r:.4f}")

# time profile at the largest a for the finest h in the run
h = hs[-1]
rows = [s for s in samples if s.h == h and s.a == 0.25]
print(f"\nh = {h:g}, a = 0.25")
print("      t        sup        envelope    ratio")
for s in rows:
    print(f"  {s.t:8.4f}  {s.sup_norm:10.4g}  {s.bound_disp:10.4g}  {s.ratio:.4f}")
