"""Ideal noiseless amplification of the covariance matrix.

One-sided g^(n) on Bob recovers two-way steering lost to the channel, and
for the impure model state pushes B->A above A->B at low loss.
"""

import numpy as np

from steerdist import (
    apply_lossy,
    classify,
    from_cov,
    max_single_mode_gain,
    nla_single_mode,
    steerability,
    tmss_standard,
)

state = tmss_standard(-4.2, 7.3)
print(f"largest normalizable Bob-side gain at loss 0: "
      f"{max_single_mode_gain(state.cov):.4f}")

out = apply_lossy(state, 0.35)
print("\nat loss 0.35 (one-way region):", classify(out).region)
amplified = from_cov(nla_single_mode(out.cov, 1.2))
print("after gain 1.2:", classify(amplified).region,
      f"(B->A back to {steerability(amplified, 'b_to_a'):.4f})")

print("\ngain sweep at zero loss (impure-state crossover):")
for g in (1.0, 1.1, 1.2, 1.3):
    cov = state.cov if g == 1.0 else nla_single_mode(state.cov, g)
    st = from_cov(cov)
    print(f"  g={g:4.2f}:  A->B {steerability(st, 'a_to_b'):.4f}   "
          f"B->A {steerability(st, 'b_to_a'):.4f}")

# the pure-state eigen-relation: g^(n) |TMSS(lam)> ~ |TMSS(g*lam)>
lam, g = 1.0 / 3.0, 1.5
v_sq = (1 - lam) / (1 + lam)
pure_in = tmss_standard(10 * np.log10(v_sq), -10 * np.log10(v_sq))
got = nla_single_mode(pure_in.cov, g)
print(f"\nTMSS(1/3) under gain 1.5 -> n' = {got[0, 0]:.8f} (exact 5/3), "
      f"c' = {got[0, 2]:.8f} (exact 4/3)")
