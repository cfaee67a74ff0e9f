# Strong disorder: eigenfunction correlators decay in the distance
#
# Q(1, k) = sum_E |psi_E(1)| |psi_E(k)| controls the commutator bound
# uniformly in time. For a large field strength it falls off like a power of k,
# steeper the larger lambda is.

import numpy as np

from plr_chain import DisorderConfig, correlator_decay, fit_decay, kappa_consistency
from plr_chain.ensemble import geometric_sites

ks = geometric_sites(8, 256)
print("sites:", ks)

fits = {}
for lam in (3.0, 6.0):
    cfg = DisorderConfig(n=512, lam=lam, master_seed=11)
    stats = correlator_decay(cfg, 60, 1, ks)
    fits[lam] = fit_decay(ks, stats, lam)
    print(f"\nlambda = {lam}")
    for k, s in zip(ks, stats):
        print(f"  k={k:4d}  E[Q] = {s.mean:.3e} +- {s.stderr:.1e}")
    f = fits[lam]
    print(f"  log-log slope {f.slope:.3f} +- {f.slope_stderr:.3f}")

# The slope turns into a crude exponent estimate. It is only a proxy: the
# averaged correlator is majorized by the bound, not equal to it.

rep = kappa_consistency(fits[6.0])
print(f"\nkappa_estimate = {rep.kappa_estimate:.4f} +- {rep.kappa_stderr:.4f}, "
      f"consistent with ceiling {rep.ceiling:.4f}: {rep.consistent}")
print(rep.caveat)
