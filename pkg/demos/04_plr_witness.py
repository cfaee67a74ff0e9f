# Power-law light cones
#
# A power-law Lieb-Robinson bound ||[tau_t(c_1), a_k^*]|| <= C (t^a / k)^b
# says the light cone spreads no faster than t^a. The witness
# W(a, b) = max over the grid of (k / t^a)^b |U_1k(t)| is a lower bound on C;
# if it keeps growing as the time grid extends, no such bound holds on the
# simulated range.

import math

import numpy as np

from plr_chain import DisorderConfig
from plr_chain.ensemble import collect
from plr_chain.experiments import plr_cut_values

params = {"a": 0.5, "b": 2.0, "t_min": 1.0, "t_ratio": math.sqrt(2.0), "t_cuts": [12.5, 25.0, 50.0], "k_max": 256}

for lam in (1.0, 8.0):
    cfg = DisorderConfig(n=512, lam=lam, master_seed=5)
    W = collect(cfg, 8, lambda r: plr_cut_values(r.spectrum, params))
    med = np.median(W, axis=0)
    print(f"lambda = {lam}")
    for cut, w in zip(params["t_cuts"], med):
        print(f"  t <= {cut:5.1f}   median W = {w:.4g}   growth {w / med[0]:.3f}")

# Weak disorder: W keeps growing, so the light cone is wider than t^a.
# Strong disorder: W saturates at small times, consistent with localization.
