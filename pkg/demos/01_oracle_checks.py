# Cross-checking the free-fermion formulas against brute force
#
# The whole library rests on one reduction: after a Jordan-Wigner map the XY
# chain is a quadratic fermion model, so everything is a function of the
# n x n one-body operator H_n. On a handful of sites we can afford the full
# 2^n dimensional Hamiltonian and compare.

import numpy as np

from plr_chain import DisorderConfig, diagonalize, propagator, sample_potential, build_one_body
from plr_chain.oracle import (
    build_site_operator,
    build_xy_hamiltonian,
    exact_commutator_norm,
    format_suite,
    run_oracle_suite,
)
from plr_chain.quasifree import commutator_lower_witness, commutator_upper

# A small disordered chain.

cfg = DisorderConfig(n=6, lam=2.0, master_seed=7)
V = sample_potential(cfg, 0)
H1 = build_one_body(cfg, V)
spec = diagonalize(H1)
H = build_xy_hamiltonian(cfg, V)
print("one-body size:", H1.n, " many-body size:", H.shape)

# The many-body ground energy is the sum of the negative one-body levels,
# times 2, minus the trace of the field (the constant from sigma^z = 2n - 1).

E0_dense = np.linalg.eigvalsh(H)[0]
w = spec.eigenvalues
E0_free = 2 * w[w < 0].sum() - H1.diag.sum()
print(f"ground energy: dense {E0_dense:.12f}  free {E0_free:.12f}")

# Lieb-Robinson sandwich. The exact commutator norm of tau_t(c_1) with a_k^*
# sits between |U_1k(t)| and the eigenfunction bound.

t, k = 1.3, 4
c1 = build_site_operator("c", 1, cfg.n)
ak = build_site_operator("a*", k, cfg.n)
exact = exact_commutator_norm(H, c1, ak, t)
print(f"|U_1k| = {commutator_lower_witness(spec, k, t):.4f} <= "
      f"exact {exact:.4f} <= 8 D = {8 * commutator_upper(spec, 1, k, t):.4f}")
print("U_11(t) =", np.round(propagator(spec, 1, 1, t), 6))

# The packaged suite runs all of these checks over a grid of sizes, couplings
# and times.

print(format_suite(run_oracle_suite(n_values=(3, 5), lambdas=(0.5, 4.0), times=(0.4, 1.7), seeds=(0,))))
