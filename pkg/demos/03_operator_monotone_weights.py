"""
Weights built from operator monotone functions
==============================================

An operator monotone function phi on (-1, 1) gives the weight w = phi'(|x|)
and the admissible function sqrt(phi'(|x|) phi'(|y|)) type mean used by
``geometric_mean_phi``. Everything rests on a square-root mean inequality for
phi, which we check on random pairs before using the weight.
"""

import numpy as np

from blochlip.corpus import corpus_get
from blochlip.operator_monotone import Artanh, check_sqrt_mean_inequality, random_nevanlinna
from blochlip.seminorms import SupremumConfig, bloch_number, geometric_mean_phi, lipschitz_number
from blochlip.weights import constant_one, phi_prime

rng = np.random.default_rng(7)
phis = [Artanh()] + [random_nevanlinna(rng, max_atoms=3) for _ in range(3)]

st = np.sort(rng.uniform(-1, 1, size=(2000, 2)), axis=1)
for phi in phis:
    slack = check_sqrt_mean_inequality(phi, st[:, 0], st[:, 1])
    print(f"{str(phi)[:60]:<60} min slack {np.min(slack):+.2e}")

# %%
# The identity map of the disk with the weight phi'(|x|) and a constant
# coweight has Bloch number 1 / inf phi'. The Lipschitz number with the
# geometric-mean Psi should land on the same value.
f = corpus_get("identity_disk").mapping
cfg = SupremumConfig(interior_samples=1024, pair_samples=2048, refine_rounds=2)
for phi in phis:
    w = phi_prime(phi)
    b = bloch_number(f, w, constant_one(), cfg).value
    lip = lipschitz_number(f, geometric_mean_phi(phi), cfg).value
    print(f"B = {b:.6f}  L = {lip:.6f}  relative gap {abs(b - lip) / b:.1e}")
