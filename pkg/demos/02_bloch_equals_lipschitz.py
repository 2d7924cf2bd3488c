"""
Bloch and Lipschitz numbers across the corpus
=============================================

For a mapping f, the Bloch number is the supremum of cw(f(x)) / w(x) times the
upper derivative, and the Lipschitz number is the supremum of the difference
quotients weighted by an admissible function Psi. When Psi is admissible the
two numbers agree. Both are estimated here from below by sampling, so the
certificate compares two lower bounds.
"""

from blochlip.corpus import corpus_get, corpus_list
from blochlip.seminorms import SupremumConfig, certify_equality, parse_psi
from blochlip.weights import parse_weight

cfg = SupremumConfig(interior_samples=1024, pair_samples=2048, refine_rounds=2)

print(f"{'map':<16}{'known':>10}{'Bloch':>12}{'Lipschitz':>12}{'gap':>10}  verdict")
for label in corpus_list():
    entry = corpus_get(label)
    w, cw = parse_weight(entry.weight), parse_weight(entry.coweight)
    psi = parse_psi(entry.psi, w, cw)
    # Admissibility has its own test suite, so skip the extra sampling here.
    cert = certify_equality(entry.mapping, w, cw, psi, cfg, tolerance=0.02, waive_admissibility=True)
    known = "-" if entry.known_bloch is None else f"{entry.known_bloch:.4f}"
    print(
        f"{label:<16}{known:>10}{cert.bloch_estimate:>12.6f}{cert.lipschitz_estimate:>12.6f}"
        f"{cert.relative_gap:>10.1e}  {'PASS' if cert.passed else 'FAIL'}"
    )

# %%
# A deliberately inflated Psi breaks the equality. Doubling an admissible
# function doubles every difference quotient, and the diagonal check notices.
entry = corpus_get("identity_disk")
w, cw = parse_weight(entry.weight), parse_weight(entry.coweight)
from blochlip.seminorms import hyperbolic_psi, scaled_psi  # noqa: E402

cert = certify_equality(entry.mapping, w, cw, scaled_psi(hyperbolic_psi(), 2.0), cfg)
print(f"\ndoubled psi: B = {cert.bloch_estimate:.4f}, L = {cert.lipschitz_estimate:.4f}, passed = {cert.passed}")
for failure in cert.failures:
    print(f"  {failure['stage']}: {failure['error']}")
