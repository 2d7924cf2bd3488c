"""
When the supremum sits on the boundary
======================================

For log-type Bloch functions the supremum defining the Bloch number is only
approached as |x| tends to 1. The estimator sweeps shells that creep toward
the boundary, so the reported value climbs shell by shell and is always a
lower bound, up to the first-order bias of one-sided difference quotients
(about 1e-6 relative once the shell is within 1e-8 of the boundary).
"""

from blochlip.corpus import corpus_get
from blochlip.seminorms import SupremumConfig, bloch_number
from blochlip.weights import parse_weight

entry = corpus_get("log_bloch")
w, cw = parse_weight(entry.weight), parse_weight(entry.coweight)
print(f"{entry.mapping.label}: known value {entry.known_bloch}, attained: {entry.attained}")
print(entry.notes)

for deltas in [(1e-1,), (1e-1, 1e-2), (1e-2, 1e-3, 1e-4), (1e-2, 1e-4, 1e-6), (1e-2, 1e-4, 1e-6, 1e-8)]:
    est = bloch_number(entry.mapping, w, cw, SupremumConfig(shell_deltas=deltas, refine_rounds=2))
    trail = ", ".join(f"{s.delta:.0e}: {s.value:.6f}" for s in est.shells)
    print(f"shells [{trail}]  argmax |x| = {sum(c * c for c in est.argmax) ** 0.5:.7f}")
