"""
Rounding a theta certificate into a stable set
==============================================

Look-ahead rounding on a random chordal graph (with its trace), greedy
rounding on a DIMACS complement, and the randomized baseline next to it.
"""

from thetavfa import load_bundled, solve_theta
from thetavfa.chordal import exact_mwis_chordal
from thetavfa.generators import generate_chordal
from thetavfa.rounding import (
    check_weight_equality_condition,
    round_benson_ye,
    round_greedy,
    round_lookahead_counipolar,
)
from thetavfa.vfa import VfaContext

g = generate_chordal(25, 0.4, seed=3)
cert = solve_theta(g, 1e-8)  # look-ahead wants a tight certificate
ctx = VfaContext.from_certificate(cert)
s, trace = round_lookahead_counipolar(g, cert, ctx, return_trace=True, snapshots=True)
print(f"chordal n=25: look-ahead weight {s.weight:g}, oracle {exact_mwis_chordal(g).weight:g}, "
      f"theta {cert.theta:.4f}")

kinds = {}
for e in trace.events:
    kinds[e.kind] = kinds.get(e.kind, 0) + 1
print("  events:", kinds, " VFA calls:", trace.eval_count, f" (c = {trace.budget_constant():.3f})")

rep = check_weight_equality_condition(trace, VfaContext.from_certificate(cert, backend="pinv"))
print("  weight equality along the run:", "holds" if rep.ok else f"violated at {rep.violations}")

# hamming6-2 is a clique benchmark, so stable sets live in its complement.
h = load_bundled("hamming6-2", complement=True)
hc = solve_theta(h)
greedy, gtrace = round_greedy(h, VfaContext.from_certificate(hc))
by = round_benson_ye(h, hc, seed=0)
print(f"\nhamming6-2: theta {hc.theta:.3f}, greedy {greedy.weight:g} "
      f"({gtrace.eval_count} VFA calls), BY best {by.best.weight:g}, BY average {by.average:.2f}")
