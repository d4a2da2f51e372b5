"""
Theta certificates and the value function approximation
=======================================================

Solve theta for a path and a 5-cycle, then evaluate V_SDP on a few
subsets and compare it against the clique-LP value function.
"""

import numpy as np

from thetavfa import solve_theta, verify_certificate
from thetavfa.exact import stability_number
from thetavfa.graph import cycle_graph, path_graph
from thetavfa.vfa import EXACT_RANK_TOL, LpVfa, VfaContext, check_vfa_axioms, solve_clique_lp

# P3 is perfect: theta equals alpha = 2 and the middle vertex is off the support.
g = path_graph(3)
cert = solve_theta(g, 1e-8)
print("P3 theta", round(cert.theta, 6), "x", np.round(cert.x, 4))
print("verified:", verify_certificate(g, cert, 1e-8).passed)

v_sdp = VfaContext.from_certificate(cert, backend="pinv")
v_lp = LpVfa(solve_clique_lp(g))
for s in ([], [0], [1], [0, 2], [0, 1, 2]):
    print(f"  I={s!s:10s} alpha={stability_number(g, s):g}  V_SDP={v_sdp(s):.4f}  V_LP={v_lp(s):.4f}")

# C5 is not perfect, so theta (sqrt 5) overshoots alpha = 2.
c5 = cycle_graph(5)
cert5 = solve_theta(c5)
print("\nC5 theta", round(cert5.theta, 6), "vs sqrt(5)", round(np.sqrt(5), 6))

# The CG backend is what the rounding loops use; it is a ridge-regularised solve.
cg = VfaContext.from_certificate(cert5, backend="cg")
pinv = VfaContext.from_certificate(cert5, backend="pinv")
print("V(N): cg", round(cg(range(5)), 6), "pinv", round(pinv(range(5)), 6))

# Axioms hold for any interior dual once the inverse is exact.
exact = VfaContext.from_certificate(cert5, backend="pinv", rank_tol=EXACT_RANK_TOL)
print("axioms on C5:", check_vfa_axioms(c5, exact.value, samples=100).to_dict())
