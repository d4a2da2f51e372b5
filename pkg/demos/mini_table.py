"""
A small optimal% table
======================

Five seeded instances per cell, greedy rounding, exact oracles.  The
full-size table comes from ``thetavfa bench --sizes 20,50,100``.
"""

from thetavfa.bench import RunConfig, rows_to_csv, run_bench

rows, records = run_bench(["chordal", "co-chordal", "generalized-split", "gnp"], [20], 5,
                          RunConfig(method="all", seed=1))
print(rows_to_csv(rows))

# Random G(n, 1/2) graphs are imperfect: theta may exceed alpha, V_SDP is
# no longer tight, and look-ahead can reject its way down to a tiny set.
# Greedy rounding makes no tightness assumption.
for r in records:
    if r.family == "erdos-renyi":
        print(f"{r.instance}: alpha {r.alpha:g}  theta {r.theta:.3f}  greedy {r.weights['greedy']:g}  "
              f"look-ahead {r.weights['lookahead']:g}  BY avg {r.by_avg:.2f}")
