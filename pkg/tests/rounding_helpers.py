"""Walk a snapshot-enabled look-ahead trace iteration by iteration."""

from thetavfa.exact import optimal_vertices, stability_number


def iterations(trace):
    """Yield ``(vertex, I, committed, discards)`` per Phase II iteration."""
    events = [e for e in trace.events if e.kind != "phase1_discard"]
    k = 0
    for snap in trace.snapshots:
        head = events[k]
        assert head.vertex == snap["vertex"]
        k += 1
        discards = []
        while k < len(events) and events[k].kind == "discard":
            discards.append(events[k].vertex)
            k += 1
        yield snap["vertex"], frozenset(snap["I"]), snap["committed"], discards
    assert k == len(events)


def soundness_violations(g, trace):
    """Discards / rejections made while the run could still reach ``alpha(G)`` that lose optimality."""
    alpha = stability_number(g)
    chosen_w = 0.0
    bad = []
    for i, alive, committed, discards in iterations(trace):
        if abs(chosen_w + stability_number(g, alive) - alpha) > 1e-7:
            break  # off an optimal trajectory: nothing is claimed
        if not committed:
            if i in optimal_vertices(g, alive):
                bad.append(("lookahead_reject", i))
            continue
        cur = set(alive - g.neighbors(i) - {i})
        on_track = abs(chosen_w + g.weights[i] + stability_number(g, cur) - alpha) <= 1e-7
        for j in discards:
            if on_track and j in optimal_vertices(g, cur):
                bad.append(("discard", j))
            cur.discard(j)
        chosen_w += g.weights[i]
    return bad
