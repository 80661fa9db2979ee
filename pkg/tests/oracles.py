"""Reference computations kept independent of the code under test.

The sample-complexity oracle uses :mod:`decimal` (base-10 software
arithmetic) while the library uses binary multi-precision floats. The
reachability oracle is a naive fixed point over every action and never
touches the library's successor index or search code.
"""

from decimal import Decimal, localcontext


def sample_complexity_decimal(d, num_actions, num_vars, epsilon, delta, prec=80):
    with localcontext() as ctx:
        ctx.prec = prec
        a = Decimal(num_actions)
        log2_term = (2 * a / Decimal(delta)).ln() / Decimal(2).ln()
        return 2 * Decimal(d).ln() * a / Decimal(epsilon) * (num_vars + log2_term)


def ceil_decimal(x):
    return int(x.to_integral_value(rounding="ROUND_CEILING"))


def reachable_naive(model, init):
    """Fixed point: repeatedly apply every action to every known state."""
    acts = list(model.actions.values())
    known = {tuple(init)}
    changed = True
    while changed:
        changed = False
        for s in list(known):
            for a in acts:
                if all(s[v] == x for v, x in a.pre):
                    t = list(s)
                    for v, x in a.eff:
                        t[v] = x
                    t = tuple(t)
                    if t not in known:
                        known.add(t)
                        changed = True
    return known


def goal_reachable_naive(model, init, goal):
    return any(all(s[v] == x for v, x in goal) for s in reachable_naive(model, init))


def shortest_plan_length_naive(model, init, goal, cap=10_000):
    """Layered frontier expansion; returns None if the goal is unreachable."""
    acts = list(model.actions.values())
    layer = {tuple(init)}
    seen = set(layer)
    depth = 0
    while layer:
        if any(all(s[v] == x for v, x in goal) for s in layer):
            return depth
        nxt = set()
        for s in layer:
            for a in acts:
                if all(s[v] == x for v, x in a.pre):
                    t = list(s)
                    for v, x in a.eff:
                        t[v] = x
                    t = tuple(t)
                    if t not in seen:
                        seen.add(t)
                        nxt.add(t)
        layer = nxt
        depth += 1
        if len(seen) > cap:
            raise RuntimeError("state space too large for the naive oracle")
    return None
