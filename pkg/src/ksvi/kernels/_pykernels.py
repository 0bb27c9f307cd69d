"""Pure-Python propagation, search and counting kernels.

Integer-level interface shared with the compiled ``_ckernels`` module:

* a hypergraph is ``n_obs`` plus ``members``, one triple of observable indices
  per context, in context order;
* a seed is ``(ctx, slot, value)``;
* in noncontextual mode a variable is an observable (one value shared by every
  context containing it); in contextual mode a variable is a (context, slot)
  pair with index ``3 * ctx + slot``.

Variable values are -1 (undefined), 0 or 1.  Events are
``(rule, ctx, slot, value)`` tuples with the rule codes below.
"""

from collections import deque

SEED, R1, R2, NT = 0, 1, 2, 3
FIXPOINT, CONTRADICTION = 0, 1
TWO_ONES, THREE_ZEROS, BIVALUED = 1, 2, 3


def _tables(n_obs, members, noncontextual):
    k = len(members)
    if noncontextual:
        var_of = [o for m in members for o in m]
        n_vars = n_obs
    else:
        var_of = list(range(3 * k))
        n_vars = 3 * k
    adj = [[] for _ in range(n_vars)]
    for c in range(k):
        for s in range(3):
            adj[var_of[3 * c + s]].append((c, s))
    return var_of, n_vars, adj


def _run(val, queue, inq, var_of, adj, events):
    """Drain the FIFO worklist; return ``(ctx, kind)`` on contradiction, else None."""
    while queue:
        c = queue.popleft()
        inq[c] = False
        base = 3 * c
        vs = (val[var_of[base]], val[var_of[base + 1]], val[var_of[base + 2]])
        ones = vs.count(1)
        zeros = vs.count(0)
        if ones >= 2:
            return c, TWO_ONES
        if zeros == 3:
            return c, THREE_ZEROS
        if ones == 1 and zeros < 2:
            rule, value = R1, 0
        elif zeros == 2 and ones == 0:
            rule, value = R2, 1
        else:
            continue
        derived = [s for s in range(3) if vs[s] == -1]
        for s in derived:
            val[var_of[base + s]] = value
            if events is not None:
                events.append((rule, c, s, value))
        for s in derived:
            for c2, s2 in adj[var_of[base + s]]:
                if c2 == c:
                    continue
                if events is not None:
                    events.append((NT, c2, s2, value))
                if not inq[c2]:
                    inq[c2] = True
                    queue.append(c2)
    return None


def _apply_seeds(val, seeds, var_of, adj, queue, inq, events):
    for c, s, v in seeds:
        var = var_of[3 * c + s]
        if events is not None:
            events.append((SEED, c, s, v))
        if val[var] == v:
            continue
        if val[var] != -1:
            return c, BIVALUED
        val[var] = v
        if not inq[c]:
            inq[c] = True
            queue.append(c)
        for c2, s2 in adj[var]:
            if c2 == c:
                continue
            if events is not None:
                events.append((NT, c2, s2, v))
            if not inq[c2]:
                inq[c2] = True
                queue.append(c2)
    return None


def propagate(n_obs, members, seeds, noncontextual):
    """Least fixpoint of the closure rules from ``seeds``.

    Returns ``(status, conflict_ctx, conflict_kind, values, events)``.
    """
    var_of, n_vars, adj = _tables(n_obs, members, noncontextual)
    k = len(members)
    val = [-1] * n_vars
    queue = deque()
    inq = [False] * k
    events = []
    bad = _apply_seeds(val, seeds, var_of, adj, queue, inq, events)
    if bad is None:
        for c in range(k):
            if not inq[c]:
                inq[c] = True
                queue.append(c)
        bad = _run(val, queue, inq, var_of, adj, events)
    if bad is not None:
        return CONTRADICTION, bad[0], bad[1], val, events
    return FIXPOINT, -1, 0, val, events


def _prepare(n_obs, members, seeds, noncontextual):
    var_of, n_vars, adj = _tables(n_obs, members, noncontextual)
    k = len(members)
    val = [-1] * n_vars
    queue = deque()
    inq = [False] * k
    if _apply_seeds(val, seeds, var_of, adj, queue, inq, None) is not None:
        return None
    for c in range(k):
        if not inq[c]:
            inq[c] = True
            queue.append(c)
    if _run(val, queue, inq, var_of, adj, None) is not None:
        return None
    return val, var_of, adj, k


def _search(val, start, var_of, adj, k):
    n = len(val)
    var = start
    while var < n and val[var] != -1:
        var += 1
    if var == n:
        return val
    for v in (1, 0):
        w = list(val)
        w[var] = v
        queue = deque()
        inq = [False] * k
        for c, _ in adj[var]:
            if not inq[c]:
                inq[c] = True
                queue.append(c)
        if _run(w, queue, inq, var_of, adj, None) is None:
            found = _search(w, var + 1, var_of, adj, k)
            if found is not None:
                return found
    return None


def search(n_obs, members, seeds, noncontextual):
    """First total admissible labeling in branch order (ascending variable, 1 before 0), or None."""
    prep = _prepare(n_obs, members, seeds, noncontextual)
    if prep is None:
        return None
    val, var_of, adj, k = prep
    return _search(val, 0, var_of, adj, k)


def count(n_obs, members, seeds, noncontextual, cap):
    """Number of total admissible labelings extending ``seeds``, stopping at ``cap``.

    Plain backtracking: variables in ascending order, each extension checked
    only against the contexts of the assigned variable.
    """
    var_of, n_vars, adj = _tables(n_obs, members, noncontextual)
    fixed = [-1] * n_vars
    for c, s, v in seeds:
        var = var_of[3 * c + s]
        if fixed[var] != -1 and fixed[var] != v:
            return 0
        fixed[var] = v
    val = [-1] * n_vars
    total = 0

    def ok(var):
        for c, _ in adj[var]:
            base = 3 * c
            a, b, d = val[var_of[base]], val[var_of[base + 1]], val[var_of[base + 2]]
            ones = (a == 1) + (b == 1) + (d == 1)
            if ones > 1:
                return False
            if ones == 0 and a != -1 and b != -1 and d != -1:
                return False
        return True

    def rec(var):
        nonlocal total
        if var == n_vars:
            total += 1
            return total >= cap
        choices = (fixed[var],) if fixed[var] != -1 else (1, 0)
        for v in choices:
            val[var] = v
            if ok(var) and rec(var + 1):
                return True
        val[var] = -1
        return False

    rec(0)
    return total


def all_seed_sets(k):
    """Seed sets of size at most two over (ctx, slot, value), skipping same-key pairs."""
    singles = [(c, s, v) for c in range(k) for s in range(3) for v in (0, 1)]
    yield ()
    for a in singles:
        yield (a,)
    for i, a in enumerate(singles):
        for b in singles[i + 1:]:
            if a[0] == b[0] and a[1] == b[1]:
                continue
            yield (a, b)


def crosscheck(n_obs, members, noncontextual):
    """Compare ``search`` absence against ``count(cap=1) == 0`` on every small seed set.

    Returns ``(checked, mismatches, first_mismatch_or_None)``.
    """
    checked = mismatches = 0
    first = None
    for seeds in all_seed_sets(len(members)):
        found = search(n_obs, members, seeds, noncontextual) is not None
        counted = count(n_obs, members, seeds, noncontextual, 1) > 0
        checked += 1
        if found != counted:
            mismatches += 1
            if first is None:
                first = seeds
    return checked, mismatches, first
