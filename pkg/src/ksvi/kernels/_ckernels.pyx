# Compiled mirror of _pykernels; same interface, same event order, same results.

from libc.stdlib cimport malloc, free, calloc
from libc.string cimport memcpy, memset

cdef enum:
    SEED = 0
    R1 = 1
    R2 = 2
    NT = 3
    TWO_ONES = 1
    THREE_ZEROS = 2
    BIVALUED = 3


cdef struct Graph:
    int k
    int n_vars
    int* var_of
    int* adj_start
    int* adj_ctx
    int* adj_slot


cdef struct Work:
    int* queue
    char* inq
    signed char* stack
    signed char* fixed
    int* seeds


cdef int build_graph(Graph* g, int n_obs, members, bint nc) except -1:
    cdef int k = len(members)
    cdef int c, s, v, i
    g.k = k
    g.n_vars = n_obs if nc else 3 * k
    g.var_of = <int*> malloc(sizeof(int) * (3 * k + 1))
    g.adj_start = <int*> calloc(g.n_vars + 2, sizeof(int))
    g.adj_ctx = <int*> malloc(sizeof(int) * (3 * k + 1))
    g.adj_slot = <int*> malloc(sizeof(int) * (3 * k + 1))
    if g.var_of == NULL or g.adj_start == NULL or g.adj_ctx == NULL or g.adj_slot == NULL:
        raise MemoryError()
    c = 0
    for m in members:
        for s in range(3):
            v = <int> m[s] if nc else 3 * c + s
            if v < 0 or v >= g.n_vars:
                raise ValueError("observable index out of range")
            g.var_of[3 * c + s] = v
            g.adj_start[v + 1] += 1
        c += 1
    for i in range(g.n_vars):
        g.adj_start[i + 1] += g.adj_start[i]
    cdef int* fill = <int*> calloc(g.n_vars + 1, sizeof(int))
    if fill == NULL:
        raise MemoryError()
    for c in range(k):
        for s in range(3):
            v = g.var_of[3 * c + s]
            i = g.adj_start[v] + fill[v]
            fill[v] += 1
            g.adj_ctx[i] = c
            g.adj_slot[i] = s
    free(fill)
    return 0


cdef void free_graph(Graph* g):
    free(g.var_of)
    free(g.adj_start)
    free(g.adj_ctx)
    free(g.adj_slot)


cdef int alloc_work(Work* w, Graph* g, int max_seeds) except -1:
    w.queue = <int*> malloc(sizeof(int) * (g.k + 1))
    w.inq = <char*> calloc(g.k + 1, 1)
    w.stack = <signed char*> malloc((g.n_vars + 1) * (g.n_vars + 2))
    w.fixed = <signed char*> malloc(g.n_vars + 1)
    w.seeds = <int*> malloc(sizeof(int) * (3 * max_seeds + 3))
    if w.queue == NULL or w.inq == NULL or w.stack == NULL or w.fixed == NULL or w.seeds == NULL:
        raise MemoryError()
    return 0


cdef void free_work(Work* w):
    free(w.queue)
    free(w.inq)
    free(w.stack)
    free(w.fixed)
    free(w.seeds)


cdef int load_seeds(Work* w, Graph* g, seeds) except -1:
    cdef int n = 0
    for c, s, v in seeds:
        if c < 0 or c >= g.k or s < 0 or s > 2 or (v != 0 and v != 1):
            raise ValueError("seed out of range")
        w.seeds[3 * n] = c
        w.seeds[3 * n + 1] = s
        w.seeds[3 * n + 2] = v
        n += 1
    return n


cdef int run(Graph* g, signed char* val, Work* w, int head, int size, list events, bint record,
             int* kind):
    """Drain the worklist; return the contradicting context or -1."""
    cdef int k = g.k
    cdef int c, base, s, ones, zeros, rule, var, j, c2, s2
    cdef signed char value
    cdef signed char vs[3]
    while size > 0:
        c = w.queue[head]
        head += 1
        if head == k:
            head = 0
        size -= 1
        w.inq[c] = 0
        base = 3 * c
        ones = 0
        zeros = 0
        for s in range(3):
            vs[s] = val[g.var_of[base + s]]
            if vs[s] == 1:
                ones += 1
            elif vs[s] == 0:
                zeros += 1
        if ones >= 2:
            kind[0] = TWO_ONES
            return c
        if zeros == 3:
            kind[0] = THREE_ZEROS
            return c
        if ones == 1 and zeros < 2:
            rule = R1
            value = 0
        elif zeros == 2 and ones == 0:
            rule = R2
            value = 1
        else:
            continue
        for s in range(3):
            if vs[s] == -1:
                val[g.var_of[base + s]] = value
                if record:
                    events.append((rule, c, s, value))
        for s in range(3):
            if vs[s] != -1:
                continue
            var = g.var_of[base + s]
            for j in range(g.adj_start[var], g.adj_start[var + 1]):
                c2 = g.adj_ctx[j]
                if c2 == c:
                    continue
                if record:
                    events.append((NT, c2, g.adj_slot[j], value))
                if not w.inq[c2]:
                    w.inq[c2] = 1
                    w.queue[(head + size) % k] = c2
                    size += 1
    return -1


cdef int seed_and_run(Graph* g, signed char* val, Work* w, int nseeds, list events, bint record,
                      int* kind):
    """Apply seeds then propagate; return the contradicting context or -1."""
    cdef int i, c, s, var, j, c2
    cdef signed char v
    cdef int size = 0
    cdef int k = g.k
    memset(val, -1, g.n_vars)
    memset(w.inq, 0, k)
    for i in range(nseeds):
        c = w.seeds[3 * i]
        s = w.seeds[3 * i + 1]
        v = <signed char> w.seeds[3 * i + 2]
        var = g.var_of[3 * c + s]
        if record:
            events.append((SEED, c, s, v))
        if val[var] == v:
            continue
        if val[var] != -1:
            kind[0] = BIVALUED
            return c
        val[var] = v
        if not w.inq[c]:
            w.inq[c] = 1
            w.queue[size] = c
            size += 1
        for j in range(g.adj_start[var], g.adj_start[var + 1]):
            c2 = g.adj_ctx[j]
            if c2 == c:
                continue
            if record:
                events.append((NT, c2, g.adj_slot[j], v))
            if not w.inq[c2]:
                w.inq[c2] = 1
                w.queue[size] = c2
                size += 1
    for c in range(k):
        if not w.inq[c]:
            w.inq[c] = 1
            w.queue[size] = c
            size += 1
    return run(g, val, w, 0, size, events, record, kind)


cdef int search_rec(Graph* g, Work* w, int depth, int start):
    """Return the stack level holding a total labeling, or -1."""
    cdef int n = g.n_vars
    cdef signed char* val = w.stack + depth * n
    cdef signed char* nxt = val + n
    cdef int var = start
    cdef int size, j, c, found, kind
    cdef signed char v
    while var < n and val[var] != -1:
        var += 1
    if var == n:
        return depth
    for v in (1, 0):
        memcpy(nxt, val, n)
        nxt[var] = v
        memset(w.inq, 0, g.k)
        size = 0
        for j in range(g.adj_start[var], g.adj_start[var + 1]):
            c = g.adj_ctx[j]
            if not w.inq[c]:
                w.inq[c] = 1
                w.queue[size] = c
                size += 1
        if run(g, nxt, w, 0, size, None, False, &kind) == -1:
            found = search_rec(g, w, depth + 1, var + 1)
            if found >= 0:
                return found
    return -1


cdef int c_search(Graph* g, Work* w, int nseeds):
    cdef int kind
    if seed_and_run(g, w.stack, w, nseeds, None, False, &kind) != -1:
        return -1
    return search_rec(g, w, 0, 0)


cdef inline bint check_var(Graph* g, signed char* val, int var):
    cdef int j, base, ones
    cdef signed char a, b, d
    for j in range(g.adj_start[var], g.adj_start[var + 1]):
        base = 3 * g.adj_ctx[j]
        a = val[g.var_of[base]]
        b = val[g.var_of[base + 1]]
        d = val[g.var_of[base + 2]]
        ones = (a == 1) + (b == 1) + (d == 1)
        if ones > 1:
            return False
        if ones == 0 and a != -1 and b != -1 and d != -1:
            return False
    return True


cdef long long count_rec(Graph* g, signed char* val, signed char* fixed, int var,
                         long long total, long long cap):
    cdef signed char v
    cdef int lo, hi, t
    if var == g.n_vars:
        return total + 1
    if fixed[var] != -1:
        lo = fixed[var]
        hi = fixed[var]
    else:
        lo = 0
        hi = 1
    for t in range(hi, lo - 1, -1):
        val[var] = <signed char> t
        if check_var(g, val, var):
            total = count_rec(g, val, fixed, var + 1, total, cap)
            if total >= cap:
                val[var] = -1
                return total
    val[var] = -1
    return total


cdef long long c_count(Graph* g, Work* w, int nseeds, long long cap):
    cdef int i, var
    cdef signed char v
    memset(w.fixed, -1, g.n_vars)
    for i in range(nseeds):
        var = g.var_of[3 * w.seeds[3 * i] + w.seeds[3 * i + 1]]
        v = <signed char> w.seeds[3 * i + 2]
        if w.fixed[var] != -1 and w.fixed[var] != v:
            return 0
        w.fixed[var] = v
    memset(w.stack, -1, g.n_vars)
    return count_rec(g, w.stack, w.fixed, 0, 0, cap)


def propagate(int n_obs, members, seeds, bint noncontextual):
    cdef Graph g
    cdef Work w
    cdef int nseeds, bad, kind = 0
    cdef list events = []
    seeds = list(seeds)
    build_graph(&g, n_obs, members, noncontextual)
    try:
        alloc_work(&w, &g, len(seeds))
        try:
            nseeds = load_seeds(&w, &g, seeds)
            bad = seed_and_run(&g, w.stack, &w, nseeds, events, True, &kind)
            values = [w.stack[i] for i in range(g.n_vars)]
        finally:
            free_work(&w)
    finally:
        free_graph(&g)
    if bad != -1:
        return 1, bad, kind, values, events
    return 0, -1, 0, values, events


def search(int n_obs, members, seeds, bint noncontextual):
    cdef Graph g
    cdef Work w
    cdef int nseeds, level
    seeds = list(seeds)
    build_graph(&g, n_obs, members, noncontextual)
    try:
        alloc_work(&w, &g, len(seeds))
        try:
            nseeds = load_seeds(&w, &g, seeds)
            level = c_search(&g, &w, nseeds)
            if level < 0:
                return None
            return [w.stack[level * g.n_vars + i] for i in range(g.n_vars)]
        finally:
            free_work(&w)
    finally:
        free_graph(&g)


def count(int n_obs, members, seeds, bint noncontextual, long long cap):
    cdef Graph g
    cdef Work w
    cdef int nseeds
    seeds = list(seeds)
    build_graph(&g, n_obs, members, noncontextual)
    try:
        alloc_work(&w, &g, len(seeds))
        try:
            nseeds = load_seeds(&w, &g, seeds)
            return c_count(&g, &w, nseeds, cap)
        finally:
            free_work(&w)
    finally:
        free_graph(&g)


cdef inline void put_seed(Work* w, int slot, int code):
    w.seeds[3 * slot] = code // 6
    w.seeds[3 * slot + 1] = (code % 6) // 2
    w.seeds[3 * slot + 2] = code % 2


def crosscheck(int n_obs, members, bint noncontextual):
    """Compare search absence against count(cap=1) == 0 on every seed set of size <= 2."""
    cdef Graph g
    cdef Work w
    cdef int ns, i, j, nseeds
    cdef long long checked = 0, mismatches = 0
    cdef bint found, counted
    first = None
    build_graph(&g, n_obs, members, noncontextual)
    ns = 6 * g.k
    try:
        alloc_work(&w, &g, 2)
        try:
            # -1 encodes the empty set, (i, -1) a single seed, (i, j) with i < j a pair
            for i in range(-1, ns):
                for j in range(i, ns):
                    if i == -1:
                        if j > -1:
                            break
                        nseeds = 0
                    elif j == i:
                        put_seed(&w, 0, i)
                        nseeds = 1
                    else:
                        put_seed(&w, 0, i)
                        put_seed(&w, 1, j)
                        if i // 2 == j // 2:
                            continue
                        nseeds = 2
                    found = c_search(&g, &w, nseeds) >= 0
                    counted = c_count(&g, &w, nseeds, 1) > 0
                    checked += 1
                    if found != counted:
                        mismatches += 1
                        if first is None:
                            first = tuple((w.seeds[3 * t], w.seeds[3 * t + 1], w.seeds[3 * t + 2])
                                          for t in range(nseeds))
        finally:
            free_work(&w)
    finally:
        free_graph(&g)
    return checked, mismatches, first
