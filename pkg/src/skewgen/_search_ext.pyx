# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled search kernel; same states, moves and results as ``_search``."""

from ._search import partitions

__all__ = ["expand", "bfs", "state_rank", "partitions"]


cdef long _tsum(tuple t):
    cdef long s = 0
    cdef object v
    for v in t:
        s += <long>v
    return s


cpdef long state_rank(tuple state, bint paired):
    cdef tuple L = state[0], LT = state[1], named = state[2], anon = state[3]
    cdef long r = _tsum(L) + _tsum(LT)
    cdef tuple p
    for p in named:
        r += _tsum(p)
    for p in anon:
        r += _tsum(p)
    return 2 * r if paired else r


cdef tuple _replace(tuple tup, tuple old, tuple new):
    cdef list lst = list(tup)
    for v in old:
        lst.remove(v)
    lst.extend(new)
    lst.sort()
    return tuple(lst)


cdef tuple _drop_add(tuple tup, long drop, long add):
    # _replace specialised to one removal and an optional (positive) insertion
    cdef list lst = list(tup)
    lst.remove(drop)
    if add > 0:
        lst.append(add)
        lst.sort()
    return tuple(lst)


cdef tuple _uniq(tuple t):
    # ascending distinct values of an ascending tuple
    cdef list out = []
    cdef object v, last = None
    for v in t:
        if last is None or v != last:
            out.append(v)
            last = v
    return tuple(out)


cdef tuple _with_label(tuple state, tuple ref, tuple part):
    cdef tuple named = state[2], anon = state[3]
    cdef int i
    cdef list lst
    if ref[0] == 0:
        i = ref[1]
        return named[:i] + (part,) + named[i + 1:], anon
    lst = list(anon)
    lst.remove(ref[1])
    if part:
        lst.append(part)
        lst.sort()
    return named, tuple(lst)


cdef list _label_refs(tuple state):
    cdef tuple named = state[2], anon = state[3]
    cdef list refs = []
    cdef set seen = set()
    cdef int i
    for i in range(len(named)):
        if named[i]:
            refs.append(((0, i), named[i]))
    for p in anon:
        if p not in seen:
            seen.add(p)
            refs.append(((1, p), p))
    return refs


cdef class _Assign:
    cdef tuple parts
    cdef int k, n_old, n_new_max
    cdef list out, acc
    cdef bint blocked
    cdef char[64] used

    def __init__(self, tuple parts, int n_old, int n_new_max):
        self.parts = parts
        self.k = len(parts)
        self.n_old = n_old
        self.n_new_max = n_new_max
        self.out = []
        self.acc = []
        self.blocked = False
        cdef int i
        for i in range(64):
            self.used[i] = 0

    cdef void rec(self, int i, int prev_slot, int n_new):
        cdef int size, lo, slot
        if i == self.k:
            self.out.append(tuple(self.acc))
            return
        size = self.parts[i]
        lo = prev_slot if i > 0 and self.parts[i - 1] == size else 0
        if lo < 0:
            lo = 0
        for slot in range(lo, self.n_old):
            if self.used[slot]:
                continue
            self.acc.append((slot, size))
            self.used[slot] = 1
            self.rec(i + 1, slot, n_new)
            self.used[slot] = 0
            self.acc.pop()
        if n_new < self.n_new_max:
            self.acc.append((-1 - n_new, size))
            self.rec(i + 1, self.n_old, n_new + 1)
            self.acc.pop()
        else:
            self.blocked = True


def _rule6_assignments(tuple parts, int n_named, tuple anon, int n_new_max):
    cdef int n_old = n_named + len(anon)
    if n_old > 64:
        from ._search import _rule6_assignments as slow
        return slow(parts, n_named, anon, n_new_max)
    cdef _Assign a = _Assign(parts, n_old, n_new_max)
    a.rec(0, -1, 0)
    return a.out, a.blocked


cpdef tuple expand(tuple state, bint paired, long anon_cap, long rank_cap):
    cdef tuple L = state[0], LT = state[1], named = state[2], anon = state[3]
    cdef dict children = {}
    cdef bint budget_hit = False, hit
    cdef int rule, a, b, ia, n_named, n_new_max, slot, size
    cdef long x, y, j, s, av, bv, p, q
    cdef tuple idx, vals, new, child, new_idx, part, new_part, ref, nm_t, an_t
    cdef tuple new_L, new_LT, parts, asg, old
    cdef list refs, pairs, nm, an, fresh, move_parts, assignments
    cdef object sides

    # rules 1 and 2
    sides = ((1, L),) if paired else ((1, L), (2, LT))
    for rule, idx in sides:
        vals = _uniq(idx)
        for a in range(len(vals)):
            x = vals[a]
            for b in range(a + 1, len(vals)):
                y = vals[b]
                if y - x < 2:
                    continue
                new = _replace(idx, (x, y), (x + 1, y - 1))
                child = (new, LT, named, anon) if rule == 1 else (L, new, named, anon)
                if child not in children:
                    children[child] = (rule, x, y)

    refs = _label_refs(state)

    # rules 3 and 4
    sides = ((3, L),) if paired else ((3, L), (4, LT))
    for rule, idx in sides:
        for j in _uniq(idx):
            new_idx = _replace(idx, (j,), (j + 1,))
            for ref, part in refs:
                for s in _uniq(part):
                    new_part = _drop_add(part, s, s - 1)
                    nm_t, an_t = _with_label(state, ref, new_part)
                    child = (new_idx, LT, nm_t, an_t) if rule == 3 else (L, new_idx, nm_t, an_t)
                    if child not in children:
                        children[child] = (rule, j, ref, s)

    # rule 5
    for ref, part in refs:
        vals = _uniq(part)
        for ia in range(len(vals)):
            av = vals[ia]
            for b in range(ia, len(vals)):
                bv = vals[b]
                if av == bv and part.count(av) < 2:
                    continue
                new_part = _replace(part, (av, bv), ((av - 1,) if av > 1 else ()) + (bv + 1,))
                nm_t, an_t = _with_label(state, ref, new_part)
                child = (L, LT, nm_t, an_t)
                if child not in children:
                    children[child] = (5, ref, av, bv)

    # rule 6
    if state_rank(state, paired) + (2 if paired else 1) <= rank_cap:
        if paired:
            vals = _uniq(L)
            pairs = [(vals[a], vals[b]) for a in range(len(vals)) for b in range(a, len(vals))
                     if a != b or L.count(vals[a]) >= 2]
        else:
            pairs = [(pv, qv) for pv in _uniq(L) for qv in _uniq(LT)]
        n_named = len(named)
        n_new_max = anon_cap - len(anon)
        if n_new_max < 0:
            n_new_max = 0
        for p, q in pairs:
            if paired:
                new_L, new_LT = _replace(L, (p, q), ()), LT
            else:
                new_L, new_LT = _replace(L, (p,), ()), _replace(LT, (q,), ())
            for parts in partitions(p + q + 1):
                assignments, hit = _rule6_assignments(parts, n_named, anon, n_new_max)
                budget_hit = budget_hit or hit
                for asg in assignments:
                    nm = list(named)
                    an = list(anon)
                    fresh = []
                    move_parts = []
                    for slot, size in asg:
                        if slot < 0:
                            fresh.append((size,))
                            move_parts.append(((2, -1 - slot), size))
                        elif slot < n_named:
                            nm[slot] = _replace(nm[slot], (), (size,))
                            move_parts.append(((0, slot), size))
                        else:
                            old = anon[slot - n_named]
                            an[slot - n_named] = _replace(old, (), (size,))
                            move_parts.append(((1, old), size))
                    an.extend(fresh)
                    an.sort()
                    child = (new_L, new_LT, tuple(nm), tuple(an))
                    if child not in children:
                        children[child] = (6, p, q, tuple(move_parts))
    return children, budget_hit


def bfs(tuple source, tuple target, bint paired, long anon_cap, long rank_cap, long max_moves):
    if source == target:
        return [], 1, False, False
    cdef dict parent = {source: None}
    cdef list frontier = [source], nxt, path
    cdef bint budget_hit = False, hit
    cdef long depth = 0
    cdef dict children
    cdef tuple st, child, cur
    while frontier:
        if depth >= max_moves:
            return None, len(parent), budget_hit, True
        depth += 1
        nxt = []
        for st in frontier:
            children, hit = expand(st, paired, anon_cap, rank_cap)
            budget_hit = budget_hit or hit
            for child, move in children.items():
                if child in parent:
                    continue
                parent[child] = (st, move)
                if child == target:
                    path = []
                    cur = child
                    while parent[cur] is not None:
                        prev, mv = parent[cur]
                        path.append(mv)
                        cur = prev
                    path.reverse()
                    return path, len(parent), budget_hit, False
                nxt.append(child)
        frontier = nxt
    return None, len(parent), budget_hit, False
