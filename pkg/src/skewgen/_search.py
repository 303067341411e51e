"""Pure-Python search kernel for degeneration-rule reachability.

States are plain tuples so they hash cheaply::

    (L, LT, named, anon)

``L`` and ``LT`` are ascending tuples of singular-block indices, ``named``
holds one ascending partition of E-block sizes per label that occurs in the
target, and ``anon`` is a sorted tuple of the non-empty partitions carried by
all other labels.  Those labels are interchangeable for reachability, so they
are kept nameless.

In paired mode (skew-symmetric search) ``L`` holds the ``M`` indices, ``LT``
is empty and partitions list ``H``/``K`` sizes; every move then stands for two
mirrored rule applications.

Moves:

* ``(1, x, y)``         L_x + L_y -> L_{x+1} + L_{y-1}        (y >= x + 2)
* ``(2, x, y)``         same on LT (unpaired only)
* ``(3, j, ref, s)``    L_j + E_s -> L_{j+1} + E_{s-1}
* ``(4, j, ref, s)``    same on LT (unpaired only)
* ``(5, ref, a, b)``    E_a + E_b -> E_{a-1} + E_{b+1}       (1 <= a <= b)
* ``(6, p, q, parts)``  L_p + LT_q (paired: M_p + M_q) -> E blocks

``ref`` is ``(0, i)`` for named label ``i``, ``(1, partition)`` for an
anonymous label identified by its current partition and ``(2, i)`` for the
i-th label created by the move.
"""
from __future__ import annotations

__all__ = ["expand", "bfs", "state_rank", "partitions"]

_partition_cache: dict[int, tuple] = {}


def partitions(total):
    """All partitions of ``total`` as descending tuples."""
    got = _partition_cache.get(total)
    if got is not None:
        return got
    out = []

    def rec(rest, cap, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for part in range(min(rest, cap), 0, -1):
            acc.append(part)
            rec(rest - part, part, acc)
            acc.pop()

    rec(total, total, [])
    got = tuple(out)
    _partition_cache[total] = got
    return got


def state_rank(state, paired):
    L, LT, named, anon = state
    r = sum(L) + sum(LT)
    for p in named:
        r += sum(p)
    for p in anon:
        r += sum(p)
    return 2 * r if paired else r


def _replace(tup, old, new):
    """Multiset edit on an ascending tuple: drop values ``old``, add ``new``."""
    lst = list(tup)
    for v in old:
        lst.remove(v)
    lst.extend(new)
    lst.sort()
    return tuple(lst)


def _with_label(state, ref, part):
    """Return ``state`` with the partition of ``ref`` replaced by ``part``."""
    L, LT, named, anon = state
    if ref[0] == 0:
        i = ref[1]
        named = named[:i] + (part,) + named[i + 1:]
        return named, anon
    lst = list(anon)
    lst.remove(ref[1])
    if part:
        lst.append(part)
        lst.sort()
    return named, tuple(lst)


def _label_refs(state):
    L, LT, named, anon = state
    refs = [((0, i), p) for i, p in enumerate(named) if p]
    seen = set()
    for p in anon:
        if p not in seen:
            seen.add(p)
            refs.append(((1, p), p))
    return refs


def _rule6_assignments(parts, n_named, anon, n_new_max):
    """Injective label assignments for the parts of one rule-6 application.

    Returns ``(assignments, blocked)``.  Each assignment is a tuple of
    ``(slot, size)`` with slots ``0..n_named-1`` for named labels,
    ``n_named + i`` for ``anon[i]`` and ``-1 - j`` for the j-th new label.
    Equal parts get nondecreasing slots to skip symmetric duplicates.
    ``blocked`` tells whether some assignment needed more than ``n_new_max``
    new labels.
    """
    n_old = n_named + len(anon)
    blocked = [False]
    out = []
    k = len(parts)

    def rec(i, used, prev_slot, n_new, acc):
        if i == k:
            out.append(tuple(acc))
            return
        size = parts[i]
        lo = prev_slot if i > 0 and parts[i - 1] == size else -1
        for slot in range(max(lo, 0), n_old):
            if slot in used:
                continue
            acc.append((slot, size))
            used.add(slot)
            rec(i + 1, used, slot, n_new, acc)
            used.discard(slot)
            acc.pop()
        if n_new < n_new_max:
            acc.append((-1 - n_new, size))
            rec(i + 1, used, n_old, n_new + 1, acc)
            acc.pop()
        else:
            blocked[0] = True

    rec(0, set(), -1, 0, [])
    return out, blocked[0]


def expand(state, paired, anon_cap, rank_cap):
    """Successors of ``state`` under single (or paired) rule applications.

    Returns ``(children, budget_hit)`` where ``children`` maps each distinct
    child state to one move producing it, and ``budget_hit`` tells whether a
    rule-6 move was dropped because ``anon_cap`` anonymous labels were in use.
    """
    L, LT, named, anon = state
    children = {}
    budget_hit = False

    def emit(move, child):
        if child not in children:
            children[child] = move

    # rules 1 and 2
    sides = ((1, L),) if paired else ((1, L), (2, LT))
    for rule, idx in sides:
        vals = sorted(set(idx))
        for a in range(len(vals)):
            x = vals[a]
            for b in range(a + 1, len(vals)):
                y = vals[b]
                if y - x < 2:
                    continue
                new = _replace(idx, (x, y), (x + 1, y - 1))
                child = (new, LT, named, anon) if rule == 1 else (L, new, named, anon)
                emit((rule, x, y), child)

    refs = _label_refs(state)

    # rules 3 and 4
    sides = ((3, L),) if paired else ((3, L), (4, LT))
    for rule, idx in sides:
        for j in sorted(set(idx)):
            new_idx = _replace(idx, (j,), (j + 1,))
            for ref, part in refs:
                for s in sorted(set(part)):
                    new_part = _replace(part, (s,), (s - 1,) if s > 1 else ())
                    nm, an = _with_label(state, ref, new_part)
                    child = (new_idx, LT, nm, an) if rule == 3 else (L, new_idx, nm, an)
                    emit((rule, j, ref, s), child)

    # rule 5
    for ref, part in refs:
        vals = sorted(set(part))
        for ia, a in enumerate(vals):
            for b in vals[ia:]:
                if a == b and part.count(a) < 2:
                    continue
                new_part = _replace(part, (a, b), ((a - 1,) if a > 1 else ()) + (b + 1,))
                nm, an = _with_label(state, ref, new_part)
                emit((5, ref, a, b), (L, LT, nm, an))

    # rule 6
    if state_rank(state, paired) + (2 if paired else 1) <= rank_cap:
        if paired:
            vals = sorted(set(L))
            pairs = [(p, q) for i, p in enumerate(vals) for q in vals[i:]
                     if p != q or L.count(p) >= 2]
        else:
            pairs = [(p, q) for p in sorted(set(L)) for q in sorted(set(LT))]
        n_named = len(named)
        n_new_max = anon_cap - len(anon)
        for p, q in pairs:
            if paired:
                new_L, new_LT = _replace(L, (p, q), ()), LT
            else:
                new_L, new_LT = _replace(L, (p,), ()), _replace(LT, (q,), ())
            for parts in partitions(p + q + 1):
                assignments, hit = _rule6_assignments(parts, n_named, anon, max(n_new_max, 0))
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
                    emit((6, p, q, tuple(move_parts)), (new_L, new_LT, tuple(nm), tuple(an)))
    return children, budget_hit


def bfs(source, target, paired, anon_cap, rank_cap, max_moves):
    """Breadth-first search from ``source`` to ``target``.

    ``max_moves`` bounds the number of kernel moves (a paired move counts
    once).  Returns ``(moves, explored, budget_hit, depth_hit)`` where
    ``moves`` is the list of moves along a shortest path or ``None``.
    """
    if source == target:
        return [], 1, False, False
    parent = {source: None}
    frontier = [source]
    budget_hit = False
    depth = 0
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
