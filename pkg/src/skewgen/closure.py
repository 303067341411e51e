"""Orbit-closure dominance through the six KCF degeneration rules.

``dominates(target, source)`` searches breadth-first for a sequence of rule
applications turning ``source`` into ``target``; a hit is returned as a
replayable :class:`ClosureCertificate`.  The search itself runs in a kernel on
label-free tuple states (see :mod:`skewgen._search`); this module lifts kernel
paths back to concrete :class:`RuleApplication` steps and replays them through
:func:`apply_rule`, so every returned certificate has been checked.
"""
from __future__ import annotations

import functools
import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .canon import (INF, Eigenvalue, eig, Kcf, KcfBlock, SkewBlock, SkewKcf,
                    kcf_to_skew, skew_to_kcf)
from ._kernels import KERNEL, bfs as _kernel_bfs, partitions

__all__ = [
    "RuleApplication", "ClosureCertificate", "NotDominated", "SearchStats",
    "RuleNotApplicable", "UnpairedCertificate", "apply_rule", "dominates",
    "skew_dominates", "enumerate_skew_kcfs", "strata_dag",
]


class RuleNotApplicable(ValueError):
    def __init__(self, reason: str):
        super().__init__(f"rule not applicable: {reason}")
        self.reason = reason


class UnpairedCertificate(RuntimeError):
    pass


def _E(mu, k):
    return KcfBlock("E", k, eig(mu))


def _L(k):
    return KcfBlock("L", k)


def _LT(k):
    return KcfBlock("LT", k)


@dataclass(frozen=True)
class RuleApplication:
    """One rewrite ``consumed ~> produced`` following rule ``rule_id``.

    For rule 6, ``partition`` and ``labels`` record the sizes and the
    pairwise-distinct eigenvalues of the produced blocks.
    """

    rule_id: int
    consumed: tuple
    produced: tuple
    partition: tuple = ()
    labels: tuple = ()

    @classmethod
    def rule1(cls, j, k):
        return cls(1, (_L(j - 1), _L(k + 1)), (_L(j), _L(k)))

    @classmethod
    def rule2(cls, j, k):
        return cls(2, (_LT(j - 1), _LT(k + 1)), (_LT(j), _LT(k)))

    @classmethod
    def rule3(cls, j, k, mu):
        return cls(3, (_L(j), _E(mu, k + 1)), (_L(j + 1),) + ((_E(mu, k),) if k else ()))

    @classmethod
    def rule4(cls, j, k, mu):
        return cls(4, (_LT(j), _E(mu, k + 1)), (_LT(j + 1),) + ((_E(mu, k),) if k else ()))

    @classmethod
    def rule5(cls, j, k, mu):
        return cls(5, (_E(mu, j), _E(mu, k)), ((_E(mu, j - 1),) if j > 1 else ()) + (_E(mu, k + 1),))

    @classmethod
    def rule6(cls, p, q, partition, labels):
        partition, labels = tuple(partition), tuple(labels)
        produced = tuple(_E(mu, k) for k, mu in zip(partition, labels))
        return cls(6, (_L(p), _LT(q)), produced, partition, labels)

    def check(self):
        """Raise :class:`RuleNotApplicable` unless the step matches its rule template."""
        expected = self._template()
        if Counter(expected.consumed) != Counter(self.consumed) or \
                Counter(expected.produced) != Counter(self.produced):
            raise RuleNotApplicable(f"rule {self.rule_id}: blocks do not match the template")

    def _template(self) -> "RuleApplication":
        r = self.rule_id
        c = self.consumed
        if r not in range(1, 7) or len(c) != 2:
            raise RuleNotApplicable(f"rule {r}: malformed application")
        if r in (1, 2):
            kind = "L" if r == 1 else "LT"
            if any(b.kind != kind for b in c):
                raise RuleNotApplicable(f"rule {r} consumes two {kind} blocks")
            a, b = sorted(x.k for x in c)
            if b - a < 2:
                raise RuleNotApplicable(f"rule {r} needs 1 <= j <= k (indices {a}, {b})")
            return (self.rule1 if r == 1 else self.rule2)(a + 1, b - 1)
        if r in (3, 4):
            kind = "L" if r == 3 else "LT"
            sing = [b for b in c if b.kind == kind]
            reg = [b for b in c if b.kind == "E"]
            if len(sing) != 1 or len(reg) != 1:
                raise RuleNotApplicable(f"rule {r} consumes one {kind} and one E block")
            ctor = self.rule3 if r == 3 else self.rule4
            return ctor(sing[0].k, reg[0].k - 1, reg[0].eig)
        if r == 5:
            if any(b.kind != "E" for b in c) or c[0].eig != c[1].eig:
                raise RuleNotApplicable("rule 5 consumes two E blocks of one eigenvalue")
            j, k = sorted(b.k for b in c)
            return self.rule5(j, k, c[0].eig)
        sing = {b.kind: b.k for b in c}
        if set(sing) != {"L", "LT"}:
            raise RuleNotApplicable("rule 6 consumes one L and one LT block")
        p, q = sing["L"], sing["LT"]
        if len(self.partition) != len(self.labels) or any(k < 1 for k in self.partition):
            raise RuleNotApplicable("rule 6 needs one positive size per label")
        if sum(self.partition) != p + q + 1:
            raise RuleNotApplicable(f"rule 6 needs p+q+1 = sum(k_i) ({p}+{q}+1 != {sum(self.partition)})")
        if len(set(self.labels)) != len(self.labels):
            raise RuleNotApplicable("rule 6 needs pairwise-distinct eigenvalues")
        return self.rule6(p, q, self.partition, self.labels)

    @property
    def rank_change(self) -> int:
        return sum(b.rank for b in self.produced) - sum(b.rank for b in self.consumed)

    def to_dict(self) -> dict:
        d = {"rule": self.rule_id,
             "consumed": [str(b) for b in self.consumed],
             "produced": [str(b) for b in self.produced]}
        if self.rule_id == 6:
            d["partition"] = list(self.partition)
            d["labels"] = [str(mu) for mu in self.labels]
        return d

    def __str__(self):
        lhs = " + ".join(map(str, self.consumed))
        rhs = " + ".join(map(str, self.produced)) or "()"
        return f"[{self.rule_id}] {lhs} ~> {rhs}"


def apply_rule(kcf: Kcf, app: RuleApplication) -> Kcf:
    app.check()
    have = kcf.counts()
    need = Counter(app.consumed)
    for b, c in need.items():
        if have[b] < c:
            raise RuleNotApplicable(f"rule {app.rule_id}: {b} not present in {kcf}")
    have.subtract(need)
    return Kcf(list((have + Counter(app.produced)).elements()))


@dataclass(frozen=True)
class SearchStats:
    explored: int = 0
    budget_bound: bool = False
    depth_bound: bool = False
    kernel: str = KERNEL

    def to_dict(self) -> dict:
        return {"explored": self.explored, "budget_bound": self.budget_bound,
                "depth_bound": self.depth_bound, "kernel": self.kernel}


@dataclass(frozen=True)
class ClosureCertificate:
    """Rule applications turning ``source`` into ``target``."""

    source: Kcf
    target: Kcf
    steps: tuple = ()
    stats: SearchStats = field(default_factory=SearchStats)

    def __bool__(self):
        return True

    def __len__(self):
        return len(self.steps)

    def replay(self) -> Kcf:
        cur = self.source
        for app in self.steps:
            nxt = apply_rule(cur, app)
            if nxt.shape != cur.shape:
                raise AssertionError(f"rule {app.rule_id} changed the size")
            cur = nxt
        return cur

    def verify(self) -> bool:
        try:
            return self.replay() == self.target
        except RuleNotApplicable:
            return False

    def then(self, other: "ClosureCertificate") -> "ClosureCertificate":
        """Compose: ``self`` reaches ``self.target``; ``other`` continues from there."""
        if other.source != self.target:
            raise ValueError("certificates do not chain")
        return ClosureCertificate(self.source, other.target, self.steps + other.steps)

    def is_paired(self) -> bool:
        return _pairing_ok(self.source, self.steps)

    def to_dict(self) -> dict:
        return {"dominated": True, "source": [str(b) for b in self.source],
                "target": [str(b) for b in self.target],
                "steps": [s.to_dict() for s in self.steps], "search": self.stats.to_dict()}


@dataclass(frozen=True)
class NotDominated:
    source: Kcf
    target: Kcf
    reason: str = "target unreachable"
    stats: SearchStats = field(default_factory=SearchStats)

    def __bool__(self):
        return False

    def to_dict(self) -> dict:
        return {"dominated": False, "source": [str(b) for b in self.source],
                "target": [str(b) for b in self.target], "reason": self.reason,
                "search": self.stats.to_dict()}


# -- abstraction ------------------------------------------------------------------

def _label_partitions(kcf: Kcf, paired: bool) -> dict:
    parts = defaultdict(list)
    for b in kcf:
        if b.kind == "E":
            parts[b.eig].append(b.k)
    out = {}
    for mu, sizes in parts.items():
        sizes.sort()
        out[mu] = tuple(sizes[::2]) if paired else tuple(sizes)
    return out


def _abstract(kcf: Kcf, named: tuple, paired: bool):
    parts = _label_partitions(kcf, paired)
    nm = tuple(parts.get(mu, ()) for mu in named)
    an = tuple(sorted(p for mu, p in parts.items() if mu not in named))
    if paired:
        return (tuple(kcf.indices("L")), (), nm, an)
    return (tuple(kcf.indices("L")), tuple(kcf.indices("LT")), nm, an)


@functools.lru_cache(maxsize=4096)
def _cached_bfs(source, target, paired, anon_cap, rank_cap, max_moves):
    return _kernel_bfs(source, target, paired, anon_cap, rank_cap, max_moves)


class _Replayer:
    """Turns kernel moves into concrete rule applications on a Kcf."""

    def __init__(self, source: Kcf, named: tuple, avoid: set, paired: bool):
        self.cur = source
        self.named = named
        self.paired = paired
        self.avoid = set(avoid)
        self._fresh = itertools.count(1)
        self.steps = []

    def _new_label(self):
        while True:
            mu = Eigenvalue(label=f"nu{next(self._fresh)}")
            if mu not in self.avoid:
                self.avoid.add(mu)
                return mu

    def _resolve(self, refs):
        parts = _label_partitions(self.cur, self.paired)
        taken = set()
        new = {}
        out = []
        for ref in refs:
            tag, val = ref
            if tag == 0:
                mu = self.named[val]
            elif tag == 1:
                mu = next(m for m, p in sorted(parts.items(), key=lambda kv: kv[0].sort_key())
                          if p == val and m not in self.named and m not in taken)
            else:
                if val not in new:
                    new[val] = self._new_label()
                mu = new[val]
            taken.add(mu)
            out.append(mu)
        return out

    def _apply(self, app):
        self.cur = apply_rule(self.cur, app)
        self.steps.append(app)

    def play(self, move):
        rule = move[0]
        if rule in (1, 2):
            _, x, y = move
            self._apply((RuleApplication.rule1 if rule == 1 else RuleApplication.rule2)(x + 1, y - 1))
            if self.paired:
                self._apply(RuleApplication.rule2(x + 1, y - 1))
        elif rule in (3, 4):
            _, j, ref, s = move
            (mu,) = self._resolve([ref])
            self._apply((RuleApplication.rule3 if rule == 3 else RuleApplication.rule4)(j, s - 1, mu))
            if self.paired:
                self._apply(RuleApplication.rule4(j, s - 1, mu))
        elif rule == 5:
            _, ref, a, b = move
            (mu,) = self._resolve([ref])
            self._apply(RuleApplication.rule5(a, b, mu))
            if self.paired:
                self._apply(RuleApplication.rule5(a, b, mu))
        else:
            _, p, q, parts = move
            labels = self._resolve([ref for ref, _ in parts])
            sizes = [k for _, k in parts]
            self._apply(RuleApplication.rule6(p, q, sizes, labels))
            if self.paired:
                self._apply(RuleApplication.rule6(q, p, sizes, labels))


def _search(target: Kcf, source: Kcf, paired: bool, eig_budget, depth_cap):
    n = max(target.shape)
    eig_budget = n + 1 if eig_budget is None else eig_budget
    depth_cap = 4 * n if depth_cap is None else depth_cap
    if source.rank > target.rank:
        return NotDominated(source, target, "source rank exceeds target rank")
    named = tuple(sorted(target.eigenvalues(), key=Eigenvalue.sort_key))
    a_src = _abstract(source, named, paired)
    a_tgt = _abstract(target, named, paired)
    anon_cap = len(a_src[3]) + eig_budget
    rank_cap = target.rank
    max_moves = depth_cap // 2 if paired else depth_cap
    moves, explored, budget_hit, depth_hit = _cached_bfs(a_src, a_tgt, paired, anon_cap, rank_cap, max_moves)
    stats = SearchStats(explored, budget_hit, depth_hit)
    if moves is None:
        reason = "target unreachable"
        if depth_hit or budget_hit:
            reason += " within search caps"
        return NotDominated(source, target, reason, stats)
    rep = _Replayer(source, named, source.eigenvalues() | target.eigenvalues(), paired)
    for mv in moves:
        rep.play(mv)
    if rep.cur != target:
        raise AssertionError(f"replay ended at {rep.cur}, expected {target}")
    return ClosureCertificate(source, target, tuple(rep.steps), stats)


def dominates(target: Kcf, source: Kcf, eig_budget: int | None = None,
              depth_cap: int | None = None):
    """Is ``target`` obtainable from ``source`` by the degeneration rules?

    Returns a :class:`ClosureCertificate` (possibly empty) or
    :class:`NotDominated`.  ``eig_budget`` caps the fresh eigenvalues rule 6
    may introduce (default ``n + 1``); ``depth_cap`` caps the number of rule
    applications (default ``4 n``).  Either cap binding is reported in
    ``result.stats``.
    """
    if target.shape != source.shape:
        raise ValueError(f"dimension mismatch: {target.shape} vs {source.shape}")
    return _search(target, source, False, eig_budget, depth_cap)


_MIRROR = {1: 2, 3: 4, 5: 5, 6: 6}


def _mirrored(a: RuleApplication, b: RuleApplication) -> bool:
    if _MIRROR.get(a.rule_id) != b.rule_id:
        return False
    if a.rule_id == 5:
        return a == b
    flip = {"L": "LT", "LT": "L", "E": "E"}
    mirror = Counter(KcfBlock(flip[x.kind], x.k, x.eig) for x in a.consumed)
    if a.rule_id == 6:
        return mirror == Counter(b.consumed) and Counter(a.produced) == Counter(b.produced)
    return mirror == Counter(b.consumed) and \
        Counter(KcfBlock(flip[x.kind], x.k, x.eig) for x in a.produced) == Counter(b.produced)


def _pairing_ok(source: Kcf, steps) -> bool:
    if len(steps) % 2:
        return False
    cur = source
    for a, b in zip(steps[::2], steps[1::2]):
        if not _mirrored(a, b):
            return False
        cur = apply_rule(apply_rule(cur, a), b)
        if not cur.is_skew_shaped():
            return False
    return True


def skew_dominates(target: SkewKcf, source: SkewKcf, eig_budget: int | None = None,
                   depth_cap: int | None = None):
    """Dominance between skew-symmetric canonical forms.

    The search moves in mirrored pairs of rule applications so every
    intermediate form stays the KCF of a skew-symmetric pencil.  The returned
    certificate lives on the KCF level.
    """
    if target.n != source.n:
        raise ValueError(f"dimension mismatch: n={target.n} vs n={source.n}")
    res = _search(skew_to_kcf(target), skew_to_kcf(source), True, eig_budget, depth_cap)
    if res and not _pairing_ok(res.source, res.steps):
        raise UnpairedCertificate("search returned a certificate that is not in mirrored pairs")
    return res


# -- enumeration --------------------------------------------------------------------

def _partitions_upto(total):
    """All partitions of every size 1..total, ascending tuples."""
    out = []
    for s in range(1, total + 1):
        out += [tuple(sorted(p)) for p in partitions(s)]
    return out


def _label_multisets(total, max_labels, pool):
    """Multisets of at most ``max_labels`` nonempty partitions summing to ``total``."""
    out = []

    def rec(rest, start, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        if len(acc) == max_labels:
            return
        for i in range(start, len(pool)):
            p = pool[i]
            s = sum(p)
            if s <= rest:
                acc.append(p)
                rec(rest - s, i, acc)
                acc.pop()

    rec(total, 0, [])
    return out


def _m_multisets(count, total):
    """Ascending tuples of ``count`` nonnegative ints summing to ``total``."""
    out = []

    def rec(left, rest, cap, acc):
        if left == 0:
            if rest == 0:
                out.append(tuple(reversed(acc)))
            return
        for v in range(min(rest, cap), -1, -1):
            if v * left < rest:
                break
            acc.append(v)
            rec(left - 1, rest - v, v, acc)
            acc.pop()

    rec(count, total, total, [])
    return out


def enumerate_skew_kcfs(n: int, max_rank: int, max_distinct_eigs: int) -> list[SkewKcf]:
    """All skew canonical forms of size ``n`` and rank at most ``max_rank``.

    Finite eigenvalues are placeholders ``mu1, mu2, ...`` assigned in a
    canonical order, so forms differing only by a relabeling appear once.
    """
    labels = [Eigenvalue(label=f"mu{i + 1}") for i in range(max_distinct_eigs)]
    out = []
    for count in range(n, -1, -1):
        if n - count > max_rank:
            break
        if (n - count) % 2:
            continue
        half = (n - count) // 2  # sum of M indices plus sum of H/K sizes
        if count == 0 and half == 0:
            continue
        pool = _partitions_upto(half)
        for m_total in range(half + 1):
            if count == 0 and m_total:
                break
            ms = _m_multisets(count, m_total) if count else [()]
            reg_total = half - m_total
            for k_total in range(reg_total + 1):
                ks = [tuple(sorted(p)) for p in partitions(k_total)] if k_total else [()]
                hs = _label_multisets(reg_total - k_total, max_distinct_eigs, pool) \
                    if reg_total - k_total else [()]
                for mpart in ms:
                    for kpart in ks:
                        for hsets in hs:
                            blocks = [SkewBlock.M(m) for m in mpart]
                            blocks += [SkewBlock.K(k) for k in kpart]
                            for mu, part in zip(labels, hsets):
                                blocks += [SkewBlock("H", h, mu) for h in part]
                            out.append(SkewKcf(blocks))
    return out


def strata_dag(n: int, max_rank: int, max_distinct_eigs: int, eig_budget=None, depth_cap=None):
    """Covering relations of dominance among the enumerated strata.

    Returns ``(strata, edges)`` where ``(i, j)`` means stratum ``i`` is more
    generic than stratum ``j`` with no enumerated stratum strictly between.
    """
    strata = enumerate_skew_kcfs(n, max_rank, max_distinct_eigs)
    above = {}
    for j, x in enumerate(strata):
        above[j] = {i for i, y in enumerate(strata)
                    if i != j and skew_dominates(y, x, eig_budget, depth_cap)}
    edges = []
    for j, ups in above.items():
        for i in ups:
            if not any(i in above[k] for k in ups if k != i):
                edges.append((i, j))
    return strata, sorted(edges)
