import itertools

import pytest
from hypothesis import given, settings, strategies as st

from skewgen.canon import INF, Kcf, KcfBlock, SkewBlock, SkewKcf, eig, skew_to_kcf
from skewgen.closure import (ClosureCertificate, NotDominated, RuleApplication, RuleNotApplicable,
                             UnpairedCertificate, apply_rule, dominates, enumerate_skew_kcfs,
                             skew_dominates, strata_dag)
import skewgen.closure as closure
from skewgen.generic import generic_skew_pencil

from oracles import kcf_tuples, naive_reachable

E, L, LT = KcfBlock.E, KcfBlock.L, KcfBlock.LT
H, K, M = SkewBlock.H, SkewBlock.K, SkewBlock.M
mu = eig("mu")


# -- single rules -------------------------------------------------------------

def test_rule1_example():
    assert apply_rule(Kcf([L(0), L(2)]), RuleApplication.rule1(1, 1)) == Kcf([L(1), L(1)])


def test_rule3_with_empty_e0():
    assert apply_rule(Kcf([L(0), E(mu, 1)]), RuleApplication.rule3(0, 0, mu)) == Kcf([L(1)])


def test_rule6_example():
    app = RuleApplication.rule6(1, 0, (2,), ("fresh",))
    assert apply_rule(Kcf([L(1), LT(0)]), app) == Kcf([E("fresh", 2)])


@pytest.mark.parametrize("app, kcf", [
    (RuleApplication.rule2(2, 3), Kcf([LT(1), LT(4)])),
    (RuleApplication.rule4(1, 2, 5), Kcf([LT(1), E(5, 3)])),
    (RuleApplication.rule5(1, 2, mu), Kcf([E(mu, 1), E(mu, 2)])),
    (RuleApplication.rule6(0, 1, (1, 1), (3, 4)), Kcf([L(0), LT(1)])),
])
def test_rules_preserve_size_and_do_not_lower_rank(app, kcf):
    out = apply_rule(kcf, app)
    assert out.shape == kcf.shape
    assert out.rank >= kcf.rank
    assert app.rank_change == out.rank - kcf.rank


def test_rule_not_applicable_messages():
    with pytest.raises(RuleNotApplicable, match="rule not applicable.*not present"):
        apply_rule(Kcf([L(1), L(1)]), RuleApplication.rule1(1, 1))
    with pytest.raises(RuleNotApplicable, match="1 <= j <= k"):
        RuleApplication(1, (L(1), L(2)), (L(2), L(1))).check()
    with pytest.raises(RuleNotApplicable, match="distinct"):
        RuleApplication.rule6(1, 0, (1, 1), ("a", "a")).check()
    with pytest.raises(RuleNotApplicable, match=r"p\+q\+1"):
        RuleApplication.rule6(1, 0, (1,), ("a",)).check()
    with pytest.raises(RuleNotApplicable, match="one eigenvalue"):
        RuleApplication(5, (E(1, 1), E(2, 2)), (E(1, 3),)).check()


# -- dominance ----------------------------------------------------------------

def test_dominates_example_certificate():
    target = Kcf([L(1), L(1), LT(1), LT(1)])
    source = Kcf([E(mu, 1)] * 4 + [L(0), L(0), LT(0), LT(0)])
    cert = dominates(target, source)
    assert isinstance(cert, ClosureCertificate)
    assert len(cert) == 4
    assert sorted(s.rule_id for s in cert.steps) == [3, 3, 4, 4]
    assert cert.verify() and cert.replay() == target


def test_dominates_is_reflexive():
    x = Kcf([L(1), LT(0), E(2, 2)])
    cert = dominates(x, x)
    assert cert and len(cert) == 0


def test_rule1_is_one_directional():
    pad = [LT(1), LT(1)]
    res = dominates(Kcf([L(0), L(2)] + pad), Kcf([L(1), L(1)] + pad))
    assert isinstance(res, NotDominated) and not res
    assert not res.stats.depth_bound and not res.stats.budget_bound
    assert dominates(Kcf([L(1), L(1)] + pad), Kcf([L(0), L(2)] + pad))


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        dominates(Kcf([L(1)]), Kcf([L(0)]))
    with pytest.raises(ValueError, match="dimension mismatch"):
        skew_dominates(SkewKcf([M(1)]), SkewKcf([M(0)]))


def test_skew_dominates_h_block():
    cert = skew_dominates(SkewKcf([M(1), M(0)]), SkewKcf([H(mu, 1), M(0), M(0)]))
    assert cert and sorted(s.rule_id for s in cert.steps) == [3, 4]
    assert cert.is_paired() and cert.verify()


def test_skew_dominates_k_block_uses_infinity():
    cert = skew_dominates(SkewKcf([M(1), M(0)]), SkewKcf([K(1), M(0), M(0)]))
    assert cert and sorted(s.rule_id for s in cert.steps) == [3, 4]
    assert all(s.consumed[1].eig == INF for s in cert.steps)


def test_skew_dominates_from_zero_goes_through_rule6():
    cert = skew_dominates(SkewKcf([M(1), M(0)]), SkewKcf([M(0)] * 4))
    assert [s.rule_id for s in cert.steps] == [6, 6, 3, 4]
    assert cert.verify()


def test_skew_dominates_reflexive():
    s = SkewKcf([M(1), H(2, 1)])
    cert = skew_dominates(s, s)
    assert cert and len(cert) == 0


def test_unpaired_certificate_detection(monkeypatch):
    bad = ClosureCertificate(
        Kcf([L(0), LT(0), E(mu, 1), E(mu, 1)]), Kcf([L(1), LT(0), E(mu, 1)]),
        (RuleApplication.rule3(0, 0, mu),))
    monkeypatch.setattr(closure, "_search", lambda *a: bad)
    with pytest.raises(UnpairedCertificate):
        skew_dominates(SkewKcf([M(0), H(mu, 1)]), SkewKcf([M(0), H(mu, 1)]))


def test_caps_are_reported():
    res = dominates(Kcf([L(1), L(1), LT(1), LT(1)]), Kcf([L(0)] * 2 + [LT(0)] * 2 + [E(mu, 1)] * 4),
                    depth_cap=2)
    assert not res and res.stats.depth_bound
    res = skew_dominates(SkewKcf([M(1), M(0)]), SkewKcf([M(0)] * 4), eig_budget=0)
    assert not res and res.stats.budget_bound


def test_certificates_compose():
    a = SkewKcf([M(0)] * 5)
    b = SkewKcf([H(mu, 1), M(0), M(0), M(0)])
    c = generic_skew_pencil(5, 1)
    ab = skew_dominates(b, a)
    bc = skew_dominates(c, b)
    assert ab and bc
    ac = ab.then(bc)
    assert ac.source == skew_to_kcf(a) and ac.target == skew_to_kcf(c)
    assert ac.verify() and ac.is_paired()
    with pytest.raises(ValueError):
        bc.then(ab)


def test_certificate_serialization():
    cert = skew_dominates(SkewKcf([M(1), M(0)]), SkewKcf([M(0)] * 4))
    d = cert.to_dict()
    assert d["dominated"] is True
    assert [s["rule"] for s in d["steps"]] == [6, 6, 3, 4]
    assert set(d["steps"][0]) == {"rule", "consumed", "produced", "partition", "labels"}
    assert str(cert.steps[2]).startswith("[3] ")


# -- enumeration --------------------------------------------------------------

def test_enumerate_n4_rank2_one_label():
    got = set(enumerate_skew_kcfs(4, 2, 1))
    want = {SkewKcf([M(0)] * 4), SkewKcf([M(1), M(0)]),
            SkewKcf([H(eig("mu1"), 1), M(0), M(0)]), SkewKcf([K(1), M(0), M(0)])}
    assert got == want


def test_enumerate_small_cases():
    assert enumerate_skew_kcfs(2, 0, 3) == [SkewKcf([M(0), M(0)])]
    assert set(enumerate_skew_kcfs(3, 2, 0)) == {SkewKcf([M(0)] * 3), SkewKcf([M(1)]),
                                                 SkewKcf([K(1), M(0)])}


@pytest.mark.parametrize("n, r, labels", [(4, 4, 2), (5, 4, 2), (6, 4, 3), (6, 6, 2)])
def test_enumeration_is_exhaustive_and_duplicate_free(n, r, labels):
    got = enumerate_skew_kcfs(n, r, labels)
    assert len(got) == len(set(got))
    assert all(s.n == n and s.rank <= r for s in got)
    # brute force: every multiset of blocks with the right size
    blocks = [M(m) for m in range(n // 2 + 1)] + [K(k) for k in range(1, n // 2 + 1)]
    blocks += [H(eig(f"mu{i + 1}"), h) for i in range(labels) for h in range(1, n // 2 + 1)]
    brute = set()
    for count in range(1, n + 1):
        for combo in itertools.combinations_with_replacement(blocks, count):
            s = SkewKcf(combo)
            if s.n == n and s.rank <= r:
                brute.add(_canonical_labels(s))
    canon = [_canonical_labels(s) for s in got]
    assert len(set(canon)) == len(got), "duplicates up to relabeling"
    assert set(canon) == brute


def _canonical_labels(s):
    """Relabel H eigenvalues so forms equal up to relabeling compare equal."""
    by_label = {}
    for b in s:
        if b.kind == "H":
            by_label.setdefault(b.eig, []).append(b.k)
    order = sorted(by_label, key=lambda e: (sorted(by_label[e]), e.label))
    sig = tuple(sorted(tuple(sorted(by_label[e])) for e in order))
    rest = tuple(sorted((b.kind, b.k) for b in s if b.kind != "H"))
    return rest, sig


def test_strata_dag_n4():
    strata, edges = strata_dag(4, 2, 1)
    idx = {s: i for i, s in enumerate(strata)}
    W = idx[SkewKcf([M(1), M(0)])]
    Z = idx[SkewKcf([M(0)] * 4)]
    Hs = idx[SkewKcf([H(eig("mu1"), 1), M(0), M(0)])]
    Ks = idx[SkewKcf([K(1), M(0), M(0)])]
    assert set(edges) == {(W, Hs), (W, Ks), (Hs, Z), (Ks, Z)}


# -- cross-checks against the independent oracle ------------------------------

def _pool_for(a, b, fresh=3):
    named = sorted({t[1] for t in a + b if t[0] == "E"})
    return tuple(named) + tuple(f"fresh{i}" for i in range(fresh))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_unpaired_search_agrees_with_naive_oracle(n):
    strata = [skew_to_kcf(s) for s in enumerate_skew_kcfs(n, n - n % 2, 2)]
    for x, y in itertools.product(strata, repeat=2):
        a, b = kcf_tuples(y), kcf_tuples(x)
        want = naive_reachable(a, b, _pool_for(a, b))
        got = dominates(x, y)
        assert bool(got) == want, (x, y)
        if got:
            assert got.verify()


@pytest.mark.parametrize("target, source", [
    (Kcf([L(1), LT(2)]), Kcf([L(0), LT(0), E(1, 1), E(2, 2)])),
    (Kcf([L(2), LT(0)]), Kcf([L(0), LT(0), E(1, 2)])),
    (Kcf([L(2), LT(0)]), Kcf([L(1), LT(1)])),
    (Kcf([L(0), L(2), LT(1)]), Kcf([L(1), L(1), LT(1)])),
    (Kcf([E(1, 1), E(2, 1), L(0), LT(0)]), Kcf([E(1, 2), L(0), LT(0)])),
    (Kcf([E(1, 2), L(0), LT(0)]), Kcf([E(1, 1), E(1, 1), L(0), LT(0)])),
])
def test_rectangular_and_mixed_cases_agree_with_oracle(target, source):
    a, b = kcf_tuples(source), kcf_tuples(target)
    want = naive_reachable(a, b, _pool_for(a, b))
    got = dominates(target, source)
    assert bool(got) == want
    if got:
        assert got.verify()


@pytest.mark.parametrize("n", [3, 4, 5])
def test_paired_dominance_implies_unpaired(n):
    strata = enumerate_skew_kcfs(n, n - n % 2, 2)
    for x, y in itertools.product(strata, repeat=2):
        if skew_dominates(x, y):
            assert dominates(skew_to_kcf(x), skew_to_kcf(y))


# -- properties ---------------------------------------------------------------

@pytest.mark.parametrize("n, r", [(3, 2), (4, 2), (4, 4), (5, 4), (6, 4)])
def test_antisymmetry_on_distinct_strata(n, r):
    strata = enumerate_skew_kcfs(n, r, 2)
    dom = {(i, j): bool(skew_dominates(x, y))
           for i, x in enumerate(strata) for j, y in enumerate(strata) if i != j}
    assert not any(dom[i, j] and dom[j, i] for i, j in dom)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_transitivity_via_composition(n):
    strata = enumerate_skew_kcfs(n, 4, 1)
    certs = {(i, j): skew_dominates(x, y) for i, x in enumerate(strata) for j, y in enumerate(strata)}
    for (i, j), c1 in certs.items():
        if not c1:
            continue
        for k in range(len(strata)):
            c2 = certs[(k, i)]
            if c2:
                assert certs[(k, j)], "dominance must be transitive"
                comp = c1.then(c2)
                assert comp.verify()


@settings(max_examples=25)
@given(st.integers(3, 9).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, (n - 1) // 2))),
       st.data())
def test_generic_dominates_random_stratum(nw, data):
    n, w = nw
    strata = enumerate_skew_kcfs(n, 2 * w, 2)
    x = data.draw(st.sampled_from(strata))
    cert = skew_dominates(generic_skew_pencil(n, w), x)
    assert cert and cert.verify() and cert.is_paired()
    # replay reproduces the target multiset exactly
    assert cert.replay() == skew_to_kcf(generic_skew_pencil(n, w))
