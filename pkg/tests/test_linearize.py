import numpy as np
import pytest
from hypothesis import given, strategies as st

from skewgen.canon import MatPoly, Pencil
from skewgen.linearize import GsylPencil, NotInGsyl, extract, linearize, predicted_indices
from skewgen.sampling import sample_bounded_rank_skew_poly, trial_rng


def random_skew_poly(m, d, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(d + 1):
        X = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        out.append(X - X.T)
    return MatPoly(tuple(out))


def test_grade_one_is_the_pencil_itself():
    P = random_skew_poly(3, 1, 0)
    g = linearize(P)
    np.testing.assert_array_equal(g.A, P.coeffs[1])
    np.testing.assert_array_equal(g.B, -P.coeffs[0])
    lam = 0.4 - 0.9j
    np.testing.assert_allclose(g.pencil(lam), P(lam))


def test_template_m2_d3():
    J = np.array([[0, 1], [-1, 0]], dtype=complex)
    Z = np.zeros((2, 2), dtype=complex)
    g = linearize(MatPoly((Z, Z, Z, J)))
    I = np.eye(2)
    want_A = np.block([[J, Z, Z], [Z, Z, -I], [Z, I, Z]])
    want_B = np.block([[Z, I, Z], [-I, Z, Z], [Z, Z, Z]])
    np.testing.assert_array_equal(g.A, want_A)
    np.testing.assert_array_equal(g.B, want_B)
    assert g.pencil.is_skew()


def test_even_grade_rejected():
    with pytest.raises(ValueError, match="no skew companion form for even grade"):
        linearize(random_skew_poly(2, 2, 1))


def test_non_skew_rejected():
    P = MatPoly((np.eye(2), np.eye(2)))
    with pytest.raises(ValueError, match="not skew"):
        linearize(P)


def test_extract_reports_first_offending_block():
    g = linearize(random_skew_poly(2, 3, 2))
    A = g.A.copy()
    A[4, 2] += 1.0  # inside block (3, 2)
    with pytest.raises(NotInGsyl, match=r"not in GSYL.*block \(3, 2\)"):
        extract(Pencil(A, g.B), 2, 3)


def test_extract_rejects_non_skew_diagonal():
    g = linearize(random_skew_poly(2, 3, 3))
    A = g.A.copy()
    A[0, 0] = 1.0
    with pytest.raises(NotInGsyl, match="not skew"):
        extract(Pencil(A, g.B), 2, 3)


def test_extract_needs_sizes_for_bare_pencils():
    g = linearize(random_skew_poly(2, 3, 4))
    with pytest.raises(ValueError):
        extract(g.pencil)
    with pytest.raises(NotInGsyl):
        extract(g.pencil, 3, 3)


@pytest.mark.parametrize("d", [1, 3, 5, 7])
def test_distance_is_preserved(d):
    P, Q = random_skew_poly(3, d, 10 + d), random_skew_poly(3, d, 20 + d)
    lp, lq = linearize(P).to_matpoly(), linearize(Q).to_matpoly()
    assert np.isclose(lp.distance(lq), P.distance(Q), rtol=1e-13)


@pytest.mark.parametrize("m, d", [(3, 3), (4, 5), (3, 7)])
def test_rank_increases_by_m_d_minus_one(m, d):
    # independent check: L_P(lam) ~ diag(P(lam), I) up to unimodular factors
    P = sample_bounded_rank_skew_poly(m, 1, d, trial_rng(5, d))
    g = linearize(P)
    for lam in (0.3 + 0.7j, -1.1 + 0.2j):
        assert np.linalg.matrix_rank(g.pencil(lam), tol=1e-8) == \
            np.linalg.matrix_rank(P(lam), tol=1e-8) + m * (d - 1)


def test_predicted_indices():
    assert predicted_indices([2, 1], 3) == [2, 3]
    assert predicted_indices([0, 4], 1) == [0, 4]
    with pytest.raises(ValueError):
        predicted_indices([1], 2)


@given(st.integers(1, 4), st.sampled_from([1, 3, 5]), st.integers(0, 2**32 - 1))
def test_round_trip_is_exact(m, d, seed):
    P = random_skew_poly(m, d, seed)
    g = linearize(P)
    assert isinstance(g, GsylPencil) and g.pencil.is_skew()
    assert g.pencil.shape == (m * d, m * d)
    back = extract(g)
    assert all(np.array_equal(a, b) for a, b in zip(back.coeffs, P.coeffs))
    back = extract(g.pencil, m, d)
    assert all(np.array_equal(a, b) for a, b in zip(back.coeffs, P.coeffs))
