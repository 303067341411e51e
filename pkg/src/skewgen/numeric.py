"""Numerical recovery of structural data from dense pencils and polynomials.

Rank decisions use singular values against a relative threshold and keep the
gap ratio at the cut, so every structural answer has an audit trail.

Minimal indices come from block convolution (Sylvester) matrices: the
polynomial vectors of degree at most ``k`` in the right null space of ``P``
form the kernel of ``C_k``, whose dimension is ``sum_{eps <= k} (k + 1 - eps)``
over the right minimal indices ``eps``.  Second differences of these
nullities count the indices of each degree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .canon import MatPoly, Pencil, _as_matpoly

__all__ = [
    "ToleranceModel", "RankDecision", "RecoveredStructure", "ToleranceInconsistency",
    "numeric_rank", "rank_decision", "normal_rank", "convolution_matrix",
    "right_minimal_indices", "left_minimal_indices", "recover", "tangent_codim",
]


class ToleranceInconsistency(RuntimeError):
    """Rank decisions that contradict each other; ``audit`` holds the evidence."""

    def __init__(self, msg, audit=()):
        super().__init__(msg)
        self.audit = list(audit)


@dataclass(frozen=True)
class ToleranceModel:
    rel_tol: float = 1e-10
    probes: int = 7
    seed: int = 0
    low_confidence_gap: float = 1e3

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.probes < 1:
            raise ValueError("need at least one probe point")

    def probe_points(self) -> np.ndarray:
        """Seeded random points in the annulus 0.5 <= |lambda| <= 2."""
        rng = np.random.default_rng(self.seed)
        radius = rng.uniform(0.5, 2.0, self.probes)
        angle = rng.uniform(0.0, 2 * np.pi, self.probes)
        return radius * np.exp(1j * angle)


@dataclass(frozen=True)
class RankDecision:
    rank: int
    gap_ratio: float
    threshold: float
    what: str = ""

    def low_confidence(self, tol: ToleranceModel) -> bool:
        return self.gap_ratio < tol.low_confidence_gap

    def to_dict(self) -> dict:
        return {"what": self.what, "rank": self.rank,
                "gap_ratio": None if np.isinf(self.gap_ratio) else float(self.gap_ratio),
                "threshold": float(self.threshold)}


def rank_decision(M, tol: ToleranceModel = ToleranceModel(), what: str = "") -> RankDecision:
    M = np.asarray(M)
    if M.size == 0:
        return RankDecision(0, np.inf, 0.0, what)
    sv = np.linalg.svd(M, compute_uv=False)
    smax = sv[0]
    if smax == 0:
        return RankDecision(0, np.inf, 0.0, what)
    thresh = tol.rel_tol * smax
    k = int(np.count_nonzero(sv > thresh))
    upper = sv[k - 1]
    lower = sv[k] if k < len(sv) else thresh
    gap = np.inf if lower == 0 else float(upper / lower)
    return RankDecision(k, gap, float(thresh), what)


def numeric_rank(M, tol: ToleranceModel = ToleranceModel()) -> int:
    return rank_decision(M, tol).rank


def _normal_rank(P: MatPoly, tol, audit) -> int:
    best = 0
    for lam in tol.probe_points():
        dec = rank_decision(P(lam), tol, f"P({lam:.4g})")
        audit.append(dec)
        best = max(best, dec.rank)
    return best


def normal_rank(p: MatPoly | Pencil, tol: ToleranceModel = ToleranceModel()) -> int:
    """Largest rank of ``P(lambda)`` over the probe points."""
    P = _as_matpoly(p)
    audit = []
    rho = _normal_rank(P, tol, audit)
    if P.is_skew() and rho % 2:
        raise ToleranceInconsistency(f"odd rank {rho} for skew input", audit)
    return rho


def convolution_matrix(P: MatPoly, k: int) -> np.ndarray:
    """Block Toeplitz matrix with block ``(i, j) = A_{i-j}``, ``k+1`` block columns."""
    m, n = P.shape
    d = P.grade
    C = np.zeros(((d + k + 1) * m, (k + 1) * n), dtype=complex)
    for j in range(k + 1):
        for i, A in enumerate(P.coeffs):
            C[(i + j) * m:(i + j + 1) * m, j * n:(j + 1) * n] = A
    return C


def _right_indices(P: MatPoly, rho: int, tol, audit) -> list[int]:
    n = P.shape[1]
    want = n - rho
    if want <= 0:
        return []
    kmax = P.grade * rho
    out = []
    prev_null = 0   # d_{k-1}
    prev_le = 0     # #{eps <= k-1}
    for k in range(kmax + 1):
        dec = rank_decision(convolution_matrix(P, k), tol, f"C_{k}")
        audit.append(dec)
        null = (k + 1) * n - dec.rank
        le = null - prev_null
        if le < prev_le or le > want:
            raise ToleranceInconsistency(
                f"nullity sequence inconsistent at k={k}: #(eps<=k)={le}, "
                f"previous {prev_le}, expected at most {want}", audit)
        out += [k] * (le - prev_le)
        if le == want:
            return out
        prev_null, prev_le = null, le
    raise ToleranceInconsistency(
        f"found {len(out)} of {want} minimal indices up to degree {kmax}", audit)


def right_minimal_indices(p, tol: ToleranceModel = ToleranceModel(), rank: int | None = None) -> list[int]:
    P = _as_matpoly(p)
    audit = []
    rho = _normal_rank(P, tol, audit) if rank is None else rank
    return _right_indices(P, rho, tol, audit)


def left_minimal_indices(p, tol: ToleranceModel = ToleranceModel(), rank: int | None = None) -> list[int]:
    return right_minimal_indices(_as_matpoly(p).T, tol, rank)


@dataclass(frozen=True)
class RecoveredStructure:
    normal_rank: int
    right_minimal: tuple
    left_minimal: tuple
    divisor_degree_sum: int
    grade: int
    audit: tuple = field(default=(), repr=False)
    tol: ToleranceModel = field(default=ToleranceModel(), repr=False)

    @property
    def low_confidence(self) -> bool:
        return any(dec.low_confidence(self.tol) for dec in self.audit)

    def to_dict(self) -> dict:
        return {
            "normal_rank": self.normal_rank,
            "right": list(self.right_minimal),
            "left": list(self.left_minimal),
            "divisor_degree_sum": self.divisor_degree_sum,
            "grade": self.grade,
            "low_confidence": self.low_confidence,
            "audit": [dec.to_dict() for dec in self.audit],
        }


def recover(p, tol: ToleranceModel = ToleranceModel()) -> RecoveredStructure:
    """Normal rank, minimal indices and total divisor degree of ``p``."""
    P = _as_matpoly(p)
    skew = P.is_skew()
    audit = []
    rho = _normal_rank(P, tol, audit)
    if skew and rho % 2:
        raise ToleranceInconsistency(f"odd rank {rho} for skew input", audit)
    eps = _right_indices(P, rho, tol, audit)
    eta = _right_indices(P.T, rho, tol, audit)
    if skew and eta != eps:
        raise ToleranceInconsistency(f"left {eta} and right {eps} indices differ for skew input", audit)
    delta = P.grade * rho - sum(eps) - sum(eta)
    if delta < 0 or (skew and delta % 2):
        raise ToleranceInconsistency(f"impossible divisor degree sum {delta}", audit)
    return RecoveredStructure(rho, tuple(eps), tuple(eta), delta, P.grade, tuple(audit), tol)


def tangent_codim(p: Pencil, tol: ToleranceModel = ToleranceModel()) -> int:
    """Codimension of the congruence orbit of a skew pencil.

    Rank of ``X -> (X^T A + A X, X^T B + B X)`` from ``n^2`` parameters into the
    ``n(n-1)``-dimensional space of skew pencils.
    """
    if not p.is_skew():
        raise ValueError("tangent_codim needs a skew-symmetric pencil")
    n = p.shape[0]
    eye = np.eye(n)
    iu = np.triu_indices(n, 1)
    cols = []
    for M in (p.A, p.B):
        # T[i, j, r, c] = d/dX_ij of (X^T M + M X)[r, c]
        T = np.einsum("rj,ic->ijrc", eye, M) + np.einsum("cj,ri->ijrc", eye, M)
        cols.append(T[:, :, iu[0], iu[1]].reshape(n * n, -1))
    J = np.concatenate(cols, axis=1)
    return n * (n - 1) - numeric_rank(J, tol)
