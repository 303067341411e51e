"""Generic bounded-rank structures and their codimensions.

Everything here is exact integer arithmetic on symbolic forms.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .canon import EigStruct, Kcf, KcfBlock, SkewBlock, SkewKcf

__all__ = [
    "GenericPencilParams", "GenericPolyParams", "generic_skew_pencil",
    "generic_skew_regular", "generic_rect_full_rank", "generic_skew_poly",
    "codim_sum_formula", "codim_closed_form", "codim_poly",
    "pencil_params_of_poly", "shifted_linearization_structure",
]


@dataclass(frozen=True)
class GenericPencilParams:
    """Size ``n`` and half-rank bound ``w`` of a skew pencil family."""

    n: int
    w: int

    def __post_init__(self):
        if self.n < 2 or not 2 <= 2 * self.w <= self.n - 1:
            raise ValueError(f"need n >= 2 and 2 <= 2w <= n-1, got n={self.n}, w={self.w}")

    @property
    def alpha(self) -> int:
        return self.w // (self.n - 2 * self.w)

    @property
    def s(self) -> int:
        return self.w % (self.n - 2 * self.w)


@dataclass(frozen=True)
class GenericPolyParams:
    """Size ``m``, half-rank bound ``r`` and odd grade ``d``."""

    m: int
    r: int
    d: int

    def __post_init__(self):
        if self.m < 2 or not 2 <= 2 * self.r <= self.m - 1:
            raise ValueError(f"need m >= 2 and 2 <= 2r <= m-1, got m={self.m}, r={self.r}")
        if self.d < 1 or self.d % 2 == 0:
            raise ValueError(f"grade must be odd and positive, got d={self.d}")

    @property
    def beta(self) -> int:
        return self.r * self.d // (self.m - 2 * self.r)

    @property
    def t(self) -> int:
        return self.r * self.d % (self.m - 2 * self.r)


def _balanced(total: int, count: int) -> list[int]:
    """``count`` nonnegative integers summing to ``total`` that differ by at most one."""
    q, rem = divmod(total, count)
    return [q + 1] * rem + [q] * (count - rem)


def generic_skew_pencil(p: GenericPencilParams | int, w: int | None = None) -> SkewKcf:
    """The most generic skew canonical form of size n and rank at most 2w."""
    if not isinstance(p, GenericPencilParams):
        p = GenericPencilParams(p, w)
    return SkewKcf(SkewBlock.M(k) for k in _balanced(p.w, p.n - 2 * p.w))


def generic_skew_regular(n: int, eigs) -> SkewKcf:
    """Generic regular skew form for even ``n``: one ``H_1`` per distinct eigenvalue."""
    if n % 2 or n < 2:
        raise ValueError(f"n must be even and positive, got {n}")
    eigs = list(eigs)
    if len(eigs) != n // 2:
        raise ValueError(f"need {n // 2} eigenvalues, got {len(eigs)}")
    blocks = [SkewBlock.H(mu, 1) for mu in eigs]
    if len({b.eig for b in blocks}) != len(blocks):
        raise ValueError("eigenvalues must be pairwise distinct")
    return SkewKcf(blocks)


def generic_rect_full_rank(p: int, q: int) -> Kcf:
    """Generic KCF of a p-by-q pencil with p != q (only singular blocks)."""
    if p == q:
        raise ValueError("square pencils have no generic singular structure")
    if p < q:
        return Kcf(KcfBlock.L(k) for k in _balanced(p, q - p))
    return Kcf(KcfBlock.LT(k) for k in _balanced(q, p - q))


def generic_skew_poly(p: GenericPolyParams | int, r: int | None = None, d: int | None = None) -> EigStruct:
    if not isinstance(p, GenericPolyParams):
        p = GenericPolyParams(p, r, d)
    idx = _balanced(p.r * p.d, p.m - 2 * p.r)
    return EigStruct(right_minimal=idx, left_minimal=idx, skew=True)


def codim_sum_formula(s: SkewKcf) -> int:
    """Codimension of the congruence orbit of an M-only skew form.

    Sums ``2*max(m_i, m_j) + (2 if m_i == m_j else 1)`` over unordered block pairs.
    """
    if any(b.kind != "M" for b in s):
        raise ValueError("H/K blocks unsupported: only M-block forms have a codimension formula here")
    ms = s.indices("M")
    return sum(2 * max(a, b) + (2 if a == b else 1) for a, b in combinations(ms, 2))


def codim_closed_form(n: int, w: int) -> int:
    return (n - 2 * w - 1) * (n - w)


def codim_poly(m: int, r: int, d: int) -> int:
    num = (m - 2 * r - 1) * (m * (d + 1) - 2 * r)
    if num % 2:
        raise ValueError(f"codimension is not integral for m={m}, r={r}, d={d}")
    return num // 2


def pencil_params_of_poly(m: int, r: int, d: int) -> tuple[int, int]:
    """Size and half-rank of the linearization of a grade-d, rank-2r polynomial."""
    if d % 2 == 0:
        raise ValueError("grade must be odd")
    return m * d, (m * (d - 1) + 2 * r) // 2


def shifted_linearization_structure(e: EigStruct, d: int) -> Kcf:
    """KCF of the skew linearization of a polynomial with eigenstructure ``e``.

    Minimal indices move up by ``(d-1)/2``; elementary divisors carry over.
    """
    if d < 1 or d % 2 == 0:
        raise ValueError("grade must be odd")
    if not e.skew:
        raise ValueError("expected a skew-symmetric eigenstructure")
    shift = (d - 1) // 2
    blocks = [KcfBlock.E(mu, k) for mu, k in e.finite_divisors]
    blocks += [KcfBlock.E("inf", k) for k in e.infinite_degrees]
    blocks += [KcfBlock.L(k + shift) for k in e.right_minimal]
    blocks += [KcfBlock.LT(k + shift) for k in e.left_minimal]
    return Kcf(blocks)
