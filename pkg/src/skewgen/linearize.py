"""Skew-symmetric companion linearization of odd-grade skew matrix polynomials.

For ``P(lambda) = sum_i lambda**i A_i`` of odd grade ``d`` the linearization is
the ``md x md`` pencil ``lambda*A - B`` with ``d x d`` blocks (1-based ``i``)::

    block (i, i)     lambda*A_{d-i+1} + A_{d-i}   i odd,    0   i even
    block (i, i+1)   -I                           i odd,    -lambda*I   i even
    block (i+1, i)   I                            i odd,    lambda*I    i even
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canon import MatPoly, Pencil

__all__ = ["GsylPencil", "NotInGsyl", "linearize", "extract", "predicted_indices"]


class NotInGsyl(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GsylPencil:
    pencil: Pencil
    m: int
    d: int

    @property
    def A(self):
        return self.pencil.A

    @property
    def B(self):
        return self.pencil.B

    def to_matpoly(self) -> MatPoly:
        return self.pencil.to_matpoly()


def _template(m: int, d: int):
    """The constant (coefficient-free) part of the template as ``(A, B)``."""
    n = m * d
    A = np.zeros((n, n), dtype=complex)
    B = np.zeros((n, n), dtype=complex)
    eye = np.eye(m)
    for i in range(1, d):  # 1-based block row
        r, c = (i - 1) * m, i * m
        if i % 2:
            B[r:r + m, c:c + m] = eye
            B[c:c + m, r:r + m] = -eye
        else:
            A[r:r + m, c:c + m] = -eye
            A[c:c + m, r:r + m] = eye
    return A, B


def _diag_slots(m: int, d: int):
    """``(block offset, lambda-coefficient index, constant-coefficient index)`` per odd block."""
    for i in range(1, d + 1, 2):
        yield (i - 1) * m, d - i + 1, d - i


def linearize(p: MatPoly, d: int | None = None) -> GsylPencil:
    if d is None:
        d = p.grade
    if d != p.grade:
        raise ValueError(f"declared grade {d} differs from polynomial grade {p.grade}")
    if d % 2 == 0:
        raise ValueError("no skew companion form for even grade")
    if not p.is_skew():
        raise ValueError("polynomial is not skew-symmetric")
    m = p.shape[0]
    A, B = _template(m, d)
    for off, hi, lo in _diag_slots(m, d):
        A[off:off + m, off:off + m] = p.coeffs[hi]
        B[off:off + m, off:off + m] = -p.coeffs[lo]
    return GsylPencil(Pencil(A, B), m, d)


def extract(g: GsylPencil | Pencil, m: int | None = None, d: int | None = None) -> MatPoly:
    """Recover ``P`` from its linearization, rejecting anything off-template."""
    if isinstance(g, GsylPencil):
        pencil, m, d = g.pencil, g.m, g.d
    else:
        pencil = g
        if m is None or d is None:
            raise ValueError("m and d are required for a bare pencil")
    if d % 2 == 0:
        raise NotInGsyl("even grade has no skew companion form")
    n = m * d
    if pencil.shape != (n, n):
        raise NotInGsyl(f"expected a {n}x{n} pencil, got {pencil.shape[0]}x{pencil.shape[1]}")
    A, B = pencil.A.copy(), pencil.B.copy()
    coeffs = [None] * (d + 1)
    for off, hi, lo in _diag_slots(m, d):
        sl = slice(off, off + m)
        coeffs[hi] = A[sl, sl].copy()
        coeffs[lo] = -B[sl, sl]
        A[sl, sl] = 0
        B[sl, sl] = 0
    TA, TB = _template(m, d)
    for name, got, want in (("A", A, TA), ("B", B, TB)):
        bad = np.argwhere(got != want)
        if len(bad):
            r, c = bad[0]
            raise NotInGsyl(f"not in GSYL: coefficient {name} differs from the template "
                            f"in block ({r // m + 1}, {c // m + 1})")
    poly = MatPoly(coeffs)
    if not poly.is_skew():
        raise NotInGsyl("not in GSYL: diagonal blocks are not skew-symmetric")
    return poly


def predicted_indices(indices, d: int) -> list[int]:
    """Minimal indices of the linearization: each index shifted by ``(d-1)/2``."""
    if d % 2 == 0:
        raise ValueError("grade must be odd")
    return sorted(e + (d - 1) // 2 for e in indices)
