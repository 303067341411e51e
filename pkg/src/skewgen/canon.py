"""Symbolic canonical forms of matrix pencils and their dense realizations.

Two families of canonical forms live here:

* :class:`Kcf` -- Kronecker canonical form under strict equivalence, a
  multiset of ``E_k(mu)``, ``E_k(inf)``, ``L_k`` and ``L_k^T`` blocks.
* :class:`SkewKcf` -- canonical form of skew-symmetric pencils under
  congruence, a multiset of ``H_h(mu)``, ``K_k`` and ``M_m`` blocks.

Pencils are always read as ``lambda*A - B``.
"""
from __future__ import annotations

import cmath
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Eigenvalue", "INF", "eig", "KcfBlock", "Kcf", "SkewBlock", "SkewKcf",
    "EigStruct", "Pencil", "MatPoly", "build_block", "realize_kcf",
    "realize_skew_kcf", "skew_to_kcf", "eigstruct_of_kcf", "kcf_of_eigstruct",
    "index_sum_check", "direct_sum",
]


@dataclass(frozen=True)
class Eigenvalue:
    """A point of the extended complex plane, or a symbolic placeholder.

    Exactly one of ``value``, ``label`` or ``infinite`` is set.  Equality is
    exact; use :meth:`close_to` for tolerance comparisons.
    """

    value: complex | None = None
    label: str | None = None
    infinite: bool = False

    def __post_init__(self):
        set_fields = (self.value is not None) + (self.label is not None) + bool(self.infinite)
        if set_fields != 1:
            raise ValueError("an eigenvalue is exactly one of: value, label, infinite")
        if self.value is not None:
            v = complex(self.value)
            if not (cmath.isfinite(v)):
                raise ValueError("use INF for the infinite eigenvalue")
            object.__setattr__(self, "value", v)

    @property
    def is_symbolic(self) -> bool:
        return self.label is not None

    @property
    def is_infinite(self) -> bool:
        return self.infinite

    def sort_key(self):
        if self.value is not None:
            return (0, self.value.real, self.value.imag, "")
        if self.label is not None:
            return (1, 0.0, 0.0, self.label)
        return (2, 0.0, 0.0, "")

    def close_to(self, other: "Eigenvalue", tol: float = 0.0) -> bool:
        if self.value is not None and other.value is not None:
            return abs(self.value - other.value) <= tol
        return self == other

    def __str__(self):
        if self.infinite:
            return "inf"
        if self.label is not None:
            return self.label
        v = self.value
        if v.imag == 0:
            return repr(v.real)
        return f"{v.real!r}{v.imag:+}j"


INF = Eigenvalue(infinite=True)


def eig(x) -> Eigenvalue:
    """Coerce numbers, ``"inf"`` and label strings to :class:`Eigenvalue`."""
    if isinstance(x, Eigenvalue):
        return x
    if isinstance(x, str):
        if x in ("inf", "oo", "∞"):
            return INF
        try:
            return Eigenvalue(value=complex(x.replace(" ", "")))
        except ValueError:
            return Eigenvalue(label=x)
    if isinstance(x, (int, float, complex, np.number)):
        z = complex(x)
        if cmath.isinf(z.real) or cmath.isinf(z.imag):
            return INF
        return Eigenvalue(value=z)
    raise TypeError(f"cannot interpret {x!r} as an eigenvalue")


_KCF_ORDER = {"E": 0, "L": 1, "LT": 2}
_SKEW_ORDER = {"H": 0, "K": 1, "M": 2}


@dataclass(frozen=True)
class KcfBlock:
    kind: str
    k: int
    eig: Eigenvalue | None = None

    def __post_init__(self):
        if self.kind not in _KCF_ORDER:
            raise ValueError(f"unknown KCF block kind {self.kind!r}")
        if self.kind == "E":
            if self.k < 1:
                raise ValueError("E blocks need size k >= 1")
            if self.eig is None:
                raise ValueError("E blocks carry an eigenvalue")
        else:
            if self.k < 0:
                raise ValueError("L/LT blocks need index k >= 0")
            if self.eig is not None:
                raise ValueError("L/LT blocks carry no eigenvalue")

    @classmethod
    def E(cls, mu, k: int) -> "KcfBlock":
        return cls("E", k, eig(mu))

    @classmethod
    def L(cls, k: int) -> "KcfBlock":
        return cls("L", k)

    @classmethod
    def LT(cls, k: int) -> "KcfBlock":
        return cls("LT", k)

    @property
    def shape(self) -> tuple[int, int]:
        if self.kind == "E":
            return (self.k, self.k)
        if self.kind == "L":
            return (self.k, self.k + 1)
        return (self.k + 1, self.k)

    @property
    def rank(self) -> int:
        return self.k

    def sort_key(self):
        ek = self.eig.sort_key() if self.eig is not None else ()
        return (_KCF_ORDER[self.kind], self.k, ek)

    def __str__(self):
        if self.kind == "E":
            return f"E_{self.k}({self.eig})"
        return f"{self.kind}_{self.k}"


class _BlockMultiset:
    """Shared behaviour of canonical forms: a sorted, hashable block tuple."""

    __slots__ = ("blocks",)
    _block_type: type

    def __init__(self, blocks: Iterable = ()):
        blocks = tuple(blocks)
        for b in blocks:
            if not isinstance(b, self._block_type):
                raise TypeError(f"expected {self._block_type.__name__}, got {b!r}")
        object.__setattr__(self, "blocks", tuple(sorted(blocks, key=lambda b: b.sort_key())))

    def __setattr__(self, name, value):
        raise AttributeError("canonical forms are immutable")

    def __eq__(self, other):
        return type(self) is type(other) and self.blocks == other.blocks

    def __hash__(self):
        return hash((type(self).__name__, self.blocks))

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self):
        return len(self.blocks)

    def counts(self) -> Counter:
        return Counter(self.blocks)

    def eigenvalues(self) -> set[Eigenvalue]:
        return {b.eig for b in self.blocks if b.eig is not None}

    def __repr__(self):
        return f"{type(self).__name__}({{{', '.join(map(str, self.blocks))}}})"

    __str__ = __repr__


class Kcf(_BlockMultiset):
    """Kronecker canonical form as a multiset of :class:`KcfBlock`."""

    __slots__ = ()
    _block_type = KcfBlock

    @property
    def rows(self) -> int:
        return sum(b.shape[0] for b in self.blocks)

    @property
    def cols(self) -> int:
        return sum(b.shape[1] for b in self.blocks)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def rank(self) -> int:
        return sum(b.k for b in self.blocks)

    def indices(self, kind: str) -> list[int]:
        return sorted(b.k for b in self.blocks if b.kind == kind)

    def is_skew_shaped(self) -> bool:
        """True if L/LT indices pair up and every E block occurs an even number of times."""
        if self.indices("L") != self.indices("LT"):
            return False
        return all(c % 2 == 0 for b, c in self.counts().items() if b.kind == "E")


@dataclass(frozen=True)
class SkewBlock:
    kind: str
    k: int
    eig: Eigenvalue | None = None

    def __post_init__(self):
        if self.kind not in _SKEW_ORDER:
            raise ValueError(f"unknown skew block kind {self.kind!r}")
        if self.kind == "H":
            if self.k < 1:
                raise ValueError("H blocks need h >= 1")
            if self.eig is None or self.eig.is_infinite:
                raise ValueError("H blocks carry a finite (or symbolic) eigenvalue")
        elif self.kind == "K":
            if self.k < 1 or self.eig is not None:
                raise ValueError("K blocks need k >= 1 and no eigenvalue")
        elif self.k < 0 or self.eig is not None:
            raise ValueError("M blocks need m >= 0 and no eigenvalue")

    @classmethod
    def H(cls, mu, h: int) -> "SkewBlock":
        return cls("H", h, eig(mu))

    @classmethod
    def K(cls, k: int) -> "SkewBlock":
        return cls("K", k)

    @classmethod
    def M(cls, m: int) -> "SkewBlock":
        return cls("M", m)

    @property
    def size(self) -> int:
        return 2 * self.k + 1 if self.kind == "M" else 2 * self.k

    @property
    def rank(self) -> int:
        return 2 * self.k

    def sort_key(self):
        ek = self.eig.sort_key() if self.eig is not None else ()
        return (_SKEW_ORDER[self.kind], self.k, ek)

    def __str__(self):
        if self.kind == "H":
            return f"H_{self.k}({self.eig})"
        return f"{self.kind}_{self.k}"


class SkewKcf(_BlockMultiset):
    """Skew-symmetric canonical form under congruence."""

    __slots__ = ()
    _block_type = SkewBlock

    @property
    def n(self) -> int:
        return sum(b.size for b in self.blocks)

    @property
    def rank(self) -> int:
        return sum(b.rank for b in self.blocks)

    def indices(self, kind: str) -> list[int]:
        return sorted(b.k for b in self.blocks if b.kind == kind)


@dataclass(frozen=True)
class EigStruct:
    """Complete eigenstructure: elementary divisors plus minimal indices."""

    finite_divisors: tuple = ()
    infinite_degrees: tuple = ()
    right_minimal: tuple = ()
    left_minimal: tuple = ()
    skew: bool = False

    def __post_init__(self):
        fin = tuple(sorted(((eig(mu), int(deg)) for mu, deg in self.finite_divisors),
                           key=lambda p: (p[0].sort_key(), p[1])))
        if any(mu.is_infinite for mu, _ in fin):
            raise ValueError("infinite divisors belong in infinite_degrees")
        object.__setattr__(self, "finite_divisors", fin)
        object.__setattr__(self, "infinite_degrees", tuple(sorted(int(x) for x in self.infinite_degrees)))
        object.__setattr__(self, "right_minimal", tuple(sorted(int(x) for x in self.right_minimal)))
        object.__setattr__(self, "left_minimal", tuple(sorted(int(x) for x in self.left_minimal)))
        if any(d < 1 for _, d in fin) or any(d < 1 for d in self.infinite_degrees):
            raise ValueError("divisor degrees must be >= 1")
        if any(e < 0 for e in self.right_minimal + self.left_minimal):
            raise ValueError("minimal indices must be >= 0")
        if self.skew:
            if self.left_minimal != self.right_minimal:
                raise ValueError("skew structure needs equal left and right minimal indices")
            odd = [p for p, c in Counter(fin).items() if c % 2]
            odd += [("inf", d) for d, c in Counter(self.infinite_degrees).items() if c % 2]
            if odd:
                raise ValueError(f"skew structure needs paired divisors, unpaired: {odd}")

    @property
    def divisor_degree_sum(self) -> int:
        return sum(d for _, d in self.finite_divisors) + sum(self.infinite_degrees)


def index_sum_check(e: EigStruct, grade: int, rank: int) -> bool:
    """Check ``sum(divisor degrees) + sum(eps) + sum(eta) == grade * rank``."""
    total = e.divisor_degree_sum + sum(e.right_minimal) + sum(e.left_minimal)
    return total == grade * rank


# -- dense matrices -----------------------------------------------------------

def _jordan(k: int, mu: complex) -> np.ndarray:
    return mu * np.eye(k, dtype=complex) + np.eye(k, k=1, dtype=complex)


def _F(k: int) -> np.ndarray:
    return np.eye(k, k + 1, k=1, dtype=complex)


def _G(k: int) -> np.ndarray:
    return np.eye(k, k + 1, dtype=complex)


def _wedge(X: np.ndarray) -> np.ndarray:
    """``[[0, X], [-X^T, 0]]`` for a p-by-q matrix X."""
    p, q = X.shape
    out = np.zeros((p + q, p + q), dtype=complex)
    out[:p, p:] = X
    out[p:, :p] = -X.T
    return out


def direct_sum(mats: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(M.shape[0] for M in mats)
    cols = sum(M.shape[1] for M in mats)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for M in mats:
        out[r:r + M.shape[0], c:c + M.shape[1]] = M
        r += M.shape[0]
        c += M.shape[1]
    return out


@dataclass(frozen=True, eq=False)
class Pencil:
    """Dense pencil ``lambda*A - B``."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        B = np.asarray(self.B, dtype=complex)
        if A.ndim != 2 or A.shape != B.shape:
            raise ValueError(f"pencil coefficients must share a 2-D shape, got {A.shape} and {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def is_skew(self) -> bool:
        return bool(np.array_equal(self.A, -self.A.T) and np.array_equal(self.B, -self.B.T))

    def __call__(self, lam) -> np.ndarray:
        return lam * self.A - self.B

    def to_matpoly(self) -> "MatPoly":
        return MatPoly((-self.B, self.A))


@dataclass(frozen=True, eq=False)
class MatPoly:
    """Matrix polynomial ``sum_i lambda**i * coeffs[i]`` of declared grade ``len(coeffs)-1``."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(np.asarray(c, dtype=complex) for c in self.coeffs)
        if len(cs) < 2:
            raise ValueError("grade must be at least 1")
        shape = cs[0].shape
        if len(shape) != 2 or any(c.shape != shape for c in cs):
            raise ValueError("all coefficients must share one 2-D shape")
        object.__setattr__(self, "coeffs", cs)

    @property
    def grade(self) -> int:
        return len(self.coeffs) - 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs[0].shape

    def __call__(self, lam) -> np.ndarray:
        out = np.zeros(self.shape, dtype=complex)
        for c in reversed(self.coeffs):
            out = out * lam + c
        return out

    def is_skew(self) -> bool:
        return all(np.array_equal(c, -c.T) for c in self.coeffs)

    @property
    def T(self) -> "MatPoly":
        return MatPoly(tuple(c.T for c in self.coeffs))

    def to_pencil(self) -> Pencil:
        if self.grade != 1:
            raise ValueError(f"grade {self.grade} polynomial is not a pencil")
        return Pencil(self.coeffs[1], -self.coeffs[0])

    def distance(self, other: "MatPoly") -> float:
        if self.grade != other.grade or self.shape != other.shape:
            raise ValueError("distance needs equal grade and size")
        return float(np.sqrt(sum(np.linalg.norm(a - b) ** 2 for a, b in zip(self.coeffs, other.coeffs))))


def _as_matpoly(p) -> MatPoly:
    return p.to_matpoly() if isinstance(p, Pencil) else p


# -- realizations ---------------------------------------------------------------

def _numeric_value(mu: Eigenvalue) -> complex:
    if mu.is_symbolic:
        raise ValueError(f"unrealizable symbolic eigenvalue {mu.label!r}")
    return mu.value


def build_block(block: KcfBlock | SkewBlock) -> Pencil:
    """Dense pencil of a single canonical block."""
    k = block.k
    if isinstance(block, KcfBlock):
        if block.kind == "E":
            if block.eig.is_infinite:
                return Pencil(_jordan(k, 0), np.eye(k))
            return Pencil(np.eye(k), _jordan(k, _numeric_value(block.eig)))
        if block.kind == "L":
            return Pencil(_G(k), _F(k))
        return Pencil(_G(k).T, _F(k).T)
    if block.kind == "H":
        return Pencil(_wedge(np.eye(k)), _wedge(_jordan(k, _numeric_value(block.eig))))
    if block.kind == "K":
        return Pencil(_wedge(_jordan(k, 0)), _wedge(np.eye(k)))
    return Pencil(_wedge(_G(k)), _wedge(_F(k)))


def _realize(blocks) -> Pencil:
    parts = [build_block(b) for b in blocks]
    return Pencil(direct_sum([p.A for p in parts]), direct_sum([p.B for p in parts]))


def realize_kcf(kcf: Kcf) -> Pencil:
    return _realize(kcf.blocks)


def realize_skew_kcf(s: SkewKcf) -> Pencil:
    return _realize(s.blocks)


def skew_to_kcf(s: SkewKcf) -> Kcf:
    out = []
    for b in s:
        if b.kind == "H":
            out += [KcfBlock.E(b.eig, b.k)] * 2
        elif b.kind == "K":
            out += [KcfBlock.E(INF, b.k)] * 2
        else:
            out += [KcfBlock.L(b.k), KcfBlock.LT(b.k)]
    return Kcf(out)


def kcf_to_skew(kcf: Kcf) -> SkewKcf:
    """Inverse of :func:`skew_to_kcf`; raises if the KCF is not skew-shaped."""
    if not kcf.is_skew_shaped():
        raise ValueError(f"{kcf} is not the KCF of a skew-symmetric pencil")
    out = [SkewBlock.M(k) for k in kcf.indices("L")]
    for b, c in kcf.counts().items():
        if b.kind != "E":
            continue
        blk = SkewBlock.K(b.k) if b.eig.is_infinite else SkewBlock.H(b.eig, b.k)
        out += [blk] * (c // 2)
    return SkewKcf(out)


def eigstruct_of_kcf(kcf: Kcf, grade: int = 1, skew: bool = False) -> EigStruct:
    if grade != 1:
        raise ValueError("a KCF describes a pencil; grade must be 1")
    fin = [(b.eig, b.k) for b in kcf if b.kind == "E" and not b.eig.is_infinite]
    inf = [b.k for b in kcf if b.kind == "E" and b.eig.is_infinite]
    return EigStruct(fin, inf, kcf.indices("L"), kcf.indices("LT"), skew=skew)


def kcf_of_eigstruct(e: EigStruct) -> Kcf:
    blocks = [KcfBlock.E(mu, d) for mu, d in e.finite_divisors]
    blocks += [KcfBlock.E(INF, d) for d in e.infinite_degrees]
    blocks += [KcfBlock.L(k) for k in e.right_minimal]
    blocks += [KcfBlock.LT(k) for k in e.left_minimal]
    return Kcf(blocks)
