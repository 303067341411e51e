"""JSON interchange for eigenstructures, canonical forms, polynomials and certificates.

Eigenvalues appear as ``{"re": .., "im": ..}`` or, for symbolic
placeholders, ``{"label": ..}``.  Parsing errors raise :class:`InputError`
naming the offending position (line/column for bad JSON, a ``$.path`` for
schema problems).
"""
from __future__ import annotations

import json
from collections import defaultdict

import numpy as np

from .canon import INF, EigStruct, Eigenvalue, Kcf, KcfBlock, MatPoly, SkewBlock, SkewKcf

__all__ = [
    "InputError", "load_json", "dumps",
    "eig_to_json", "eig_from_json",
    "eigstruct_to_json", "eigstruct_from_json",
    "skewkcf_to_json", "skewkcf_from_json",
    "kcf_to_json", "kcf_from_json", "form_from_json",
    "matpoly_to_json", "matpoly_from_json",
    "certificate_text", "dag_to_dot",
]


class InputError(ValueError):
    """Malformed input; the message carries the position."""


def load_json(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


# -- field helpers ------------------------------------------------------------


def _get(d, key, path, kind=None):
    if not isinstance(d, dict):
        raise InputError(f"{path}: expected an object")
    if key not in d:
        raise InputError(f"{path}: missing field {key!r}")
    val = d[key]
    if kind is not None and not _is(val, kind):
        raise InputError(f"{path}.{key}: expected {kind}")
    return val


def _is(val, kind):
    if kind == "int":
        return isinstance(val, int) and not isinstance(val, bool)
    if kind == "number":
        return isinstance(val, (int, float)) and not isinstance(val, bool)
    if kind == "list":
        return isinstance(val, list)
    if kind == "str":
        return isinstance(val, str)
    raise AssertionError(kind)


def _int_list(val, path, lo=0):
    if not isinstance(val, list):
        raise InputError(f"{path}: expected a list of integers")
    for i, x in enumerate(val):
        if not _is(x, "int") or x < lo:
            raise InputError(f"{path}[{i}]: expected an integer >= {lo}")
    return list(val)


def _num(x):
    # -0.0 and integral floats print reproducibly this way
    x = float(x)
    return 0.0 if x == 0 else x


# -- eigenvalues --------------------------------------------------------------


def eig_to_json(mu: Eigenvalue) -> dict:
    if mu.is_symbolic:
        return {"label": mu.label}
    if mu.is_infinite:
        return {"inf": True}
    return {"re": _num(mu.value.real), "im": _num(mu.value.imag)}


def eig_from_json(d, path="$") -> Eigenvalue:
    if not isinstance(d, dict):
        raise InputError(f"{path}: expected an object")
    if "label" in d:
        return Eigenvalue(label=_get(d, "label", path, "str"))
    if d.get("inf") is True:
        return INF
    re = _get(d, "re", path, "number")
    im = d.get("im", 0.0)
    if not _is(im, "number"):
        raise InputError(f"{path}.im: expected number")
    return Eigenvalue(value=complex(re, im))


# -- eigenstructures ----------------------------------------------------------


def eigstruct_to_json(e: EigStruct) -> dict:
    by_eig = defaultdict(list)
    for mu, deg in e.finite_divisors:
        by_eig[mu].append(deg)
    finite = [dict(eig_to_json(mu), degrees=sorted(degs))
              for mu, degs in sorted(by_eig.items(), key=lambda kv: kv[0].sort_key())]
    return {"finite": finite, "infinite": list(e.infinite_degrees),
            "right": list(e.right_minimal), "left": list(e.left_minimal)}


def eigstruct_from_json(d, skew: bool = False, path="$") -> EigStruct:
    if not isinstance(d, dict):
        raise InputError(f"{path}: expected an object")
    fin = []
    for i, item in enumerate(d.get("finite", [])):
        p = f"{path}.finite[{i}]"
        mu = eig_from_json(item, p)
        fin += [(mu, k) for k in _int_list(_get(item, "degrees", p), p + ".degrees", 1)]
    try:
        return EigStruct(fin, _int_list(d.get("infinite", []), path + ".infinite", 1),
                         _int_list(d.get("right", []), path + ".right"),
                         _int_list(d.get("left", []), path + ".left"), skew=skew)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


# -- canonical forms ----------------------------------------------------------


def skewkcf_to_json(s: SkewKcf) -> dict:
    H = [dict(eig_to_json(b.eig), h=b.k) for b in s if b.kind == "H"]
    return {"H": H,
            "K": sorted(s.indices("K"), reverse=True),
            "M": sorted(s.indices("M"), reverse=True)}


def skewkcf_from_json(d, path="$") -> SkewKcf:
    if not isinstance(d, dict):
        raise InputError(f"{path}: expected an object")
    extra = set(d) - {"H", "K", "M"}
    if extra:
        raise InputError(f"{path}: unknown field(s) {sorted(extra)} in a skew KCF")
    blocks = []
    H = d.get("H", [])
    if not isinstance(H, list):
        raise InputError(f"{path}.H: expected a list")
    for i, item in enumerate(H):
        p = f"{path}.H[{i}]"
        h = _get(item, "h", p, "int")
        if h < 1:
            raise InputError(f"{p}.h: expected an integer >= 1")
        blocks.append(SkewBlock.H(eig_from_json(item, p), h))
    blocks += [SkewBlock.K(k) for k in _int_list(d.get("K", []), path + ".K", 1)]
    blocks += [SkewBlock.M(m) for m in _int_list(d.get("M", []), path + ".M")]
    return SkewKcf(blocks)


def kcf_to_json(k: Kcf) -> dict:
    E = [dict(eig_to_json(b.eig), k=b.k) for b in k if b.kind == "E"]
    return {"E": E, "L": k.indices("L"), "LT": k.indices("LT")}


def kcf_from_json(d, path="$") -> Kcf:
    if not isinstance(d, dict):
        raise InputError(f"{path}: expected an object")
    extra = set(d) - {"E", "L", "LT"}
    if extra:
        raise InputError(f"{path}: unknown field(s) {sorted(extra)} in a KCF")
    blocks = []
    E = d.get("E", [])
    if not isinstance(E, list):
        raise InputError(f"{path}.E: expected a list")
    for i, item in enumerate(E):
        p = f"{path}.E[{i}]"
        k = _get(item, "k", p, "int")
        if k < 1:
            raise InputError(f"{p}.k: expected an integer >= 1")
        blocks.append(KcfBlock.E(eig_from_json(item, p), k))
    blocks += [KcfBlock.L(k) for k in _int_list(d.get("L", []), path + ".L")]
    blocks += [KcfBlock.LT(k) for k in _int_list(d.get("LT", []), path + ".LT")]
    return Kcf(blocks)


def form_from_json(d, path="$") -> SkewKcf | Kcf:
    """A skew KCF (keys H/K/M) or a general KCF (keys E/L/LT)."""
    if isinstance(d, dict) and set(d) & {"E", "L", "LT"}:
        return kcf_from_json(d, path)
    return skewkcf_from_json(d, path)


# -- matrix polynomials -------------------------------------------------------


def matpoly_to_json(p: MatPoly) -> dict:
    m, n = p.shape
    out = {"m": m}
    if n != m:
        out["n"] = n
    out["d"] = p.grade
    out["coeffs"] = [[[[_num(z.real), _num(z.imag)] for z in row] for row in np.asarray(A, dtype=complex)]
                     for A in p.coeffs]
    return out


def _entry(z, path):
    if _is(z, "number"):
        return complex(z)
    if isinstance(z, list) and len(z) == 2 and all(_is(x, "number") for x in z):
        return complex(z[0], z[1])
    raise InputError(f"{path}: expected [re, im] or a number")


def matpoly_from_json(d, path="$") -> MatPoly:
    m = _get(d, "m", path, "int")
    n = d.get("n", m)
    deg = _get(d, "d", path, "int")
    coeffs = _get(d, "coeffs", path, "list")
    if not _is(n, "int") or m < 1 or n < 1:
        raise InputError(f"{path}: sizes must be positive integers")
    if deg < 1:
        raise InputError(f"{path}.d: grade must be at least 1")
    if len(coeffs) != deg + 1:
        raise InputError(f"{path}.coeffs: expected d+1 = {deg + 1} coefficients, got {len(coeffs)}")
    mats = []
    for c, A in enumerate(coeffs):
        p = f"{path}.coeffs[{c}]"
        if not isinstance(A, list) or len(A) != m:
            raise InputError(f"{p}: expected {m} rows")
        M = np.zeros((m, n), dtype=complex)
        for i, row in enumerate(A):
            if not isinstance(row, list) or len(row) != n:
                raise InputError(f"{p}[{i}]: expected {n} entries")
            for j, z in enumerate(row):
                M[i, j] = _entry(z, f"{p}[{i}][{j}]")
        mats.append(M)
    return MatPoly(tuple(mats))


# -- certificates and graphs --------------------------------------------------


def certificate_text(res) -> str:
    """Human-readable certificate: one step per line."""
    src = " + ".join(map(str, res.source)) or "(empty)"
    tgt = " + ".join(map(str, res.target)) or "(empty)"
    lines = [f"source: {src}", f"target: {tgt}"]
    if not res:
        lines.append(f"not dominated: {res.reason}")
    else:
        lines.append(f"dominated in {len(res)} step(s)")
        lines += [f"  {i + 1:3d}. {step}" for i, step in enumerate(res.steps)]
    st = res.stats
    lines.append(f"search: explored={st.explored} budget_bound={st.budget_bound} "
                 f"depth_bound={st.depth_bound} kernel={st.kernel}")
    return "\n".join(lines)


def _skew_label(s: SkewKcf) -> str:
    return " + ".join(map(str, s)) or "(empty)"


def dag_to_dot(strata, edges, name="strata") -> str:
    lines = [f"digraph {name} {{", "  rankdir=TB;", "  node [shape=box];"]
    for i, s in enumerate(strata):
        lines.append(f'  s{i} [label="{_skew_label(s)}\\nrank {s.rank}"];')
    for i, j in edges:
        lines.append(f"  s{i} -> s{j};")
    lines.append("}")
    return "\n".join(lines)
