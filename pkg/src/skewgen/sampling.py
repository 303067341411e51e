"""Random bounded-rank skew pencils/polynomials and Monte-Carlo experiments.

Samples are congruent to a wedge ``[[0, R], [-R^T, 0]]`` with a random
rectangular ``R``; every skew pencil of rank at most ``2w`` has this shape up
to congruence, so the pencil family covers the whole bounded-rank set.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .canon import EigStruct, MatPoly, Pencil, eigstruct_of_kcf, skew_to_kcf
from .generic import GenericPencilParams, GenericPolyParams, generic_skew_pencil, generic_skew_poly
from .linearize import extract, linearize, predicted_indices
from .numeric import ToleranceInconsistency, ToleranceModel, recover

__all__ = [
    "ExperimentReport", "trial_rng", "sample_bounded_rank_skew_pencil",
    "sample_bounded_rank_skew_poly", "genericity_experiment", "linearization_experiment",
]

_MAX_COND = 1e8


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream per trial, so serial and parallel runs agree."""
    return np.random.default_rng([seed, trial])


def _cgauss(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _congruence(rng, n):
    while True:
        T = _cgauss(rng, n, n)
        if np.linalg.cond(T) < _MAX_COND:
            return T


def _wedge_congruent(R: np.ndarray, T: np.ndarray) -> np.ndarray:
    p, q = R.shape
    S = np.zeros((p + q, p + q), dtype=complex)
    S[:p, p:] = R
    S[p:, :p] = -R.T
    M = T.T @ S @ T
    # fl(a - b) == -fl(b - a), so this is skew entry by entry
    return (M - M.T) / 2


def sample_bounded_rank_skew_poly(m: int, r: int, d: int, rng: np.random.Generator) -> MatPoly:
    """Random ``m x m`` skew polynomial of grade ``d`` and rank at most ``2r``."""
    if not 2 <= 2 * r <= m - 1:
        raise ValueError(f"need 2 <= 2r <= m-1, got m={m}, r={r}")
    if d < 1:
        raise ValueError("grade must be positive")
    R = [_cgauss(rng, r, m - r) for _ in range(d + 1)]
    T = _congruence(rng, m)
    return MatPoly(tuple(_wedge_congruent(Ri, T) for Ri in R))


def sample_bounded_rank_skew_pencil(n: int, w: int, rng: np.random.Generator) -> Pencil:
    return sample_bounded_rank_skew_poly(n, w, 1, rng).to_pencil()


@dataclass
class ExperimentReport:
    kind: str
    params: dict
    seed: int
    trials: int = 0
    matches: int = 0
    expected: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)
    low_confidence_trials: int = 0
    label: str = "consistency check"
    roundtrip_failures: int = 0

    @property
    def rate(self) -> float:
        return self.matches / self.trials if self.trials else 1.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "label": self.label, "params": self.params,
            "seed": self.seed, "trials": self.trials, "matches": self.matches,
            "expected": self.expected, "mismatches": self.mismatches,
            "tolerance_audit": {"low_confidence_trials": self.low_confidence_trials},
            **({"roundtrip_failures": self.roundtrip_failures} if self.kind == "linearization" else {}),
        }


def _structure(rec) -> dict:
    return {"rank": rec.normal_rank, "right": list(rec.right_minimal),
            "left": list(rec.left_minimal), "divisor_degree_sum": rec.divisor_degree_sum}


def _expected_structure(kind, params) -> tuple[EigStruct, int]:
    if kind == "pencil":
        p = GenericPencilParams(params["n"], params["w"])
        return eigstruct_of_kcf(skew_to_kcf(generic_skew_pencil(p)), skew=True), 2 * p.w
    p = GenericPolyParams(params["m"], params["r"], params["d"])
    return generic_skew_poly(p), 2 * p.r


def genericity_experiment(kind: str, params: dict, trials: int,
                          tol: ToleranceModel = ToleranceModel(), seed: int = 0) -> ExperimentReport:
    """Sample, recover and compare with the predicted generic structure.

    ``kind`` is ``"pencil"`` (params ``n, w``) or ``"poly"`` (params ``m, r, d``).
    """
    if kind not in ("pencil", "poly"):
        raise ValueError(f"unknown experiment kind {kind!r}")
    want, rank = _expected_structure(kind, params)
    expected = {"rank": rank, "right": list(want.right_minimal),
                "left": list(want.left_minimal), "divisor_degree_sum": 0}
    rep = ExperimentReport(kind, dict(params), seed, expected=expected,
                           label="proof-backed check" if kind == "pencil" else "consistency check")
    for i in range(trials):
        rng = trial_rng(seed, i)
        if kind == "pencil":
            sample = sample_bounded_rank_skew_pencil(params["n"], params["w"], rng)
        else:
            sample = sample_bounded_rank_skew_poly(params["m"], params["r"], params["d"], rng)
        rep.trials += 1
        try:
            got = recover(sample, tol)
        except ToleranceInconsistency as exc:
            rep.mismatches.append({"trial": i, "error": str(exc)})
            continue
        rep.low_confidence_trials += got.low_confidence
        if _structure(got) == expected:
            rep.matches += 1
        else:
            rep.mismatches.append({"trial": i, "recovered": _structure(got)})
    return rep


def linearization_experiment(m: int, r: int, d: int, trials: int,
                             tol: ToleranceModel = ToleranceModel(), seed: int = 0) -> ExperimentReport:
    """Compare minimal indices of ``linearize(P)`` with those of ``P`` shifted by ``(d-1)/2``."""
    GenericPolyParams(m, r, d)
    rep = ExperimentReport("linearization", {"m": m, "r": r, "d": d}, seed,
                           expected={"shift": (d - 1) // 2})
    for i in range(trials):
        P = sample_bounded_rank_skew_poly(m, r, d, trial_rng(seed, i))
        rep.trials += 1
        g = linearize(P)
        back = extract(g)
        if not all(np.array_equal(a, b) for a, b in zip(back.coeffs, P.coeffs)):
            rep.roundtrip_failures += 1
        try:
            base = recover(P, tol)
            lin = recover(g.pencil, tol)
        except ToleranceInconsistency as exc:
            rep.mismatches.append({"trial": i, "error": str(exc)})
            continue
        rep.low_confidence_trials += bool(base.low_confidence or lin.low_confidence)
        want = predicted_indices(base.right_minimal, d)
        if list(lin.right_minimal) == want and list(lin.left_minimal) == want:
            rep.matches += 1
        else:
            rep.mismatches.append({"trial": i, "polynomial": list(base.right_minimal),
                                   "linearization": list(lin.right_minimal), "predicted": want})
    return rep
