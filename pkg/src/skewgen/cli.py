"""Command-line front end.

Output is JSON on stdout unless ``--format`` says otherwise.  Exit codes:
0 on success or match, 1 on mismatch / not dominated / tolerance
inconsistency, 2 on usage errors and malformed input.

Every flag can also be set through an environment variable ``SKEWGEN_<FLAG>``
(e.g. ``SKEWGEN_TOL``, ``SKEWGEN_EIG_BUDGET``); a flag on the command line wins.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import canon, formats
from .closure import dominates, enumerate_skew_kcfs, skew_dominates, strata_dag
from .generic import (codim_closed_form, codim_poly, codim_sum_formula, generic_skew_pencil,
                      generic_skew_poly)
from .linearize import NotInGsyl, linearize
from .numeric import ToleranceInconsistency, ToleranceModel, recover

ENV_PREFIX = "SKEWGEN_"

# flag -> (type, default)
_FLAGS = {
    "tol": (float, 1e-10),
    "seed": (int, 0),
    "trials": (int, None),
    "format": (str, None),
    "out": (str, None),
    "eig_budget": (int, None),
    "depth_cap": (int, None),
}


class UsageError(Exception):
    pass


def _env_default(name):
    typ, default = _FLAGS[name]
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None or raw == "":
        return default
    try:
        return typ(raw)
    except ValueError:
        raise UsageError(f"{ENV_PREFIX}{name.upper()}={raw!r} is not a valid {typ.__name__}")


def _common(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the flags with suppressed defaults so a flag given
    # before the subcommand is not overwritten by the subparser
    def dflt(name):
        return argparse.SUPPRESS if suppress else _env_default(name)

    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--tol", type=float, default=dflt("tol"),
                   help="relative singular-value threshold for rank decisions")
    g.add_argument("--seed", type=int, default=dflt("seed"), help="master RNG seed")
    g.add_argument("--trials", type=int, default=dflt("trials"), help="Monte-Carlo trials")
    g.add_argument("--format", choices=("json", "text", "dot"), default=dflt("format"))
    g.add_argument("--out", default=dflt("out"), help="write output here instead of stdout")
    g.add_argument("--eig-budget", type=int, default=dflt("eig_budget"),
                   help="fresh eigenvalues rule 6 may introduce (default n+1)")
    g.add_argument("--depth-cap", type=int, default=dflt("depth_cap"),
                   help="maximum rule applications in a dominance search (default 4n)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    ap = argparse.ArgumentParser(prog="skewgen", parents=[_common(suppress=False)],
                                 description="Canonical structures of skew-symmetric pencils "
                                             "and odd-grade matrix polynomials.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help):
        return sub.add_parser(name, help=help, parents=[common], description=help)

    p = add("block", "realize a single canonical block as a pencil")
    p.add_argument("kind", choices=("E", "L", "LT", "H", "K", "M"))
    p.add_argument("k", type=int)
    p.add_argument("mu", nargs="?", default=None,
                   help="eigenvalue for E/H blocks: a complex number or 'inf'")

    p = add("realize", "realize a skew KCF or KCF file as a pencil")
    p.add_argument("file")

    p = add("generic-pencil", "most generic skew form of size n and rank <= 2w")
    p.add_argument("n", type=int)
    p.add_argument("w", type=int)

    p = add("generic-poly", "generic eigenstructure of m x m grade-d skew polynomials of rank <= 2r")
    p.add_argument("m", type=int)
    p.add_argument("r", type=int)
    p.add_argument("d", type=int)

    p = add("codim", "orbit codimension: 'pencil n w', 'poly m r d' or 'sum FILE'")
    p.add_argument("what", choices=("pencil", "poly", "sum"))
    p.add_argument("args", nargs="+")

    p = add("closure-check", "does TARGET dominate SOURCE (is SOURCE in its orbit closure)?")
    p.add_argument("target")
    p.add_argument("source")

    p = add("enumerate", "all skew forms of size n and rank <= maxrank")
    p.add_argument("n", type=int)
    p.add_argument("maxrank", type=int)
    p.add_argument("--labels", type=int, default=3, help="distinct symbolic eigenvalues")

    p = add("strata-dag", "covering graph of the dominance order (DOT)")
    p.add_argument("n", type=int)
    p.add_argument("maxrank", type=int)
    p.add_argument("--labels", type=int, default=2, help="distinct symbolic eigenvalues")

    p = add("linearize", "skew companion pencil of an odd-grade skew polynomial")
    p.add_argument("file")

    p = add("analyze", "recover rank, minimal indices and divisor degree numerically")
    p.add_argument("file")

    p = add("experiment", "Monte-Carlo experiment: 'pencil n w', 'poly m r d' or 'linearization m r d'")
    p.add_argument("kind", choices=("pencil", "poly", "linearization"))
    p.add_argument("params", type=int, nargs="+")
    p.add_argument("--min-rate", type=float, default=None,
                   help="match rate needed for exit 0 (default 0.99, linearization 0.98)")

    p = add("verify", "run the acceptance suite")
    p.add_argument("--only", type=int, nargs="+", default=None, metavar="N")
    return ap


# -- handlers: each returns (exit code, payload, text) ------------------------


def _need(n, args, shape):
    if len(args) != n:
        raise UsageError(f"expected {shape}")
    try:
        return [int(a) for a in args]
    except ValueError:
        raise UsageError(f"expected integers: {shape}")


def _tol(a):
    return ToleranceModel(rel_tol=a.tol)


def _pencil_json(p: canon.Pencil):
    return formats.matpoly_to_json(p.to_matpoly())


def _pencil_text(p: canon.Pencil):
    with np.printoptions(precision=6, suppress=True, linewidth=120):
        return f"A =\n{p.A}\nB =\n{p.B}"


def cmd_block(a):
    if a.kind in ("E", "H"):
        if a.mu is None:
            raise UsageError(f"{a.kind} block needs an eigenvalue")
        try:
            mu = canon.INF if a.mu == "inf" else canon.eig(complex(a.mu.replace("i", "j")))
        except ValueError:
            raise UsageError(f"cannot parse eigenvalue {a.mu!r}")
        if a.kind == "H" and mu.is_infinite:
            raise UsageError("the infinite eigenvalue lives in K blocks")
        b = canon.KcfBlock.E(mu, a.k) if a.kind == "E" else canon.SkewBlock.H(mu, a.k)
    else:
        if a.mu is not None:
            raise UsageError(f"{a.kind} blocks take no eigenvalue")
        cls = canon.SkewBlock if a.kind in ("K", "M") else canon.KcfBlock
        b = getattr(cls, a.kind)(a.k)
    p = canon.build_block(b)
    return 0, _pencil_json(p), f"{b}\n{_pencil_text(p)}"


def cmd_realize(a):
    form = formats.form_from_json(formats.load_json(a.file))
    try:
        p = canon.realize_skew_kcf(form) if isinstance(form, canon.SkewKcf) else canon.realize_kcf(form)
    except ValueError as exc:
        raise formats.InputError(f"{a.file}: {exc}")
    return 0, _pencil_json(p), _pencil_text(p)


def _skew_text(s):
    return " + ".join(map(str, s)) or "(empty)"


def cmd_generic_pencil(a):
    s = generic_skew_pencil(a.n, a.w)
    return 0, formats.skewkcf_to_json(s), _skew_text(s)


def cmd_generic_poly(a):
    e = generic_skew_poly(a.m, a.r, a.d)
    txt = f"right minimal indices {list(e.right_minimal)}\nleft minimal indices {list(e.left_minimal)}\nno elementary divisors"
    return 0, formats.eigstruct_to_json(e), txt


def cmd_codim(a):
    if a.what == "pencil":
        n, w = _need(2, a.args, "codim pencil n w")
        generic_skew_pencil(n, w)  # validates the range
        c = codim_closed_form(n, w)
    elif a.what == "poly":
        m, r, d = _need(3, a.args, "codim poly m r d")
        generic_skew_poly(m, r, d)
        c = codim_poly(m, r, d)
    else:
        if len(a.args) != 1:
            raise UsageError("expected: codim sum FILE")
        s = formats.skewkcf_from_json(formats.load_json(a.args[0]))
        c = codim_sum_formula(s)
    return 0, c, str(c)


def cmd_closure_check(a):
    t = formats.form_from_json(formats.load_json(a.target), "$")
    s = formats.form_from_json(formats.load_json(a.source), "$")
    if type(t) is not type(s):
        raise UsageError("target and source must both be skew KCFs or both be KCFs")
    fn = skew_dominates if isinstance(t, canon.SkewKcf) else dominates
    try:
        res = fn(t, s, a.eig_budget, a.depth_cap)
    except ValueError as exc:
        raise UsageError(str(exc))
    return (0 if res else 1), res.to_dict(), formats.certificate_text(res)


def cmd_enumerate(a):
    strata = enumerate_skew_kcfs(a.n, a.maxrank, a.labels)
    txt = "\n".join(f"{_skew_text(s)}    rank {s.rank}" for s in strata)
    return 0, [formats.skewkcf_to_json(s) for s in strata], txt


def cmd_strata_dag(a):
    strata, edges = strata_dag(a.n, a.maxrank, a.labels, a.eig_budget, a.depth_cap)
    payload = {"strata": [formats.skewkcf_to_json(s) for s in strata], "edges": [list(e) for e in edges]}
    txt = "\n".join(f"{_skew_text(strata[i])}  ->  {_skew_text(strata[j])}" for i, j in edges)
    return 0, payload, txt, formats.dag_to_dot(strata, edges)


def cmd_linearize(a):
    P = formats.matpoly_from_json(formats.load_json(a.file))
    try:
        g = linearize(P)
    except (ValueError, NotInGsyl) as exc:
        raise formats.InputError(f"{a.file}: {exc}")
    return 0, _pencil_json(g.pencil), _pencil_text(g.pencil)


def cmd_analyze(a):
    P = formats.matpoly_from_json(formats.load_json(a.file))
    rec = recover(P, _tol(a))
    d = rec.to_dict()
    txt = (f"normal rank {rec.normal_rank}\nright minimal indices {list(rec.right_minimal)}\n"
           f"left minimal indices {list(rec.left_minimal)}\n"
           f"divisor degree sum {rec.divisor_degree_sum}\nlow confidence {rec.low_confidence}")
    return 0, d, txt


def cmd_experiment(a):
    from .sampling import genericity_experiment, linearization_experiment
    if a.kind == "pencil":
        n, w = _need(2, a.params, "experiment pencil n w")
        trials = 100 if a.trials is None else a.trials
        rep = genericity_experiment("pencil", {"n": n, "w": w}, trials, _tol(a), a.seed)
    elif a.kind == "poly":
        m, r, d = _need(3, a.params, "experiment poly m r d")
        trials = 100 if a.trials is None else a.trials
        rep = genericity_experiment("poly", {"m": m, "r": r, "d": d}, trials, _tol(a), a.seed)
    else:
        m, r, d = _need(3, a.params, "experiment linearization m r d")
        trials = 50 if a.trials is None else a.trials
        rep = linearization_experiment(m, r, d, trials, _tol(a), a.seed)
    need = a.min_rate if a.min_rate is not None else (0.98 if a.kind == "linearization" else 0.99)
    ok = rep.rate >= need and rep.roundtrip_failures == 0
    lines = [f"{rep.kind} experiment ({rep.label}) {rep.params} seed={rep.seed}",
             f"matches {rep.matches}/{rep.trials} (need rate >= {need})",
             f"expected {rep.expected}",
             f"low-confidence trials {rep.low_confidence_trials}"]
    if rep.kind == "linearization":
        lines.append(f"round-trip failures {rep.roundtrip_failures}")
    lines += [f"mismatch {m}" for m in rep.mismatches]
    return (0 if ok else 1), rep.to_dict(), "\n".join(lines)


def cmd_verify(a):
    from .acceptance import run_all
    results = []
    for r in run_all(a.only, a.seed):
        results.append(r)
        if a.format != "json":
            print(r.line(), file=sys.stderr, flush=True)
    ok = all(r.passed for r in results)
    return (0 if ok else 1), [r.to_dict() for r in results], "\n".join(r.line() for r in results)


_HANDLERS = {
    "block": cmd_block, "realize": cmd_realize, "generic-pencil": cmd_generic_pencil,
    "generic-poly": cmd_generic_poly, "codim": cmd_codim, "closure-check": cmd_closure_check,
    "enumerate": cmd_enumerate, "strata-dag": cmd_strata_dag, "linearize": cmd_linearize,
    "analyze": cmd_analyze, "experiment": cmd_experiment, "verify": cmd_verify,
}


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv=None) -> int:
    try:
        ap = build_parser()
    except UsageError as exc:
        print(f"skewgen: {exc}", file=sys.stderr)
        return 2
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    fmt = a.format or ("dot" if a.command == "strata-dag" else "json")
    if fmt == "dot" and a.command != "strata-dag":
        print("skewgen: --format dot is only available for strata-dag", file=sys.stderr)
        return 2
    try:
        got = _HANDLERS[a.command](a)
    except (UsageError, formats.InputError) as exc:
        print(f"skewgen: {exc}", file=sys.stderr)
        return 2
    except ToleranceInconsistency as exc:
        payload = {"error": str(exc), "audit": [d.to_dict() for d in exc.audit]}
        print(f"skewgen: tolerance inconsistency: {exc}", file=sys.stderr)
        _emit(formats.dumps(payload), a.out)
        return 1
    except ValueError as exc:
        # range checks in the library (e.g. 2 <= 2w <= n-1)
        print(f"skewgen: {exc}", file=sys.stderr)
        return 2
    code, payload, text = got[:3]
    if fmt == "json":
        _emit(formats.dumps(payload), a.out)
    elif fmt == "text":
        _emit(text, a.out)
    else:
        _emit(got[3], a.out)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
