"""Command-line interface: ``polyinv <command> LOOP [options]``.

Exit status is 0 for a True verdict (or plain success), 1 for False and
2 for any error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from . import __version__
from .general import general_invariants
from .generate import compute_matrix, init_names, truncated_class, truncated_ideal, unrolling_oracle
from .invariants import DEFAULT_MAX_ITER, IterationLimitExceeded, check_pi_report
from .loop import CandidateSpace, LoopSyntaxError, SymbolicInitRequiredConcrete, load_loop, unroll
from .poly import (ContextError, PolySyntaxError, format_poly,
                   parse_poly)
from .termination import never_terminates_algebraic

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, payload, text_lines):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(text_lines))


def _space(L, degree):
    if degree is None:
        raise UsageError("--degree is required")
    if degree < 0:
        raise UsageError("--degree must be >= 0")
    return list(CandidateSpace.degree(L.ctx, degree).generators)


def _plain(L):
    if L.inequalities:
        raise UsageError("not supported: requires quantifier elimination "
                         f"(inequality guard {L.inequalities[0]!r})")
    if L.equations:
        raise UsageError("equation guards (p = 0) are only meaningful for 'terminate'")


def _first_failure(L, g, steps=30):
    """First iterate where g is nonzero, single-branch loops only."""
    if L.is_branching:
        return None
    try:
        for k, st in enumerate(unroll(L, None, [0] * steps)):
            if g.evaluate(st.point):
                return k, st.point
            if not st.guard:
                return None
            if any(v.numerator.bit_length() > 4096 for v in st.point):
                return None
    except ArithmeticError:
        return None
    return None


def cmd_check(args):
    L = load_loop(args.loop)
    _plain(L)
    a = L.require_init()
    g = parse_poly(args.poly, L.ctx)
    rep = check_pi_report(a, g, list(L.guards), [list(F) for F in L.branches], args.max_iter)
    payload = {"verdict": rep.holds, "iterations": rep.iterations}
    lines = ["True" if rep.holds else "False"]
    if not rep.holds:
        payload["violated"] = format_poly(rep.violated)
        payload["value"] = str(rep.value)
        lines.append(f"violated: {format_poly(rep.violated)} = {rep.value} at a")
        hit = _first_failure(L, g)
        if hit:
            k, pt = hit
            payload["step"] = k
            payload["point"] = [str(v) for v in pt]
            lines.append(f"step {k}: g({', '.join(str(v) for v in pt)}) != 0")
    _emit(args, payload, lines)
    return EXIT_TRUE if rep.holds else EXIT_FALSE


def cmd_generate(args):
    L = load_loop(args.loop)
    _plain(L)
    if L.is_symbolic:
        raise SymbolicInitRequiredConcrete(
            "generate needs concrete initial values; use 'matrix' or 'classify' for 'init symbolic'")
    gs = _space(L, args.degree)
    res = truncated_ideal(L.init, gs, list(L.guards), [list(F) for F in L.branches], args.max_iter,
                          method=args.method, word_cap=args.word_cap)
    basis = [format_poly(b) for b in res.basis]
    payload = {"degree": args.degree, "dimension": res.dimension, "basis": basis,
               "stage3_used": res.stage3_used, "iterations": res.iterations}
    lines = [f"degree: {args.degree}", f"dimension: {res.dimension}",
             f"stage3_used: {str(res.stage3_used).lower()}", f"iterations: {res.iterations}",
             "basis:"] + [f"  {b}" for b in basis]
    if not res.certified:
        lines.append("warning: completeness not certified")
    if args.oracle_depth:
        bad = unrolling_oracle(L, res.basis, args.oracle_depth, random.Random(args.seed))
        if bad:
            raise RuntimeError(f"unrolling oracle found {len(bad)} violation(s), first: {bad[0]}")
        lines.append(f"oracle: ok to depth {args.oracle_depth}")
    _emit(args, payload, lines)
    return EXIT_TRUE


def cmd_general(args):
    L = load_loop(args.loop)
    _plain(L)
    if any(not h for h in L.guards):
        raise UsageError("guard is identically zero: the loop body never runs, so the invariants "
                         "from a are exactly the polynomials vanishing at a (the maximal ideal)")
    gs = _space(L, args.degree)
    invs = general_invariants(gs, [list(F) for F in L.branches])
    names = init_names(L.ctx)
    strs = [inv.symbolic(names) for inv in invs]
    payload = {"degree": args.degree, "dimension": len(invs), "invariants": strs}
    _emit(args, payload, [f"degree: {args.degree}", f"dimension: {len(invs)}", "invariants:"]
          + [f"  {s}" for s in strs])
    return EXIT_TRUE


def cmd_matrix(args):
    L = load_loop(args.loop)
    _plain(L)
    gs = _space(L, args.degree)
    am = compute_matrix(gs, list(L.guards), [list(F) for F in L.branches], args.max_iter)
    rows = am.matrix.to_strings()
    payload = {"degree": args.degree, "generators": [format_poly(g) for g in gs],
               "rows": len(rows), "cols": len(gs), "iterations": am.iterations, "matrix": rows}
    lines = [f"generators: {', '.join(format_poly(g) for g in gs)}",
             f"shape: {len(rows)} x {len(gs)}", f"iterations: {am.iterations}"]
    lines += ["[" + ", ".join(r) + "]" for r in rows]
    _emit(args, payload, lines)
    return EXIT_TRUE


def cmd_classify(args):
    L = load_loop(args.loop)
    _plain(L)
    gs = _space(L, args.degree)
    cells = truncated_class(gs, list(L.guards), [list(F) for F in L.branches], args.max_iter)
    out, lines = [], [f"cells: {len(cells)}"]
    for k, c in enumerate(cells, 1):
        eqs = [format_poly(e) for e in c.equations]
        tpl = [format_poly(t) for t in c.templates]
        out.append({"equations": eqs, "inequation": format_poly(c.inequation), "rank": c.rank,
                    "kernel": c.Z.to_strings(), "basis": tpl})
        cond = [f"{e} = 0" for e in eqs]
        if not c.inequation.is_constant():
            cond.append(f"{format_poly(c.inequation)} != 0")
        lines.append(f"cell {k}: " + (", ".join(cond) or "all initial values"))
        lines.append(f"  dimension: {len(tpl)}")
        lines += [f"  {t}" for t in tpl]
    _emit(args, {"degree": args.degree, "variables": init_names(L.ctx), "cells": out}, lines)
    return EXIT_TRUE


def cmd_terminate(args):
    L = load_loop(args.loop)
    if L.inequalities:
        raise UsageError("not supported: requires quantifier elimination "
                         f"(inequality guard {L.inequalities[0]!r})")
    if L.guards:
        raise UsageError("terminate expects an algebraic loop: write guards as 'guard p = 0'")
    if L.is_branching:
        raise UsageError("terminate handles single-branch loops")
    a = L.require_init()
    v = never_terminates_algebraic(a, list(L.equations), list(L.branches[0]), args.max_iter)
    payload = {"verdict": v.verdict, "witness": v.witness_json()}
    lines = [v.verdict]
    if v.witness:
        p, val = v.witness
        lines.append(f"witness: {format_poly(p)} = {val} at a")
    _emit(args, payload, lines)
    return EXIT_TRUE if v.never_terminates else EXIT_FALSE


def build_parser():
    ap = argparse.ArgumentParser(prog="polyinv", description="Polynomial invariants of polynomial loops.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, degree=False):
        p.add_argument("loop", help="loop file")
        if degree:
            p.add_argument("--degree", type=int, required=True, help="degree bound of the candidate space")
        p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER,
                       help="fixpoint iteration budget (default %(default)s)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
        p.add_argument("--word-cap", type=int, default=10_000,
                       help="maximum number of branch words in the constraint stage")
        p.add_argument("--oracle-depth", type=int, default=0,
                       help="after generating, verify along unrolled trajectories to this depth")
        return p

    p = common(sub.add_parser("check", help="decide whether a polynomial is an invariant"))
    p.add_argument("poly", help="candidate polynomial")
    p.set_defaults(func=cmd_check)
    p = common(sub.add_parser("generate", help="basis of invariants up to a degree"), degree=True)
    p.add_argument("--method", choices=("auto", "exact", "modular"), default="auto")
    p.set_defaults(func=cmd_generate)
    common(sub.add_parser("general", help="invariants f(x) - f(a) for all a"), degree=True) \
        .set_defaults(func=cmd_general)
    common(sub.add_parser("matrix", help="ansatz matrix for symbolic initial values"), degree=True) \
        .set_defaults(func=cmd_matrix)
    common(sub.add_parser("classify", help="cells of initial values with invariant bases"), degree=True) \
        .set_defaults(func=cmd_classify)
    common(sub.add_parser("terminate", help="non-termination of an algebraic loop")) \
        .set_defaults(func=cmd_terminate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_iter < 1:
        print("error: --max-iter must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (OSError, LoopSyntaxError, PolySyntaxError, ContextError, SymbolicInitRequiredConcrete,
            IterationLimitExceeded, UsageError, RuntimeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
