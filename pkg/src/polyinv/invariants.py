"""Invariant-set fixpoint and the polynomial-invariant checker.

For a map F and polynomials g, the invariant set of V(g) is cut out by
g, g∘F, g∘F², ... up to the first block that adds nothing to the radical.
A candidate g is an invariant of the loop from a exactly when (a, 1) lies
in the invariant set of V(z·g) under (F, z·h), where h is the guard.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .groebner import in_radical
from .poly import Polynomial, Q, VarContext, compose

log = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 50


class IterationLimitExceeded(RuntimeError):
    """The descending chain did not stabilize within the iteration budget."""

    def __init__(self, max_iter, partial):
        super().__init__(f"invariant set did not stabilize within {max_iter} iterations "
                         f"({len(partial)} polynomials so far)")
        self.max_iter = max_iter
        self.partial = partial


@dataclass
class InvariantSetResult:
    polys: list
    iterations: int
    blocks: list = field(default_factory=list)


def invariant_set(g: Sequence[Polynomial], F: Sequence[Polynomial],
                  max_iter: int = DEFAULT_MAX_ITER) -> InvariantSetResult:
    """S = g, g∘F, ..., g∘F^N with N the first index whose successor is redundant."""
    block = [p for p in g if p]
    if not block:
        return InvariantSetResult([], 0, [])
    if len(F) != len(block[0].ctx):
        raise ValueError(f"map has {len(F)} entries, context has {len(block[0].ctx)} variables")
    S = list(block)
    blocks = [list(block)]
    for N in range(max_iter + 1):
        nxt = [p for p in compose(block, F) if p]
        if in_radical(nxt, S):
            return InvariantSetResult(S, N, blocks)
        if N == max_iter:
            break
        S += nxt
        blocks.append(nxt)
        block = nxt
        log.debug("invariant_set: block %d has %d polynomials", N + 1, len(nxt))
    raise IterationLimitExceeded(max_iter, S)


def invariant_set_branch(g: Sequence[Polynomial], Fs: Sequence[Sequence[Polynomial]],
                         max_iter: int = DEFAULT_MAX_ITER) -> InvariantSetResult:
    """Fixpoint over several maps: each round composes the newest block with every map."""
    if len(Fs) == 1:
        return invariant_set(g, Fs[0], max_iter)
    block = [p for p in g if p]
    if not block:
        return InvariantSetResult([], 0, [])
    S = list(block)
    blocks = [list(block)]
    for N in range(max_iter + 1):
        fresh, seen = [], set(S)
        for F in Fs:
            for p in compose(block, F):
                if p and p not in seen:
                    seen.add(p)
                    fresh.append(p)
        if in_radical(fresh, S):
            return InvariantSetResult(S, N, blocks)
        if N == max_iter:
            break
        S += fresh
        blocks.append(fresh)
        block = fresh
    raise IterationLimitExceeded(max_iter, S)


# ---------------------------------------------------------------------------
# checking candidates

def _with_z(ctx: VarContext):
    name = "z"
    while name in ctx.index:
        name += "_"
    return ctx.extend(name)


def _guard(hs, ctx):
    h = Polynomial.constant(ctx, 1)
    for p in hs:
        h = h * p
    return h


def guarded_maps(Fs, hs, ext):
    """Each F_i extended by z ↦ z·h over the context ``ext``."""
    z = Polynomial.var(ext, len(ext) - 1)
    h = _guard(hs, Fs[0][0].ctx).embed(ext)
    return [[f.embed(ext) for f in F] + [z * h] for F in Fs]


@dataclass
class CheckReport:
    holds: bool
    polys: list                  # defining polynomials of the invariant set
    iterations: int
    violated: Polynomial | None = None
    value: mpq | None = None

    def __bool__(self):
        return self.holds


def _as_maps(F_or_Fs):
    # a single map is a sequence of Polynomials; several maps are nested
    if F_or_Fs and isinstance(F_or_Fs[0], Polynomial):
        return [list(F_or_Fs)]
    return [list(F) for F in F_or_Fs]


def check_pi_report(a, g: Polynomial, hs, F_or_Fs, max_iter=DEFAULT_MAX_ITER) -> CheckReport:
    Fs = _as_maps(F_or_Fs)
    if not g:
        return CheckReport(True, [], 0)
    ctx = g.ctx
    ext = _with_z(ctx)
    z = Polynomial.var(ext, len(ext) - 1)
    res = invariant_set_branch([z * g.embed(ext)], guarded_maps(Fs, hs, ext), max_iter)
    point = [Q(v) for v in a] + [mpq(1)]
    for p in res.polys:
        v = p.evaluate(point)
        if v:
            # report the violated polynomial in the program variables (z = 1)
            q = p.partial_evaluate({len(ctx): 1})
            q = Polynomial._raw(ctx, {m[:-1]: c for m, c in q.terms.items()})
            return CheckReport(False, res.polys, res.iterations, q, v)
    return CheckReport(True, res.polys, res.iterations)


def check_pi(a, g, hs, F, max_iter=DEFAULT_MAX_ITER) -> bool:
    """True iff g vanishes on every reachable state of the loop from a."""
    return check_pi_report(a, g, hs, F, max_iter).holds


def check_pi_branch(a, g, hs, Fs, max_iter=DEFAULT_MAX_ITER) -> bool:
    return check_pi_report(a, g, hs, [list(F) for F in Fs], max_iter).holds


@dataclass
class BatchReport:
    results: list
    iterations: int
    simultaneous: bool   # True when the joint test settled everything


def check_pi_batch_report(a, gs, hs, F_or_Fs, max_iter=DEFAULT_MAX_ITER) -> BatchReport:
    gs = list(gs)
    if not gs:
        return BatchReport([], 0, True)
    Fs = _as_maps(F_or_Fs)
    nonzero = [g for g in gs if g]
    if not nonzero:
        return BatchReport([True] * len(gs), 0, True)
    ctx = nonzero[0].ctx
    ext = _with_z(ctx)
    z = Polynomial.var(ext, len(ext) - 1)
    res = invariant_set_branch([z * g.embed(ext) for g in nonzero],
                               guarded_maps(Fs, hs, ext), max_iter)
    point = [Q(v) for v in a] + [mpq(1)]
    if all(not p.evaluate(point) for p in res.polys):
        return BatchReport([True] * len(gs), res.iterations, True)
    results, iters = [], res.iterations
    for g in gs:
        rep = check_pi_report(a, g, hs, Fs, max_iter)
        results.append(rep.holds)
        iters = max(iters, rep.iterations)
    return BatchReport(results, iters, False)


def check_pi_batch(a, gs, hs, F_or_Fs, max_iter=DEFAULT_MAX_ITER) -> list[bool]:
    return check_pi_batch_report(a, gs, hs, F_or_Fs, max_iter).results
