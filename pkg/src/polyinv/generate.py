"""Invariants inside a finite candidate space E = span(g_1, ..., g_m).

* :func:`compute_matrix` builds the ansatz matrix A(x): for a concrete
  initial value a, ker A(a) is exactly the set of coefficient vectors of
  invariants in E.
* :func:`truncated_class` splits the initial values into cells on which
  that kernel has a uniform parametric basis.
* :func:`truncated_ideal` handles one concrete initial value: linear
  constraints from the first iterates give candidates, the checker
  confirms them, and the ansatz matrix of the failures recovers the rest.

Long trajectories of nonlinear maps have coefficients with a doubly
exponential number of digits.  The candidate stage can therefore run
modulo word-size primes.  The outcome is certified exactly: the kernel
dimension modulo p bounds the true dimension from above, so when that many
independent exact invariants are confirmed, the basis is complete.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq, mpz, next_prime

from .invariants import DEFAULT_MAX_ITER, _as_maps, _with_z, check_pi_batch_report, \
    guarded_maps, invariant_set_branch
from .linalg import (PolyMatrix, canonical_span, kernel_basis, kernel_mod, mod_q,
                     matrix_from_linear_polys, parametric_kernel_cells,
                     rational_reconstruction)
from .loop import SymbolicInitRequiredConcrete
from .poly import LinearForm, Polynomial, Q, VarContext, format_poly, linear_combination

log = logging.getLogger(__name__)

DEFAULT_WORD_CAP = 10_000
EXACT_BIT_BUDGET = 1 << 16   # switch to modular arithmetic beyond this size


# ---------------------------------------------------------------------------
# ansatz matrix and parametric classification

@dataclass
class AnsatzMatrix:
    matrix: PolyMatrix
    generators: list
    iterations: int
    polys: list = field(default_factory=list)   # fixpoint output with z = 1


def _ansatz_context(ctx: VarContext, m: int):
    ynames = [f"y{i + 1}" for i in range(m)]
    return _with_z(ctx.extend(*ynames))


def compute_matrix(gs: Sequence[Polynomial], hs, F_or_Fs,
                   max_iter=DEFAULT_MAX_ITER) -> AnsatzMatrix:
    """Ansatz matrix of E = span(gs) under the loop maps."""
    gs = list(gs)
    Fs = _as_maps(F_or_Fs)
    ctx = Fs[0][0].ctx
    n, m = len(ctx), len(gs)
    ext = _ansatz_context(ctx, m)
    z = Polynomial.var(ext, n + m)
    ys = [Polynomial.var(ext, n + i) for i in range(m)]
    g = Polynomial.zero(ext)
    for y, gi in zip(ys, gs):
        g = g + y * gi.embed(ext)
    maps = [Fz[:n] + ys + [Fz[n]] for Fz in guarded_maps(Fs, hs, _without_y(ext, n, m))]
    maps = [[f.embed(ext) for f in F] for F in maps]
    res = invariant_set_branch([z * g], maps, max_iter)
    y_idx = list(range(n, n + m))
    at_one = [p.partial_evaluate({n + m: 1}) for p in res.polys]
    A = matrix_from_linear_polys(at_one, y_idx, ctx)
    return AnsatzMatrix(A, gs, res.iterations, at_one)


def _without_y(ext, n, m):
    return VarContext(ext.names[:n] + ext.names[n + m:])


def compute_matrix_branch(gs, hs, Fs, max_iter=DEFAULT_MAX_ITER) -> AnsatzMatrix:
    return compute_matrix(gs, hs, [list(F) for F in Fs], max_iter)


def init_names(ctx: VarContext) -> list[str]:
    """Names for initial-value symbols, a1..an unless they clash with program variables."""
    names = [f"a{i + 1}" for i in range(len(ctx))]
    if any(nm in ctx.index for nm in names):
        names = [f"a_{nm}" for nm in ctx.names]
    return names


@dataclass
class ConstructibleCell:
    equations: list        # over the initial-value context
    inequation: Polynomial
    Z: PolyMatrix          # m × (m - rank), entries over the initial-value context
    templates: list        # over program variables followed by initial values
    rank: int

    def contains(self, a) -> bool:
        return (all(not e.evaluate(a) for e in self.equations)
                and bool(self.inequation.evaluate(a)))

    def instantiate(self, a, ctx: VarContext) -> list[Polynomial]:
        """Templates with the initial values substituted, over ``ctx``."""
        n = len(ctx)
        out = []
        for t in self.templates:
            p = t.partial_evaluate({n + i: v for i, v in enumerate(a)})
            out.append(Polynomial._raw(ctx, {m[:n]: c for m, c in p.terms.items()}))
        return out


def truncated_class(gs, hs, F_or_Fs, max_iter=DEFAULT_MAX_ITER) -> list[ConstructibleCell]:
    gs = list(gs)
    Fs = _as_maps(F_or_Fs)
    ctx = Fs[0][0].ctx
    n = len(ctx)
    A = compute_matrix(gs, hs, Fs, max_iter).matrix
    actx = VarContext(init_names(ctx))
    tctx = ctx.extend(*actx.names)
    cells = []
    for cell in parametric_kernel_cells(A):
        ren = lambda p: Polynomial._raw(actx, p.terms)
        Z = PolyMatrix([[ren(e) for e in row] for row in cell.Z.rows], actx)
        templates = []
        for j in range(Z.shape[1] if Z.rows else 0):
            t = Polynomial.zero(tctx)
            for gi, row in zip(gs, cell.Z.rows):
                coef = row[j]
                if coef:
                    shifted = Polynomial._raw(tctx, {(0,) * n + m: c for m, c in coef.terms.items()})
                    t = t + gi.embed(tctx) * shifted
            templates.append(t)
        cells.append(ConstructibleCell([ren(e) for e in cell.equations], ren(cell.inequation),
                                       Z, templates, cell.rank))
    return cells


# ---------------------------------------------------------------------------
# linear constraints from iterates

class _Compiled:
    """Polynomial as a flat term list for fast repeated evaluation."""

    __slots__ = ("terms",)

    def __init__(self, p: Polynomial):
        self.terms = [(c, tuple((i, e) for i, e in enumerate(m) if e)) for m, c in p.terms.items()]

    def eval(self, pt):
        total = mpq(0)
        for c, mono in self.terms:
            v = c
            for i, e in mono:
                v = v * pt[i] ** e
            total += v
        return total

    def eval_mod(self, pt, p, cmod):
        total = 0
        for (c, mono), cm in zip(self.terms, cmod):
            v = cm
            for i, e in mono:
                v = v * pow(pt[i], e, p) % p
            total += v
        return total % p


@dataclass
class _Trajectory:
    nodes: list          # (word, point, guard-prefix product)
    truncated: bool


def _exact_nodes(a, Fs, h, depth, cap, bit_budget=None):
    cF = [[_Compiled(f) for f in F] for F in Fs]
    ch = _Compiled(h)
    root = (tuple(Q(v) for v in a), mpq(1))
    nodes = [((), root[0], root[1])]
    frontier = [((), root[0], root[1])]
    truncated = False
    for _ in range(depth):
        nxt = []
        for w, pt, pref in frontier:
            hv = ch.eval(pt)
            npref = pref * hv
            if not npref:
                continue
            for i, F in enumerate(cF):
                q = tuple(f.eval(pt) for f in F)
                if bit_budget is not None and any(
                        v.numerator.bit_length() + v.denominator.bit_length() > bit_budget for v in q):
                    return None
                nxt.append((w + (i,), q, npref))
                if len(nodes) + len(nxt) >= cap:
                    truncated = True
                    break
            if truncated:
                break
        nodes += nxt
        frontier = nxt
        if truncated or not frontier:
            break
    return _Trajectory(nodes, truncated)


def sufficient_constraints(a, gs, hs, F_or_Fs, depth, word_cap=DEFAULT_WORD_CAP) -> list[LinearForm]:
    """Forms prefix(w)·Σ y_i g_i(F_w(a)) for every branch word w of length ≤ depth.

    prefix(w) is the product of the guard values along w before its last
    point; forms that vanish identically are dropped.
    """
    Fs = _as_maps(F_or_Fs)
    ctx = Fs[0][0].ctx
    h = Polynomial.constant(ctx, 1)
    for p in hs:
        h = h * p
    traj = _exact_nodes(a, Fs, h, depth, word_cap)
    cg = [_Compiled(g) for g in gs]
    forms = []
    for _, pt, pref in traj.nodes:
        row = tuple(pref * g.eval(pt) for g in cg)
        if any(row):
            forms.append(LinearForm(row))
    return forms


def _modular_rows(a, Fs, h, gs, depth, cap, p):
    """Constraint rows modulo p, or None if p divides some denominator."""
    try:
        pt0 = tuple(mod_q(v, p) for v in a)
        cF = [[(_Compiled(f), None) for f in F] for F in Fs]
        cF = [[(c, [mod_q(t[0], p) for t in c.terms]) for c, _ in F] for F in cF]
        ch = _Compiled(h)
        chm = [mod_q(t[0], p) for t in ch.terms]
        cg = [(c, [mod_q(t[0], p) for t in c.terms]) for c in (_Compiled(g) for g in gs)]
    except ZeroDivisionError:
        return None
    rows = []
    frontier = [(pt0, 1)]
    count = 1
    level = 0
    while frontier:
        nxt = []
        for pt, pref in frontier:
            rows.append([pref * c.eval_mod(pt, p, cm) % p for c, cm in cg])
            if level == depth:
                continue
            npref = pref * ch.eval_mod(pt, p, chm) % p
            if not npref:
                continue  # a zero guard modulo p only drops constraints
            for F in cF:
                if count >= cap:
                    break
                nxt.append((tuple(c.eval_mod(pt, p, cm) for c, cm in F), npref))
                count += 1
        frontier = nxt
        level += 1
    return rows


def _primes():
    p = mpz(1) << 62
    while True:
        p = next_prime(p)
        yield int(p)


def _modular_candidates(a, Fs, h, gs, depth, cap, max_primes=64):
    """Upper bound on the kernel dimension and a reconstructed rational kernel.

    Returns (dim_bound, vectors) where vectors may be None if rational
    reconstruction did not stabilize within ``max_primes`` primes.
    """
    m = len(gs)
    best = None       # (nullity, pivots)
    residues = []     # (p, kernel vectors) for primes matching ``best``
    prev = None
    for k, p in enumerate(_primes()):
        if k >= max_primes:
            break
        rows = _modular_rows(a, Fs, h, gs, depth, cap, p)
        if rows is None:
            continue
        ker, piv = kernel_mod(rows, m, p)
        key = (len(ker), tuple(piv))
        if best is None or len(ker) < best[0]:
            best = key
            residues = [(p, ker)]
            prev = None
            continue
        if key != best:
            continue  # unlucky prime
        residues.append((p, ker))
        if not ker:
            return 0, []
        vecs = _reconstruct(residues)
        if vecs is not None and vecs == prev:
            return best[0], vecs
        prev = vecs
    if best is None:
        return m, None
    return best[0], (prev if best[0] else [])


def _reconstruct(residues):
    M = 1
    acc = None
    for p, ker in residues:
        if acc is None:
            acc = [[v for v in vec] for vec in ker]
            M = p
            continue
        inv = pow(M, -1, p)
        for vec_acc, vec in zip(acc, ker):
            for i, (x, r) in enumerate(zip(vec_acc, vec)):
                vec_acc[i] = x + M * ((r - x) * inv % p)
        M *= p
    out = []
    for vec in acc:
        rv = []
        for x in vec:
            q = rational_reconstruction(x, M)
            if q is None:
                return None
            rv.append(q)
        out.append(rv)
    return out


# ---------------------------------------------------------------------------
# fixed initial value

@dataclass
class InvariantBasis:
    basis: list                  # canonical basis polynomials
    coefficients: list           # reduced echelon coefficient rows over the generators
    generators: list
    stage3_used: bool = False
    iterations: int = 0
    provenance: list = field(default_factory=list)   # per raw element: "batch" or "matrix"
    method: str = "exact"
    certified: bool = True
    depth_truncated: bool = False

    @property
    def dimension(self):
        return len(self.basis)


def _combine(vectors, polys, ctx):
    return [linear_combination(v, polys, ctx) for v in vectors]


def _stage23(a, gs, cands, hs, Fs, max_iter, ctx):
    """Batch-check candidate coefficient vectors; recover the rest via the ansatz matrix."""
    polys = _combine(cands, gs, ctx)
    rep = check_pi_batch_report(a, polys, hs, Fs, max_iter)
    iters = rep.iterations
    passing = [v for v, ok in zip(cands, rep.results) if ok]
    failing = [v for v, ok in zip(cands, rep.results) if not ok]
    prov = ["batch"] * len(passing)
    if not failing:
        return passing, prov, False, iters
    fpolys = _combine(failing, gs, ctx)
    am = compute_matrix(fpolys, hs, Fs, max_iter)
    iters = max(iters, am.iterations)
    Aa = am.matrix.evaluate(list(a))
    recovered = []
    for c in kernel_basis(Aa, len(failing)):
        vec = [mpq(0)] * len(gs)
        for cj, fv in zip(c, failing):
            if cj:
                vec = [x + cj * y for x, y in zip(vec, fv)]
        recovered.append(vec)
    return passing + recovered, prov + ["matrix"] * len(recovered), True, iters


def _zero_guard_basis(a, gs, ctx):
    # the loop never runs: invariants are the elements of E vanishing at a
    row = [g.evaluate(a) for g in gs]
    return kernel_basis([row], len(gs))


def _finish(vectors, gs, ctx, **kw):
    coeffs = canonical_span(vectors, len(gs)) if vectors else []
    basis = _combine(coeffs, gs, ctx)
    return InvariantBasis(basis, coeffs, list(gs), **kw)


def truncated_ideal(a, gs, hs, F_or_Fs, max_iter=DEFAULT_MAX_ITER, *,
                    depth=None, method="auto", word_cap=DEFAULT_WORD_CAP) -> InvariantBasis:
    """Basis of the invariants in span(gs) for the loop started at a.

    ``method`` is "exact", "modular" or "auto" (modular once exact iterates
    outgrow a size budget).  ``depth`` defaults to the number of generators.
    """
    if a is None:
        raise SymbolicInitRequiredConcrete("truncated_ideal needs concrete initial values")
    gs = list(gs)
    Fs = _as_maps(F_or_Fs)
    ctx = Fs[0][0].ctx
    a = [Q(v) for v in a]
    m = len(gs)
    if any(not h for h in hs):
        return _finish(_zero_guard_basis(a, gs, ctx), gs, ctx)
    h = Polynomial.constant(ctx, 1)
    for p in hs:
        h = h * p
    depth = m if depth is None else depth

    traj = None
    if method in ("auto", "exact"):
        traj = _exact_nodes(a, Fs, h, depth, word_cap,
                            bit_budget=EXACT_BIT_BUDGET if method == "auto" else None)
    if traj is not None:
        cg = [_Compiled(g) for g in gs]
        rows = [[pref * g.eval(pt) for g in cg] for _, pt, pref in traj.nodes]
        cands = kernel_basis(rows, m)
        vecs, prov, used3, iters = _stage23(a, gs, cands, hs, Fs, max_iter, ctx)
        out = _finish(vecs, gs, ctx, stage3_used=used3, iterations=iters, provenance=prov,
                      method="exact", depth_truncated=traj.truncated)
        return out
    return _truncated_ideal_modular(a, gs, h, hs, Fs, ctx, depth, word_cap, max_iter)


def _truncated_ideal_modular(a, gs, h, hs, Fs, ctx, depth, word_cap, max_iter, max_depth=None):
    m = len(gs)
    max_depth = max_depth or 8 * max(depth, 1)
    D = depth
    best = None
    while True:
        bound, cands = _modular_candidates(a, Fs, h, gs, D, word_cap)
        if cands is not None:
            vecs, prov, used3, iters = _stage23(a, gs, cands, hs, Fs, max_iter, ctx)
            coeffs = canonical_span(vecs, m) if vecs else []
            best = (vecs, prov, used3, iters)
            if len(coeffs) == bound:
                return _finish(vecs, gs, ctx, stage3_used=used3, iterations=iters,
                               provenance=prov, method="modular", certified=True)
            log.info("modular stage: %d invariants confirmed, bound %d at depth %d",
                     len(coeffs), bound, D)
        if D >= max_depth:
            break
        D *= 2
    log.warning("could not certify completeness; returning the confirmed invariants")
    vecs, prov, used3, iters = best if best else ([], [], False, 0)
    return _finish(vecs, gs, ctx, stage3_used=used3, iterations=iters, provenance=prov,
                   method="modular", certified=False)


def truncated_ideal_branch(a, gs, hs, Fs, max_iter=DEFAULT_MAX_ITER, **kw) -> InvariantBasis:
    return truncated_ideal(a, gs, hs, [list(F) for F in Fs], max_iter, **kw)


# ---------------------------------------------------------------------------
# trajectory oracle

def _schedules(k, depth, samples, rng):
    if k == 1:
        return [[0] * depth]
    return [[rng.randrange(k) for _ in range(depth)] for _ in range(samples)]


def unrolling_oracle(L, polys, depth, rng, samples=5, primes=2):
    """Check that every poly vanishes along unrolled trajectories.

    Iterates are exact while they stay small, then continue modulo
    word-size primes, where a nonzero residue still proves a violation.
    Returns a list of (poly string, schedule index, step) violations.
    """
    a = L.require_init()
    h = L.guard_product()
    bad = []
    for si, sched in enumerate(_schedules(len(L.branches), depth, samples, rng)):
        for p in _take_primes(primes):
            if _oracle_mod(L, a, h, polys, sched, p, bad, si):
                break
    return bad


def _take_primes(k):
    gen = _primes()
    return [next(gen) for _ in range(k)]


def _oracle_mod(L, a, h, polys, sched, p, bad, si):
    try:
        pt = tuple(mod_q(v, p) for v in a)
        maps = [[(c, [mod_q(t[0], p) for t in c.terms]) for c in map(_Compiled, F)]
                for F in L.branches]
        cp = [(g, _Compiled(g)) for g in polys]
        cp = [(g, c, [mod_q(t[0], p) for t in c.terms]) for g, c in cp]
        ch = _Compiled(h)
        chm = [mod_q(t[0], p) for t in ch.terms]
    except ZeroDivisionError:
        return False
    for step in range(len(sched) + 1):
        for g, c, cm in cp:
            if c.eval_mod(pt, p, cm):
                bad.append((format_poly(g), si, step))
                return True
        if step == len(sched) or not ch.eval_mod(pt, p, chm):
            break
        pt = tuple(c.eval_mod(pt, p, cm) for c, cm in maps[sched[step]])
    return False
