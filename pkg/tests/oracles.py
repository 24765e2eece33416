"""Independent reference computations used by the tests.

Nothing here calls into the Gröbner or invariant machinery: the oracles
work from plain unrolling, modular arithmetic and sympy.
"""
from __future__ import annotations

import random

import sympy

from polyinv import Polynomial, VarContext
from polyinv.poly import Q, monomials_up_to_degree

ORACLE_PRIMES = (1_000_000_007, 998_244_353)


def random_poly(rng: random.Random, ctx: VarContext, deg: int, terms: int = 3, coeff: int = 3):
    monos = monomials_up_to_degree(len(ctx), deg)
    p = Polynomial.zero(ctx)
    for m in rng.sample(monos, min(terms, len(monos))):
        c = rng.randint(-coeff, coeff)
        if c:
            p = p + Polynomial.monomial(ctx, m, c)
    return p


def random_map(rng: random.Random, ctx: VarContext, deg: int):
    """A map whose i-th entry always involves x_i linearly, plus small noise."""
    F = []
    for i in range(len(ctx)):
        lead = Polynomial.var(ctx, i) * rng.choice((1, 1, 2, -1))
        F.append(lead + random_poly(rng, ctx, deg, terms=rng.randint(0, 2)))
    return F


def _mod(c, q):
    c = Q(c)
    return int(c.numerator) * pow(int(c.denominator), -1, q) % q


def _eval_mod(p: Polynomial, pt, q):
    acc = 0
    for m, c in p.terms.items():
        t = _mod(c, q)
        for v, e in zip(pt, m):
            if e:
                t = t * pow(v, e, q) % q
        acc += t
    return acc % q


def _nullity_mod(rows, ncols, q):
    M = [r[:] for r in rows]
    rank, col = 0, 0
    while rank < len(M) and col < ncols:
        piv = next((i for i in range(rank, len(M)) if M[i][col] % q), None)
        if piv is None:
            col += 1
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], -1, q)
        M[rank] = [x * inv % q for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][col]:
                f = M[i][col]
                M[i] = [(x - f * y) % q for x, y in zip(M[i], M[rank])]
        rank += 1
        col += 1
    return ncols - rank


def unrolling_kernel_dimension(a, F, gs, depth):
    """Nullity of [g_j(x_k)] over the first depth+1 iterates, minimised over two primes.

    Reduction mod p can only raise the nullity, so the minimum is the
    best available estimate of the rational nullity.
    """
    best = None
    for q in ORACLE_PRIMES:
        pt = [_mod(v, q) for v in a]
        rows = []
        for _ in range(depth + 1):
            rows.append([_eval_mod(g, pt, q) for g in gs])
            pt = [_eval_mod(f, pt, q) for f in F]
        k = _nullity_mod(rows, len(gs), q)
        best = k if best is None else min(best, k)
    return best


def to_sympy(p: Polynomial):
    syms = sympy.symbols(list(p.ctx.names))
    expr = sympy.Integer(0)
    for m, c in p.terms.items():
        t = sympy.Rational(int(c.numerator), int(c.denominator))
        for s, e in zip(syms, m):
            t *= s ** e
        expr += t
    return expr, syms


def low_power_radical(f: Polynomial, S, max_power: int = 6) -> bool:
    """f ∈ √⟨S⟩ witnessed by f^r ∈ ⟨S⟩ for some r ≤ max_power (sympy Gröbner)."""
    syms = sympy.symbols(list(f.ctx.names))
    gens = [to_sympy(s)[0] for s in S if s]
    if not gens:
        return f.is_zero()
    G = sympy.groebner(gens, *syms, order="grevlex")
    fe = to_sympy(f)[0]
    power = sympy.Integer(1)
    for _ in range(max_power):
        power = sympy.expand(power * fe)
        if G.contains(power):
            return True
    return False


def trajectory_violations(L, polys, depth, rng, samples=5):
    """Steps where some poly is nonzero, along sampled branch schedules, mod two primes.

    A nonzero residue proves the rational value is nonzero.  A guard that
    vanishes mod p may stop a trajectory early, which only loses checks.
    """
    bad = []
    k = len(L.branches)
    scheds = [[rng.randrange(k) for _ in range(depth)] for _ in range(samples if k > 1 else 1)]
    h = L.guard_product()
    for si, sched in enumerate(scheds):
        for q in ORACLE_PRIMES:
            pt = [_mod(v, q) for v in L.require_init()]
            for step in range(depth + 1):
                hit = [p for p in polys if _eval_mod(p, pt, q)]
                if hit:
                    bad.append((si, step, hit[0]))
                    break
                if step == depth or not _eval_mod(h, pt, q):
                    break
                pt = [_eval_mod(f, pt, q) for f in L.branches[sched[step]]]
    return bad
