"""Buchberger's algorithm, normal forms and radical membership.

The engine works on plain term dicts internally.  A heap keyed by the
monomial order drives reduction, and pairs are pruned with the
Gebauer–Möller installation of the product and chain criteria.
"""
from __future__ import annotations

import heapq
import logging
import random
from collections import OrderedDict
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .linalg import kernel_basis, solve_affine
from .poly import Polynomial, VarContext

log = logging.getLogger(__name__)


class MonomialOrder:
    """Graded reverse lex ("grevlex") or pure lex on exponent vectors."""

    __slots__ = ("kind",)

    def __init__(self, kind="grevlex"):
        if kind not in ("grevlex", "lex"):
            raise ValueError(f"unknown monomial order {kind!r}")
        self.kind = kind

    def key(self, m):
        if self.kind == "lex":
            return m
        return (sum(m),) + tuple(-e for e in reversed(m))

    def heap_key(self, m):
        # smallest heap key = largest monomial
        if self.kind == "lex":
            return tuple(-e for e in m)
        return (-sum(m),) + tuple(reversed(m))

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and other.kind == self.kind

    def __hash__(self):
        return hash(self.kind)

    def __repr__(self):
        return f"MonomialOrder({self.kind!r})"


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


@dataclass
class GroebnerBasis:
    generators: list
    order: MonomialOrder
    ctx: VarContext

    def is_unit(self):
        return len(self.generators) == 1 and self.generators[0].is_constant()

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)


# ---------------------------------------------------------------------------
# term-dict primitives

def _lm(terms, order):
    return max(terms, key=order.key)


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


class _Elem:
    __slots__ = ("lm", "terms")

    def __init__(self, terms, order):
        lm = _lm(terms, order)
        c = terms[lm]
        if c != 1:
            inv = 1 / c
            terms = {m: v * inv for m, v in terms.items()}
        self.lm = lm
        self.terms = terms


def _reduce(f, basis, order, full=True):
    """Remainder of term dict f on division by monic ``basis`` elements."""
    f = dict(f)
    heap = [(order.heap_key(m), m) for m in f]
    heapq.heapify(heap)
    rem = {}
    hk = order.heap_key
    while heap:
        _, m = heapq.heappop(heap)
        c = f.get(m)
        if c is None:
            continue
        del f[m]
        for g in basis:
            glm = g.lm
            if all(x >= y for x, y in zip(m, glm)):
                shift = tuple(x - y for x, y in zip(m, glm))
                for gm, gc in g.terms.items():
                    if gm == glm:
                        continue
                    t = tuple(a + b for a, b in zip(gm, shift))
                    v = f.get(t)
                    if v is None:
                        f[t] = -c * gc
                        heapq.heappush(heap, (hk(t), t))
                    else:
                        v = v - c * gc
                        if v:
                            f[t] = v
                        else:
                            del f[t]
                break
        else:
            rem[m] = c
            if not full:
                rem.update(f)
                return rem
    return rem


def _spoly(a, b):
    L = _lcm(a.lm, b.lm)
    sa = tuple(x - y for x, y in zip(L, a.lm))
    sb = tuple(x - y for x, y in zip(L, b.lm))
    out = {}
    for m, c in a.terms.items():
        out[tuple(x + y for x, y in zip(m, sa))] = c
    for m, c in b.terms.items():
        t = tuple(x + y for x, y in zip(m, sb))
        v = out.get(t, 0) - c
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


def _update(G, P, f):
    """Gebauer–Möller update of basis G and pair set P by new element f."""
    lmf = f.lm
    k = len(G)
    lms = [g.lm for g in G]
    P = {(i, j) for (i, j) in P
         if not _divides(lmf, _lcm(lms[i], lms[j]))
         or _lcm(lms[i], lms[j]) == _lcm(lms[i], lmf)
         or _lcm(lms[i], lms[j]) == _lcm(lms[j], lmf)}
    by_lcm: dict = {}
    for i, lm in enumerate(lms):
        by_lcm.setdefault(_lcm(lm, lmf), []).append(i)
    minimal = []
    for L in sorted(by_lcm, key=lambda m: (sum(m), m)):
        if all(not _divides(L2, L) for L2 in minimal):
            minimal.append(L)
    for L in minimal:
        idx = by_lcm[L]
        # product criterion: coprime leading monomials make the whole class redundant
        if not any(_lcm(lms[i], lmf) == tuple(a + b for a, b in zip(lms[i], lmf)) for i in idx):
            P.add((min(idx), k))
    G.append(f)
    return P


def _buchberger_terms(gens, order, stop_on_unit=False):
    G: list = []
    P: set = set()
    for t in gens:
        if t:
            r = _reduce(t, G, order, full=False) if G else dict(t)
            if r:
                e = _Elem(r, order)
                if stop_on_unit and not any(e.lm):
                    return [e]
                P = _update(G, P, e)
    while P:
        # normal selection: smallest lcm, ties by index pair
        pair = min(P, key=lambda p: (order.key(_lcm(G[p[0]].lm, G[p[1]].lm)), p))
        P.discard(pair)
        i, j = pair
        s = _spoly(G[i], G[j])
        if not s:
            continue
        # top-reduction suffices here; tails are cleaned up by _interreduce
        r = _reduce(s, G, order, full=False)
        if r:
            e = _Elem(r, order)
            if not any(e.lm):
                return [e]
            P = _update(G, P, e)
    return _interreduce(G, order)


def _interreduce(G, order):
    # minimalize, then fully reduce each element against the others
    G = sorted(G, key=lambda e: order.key(e.lm))
    minimal = []
    for e in G:
        if not any(_divides(m.lm, e.lm) for m in minimal):
            minimal.append(e)
    out = []
    for i, e in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        tail = {m: c for m, c in e.terms.items() if m != e.lm}
        r = _reduce(tail, others, order)
        r[e.lm] = mpq(1)
        out.append(_Elem(r, order))
    out.sort(key=lambda e: order.key(e.lm))
    return out


# ---------------------------------------------------------------------------
# public API

def buchberger(gens: Sequence[Polynomial], order: MonomialOrder = GREVLEX) -> GroebnerBasis:
    """Reduced, monic Gröbner basis of the ideal generated by ``gens``."""
    gens = list(gens)
    if not gens:
        raise ValueError("buchberger needs at least one generator (use an empty context list otherwise)")
    ctx = gens[0].ctx
    for g in gens:
        g._check(gens[0])
    elems = _buchberger_terms([g.terms for g in gens if g], order)
    return GroebnerBasis([Polynomial._raw(ctx, e.terms) for e in elems], order, ctx)


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    if f.ctx != G.ctx:
        raise ValueError("context mismatch between polynomial and basis")
    elems = [_Elem(dict(g.terms), G.order) for g in G.generators]
    return Polynomial._raw(f.ctx, _reduce(f.terms, elems, G.order))


def ideal_membership(f: Polynomial, S: Sequence[Polynomial]) -> bool:
    S = [s for s in S if s]
    if not f:
        return True
    if not S:
        return False
    return not normal_form(f, buchberger(S))


def simplify_equations(eqs: Sequence[Polynomial]) -> list[Polynomial]:
    """An equivalent, usually much shorter, list: the reduced Gröbner basis."""
    eqs = [e for e in eqs if e]
    if not eqs:
        return []
    return _cached_basis(eqs).generators


# ---------------------------------------------------------------------------
# radical membership

_GB_CACHE: "OrderedDict[tuple, GroebnerBasis]" = OrderedDict()
_GB_CACHE_SIZE = 64


def _cached_basis(S):
    key = (S[0].ctx, tuple(frozenset(s.terms.items()) for s in S))
    gb = _GB_CACHE.get(key)
    if gb is None:
        gb = buchberger(S)
        _GB_CACHE[key] = gb
        if len(_GB_CACHE) > _GB_CACHE_SIZE:
            _GB_CACHE.popitem(last=False)
    else:
        _GB_CACHE.move_to_end(key)
    return gb


def clear_cache():
    _GB_CACHE.clear()


def _strip_common_variables(f, S):
    """Drop variables that occur to the first power in every term of f and S.

    If v divides each polynomial exactly once, write them as v·f', v·s'.
    With J = ⟨s'⟩ free of v, √(v·J) = ⟨v⟩ ∩ √J and v is a non-zero-divisor
    modulo √J, so v·f' ∈ √⟨v·s'⟩ iff f' ∈ √J.
    """
    polys = [f] + list(S)
    n = len(f.ctx)
    common = [i for i in range(n)
              if all(m[i] == 1 for p in polys for m in p.terms)]
    if not common:
        return f, S

    def strip(p):
        out = {}
        for m, c in p.terms.items():
            e = list(m)
            for i in common:
                e[i] = 0
            out[tuple(e)] = c
        return Polynomial._raw(p.ctx, out)

    return strip(f), [strip(s) for s in S]


def _in_span(f, S):
    monos = sorted({m for p in S + [f] for m in p.terms})
    idx = {m: k for k, m in enumerate(monos)}
    rows = []
    for p in S:
        r = [mpq(0)] * len(monos)
        for m, c in p.terms.items():
            r[idx[m]] = c
        rows.append(r)
    # f ∈ span(S) iff the transposed system S^T c = f is solvable
    cols = [[rows[j][i] for j in range(len(S))] for i in range(len(monos))]
    rhs = [f.terms.get(m, mpq(0)) for m in monos]
    return solve_affine(cols, rhs) is not None


def _linear_block(S, n):
    """Variables in which every polynomial of S is jointly of degree ≤ 1."""
    chosen: list = []
    for v in reversed(range(n)):
        trial = chosen + [v]
        if all(sum(m[i] for i in trial) <= 1 for p in S for m in p.terms):
            chosen = trial
    return sorted(chosen)


def _witness(f, S, rng, tries=3):
    """Search for a point of V(S) where f ≠ 0; True if one is found.

    The variables outside a jointly-linear block are specialized to small
    random integers, which leaves an affine system for the block.
    """
    n = len(f.ctx)
    Y = _linear_block(S, n)
    if not Y:
        return False
    X = [i for i in range(n) if i not in set(Y)]
    for _ in range(tries):
        assign = {i: rng.randint(-9, 9) for i in X}
        rows, rhs = [], []
        for p in S:
            q = p.partial_evaluate(assign)
            row = [mpq(0)] * len(Y)
            const = mpq(0)
            for m, c in q.terms.items():
                hit = [k for k, i in enumerate(Y) if m[i]]
                if hit:
                    row[hit[0]] += c
                else:
                    const += c
            rows.append(row)
            rhs.append(-const)
        sol = solve_affine(rows, rhs) if rows else [mpq(0)] * len(Y)
        if sol is None:
            continue
        ker = kernel_basis(rows, len(Y)) if rows else [
            [mpq(int(i == j)) for j in range(len(Y))] for i in range(len(Y))]
        for _ in range(2):
            pt = list(sol)
            for v in ker:
                c = rng.randint(-9, 9)
                pt = [a + c * b for a, b in zip(pt, v)]
            full = [mpq(0)] * n
            for i, val in assign.items():
                full[i] = mpq(val)
            for k, i in enumerate(Y):
                full[i] = pt[k]
            if all(not p.evaluate(full) for p in S) and f.evaluate(full):
                return True
    return False


def _rabinowitsch(f, S):
    ctx = f.ctx
    name = "t"
    while name in ctx.index:
        name += "_"
    ext = ctx.extend(name)
    t = Polynomial.var(ext, name)
    gens = [s.embed(ext).terms for s in S] + [(1 - t * f.embed(ext)).terms]
    G = _buchberger_terms(gens, GREVLEX, stop_on_unit=True)
    return len(G) == 1 and not any(G[0].lm)


def _quotient_dimension(lms, occurring, cap=4096):
    """Number of standard monomials in the occurring variables, or None if infinite or large."""
    n = len(lms[0]) if lms else 0
    pure = {}
    for m in lms:
        nz = [i for i, e in enumerate(m) if e]
        if len(nz) == 1:
            i = nz[0]
            pure[i] = min(pure.get(i, m[i]), m[i])
    if any(i not in pure for i in occurring):
        return None
    count = 0
    stack = [(0,) * n]
    seen = {stack[0]}
    while stack:
        m = stack.pop()
        count += 1
        if count > cap:
            return None
        for i in occurring:
            t = m[:i] + (m[i] + 1,) + m[i + 1:]
            if t not in seen and not any(_divides(l, t) for l in lms):
                seen.add(t)
                stack.append(t)
    return count


def _zero_dim_test(f, G, elems):
    """Exact answer when ⟨S⟩ is zero-dimensional in the variables of S, else None.

    In a quotient of dimension D every nilpotent has index at most D, so
    f ∈ √I iff f^D ∈ I; repeated squaring of normal forms reaches it fast.
    """
    occurring = sorted({i for g in G.generators for m in g.terms for i, e in enumerate(m) if e})
    if any(e and i not in occurring for m in f.terms for i, e in enumerate(m)):
        return None
    D = _quotient_dimension([e.lm for e in elems], occurring)
    if D is None:
        return None
    r = _reduce(f.terms, elems, GREVLEX)
    power = 1
    while r and power < D:
        r = _reduce((Polynomial._raw(f.ctx, r) ** 2).terms, elems, GREVLEX)
        power *= 2
    return not r


def _slice_witness(f, S, rng, tries):
    """True if some hyperplane x_i = c meets V(S) at a point where f ≠ 0.

    V(S|x_i=c) is exactly the slice of V(S), so a non-member on a slice
    is a non-member overall.  Slices of a lower-dimensional problem are
    cheap to decide, which is what makes this worth trying first.
    """
    occurring = sorted({i for p in S for m in p.terms for i, e in enumerate(m) if e})
    if len(occurring) < 2:
        return False
    for i in reversed(occurring[-tries:]):
        c = rng.randint(-7, 7)
        fs = f.partial_evaluate({i: c})
        Ss = [q for q in (p.partial_evaluate({i: c}) for p in S) if q]
        if not Ss or any(q.is_constant() for q in Ss):
            continue  # empty or unconstrained slice says nothing
        if _cached_basis(Ss).is_unit():
            continue
        if not radical_member(fs, Ss, rng, _slices=1):
            return True
    return False


def radical_member(f: Polynomial, S: Sequence[Polynomial], rng=None, _slices=None) -> bool:
    """Decide f ∈ √⟨S⟩ exactly.

    Cheap sufficient tests run before the Rabinowitsch computation; each
    either settles the question exactly or defers.
    """
    S = [s for s in S if s]
    if not f:
        return True
    if not S:
        return False
    if any(s.is_constant() for s in S):
        return True
    f, S = _strip_common_variables(f, S)
    if not f:
        return True
    if any(s.is_constant() for s in S):
        return True
    if f.is_constant():
        return _rabinowitsch(f, S)  # 1 ∈ √⟨S⟩ iff ⟨S⟩ is the unit ideal
    if _in_span(f, S):
        return True
    rng = rng or random.Random(0x5EED)
    if _witness(f, S, rng):
        return False
    G = _cached_basis(S)
    if G.is_unit():
        return True
    elems = [_Elem(dict(g.terms), GREVLEX) for g in G.generators]
    r = _reduce(f.terms, elems, GREVLEX)
    if not r:
        return True
    r2 = _reduce((f * f).terms, elems, GREVLEX) if len(f.terms) <= 60 else r
    if not r2:
        return True
    verdict = _zero_dim_test(f, G, elems)
    if verdict is not None:
        return verdict
    if _slice_witness(f, S, rng, len(f.ctx) if _slices is None else _slices):
        return False
    return _rabinowitsch(f, S)


def in_radical(fs: Sequence[Polynomial], S: Sequence[Polynomial]) -> bool:
    """True iff every f in fs lies in √⟨S⟩; stops at the first failure."""
    for f in fs:
        if not radical_member(f, S):
            return False
    return True
