"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a mapping from exponent tuples to nonzero ``mpq``
coefficients over a named :class:`VarContext`.  Program variables come
first; algorithms that need auxiliary indeterminates append them with
:meth:`VarContext.extend`, so a polynomial over a prefix context embeds by
zero-padding its exponents.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

Monomial = tuple  # exponent vector, one entry per context variable

_RESERVED = re.compile(r"^(y\d+|z|t)$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def Q(value) -> mpq:
    """Coerce ints, strings like '3/4', Fractions and mpq to mpq."""
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def is_reserved(name: str) -> bool:
    return bool(_RESERVED.match(name))


class ContextError(ValueError):
    pass


class NotDivisible(ArithmeticError):
    """Raised by :func:`divide_exact` when the quotient is not a polynomial."""


class VarContext:
    """Ordered, immutable list of variable names."""

    __slots__ = ("names", "index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ContextError(f"duplicate variable names in {names}")
        for nm in names:
            if not _NAME.match(nm):
                raise ContextError(f"bad variable name {nm!r}")
        self.names = names
        self.index = {nm: i for i, nm in enumerate(names)}

    @classmethod
    def program(cls, names: Iterable[str]) -> "VarContext":
        """Context for user-facing program variables; reserved names refused."""
        names = tuple(names)
        bad = [nm for nm in names if is_reserved(nm)]
        if bad:
            raise ContextError(f"reserved variable name(s) {bad}: y<digits>, z and t are internal")
        return cls(names)

    def extend(self, *names: str) -> "VarContext":
        return VarContext(self.names + names)

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, VarContext) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarContext({list(self.names)})"


def grlex_key(m: Monomial):
    """Ascending canonical order: total degree, then x1-heavy first."""
    return (sum(m), tuple(-e for e in m))


def monomials_up_to_degree(n: int, d: int) -> list[Monomial]:
    """All exponent vectors in n variables of total degree <= d, canonical order."""
    if d < 0:
        raise ValueError("degree must be >= 0")
    out = []
    for deg in range(d + 1):
        # combinations over variable indices give each monomial exactly once
        for combo in combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    out.sort(key=grlex_key)
    return out


class Polynomial:
    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VarContext, terms: Mapping[Monomial, object] | None = None):
        self.ctx = ctx
        clean = {}
        if terms:
            n = len(ctx)
            for m, c in terms.items():
                if len(m) != n:
                    raise ContextError(f"monomial {m} does not fit context of size {n}")
                c = Q(c)
                if c:
                    clean[tuple(m)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ctx, terms):
        # trusted constructor: terms already clean
        p = object.__new__(cls)
        p.ctx = ctx
        p.terms = terms
        p._hash = None
        return p

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, ctx):
        return cls._raw(ctx, {})

    @classmethod
    def constant(cls, ctx, c):
        c = Q(c)
        return cls._raw(ctx, {(0,) * len(ctx): c} if c else {})

    @classmethod
    def var(cls, ctx, which):
        i = ctx.index[which] if isinstance(which, str) else which
        e = [0] * len(ctx)
        e[i] = 1
        return cls._raw(ctx, {tuple(e): mpq(1)})

    @classmethod
    def monomial(cls, ctx, m, c=1):
        return cls(ctx, {tuple(m): c})

    # basic queries --------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self):
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, indices):
        return max((sum(m[i] for i in indices) for m in self.terms), default=-1)

    def is_constant(self):
        return all(not any(m) for m in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * len(self.ctx), mpq(0))

    def coefficient(self, m):
        return self.terms.get(tuple(m), mpq(0))

    def variables(self):
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return sorted(used)

    # arithmetic -----------------------------------------------------------
    def _check(self, other):
        if self.ctx != other.ctx:
            raise ContextError(f"context mismatch: {self.ctx} vs {other.ctx}")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.ctx, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Polynomial._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c):
        c = Q(c)
        if not c:
            return Polynomial.zero(self.ctx)
        return Polynomial._raw(self.ctx, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                v = get(m)
                out[m] = ca * cb if v is None else v + ca * cb
        return Polynomial._raw(self.ctx, {m: c for m, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        if isinstance(c, Polynomial):
            if not c.is_constant() or c.is_zero():
                raise ZeroDivisionError("division only by nonzero constants")
            c = c.constant_term()
        return self.scale(1 / Q(c))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = Polynomial.constant(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq(0)):
            return self.terms == Polynomial.constant(self.ctx, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    # evaluation -----------------------------------------------------------
    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point: Sequence) -> mpq:
        if len(point) != len(self.ctx):
            raise ContextError(f"point has {len(point)} entries, context has {len(self.ctx)}")
        pt = [Q(v) for v in point]
        total = mpq(0)
        for m, c in self.terms.items():
            v = c
            for x, e in zip(pt, m):
                if e:
                    v = v * x**e
            total += v
        return total

    def partial_evaluate(self, assignment: Mapping[int, object]) -> "Polynomial":
        """Substitute values for some variables; the context is kept."""
        vals = {i: Q(v) for i, v in assignment.items()}
        out: dict = {}
        for m, c in self.terms.items():
            e = list(m)
            for i, v in vals.items():
                if e[i]:
                    c = c * v ** e[i]
                    e[i] = 0
            if c:
                key = tuple(e)
                out[key] = out.get(key, 0) + c
        return Polynomial._raw(self.ctx, {m: c for m, c in out.items() if c})

    # context moves --------------------------------------------------------
    def embed(self, ctx: VarContext) -> "Polynomial":
        """Re-express over a context that contains every variable used."""
        if ctx == self.ctx:
            return self
        pos = []
        for i, nm in enumerate(self.ctx.names):
            j = ctx.index.get(nm)
            pos.append(j)
        n = len(ctx)
        out = {}
        for m, c in self.terms.items():
            e = [0] * n
            for i, k in enumerate(m):
                if k:
                    if pos[i] is None:
                        raise ContextError(f"variable {self.ctx.names[i]} missing from {ctx}")
                    e[pos[i]] = k
            out[tuple(e)] = c
        return Polynomial._raw(ctx, out)

    # printing -------------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Polynomial({format_poly(self)!r})"


def _print_order(m):
    return (-sum(m), tuple(-e for e in m))


def _format_monomial(m, names):
    parts = []
    for nm, e in zip(names, m):
        if e == 1:
            parts.append(nm)
        elif e:
            parts.append(f"{nm}^{e}")
    return "*".join(parts)


def format_poly(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    out = []
    for m in sorted(p.terms, key=_print_order):
        c = p.terms[m]
        mono = _format_monomial(m, p.ctx.names)
        neg = c < 0
        a = -c if neg else c
        if mono:
            body = mono if a == 1 else f"{_fmt_q(a)}*{mono}"
        else:
            body = _fmt_q(a)
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def _fmt_q(c) -> str:
    c = mpq(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# parsing

class PolySyntaxError(ValueError):
    def __init__(self, msg, pos, text=""):
        super().__init__(f"{msg} at position {pos}" + (f" in {text!r}" if text else ""))
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m:
            raise PolySyntaxError(f"unexpected character {text[i]!r}", i, text)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", m.group(1), start))
        elif m.group(2):
            toks.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            toks.append(("op", "^" if op == "**" else op, start))
        i = m.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    # expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)*
    # unary := ('+'|'-') unary | power ; power := atom ('^' int)?
    def __init__(self, text, ctx):
        self.text = text
        self.ctx = ctx
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolySyntaxError(msg, tok[2], self.text)

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            tok = self.take()
            q = self.unary()
            if tok[1] == "*":
                p = p * q
            else:
                if not q.is_constant():
                    self.fail("division by a non-constant", tok)
                if q.is_zero():
                    self.fail("division by zero", tok)
                p = p / q
        return p

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be a non-negative integer literal", tok)
            return base ** int(tok[1])
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return Polynomial.constant(self.ctx, int(val))
        if kind == "name":
            if val not in self.ctx.index:
                raise PolySyntaxError(f"unknown variable {val!r}", pos, self.text)
            return Polynomial.var(self.ctx, val)
        if val == "(":
            p = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.fail("expected ')'")
            self.take()
            return p
        self.fail(f"unexpected token {val!r}" if kind != "end" else "unexpected end of input", tok)


def parse_poly(text: str, ctx: VarContext) -> Polynomial:
    return _Parser(text, ctx).parse()


# ---------------------------------------------------------------------------
# composition and coefficient extraction

def compose(gs: Sequence[Polynomial], F: Sequence[Polynomial]) -> list[Polynomial]:
    """Substitute F for the first len(F) variables of each g.

    Any further variables of g are passed through unchanged; the result
    lives in F's context, extended by those variables when absent.
    """
    if not F:
        raise ContextError("empty map")
    fctx = F[0].ctx
    for f in F:
        if f.ctx != fctx:
            raise ContextError("map entries must share a context")
    n = len(F)
    out = []
    cache: dict = {}
    for g in gs:
        if len(g.ctx) < n:
            raise ContextError(f"g has {len(g.ctx)} variables, map has {n} entries")
        extra = g.ctx.names[n:]
        missing = tuple(nm for nm in extra if nm not in fctx.index)
        rctx = fctx.extend(*missing) if missing else fctx
        key = rctx
        if key not in cache:
            cache[key] = ([f.embed(rctx) for f in F], {})
        images, powers = cache[key]
        passthru = [Polynomial.var(rctx, nm) for nm in extra]
        subs = list(images) + passthru
        out.append(_substitute(g, subs, powers, rctx))
    return out


def _substitute(g, subs, powers, rctx):
    acc: dict = {}

    def power(i, k):
        key = (i, k)
        p = powers.get(key)
        if p is None:
            if k == 1:
                p = subs[i]
            else:
                half = power(i, k // 2)
                p = half * half
                if k % 2:
                    p = p * subs[i]
            powers[key] = p
        return p

    for m, c in g.terms.items():
        term = None
        for i, k in enumerate(m):
            if k:
                f = power(i, k)
                term = f if term is None else term * f
        if term is None:
            key0 = (0,) * len(rctx)
            acc[key0] = acc.get(key0, 0) + c
            continue
        for tm, tc in term.terms.items():
            acc[tm] = acc.get(tm, 0) + c * tc
    return Polynomial._raw(rctx, {m: c for m, c in acc.items() if c})


def compose_maps(F: Sequence[Polynomial], G: Sequence[Polynomial]) -> list[Polynomial]:
    """(F∘G)(x) = F(G(x))."""
    return compose(F, G)


@dataclass(frozen=True)
class LinearForm:
    """c_1*y_1 + ... + c_m*y_m + constant over m designated variables."""

    coeffs: tuple
    constant: mpq = mpq(0)

    def __call__(self, values):
        return sum((c * Q(v) for c, v in zip(self.coeffs, values)), self.constant)

    def is_homogeneous(self):
        return not self.constant


def coefficients_wrt_x(p: Polynomial, y_indices: Sequence[int]):
    """Split p = Σ_μ x^μ · L_μ(y) for p homogeneous linear in the y-variables.

    Returns a list of (x-monomial, LinearForm) pairs, the x-monomials in
    printing order.  The x-monomial keeps zeros in the y positions.
    """
    ypos = {j: k for k, j in enumerate(y_indices)}
    m = len(y_indices)
    groups: dict = {}
    for mono, c in p.terms.items():
        hits = [j for j in y_indices if mono[j]]
        if len(hits) != 1 or mono[hits[0]] != 1:
            raise ValueError(f"polynomial is not homogeneous linear in the y-variables: {p}")
        j = hits[0]
        xm = list(mono)
        xm[j] = 0
        xm = tuple(xm)
        row = groups.setdefault(xm, [mpq(0)] * m)
        row[ypos[j]] += c
    return [(xm, LinearForm(tuple(groups[xm]))) for xm in sorted(groups, key=_print_order)]


def reassemble(pairs, ctx: VarContext, y_indices) -> Polynomial:
    terms: dict = {}
    for xm, form in pairs:
        for k, c in enumerate(form.coeffs):
            if c:
                e = list(xm)
                e[y_indices[k]] += 1
                terms[tuple(e)] = terms.get(tuple(e), 0) + c
    return Polynomial(ctx, terms)


def divide_exact(g: Polynomial, p: Polynomial) -> Polynomial:
    """Exact quotient g/p, or NotDivisible."""
    if p.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    g._check(p)
    # lex division is exact-detection safe: remainder zero iff divisible
    key = lambda m: m
    lm = max(p.terms, key=key)
    lc = p.terms[lm]
    rem = dict(g.terms)
    quot: dict = {}
    n = len(g.ctx)
    while rem:
        m = max(rem, key=key)
        if any(m[i] < lm[i] for i in range(n)):
            raise NotDivisible(f"{p} does not divide {g}")
        qm = tuple(m[i] - lm[i] for i in range(n))
        qc = rem[m] / lc
        quot[qm] = qc
        for pm, pc in p.terms.items():
            t = tuple(a + b for a, b in zip(qm, pm))
            v = rem.get(t, 0) - qc * pc
            if v:
                rem[t] = v
            else:
                rem.pop(t, None)
    return Polynomial._raw(g.ctx, quot)


def linear_combination(coeffs, polys, ctx) -> Polynomial:
    acc: dict = {}
    for c, p in zip(coeffs, polys):
        c = Q(c)
        if not c:
            continue
        for m, v in p.terms.items():
            acc[m] = acc.get(m, 0) + c * v
    return Polynomial._raw(ctx, {m: v for m, v in acc.items() if v})


def evaluate_map(F: Sequence[Polynomial], point) -> list[mpq]:
    return [f.evaluate(point) for f in F]


def product(polys: Sequence[Polynomial], ctx: VarContext) -> Polynomial:
    out = Polynomial.constant(ctx, 1)
    for p in polys:
        out = out * p
    return out

