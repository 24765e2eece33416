"""Polynomial loop programs and their text format.

A loop file looks like::

    # Squares
    vars x1 x2 x3
    init -1 -1 1
    branch:
      x1 <- 2*x1 + x2^2 + x3
      x2 <- 2*x2 - x2^2 + 2*x3
      x3 <- 1 - x3

``init symbolic`` leaves the initial values as parameters, and each
``guard p`` line adds the loop condition ``p != 0``.  A line
``guard p = 0`` instead makes the loop algebraic (run while p = 0); these
are only used by the termination analysis.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .linalg import rank
from .poly import (ContextError, Polynomial, PolySyntaxError, Q, VarContext,
                   format_poly, monomials_up_to_degree, parse_poly)


class LoopSyntaxError(ValueError):
    def __init__(self, msg, line, col=1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


class SymbolicInitRequiredConcrete(ValueError):
    """Raised when an operation needs concrete initial values."""


@dataclass(frozen=True)
class LoopProgram:
    ctx: VarContext
    init: tuple | None            # None means symbolic
    guards: tuple = ()
    branches: tuple = ()
    inequalities: tuple = ()      # kept only to report them as unsupported
    equations: tuple = ()         # "guard p = 0" lines, for algebraic loops

    def __post_init__(self):
        n = len(self.ctx)
        if not self.branches:
            raise ValueError("a loop needs at least one branch")
        for b in self.branches:
            if len(b) != n:
                raise ValueError(f"branch has {len(b)} updates, expected {n}")
        if self.init is not None and len(self.init) != n:
            raise ValueError(f"init has {len(self.init)} values, expected {n}")

    @property
    def n(self):
        return len(self.ctx)

    @property
    def is_symbolic(self):
        return self.init is None

    @property
    def is_branching(self):
        return len(self.branches) > 1

    def require_init(self):
        if self.init is None:
            raise SymbolicInitRequiredConcrete(
                "this operation needs concrete initial values; use 'matrix' or 'classify' for symbolic loops")
        return self.init

    def guard_product(self) -> Polynomial:
        h = Polynomial.constant(self.ctx, 1)
        for g in self.guards:
            h = h * g
        return h

    def with_init(self, init) -> "LoopProgram":
        return LoopProgram(self.ctx, tuple(Q(v) for v in init), self.guards,
                           self.branches, self.inequalities, self.equations)

    def to_text(self) -> str:
        lines = ["vars " + " ".join(self.ctx.names)]
        if self.init is None:
            lines.append("init symbolic")
        else:
            lines.append("init " + " ".join(_fmt(v) for v in self.init))
        lines += [f"guard {format_poly(g)}" for g in self.guards]
        lines += [f"guard {format_poly(g)} = 0" for g in self.equations]
        lines += [f"guard {r}" for r in self.inequalities]
        for b in self.branches:
            lines.append("branch:")
            lines += [f"  {nm} <- {format_poly(p)}" for nm, p in zip(self.ctx.names, b)]
        return "\n".join(lines) + "\n"


def _fmt(v):
    v = mpq(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_loop(text: str) -> LoopProgram:
    ctx = None
    init = "missing"
    guards, ineqs, eqs, branches = [], [], [], []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        body = line.strip()
        head, _, rest = body.partition(" ")
        rest = rest.strip()
        if head == "vars":
            if ctx is not None:
                raise LoopSyntaxError("duplicate 'vars' line", lineno, col)
            try:
                ctx = VarContext.program(rest.split())
            except ContextError as e:
                raise LoopSyntaxError(str(e), lineno, col) from None
            if not len(ctx):
                raise LoopSyntaxError("no variables declared", lineno, col)
            continue
        if ctx is None:
            raise LoopSyntaxError("expected 'vars' first", lineno, col)
        if head == "init":
            if rest == "symbolic":
                init = None
            else:
                vals = rest.split()
                if len(vals) != len(ctx):
                    raise LoopSyntaxError(f"init has {len(vals)} values, expected {len(ctx)}", lineno, col)
                for v in vals:
                    if not _RATIONAL.match(v):
                        raise LoopSyntaxError(f"bad rational literal {v!r}", lineno, col + body.index(v))
                init = tuple(Q(v) for v in vals)
        elif head == "guard":
            m = re.search(r"(<=|>=|<|>)", rest)
            if m:
                ineqs.append(rest)
                continue
            if "=" in rest:
                lhs, rhs = rest.split("=", 1)
                off = col + body.index(rest)
                p = _poly(lhs, ctx, lineno, off) - _poly(rhs, ctx, lineno, off + len(lhs) + 1)
                eqs.append(p)
                continue
            guards.append(_poly(rest, ctx, lineno, col + body.index(rest)))
        elif body == "branch:":
            current = {}
            branches.append(current)
        elif "<-" in body:
            if current is None:
                raise LoopSyntaxError("update outside a 'branch:' block", lineno, col)
            lhs, rhs = (s.strip() for s in body.split("<-", 1))
            if lhs not in ctx.index:
                raise LoopSyntaxError(f"unknown variable {lhs!r}", lineno, col)
            if lhs in current:
                raise LoopSyntaxError(f"variable {lhs!r} updated twice", lineno, col)
            current[lhs] = _poly(rhs, ctx, lineno, col + body.index("<-") + 2)
        else:
            raise LoopSyntaxError(f"unrecognized line {body!r}", lineno, col)
    if ctx is None:
        raise LoopSyntaxError("missing 'vars' line", 1)
    if init == "missing":
        raise LoopSyntaxError("missing 'init' line", 1)
    if not branches:
        raise LoopSyntaxError("no 'branch:' block", 1)
    maps = []
    for k, b in enumerate(branches):
        missing = [nm for nm in ctx.names if nm not in b]
        if missing:
            raise LoopSyntaxError(f"branch {k + 1} has no update for {missing}", 1)
        maps.append(tuple(b[nm] for nm in ctx.names))
    return LoopProgram(ctx, init, tuple(guards), tuple(maps), tuple(ineqs), tuple(eqs))


def _poly(text, ctx, lineno, col):
    try:
        return parse_poly(text, ctx)
    except PolySyntaxError as e:
        raise LoopSyntaxError(str(e), lineno, col + e.pos) from None


def load_loop(path) -> LoopProgram:
    with open(path, encoding="utf-8") as fh:
        return parse_loop(fh.read())


# ---------------------------------------------------------------------------

@dataclass
class Step:
    point: tuple
    guard: mpq | None   # product of guard values at this point


def unroll(L: LoopProgram, a: Sequence | None, schedule: Sequence[int]) -> list[Step]:
    """Iterate the loop from a along a branch schedule.

    The trajectory stops after the first point whose guard value is 0,
    which is still reported since invariants hold there too.
    """
    point = tuple(Q(v) for v in (a if a is not None else L.require_init()))
    h = L.guard_product()
    out = []
    for k in range(len(schedule) + 1):
        gv = h.evaluate(point)
        out.append(Step(point, gv))
        if not gv or k == len(schedule):
            break
        b = schedule[k]
        if not 0 <= b < len(L.branches):
            raise IndexError(f"branch index {b} out of range")
        point = tuple(f.evaluate(point) for f in L.branches[b])
    return out


@dataclass(frozen=True)
class CandidateSpace:
    generators: tuple

    @classmethod
    def degree(cls, ctx: VarContext, d: int) -> "CandidateSpace":
        return cls(tuple(Polynomial.monomial(ctx, m) for m in monomials_up_to_degree(len(ctx), d)))

    def __post_init__(self):
        gens = self.generators
        if gens:
            monos = sorted({m for g in gens for m in g.terms})
            rows = [[g.coefficient(m) for m in monos] for g in gens]
            if rank(rows, len(monos)) != len(gens):
                raise ValueError("candidate generators are linearly dependent")

    def __len__(self):
        return len(self.generators)
