"""Invariants of the form f(x) - f(a), valid for every initial value.

f(x) - f(a) is an invariant for all a exactly when f∘F_i = f for every
branch, so no Gröbner basis is needed: write g = Σ y_j g_j, require
g(x, y) - g(F_i(x), y) = 0 coefficient-wise in x, and solve the
resulting homogeneous linear system in y.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .linalg import canonical_span, kernel_of_linear_forms
from .poly import (NotDivisible, Polynomial, VarContext, coefficients_wrt_x, compose,
                   divide_exact, format_poly, linear_combination)


class NotOfForm(ValueError):
    """The scaled polynomial does not reduce to a fixed f."""


@dataclass(frozen=True)
class GeneralInvariant:
    f: Polynomial

    def at(self, a) -> Polynomial:
        """The concrete invariant f(x) - f(a)."""
        return self.f - self.f.evaluate(a)

    def symbolic(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"a{i + 1}" for i in range(len(self.f.ctx))]
            if any(nm in self.f.ctx.index for nm in names):
                names = [f"a_{nm}" for nm in self.f.ctx.names]
        fa = Polynomial._raw(VarContext(names), self.f.terms)
        return f"{format_poly(self.f)} - ({format_poly(fa)})"

    def __str__(self):
        return self.symbolic()


def invariance_forms(gs, Fs):
    """Coefficients in x of g(x, y) - g(F_i(x), y) for g = Σ y_j g_j, over all maps."""
    ctx = gs[0].ctx
    n, m = len(ctx), len(gs)
    ext = ctx.extend(*[f"y{j + 1}" for j in range(m)])
    g = Polynomial.zero(ext)
    for j, gj in enumerate(gs):
        g = g + Polynomial.var(ext, n + j) * gj.embed(ext)
    y_idx = list(range(n, n + m))
    forms = []
    for F in Fs:
        D = g - compose([g], [f.embed(ext) for f in F])[0]
        forms += [form for _, form in coefficients_wrt_x(D, y_idx)]
    return forms


def general_invariants(gs: Sequence[Polynomial], Fs) -> list[GeneralInvariant]:
    """All f in span(gs) with f∘F_i = f for every map, modulo constants."""
    gs = list(gs)
    if not gs:
        return []
    if Fs and isinstance(Fs[0], Polynomial):
        Fs = [Fs]
    ctx = gs[0].ctx
    forms = invariance_forms(gs, Fs)
    kernel = kernel_of_linear_forms(forms, len(gs))
    fs = [linear_combination(c, gs, ctx) for c in canonical_span(kernel, len(gs))]
    # f(x) - f(a) ignores constants: drop them and re-echelonize on monomials
    fs = [f - f.constant_term() for f in fs]
    fs = [f for f in fs if f]
    if not fs:
        return []
    monos = sorted({m for f in fs for m in f.terms}, key=lambda m: (sum(m), tuple(-e for e in m)))
    rows = [[f.coefficient(m) for m in monos] for f in fs]
    out = []
    for row in canonical_span(rows, len(monos)):
        out.append(GeneralInvariant(Polynomial(ctx, {m: c for m, c in zip(monos, row) if c})))
    return out


def check_fixed_identity(f: Polynomial, Fs) -> bool:
    if Fs and isinstance(Fs[0], Polynomial):
        Fs = [Fs]
    return all(compose([f], F)[0] == f for F in Fs)


def reduce_scaled_form(P: Polynomial, g: Polynomial, Fs) -> GeneralInvariant:
    """If g = P·f with f fixed by every map, P(a)·f(x) - g(a) is invariant for all a."""
    if not P:
        raise ZeroDivisionError("P must be nonzero")
    try:
        f = divide_exact(g, P)
    except NotDivisible:
        raise NotOfForm(f"{format_poly(P)} does not divide {format_poly(g)}") from None
    if not check_fixed_identity(f, Fs):
        raise NotOfForm(f"{format_poly(f)} is not fixed by the loop maps")
    return GeneralInvariant(f)
