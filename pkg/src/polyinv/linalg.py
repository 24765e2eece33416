"""Exact linear algebra over Q and over polynomial entries.

Numeric matrices are plain lists of rows of ``mpq``.  Polynomial matrices
use :class:`PolyMatrix` and fraction-free (Bareiss) elimination, relying on
exact polynomial division.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from gmpy2 import invert, isqrt, mpq, mpz

from .poly import (LinearForm, Polynomial, Q, VarContext, coefficients_wrt_x,
                   divide_exact, format_poly)


# ---------------------------------------------------------------------------
# matrices over Q

def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Gauss-Jordan reduced row echelon form.  Returns (R, pivot_columns)."""
    R = [[Q(v) for v in r] for r in rows]
    if ncols is None:
        ncols = len(R[0]) if R else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(R):
            break
        p = next((i for i in range(r, len(R)) if R[i][c]), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        piv = R[r][c]
        if piv != 1:
            inv = 1 / piv
            R[r] = [v * inv for v in R[r]]
        row = R[r]
        for i in range(len(R)):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], row)]
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(rows, ncols=None) -> int:
    return len(rref(rows, ncols)[1])


def kernel_from_rref(R, pivots, ncols):
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [mpq(0)] * ncols
        v[f] = mpq(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def kernel_basis(rows: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Right kernel; one vector per free column, 1 there and 0 at other free columns."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    R, piv = rref(rows, ncols)
    return kernel_from_rref(R, piv, ncols)


def canonical_span(vectors, ncols=None):
    """Reduced echelon basis of the span of ``vectors`` (first nonzero entry 1)."""
    if not vectors:
        return []
    R, _ = rref(vectors, ncols)
    return R


def fraction_free_rank(rows) -> int:
    """Rank by integer Bareiss elimination; independent of :func:`rref`."""
    M = []
    for r in rows:
        r = [Q(v) for v in r]
        den = mpz(1)
        for v in r:
            den = den * v.denominator // _gcd(den, v.denominator)
        M.append([mpz(v * den) for v in r])
    if not M:
        return 0
    nr, nc = len(M), len(M[0])
    prev = mpz(1)
    k = 0
    for c in range(nc):
        if k == nr:
            break
        p = next((i for i in range(k, nr) if M[i][c]), None)
        if p is None:
            continue
        M[k], M[p] = M[p], M[k]
        for i in range(k + 1, nr):
            for j in range(c + 1, nc):
                M[i][j] = (M[i][j] * M[k][c] - M[i][c] * M[k][j]) // prev
            M[i][c] = mpz(0)
        prev = M[k][c]
        k += 1
    return k


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def mat_vec(rows, v):
    return [sum((Q(a) * b for a, b in zip(r, v)), mpq(0)) for r in rows]


def kernel_of_linear_forms(forms: Sequence[LinearForm], m: int) -> list[list]:
    for f in forms:
        if not f.is_homogeneous():
            raise ValueError("kernel_of_linear_forms needs homogeneous forms")
        if len(f.coeffs) != m:
            raise ValueError("form arity mismatch")
    return kernel_basis([list(f.coeffs) for f in forms], m)


def solve_affine(rows, rhs):
    """One solution of rows·v = rhs, or None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, piv = rref(aug, ncols + 1)
    if piv and piv[-1] == ncols:
        return None
    v = [mpq(0)] * ncols
    for row, pc in zip(R, piv):
        v[pc] = row[ncols]
    return v


# ---------------------------------------------------------------------------
# modular helpers

def mod_q(c, p):
    """Image of a rational in Z/p; raises ZeroDivisionError if p divides the denominator."""
    c = Q(c)
    d = c.denominator % p
    if not d:
        raise ZeroDivisionError("denominator vanishes mod p")
    return int(c.numerator % p) * int(invert(d, p)) % p


def rref_mod(rows, ncols, p):
    R = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(R):
            break
        piv = next((i for i in range(r, len(R)) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = pow(R[r][c], -1, p)
        R[r] = [v * inv % p for v in R[r]]
        row = R[r]
        for i in range(len(R)):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [(a - f * b) % p for a, b in zip(R[i], row)]
        pivots.append(c)
        r += 1
    return R[:r], pivots


def kernel_mod(rows, ncols, p):
    R, piv = rref_mod(rows, ncols, p)
    pset = set(piv)
    out = []
    for f in range(ncols):
        if f in pset:
            continue
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(R, piv):
            v[pc] = (-row[f]) % p
        out.append(v)
    return out, piv


def rational_reconstruction(a, m):
    """Return n/d with n ≡ a·d (mod m) and |n|, d ≤ sqrt(m/2), or None."""
    a %= m
    if a == 0:
        return mpq(0)
    bound = int(isqrt(mpz(m // 2)))
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return mpq(r1, s1)


# ---------------------------------------------------------------------------
# polynomial matrices

@dataclass
class PolyMatrix:
    """Matrix of polynomials, optionally over one common denominator."""

    rows: list
    ctx: VarContext
    denominator: Polynomial | None = None

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def evaluate(self, point) -> list[list]:
        vals = [[e.evaluate(point) for e in r] for r in self.rows]
        if self.denominator is not None:
            d = self.denominator.evaluate(point)
            if not d:
                raise ZeroDivisionError("denominator vanishes at point")
            vals = [[v / d for v in r] for r in vals]
        return vals

    def column(self, j):
        return [r[j] for r in self.rows]

    def submatrix(self, rows, cols):
        return PolyMatrix([[self.rows[i][j] for j in cols] for i in rows], self.ctx)

    def to_strings(self):
        body = [[format_poly(e) for e in r] for r in self.rows]
        if self.denominator is None:
            return body
        return {"numerator": body, "denominator": format_poly(self.denominator)}

    def __str__(self):
        lines = ["[" + ", ".join(format_poly(e) for e in r) + "]" for r in self.rows]
        s = "\n".join(lines)
        if self.denominator is not None and not self.denominator == 1:
            s += f"\n/ ({format_poly(self.denominator)})"
        return s


def matrix_from_linear_polys(ps: Sequence[Polynomial], y_indices: Sequence[int],
                             xctx: VarContext) -> PolyMatrix:
    """Row j holds the coefficients of y_1..y_m in ps[j], as polynomials over xctx.

    Every variable of ps outside y_indices must appear in xctx by name.
    """
    m = len(y_indices)
    rows = []
    for p in ps:
        row = [dict() for _ in range(m)]
        keep = [i for i, nm in enumerate(p.ctx.names) if i not in set(y_indices)]
        pos = [xctx.index.get(p.ctx.names[i]) for i in keep]
        for xm, form in coefficients_wrt_x(p, y_indices):
            e = [0] * len(xctx)
            for i, k in zip(keep, pos):
                if xm[i]:
                    if k is None:
                        raise ValueError(f"variable {p.ctx.names[i]} not in target context")
                    e[k] = xm[i]
            e = tuple(e)
            for j, c in enumerate(form.coeffs):
                if c:
                    row[j][e] = row[j].get(e, 0) + c
        rows.append([Polynomial(xctx, t) for t in row])
    return PolyMatrix(rows, xctx)


def det_bareiss(M: Sequence[Sequence[Polynomial]], ctx: VarContext) -> Polynomial:
    """Determinant of a square polynomial matrix by fraction-free elimination."""
    n = len(M)
    if n == 0:
        return Polynomial.constant(ctx, 1)
    A = [list(r) for r in M]
    sign = 1
    prev = Polynomial.constant(ctx, 1)
    for k in range(n - 1):
        p = next((i for i in range(k, n) if A[i][k]), None)
        if p is None:
            return Polynomial.zero(ctx)
        if p != k:
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j] = divide_exact(num, prev) if not prev == 1 else num
            A[i][k] = Polynomial.zero(ctx)
        prev = A[k][k]
    d = A[n - 1][n - 1]
    return d if sign == 1 else -d


def poly_rank(A: PolyMatrix) -> int:
    """Rank over the field of rational functions, by Bareiss elimination."""
    M = [list(r) for r in A.rows]
    if not M:
        return 0
    ctx = A.ctx
    nr, nc = len(M), len(M[0])
    prev = Polynomial.constant(ctx, 1)
    k = 0
    for c in range(nc):
        if k == nr:
            break
        p = next((i for i in range(k, nr) if M[i][c]), None)
        if p is None:
            continue
        M[k], M[p] = M[p], M[k]
        for i in range(k + 1, nr):
            for j in range(c + 1, nc):
                num = M[i][j] * M[k][c] - M[i][c] * M[k][j]
                M[i][j] = divide_exact(num, prev) if not prev == 1 else num
            M[i][c] = Polynomial.zero(ctx)
        prev = M[k][c]
        k += 1
    return k


def minors(A: PolyMatrix, s: int):
    """All s×s minors as (rows, cols, det), index sets in lexicographic order."""
    nr, nc = A.shape
    if not 0 <= s <= min(nr, nc):
        raise ValueError(f"minor size {s} out of range for {nr}x{nc} matrix")
    out = []
    for R in combinations(range(nr), s):
        for C in combinations(range(nc), s):
            sub = [[A.rows[i][j] for j in C] for i in R]
            out.append((R, C, det_bareiss(sub, A.ctx)))
    return out


def adjugate(M: Sequence[Sequence[Polynomial]], ctx: VarContext):
    n = len(M)
    if n == 1:
        return [[Polynomial.constant(ctx, 1)]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [[M[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            d = det_bareiss(sub, ctx)
            adj[j][i] = d if (i + j) % 2 == 0 else -d
    return adj


@dataclass
class ParamCell:
    """Points where all of ``equations`` vanish and ``inequation`` does not.

    ``Z`` has m rows; at such points its columns form a kernel basis of the
    parametric matrix.  ``rank`` is the rank of the matrix on the cell and
    (rows, cols) index the nonsingular block used.
    """

    equations: list
    inequation: Polynomial
    Z: PolyMatrix
    rank: int
    rows: tuple = ()
    cols: tuple = ()
    templates: list = field(default_factory=list)

    def contains(self, point) -> bool:
        return (all(not e.evaluate(point) for e in self.equations)
                and bool(self.inequation.evaluate(point)))

    def kernel_at(self, point):
        Zp = self.Z.evaluate(point)
        return [[Zp[i][j] for i in range(len(Zp))] for j in range(len(Zp[0]) if Zp else 0)]


def _kernel_block(A: PolyMatrix, R, C):
    """Columns spanning ker A wherever det A[R, C] ≠ 0 and rank A = |R|.

    With M = A[R, C] and M' = A[R, C'] for the complementary columns C',
    the kernel is x_C = -M^{-1} M' x_{C'}.  Scaling by det M gives the
    polynomial block [-adj(M)·M' ; det(M)·I].
    """
    ctx = A.ctx
    m = A.shape[1]
    C = list(C)
    Cp = [j for j in range(m) if j not in C]
    M = [[A.rows[i][j] for j in C] for i in R]
    d = det_bareiss(M, ctx)
    adj = adjugate(M, ctx) if M else []
    Mp = [[A.rows[i][j] for j in Cp] for i in R]
    zero = Polynomial.zero(ctx)
    Z = [[zero] * len(Cp) for _ in range(m)]
    for a, i in enumerate(C):
        for b in range(len(Cp)):
            acc = zero
            for k in range(len(R)):
                acc = acc + adj[a][k] * Mp[k][b]
            Z[i][b] = -acc
    for b, j in enumerate(Cp):
        Z[j][b] = d
    return PolyMatrix(Z, ctx), d


def parametric_kernel_cells(A: PolyMatrix, radical_test=None, simplify=None, split=True, tidy=True):
    """Cover parameter space by cells on which ker A has a uniform basis.

    Strata run by rank s from the generic rank down to 0.  In stratum s the
    equations are the (s+1)-minors; a block M is taken, in lexicographic
    order of (rows, cols), unless its cell is empty or already covered by
    earlier blocks of the same stratum.  ``radical_test(f, S)`` decides
    f ∈ √⟨S⟩; ``simplify(S)`` may replace an equation list by an
    equivalent one (same zero set).  With ``split`` each cell is further
    cut along the factors of its equations, one piece per component, and
    with ``tidy`` each kernel column is divided by its content.
    """
    if radical_test is None:
        from .groebner import in_radical

        def radical_test(f, S):
            return in_radical([f], S)
    if simplify is None:
        from .groebner import simplify_equations as simplify
    nr, nc = A.shape
    ctx = A.ctx
    r = poly_rank(A)
    cells = []
    for s in range(r, -1, -1):
        if s == min(nr, nc):
            eqs = []
        else:
            eqs = [d for _, _, d in minors(A, s + 1) if d]
            eqs = simplify(eqs)
        if any(e.is_constant() for e in eqs):
            continue  # stratum empty
        chosen = []
        if s == 0:
            Z, d = _kernel_block(A, (), ())
            if tidy:
                Z = primitive_columns(Z)
            cells.append(ParamCell(eqs, d, Z, 0))
            continue
        for R in combinations(range(nr), s):
            for C in combinations(range(nc), s):
                M = [[A.rows[i][j] for j in C] for i in R]
                d = det_bareiss(M, ctx)
                if not d:
                    continue
                if eqs and radical_test(d, eqs):
                    continue  # empty cell
                if chosen and radical_test(d, eqs + chosen):
                    continue  # covered
                Z, d = _kernel_block(A, R, C)
                if tidy:
                    Z = primitive_columns(Z)
                cells.append(ParamCell(eqs, d, Z, s, tuple(R), tuple(C)))
                chosen.append(d)
        # nothing of lower rank remains once the chosen blocks have no common zero
        if chosen and radical_test(Polynomial.constant(ctx, 1), eqs + chosen):
            break
    if split:
        cells = [piece for c in cells for piece in _split_cell(c, radical_test, simplify)]
    if tidy:
        cells = [_tidy_cell(c) for c in cells]
    return cells


def _squarefree_primitive(p: Polynomial) -> Polynomial:
    """Product of the distinct irreducible factors, with integer content removed."""
    if p.is_constant():
        return Polynomial.constant(p.ctx, 1)
    out = Polynomial.constant(p.ctx, 1)
    for f in _factors(p):
        out = out * f
    return _integer_primitive(out)


def _integer_primitive(p: Polynomial) -> Polynomial:
    den, num = mpz(1), mpz(0)
    for c in p.terms.values():
        den = den * c.denominator // _gcd(den, c.denominator)
    for c in p.terms.values():
        num = _gcd(num, abs(mpz(c * den)))
    return p.scale(mpq(den, num)) if num else p


def _tidy_cell(cell: ParamCell) -> ParamCell:
    """Shorter but equivalent presentation of a cell.

    Entries and the inequation are only ever evaluated on V(equations),
    where they agree with their normal forms modulo the (reduced Gröbner
    basis) equations.  The inequation only matters through its zero set.
    """
    from .groebner import GREVLEX, GroebnerBasis, normal_form

    ctx = cell.Z.ctx
    if cell.equations:
        G = GroebnerBasis(list(cell.equations), GREVLEX, ctx)
        nf = lambda p: normal_form(p, G) if p else p
    else:
        nf = lambda p: p
    ineq = _squarefree_primitive(nf(cell.inequation))
    Z = PolyMatrix([[nf(e) for e in row] for row in cell.Z.rows], ctx, cell.Z.denominator)
    eqs = [_integer_primitive(e) for e in cell.equations]
    return ParamCell(eqs, ineq, primitive_columns(Z), cell.rank, cell.rows, cell.cols)


def _to_sympy(p: Polynomial):
    import sympy

    gens = sympy.symbols(p.ctx.names)
    terms = {m: sympy.Rational(int(c.numerator), int(c.denominator)) for m, c in p.terms.items()}
    return sympy.Poly.from_dict(terms or {(0,) * len(gens): 0}, *gens, domain="QQ")


def _from_sympy(f, ctx):
    return Polynomial(ctx, {tuple(m): mpq(int(c.p), int(c.q)) for m, c in f.terms() if c})


def _factors(p: Polynomial):
    """Distinct non-constant irreducible factors over Q (via sympy)."""
    _, facs = _to_sympy(p).factor_list()
    out = [_from_sympy(f, p.ctx) for f, _mult in facs]
    return [q for q in out if not q.is_constant()]


def primitive_columns(Z: PolyMatrix) -> PolyMatrix:
    """Divide each column by the gcd of its entries, made monic with integer content removed.

    Where the columns form a kernel basis no column vanishes, so the
    common factor is nonzero there and the result is a basis too.
    """
    rows = [list(r) for r in Z.rows]
    ncols = Z.shape[1]
    for j in range(ncols):
        col = [rows[i][j] for i in range(len(rows)) if rows[i][j]]
        if not col:
            continue
        g = _to_sympy(col[0])
        for e in col[1:]:
            g = g.gcd(_to_sympy(e))
        gp = _from_sympy(g, Z.ctx)
        for i in range(len(rows)):
            if rows[i][j]:
                rows[i][j] = divide_exact(rows[i][j], gp)
        # clear denominators and integer content, keep the sign of the first entry
        entries = [rows[i][j] for i in range(len(rows)) if rows[i][j]]
        den = mpz(1)
        num = mpz(0)
        for e in entries:
            for c in e.terms.values():
                den = den * c.denominator // _gcd(den, c.denominator)
        for e in entries:
            for c in e.terms.values():
                num = _gcd(num, abs(mpz(c * den)))
        scale = mpq(den, num) if num else mpq(1)
        for i in range(len(rows)):
            rows[i][j] = rows[i][j].scale(scale)
    return PolyMatrix(rows, Z.ctx, Z.denominator)


def _split_cell(cell, radical_test, simplify):
    """Split a cell along factors of its equations: V(I) = ∪ V(I + f_i)."""
    todo, done, seen = [cell.equations], [], set()
    while todo:
        eqs = todo.pop(0)
        parts = None
        for e in eqs:
            fs = _factors(e)
            if len(fs) > 1:
                parts = fs
                break
        if parts is None:
            key = frozenset(eqs)
            if key not in seen:
                seen.add(key)
                done.append(eqs)
            continue
        for f in parts:
            sub = simplify(eqs + [f])
            if any(q.is_constant() for q in sub):
                continue
            if radical_test(cell.inequation, sub):
                continue  # no point of this piece keeps the block nonsingular
            todo.append(sub)
    return [ParamCell(eqs, cell.inequation, cell.Z, cell.rank, cell.rows, cell.cols)
            for eqs in done]
