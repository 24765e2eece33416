import random

import pytest

from polyinv.general import (GeneralInvariant, NotOfForm, check_fixed_identity, general_invariants,
                             invariance_forms, reduce_scaled_form)
from polyinv.generate import truncated_ideal
from polyinv.invariants import check_pi_branch
from polyinv.linalg import canonical_span, kernel_of_linear_forms
from polyinv.loop import CandidateSpace, load_loop
from polyinv.poly import Polynomial, VarContext, compose, parse_poly


def _gens(ctx, d):
    return list(CandidateSpace.degree(ctx, d).generators)


def _maps(L):
    return [list(F) for F in L.branches]


def test_fib1_degree_four(corpus):
    L = load_loop(corpus / "fib1.loop")
    invs = general_invariants(_gens(L.ctx, 4), _maps(L))
    assert len(invs) == 1
    want = parse_poly("x1^2 + x2^2 + x3^2 - 2*x1*x2*x3", L.ctx)
    f = invs[0].f
    ratio = f.coefficient((2, 0, 0)) / want.coefficient((2, 0, 0))
    assert f == want.scale(ratio)


def test_raw_kernel_includes_constants(corpus):
    L = load_loop(corpus / "fib1.loop")
    gs = _gens(L.ctx, 4)
    forms = invariance_forms(gs, _maps(L))
    assert len(gs) == 35
    # the constant generator and the fixed quartic
    assert len(kernel_of_linear_forms(forms, len(gs))) == 2


def test_every_output_is_fixed_by_all_maps(corpus):
    for name, d in [("nagata", 3), ("markov", 4), ("swap_or_stay", 2)]:
        L = load_loop(corpus / f"{name}.loop")
        for inv in general_invariants(_gens(L.ctx, d), _maps(L)):
            assert check_fixed_identity(inv.f, _maps(L))
            for F in _maps(L):
                assert compose([inv.f], F)[0] - inv.f == Polynomial.zero(L.ctx)


def test_agrees_with_checker_and_generator(corpus):
    L = load_loop(corpus / "swap_or_stay.loop")
    rng = random.Random(7)
    gs = _gens(L.ctx, 2)
    invs = general_invariants(gs, _maps(L))
    for _ in range(10):
        a = [rng.randint(-9, 9) for _ in range(L.n)]
        basis = truncated_ideal(a, gs, [], _maps(L))
        for inv in invs:
            g = inv.at(a)
            assert check_pi_branch(a, g, [], _maps(L))
            row = [g.coefficient(next(iter(m.terms))) for m in gs]
            assert canonical_span(basis.coefficients + [row], len(gs)) == basis.coefficients


def test_identity_loop(corpus):
    L = load_loop(corpus / "identity.loop")
    invs = general_invariants(_gens(L.ctx, 1), _maps(L))
    assert [inv.symbolic() for inv in invs] == ["x1 - (a1)", "x2 - (a2)"]


def test_symbolic_names_avoid_clashes():
    ctx = VarContext(["a1", "b"])
    inv = GeneralInvariant(parse_poly("a1 + b", ctx))
    assert inv.symbolic() == "a1 + b - (a_a1 + a_b)"


def test_fixed_identity_examples():
    ctx = VarContext(["x1"])
    assert not check_fixed_identity(parse_poly("x1", ctx), [parse_poly("x1 + 1", ctx)])


def test_reduce_scaled_form(corpus):
    L = load_loop(corpus / "fib1.loop")
    f = parse_poly("x1^2 + x2^2 + x3^2 - 2*x1*x2*x3", L.ctx)
    one = Polynomial.constant(L.ctx, 1)
    x1 = Polynomial.var(L.ctx, 0)
    assert reduce_scaled_form(one, f, _maps(L)).f == f
    assert reduce_scaled_form(x1, x1 * f, _maps(L)).f == f
    with pytest.raises(NotOfForm):
        reduce_scaled_form(x1, x1 * x1 + 1, _maps(L))
    with pytest.raises(NotOfForm):
        reduce_scaled_form(x1, x1 * x1, _maps(L))
    with pytest.raises(ZeroDivisionError):
        reduce_scaled_form(Polynomial.zero(L.ctx), f, _maps(L))
