import random

import pytest

from oracles import random_map, random_poly
from polyinv.invariants import (IterationLimitExceeded, check_pi, check_pi_batch,
                                check_pi_branch, check_pi_report, invariant_set,
                                invariant_set_branch)
from polyinv.loop import load_loop, parse_loop, unroll
from polyinv.poly import Polynomial, VarContext, compose, parse_poly

CTX = VarContext(["x1", "x2"])
F1 = [parse_poly("10*x1 - 8*x2", CTX), parse_poly("6*x1 - 4*x2", CTX)]
G1 = parse_poly("x1^2 - x1*x2 + 9*x1^3 - 24*x1^2*x2 + 16*x1*x2^2", CTX)


def test_first_example_invariant_set():
    res = invariant_set([G1], F1)
    assert res.iterations == 1
    assert res.polys == [G1, compose([G1], F1)[0]]
    assert len(res.blocks) == 2


def test_first_example_check_fails_with_displayed_value():
    rep = check_pi_report([0, 1], G1, [], F1)
    assert not rep.holds
    assert rep.value == -480
    assert check_pi([0, 0], G1, [], F1)


def test_trivial_cases():
    assert check_pi([1, 2], Polynomial.zero(CTX), [], F1)
    assert not check_pi([1, 2], Polynomial.constant(CTX, 1), [], F1)
    assert invariant_set([Polynomial.constant(CTX, 1)], F1).iterations == 0


def test_iteration_limit():
    ctx = VarContext(["x1"])
    F = [parse_poly("x1 + 1", ctx)]
    # each step removes one of the ten roots, so the chain needs ten blocks
    g = Polynomial.constant(ctx, 1)
    for k in range(10):
        g = g * parse_poly(f"x1 - {k}", ctx)
    with pytest.raises(IterationLimitExceeded) as e:
        invariant_set([g], F, max_iter=5)
    assert len(e.value.partial) == 6
    assert invariant_set([g], F, max_iter=20).iterations == 10


def test_guarded_sum_of_powers(corpus):
    L = load_loop(corpus / "ps6.loop")
    g = parse_poly("x1 - (1/6*x2^6 - 1/2*x2^5 + 5/12*x2^4 - 1/12*x2^2)", L.ctx)
    assert check_pi(L.init, g, list(L.guards), list(L.branches[0]))
    assert not check_pi(L.init, g + parse_poly("x2", L.ctx), list(L.guards), list(L.branches[0]))


def test_zero_guard_only_constrains_the_initial_point():
    F = [parse_poly("x1 + 1", CTX), parse_poly("x2", CTX)]
    zero = [Polynomial.zero(CTX)]
    assert check_pi([3, 4], parse_poly("x1 - 3", CTX), zero, F)
    assert not check_pi([3, 4], parse_poly("x1 - 2", CTX), zero, F)


def test_branching(corpus):
    L = load_loop(corpus / "swap_or_stay.loop")
    Fs = [list(F) for F in L.branches]
    assert check_pi_branch(L.init, parse_poly("x1 + x2 - 3", L.ctx), [], Fs)
    assert check_pi_branch(L.init, parse_poly("x1*x2 - 2", L.ctx), [], Fs)
    assert not check_pi_branch(L.init, parse_poly("x1 - 1", L.ctx), [], Fs)
    res = invariant_set_branch([parse_poly("x1 - 1", L.ctx)], Fs)
    assert len(res.polys) == 2


@pytest.mark.parametrize("seed", range(15))
def test_verdicts_agree_with_unrolling(seed):
    rng = random.Random(seed)
    ctx = VarContext(["x1", "x2"])
    F = random_map(rng, ctx, 1)
    a = [rng.randint(-3, 3) for _ in range(2)]
    # half the candidates vanish on the first few points by construction
    g = random_poly(rng, ctx, 2, terms=3)
    if seed % 2:
        g = g - g.evaluate(a)
    L = parse_loop("vars x1 x2\ninit " + " ".join(map(str, a)) + "\nbranch:\n"
                   + "".join(f"  {nm} <- {f}\n" for nm, f in zip(ctx.names, F)))
    verdict = check_pi(a, g, [], F)
    values = [g.evaluate(s.point) for s in unroll(L, None, [0] * 12)]
    if verdict:
        assert not any(values)
    else:
        assert any(values)


@pytest.mark.parametrize("seed", range(8))
def test_batch_equals_individual(seed):
    rng = random.Random(50 + seed)
    ctx = VarContext(["x1", "x2"])
    F = random_map(rng, ctx, 1)
    a = [rng.randint(-2, 2) for _ in range(2)]
    gs = [random_poly(rng, ctx, 2, terms=2) for _ in range(4)]
    gs = [g - g.evaluate(a) for g in gs] + [parse_poly("x1", ctx) * 0]
    assert check_pi_batch(a, gs, [], F) == [check_pi(a, g, [], F) for g in gs]
