import random

from polyinv.loop import load_loop, unroll
from polyinv.poly import Q, VarContext, parse_poly
from polyinv.termination import NEVER_TERMINATES, TERMINATES, never_terminates_algebraic


def test_diagonal_is_stable(corpus):
    L = load_loop(corpus / "diagonal.loop")
    v = never_terminates_algebraic(L.init, list(L.equations), list(L.branches[0]))
    assert v.verdict == NEVER_TERMINATES and v.witness is None


def test_off_diagonal_terminates_immediately(corpus):
    L = load_loop(corpus / "diagonal_off.loop")
    v = never_terminates_algebraic(L.init, list(L.equations), list(L.branches[0]))
    assert v.verdict == TERMINATES
    assert v.witness[1] == -1
    assert v.witness_json() == {"polynomial": "x1 - x2", "value": "-1"}


def test_verdicts_match_bounded_unrolling(corpus):
    L = load_loop(corpus / "example1.loop")
    g = parse_poly("x1^2 - x1*x2 + 9*x1^3 - 24*x1^2*x2 + 16*x1*x2^2", L.ctx)
    F = list(L.branches[0])
    rng = random.Random(3)
    pts = [(0, 0), (0, 1), (1, 1), (4, 3)]
    pts += [(Q(rng.randint(-9, 9)) / rng.randint(1, 5), Q(rng.randint(-9, 9))) for _ in range(8)]
    for a in pts:
        v = never_terminates_algebraic(a, [g], F)
        N = v.iterations
        vals = [g.evaluate(s.point) for s in unroll(L.with_init(a), None, [0] * max(50, 2 * N))]
        if v.never_terminates:
            assert not any(vals)
        else:
            assert any(vals[:N + 2])


def test_single_variable():
    ctx = VarContext(["x1"])
    F = [parse_poly("x1^2", ctx)]
    g = parse_poly("x1^2 - x1", ctx)
    assert never_terminates_algebraic([1], [g], F).never_terminates
    assert never_terminates_algebraic([0], [g], F).never_terminates
    assert not never_terminates_algebraic([2], [g], F).never_terminates
