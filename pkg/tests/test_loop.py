import pytest

from polyinv.loop import (CandidateSpace, LoopSyntaxError, SymbolicInitRequiredConcrete, load_loop,
                          parse_loop, unroll)
from polyinv.poly import Q, VarContext, parse_poly


def test_corpus_files_parse(corpus):
    for path in sorted(corpus.glob("*.loop")):
        L = load_loop(path)
        assert L.branches and all(len(F) == L.n for F in L.branches)


def test_round_trip_through_text(corpus):
    for path in sorted(corpus.glob("*.loop")):
        L = load_loop(path)
        assert parse_loop(L.to_text()) == L


def test_squares_unrolls_to_known_points(corpus):
    L = load_loop(corpus / "squares.loop")
    pts = [s.point for s in unroll(L, None, [0, 0])]
    assert pts[0] == (-1, -1, 1)
    assert pts[1] == (0, -1, 0)
    assert pts[2] == (1, -3, 1)


def test_unroll_stops_where_guard_vanishes():
    L = parse_loop("vars x1\ninit 0\nguard x1 - 2\nbranch:\n  x1 <- x1 + 1\n")
    steps = unroll(L, None, [0] * 10)
    assert [s.point[0] for s in steps] == [0, 1, 2]
    assert steps[-1].guard == 0


def test_branch_indices_checked():
    L = parse_loop("vars x1\ninit 0\nbranch:\n  x1 <- x1 + 1\n")
    with pytest.raises(IndexError):
        unroll(L, None, [1])


def test_symbolic_init_requires_value(corpus):
    L = load_loop(corpus / "fib1.loop")
    assert L.is_symbolic
    with pytest.raises(SymbolicInitRequiredConcrete):
        L.require_init()
    assert L.with_init([1, 2, 3]).require_init() == (Q(1), Q(2), Q(3))


def test_guard_kinds_are_separated():
    L = parse_loop("vars x1 x2\ninit 1 1\nguard x1 - x2 = 0\nguard x1 >= 0\nguard x2\n"
                   "branch:\n  x1 <- x2\n  x2 <- x1\n")
    assert len(L.equations) == 1 and len(L.inequalities) == 1 and len(L.guards) == 1


@pytest.mark.parametrize("text, line", [
    ("init 1\n", 1),
    ("vars x1\ninit 1 2\nbranch:\n  x1 <- x1\n", 2),
    ("vars x1\ninit 1\nbranch:\n  x1 <- x1 +\n", 4),
    ("vars x1\ninit 1\nbranch:\n  x9 <- 1\n", 4),
    ("vars x1\ninit 1\n  x1 <- 1\n", 3),
    ("vars x1 x2\ninit 1 1\nbranch:\n  x1 <- 1\n", 1),
    ("vars x1\ninit abc\nbranch:\n  x1 <- 1\n", 2),
    ("vars z\ninit 1\nbranch:\n  z <- 1\n", 1),
])
def test_syntax_errors_report_lines(text, line):
    with pytest.raises(LoopSyntaxError) as e:
        parse_loop(text)
    assert e.value.line == line


def test_candidate_space():
    ctx = VarContext(["x1", "x2"])
    assert len(CandidateSpace.degree(ctx, 2)) == 6
    assert len(CandidateSpace.degree(ctx, 0)) == 1
    with pytest.raises(ValueError):
        CandidateSpace((parse_poly("x1", ctx), parse_poly("2*x1", ctx)))
