"""Non-termination of algebraic loops ``while g_1 = ... = g_k = 0: x <- F(x)``.

Such a loop runs forever from a iff a lies in the invariant set of
V(g_1, ..., g_k) under F.
"""
from __future__ import annotations

from dataclasses import dataclass

from .invariants import DEFAULT_MAX_ITER, invariant_set
from .poly import Q, format_poly

NEVER_TERMINATES = "NeverTerminates"
TERMINATES = "Terminates"


@dataclass
class TerminationVerdict:
    verdict: str
    polys: list
    iterations: int
    witness: tuple | None = None   # (polynomial, value at a) when the loop terminates

    @property
    def never_terminates(self):
        return self.verdict == NEVER_TERMINATES

    def witness_json(self):
        if self.witness is None:
            return {}
        p, v = self.witness
        return {"polynomial": format_poly(p), "value": str(v)}


def never_terminates_algebraic(a, gs, F, max_iter=DEFAULT_MAX_ITER) -> TerminationVerdict:
    res = invariant_set(list(gs), F, max_iter)
    point = [Q(v) for v in a]
    for p in res.polys:
        v = p.evaluate(point)
        if v:
            return TerminationVerdict(TERMINATES, res.polys, res.iterations, (p, v))
    return TerminationVerdict(NEVER_TERMINATES, res.polys, res.iterations)
