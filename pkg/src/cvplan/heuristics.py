"""Heuristics over states. Currently: goal counting.

A heuristic maps (state, problem) to a nonnegative estimate. The engine binds
the problem once and calls the bound form per state.
"""

from __future__ import annotations

from typing import Callable, Tuple

from .model import And, Constraint, Problem, State, eval_constraint

HeuristicFn = Callable[[State, Problem], float]


def goal_conjuncts(goal: Constraint) -> Tuple[Constraint, ...]:
    """Flatten nested conjunctions; any non-conjunction node is one conjunct."""
    if isinstance(goal, And):
        out = []
        for item in goal.items:
            out.extend(goal_conjuncts(item))
        return tuple(out)
    return (goal,)


def goal_count(state: State, problem: Problem) -> float:
    """Number of unsatisfied top-level goal conjuncts."""
    return float(sum(
        0 if eval_constraint(con, state, {}) else 1
        for con in goal_conjuncts(problem.goal)
    ))


class GoalCountHeuristic:
    """goal_count with the conjunct list precomputed once per problem."""

    def __init__(self, problem: Problem):
        self._conjuncts = goal_conjuncts(problem.goal)

    def __call__(self, state: State) -> float:
        unsat = 0
        for con in self._conjuncts:
            if not eval_constraint(con, state, {}):
                unsat += 1
        return float(unsat)


HEURISTICS = {
    "gc": GoalCountHeuristic,
}


def make_heuristic(name: str, problem: Problem) -> Callable[[State], float]:
    """Bind a registered heuristic to a problem."""
    try:
        factory = HEURISTICS[name]
    except KeyError:
        raise ValueError(f"unknown heuristic: {name!r}") from None
    return factory(problem)
