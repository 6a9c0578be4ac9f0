"""Best-first search with delayed partial expansion, plus an MCTS baseline.

The search keeps one node per generated state in a priority queue. Extracting
a node does not enumerate its (generally infinite) decision set; instead one
decision is drawn from the configured sampler, yielding at most one new
child, and the node goes back into the queue with its priority rectified
upward. The per-node counter n tracks how many times the node has been
partially expanded; priorities are

    sg mode:  f = h(s) + r(n)
    sa mode:  f = g + h(s) + r(n)

with g the number of actions from the root and r one of the rectifiers below
(r(0) = 0, strictly increasing). Goal states are recognized when extracted,
not when generated. Duplicate successors (by canonical state key) are
discarded, and a node whose finite decision set is exhausted is dropped
instead of reinserted, so searches over purely finite spaces terminate.

run_mcts implements the baseline: UCT with progressive widening, which caps
a node's children at ceil(k * visits**alpha) so sampling can widen the tree
gradually inside an infinite decision space.
"""

from __future__ import annotations

import heapq
import itertools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .heuristics import make_heuristic
from .model import Decision, Problem, State, goal_test, state_key
from .sampling import NodeSamplerState, SamplerKind, make_sampler, sample_uniform

#: priority rectifiers by CLI tag; each maps the partial-expansion counter
#: n >= 0 to a nonnegative increment with r(0) = 0
RECTIFIERS: Dict[str, Callable[[int], float]] = {
    "lin": lambda n: float(n),
    "qua": lambda n: float(n * n),
    "log": lambda n: math.log1p(n),
}

MODES = ("sg", "sa")

#: absolute tolerance for floating-point assertions on f values
F_TOL = 1e-9


class SearchInvariantError(Exception):
    """An internal engine invariant failed while assertions were enabled."""


@dataclass
class SearchConfig:
    mode: str = "sg"
    rectifier: str = "log"
    sampler: SamplerKind = field(default_factory=SamplerKind)
    heuristic: str = "gc"
    seed: int = 0
    time_limit: float = 600.0
    expansion_limit: Optional[int] = None
    duplicate_detection: bool = True
    assertions: bool = False


class SearchNode:
    """Search tree node; children are kept for instrumentation."""

    __slots__ = ("uid", "state", "key", "g", "h", "n", "f", "parent",
                 "decision", "sampler_state", "children", "dropped")

    def __init__(self, uid: int, state: State, key, g: int, h: float,
                 parent: Optional["SearchNode"], decision: Optional[Decision]):
        self.uid = uid
        self.state = state
        self.key = key
        self.g = g
        self.h = h
        self.n = 0
        self.f = 0.0
        self.parent = parent
        self.decision = decision
        self.sampler_state = NodeSamplerState()
        self.children: List["SearchNode"] = []
        self.dropped = False


def f_value(g: int, h: float, n: int, mode: str, rect: Callable[[int], float]) -> float:
    """Node priority: h + r(n), plus the path cost g in sa mode."""
    base = h + rect(n)
    return g + base if mode == "sa" else base


class OpenList:
    """Min-heap on (f, insertion sequence); ties pop in insertion order."""

    def __init__(self):
        self._heap: List[Tuple[float, int, SearchNode]] = []
        self._seq = itertools.count()

    def push(self, node: SearchNode):
        heapq.heappush(self._heap, (node.f, next(self._seq), node))

    def pop(self) -> SearchNode:
        _, _, node = heapq.heappop(self._heap)
        return node

    def __len__(self) -> int:
        return len(self._heap)


@dataclass
class SearchResult:
    """Outcome of one run.

    outcome is "solved", "exhausted" (open list emptied), "timeout" or
    "budget". plan is present iff solved. expansions counts non-goal
    extractions for the best-first engine and trials for the MCTS baseline.
    root_bound is h(s0) + r(n_root) at termination, the quantity that caps
    sa-mode plan lengths.
    """
    outcome: str
    plan: Optional[List[Decision]]
    expansions: int
    reexpansions: int
    reexpansion_rate: float
    peak_open: int
    time_s: float
    root_bound: float
    iterations: int
    #: tree root; a SearchNode for run_search, an MctsNode for run_mcts
    root: Optional[object] = None
    prop1_violations: List[Tuple[int, int]] = field(default_factory=list)


def reconstruct_plan(node: SearchNode) -> List[Decision]:
    """Decisions from the root to this node, in application order."""
    plan: List[Decision] = []
    while node.parent is not None:
        plan.append(node.decision)
        node = node.parent
    plan.reverse()
    return plan


def _check_config(cfg: SearchConfig):
    if cfg.mode not in MODES:
        raise ValueError(f"unknown mode: {cfg.mode!r}")
    if cfg.rectifier not in RECTIFIERS:
        raise ValueError(f"unknown rectifier: {cfg.rectifier!r}")
    if cfg.time_limit <= 0:
        raise ValueError("time_limit must be positive")
    if cfg.expansion_limit is not None and cfg.expansion_limit <= 0:
        raise ValueError("expansion_limit must be positive")


def run_search(problem: Problem, cfg: SearchConfig,
               trace: Optional[list] = None,
               iteration_hook: Optional[Callable[[int, SearchNode], None]] = None
               ) -> SearchResult:
    """Run the best-first engine on a problem.

    trace, when given, receives one tuple per event:
    ("extract", uid, f), ("goal", uid, hit), ("insert", uid, f),
    ("duplicate", uid), ("fail", uid), ("reinsert", uid, f), ("drop", uid).
    iteration_hook(iteration, root) runs after each completed iteration.
    """
    _check_config(cfg)
    rng = random.Random(cfg.seed)
    h_fn = make_heuristic(cfg.heuristic, problem)
    sampler = make_sampler(cfg.sampler, problem, h_fn)
    rect = RECTIFIERS[cfg.rectifier]
    emit = trace.append if trace is not None else None

    t0 = time.perf_counter()
    uid_counter = itertools.count()
    root = SearchNode(next(uid_counter), problem.init, state_key(problem.init),
                      0, h_fn(problem.init), None, None)
    root.f = f_value(root.g, root.h, 0, cfg.mode, rect)
    open_list = OpenList()
    open_list.push(root)
    seen = {root.key} if cfg.duplicate_detection else None

    expansions = 0
    reexpansions = 0
    peak_open = 1
    iterations = 0
    prop1_violations: List[Tuple[int, int]] = []
    outcome = None
    goal_node: Optional[SearchNode] = None

    while True:
        if len(open_list) == 0:
            outcome = "exhausted"
            break
        if time.perf_counter() - t0 > cfg.time_limit:
            outcome = "timeout"
            break
        if cfg.expansion_limit is not None and expansions >= cfg.expansion_limit:
            outcome = "budget"
            break

        node = open_list.pop()
        if emit:
            emit(("extract", node.uid, node.f))
        if cfg.assertions:
            expect = f_value(node.g, node.h, node.n, cfg.mode, rect)
            if abs(node.f - expect) > F_TOL:
                raise SearchInvariantError(
                    f"stored f {node.f!r} drifted from recomputed {expect!r}")
            # the extracted f must not exceed any live ancestor's current f:
            # it was the heap minimum while every live ancestor was queued
            anc = node.parent
            while anc is not None:
                if not anc.dropped and node.f > anc.f + F_TOL:
                    prop1_violations.append((node.uid, anc.uid))
                anc = anc.parent

        hit = goal_test(node.state, problem.goal)
        if emit:
            emit(("goal", node.uid, hit))
        if hit:
            outcome = "solved"
            goal_node = node
            break

        expansions += 1
        if node.n > 0:
            reexpansions += 1

        sample = sampler(node.state, node.sampler_state, rng)
        if sample.ok:
            child_key = state_key(sample.successor)
            if seen is not None and child_key in seen:
                if emit:
                    emit(("duplicate", node.uid))
            else:
                child = SearchNode(next(uid_counter), sample.successor,
                                   child_key, node.g + 1,
                                   h_fn(sample.successor), node, sample.decision)
                child.f = f_value(child.g, child.h, 0, cfg.mode, rect)
                node.children.append(child)
                if seen is not None:
                    seen.add(child_key)
                open_list.push(child)
                if emit:
                    emit(("insert", child.uid, child.f))
        else:
            if emit:
                emit(("fail", node.uid))

        node.n += 1
        node.f = f_value(node.g, node.h, node.n, cfg.mode, rect)
        if node.sampler_state.exhausted:
            node.dropped = True
            if emit:
                emit(("drop", node.uid))
        else:
            open_list.push(node)
            if emit:
                emit(("reinsert", node.uid, node.f))
        if len(open_list) > peak_open:
            peak_open = len(open_list)
        iterations += 1
        if iteration_hook is not None:
            iteration_hook(iterations, root)

    plan = reconstruct_plan(goal_node) if goal_node is not None else None
    rate = 100.0 * reexpansions / expansions if expansions else 0.0
    return SearchResult(
        outcome=outcome,
        plan=plan,
        expansions=expansions,
        reexpansions=reexpansions,
        reexpansion_rate=rate,
        peak_open=peak_open,
        time_s=time.perf_counter() - t0,
        root_bound=root.h + rect(root.n),
        iterations=iterations,
        root=root,
        prop1_violations=prop1_violations,
    )


# ---------------------------------------------------------------------------
# property checkers

def subtree_bound_violations(root: SearchNode, mode: str, rectifier: str,
                             tol: float = F_TOL) -> List[Tuple[int, int]]:
    """Pairs (descendant uid, ancestor uid) violating the subtree bound.

    Every node that has been partially expanded at least once was, at its
    latest extraction, the queue minimum while all its live ancestors were
    queued; and per-node f values only grow. So its f at counter n-1 must
    not exceed any live ancestor's current f. Dropped ancestors are skipped:
    they left the queue for good and carry no current priority.
    """
    rect = RECTIFIERS[rectifier]
    violations: List[Tuple[int, int]] = []
    stack = [root]
    while stack:
        node = stack.pop()
        stack.extend(node.children)
        if node.n < 1:
            continue
        f_selected = f_value(node.g, node.h, node.n - 1, mode, rect)
        anc = node.parent
        while anc is not None:
            if not anc.dropped:
                f_current = f_value(anc.g, anc.h, anc.n, mode, rect)
                if f_selected > f_current + tol:
                    violations.append((node.uid, anc.uid))
            anc = anc.parent
    return violations


def solution_cost_within_bound(result: SearchResult, root: SearchNode,
                               cfg: SearchConfig, tol: float = F_TOL) -> bool:
    """True iff the plan length is at most h(s0) + r(n_root) + tol.

    Only meaningful for sa mode (the bound follows from the goal node having
    been the queue minimum while the root was still queued) with a heuristic
    that is zero on goal states.
    """
    if cfg.mode != "sa":
        raise ValueError("the solution cost bound applies to sa mode only")
    if result.outcome != "solved" or result.plan is None:
        raise ValueError("result is not a solved run")
    rect = RECTIFIERS[cfg.rectifier]
    return len(result.plan) <= root.h + rect(root.n) + tol


def validate_trace(events: Sequence[tuple]) -> List[str]:
    """Structural check of a run_search trace.

    Per iteration: one extraction, exactly one goal test right after it, at
    most one of insert/duplicate/fail, then exactly one reinsert or drop of
    the extracted node with a strictly larger f on reinsertion. A goal hit
    ends the trace.
    """
    violations: List[str] = []
    i = 0
    total = len(events)

    def bad(msg: str):
        violations.append(f"event {i}: {msg}")

    while i < total:
        event = events[i]
        if event[0] != "extract":
            bad(f"expected extract, saw {event[0]}")
            i += 1
            continue
        _, uid, f_extract = event
        i += 1
        if i >= total or events[i][0] != "goal":
            bad("extraction not followed by a goal test")
            continue
        _, goal_uid, hit = events[i]
        if goal_uid != uid:
            bad("goal test on a node other than the extracted one")
        i += 1
        if hit:
            if i != total:
                bad("events continue after a goal hit")
            return violations
        if i < total and events[i][0] in ("insert", "duplicate", "fail"):
            if events[i][0] in ("duplicate", "fail") and events[i][1] != uid:
                bad("duplicate/fail attributed to a different node")
            i += 1
        if i >= total or events[i][0] not in ("reinsert", "drop"):
            bad("iteration missing its reinsert or drop")
            continue
        kind, re_uid = events[i][0], events[i][1]
        if re_uid != uid:
            bad("reinsert/drop of a node other than the extracted one")
        if kind == "reinsert" and events[i][2] <= f_extract:
            bad("reinserted f did not increase")
        i += 1
    return violations


# ---------------------------------------------------------------------------
# MCTS with progressive widening

@dataclass
class MctsConfig:
    alpha: float = 0.3
    k: float = 1.0
    c: float = math.sqrt(2.0)
    rollout_depth: int = 50
    sampler: SamplerKind = field(default_factory=SamplerKind)
    heuristic: str = "gc"
    seed: int = 0
    time_limit: float = 600.0
    trial_limit: Optional[int] = None


class MctsNode:
    __slots__ = ("state", "decision", "children", "visits", "reward_sum")

    def __init__(self, state: State, decision: Optional[Decision]):
        self.state = state
        self.decision = decision
        self.children: List["MctsNode"] = []
        self.visits = 0
        self.reward_sum = 0.0


def _ucb1(parent: MctsNode, child: MctsNode, c: float) -> float:
    mean = child.reward_sum / child.visits
    return mean + c * math.sqrt(math.log(parent.visits) / child.visits)


def run_mcts(problem: Problem, cfg: MctsConfig,
             widen_violations: Optional[list] = None) -> SearchResult:
    """UCT with progressive widening; one sampled child at a time.

    A node with N visits may hold at most ceil(k * N**alpha) children; visits
    are counted on entry so a fresh node may always receive its first child.
    A trial's reward is 1 when it reaches a goal (at which point the trial's
    decision prefix is returned as the plan) and 1 / (1 + h(final)) when the
    rollout is cut off. widen_violations, when given, collects
    (visits, child count) pairs seen above the cap; it stays empty unless the
    widening rule is broken.
    """
    if not 0.0 < cfg.alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if cfg.c <= 0 or cfg.k <= 0:
        raise ValueError("c and k must be positive")
    if cfg.rollout_depth < 0:
        raise ValueError("rollout_depth must be nonnegative")
    if cfg.time_limit <= 0:
        raise ValueError("time_limit must be positive")

    rng = random.Random(cfg.seed)
    h_fn = make_heuristic(cfg.heuristic, problem)
    budget = cfg.sampler.reject_budget
    digits = cfg.sampler.grid_digits
    t0 = time.perf_counter()
    root = MctsNode(problem.init, None)
    trials = 0
    outcome = None
    plan: Optional[List[Decision]] = None

    def finish(out: str) -> SearchResult:
        return SearchResult(
            outcome=out, plan=plan, expansions=trials, reexpansions=0,
            reexpansion_rate=0.0, peak_open=0,
            time_s=time.perf_counter() - t0, root_bound=h_fn(problem.init),
            iterations=trials, root=root,
        )

    while True:
        if cfg.trial_limit is not None and trials >= cfg.trial_limit:
            return finish("budget")
        if time.perf_counter() - t0 > cfg.time_limit:
            return finish("timeout")
        trials += 1

        node = root
        path = [root]
        decisions: List[Decision] = []
        state = root.state
        # selection and expansion
        while True:
            node.visits += 1
            if goal_test(node.state, problem.goal):
                plan = decisions
                return finish("solved")
            allowed = math.ceil(cfg.k * node.visits ** cfg.alpha)
            if len(node.children) > allowed and widen_violations is not None:
                widen_violations.append((node.visits, len(node.children)))
            if len(node.children) < allowed:
                out = sample_uniform(node.state, problem, rng, budget, digits)
                if out.ok:
                    child = MctsNode(out.successor, out.decision)
                    node.children.append(child)
                    child.visits += 1
                    path.append(child)
                    decisions.append(out.decision)
                    node = child
                    if goal_test(node.state, problem.goal):
                        plan = decisions
                        return finish("solved")
                break
            if not node.children:
                break
            node = max(node.children, key=lambda ch: _ucb1(node, ch, cfg.c))
            decisions.append(node.decision)
            path.append(node)

        # rollout
        state = node.state
        reached_goal = False
        for _ in range(cfg.rollout_depth):
            out = sample_uniform(state, problem, rng, budget, digits)
            if not out.ok:
                break
            state = out.successor
            decisions.append(out.decision)
            if goal_test(state, problem.goal):
                reached_goal = True
                break
        if reached_goal:
            plan = decisions
            return finish("solved")
        reward = 1.0 / (1.0 + h_fn(state))
        for visited in path:
            visited.reward_sum += reward
