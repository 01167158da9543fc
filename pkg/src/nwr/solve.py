"""Reachability probabilities, exactly and iteratively.

Exact computations use rational arithmetic end to end: Markov chains are
solved by Gaussian elimination over ``Fraction`` and maximal MDP values by
strategy improvement with exact chain evaluations.  The only floating
point code is ``value_iteration``, kept as an independent approximate
route for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .arena import (
    DistributionFamily,
    MarkovChain,
    Mdp,
    SINK,
    TargetArena,
    induce_chain,
    instantiate_mdp,
    predecessor_map,
    successor_map,
)


@dataclass(frozen=True)
class ValueVector:
    """Per-vertex (or per-state) reachability values.

    ``mode`` is ``"exact"`` (Fractions) or ``"iterative"`` (floats);
    ``converged`` is false only when value iteration hit its sweep limit.
    """

    values: Mapping[str, Fraction | float]
    mode: str
    converged: bool = True

    def to_json_dict(self) -> dict:
        if self.mode == "exact":
            vals = {q: str(v) for q, v in sorted(self.values.items())}
        else:
            vals = {q: repr(float(v)) for q, v in sorted(self.values.items())}
        doc = {"mode": self.mode, "values": vals}
        if not self.converged:
            doc["converged"] = False
        return doc


# ---------------------------------------------------------------------------
# Graph-based extremal sets on arenas
# ---------------------------------------------------------------------------


def zero_set(a: TargetArena) -> frozenset[str]:
    """Vertices (either owner) with no path to the target set."""
    pred = predecessor_map(a)
    seen: set[str] = set(a.targets)
    stack = sorted(a.targets)
    while stack:
        v = stack.pop()
        for u in pred[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return frozenset(a.vertices - seen)


def almost_sure_set(a: TargetArena) -> frozenset[str]:
    """Vertices from which the Protagonist can reach the targets with
    probability one, for every full-support family.

    Two nested fixpoints: repeatedly restrict to the Protagonist vertices
    that still reach a target inside the candidate set, where a Nature
    vertex is usable only if all its successors stay candidates.  Targets
    are treated as sinks.  A Nature vertex wins iff all its successors do.
    """
    succ = successor_map(a)
    cand = set(a.protagonist)
    while True:
        usable = {n for n in a.nature if all(v in cand for v in succ[n])}
        reach = set(a.targets & cand)
        frontier = sorted(reach)
        # backward closure: p reaches if some usable action has a successor that reaches
        changed = True
        while changed:
            changed = False
            for p in sorted(cand - reach):
                for n in succ[p]:
                    if n in usable and any(v in reach for v in succ[n]):
                        reach.add(p)
                        changed = True
                        break
        if reach == cand:
            break
        cand = reach
    winners = set(cand)
    for n in sorted(a.nature):
        if succ[n] and all(v in cand for v in succ[n]):
            winners.add(n)
    return frozenset(winners)


# ---------------------------------------------------------------------------
# Exact chain solving
# ---------------------------------------------------------------------------


def _solve_linear(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over Fractions; first non-zero pivot per column."""
    n = len(matrix)
    a = [row[:] + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ArithmeticError("singular linear system")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def _until_vector(c: MarkovChain, stay: frozenset[str], targets: frozenset[str]) -> dict[str, Fraction]:
    """Probability, per state, of reaching ``targets`` while staying in ``stay``.

    States outside ``stay | targets`` are absorbing failures.  The linear
    system is restricted to the states that can actually reach a target
    inside ``stay``; all other interior states are pinned to zero, which
    keeps the system non-singular.
    """
    interior = stay - targets
    # backward reachability from targets through interior states
    preds: dict[str, list[str]] = {q: [] for q in c.states}
    for q in c.states:
        if q in interior:
            for r, p in c.transition[q].items():
                if p > 0 and r in preds:
                    preds[r].append(q)
    can: set[str] = set()
    stack = sorted(targets)
    while stack:
        v = stack.pop()
        for u in preds[v]:
            if u not in can:
                can.add(u)
                stack.append(u)
    order = sorted(can)
    idx = {q: i for i, q in enumerate(order)}
    n = len(order)
    matrix = [[Fraction(0)] * n for _ in range(n)]
    rhs = [Fraction(0)] * n
    for q in order:
        i = idx[q]
        matrix[i][i] = Fraction(1)
        for r, p in c.transition[q].items():
            if p == 0:
                continue
            if r in targets:
                rhs[i] += p
            elif r in idx:
                matrix[i][idx[r]] -= p
    solved = _solve_linear(matrix, rhs) if n else []
    out: dict[str, Fraction] = {}
    for q in c.states:
        if q in targets:
            out[q] = Fraction(1)
        elif q in idx:
            out[q] = solved[idx[q]]
        else:
            out[q] = Fraction(0)
    return out


def until_prob(c: MarkovChain, q0: str, stay: Iterable[str], targets: Iterable[str]) -> Fraction:
    """Probability of reaching ``targets`` from ``q0`` while staying in ``stay``.

    Definitionally one when ``q0`` is already a target, and zero when no
    run of the required shape exists.
    """
    t = frozenset(targets)
    if q0 in t:
        return Fraction(1)
    return _until_vector(c, frozenset(stay), t)[q0]


def reach_prob(c: MarkovChain, q0: str, targets: Iterable[str]) -> Fraction:
    """Probability of eventually reaching ``targets`` from ``q0``."""
    return until_prob(c, q0, c.states, targets)


def reach_prob_vector(c: MarkovChain, targets: Iterable[str]) -> dict[str, Fraction]:
    """Reachability probability for every state at once."""
    return _until_vector(c, frozenset(c.states), frozenset(targets))


# ---------------------------------------------------------------------------
# Maximal values on MDPs
# ---------------------------------------------------------------------------


def _mdp_zero_states(m: Mdp) -> frozenset[str]:
    preds: dict[str, set[str]] = {q: set() for q in m.states}
    for (q, _), dist in m.transition.items():
        for r, p in dist.items():
            if p > 0 and r in preds:
                preds[r].add(q)
    seen: set[str] = set(m.targets)
    stack = sorted(m.targets)
    while stack:
        v = stack.pop()
        for u in sorted(preds[v]):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return frozenset(m.states - seen)


def max_reach_values_exact(m: Mdp) -> tuple[ValueVector, dict[str, str]]:
    """Maximal reachability values by strategy improvement, exactly.

    Each candidate strategy is evaluated by an exact chain solve; a state
    switches action only on a strict one-step improvement (keeping the
    current action on ties), which makes the value vectors increase
    monotonically until the unique Bellman solution is reached.  Ties
    between new actions break toward the lexicographically smallest.
    Returns the value vector and an optimal memoryless strategy.
    """
    avail: dict[str, list[str]] = {q: [] for q in m.states}
    for (q, act) in m.transition:
        avail[q].append(act)
    for q in avail:
        avail[q].sort()
    sigma: dict[str, str] = {q: acts[0] for q, acts in avail.items() if acts}

    guard = 0
    while True:
        guard += 1
        if guard > 10_000:
            raise AssertionError("strategy improvement failed to converge")
        values = reach_prob_vector(induce_chain(m, sigma), m.targets)
        changed = False
        for q in sorted(sigma):
            if q in m.targets:
                continue
            scores = {
                act: sum(
                    (p * values[r] for r, p in m.transition[(q, act)].items()),
                    Fraction(0),
                )
                for act in avail[q]
            }
            best = max(scores.values())
            if best > values[q]:
                sigma[q] = min(act for act, s in scores.items() if s == best)
                changed = True
        if not changed:
            return ValueVector(values, "exact"), sigma


def value_iteration(m: Mdp, tol: float = 1e-10, max_iters: int = 10**6) -> ValueVector:
    """Kleene iteration from zero on the Bellman operator, in floats.

    Converges to the maximal values from below; stops when the sup-norm
    change drops under ``tol``.  Hitting ``max_iters`` flags the result as
    unconverged but still returns it.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    avail: dict[str, list[str]] = {q: [] for q in m.states}
    for (q, act) in m.transition:
        avail[q].append(act)
    float_tr = {
        key: [(r, float(p)) for r, p in dist.items()] for key, dist in m.transition.items()
    }
    x = {q: (1.0 if q in m.targets else 0.0) for q in m.states}
    converged = False
    for _ in range(max_iters):
        delta = 0.0
        nxt = {}
        for q in m.states:
            if q in m.targets:
                nxt[q] = 1.0
                continue
            best = 0.0
            for act in avail[q]:
                s = 0.0
                for r, p in float_tr[(q, act)]:
                    s += p * x[r]
                if s > best:
                    best = s
            nxt[q] = best
            d = abs(best - x[q])
            if d > delta:
                delta = d
        x = nxt
        if delta < tol:
            converged = True
            break
    return ValueVector(x, "iterative", converged)


def vertex_values(a: TargetArena, mu: DistributionFamily) -> ValueVector:
    """Exact maximal reachability value of every arena vertex under ``mu``.

    Protagonist values come from the induced MDP; each Nature vertex gets
    the expectation of its successors' values.  The sink is excluded.
    """
    m = instantiate_mdp(a, mu)
    vv, _ = max_reach_values_exact(m)
    vals: dict[str, Fraction] = {q: v for q, v in vv.values.items() if q != SINK}
    succ = successor_map(a)
    for u in sorted(a.nature):
        vals[u] = sum((Fraction(mu[u][v]) * vals[v] for v in succ[u]), Fraction(0))
    return ValueVector(vals, "exact")
