"""Iterative under-approximation of the never-worse relation.

Four inference rules are applied round-robin over a shared pair store,
with the pseudo transitive closure taken after each round, until nothing
new can be derived.  Every rule only ever adds pairs that hold for all
full-support families, so the fixpoint is a sound under-approximation;
completeness is not attempted (the full relation is coNP-complete).
"""

from __future__ import annotations

from typing import Iterable, Optional

from .analysis import seed_relation
from .arena import TargetArena, successor_map
from .relation import NwrRelation, candidate_universe
from .solve import almost_sure_set


def _reachers_avoiding(a: TargetArena, blocked: set[str]) -> set[str]:
    """Vertices with a path to the targets whose non-final vertices all
    avoid ``blocked``.  Vertices already in the targets count."""
    pred = {v: [] for v in a.vertices}
    for u, w in a.edges:
        pred[w].append(u)
    found: set[str] = set(a.targets)
    stack = sorted(a.targets)
    seen: set[str] = set()
    while stack:
        v = stack.pop()
        for u in pred[v]:
            if u not in seen and u not in blocked:
                seen.add(u)
                found.add(u)
                stack.append(u)
    return found


def rule_bar_reach(
    a: TargetArena, r: NwrRelation, v0: str, w: Iterable[str]
) -> Optional[tuple[str, frozenset[str]]]:
    """Emit ``v0 <= W`` when every path from ``v0`` to the targets passes
    through a vertex already known to be below ``W``.

    Uses the maximal admissible cut: all vertices currently below ``W``.
    """
    wset = frozenset(w)
    blocked = set(r.below_mask(r.mask(wset)))
    if v0 not in _reachers_avoiding(a, blocked):
        return (v0, wset)
    return None


def rule_bar_win(
    a: TargetArena, r: NwrRelation, w: str, v0: str
) -> Optional[tuple[str, frozenset[str]]]:
    """Emit ``w <= {v0}`` when ``v0`` can reach, with probability one,
    either a target or a Protagonist vertex already known to dominate
    ``w``."""
    dominators = frozenset(
        s for s in a.protagonist if r.holds_mask(w, r.mask((s,)))
    )
    retargeted = TargetArena(a.protagonist, a.nature, a.edges, dominators | a.targets)
    if v0 in almost_sure_set(retargeted):
        return (w, frozenset((v0,)))
    return None


def rule_nature_equiv(
    a: TargetArena, r: NwrRelation, u: str
) -> tuple[tuple[str, frozenset[str]], ...]:
    """When all successors of a Nature vertex are pairwise equivalent, the
    vertex is equivalent to each of them (its value is their common
    value)."""
    succ = successor_map(a)[u]
    for i, v in enumerate(succ):
        for x in succ[i + 1 :]:
            if not r.equivalent(v, x):
                return ()
    out: list[tuple[str, frozenset[str]]] = []
    for x in succ:
        out.append((u, frozenset((x,))))
        out.append((x, frozenset((u,))))
    return tuple(out)


def _non_dominated(r: NwrRelation, succs: tuple[str, ...]) -> list[str]:
    """Prune successors one at a time while each is below the rest.

    Removing a single dominated element keeps the maximum value of the set
    attainable within it, so iterated single removals are sound; a
    one-shot sweep would not be (two equivalent successors would erase
    each other and the rule's premise would hold vacuously).
    """
    surv = sorted(succs)
    while True:
        for i, w in enumerate(surv):
            rest = surv[:i] + surv[i + 1 :]
            if rest and r.holds(w, rest):
                surv.pop(i)
                break
        else:
            return surv


def rule_prot_dominance(
    a: TargetArena, r: NwrRelation, u: str, v: str
) -> Optional[tuple[str, frozenset[str]]]:
    """Emit ``u <= {v}`` when every non-dominated successor of ``u`` is
    below the successor set of ``v`` (both non-target Protagonist)."""
    succ = successor_map(a)
    ve = frozenset(succ[v])
    ve_mask = r.mask(ve)
    for w in _non_dominated(r, succ[u]):
        if not ve or not r.holds_mask(w, ve_mask):
            return None
    return (u, frozenset((v,)))


def saturate(a: TargetArena) -> "NwrRelation":
    """Run the rules to their joint fixpoint starting from the seeds.

    Deterministic: rules fire in a fixed order over sorted arguments and
    the closure runs after each round.  Pairs are only ever added and the
    candidate universe is finite, so termination is immediate.
    """
    rel = seed_relation(a)
    universe = candidate_universe(a)
    umasks = [rel.mask(w) for w in universe]
    succ = successor_map(a)
    verts = sorted(a.vertices)
    prot_choices = sorted(a.protagonist - a.targets)
    as_cache: dict[frozenset[str], frozenset[str]] = {}
    bit = {v: 1 << i for i, v in enumerate(rel.vertices)}

    max_rounds = len(verts) * len(universe) + 2
    rounds = 0
    while True:
        rounds += 1
        if rounds > max_rounds:
            raise AssertionError("saturation exceeded its monotone bound")
        changed = False

        for wset in universe:
            blocked = set(rel.below_mask(rel.mask(wset)))
            reachers = _reachers_avoiding(a, blocked)
            for v0 in verts:
                if v0 not in reachers:
                    changed |= rel.add(v0, wset)

        for w in verts:
            dominators = frozenset(
                s for s in a.protagonist if rel.holds_mask(w, bit[s])
            )
            key = dominators | a.targets
            winners = as_cache.get(key)
            if winners is None:
                winners = almost_sure_set(
                    TargetArena(a.protagonist, a.nature, a.edges, key)
                )
                as_cache[key] = winners
            for v0 in sorted(winners):
                changed |= rel.add_mask(w, bit[v0])

        for u in sorted(a.nature):
            for pair in rule_nature_equiv(a, rel, u):
                changed |= rel.add(*pair)

        for u in prot_choices:
            survivors = _non_dominated(rel, succ[u])
            for v in prot_choices:
                ve = succ[v]
                if not ve and survivors:
                    continue
                ve_mask = rel.mask(ve)
                if all(rel.holds_mask(w, ve_mask) for w in survivors):
                    changed |= rel.add_mask(u, bit[v])

        changed |= rel.close(umasks)
        if not changed:
            return rel
