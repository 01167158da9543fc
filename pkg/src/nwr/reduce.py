"""Value-preserving arena reductions.

Equivalence classes proven by the relation engine are collapsed into
single vertices (dropping the self-loop edges that would arise), and
edges to provably never-better Nature vertices are removed one at a time.
Both steps preserve the maximal reachability value of every surviving
Protagonist vertex for every full-support family; the fixpoint pipeline
alternates them with fresh saturations until nothing changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .arena import DistributionFamily, TargetArena, successor_map
from .engine import saturate
from .relation import NwrRelation


@dataclass(frozen=True)
class ReductionReport:
    original_vertices: int
    original_edges: int
    reduced_vertices: int
    reduced_edges: int
    class_map: Mapping[str, str]
    removed_edges: tuple[tuple[tuple[str, str], tuple[str, tuple[str, ...]]], ...]
    rounds: int

    def to_json_dict(self) -> dict:
        def pct(before: int, after: int) -> float:
            return 0.0 if before == 0 else round(100.0 * (before - after) / before, 2)

        return {
            "vertices": {
                "original": self.original_vertices,
                "reduced": self.reduced_vertices,
                "percent_removed": pct(self.original_vertices, self.reduced_vertices),
            },
            "edges": {
                "original": self.original_edges,
                "reduced": self.reduced_edges,
                "percent_removed": pct(self.original_edges, self.reduced_edges),
            },
            "classes": sorted(set(self.class_map.values())),
            "class_map": dict(sorted(self.class_map.items())),
            "removed_edges": [
                {"edge": list(edge), "because": {"v": why[0], "W": list(why[1])}}
                for edge, why in self.removed_edges
            ],
            "rounds": self.rounds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # keep the lexicographically smaller root as representative
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


def quotient(a: TargetArena, r: NwrRelation) -> tuple[TargetArena, dict[str, str]]:
    """Collapse proven equivalence classes of same-owner vertices.

    Class names are the lexicographically smallest members.  An edge from
    a Protagonist class to a Nature vertex survives only when that Nature
    vertex has a successor outside the class, which removes self-loops;
    Nature classes left unreachable are dropped.  Nature vertices merge
    only when all their successors are pairwise proven equivalent as well,
    so the lifted family stays full-support and member-independent.
    """
    succ = successor_map(a)
    uf = _UnionFind(sorted(a.vertices))
    prots = sorted(a.protagonist)
    for i, u in enumerate(prots):
        for v in prots[i + 1 :]:
            if r.equivalent(u, v):
                uf.union(u, v)
    nats = sorted(a.nature)
    for i, u in enumerate(nats):
        for v in nats[i + 1 :]:
            if not r.equivalent(u, v):
                continue
            members = set(succ[u]) | set(succ[v])
            pairs_ok = all(
                r.equivalent(x, y)
                for xi, x in enumerate(sorted(members))
                for y in sorted(members)[xi + 1 :]
            )
            if pairs_ok:
                uf.union(u, v)
    cmap = {v: uf.find(v) for v in sorted(a.vertices)}

    p_classes = {cmap[v] for v in a.protagonist}
    n_classes = {cmap[v] for v in a.nature}
    edges: set[tuple[str, str]] = set()
    for u, v in sorted(a.edges):
        if u in a.protagonist:
            cu = cmap[u]
            if any(cmap[w] != cu for w in succ[v]):
                edges.add((cu, cmap[v]))
        else:
            edges.add((cmap[u], cmap[v]))
    entered = {y for _, y in edges}
    dropped = {c for c in n_classes if c not in entered}
    edges = {(x, y) for x, y in edges if x not in dropped and y not in dropped}
    reduced = TargetArena(
        frozenset(p_classes),
        frozenset(n_classes - dropped),
        frozenset(edges),
        frozenset(cmap[t] for t in a.targets),
    )
    return reduced, cmap


def lift_family(
    reduced: TargetArena, mu: DistributionFamily, class_map: Mapping[str, str]
) -> dict[str, dict[str, Fraction]]:
    """Push a family through a quotient's class map.

    Each surviving Nature class sums the mass its smallest original member
    assigned to each successor class; if some of that mass fell on a
    class that did not survive as a successor, the rest is renormalized.
    """
    members: dict[str, list[str]] = {}
    for orig, cls in class_map.items():
        members.setdefault(cls, []).append(orig)
    rsucc = successor_map(reduced)
    out: dict[str, dict[str, Fraction]] = {}
    for cls in sorted(reduced.nature):
        rep = min(m for m in members[cls] if m in mu)
        raw: dict[str, Fraction] = {}
        for w, p in mu[rep].items():
            tgt = class_map[w]
            raw[tgt] = raw.get(tgt, Fraction(0)) + Fraction(p)
        keep = {t: p for t, p in raw.items() if t in rsucc[cls]}
        total = sum(keep.values(), Fraction(0))
        if total == 0:
            raise ValueError(f"family lift lost all mass at class {cls}")
        out[cls] = {t: p / total for t, p in sorted(keep.items())}
    return out


def trim_edges(
    a: TargetArena, r: NwrRelation
) -> tuple[TargetArena, list[tuple[tuple[str, str], tuple[str, tuple[str, ...]]]]]:
    """Remove edges to Nature vertices the relation proves never better.

    Requires the arena to be a quotient fixed point.  Edges are removed
    one at a time in lexicographic order, re-checking candidates against
    the shrunken successor sets after each removal; an edge ``(w, x)``
    goes when ``x`` is below the remaining successors of ``w``.
    """
    fixed, _ = quotient(a, r)
    if fixed != a:
        raise ValueError("trim requires a quotient fixed point; quotient the arena first")
    edges = set(a.edges)
    succ: dict[str, set[str]] = {v: set(ws) for v, ws in successor_map(a).items()}
    removed: list[tuple[tuple[str, str], tuple[str, tuple[str, ...]]]] = []
    while True:
        hit = None
        for w, x in sorted(edges):
            if w not in a.protagonist or x not in a.nature:
                continue
            rest = succ[w] - {x}
            if rest and r.holds(x, rest):
                hit = (w, x, tuple(sorted(rest)))
                break
        if hit is None:
            break
        w, x, rest = hit
        edges.discard((w, x))
        succ[w].discard(x)
        removed.append(((w, x), (x, rest)))
    out = TargetArena(a.protagonist, a.nature, frozenset(edges), a.targets)
    return out, removed


def reduce_fixpoint(a: TargetArena) -> tuple[TargetArena, ReductionReport]:
    """Alternate saturation, quotienting, and trimming until stable.

    Every productive round strictly shrinks (vertices, edges)
    lexicographically, so the loop ends within |V| + |E| rounds.
    """
    current = a
    cmap = {v: v for v in a.vertices}
    removed_all: list[tuple[tuple[str, str], tuple[str, tuple[str, ...]]]] = []
    bound = len(a.vertices) + len(a.edges) + 1
    rounds = 0
    while True:
        rounds += 1
        if rounds > bound:
            raise AssertionError("reduction pipeline failed to stabilize")
        rel = saturate(current)
        collapsed, qmap = quotient(current, rel)
        if collapsed != current:
            cmap = {orig: qmap.get(rep, rep) for orig, rep in cmap.items()}
            current = collapsed
            continue
        trimmed, removed = trim_edges(current, rel)
        if removed:
            removed_all.extend(removed)
            current = trimmed
            continue
        break
    report = ReductionReport(
        original_vertices=len(a.vertices),
        original_edges=len(a.edges),
        reduced_vertices=len(current.vertices),
        reduced_edges=len(current.edges),
        class_map=cmap,
        removed_edges=tuple(removed_all),
        rounds=rounds,
    )
    return current, report
