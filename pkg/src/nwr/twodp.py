"""Encoding two-vertex-disjoint-paths questions as never-worse queries.

Given a directed graph with designated (s1, t1) and (s2, t2), the encoded
arena puts a Protagonist vertex on every edge and keeps the graph
vertices for Nature, adds absorbing gadgets at both sinks, and targets
the gadget of t1.  Vertex-disjoint s1-t1 / s2-t2 paths then exist exactly
when s1 can be made strictly better than s2 by some family, i.e. when the
never-worse query is refuted.  Doubles as a test generator, with an
exhaustive path-pair oracle for cross-checking.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

from .arena import TargetArena
from .exact import SizeLimitError


@dataclass(frozen=True)
class Digraph:
    vertices: frozenset[str]
    edges: frozenset[tuple[str, str]]


def make_digraph(vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> Digraph:
    return Digraph(frozenset(vertices), frozenset((u, v) for u, v in edges))


def parse_digraph(text: str) -> Digraph:
    doc = json.loads(text)
    return make_digraph(doc["vertices"], [tuple(e) for e in doc["edges"]])


def serialize_digraph(g: Digraph) -> str:
    return json.dumps(
        {"vertices": sorted(g.vertices), "edges": [list(e) for e in sorted(g.edges)]},
        indent=2,
    )


def _succ(vertices: set[str], edges: set[tuple[str, str]]) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {v: [] for v in vertices}
    for u, w in sorted(edges):
        if u in out and w in out:
            out[u].append(w)
    return out


def _reaches(vertices: set[str], edges: set[tuple[str, str]], goal: str) -> set[str]:
    pred: dict[str, list[str]] = {v: [] for v in vertices}
    for u, w in edges:
        if u in pred and w in pred:
            pred[w].append(u)
    seen = {goal} if goal in pred else set()
    stack = list(seen)
    while stack:
        v = stack.pop()
        for u in pred[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def _reachable_from(vertices: set[str], edges: set[tuple[str, str]], sources: set[str]) -> set[str]:
    succ = _succ(vertices, edges)
    seen = set(s for s in sources if s in vertices)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def normalize_2dp(g: Digraph, s1: str, t1: str, s2: str, t2: str) -> Digraph:
    """Prune the instance without changing its disjoint-paths answer.

    Drops the outgoing edges of both sinks (a solution path never leaves
    them) and then, to a fixpoint, every vertex that reaches neither sink
    or is unreachable from both sources.  The sources must survive.
    """
    for x in (s1, t1, s2, t2):
        if x not in g.vertices:
            raise ValueError(f"designated vertex {x} is not in the graph")
    verts = set(g.vertices)
    edges = {(u, v) for u, v in g.edges if u not in (t1, t2)}
    while True:
        to_t = _reaches(verts, edges, t1) | _reaches(verts, edges, t2)
        from_s = _reachable_from(verts, edges, {s1, s2})
        bad = {x for x in verts - {t1, t2} if x not in to_t or x not in from_s}
        if not bad:
            break
        verts -= bad
        edges = {(u, v) for u, v in edges if u in verts and v in verts}
    for s in (s1, s2):
        if s not in verts:
            raise ValueError(f"source {s} cannot reach either sink; the instance is degenerate")
    return Digraph(frozenset(verts), frozenset(edges))


def _pair_vertex(u: str, v: str) -> str:
    return f"({u},{v})"


def reduce_2dp(g: Digraph, s1: str, t1: str, s2: str, t2: str) -> tuple[TargetArena, str, frozenset[str]]:
    """Build the arena and query encoding a disjoint-paths instance.

    Normalizes first.  Every Protagonist vertex of the result has exactly
    one successor.  Returns ``(arena, s1, {s2})``: the query is refuted
    exactly when vertex-disjoint paths exist.
    """
    gn = normalize_2dp(g, s1, t1, s2, t2)
    gadget_edges = {(t1, t1), (t2, t2)}
    pair_names = {_pair_vertex(u, v) for u, v in set(gn.edges) | gadget_edges}
    clash = pair_names & gn.vertices
    if clash:
        raise ValueError(f"graph vertex {min(clash)} collides with an edge-vertex name")
    prot: set[str] = set()
    arena_edges: set[tuple[str, str]] = set()
    for u, v in sorted(set(gn.edges) | gadget_edges):
        e = _pair_vertex(u, v)
        prot.add(e)
        arena_edges.add((u, e))
        arena_edges.add((e, v))
    arena = TargetArena(
        frozenset(prot),
        frozenset(gn.vertices),
        frozenset(arena_edges),
        frozenset({_pair_vertex(t1, t1)}),
    )
    return arena, s1, frozenset({s2})


def _simple_vertex_paths(g: Digraph, src: str, dst: str) -> Iterator[frozenset[str]]:
    succ = _succ(set(g.vertices), set(g.edges))
    path = [src]
    seen = {src}

    def walk(x: str) -> Iterator[frozenset[str]]:
        if x == dst:
            yield frozenset(path)
            return
        for y in succ[x]:
            if y not in seen:
                path.append(y)
                seen.add(y)
                yield from walk(y)
                path.pop()
                seen.remove(y)

    yield from walk(src)


def solve_2dp_oracle(g: Digraph, s1: str, t1: str, s2: str, t2: str) -> bool:
    """Exhaustive disjoint-paths oracle for small graphs.

    True iff some simple s1-t1 path is vertex-disjoint from some simple
    s2-t2 path; a length-zero path counts when source equals sink.
    """
    if len(g.vertices) > 12:
        raise SizeLimitError("oracle is exhaustive; use graphs with at most 12 vertices")
    for x in (s1, t1, s2, t2):
        if x not in g.vertices:
            raise ValueError(f"designated vertex {x} is not in the graph")
    succ = _succ(set(g.vertices), set(g.edges))
    for blocked in _simple_vertex_paths(g, s1, t1):
        if s2 in blocked or t2 in blocked:
            continue
        seen = {s2}
        stack = [s2]
        found = s2 == t2
        while stack and not found:
            v = stack.pop()
            for w in succ[v]:
                if w in blocked or w in seen:
                    continue
                if w == t2:
                    found = True
                    break
                seen.add(w)
                stack.append(w)
        if found:
            return True
    return False
