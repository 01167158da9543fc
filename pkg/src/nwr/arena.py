"""Target arenas and the stochastic models they induce.

A target arena is the probability-free skeleton shared by a whole family
of MDPs: a bipartite directed graph whose vertices belong either to the
Protagonist (choice vertices) or to Nature (distribution-support
vertices), together with a set of target vertices.  Attaching a
full-support rational distribution to every Nature vertex instantiates a
concrete MDP; fixing a memoryless strategy then induces a Markov chain.

All probabilities in this module are exact ``fractions.Fraction`` values.
Every structure is immutable after construction and safe to share.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

#: Reserved absorbing state added when an arena is instantiated as an MDP.
SINK = "__sink__"

DistributionFamily = Mapping[str, Mapping[str, Fraction]]
Strategy = Mapping[str, str]


class ArenaFormatError(ValueError):
    """Malformed arena/family JSON; the message carries the location."""


class FamilyError(ValueError):
    """A distribution family does not match the arena it is used with."""


class StrategyError(ValueError):
    """A strategy picks an action that is undefined at some state."""


@dataclass(frozen=True)
class TargetArena:
    """Bipartite graph with Protagonist/Nature ownership and targets."""

    protagonist: frozenset[str]
    nature: frozenset[str]
    edges: frozenset[tuple[str, str]]
    targets: frozenset[str]

    @property
    def vertices(self) -> frozenset[str]:
        return self.protagonist | self.nature


def make_arena(
    protagonist: Iterable[str],
    nature: Iterable[str],
    edges: Iterable[tuple[str, str]],
    targets: Iterable[str],
) -> TargetArena:
    """Build an arena from plain iterables."""
    return TargetArena(
        frozenset(protagonist),
        frozenset(nature),
        frozenset((u, v) for u, v in edges),
        frozenset(targets),
    )


@lru_cache(maxsize=512)
def successor_map(a: TargetArena) -> dict[str, tuple[str, ...]]:
    """Successors of every vertex, in sorted order.  Treat as read-only."""
    out: dict[str, list[str]] = {v: [] for v in a.vertices}
    for u, w in sorted(a.edges):
        if u in out and w in out:
            out[u].append(w)
    return {v: tuple(ws) for v, ws in out.items()}


@lru_cache(maxsize=512)
def predecessor_map(a: TargetArena) -> dict[str, tuple[str, ...]]:
    """Predecessors of every vertex, in sorted order.  Treat as read-only."""
    inc: dict[str, list[str]] = {v: [] for v in a.vertices}
    for u, w in sorted(a.edges):
        if u in inc and w in inc:
            inc[w].append(u)
    return {v: tuple(us) for v, us in inc.items()}


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems


def validate_arena(a: TargetArena) -> ValidationReport:
    """Check every arena invariant and report all violations.

    An empty report means the arena is well formed: ownership partitions
    the vertices, edges are bipartite and reference declared vertices,
    every Nature vertex has a successor, and targets are Protagonist
    vertices.
    """
    problems: list[str] = []
    for v in sorted(a.protagonist & a.nature):
        problems.append(f"vertex {v} is both Protagonist and Nature")
    verts = a.vertices
    for u, w in sorted(a.edges):
        missing = [x for x in (u, w) if x not in verts]
        if missing:
            for x in missing:
                problems.append(f"edge ({u},{w}) references undeclared vertex {x}")
            continue
        same_side = (u in a.protagonist) == (w in a.protagonist)
        if same_side:
            problems.append(f"edge ({u},{w}) is not bipartite")
    succ = {v: 0 for v in a.nature}
    for u, _ in a.edges:
        if u in succ:
            succ[u] += 1
    for u in sorted(a.nature):
        if succ[u] == 0:
            problems.append(f"Nature vertex {u} has no successor")
    for t in sorted(a.targets):
        if t not in a.protagonist:
            problems.append(f"target {t} is not a Protagonist vertex")
    return ValidationReport(tuple(problems))


def validate_family(a: TargetArena, mu: DistributionFamily) -> None:
    """Raise ``FamilyError`` unless ``mu`` is a full-support family for ``a``.

    The domain of ``mu`` must be exactly the Nature vertices, each
    distribution must be supported on exactly the successor set of its
    vertex, all probabilities must be positive rationals, and each
    distribution must sum to one.
    """
    succ = successor_map(a)
    extra = set(mu) - set(a.nature)
    if extra:
        raise FamilyError(f"family defined on non-Nature vertex {min(extra)}")
    for u in sorted(a.nature):
        if u not in mu:
            raise FamilyError(f"family missing Nature vertex {u}")
        dist = mu[u]
        expected = set(succ[u])
        if set(dist) != expected:
            raise FamilyError(
                f"family at {u} has support {sorted(dist)}; expected {sorted(expected)}"
            )
        total = Fraction(0)
        for v in sorted(dist):
            p = Fraction(dist[v])
            if p <= 0:
                raise FamilyError(f"family at {u} is not full support on {v}")
            total += p
        if total != 1:
            raise FamilyError(f"family at {u} sums to {total}, not 1")


@dataclass(frozen=True)
class Mdp:
    """Finite MDP with a rational transition function and target states.

    ``transition`` maps defined ``(state, action)`` pairs to distributions
    over states; pairs absent from the mapping are unavailable actions.
    """

    states: frozenset[str]
    actions: frozenset[str]
    transition: Mapping[tuple[str, str], Mapping[str, Fraction]]
    targets: frozenset[str]

    def available(self, state: str) -> tuple[str, ...]:
        return tuple(sorted(a for (q, a) in self.transition if q == state))


@dataclass(frozen=True)
class MarkovChain:
    states: frozenset[str]
    transition: Mapping[str, Mapping[str, Fraction]]


def instantiate_mdp(a: TargetArena, mu: DistributionFamily) -> Mdp:
    """Instantiate the MDP induced by an arena and a distribution family.

    States are the Protagonist vertices plus the absorbing ``SINK``;
    actions are the Nature vertices.  Playing action ``n`` at ``p`` follows
    ``mu[n]`` when the edge ``(p, n)`` exists and moves to the sink with
    probability one otherwise.
    """
    if SINK in a.vertices:
        raise FamilyError(f"arena uses the reserved vertex id {SINK!r}")
    validate_family(a, mu)
    states = frozenset(a.protagonist) | {SINK}
    transition: dict[tuple[str, str], dict[str, Fraction]] = {}
    for p in sorted(states):
        for n in sorted(a.nature):
            if (p, n) in a.edges:
                transition[(p, n)] = {v: Fraction(q) for v, q in mu[n].items()}
            else:
                transition[(p, n)] = {SINK: Fraction(1)}
    return Mdp(states, frozenset(a.nature), transition, frozenset(a.targets))


def induce_chain(m: Mdp, sigma: Strategy) -> MarkovChain:
    """Induce the Markov chain obtained by fixing a memoryless strategy.

    The strategy must cover every state with more than one available
    action; a state with a single action defaults to it and a state with
    no actions becomes absorbing.
    """
    avail: dict[str, list[str]] = {q: [] for q in m.states}
    for (q, act) in m.transition:
        avail[q].append(act)
    transition: dict[str, Mapping[str, Fraction]] = {}
    for q in sorted(m.states):
        acts = sorted(avail[q])
        if q in sigma:
            act = sigma[q]
            if (q, act) not in m.transition:
                raise StrategyError(f"strategy picks action {act} undefined at state {q}")
            transition[q] = dict(m.transition[(q, act)])
        elif len(acts) == 0:
            transition[q] = {q: Fraction(1)}
        elif len(acts) == 1:
            transition[q] = dict(m.transition[(q, acts[0])])
        else:
            raise StrategyError(f"strategy undefined at state {q} with choices {acts}")
    return MarkovChain(frozenset(m.states), transition)


# ---------------------------------------------------------------------------
# JSON formats
#
# Arena:  {"vertices":[{"id":"p","owner":"P","target":false}, ...],
#          "edges":[["p","n0"], ...]}
# Family: {"n0":{"t":"1/2","f":"1/2"}}   (rationals as "num/den" strings)
# ---------------------------------------------------------------------------


def parse_arena(text: str) -> TargetArena:
    """Parse the arena JSON format; raise ``ArenaFormatError`` on problems."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArenaFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ArenaFormatError("top level must be an object")
    unknown = set(doc) - {"vertices", "edges"}
    if unknown:
        raise ArenaFormatError(f"unknown top-level key {min(unknown)!r}")
    for key in ("vertices", "edges"):
        if key not in doc or not isinstance(doc[key], list):
            raise ArenaFormatError(f"missing or non-list {key!r}")

    protagonist: set[str] = set()
    nature: set[str] = set()
    targets: set[str] = set()
    seen: set[str] = set()
    for i, entry in enumerate(doc["vertices"]):
        where = f"vertices[{i}]"
        if not isinstance(entry, dict):
            raise ArenaFormatError(f"{where}: must be an object")
        unknown = set(entry) - {"id", "owner", "target"}
        if unknown:
            raise ArenaFormatError(f"{where}: unknown key {min(unknown)!r}")
        if "id" not in entry or not isinstance(entry["id"], str):
            raise ArenaFormatError(f"{where}: missing string 'id'")
        vid = entry["id"]
        if vid in seen:
            raise ArenaFormatError(f"{where}: duplicate id {vid!r}")
        seen.add(vid)
        owner = entry.get("owner")
        if owner not in ("P", "N"):
            raise ArenaFormatError(f"{where}: owner must be 'P' or 'N'")
        target = entry.get("target", False)
        if not isinstance(target, bool):
            raise ArenaFormatError(f"{where}: target must be a boolean")
        if owner == "P":
            protagonist.add(vid)
            if target:
                targets.add(vid)
        else:
            nature.add(vid)
            if target:
                raise ArenaFormatError(f"{where}: Nature vertex {vid!r} cannot be a target")

    edges: set[tuple[str, str]] = set()
    for i, entry in enumerate(doc["edges"]):
        where = f"edges[{i}]"
        if not isinstance(entry, list) or len(entry) != 2:
            raise ArenaFormatError(f"{where}: must be a pair")
        u, v = entry
        for x in (u, v):
            if not isinstance(x, str) or x not in seen:
                raise ArenaFormatError(f"{where}: unknown vertex {x!r}")
        edges.add((u, v))
    return TargetArena(frozenset(protagonist), frozenset(nature), frozenset(edges), frozenset(targets))


def serialize_arena(a: TargetArena) -> str:
    """Serialize an arena to its JSON format (stable ordering)."""
    vertices = [
        {"id": v, "owner": "P" if v in a.protagonist else "N", "target": v in a.targets}
        for v in sorted(a.vertices)
    ]
    edges = [[u, v] for u, v in sorted(a.edges)]
    return json.dumps({"vertices": vertices, "edges": edges}, indent=2, sort_keys=True)


def parse_family(text: str) -> dict[str, dict[str, Fraction]]:
    """Parse the family JSON format; rationals are "num/den" strings."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArenaFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ArenaFormatError("family must be an object")
    fam: dict[str, dict[str, Fraction]] = {}
    for u, dist in doc.items():
        if not isinstance(dist, dict):
            raise ArenaFormatError(f"family[{u!r}] must be an object")
        row: dict[str, Fraction] = {}
        for v, s in dist.items():
            try:
                row[v] = Fraction(s)
            except (ValueError, ZeroDivisionError, TypeError) as exc:
                raise ArenaFormatError(f"family[{u!r}][{v!r}]: bad rational {s!r}") from exc
        fam[u] = row
    return fam


def serialize_family(mu: DistributionFamily) -> str:
    doc = {u: {v: str(Fraction(p)) for v, p in dist.items()} for u, dist in mu.items()}
    return json.dumps(doc, indent=2, sort_keys=True)


def arena_to_dot(a: TargetArena) -> str:
    """Render an arena as Graphviz DOT text."""
    lines = ["digraph arena {", "  rankdir=LR;"]
    for v in sorted(a.vertices):
        if v in a.nature:
            shape = "box"
        elif v in a.targets:
            shape = "doublecircle"
        else:
            shape = "circle"
        lines.append(f'  "{v}" [shape={shape}];')
    for u, v in sorted(a.edges):
        lines.append(f'  "{u}" -> "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Random generation (deterministic per seed)
# ---------------------------------------------------------------------------


def random_arena(
    n_protagonist: int,
    n_nature: int,
    edge_density: float | Fraction,
    n_targets: int,
    seed: int,
) -> TargetArena:
    """Generate a valid random arena, deterministically for a fixed seed.

    Every Nature vertex is given at least one successor by construction.
    """
    if n_protagonist < 1:
        raise ValueError("need at least one Protagonist vertex")
    if n_nature < 0:
        raise ValueError("n_nature must be non-negative")
    if not 0 <= n_targets <= n_protagonist:
        raise ValueError(f"cannot pick {n_targets} targets out of {n_protagonist} vertices")
    density = float(edge_density)
    if not 0.0 <= density <= 1.0:
        raise ValueError("edge_density must lie in [0, 1]")

    rng = random.Random(seed)
    prot = [f"p{i:02d}" for i in range(n_protagonist)]
    nat = [f"n{i:02d}" for i in range(n_nature)]
    edges: set[tuple[str, str]] = set()
    for n in nat:
        for p in prot:
            if rng.random() < density:
                edges.add((n, p))
        if not any(u == n for u, _ in edges):
            edges.add((n, rng.choice(prot)))
    for p in prot:
        for n in nat:
            if rng.random() < density:
                edges.add((p, n))
    targets = rng.sample(prot, n_targets)
    return TargetArena(frozenset(prot), frozenset(nat), frozenset(edges), frozenset(targets))


def random_family(a: TargetArena, max_denominator: int, seed: int) -> dict[str, dict[str, Fraction]]:
    """Sample a full-support rational family, deterministically per seed.

    Integer weights summing to ``max_denominator`` are drawn per Nature
    vertex, so every probability is at least ``1/max_denominator``.
    """
    rng = random.Random(seed)
    succ = successor_map(a)
    fam: dict[str, dict[str, Fraction]] = {}
    for u in sorted(a.nature):
        options = sorted(succ[u])
        k = len(options)
        if max_denominator < k:
            raise ValueError(
                f"max_denominator {max_denominator} is smaller than the {k} successors of {u}"
            )
        weights = [1] * k
        for _ in range(max_denominator - k):
            weights[rng.randrange(k)] += 1
        fam[u] = {v: Fraction(w, max_denominator) for v, w in zip(options, weights)}
    return fam
