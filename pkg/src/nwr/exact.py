"""Exact decision of the never-worse relation on small arenas.

``v <= W`` fails exactly when the vertices can be layered so that the
Protagonist never points strictly upward, any Nature vertex pointing
upward also points strictly downward, some simple path from ``v`` to the
targets stays in the top layer, and all of ``W`` sits strictly below it.
Such a layering, found here by search over simple paths plus a canonical
greedy construction of the lower layers, doubles as a checkable
certificate; from it one can synthesize a concrete full-support family
that separates the values across one half.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
import json
from typing import Iterable, Iterator, Optional

from .arena import TargetArena, random_family, successor_map
from .solve import vertex_values


class SizeLimitError(RuntimeError):
    """The arena is too large for exhaustive decision."""


@dataclass(frozen=True)
class NwrCertificate:
    """Refutation certificate: bottom-to-top layers, a simple path from
    ``v`` to a target inside the top layer, and ``W`` strictly below."""

    layers: tuple[frozenset[str], ...]
    path: tuple[str, ...]
    v: str
    W: frozenset[str]

    def to_json(self) -> str:
        return json.dumps(
            {
                "layers": [sorted(layer) for layer in self.layers],
                "path": list(self.path),
                "v": self.v,
                "W": sorted(self.W),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "NwrCertificate":
        doc = json.loads(text)
        return cls(
            tuple(frozenset(layer) for layer in doc["layers"]),
            tuple(doc["path"]),
            doc["v"],
            frozenset(doc["W"]),
        )


@dataclass(frozen=True)
class NwrDecision:
    holds: bool
    certificate: Optional[NwrCertificate] = None


def verify_drift_partition(a: TargetArena, layers: Iterable[Iterable[str]]) -> bool:
    """Check the two layering conditions; raise if not a partition.

    Protagonist vertices may never point strictly above their own layer;
    a Nature vertex pointing above must also point strictly below (which
    rules the bottom and top layers out as sources of upward edges).
    """
    blocks = [frozenset(b) for b in layers]
    if any(not b for b in blocks):
        raise ValueError("layers must be non-empty")
    union: set[str] = set()
    for b in blocks:
        if union & b:
            raise ValueError("layers must be disjoint")
        union |= b
    if union != set(a.vertices):
        raise ValueError("layers must cover exactly the arena vertices")

    pos = {v: i for i, b in enumerate(blocks) for v in b}
    k = len(blocks) - 1
    succ = successor_map(a)
    for x in sorted(a.vertices):
        i = pos[x]
        ups = any(pos[y] > i for y in succ[x])
        if not ups:
            continue
        if x in a.protagonist:
            return False
        if not (0 < i < k and any(pos[y] < i for y in succ[x])):
            return False
    return True


def verify_certificate(
    a: TargetArena,
    cert: NwrCertificate,
    v: Optional[str] = None,
    w: Optional[Iterable[str]] = None,
) -> bool:
    """Soundly check a refutation certificate against an arena."""
    v = cert.v if v is None else v
    wset = cert.W if w is None else frozenset(w)
    if v != cert.v or wset != cert.W:
        return False
    try:
        if not verify_drift_partition(a, cert.layers):
            return False
    except ValueError:
        return False
    path = cert.path
    if not path or path[0] != v or path[-1] not in a.targets:
        return False
    if len(set(path)) != len(path):
        return False
    if any((path[i], path[i + 1]) not in a.edges for i in range(len(path) - 1)):
        return False
    top = cert.layers[-1]
    if not set(path) <= top:
        return False
    # every target must sit in the top layer: a buried target keeps value 1
    # under every family, so nothing below it can certify a refutation
    if not a.targets <= top:
        return False
    below: set[str] = set().union(*cert.layers[:-1]) if len(cert.layers) > 1 else set()
    return bool(wset) and wset <= below


def _simple_target_paths(a: TargetArena, v: str) -> Iterator[tuple[str, ...]]:
    """All simple paths from ``v`` ending at a target, depth-first with
    sorted successors (deterministic order)."""
    succ = successor_map(a)
    targets = a.targets
    path = [v]
    seen = {v}

    def walk(x: str) -> Iterator[tuple[str, ...]]:
        if x in targets:
            yield tuple(path)
        for y in succ[x]:
            if y not in seen:
                path.append(y)
                seen.add(y)
                yield from walk(y)
                path.pop()
                seen.remove(y)

    yield from walk(v)


def _greedy_layers(a: TargetArena, pinned_top: set[str]) -> tuple[list[frozenset[str]], set[str]]:
    """Build maximal valid layers bottom-up underneath a pinned top set.

    Each layer is the largest set of still-free vertices whose Protagonist
    members have no edge above it and whose Nature members pointing above
    also point into an already-placed layer.  Maximal layers are
    canonical: moving any closed or valid set downward never invalidates a
    layering, so this greedy succeeds whenever any layering does.
    """
    succ = successor_map(a)
    placed: set[str] = set()
    layers: list[frozenset[str]] = []
    remaining = set(a.vertices) - pinned_top
    while remaining:
        m = set(remaining)
        while True:
            drop = set()
            for x in m:
                up = False
                down = False
                for y in succ[x]:
                    if y in placed:
                        down = True
                    elif y not in m:
                        up = True
                if up and (x in a.protagonist or not down):
                    drop.add(x)
            if not drop:
                break
            m -= drop
        if not m:
            break
        layers.append(frozenset(m))
        placed |= m
        remaining -= m
    return layers, placed


def decide_nwr(a: TargetArena, v: str, w: Iterable[str], limit: int = 10) -> NwrDecision:
    """Decide ``v <= W`` exactly; refutations come with a certificate.

    Enumerates simple paths from ``v`` to the targets in canonical order;
    for each, the greedy layer construction either buries all of ``W``
    below the layer holding the path and the targets (refuted,
    certificate emitted) or proves no layering exists for that path.
    Complete: the relation fails iff some path admits such a layering.
    """
    wset = frozenset(w)
    if not wset:
        raise ValueError("W must be non-empty")
    unknown = ({v} | wset) - a.vertices
    if unknown:
        raise ValueError(f"unknown vertex {min(unknown)}")
    if len(a.vertices) > limit:
        raise SizeLimitError(
            f"arena has {len(a.vertices)} vertices, over the limit of {limit}; "
            "use saturate() or sample_falsify() for larger instances"
        )
    if v in wset or wset & a.targets:
        return NwrDecision(True)
    for path in _simple_target_paths(a, v):
        if wset & set(path):
            continue
        layers, placed = _greedy_layers(a, set(path) | a.targets)
        if wset <= placed:
            top = frozenset(a.vertices - placed)
            cert = NwrCertificate(tuple(layers) + (top,), path, v, wset)
            return NwrDecision(False, cert)
    return NwrDecision(True)


def default_epsilon(n_vertices: int) -> Fraction:
    """A rational epsilon strictly inside the witness bound for ``n``
    vertices: half the distance below ``1 - 2**(-1/n)``, obtained from an
    exact rational upper bound on ``2**(-1/n)``."""
    if n_vertices < 1:
        raise ValueError("need at least one vertex")
    half = Fraction(1, 2)
    lo, hi = half, Fraction(1)
    for _ in range(20):
        mid = (lo + hi) / 2
        if mid**n_vertices >= half:
            hi = mid
        else:
            lo = mid
    return (1 - hi) / 2


def epsilon_witness(
    a: TargetArena, cert: NwrCertificate, eps: Fraction | None = None
) -> dict[str, dict[str, Fraction]]:
    """Synthesize a full-support family from a certificate.

    Nature vertices on the certificate path send mass ``1 - eps`` along
    it; every Nature vertex of a middle layer with a strictly lower
    successor sends ``1 - eps`` to its smallest such successor; all other
    mass is spread uniformly.  For ``eps`` under the bound the source's
    value exceeds one half while every vertex below the top stays under
    it.
    """
    if not verify_certificate(a, cert):
        raise ValueError("certificate does not verify against this arena")
    n = len(a.vertices)
    eps = default_epsilon(n) if eps is None else Fraction(eps)
    if not (0 < eps < 1) or (1 - eps) ** n <= Fraction(1, 2):
        raise ValueError(
            f"eps={eps} out of range: need 0 < eps < 1 - 2**(-1/{n}) "
            f"so that (1-eps)**{n} > 1/2"
        )
    succ = successor_map(a)
    pinned: dict[str, str] = {}
    for i, x in enumerate(cert.path[:-1]):
        if x in a.nature:
            pinned[x] = cert.path[i + 1]
    pos = {v: i for i, layer in enumerate(cert.layers) for v in layer}
    k = len(cert.layers) - 1
    for x in sorted(a.nature):
        if 0 < pos[x] < k:
            lower = sorted(y for y in succ[x] if pos[y] < pos[x])
            if lower:
                pinned[x] = lower[0]
    family: dict[str, dict[str, Fraction]] = {}
    for u in sorted(a.nature):
        options = sorted(succ[u])
        if u in pinned and len(options) > 1:
            main = pinned[u]
            rest = Fraction(eps, len(options) - 1)
            family[u] = {s: (1 - eps if s == main else rest) for s in options}
        else:
            family[u] = {s: Fraction(1, len(options)) for s in options}
    return family


def sample_falsify(
    a: TargetArena,
    v: str,
    w: Iterable[str],
    trials: int = 500,
    max_denominator: int = 32,
    seed: int = 0,
) -> Optional[dict[str, dict[str, Fraction]]]:
    """Randomized one-sided refutation check.

    Samples full-support rational families and returns the first one whose
    exact values put ``v`` strictly above all of ``W``; ``None`` means no
    refutation was found (the relation may still fail).
    """
    wset = frozenset(w)
    if not wset:
        raise ValueError("W must be non-empty")
    rng = random.Random(seed)
    for _ in range(trials):
        fam = random_family(a, max_denominator, rng.randrange(2**32))
        vals = vertex_values(a, fam).values
        if all(vals[v] > vals[x] for x in wset):
            return fam
    return None
