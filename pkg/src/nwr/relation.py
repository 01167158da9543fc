"""Store for under-approximations of the never-worse relation.

A stored pair ``(v, W)`` asserts that for every full-support family some
vertex of ``W`` has a maximal reachability value at least that of ``v``.
The claim is monotone in ``W``, so the store keeps only inclusion-minimal
sets per vertex and answers ``holds(v, W)`` by subset against them.

Vertex sets are represented as integer bitmasks internally; the public
surface speaks plain strings and frozensets.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator

from .arena import TargetArena, successor_map


def candidate_universe(a: TargetArena) -> tuple[frozenset[str], ...]:
    """The right-hand sets the inference rules range over.

    Singletons, full successor sets, and successor sets with one element
    deleted: exactly what the rules and the reduction steps consume, which
    keeps saturation polynomial instead of ranging over all subsets.
    """
    succ = successor_map(a)
    sets: set[frozenset[str]] = {frozenset((v,)) for v in a.vertices}
    for v in sorted(a.vertices):
        sv = frozenset(succ[v])
        if sv:
            sets.add(sv)
        for x in succ[v]:
            rest = sv - {x}
            if rest:
                sets.add(rest)
    return tuple(sorted(sets, key=lambda w: (len(w), tuple(sorted(w)))))


class NwrRelation:
    """Mutable pair store, reflexive by construction, subset-queryable."""

    __slots__ = ("_order", "_index", "_rows")

    def __init__(self, vertices: Iterable[str]):
        self._order: tuple[str, ...] = tuple(sorted(set(vertices)))
        self._index: dict[str, int] = {v: i for i, v in enumerate(self._order)}
        self._rows: dict[str, list[int]] = {
            v: [1 << i] for v, i in self._index.items()
        }

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._order

    def mask(self, vs: Iterable[str]) -> int:
        m = 0
        for v in vs:
            m |= 1 << self._index[v]
        return m

    def unmask(self, m: int) -> frozenset[str]:
        out = []
        while m:
            b = m & -m
            m ^= b
            out.append(self._order[b.bit_length() - 1])
        return frozenset(out)

    def add(self, v: str, w: Iterable[str]) -> bool:
        """Record ``v <= W``; returns False when already implied."""
        return self.add_mask(v, self.mask(w))

    def add_mask(self, v: str, m: int) -> bool:
        if m == 0:
            raise ValueError("the right-hand set of a pair must be non-empty")
        row = self._rows[v]
        for y in row:
            if y & ~m == 0:  # stored subset already implies the new pair
                return False
        row[:] = [y for y in row if m & ~y != 0]  # drop now-implied supersets
        row.append(m)
        return True

    def holds(self, v: str, w: Iterable[str]) -> bool:
        return self.holds_mask(v, self.mask(w))

    def holds_mask(self, v: str, m: int) -> bool:
        return any(y & ~m == 0 for y in self._rows[v])

    def equivalent(self, v: str, w: str) -> bool:
        """Mutual singleton relation: both values always coincide."""
        return self.holds_mask(v, 1 << self._index[w]) and self.holds_mask(
            w, 1 << self._index[v]
        )

    def below_mask(self, m: int) -> list[str]:
        """All vertices v with ``v <= W`` for the set W encoded by ``m``."""
        return [v for v in self._order if self.holds_mask(v, m)]

    def pairs(self) -> Iterator[tuple[str, frozenset[str]]]:
        """Stored (inclusion-minimal) pairs in canonical order."""
        for v in self._order:
            row = sorted(self._rows[v], key=lambda y: (y.bit_count(), self.unmask_key(y)))
            for y in row:
                yield v, self.unmask(y)

    def unmask_key(self, m: int) -> tuple[str, ...]:
        return tuple(sorted(self.unmask(m)))

    def pair_count(self) -> int:
        return sum(len(row) for row in self._rows.values())

    def copy(self) -> "NwrRelation":
        dup = NwrRelation(self._order)
        dup._rows = {v: row[:] for v, row in self._rows.items()}
        return dup

    def close(self, universe_masks: Iterable[int]) -> bool:
        """Pseudo transitive closure, restricted to the candidate universe.

        Adds ``v <= X`` whenever some stored ``v <= W`` has every member of
        ``W`` already below ``X``.  Idempotent; returns whether anything
        was added.
        """
        masks = list(universe_masks)
        changed_any = False
        changed = True
        while changed:
            changed = False
            for v in self._order:
                for x in masks:
                    if self.holds_mask(v, x):
                        continue
                    for y in list(self._rows[v]):
                        yy = y
                        ok = True
                        while yy:
                            b = yy & -yy
                            yy ^= b
                            if not self.holds_mask(self._order[b.bit_length() - 1], x):
                                ok = False
                                break
                        if ok:
                            self.add_mask(v, x)
                            changed = changed_any = True
                            break
        return changed_any

    def to_json(self) -> str:
        doc = [{"v": v, "W": sorted(w)} for v, w in self.pairs()]
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str, vertices: Iterable[str]) -> "NwrRelation":
        rel = cls(vertices)
        for entry in json.loads(text):
            rel.add(entry["v"], entry["W"])
        return rel


def ptc(r: NwrRelation, universe: Iterable[frozenset[str]]) -> NwrRelation:
    """Pseudo transitive closure as a pure function over a universe."""
    out = r.copy()
    out.close([out.mask(w) for w in universe])
    return out
