"""Orthocomplementations on closure spaces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import ClosureSpace, Verdict, bits, fails, holds


class OrthoError(ValueError):
    pass


@dataclass(frozen=True)
class OrthoMap:
    """A candidate orthocomplementation, stored as a table on closed sets."""

    space: ClosureSpace
    table: Mapping[int, int]

    def __call__(self, a: int) -> int:
        return self.table[a]

    def perp_atom(self, i: int) -> int:
        return self.table[1 << i]

    def orthogonal(self, i: int, j: int) -> bool:
        return bool(self.table[1 << j] >> i & 1)

    def names(self) -> dict[str, list[str]]:
        L = self.space
        return {",".join(L.names(a)) or "0": L.names(b) for a, b in self.table.items()}


def from_atom_images(L: ClosureSpace, atom_perp: Mapping[int, int]) -> OrthoMap:
    """Extend atom images p -> p' to every closed set by a' = meet of p' over p in a."""
    table = {}
    for a in L.closed:
        out = L.full
        for i in bits(a):
            out &= atom_perp[i]
        table[a] = out
    return OrthoMap(L, table)


def check(ortho: OrthoMap) -> Verdict:
    """Involution, order reversal and complementation (both a v a' = 1 and a ^ a' = 0)."""
    L = ortho.space
    t = ortho.table
    for a in L.closed:
        b = t.get(a)
        if b is None or b not in L:
            return fails({"kind": "not_total", "a": L.names(a)})
        if t.get(b) != a:
            return fails({"kind": "not_involutive", "a": L.names(a)})
        if a & b:
            return fails({"kind": "meet_not_zero", "a": L.names(a)})
        if L.closure(a | b) != L.full:
            return fails({"kind": "join_not_one", "a": L.names(a)})
    # for an involution, order reversal is equivalent to a' being the meet of its atoms' images
    for a in L.closed:
        m = L.full
        for i in bits(a):
            m &= t[1 << i]
        if m != t[a]:
            for c in L.closed:
                if c & a == c and t[a] & t[c] != t[a]:
                    return fails({"kind": "not_order_reversing", "a": L.names(c), "b": L.names(a)})
            return fails({"kind": "not_order_reversing", "a": L.names(a)})
    return holds()


def is_orthocomplementation(ortho: OrthoMap) -> bool:
    return check(ortho).holds
