"""Generators for the lattice families used throughout the checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

from .core import (
    MAX_ATOMS,
    BoundsExceeded,
    ClosureSpace,
    GroundSet,
    _trusted,
    loads,
    power_set_space,
)
from .ortho import OrthoMap, from_atom_images


class OddAtomCount(ValueError):
    """MO(n) with n odd has no fixed-point-free involution on its atoms."""


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str  # "powerset" | "mo" | "projective" | "file"
    n: int = 0
    q: int = 0
    d: int = 0
    path: str = ""

    @classmethod
    def power_set(cls, n: int) -> "GeneratorSpec":
        return cls("powerset", n=n)

    @classmethod
    def mo(cls, n: int) -> "GeneratorSpec":
        return cls("mo", n=n)

    @classmethod
    def projective(cls, q: int, d: int) -> "GeneratorSpec":
        return cls("projective", q=q, d=d)

    @classmethod
    def from_file(cls, path: str) -> "GeneratorSpec":
        return cls("file", path=path)

    def check_bounds(self) -> None:
        if self.kind in ("powerset", "mo"):
            if not 1 <= self.n <= MAX_ATOMS:
                raise BoundsExceeded(f"n={self.n} outside 1..{MAX_ATOMS}")
            if self.kind == "powerset" and self.n > 20:
                raise BoundsExceeded("power sets are enumerated; n must be at most 20")
        elif self.kind == "projective":
            if self.q not in (2, 3) or self.d not in (2, 3, 4):
                raise BoundsExceeded(f"projective geometry needs q in {{2,3}}, d in {{2,3,4}}, got q={self.q} d={self.d}")
            if (self.q ** self.d - 1) // (self.q - 1) > MAX_ATOMS:
                raise BoundsExceeded("too many points")
        elif self.kind != "file":
            raise BoundsExceeded(f"unknown generator kind {self.kind!r}")


def atom_names(n: int, prefix: str = "p") -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(n))


def power_set(n: int, prefix: str = "p") -> ClosureSpace:
    GeneratorSpec.power_set(n).check_bounds()
    return power_set_space(atom_names(n, prefix))


def mo(n: int, prefix: str = "p") -> ClosureSpace:
    GeneratorSpec.mo(n).check_bounds()
    ground = GroundSet(atom_names(n, prefix))
    family = [0, ground.full] + [1 << i for i in range(n)]
    # singletons are the coatoms too (except in MO1 and MO2 where extra sets are harmless)
    return _trusted(ground, family, [1 << i for i in range(n)] + [ground.full])


def two() -> ClosureSpace:
    """The two-element space on a single atom."""
    return power_set(1)


def _normalize(v: tuple[int, ...], q: int) -> tuple[int, ...]:
    lead = next(x for x in v if x)
    inv = pow(lead, -1, q)
    return tuple((x * inv) % q for x in v)


def projective(q: int, d: int) -> ClosureSpace:
    """Subspace lattice of GF(q)^d presented on its projective points."""
    GeneratorSpec.projective(q, d).check_bounds()
    points = sorted({_normalize(v, q) for v in itertools.product(range(q), repeat=d) if any(v)}, reverse=True)
    index = {p: i for i, p in enumerate(points)}
    names = tuple("(" + ":".join(map(str, p)) + ")" for p in points)
    ground = GroundSet(names)

    def span(gens: list[tuple[int, ...]]) -> int:
        out = 0
        for coeffs in itertools.product(range(q), repeat=len(gens)):
            v = tuple(sum(c * g[k] for c, g in zip(coeffs, gens)) % q for k in range(d))
            if any(v):
                out |= 1 << index[_normalize(v, q)]
        return out

    # breadth-first over subspaces: extend each by one point outside it
    found = {0: []}
    frontier = [0]
    while frontier:
        nxt = []
        for s in frontier:
            basis = found[s]
            for i, p in enumerate(points):
                if s >> i & 1:
                    continue
                t = span(basis + [p])
                if t not in found:
                    found[t] = basis + [p]
                    nxt.append(t)
        frontier = nxt
    family = list(found)
    coatoms = [s for s in family if len(found[s]) == d - 1]
    return _trusted(ground, family, coatoms + [ground.full])


def generate(spec: GeneratorSpec) -> ClosureSpace:
    spec.check_bounds()
    if spec.kind == "powerset":
        return power_set(spec.n)
    if spec.kind == "mo":
        return mo(spec.n)
    if spec.kind == "projective":
        return projective(spec.q, spec.d)
    return loads(Path(spec.path).read_text())


def mo_orthocomplementation(n: int, L: ClosureSpace | None = None) -> OrthoMap:
    """Pair atom 2k with atom 2k+1 on MO(n)."""
    if n < 2 or n % 2:
        raise OddAtomCount(f"MO({n}) admits no orthocomplementation: {n} atoms cannot be paired")
    L = L if L is not None else mo(n)
    partner = {i: i ^ 1 for i in range(n)}
    return from_atom_images(L, {i: 1 << partner[i] for i in range(n)})


def complement_ortho(L: ClosureSpace) -> OrthoMap:
    """Set complement, the orthocomplementation of a power set."""
    return OrthoMap(L, {a: L.full & ~a for a in L.closed})
