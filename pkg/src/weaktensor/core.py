"""Finite simple closure spaces over bitset-encoded atom sets.

Subsets of the ground set are plain Python ints: bit ``i`` is set iff the
atom at position ``i`` belongs to the subset. The same encoding serves
single spaces (at most 64 atoms) and product grounds (at most 4096).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Iterator, Sequence

MAX_ATOMS = 64
MAX_PRODUCT_ATOMS = 4096


class WeakTensorError(Exception):
    """Base class for every error raised by the toolkit."""


class ValidationError(WeakTensorError):
    """A family of subsets is not a simple closure space."""


class MissingBottom(ValidationError):
    pass


class MissingTop(ValidationError):
    pass


class MissingSingleton(ValidationError):
    def __init__(self, atom: str):
        super().__init__(f"singleton {{{atom}}} is not closed")
        self.atom = atom


class NotIntersectionClosed(ValidationError):
    def __init__(self, a: list[str], b: list[str]):
        super().__init__(f"intersection of {a} and {b} is not closed")
        self.a = a
        self.b = b


class NotClosed(WeakTensorError):
    def __init__(self, subset: list[str]):
        super().__init__(f"{subset} is not a closed set")
        self.subset = subset


class BoundsExceeded(WeakTensorError):
    pass


class BudgetExceeded(WeakTensorError):
    def __init__(self, message: str, partial: int = 0):
        super().__init__(message)
        self.partial = partial


class ParseError(WeakTensorError):
    pass


# ---------------------------------------------------------------- bit helpers


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(x: int) -> Iterator[int]:
    """Positions of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def from_positions(positions: Iterable[int]) -> int:
    out = 0
    for i in positions:
        out |= 1 << i
    return out


def subset_key(x: int) -> tuple[int, tuple[int, ...]]:
    """Canonical order of closed sets: by size, then lexicographically by positions."""
    return popcount(x), tuple(bits(x))


# ---------------------------------------------------------------- ground sets


@dataclass(frozen=True)
class GroundSet:
    atoms: tuple[str, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValidationError("ground set must be nonempty")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValidationError("atom names must be pairwise distinct")

    @property
    def size(self) -> int:
        return len(self.atoms)

    @cached_property
    def full(self) -> int:
        return (1 << len(self.atoms)) - 1

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.atoms)}

    def encode(self, names: Iterable[str]) -> int:
        out = 0
        for name in names:
            try:
                out |= 1 << self.index[name]
            except KeyError:
                raise ValidationError(f"unknown atom {name!r}") from None
        return out

    def decode(self, x: int) -> list[str]:
        return [self.atoms[i] for i in bits(x)]


# ---------------------------------------------------------------- verdicts


class Status(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


@dataclass
class Verdict:
    status: Status
    witness: dict[str, Any] = field(default_factory=dict)
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.status.value, "witness": self.witness, "note": self.note}

    def __bool__(self) -> bool:  # pragma: no cover - guard against misuse
        raise TypeError("use Verdict.holds / Verdict.fails instead of truthiness")


def holds(witness: dict | None = None, note: str = "") -> Verdict:
    return Verdict(Status.HOLDS, witness or {}, note)


def fails(witness: dict | None = None, note: str = "") -> Verdict:
    return Verdict(Status.FAILS, witness or {}, note)


def unknown(witness: dict | None = None, note: str = "") -> Verdict:
    return Verdict(Status.UNKNOWN, witness or {}, note)


# ---------------------------------------------------------------- closure spaces


class ClosureSpace:
    """A validated simple closure space on a finite ground set.

    ``closed`` is kept sorted by :func:`subset_key`. ``generators`` is an
    optional meet-generating subfamily: every closed set is the intersection
    of the generators containing it. Closure queries only scan the generators,
    which keeps products with thousands of closed sets responsive.
    """

    def __init__(self, ground: GroundSet, closed: Iterable[int], generators: Sequence[int] | None = None):
        self.ground = ground
        family = sorted(set(closed), key=subset_key)
        self.closed: tuple[int, ...] = tuple(family)
        self._members = frozenset(family)
        self.generators: tuple[int, ...] = tuple(generators) if generators is not None else self.closed

    # -- basic queries
    @property
    def full(self) -> int:
        return self.ground.full

    @property
    def n_atoms(self) -> int:
        return self.ground.size

    def __len__(self) -> int:
        return len(self.closed)

    def __iter__(self) -> Iterator[int]:
        return iter(self.closed)

    def __contains__(self, x: int) -> bool:
        return x in self._members

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClosureSpace):
            return NotImplemented
        return self.ground == other.ground and self.closed == other.closed

    def __hash__(self) -> int:
        return hash((self.ground, self.closed))

    def __repr__(self) -> str:
        return f"ClosureSpace(atoms={self.n_atoms}, closed={len(self.closed)})"

    def is_closed(self, x: int) -> bool:
        return x in self._members

    # -- lattice operations
    def closure(self, x: int) -> int:
        out = self.full
        for g in self.generators:
            if x & g == x:
                out &= g
        return out

    def join(self, *xs: int) -> int:
        acc = 0
        for x in xs:
            acc |= x
        return self.closure(acc)

    @staticmethod
    def meet(*xs: int) -> int:
        out = -1
        for x in xs:
            out &= x
        return out if xs else 0

    def atom(self, i: int) -> int:
        return 1 << i

    @cached_property
    def coatoms(self) -> tuple[int, ...]:
        full = self.full
        return tuple(
            c for c in self.closed
            if c != full and all(self.closure(c | (1 << i)) == full for i in bits(full & ~c))
        )

    def upper_covers(self, a: int) -> list[int]:
        candidates = {self.closure(a | (1 << i)) for i in bits(self.full & ~a)}
        return sorted((c for c in candidates if not any(d != c and d & c == d for d in candidates)), key=subset_key)

    def interval(self, lo: int, hi: int) -> list[int]:
        return [c for c in self.closed if c & lo == lo and c & hi == c]

    # -- presentation
    def names(self, x: int) -> list[str]:
        return self.ground.decode(x)

    def to_document(self) -> dict[str, Any]:
        return {"atoms": list(self.ground.atoms), "closed": [self.names(c) for c in self.canonical_order()]}

    def canonical_order(self) -> list[int]:
        """Closed sets sorted by (size, lexicographic atom names)."""
        return sorted(self.closed, key=lambda c: (popcount(c), sorted(self.names(c))))

    def dumps(self) -> str:
        return json.dumps(self.to_document(), indent=1)

    def relabel(self, names: Sequence[str]) -> "ClosureSpace":
        return ClosureSpace(GroundSet(tuple(names)), self.closed, self.generators)


def _trusted(ground: GroundSet, closed: Iterable[int], generators: Sequence[int] | None = None) -> ClosureSpace:
    """Build without re-validating; callers guarantee the closure axioms."""
    return ClosureSpace(ground, closed, generators)


def validate_bits(ground: GroundSet, family: Iterable[int], max_atoms: int = MAX_PRODUCT_ATOMS) -> ClosureSpace:
    if ground.size > max_atoms:
        raise BoundsExceeded(f"{ground.size} atoms exceeds the cap of {max_atoms}")
    members = sorted(set(family), key=subset_key)
    present = set(members)
    if 0 not in present:
        raise MissingBottom("the empty set is not closed")
    if ground.full not in present:
        raise MissingTop("the full ground set is not closed")
    for i, name in enumerate(ground.atoms):
        if (1 << i) not in present:
            raise MissingSingleton(name)
    for k, a in enumerate(members):
        for b in members[k + 1:]:
            if (a & b) not in present:
                raise NotIntersectionClosed(ground.decode(a), ground.decode(b))
    return ClosureSpace(ground, members)


def validate(atoms: Sequence[str], family: Iterable[Iterable[str]], max_atoms: int = MAX_ATOMS) -> ClosureSpace:
    """Check the closure axioms on a named family and return the space.

    Raises the first violated axiom in the order bottom, top, singletons,
    pairwise intersections.
    """
    ground = GroundSet(tuple(atoms))
    return validate_bits(ground, (ground.encode(s) for s in family), max_atoms=max_atoms)


def loads(text: str, max_atoms: int = MAX_ATOMS) -> ClosureSpace:
    try:
        doc = json.loads(text)
        atoms, closed = doc["atoms"], doc["closed"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"not a lattice document: {exc}") from exc
    if not isinstance(atoms, list) or not all(isinstance(a, str) for a in atoms):
        raise ParseError("'atoms' must be a list of strings")
    if not isinstance(closed, list) or not all(isinstance(c, list) for c in closed):
        raise ParseError("'closed' must be a list of lists")
    return validate(atoms, closed, max_atoms=max_atoms)


def power_set_space(atoms: Sequence[str]) -> ClosureSpace:
    ground = GroundSet(tuple(atoms))
    n = ground.size
    if n > 20:
        raise BoundsExceeded("power set too large to enumerate")
    gens = [ground.full & ~(1 << i) for i in range(n)] + [ground.full]
    return _trusted(ground, range(1 << n), gens)


# ---------------------------------------------------------------- predicates


def closure(L: ClosureSpace, A: int) -> int:
    return L.closure(A)


def _require_closed(L: ClosureSpace, *xs: int) -> None:
    for x in xs:
        if x not in L:
            raise NotClosed(L.names(x))


def covers(L: ClosureSpace, a: int, b: int) -> bool:
    """True iff ``a`` covers ``b``: b is strictly below a with nothing closed in between."""
    _require_closed(L, a, b)
    if b & a != b or a == b:
        return False
    # any closed set strictly between contains some atom of a minus b
    return all(L.closure(b | (1 << i)) == a for i in bits(a & ~b))


def has_covering_property(L: ClosureSpace) -> Verdict:
    for a in L.closed:
        for i in bits(L.full & ~a):
            j = L.closure(a | (1 << i))
            for k in bits(j & ~a):
                c = L.closure(a | (1 << k))
                if c != j:
                    return fails({
                        "kind": "covering_failure",
                        "atom": L.ground.atoms[i],
                        "a": L.names(a),
                        "join": L.names(j),
                        "between": L.names(c),
                    })
    return holds(note=f"checked {len(L)} closed sets against every atom")


def is_coatomistic(L: ClosureSpace) -> bool:
    coatoms = L.coatoms
    for c in L.closed:
        acc = L.full
        for x in coatoms:
            if x & c == c:
                acc &= x
        if acc != c:
            return False
    return True


def is_atomistic(L: ClosureSpace) -> bool:
    """Always true for a simple closure space; kept for symmetry in reports."""
    return all(L.closure(c) == c for c in L.closed)


def is_power_set(L: ClosureSpace) -> bool:
    return len(L) == 1 << L.n_atoms


def atoms_of(L: ClosureSpace) -> list[int]:
    return [1 << i for i in range(L.n_atoms)]


def is_intersection_closed(family: Sequence[int]) -> tuple[int, int] | None:
    """Return a violating pair, or None when the family is closed under pairwise intersection."""
    present = set(family)
    fam = list(present)
    for k, a in enumerate(fam):
        for b in fam[k + 1:]:
            if (a & b) not in present:
                return a, b
    return None


def hasse_edges(L: ClosureSpace) -> list[tuple[int, int]]:
    """Covering pairs (lower, upper) of the closed family."""
    return [(a, c) for a in L.closed for c in L.upper_covers(a)]


def direct_product(L1: ClosureSpace, L2: ClosureSpace) -> ClosureSpace:
    """Disjoint-union space whose closed sets are unions a1 + a2 (the lattice direct product)."""
    n1 = L1.n_atoms
    ground = GroundSet(L1.ground.atoms + L2.ground.atoms)
    family = [a | (b << n1) for a in L1.closed for b in L2.closed]
    gens = [g | (L2.full << n1) for g in L1.generators] + [L1.full | (g << n1) for g in L2.generators]
    return _trusted(ground, family, gens)


def to_dot(L: ClosureSpace) -> str:
    def label(x: int) -> str:
        names = L.names(x)
        return "{" + ",".join(names) + "}" if names else "0"

    lines = ["digraph hasse {", "  rankdir=BT;"]
    for k, c in enumerate(L.closed):
        lines.append(f'  n{k} [label="{label(c)}"];')
    pos = {c: k for k, c in enumerate(L.closed)}
    for a, c in hasse_edges(L):
        lines.append(f"  n{pos[a]} -> n{pos[c]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
