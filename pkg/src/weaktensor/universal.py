"""Maps into 2, the Galois correspondence for the top product, and bimorphism factorization."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import BudgetExceeded, ClosureSpace, Verdict, _require_closed, bits, fails, holds
from .products import DEFAULT_BUDGET, ProductContext, enumerate_top, top_membership


class NotBimorphism(ValueError):
    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


@dataclass(frozen=True)
class TwoValuedMap:
    """h_a: 0 exactly on the closed sets below a."""

    source: ClosureSpace
    kernel: int

    def atom_value(self, p: int) -> int:
        return 0 if self.kernel >> p & 1 else 1

    def __call__(self, b: int) -> int:
        return 0 if b & self.kernel == b else 1

    def preserves_joins(self) -> bool:
        L = self.source
        if self(0) != 0:
            return False
        return all(self(L.closure(b | c)) == max(self(b), self(c)) for b in L.closed for c in L.closed)


def point_separating_map(L: ClosureSpace, a: int) -> TwoValuedMap:
    _require_closed(L, a)
    h = TwoValuedMap(L, a)
    if not h.preserves_joins():
        raise AssertionError("h_a does not preserve joins")
    return h


# ---------------------------------------------------------------- Galois correspondence


@dataclass(frozen=True)
class JoinPreservingMap:
    """f: L1 -> L2* given by atom images; joins in L2* are intersections."""

    source: ClosureSpace
    target: ClosureSpace
    images: tuple[int, ...]

    def __call__(self, a: int) -> int:
        out = self.target.full
        for p in bits(a):
            out &= self.images[p]
        return out

    def upper(self, b: int) -> int:
        """F^{-1}(b): the atoms whose image lies above b in L2* (contains b as a set)."""
        return sum(1 << p for p, x in enumerate(self.images) if x & b == b)

    def preserves_joins(self) -> bool:
        return all(self.upper(b) in self.source for b in self.target.closed)


def map_to_set(f: JoinPreservingMap) -> int:
    """R_F = union of the rows p1 x F(p1)."""
    n2 = f.target.n_atoms
    R = 0
    for p, x in enumerate(f.images):
        R |= x << (p * n2)
    return R


def set_to_map(R: int, L1: ClosureSpace, L2: ClosureSpace) -> JoinPreservingMap:
    n2 = L2.n_atoms
    mask = (1 << n2) - 1
    return JoinPreservingMap(L1, L2, tuple((R >> (p * n2)) & mask for p in range(L1.n_atoms)))


@dataclass
class GaloisReport:
    maps: list[JoinPreservingMap]
    members: list[int]
    verdict: Verdict

    @property
    def counts(self) -> tuple[int, int]:
        return len(self.maps), len(self.members)


def join_preserving_maps(L1: ClosureSpace, L2: ClosureSpace, budget: int = DEFAULT_BUDGET) -> list[JoinPreservingMap]:
    if len(L2) ** L1.n_atoms > 50 * budget:
        raise BudgetExceeded("too many candidate atom tables", 0)
    out = []
    for images in itertools.product(L2.closed, repeat=L1.n_atoms):
        f = JoinPreservingMap(L1, L2, images)
        if f.preserves_joins():
            out.append(f)
    return out


def galois_correspondence(L1: ClosureSpace, L2: ClosureSpace, budget: int = DEFAULT_BUDGET,
                          seed: int = 0, pairs: int = 2000) -> GaloisReport:
    """Match join-preserving maps L1 -> L2* with members of the top product, order-reversingly."""
    maps = join_preserving_maps(L1, L2, budget)
    members = list(enumerate_top([L1, L2], budget).closed)
    ctx = ProductContext([L1, L2])
    memberset = set(members)
    forward = {map_to_set(f): f for f in maps}
    problems = None
    if len(maps) != len(members):
        problems = {"kind": "count_mismatch", "maps": len(maps), "members": len(members)}
    elif set(forward) != memberset:
        extra = sorted(set(forward) ^ memberset)[0]
        problems = {"kind": "not_bijective", "set": ctx.names(extra)}
    else:
        for R in members:
            if map_to_set(set_to_map(R, L1, L2)) != R:
                problems = {"kind": "round_trip", "set": ctx.names(R)}
                break
    if problems is None:
        all_pairs = [(a, b) for a in members for b in members]
        if len(all_pairs) > pairs:
            all_pairs = random.Random(seed).sample(all_pairs, pairs)
        for R, S in all_pairs:
            fR, fS = set_to_map(R, L1, L2), set_to_map(S, L1, L2)
            # R <= S iff F_S <= F_R pointwise in L2*, where the order is reverse inclusion
            dual_le = all(y & x == x for x, y in zip(fR.images, fS.images))
            if (R & S == R) != dual_le:
                problems = {"kind": "order", "R": ctx.names(R), "S": ctx.names(S)}
                break
        for f in maps if problems is None else []:
            for a in L1.closed:
                for b in L2.closed:
                    if (f(a) & b == b) != (a & f.upper(b) == a):
                        problems = {"kind": "galois_law", "images": [L2.names(x) for x in f.images]}
                        break
    if problems is None:
        verdict = holds({"maps": len(maps), "members": len(members)},
                        note="R -> row sections is an order anti-isomorphism onto maps ordered pointwise in the dual")
    else:
        verdict = fails(problems)
    return GaloisReport(maps, members, verdict)


# ---------------------------------------------------------------- bimorphisms


@dataclass
class FactoredBimorphism:
    """h(R) = join of g over the atoms of R, on the top product of the two factors."""

    context: ProductContext
    target: ClosureSpace
    table: tuple[int, ...]  # flat product atom -> closed set of target

    def __call__(self, R: int) -> int:
        acc = 0
        for p in bits(R):
            acc |= self.table[p]
        return self.target.closure(acc)

    def preimage(self, b: int) -> int:
        return sum(1 << p for p, x in enumerate(self.table) if x & b == x)


def _partial_preimage(values: Sequence[int], b: int) -> int:
    return sum(1 << i for i, x in enumerate(values) if x & b == x)


def check_bimorphism(g: Mapping[tuple[int, int], int], L1: ClosureSpace, L2: ClosureSpace, L: ClosureSpace) -> Verdict:
    """Each partial map preserves joins: preimages of closed sets are closed in the factor."""
    for p1 in range(L1.n_atoms):
        row = [g[(p1, p2)] for p2 in range(L2.n_atoms)]
        for b in L.closed:
            if _partial_preimage(row, b) not in L2:
                return fails({"kind": "row", "p1": L1.ground.atoms[p1], "b": L.names(b)})
    for p2 in range(L2.n_atoms):
        col = [g[(p1, p2)] for p1 in range(L1.n_atoms)]
        for b in L.closed:
            if _partial_preimage(col, b) not in L1:
                return fails({"kind": "column", "p2": L2.ground.atoms[p2], "b": L.names(b)})
    for x in g.values():
        if x not in L:
            return fails({"kind": "image_not_closed", "set": L.names(x)})
    return holds()


def extend_bimorphism(g: Mapping[tuple[int, int], int], L: ClosureSpace, a1: int, a2: int) -> int:
    """g(a1, a2) computed by joining in the second argument, then in the first."""
    acc = 0
    for p1 in bits(a1):
        inner = 0
        for p2 in bits(a2):
            inner |= g[(p1, p2)]
        acc |= L.closure(inner)
    return L.closure(acc)


def factor_bimorphism(g: Mapping[tuple[int, int], int], L1: ClosureSpace, L2: ClosureSpace,
                      L: ClosureSpace) -> FactoredBimorphism:
    v = check_bimorphism(g, L1, L2, L)
    if not v.holds:
        raise NotBimorphism("partial maps do not preserve joins", v.witness)
    ctx = ProductContext([L1, L2])
    table = tuple(g[ctx.coords(p)] for p in range(ctx.n_atoms))
    h = FactoredBimorphism(ctx, L, table)
    for b in L.closed:
        pre = h.preimage(b)
        if not top_membership(ctx, pre):
            raise AssertionError(f"preimage of {L.names(b)} is not in the top product")
    for a1 in L1.closed:
        for a2 in L2.closed:
            rect = 0
            for p1 in bits(a1):
                for p2 in bits(a2):
                    rect |= 1 << ctx.index((p1, p2))
            if h(rect) != extend_bimorphism(g, L, a1, a2):
                raise AssertionError("h does not restrict to g on rectangles")
    return h


def canonical_bimorphism(L1: ClosureSpace, L2: ClosureSpace) -> dict[tuple[int, int], int]:
    """f(a1, a2) = a1 x a2 on atoms."""
    ctx = ProductContext([L1, L2])
    return {(p1, p2): 1 << ctx.index((p1, p2)) for p1 in range(L1.n_atoms) for p2 in range(L2.n_atoms)}


def product_bimorphism(v1: Sequence[int], v2: Sequence[int], M1: ClosureSpace, M2: ClosureSpace,
                       L1: ClosureSpace, L2: ClosureSpace) -> dict[tuple[int, int], int]:
    """(p1, p2) -> (v1 p1, v2 p2) as an atom of the top product of M1 and M2."""
    ctx = ProductContext([M1, M2])
    return {(p1, p2): 1 << ctx.index((v1[p1], v2[p2])) for p1 in range(L1.n_atoms) for p2 in range(L2.n_atoms)}


def parse_map_table(text: str, L1: ClosureSpace, L2: ClosureSpace, L: ClosureSpace) -> dict[tuple[int, int], int]:
    """Lines ``p1 p2 -> a b c`` (``-`` for the empty set)."""
    from .core import ParseError

    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise ParseError(f"line {lineno}: expected '->'")
        lhs, rhs = line.split("->", 1)
        keys = lhs.split()
        if len(keys) != 2:
            raise ParseError(f"line {lineno}: expected two atom names before '->'")
        try:
            p1, p2 = L1.ground.index[keys[0]], L2.ground.index[keys[1]]
        except KeyError as e:
            raise ParseError(f"line {lineno}: unknown atom {e}") from None
        names = rhs.split()
        if names == ["-"]:
            names = []
        try:
            out[(p1, p2)] = L.ground.encode(names)
        except (KeyError, ValueError) as e:
            raise ParseError(f"line {lineno}: {e}") from None
    missing = [(a, b) for a in range(L1.n_atoms) for b in range(L2.n_atoms) if (a, b) not in out]
    if missing:
        a, b = missing[0]
        raise ParseError(f"no entry for {L1.ground.atoms[a]} {L2.ground.atoms[b]}")
    return out


def format_map_table(g: Mapping[tuple[int, int], int], L1: ClosureSpace, L2: ClosureSpace, L: ClosureSpace) -> str:
    lines = []
    for (p1, p2), x in sorted(g.items()):
        rhs = " ".join(L.names(x)) or "-"
        lines.append(f"{L1.ground.atoms[p1]} {L2.ground.atoms[p2]} -> {rhs}")
    return "\n".join(lines) + "\n"
