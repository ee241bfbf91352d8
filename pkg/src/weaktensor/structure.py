"""Structural predicates and searches on closure spaces."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx

from .core import (
    BudgetExceeded,
    ClosureSpace,
    Verdict,
    _trusted,
    bits,
    covers,
    fails,
    holds,
    popcount,
    subset_key,
    unknown,
)
from .ortho import OrthoMap, check as check_ortho, from_atom_images
from .products import ProductContext, context

EXHAUSTIVE_LIMIT = 50_000


class NotLarge(ValueError):
    pass


class NotFactorable(ValueError):
    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


# ---------------------------------------------------------------- modular pairs and the center


def is_modular_pair(L: ClosureSpace, a: int, b: int) -> bool:
    """(c v a) ^ b == c v (a ^ b) for every closed c below b."""
    ab = a & b
    for c in L.closed:
        if c & b != c:
            continue
        if L.closure(c | a) & b != L.closure(c | ab):
            return False
    return True


def is_central(L: ClosureSpace, z: int) -> bool:
    zc = L.full & ~z
    return zc in L and is_modular_pair(L, z, zc) and is_modular_pair(L, zc, z)


@dataclass
class CentralDecomposition:
    space: ClosureSpace
    center: list[int]
    central_atoms: list[int]
    components: list[ClosureSpace] = field(repr=False)
    reconstruction: Verdict = field(repr=False, default=None)

    def e(self, p: int) -> int:
        for z in self.central_atoms:
            if z >> p & 1:
                return z
        raise KeyError(p)


def _component(L: ClosureSpace, z: int) -> ClosureSpace:
    pos = list(bits(z))
    idx = {p: i for i, p in enumerate(pos)}
    from .core import GroundSet

    ground = GroundSet(tuple(L.ground.atoms[p] for p in pos))
    fam = []
    for a in L.closed:
        if a & z == a:
            fam.append(sum(1 << idx[p] for p in bits(a)))
    return _trusted(ground, fam)


def product_reconstruction(L: ClosureSpace, parts: Sequence[int]) -> Verdict:
    """a -> (a & z) over the central atoms z is a bijection onto the product of the intervals [0, z]."""
    images = set()
    for a in L.closed:
        img = tuple(a & z for z in parts)
        for x in img:
            if x not in L:
                return fails({"kind": "part_not_closed", "a": L.names(a), "part": L.names(x)})
        images.add(img)
    if len(images) != len(L):
        return fails({"kind": "not_injective"})
    sizes = [sum(1 for a in L.closed if a & z == a) for z in parts]
    if math.prod(sizes) != len(L):
        return fails({"kind": "count_mismatch", "sizes": sizes, "total": len(L)})
    return holds({"sizes": sizes}, note="componentwise intersection is an order isomorphism onto the product")


def central_elements(L: ClosureSpace) -> CentralDecomposition:
    center = [z for z in L.closed if is_central(L, z)]
    classes = []
    seen = 0
    for p in range(L.n_atoms):
        if seen >> p & 1:
            continue
        e = L.full
        for z in center:
            if z >> p & 1:
                e &= z
        classes.append(e)
        seen |= e
    comps = [_component(L, z) for z in classes]
    dec = CentralDecomposition(L, center, classes, comps)
    dec.reconstruction = product_reconstruction(L, classes)
    return dec


def is_irreducible(L: ClosureSpace) -> bool:
    return all(z in (0, L.full) for z in L.closed if is_central(L, z))


def ortho_central_test(L: ClosureSpace, ortho: OrthoMap, z: int) -> bool:
    """z' equals the set complement; cross-checked against the modular-pair criterion."""
    by_ortho = ortho(z) == L.full & ~z
    if by_ortho != is_central(L, z):
        raise AssertionError(f"central criteria disagree at {L.names(z)}")
    return by_ortho


# ---------------------------------------------------------------- orthocomplementations


@dataclass(frozen=True)
class Exhausted:
    """No orthocomplementation exists; ``explored`` counts search nodes."""

    explored: int
    reason: str = ""


def find_orthocomplementation(L: ClosureSpace, budget: int = 2_000_000,
                              count_shortcut: bool = True) -> OrthoMap | Exhausted:
    """Backtrack over atom -> coatom images forming a symmetric, irreflexive orthogonality.

    An orthocomplementation restricts to a bijection from atoms onto coatoms, so unequal
    counts settle the question at once unless ``count_shortcut`` is off.
    """
    n = L.n_atoms
    coatoms = list(L.coatoms)
    if n == 1:
        o = from_atom_images(L, {0: 0})
        return o if check_ortho(o).holds else Exhausted(0, "no valid map")
    if count_shortcut and len(coatoms) != n:
        return Exhausted(0, f"{n} atoms but {len(coatoms)} coatoms")
    choice: list[int | None] = [None] * n
    used = [False] * len(coatoms)
    nodes = 0

    def consistent(p: int, c: int) -> bool:
        if c >> p & 1:
            return False
        for q in range(p):
            if bool(c >> q & 1) != bool(choice[q] >> p & 1):
                return False
        # (p v q)' = p' ^ q' must complement p v q and sit below r' for every r <= p v q
        for q in range(p):
            j = L.closure((1 << p) | (1 << q))
            m = c & choice[q]
            if j & m or L.closure(j | m) != L.full:
                return False
            if any(choice[r] & m != m for r in bits(j) if r < p):
                return False
        return True

    def rec(p: int) -> OrthoMap | None:
        nonlocal nodes
        if p == n:
            o = from_atom_images(L, dict(enumerate(choice)))
            return o if check_ortho(o).holds else None
        for k, c in enumerate(coatoms):
            if used[k] or not consistent(p, c):
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded("orthocomplementation search budget exceeded", nodes)
            used[k] = True
            choice[p] = c
            found = rec(p + 1)
            if found is not None:
                return found
            used[k] = False
            choice[p] = None
        return None

    result = rec(0)
    return result if result is not None else Exhausted(nodes, "search space exhausted")


def is_orthomodular(L: ClosureSpace, ortho: OrthoMap) -> Verdict:
    if len(L) > EXHAUSTIVE_LIMIT:
        return unknown(note="family too large for an exhaustive scan")
    for a in L.closed:
        oa = ortho(a)
        for b in L.closed:
            if a & b == a and L.closure(a | (b & oa)) != b:
                return fails({"kind": "orthomodular_failure", "a": L.names(a), "b": L.names(b),
                              "b_meet_a_perp": L.names(b & oa)})
    return holds()


# ---------------------------------------------------------------- MO_n, connectedness


def contains_mo(L: ClosureSpace, n: int) -> Verdict:
    """n atoms p1..pn whose join p1 v pn covers each of them."""
    if n < 3:
        raise ValueError("n must be at least 3")
    for p, q in itertools.combinations(range(L.n_atoms), 2):
        j = L.closure((1 << p) | (1 << q))
        covered = [i for i in bits(j) if covers(L, j, 1 << i)]
        if p in covered and q in covered and len(covered) >= n:
            others = [i for i in covered if i not in (p, q)][: n - 2]
            atoms = [p] + others + [q]
            return holds({"atoms": [L.ground.atoms[i] for i in atoms], "join": L.names(j)})
    return fails({"kind": "no_mo", "n": n}, note="exhaustive scan over atom pairs")


def _pair_closures(L: ClosureSpace) -> dict[tuple[int, int], int]:
    return {(p, q): L.closure((1 << p) | (1 << q)) for p, q in itertools.combinations(range(L.n_atoms), 2)}


def is_connected(L: ClosureSpace) -> Verdict:
    """Every two atoms have a third r under their join with p in q v r and q in p v r."""
    if L.n_atoms == 1:
        return fails({"kind": "two"}, note="the two-element space is excluded")
    pc = _pair_closures(L)

    def j(a: int, b: int) -> int:
        return pc[(a, b) if a < b else (b, a)]

    for p, q in itertools.combinations(range(L.n_atoms), 2):
        ok = any(j(q, r) >> p & 1 and j(p, r) >> q & 1 for r in bits(j(p, q)) if r not in (p, q))
        if not ok:
            return fails({"p": L.ground.atoms[p], "q": L.ground.atoms[q]})
    return holds()


def _line_graph(L: ClosureSpace) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(L.n_atoms))
    for (p, q), j in _pair_closures(L).items():
        if popcount(j) >= 3:
            G.add_edge(p, q)
    return G


def is_weakly_connected(L: ClosureSpace, max_cliques: int = 100_000) -> Verdict:
    """Exact test using every maximal clique of the 'join has a third atom' graph as a block.

    Any valid covering refines into these cliques, and enlarging blocks only
    increases overlaps, so a certificate exists iff the maximal cliques work.
    """
    if L.n_atoms == 1:
        return fails({"kind": "two"}, note="the two-element space is excluded")
    G = _line_graph(L)
    cliques = []
    for c in nx.find_cliques(G):
        if len(c) >= 2:
            cliques.append(sum(1 << p for p in c))
        if len(cliques) > max_cliques:
            return unknown({"cliques": len(cliques)}, note="clique budget exceeded")
    cliques.sort(key=subset_key)
    covered = 0
    for c in cliques:
        covered |= c
    if covered != L.full:
        p = next(bits(L.full & ~covered))
        return fails({"kind": "uncovered_atom", "atom": L.ground.atoms[p]})
    H = nx.Graph()
    H.add_nodes_from(range(len(cliques)))
    for i, j in itertools.combinations(range(len(cliques)), 2):
        if popcount(cliques[i] & cliques[j]) >= 2:
            H.add_edge(i, j)
    comps = list(nx.connected_components(H))
    if len(comps) > 1:
        a = next(bits(cliques[min(comps[0])]))
        b = next(bits(cliques[min(comps[1])]))
        return fails({"kind": "disconnected_blocks", "components": len(comps),
                      "p": L.ground.atoms[a], "q": L.ground.atoms[b]})
    return holds({"blocks": [L.names(c) for c in cliques]})


# ---------------------------------------------------------------- automorphisms and atom maps


@dataclass(frozen=True)
class AtomMap:
    """Atom-to-atom map between closure spaces, extended to closed sets by joins."""

    source: ClosureSpace
    target: ClosureSpace
    images: tuple[int, ...]

    def image_set(self, A: int) -> int:
        out = 0
        for p in bits(A):
            out |= 1 << self.images[p]
        return out

    def __call__(self, a: int) -> int:
        return self.target.closure(self.image_set(a))

    def preimage(self, b: int) -> int:
        return sum(1 << p for p, x in enumerate(self.images) if b >> x & 1)

    def preserves_joins(self) -> bool:
        # for maps sending atoms to atoms, join preservation is closedness of preimages
        return all(self.preimage(b) in self.source for b in self.target.closed)

    def is_bijective(self) -> bool:
        return sorted(self.images) == list(range(self.target.n_atoms))

    def compose(self, other: "AtomMap") -> "AtomMap":
        """self after other."""
        return AtomMap(other.source, self.target, tuple(self.images[x] for x in other.images))


def _degree_profile(L: ClosureSpace) -> list[tuple]:
    prof = [[0] * (L.n_atoms + 1) for _ in range(L.n_atoms)]
    for a in L.closed:
        k = popcount(a)
        for p in bits(a):
            prof[p][k] += 1
    return [tuple(x) for x in prof]


def automorphisms(L: ClosureSpace, budget: int = 5_000_000, max_atoms: int = 16) -> list[AtomMap]:
    """All atom permutations preserving the closed family, by pruned backtracking."""
    n = L.n_atoms
    if n > max_atoms:
        raise BudgetExceeded(f"automorphism search limited to {max_atoms} atoms", 0)
    prof = _degree_profile(L)
    pc = _pair_closures(L)

    def j(a: int, b: int) -> int:
        return pc[(a, b) if a < b else (b, a)]

    img = [-1] * n
    used = [False] * n
    out: list[AtomMap] = []
    nodes = 0

    def ok(p: int, x: int) -> bool:
        img[p] = x
        try:
            for q in range(p):
                jq, jx = j(q, p), j(img[q], x)
                if popcount(jq) != popcount(jx):
                    return False
                for r in range(p + 1):
                    if bool(jq >> r & 1) != bool(jx >> img[r] & 1):
                        return False
                # p against the joins of earlier pairs
                for r in range(q):
                    if bool(j(r, q) >> p & 1) != bool(j(img[r], img[q]) >> x & 1):
                        return False
            return True
        finally:
            img[p] = -1

    def rec(p: int) -> None:
        nonlocal nodes
        if p == n:
            perm = tuple(img)
            m = AtomMap(L, L, perm)
            if all(m.image_set(a) in L for a in L.closed):
                out.append(m)
            return
        for x in range(n):
            if used[x] or prof[x] != prof[p] or not ok(p, x):
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded("automorphism search budget exceeded", len(out))
            img[p] = x
            used[x] = True
            rec(p + 1)
            used[x] = False
            img[p] = -1

    rec(0)
    return out


def is_group(maps: Sequence[AtomMap]) -> bool:
    perms = {m.images for m in maps}
    return all(a.compose(b).images in perms for a in maps for b in maps)


def is_transitive(L: ClosureSpace, auts: Sequence[AtomMap] | None = None) -> bool:
    auts = automorphisms(L) if auts is None else auts
    orbit = {m.images[0] for m in auts}
    return len(orbit) == L.n_atoms


# ---------------------------------------------------------------- large maps and factorization


def is_large(u: AtomMap, factors: Sequence[ClosureSpace] | ProductContext) -> bool:
    ctx = context(factors)
    top = u(ctx.full)
    for beta in range(len(ctx)):
        for p in range(ctx.n_atoms):
            if popcount(u(ctx.line(p, beta))) <= 1:
                return False
            if top & ctx.cylinder(1 << ctx.coords(p)[beta], beta) == top:
                return False
    return True


@dataclass
class Factorization:
    permutation: tuple[int, ...]
    maps: tuple[AtomMap, ...]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Factorization):
            return NotImplemented
        return self.permutation == other.permutation and tuple(m.images for m in self.maps) == tuple(
            m.images for m in other.maps)


def induce(fact: Factorization, L: ClosureSpace, factors: Sequence[ClosureSpace] | ProductContext) -> AtomMap:
    """The product atom map with u(p)_{f(i)} = v_i(p_i)."""
    ctx = context(factors)
    images = []
    for p in range(ctx.n_atoms):
        cs = ctx.coords(p)
        out = [0] * len(ctx)
        for i, v in enumerate(fact.maps):
            out[fact.permutation[i]] = v.images[cs[i]]
        images.append(ctx.index(out))
    return AtomMap(L, L, tuple(images))


def factor_endomorphism(u: AtomMap, factors: Sequence[ClosureSpace] | ProductContext) -> Factorization:
    ctx = context(factors)
    n = len(ctx)
    if not is_large(u, ctx):
        raise NotLarge("map is not large")
    p0 = 0
    base = ctx.coords(u.images[p0])
    perm = []
    for j in range(n):
        moved = set()
        for x in range(ctx.sizes[j]):
            c = ctx.coords(u.images[ctx.substitute(p0, x, j)])
            moved |= {k for k in range(n) if c[k] != base[k]}
        if len(moved) != 1:
            raise NotFactorable(f"line {j} through the base atom moves {len(moved)} coordinates",
                                {"factor": j, "coordinates": sorted(moved)})
        perm.append(moved.pop())
    if sorted(perm) != list(range(n)):
        raise NotFactorable("coordinate assignment is not a permutation", {"f": perm})
    maps = []
    for j in range(n):
        k = perm[j]
        images = tuple(ctx.coords(u.images[ctx.substitute(p0, x, j)])[k] for x in range(ctx.sizes[j]))
        maps.append(AtomMap(ctx.factors[j], ctx.factors[k], images))
    fact = Factorization(tuple(perm), tuple(maps))
    for p in range(ctx.n_atoms):
        cp, cu = ctx.coords(p), ctx.coords(u.images[p])
        for i in range(n):
            if cu[perm[i]] != maps[i].images[cp[i]]:
                raise NotFactorable("identity fails", {"atom": ctx.atom_name(p), "factor": i})
    for i, v in enumerate(maps):
        if not v.preserves_joins():
            raise NotFactorable("factor map does not preserve joins", {"factor": i})
    return fact


def product_automorphism(ctx: ProductContext, L: ClosureSpace, perm: Sequence[int],
                         maps: Sequence[Sequence[int]]) -> AtomMap:
    fact = Factorization(tuple(perm), tuple(AtomMap(ctx.factors[i], ctx.factors[perm[i]], tuple(m))
                                            for i, m in enumerate(maps)))
    return induce(fact, L, ctx)


__all__ = [
    "AtomMap", "CentralDecomposition", "Exhausted", "Factorization", "NotFactorable", "NotLarge",
    "automorphisms", "central_elements", "contains_mo", "factor_endomorphism", "find_orthocomplementation",
    "induce", "is_central", "is_connected", "is_group", "is_irreducible", "is_large", "is_modular_pair",
    "is_orthomodular", "is_transitive", "is_weakly_connected", "ortho_central_test", "product_reconstruction",
]
