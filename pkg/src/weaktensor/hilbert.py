"""Product-vector closure spaces on P(C^m) x P(C^n), in exact arithmetic.

An element is the set of product atoms (p1, p2) with p1 (x) p2 in a subspace
V of C^m (x) C^n.  Vectors of the tensor space are indexed by i*n + j.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import Verdict, fails, holds, unknown
from .exact import (
    I,
    G,
    GaussianRational,
    adjoint,
    conj_vec,
    format_entry,
    inner,
    kron,
    kron_matrix,
    matmul,
    matvec,
    normalize,
    nullspace,
    parse_entry,
    rank,
    rref,
    solve_in_span,
    transpose,
)

Vector = tuple[GaussianRational, ...]
Matrix = list[list[GaussianRational]]
RANDOM_RANGE = 10**6


class ZeroMatrix(ValueError):
    pass


class DimensionUnsupported(ValueError):
    pass


class SearchExhausted(RuntimeError):
    pass


# ---------------------------------------------------------------- points and subspaces


@dataclass(frozen=True)
class ProjPoint:
    coords: Vector

    def __post_init__(self):
        object.__setattr__(self, "coords", normalize(tuple(G.of(x) for x in self.coords)))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __str__(self) -> str:
        return "(" + ",".join(format_entry(x) for x in self.coords) + ")"


def point(*xs) -> ProjPoint:
    return ProjPoint(tuple(G.of(x) for x in xs))


def basis_point(k: int, dim: int) -> ProjPoint:
    return ProjPoint(tuple(G(1 if i == k else 0) for i in range(dim)))


def tensor(p1: ProjPoint, p2: ProjPoint) -> ProjPoint:
    return ProjPoint(kron(p1.coords, p2.coords))


@dataclass(frozen=True)
class Subspace:
    """A subspace of C^d held as its reduced row echelon basis."""

    dim: int
    basis: tuple[Vector, ...]

    @staticmethod
    def span(vectors: Iterable[Sequence], dim: int) -> "Subspace":
        return Subspace(dim, tuple(rref([tuple(G.of(x) for x in v) for v in vectors], dim)))

    @staticmethod
    def zero(dim: int) -> "Subspace":
        return Subspace(dim, ())

    @staticmethod
    def full(dim: int) -> "Subspace":
        return Subspace.span([[1 if i == k else 0 for i in range(dim)] for k in range(dim)], dim)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence[GaussianRational]) -> bool:
        return solve_in_span(self.basis, v) is not None

    def perp(self) -> "Subspace":
        """Orthogonal complement for the inner product conjugating its first argument."""
        if not self.basis:
            return Subspace.full(self.dim)
        return Subspace.span(nullspace([conj_vec(b) for b in self.basis], self.dim), self.dim)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(list(self.basis) + list(other.basis), self.dim)

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(b) for b in self.basis)

    def image(self, M: Sequence[Sequence[GaussianRational]]) -> "Subspace":
        return Subspace.span([matvec(M, b) for b in self.basis], len(M))


# ---------------------------------------------------------------- elements


@dataclass(frozen=True)
class DCircElement:
    m: int
    n: int
    space: Subspace
    canonical: bool = False

    def __post_init__(self):
        if self.space.dim != self.m * self.n:
            raise ValueError("subspace dimension does not match m*n")

    def member(self, p1: ProjPoint, p2: ProjPoint) -> bool:
        return member(self, p1, p2)


def element(m: int, n: int, vectors: Iterable[Sequence], canonical: bool = False) -> DCircElement:
    return DCircElement(m, n, Subspace.span(vectors, m * n), canonical)


def member(e: DCircElement, p1: ProjPoint, p2: ProjPoint) -> bool:
    if p1.dim != e.m or p2.dim != e.n:
        raise ValueError("point dimensions do not match the element")
    return e.space.contains(kron(p1.coords, p2.coords))


def _lift_matrix(p1: ProjPoint, n: int) -> Matrix:
    """K with K x = p1 (x) x."""
    m = p1.dim
    K = [[G(0)] * n for _ in range(m * n)]
    for i in range(m):
        for j in range(n):
            K[i * n + j][j] = p1.coords[i]
    return K


def section_subspace(e: DCircElement, p1: ProjPoint) -> Subspace:
    """{x : p1 (x) x in V}."""
    K = _lift_matrix(p1, e.n)
    W = e.space.perp().basis
    rows = [matvec(transpose(K), conj_vec(w)) for w in W]
    # <w, K x> = sum conj(w)_k (K x)_k
    return Subspace.span(nullspace(rows, e.n), e.n) if rows else Subspace.full(e.n)


def second_section_subspace(e: DCircElement, p2: ProjPoint) -> Subspace:
    """{x : x (x) p2 in V}."""
    m, n = e.m, e.n
    K = [[G(0)] * m for _ in range(m * n)]
    for i in range(m):
        for j in range(n):
            K[i * n + j][i] = p2.coords[j]
    W = e.space.perp().basis
    rows = [matvec(transpose(K), conj_vec(w)) for w in W]
    return Subspace.span(nullspace(rows, m), m) if rows else Subspace.full(m)


# ---------------------------------------------------------------- antilinear maps and coatoms


@dataclass(frozen=True)
class AntilinearMatrix:
    """A(lambda) = S^T conj(lambda) for an m x n matrix S."""

    S: tuple[tuple[GaussianRational, ...], ...]

    @staticmethod
    def of(S: Sequence[Sequence]) -> "AntilinearMatrix":
        return AntilinearMatrix(tuple(tuple(G.of(x) for x in row) for row in S))

    @property
    def m(self) -> int:
        return len(self.S)

    @property
    def n(self) -> int:
        return len(self.S[0])

    def apply(self, lam: Sequence[GaussianRational]) -> Vector:
        return matvec(transpose(self.S), conj_vec(lam))

    def in_x(self, p1: ProjPoint, p2: ProjPoint) -> bool:
        """(p1, p2) in X_A iff p2 is orthogonal to A(p1)."""
        return not inner(p2.coords, self.apply(p1.coords))

    def vector(self) -> Vector:
        return tuple(self.S[i][j] for i in range(self.m) for j in range(self.n))


def coatom_from_matrix(S: Sequence[Sequence]) -> DCircElement:
    A = AntilinearMatrix.of(S)
    v = A.vector()
    if not any(v):
        raise ZeroMatrix("S must be nonzero")
    V = Subspace.span([v], A.m * A.n).perp()
    # a hyperplane is spanned by its product vectors once both factors have dimension >= 2
    return DCircElement(A.m, A.n, V, canonical=A.m >= 2 and A.n >= 2)


def dual_path_agreement(S: Sequence[Sequence], points: Iterable[tuple[ProjPoint, ProjPoint]]) -> Verdict:
    """Membership via the subspace and via p2 orthogonal to A(p1) must agree."""
    A = AntilinearMatrix.of(S)
    e = coatom_from_matrix(S)
    count = 0
    for p1, p2 in points:
        a, b = member(e, p1, p2), A.in_x(p1, p2)
        if a != b:
            return fails({"p1": str(p1), "p2": str(p2), "subspace": a, "formula": b})
        count += 1
    return holds({"points": count})


# ---------------------------------------------------------------- product span


def is_product_vector(v: Sequence[GaussianRational], m: int, n: int) -> bool:
    """Rank one as an m x n matrix."""
    M = [list(v[i * n:(i + 1) * n]) for i in range(m)]
    return rank(M, n) == 1


@dataclass(frozen=True)
class ProductSpan:
    space: Subspace
    certified: bool
    note: str = ""


def product_span(V: Subspace, m: int, n: int, seed: int = 0, samples: int = 12) -> ProductSpan:
    """Span of the product vectors lying in V."""
    k = V.rank
    if k == 0:
        return ProductSpan(V, True, "zero subspace")
    if k == V.dim:
        return ProductSpan(V, True, "full space")
    if k == 1:
        ok = is_product_vector(V.basis[0], m, n)
        return ProductSpan(V if ok else Subspace.zero(V.dim), True, "rank-one test")
    if m == 2 and n == 2:
        return ProductSpan(_product_span_22(V), True, "determinant form")
    return _product_span_sampled(V, m, n, seed, samples)


def _product_span_22(V: Subspace) -> Subspace:
    b = V.basis
    k = len(b)

    def bil(x, y):
        # polarization of v0 v3 - v1 v2
        return (x[0] * y[3] + y[0] * x[3] - x[1] * y[2] - y[1] * x[2]) * G(1, 0) / 2

    B = [[bil(b[i], b[j]) for j in range(k)] for i in range(k)]
    r = rank(B, k)
    if r >= 2 or r == 0:
        return V
    # rank one: q = c * l^2, so the isotropic vectors form the radical
    rad = nullspace(B, k)
    vecs = [tuple(sum((c * bb[t] for c, bb in zip(coeffs, b)), G(0)) for t in range(V.dim)) for coeffs in rad]
    return Subspace.span(vecs, V.dim)


def random_gaussian(rng: random.Random) -> GaussianRational:
    return G(rng.randint(-RANDOM_RANGE, RANDOM_RANGE), rng.randint(-RANDOM_RANGE, RANDOM_RANGE))


def random_point(rng: random.Random, dim: int) -> ProjPoint:
    while True:
        v = tuple(random_gaussian(rng) for _ in range(dim))
        if any(v):
            return ProjPoint(v)


def structured_points(dim: int) -> list[ProjPoint]:
    pts = [basis_point(k, dim) for k in range(dim)]
    for i, j in itertools.combinations(range(dim), 2):
        v = [0] * dim
        v[i] = v[j] = 1
        pts.append(point(*v))
    return pts


def _product_span_sampled(V: Subspace, m: int, n: int, seed: int, samples: int) -> ProductSpan:
    e = DCircElement(m, n, V)
    rng = random.Random(seed)
    acc = Subspace.zero(V.dim)
    stable = 0
    pts = structured_points(m)
    while pts or stable < samples:
        p1 = pts.pop(0) if pts else random_point(rng, m)
        sec = section_subspace(e, p1)
        nxt = acc + Subspace.span([kron(p1.coords, x) for x in sec.basis], V.dim)
        if nxt.rank == acc.rank:
            stable += 1
        else:
            stable = 0
        acc = nxt
        if acc.rank == V.rank:
            return ProductSpan(acc, True, "sampled span reached V")
    return ProductSpan(acc, False, f"span stabilized after {samples} random sections")


def canonical(e: DCircElement, seed: int = 0) -> tuple[DCircElement, bool]:
    if e.canonical:
        return e, True
    ps = product_span(e.space, e.m, e.n, seed)
    return DCircElement(e.m, e.n, ps.space, canonical=ps.certified), ps.certified


# ---------------------------------------------------------------- joins, equality, separation


def dcirc_join(items: Sequence[DCircElement | tuple[ProjPoint, ProjPoint]], m: int | None = None,
               n: int | None = None, seed: int = 0) -> DCircElement:
    """Join of atoms and elements: span of all product vectors involved."""
    vectors = []
    certified = True
    for it in items:
        if isinstance(it, DCircElement):
            m, n = it.m, it.n
            c, ok = canonical(it, seed)
            certified &= ok
            vectors.extend(c.space.basis)
        else:
            p1, p2 = it
            m, n = p1.dim, p2.dim
            vectors.append(kron(p1.coords, p2.coords))
    if m is None or n is None:
        raise ValueError("cannot infer dimensions of an empty join")
    return DCircElement(m, n, Subspace.span(vectors, m * n), canonical=certified)


def dcirc_equal(e1: DCircElement, e2: DCircElement, seed: int = 0, k: int = 20) -> Verdict:
    """Equality of the atom sets; certified whenever both product spans are exact."""
    if (e1.m, e1.n) != (e2.m, e2.n):
        raise ValueError("different contexts")
    if e1.space == e2.space:
        return holds(note="same subspace")
    c1, ok1 = canonical(e1, seed)
    c2, ok2 = canonical(e2, seed)
    if ok1 and ok2:
        if c1.space == c2.space:
            return holds(note="equal product spans")
        w = _distinguishing_atom(c1, c2, seed)
        return fails(w, note="product spans differ")
    rng = random.Random(seed)
    pts = structured_points(e1.m) + [random_point(rng, e1.m) for _ in range(k)]
    for p1 in pts:
        s1, s2 = section_subspace(e1, p1), section_subspace(e2, p1)
        if s1 != s2:
            return fails(_section_witness(e1, e2, p1, s1, s2))
    return holds(note=f"sections agree at {len(pts)} points (seed {seed}); not certified")


def _section_witness(e1, e2, p1, s1, s2) -> dict:
    for x in s1.basis:
        if not s2.contains(x):
            return {"p1": str(p1), "p2": str(ProjPoint(x)), "in_first": True}
    for x in s2.basis:
        if not s1.contains(x):
            return {"p1": str(p1), "p2": str(ProjPoint(x)), "in_first": False}
    return {"p1": str(p1)}


def _distinguishing_atom(c1: DCircElement, c2: DCircElement, seed: int) -> dict:
    for a, b, flag in ((c1, c2, True), (c2, c1, False)):
        for v in a.space.basis:
            if not b.space.contains(v):
                # some product vector of a lies outside b; search sections for one
                rng = random.Random(seed)
                for p1 in structured_points(a.m) + [random_point(rng, a.m) for _ in range(40)]:
                    sec = section_subspace(a, p1)
                    for x in list(sec.basis) + _section_sums(sec):
                        q2 = ProjPoint(x)
                        if not member(b, p1, q2):
                            return {"p1": str(p1), "p2": str(q2), "in_first": flag}
    return {}


def _section_sums(S: Subspace) -> list[Vector]:
    return [tuple(a + b for a, b in zip(x, y)) for x, y in itertools.combinations(S.basis, 2)]


def is_separated_element(e: DCircElement, seed: int = 0) -> Verdict:
    """Both the canonical subspace and its complement are spanned by product vectors."""
    if e.m > 3 or e.n > 3:
        raise DimensionUnsupported("separation test limited to m, n <= 3")
    c, ok = canonical(e, seed)
    W = c.space.perp()
    ps = product_span(W, e.m, e.n, seed)
    if ps.certified and ps.space != W:
        missing = next(b for b in W.basis if not ps.space.contains(b))
        return fails({"kind": "complement_entangled", "complement_rank": W.rank,
                      "product_span_rank": ps.space.rank, "vector": [format_entry(x) for x in missing]})
    if not (ok and ps.certified):
        return unknown(note="product span not certified")
    return holds({"rank": c.space.rank})


# ---------------------------------------------------------------- witnesses


def _embed(v: Sequence[int], dim: int) -> ProjPoint:
    return point(*(list(v) + [0] * (dim - len(v))))


@dataclass
class StrictInclusionReport:
    separated_gap: DCircElement
    separated_verdict: Verdict
    triple: list[tuple[ProjPoint, ProjPoint]]
    fourth: tuple[ProjPoint, ProjPoint]
    join: DCircElement
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.separated_verdict.fails and all(self.checks.values())


def strict_inclusion_witnesses(m: int, n: int, seed: int = 0) -> StrictInclusionReport:
    if m < 2 or n < 2:
        raise ValueError("both dimensions must be at least 2")
    S = [[G(1 if (i == j and i < 2) else 0) for j in range(n)] for i in range(m)]
    gap = coatom_from_matrix(S)
    verdict = is_separated_element(gap, seed) if m <= 3 and n <= 3 else unknown(note="dimension too large")
    e1, e2 = _embed([1, 0], m), _embed([0, 1], m)
    f1, f2 = _embed([1, 0], n), _embed([0, 1], n)
    triple = [(e1, f1), (e2, f2), (_embed([1, 1], m), _embed([1, 1], n))]
    fourth = (_embed([1, -1], m), _embed([1, -1], n))
    j = dcirc_join(triple)
    checks = {
        "triple_is_xi": all(a[0] != b[0] and a[1] != b[1] for a, b in itertools.combinations(triple, 2)),
        "fourth_in_join": member(j, *fourth),
        "fourth_not_in_triple": fourth not in triple,
        "triple_in_join": all(member(j, *t) for t in triple),
        # independent path: the tensor of the fourth atom is a combination of the three tensors
        "fourth_in_span_direct": rank([kron(a.coords, b.coords) for a, b in triple] +
                                      [kron(fourth[0].coords, fourth[1].coords)], m * n) == 3,
        "gap_dual_path": dual_path_agreement(S, [(e1, f1), (e1, f2), (e2, f1), fourth]).holds,
    }
    return StrictInclusionReport(gap, verdict, triple, fourth, j, checks)


# ---------------------------------------------------------------- symmetries


def signed_permutations(dim: int) -> list[Matrix]:
    out = []
    for perm in itertools.permutations(range(dim)):
        for signs in itertools.product((1, -1), repeat=dim):
            M = [[G(0)] * dim for _ in range(dim)]
            for i, (j, s) in enumerate(zip(perm, signs)):
                M[i][j] = G(s)
            out.append(M)
    return out


PYTHAGOREAN = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29)]


def rotation(dim: int, i: int, j: int, a: int, b: int, c: int, phase: GaussianRational | None = None) -> Matrix:
    """Rational rotation by (a/c, b/c) in the (i, j) plane, optionally with a unit phase on j."""
    M = [[G(1 if r == s else 0) for s in range(dim)] for r in range(dim)]
    ca, sb = G(a, 0) / c, G(b, 0) / c
    M[i][i], M[i][j], M[j][i], M[j][j] = ca, -sb, sb, ca
    if phase is not None:
        M = matmul(M, [[phase if (r == s == j) else G(1 if r == s else 0) for s in range(dim)] for r in range(dim)])
    return M


UNIT_PHASES = [G(1), G(0, 1), G(-1), G(0, -1), G(3, 4) / 5, G(5, 12) / 13]


def random_unitary(rng: random.Random, dim: int) -> Matrix:
    M = rng.choice(signed_permutations(dim))
    for _ in range(2):
        i, j = rng.sample(range(dim), 2)
        a, b, c = rng.choice(PYTHAGOREAN)
        M = matmul(M, rotation(dim, i, j, a, b, c, rng.choice(UNIT_PHASES)))
    return M


def is_unitary(U: Sequence[Sequence[GaussianRational]]) -> bool:
    P = matmul(adjoint(U), U)
    return all(P[i][j] == (1 if i == j else 0) for i in range(len(P)) for j in range(len(P)))


def transform_matrix(S: Sequence[Sequence[GaussianRational]], U1: Matrix, U2: Matrix) -> Matrix:
    """S' with X_{A'} = (U1 x U2)(X_A); A' = U2 A U1^{-1} gives S' = U1 S U2^T."""
    return matmul(matmul(U1, [list(r) for r in S]), transpose(U2))


def unitary_invariance(S: Sequence[Sequence], U1: Matrix, U2: Matrix, points: Iterable[tuple[ProjPoint, ProjPoint]]) -> Verdict:
    U1, U2 = as_matrix(U1), as_matrix(U2)
    e = coatom_from_matrix(S)
    image = e.space.image(kron_matrix(U1, U2))
    S2 = transform_matrix(AntilinearMatrix.of(S).S, U1, U2)
    target = coatom_from_matrix(S2)
    if image != target.space:
        return fails({"kind": "subspace_mismatch"})
    A2 = AntilinearMatrix.of(S2)
    for p1, p2 in points:
        q1, q2 = ProjPoint(matvec(U1, p1.coords)), ProjPoint(matvec(U2, p2.coords))
        if AntilinearMatrix.of(S).in_x(p1, p2) != A2.in_x(q1, q2):
            return fails({"kind": "point_mismatch", "p1": str(p1), "p2": str(p2)})
    return holds({"transformed": [[format_entry(x) for x in row] for row in S2]})


def _perp_point(sub: Subspace) -> Vector | None:
    """For a line in C^2, the direction orthogonal to it."""
    if sub.rank != 1:
        return None
    return sub.perp().basis[0]


def as_matrix(M: Sequence[Sequence]) -> Matrix:
    return [[G.of(x) for x in row] for row in M]


def _candidate_test(S: Sequence[Sequence], U1: Matrix, second) -> Verdict:
    """Fit an antilinear B to the image of X_A under (U1, second) and probe it.

    Sections at e1, e2 and e1+e2 pin down the only candidate B up to scale;
    the section at e1 + i e2 then confirms or refutes it.
    """
    A = AntilinearMatrix.of(S)
    if (A.m, A.n) != (2, 2):
        raise DimensionUnsupported("breakage check is implemented for m = n = 2")
    e = coatom_from_matrix(S)
    U1_inv = adjoint(as_matrix(U1))

    def image_section(q1: ProjPoint) -> Subspace:
        p1 = ProjPoint(matvec(U1_inv, q1.coords))
        return Subspace.span([second(x) for x in section_subspace(e, p1).basis], 2)

    dirs = [_perp_point(image_section(q)) for q in (point(1, 0), point(0, 1), point(1, 1))]
    if any(d is None for d in dirs):
        return unknown(note="degenerate sections")
    d1, d2, d3 = dirs
    beta = _solve_affine(d1, d2, d3)
    if beta is None:
        return holds({"kind": "no_candidate"}, note="no antilinear map matches the first three sections")
    N = [[d1[0], beta * d2[0]], [d1[1], beta * d2[1]]]  # columns are B e1, B e2
    q = point(1, I)
    predicted = Subspace.span([matvec(N, conj_vec(q.coords))], 2).perp()
    actual = image_section(q)
    if predicted == actual:
        return fails({"kind": "candidate_survives", "B": [[format_entry(x) for x in r] for r in N]})
    return holds({"probe": str(q), "predicted": [format_entry(x) for x in predicted.basis[0]],
                  "actual": [format_entry(x) for x in actual.basis[0]] if actual.basis else []},
                 note="unique candidate refuted at the fourth probe")


def antiunitary_breakage(S: Sequence[Sequence], U1: Matrix, U2: Matrix) -> Verdict:
    """Holds when the image of X_A under (U1, conj o U2) is not X_B for any antilinear B (m = n = 2)."""
    U2 = as_matrix(U2)
    return _candidate_test(S, U1, lambda x: conj_vec(matvec(U2, x)))


def unitary_control(S: Sequence[Sequence], U1: Matrix, U2: Matrix) -> Verdict:
    """The same procedure with a unitary second map; expected to Fail (a candidate survives)."""
    U2 = as_matrix(U2)
    return _candidate_test(S, U1, lambda x: matvec(U2, x))


def _solve_affine(d1: Vector, d2: Vector, d3: Vector) -> GaussianRational | None:
    """beta != 0 with d1 + beta d2 parallel to d3."""
    a = d1[0] * d3[1] - d1[1] * d3[0]
    b = d2[0] * d3[1] - d2[1] * d3[0]
    if not b or not a:
        return None
    return -a / b


# ---------------------------------------------------------------- text formats


def parse_matrix(text: str) -> Matrix:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows must be nonempty and of equal length")
    return [[parse_entry(x) for x in r] for r in rows]


def format_matrix(M: Sequence[Sequence[GaussianRational]]) -> str:
    return "\n".join(" ".join(format_entry(x) for x in row) for row in M) + "\n"


def parse_point(text: str) -> ProjPoint:
    t = text.strip().strip("()")
    return ProjPoint(tuple(parse_entry(x) for x in t.split(",")))

