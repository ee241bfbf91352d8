import random

import pytest
from hypothesis import given, settings, strategies as st

from weaktensor.exact import GaussianRational as G, I, kron
from weaktensor.hilbert import (
    AntilinearMatrix,
    DimensionUnsupported,
    Subspace,
    ZeroMatrix,
    antiunitary_breakage,
    basis_point,
    coatom_from_matrix,
    dcirc_equal,
    dcirc_join,
    dual_path_agreement,
    element,
    format_matrix,
    is_separated_element,
    is_unitary,
    member,
    parse_matrix,
    parse_point,
    point,
    product_span,
    random_point,
    random_unitary,
    section_subspace,
    strict_inclusion_witnesses,
    unitary_control,
    unitary_invariance,
)

ints = st.integers(-4, 4)
gauss = st.builds(G, ints, ints)


def nonzero(k):
    return st.lists(gauss, min_size=k, max_size=k).filter(any)


def pairing(S, p1, p2):
    """sum conj(S_ij) p1_i p2_j, computed without the library."""
    return sum((S[i][j].conj() * p1[i] * p2[j] for i in range(len(S)) for j in range(len(S[0]))), G(0))


@settings(max_examples=100, deadline=None)
@given(nonzero(4), nonzero(2), nonzero(2))
def test_coatom_membership_formula(s, x, y):
    S = [s[:2], s[2:]]
    e = coatom_from_matrix(S)
    p1, p2 = point(*x), point(*y)
    expected = not pairing(S, p1.coords, p2.coords)
    assert member(e, p1, p2) == expected
    assert AntilinearMatrix.of(S).in_x(p1, p2) == expected


def test_dual_path_on_seeded_points():
    rng = random.Random(7)
    S = [[G(1), G(2, -1)], [G(0, 3), G(-1)]]
    pts = [(random_point(rng, 2), random_point(rng, 2)) for _ in range(100)]
    v = dual_path_agreement(S, pts)
    assert v.holds and v.witness["points"] == 100


def test_zero_matrix_rejected():
    with pytest.raises(ZeroMatrix):
        coatom_from_matrix([[0, 0], [0, 0]])


def test_separation_dimension_limit():
    e = coatom_from_matrix([[1] * 2 for _ in range(4)])
    with pytest.raises(DimensionUnsupported):
        is_separated_element(e)


def e1e1():
    return kron(basis_point(0, 2).coords, basis_point(0, 2).coords)


def test_dcirc_equality_examples():
    a = element(2, 2, [e1e1()])
    b = element(2, 2, [kron(basis_point(0, 2).coords, basis_point(1, 2).coords)])
    assert dcirc_equal(a, b).fails
    traceless = coatom_from_matrix([[1, 0], [0, 1]])
    full = element(2, 2, Subspace.full(4).basis)
    v = dcirc_equal(traceless, full)
    assert v.fails and v.witness
    assert dcirc_equal(traceless, coatom_from_matrix([[2, 0], [0, 2]])).holds


def test_entangled_direction_is_dropped():
    # span{e11, e12 + e21} holds only the product vectors on the e11 line
    V = element(2, 2, [[1, 0, 0, 0], [0, 1, 1, 0]])
    assert product_span(V.space, 2, 2).space == Subspace.span([e1e1()], 4)
    assert dcirc_equal(V, element(2, 2, [e1e1()])).holds


def test_sections_of_coatom():
    e = coatom_from_matrix([[1, 0], [0, 1]])
    s = section_subspace(e, point(1, I))
    assert s.rank == 1
    x = s.basis[0]
    # (1, i) x x lies in the traceless hyperplane: x0 + i x1 = 0
    assert x[0] + I * x[1] == 0


def test_strict_inclusion_report():
    r = strict_inclusion_witnesses(2, 2)
    assert r.ok and r.separated_verdict.fails
    assert member(r.join, *r.fourth)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(nonzero(2), nonzero(2)), min_size=1, max_size=3),
       st.tuples(nonzero(2), nonzero(2)))
def test_join_is_monotone(atoms, extra):
    pts = [(point(*a), point(*b)) for a, b in atoms]
    more = pts + [(point(*extra[0]), point(*extra[1]))]
    j1, j2 = dcirc_join(pts), dcirc_join(more)
    assert j1.space <= j2.space
    assert all(member(j1, *p) for p in pts)
    assert dcirc_join([j1, more[-1]]).space == j2.space


def test_unitary_invariance_seeded():
    S = [[G(1), G(0, 1)], [G(2), G(-1)]]
    for seed in range(10):
        rng = random.Random(seed)
        U1, U2 = random_unitary(rng, 2), random_unitary(rng, 2)
        assert is_unitary(U1) and is_unitary(U2)
        pts = [(random_point(rng, 2), random_point(rng, 2)) for _ in range(5)]
        assert unitary_invariance(S, U1, U2, pts).holds


def test_antiunitary_breakage():
    S = [[1, 0], [0, 1]]
    Id = [[1, 0], [0, 1]]
    assert antiunitary_breakage(S, Id, Id).holds
    assert unitary_control(S, Id, Id).fails


def test_text_formats():
    M = parse_matrix("1/2+3/4i -i\n0 2\n")
    assert parse_matrix(format_matrix(M)) == M
    assert parse_point("(1,i)") == point(1, I)
    with pytest.raises(ValueError):
        parse_matrix("1 2\n3\n")
