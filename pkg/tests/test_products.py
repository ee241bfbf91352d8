import itertools

import pytest
from hypothesis import given, settings, strategies as st

from weaktensor.catalog import mo, mo_orthocomplementation, complement_ortho, power_set
from weaktensor.core import ValidationError, power_set_space
from weaktensor.harness import frozen
from weaktensor.products import (
    LazyTopProduct,
    ProductContext,
    aerts_equals_separated,
    aerts_product,
    box_product,
    check_axioms,
    circ_product,
    enumerate_top,
    extend,
    full_symmetric_tuples,
    in_interval,
    lazy_covering_scan,
    separated_product,
    top_join,
    top_join_chain,
    top_membership,
    transpose,
    xi_sets,
)


def _coords(p, n2):
    return divmod(p, n2)


def naive_top(L1, L2):
    """Every subset whose row and column traces are closed, from the definition."""
    n1, n2 = L1.n_atoms, L2.n_atoms
    out = set()
    for R in range(1 << (n1 * n2)):
        ok = True
        for i in range(n1):
            row = sum(1 << j for j in range(n2) if R >> (i * n2 + j) & 1)
            if row and row not in L2:
                ok = False
                break
        if ok:
            for j in range(n2):
                col = sum(1 << i for i in range(n1) if R >> (i * n2 + j) & 1)
                if col and col not in L1:
                    ok = False
                    break
        if ok:
            out.add(R)
    return out


def naive_separated(L1, L2):
    """Subsets equal to the intersection of the crosses a x S2 u S1 x b containing them."""
    n1, n2 = L1.n_atoms, L2.n_atoms
    full = (1 << (n1 * n2)) - 1
    crosses = []
    for a in L1.closed:
        for b in L2.closed:
            c = 0
            for p in range(n1 * n2):
                i, j = _coords(p, n2)
                if a >> i & 1 or b >> j & 1:
                    c |= 1 << p
            crosses.append(c)
    out = set()
    for R in range(full + 1):
        x = full
        for c in crosses:
            if R & c == R:
                x &= c
        if x == R:
            out.add(R)
    return out


def test_separated_mo3_matches_naive_scan(sep33, mo3):
    assert set(sep33.closed) == naive_separated(mo3, mo3)
    assert len(sep33) == frozen("sep_mo3_mo3") == 44


def test_top_mo3_matches_naive_scan(top33, mo3):
    assert set(top33.closed) == naive_top(mo3, mo3)
    assert len(top33) == frozen("top_mo3_mo3") == 50


def test_top_mo4_matches_naive_scan(top44, mo4):
    assert set(top44.closed) == naive_top(mo4, mo4)
    assert len(top44) == frozen("top_mo4_mo4") == 234


def test_frozen_counts(sep44, circ33, circ44):
    assert len(sep44) == frozen("sep_mo4_mo4") == 114
    assert len(circ33) == frozen("circ_mo3_mo3") == 50
    assert len(circ44) == frozen("circ_mo4_mo4") == 210


def test_mo3_circ_is_the_top_product(circ33, top33):
    # every Xi-set on a 3 x 3 ground has at most three atoms
    assert circ33.closed == top33.closed


def test_interval_membership(ctx44, sep44, circ44, top44):
    for L in (sep44, circ44, top44):
        assert in_interval(L, ctx44)
    assert set(sep44.closed) < set(circ44.closed) < set(top44.closed)


def test_power_set_is_not_a_weak_tensor_product(ctx33):
    big = power_set_space(ctx33.ground.atoms)
    v = check_axioms(big, ctx33)
    assert v.fails and v.witness["axiom"] == "P3"


def test_p4_full_symmetric_groups(ctx33, circ33, sep33):
    T = full_symmetric_tuples(ctx33.factors)
    assert len(T) == 36
    for L in (sep33, circ33):
        v = check_axioms(L, ctx33, T)
        assert v.holds and v.witness["p4_tuples"] == 36


def test_xi_set_counts(ctx33, ctx44):
    assert len(xi_sets(ctx33, 3)) == 6
    assert len(xi_sets(ctx44, 3)) == 4 * 24
    assert all(ctx44.is_xi(R) for R in xi_sets(ctx44, 4))


def test_singleton_theorem_instances():
    for factors in ([power_set(3), mo(3)], [power_set(2), power_set(2)]):
        assert separated_product(factors).closed == enumerate_top(factors).closed
    assert len(separated_product([power_set(2), power_set(2)])) == 16


def test_mo3_split_witness(ctx33, sep33):
    R = sum(1 << ctx33.index((i, i)) for i in range(3))
    assert top_join(ctx33, R) == R
    assert sep33.closure(R) == ctx33.full


def test_aerts_equals_separated(mo4):
    o = mo_orthocomplementation(4, mo4)
    assert aerts_equals_separated([mo4, mo4], [o, o]).holds
    p = power_set(2)
    assert aerts_equals_separated([p, mo4], [complement_ortho(p), o]).holds


def test_aerts_ortho_is_involutive(mo4):
    o = mo_orthocomplementation(4, mo4)
    ae = aerts_product([mo4, mo4], [o, o])
    for R in ae.space.closed:
        assert ae.ortho(ae.ortho(R)) == R


def test_box_isomorphism(mo3):
    b = box_product(mo3, mo3)
    assert b.verdict.holds and len(b) == 44


def test_circ_requires_mo_factors():
    with pytest.raises(ValueError):
        circ_product(power_set(2), mo(3))


def test_extend_by_xi_set(ctx44, sep44):
    R = xi_sets(ctx44, 3)[0]
    L = extend(sep44, [R])
    assert R in L and len(L) == len(sep44) + 1
    assert in_interval(L, ctx44)


def test_index_layout_is_associative():
    A, B, C = power_set(2), mo(3), power_set(1, "z")
    flat = ProductContext([A, B, C])
    inner = ProductContext([A, B])
    nested = ProductContext([separated_product(inner), C])
    for i, j, k in itertools.product(range(2), range(3), range(1)):
        assert flat.index((i, j, k)) == nested.index((inner.index((i, j)), k))


def test_covering_chain_mo4(ctx44):
    P = lambda i, j: 1 << ctx44.index((i, j))  # noqa: E731
    a = P(0, 0) | P(1, 1) | P(2, 2)
    chain = top_join_chain(ctx44, a | P(0, 1), [1, 0])
    row = sum(P(0, j) for j in range(4))
    assert chain[1] == a | row
    assert chain[2] == chain[1] | sum(P(i, j) for i in range(4) for j in (1, 2))
    assert chain[3] == ctx44.full
    v = lazy_covering_scan(ctx44, [a])
    assert v.fails


def test_lazy_scan_rejects_non_members(ctx33):
    with pytest.raises(ValueError):
        lazy_covering_scan(ctx33, [1 | 2])


def test_transpose_preserves_products(ctx33, sep33, top33):
    for L in (sep33, top33):
        assert all(transpose(ctx33, R) in L for R in L.closed)


subsets9 = st.integers(0, (1 << 9) - 1)


@settings(max_examples=200, deadline=None)
@given(subsets9)
def test_lazy_membership_matches_enumeration(top33, ctx33, R):
    assert (R in LazyTopProduct(ctx33)) == (R in top33)
    assert top_membership(ctx33, R) == (R in top33)


@settings(max_examples=200, deadline=None)
@given(subsets9, subsets9)
def test_top_join_is_a_closure(top33, ctx33, R, S):
    j = top_join(ctx33, R)
    assert R & j == R and top_join(ctx33, j) == j and j in top33
    # the least member above R
    least = ctx33.full
    for x in top33.closed:
        if R & x == R:
            least &= x
    assert j == least
    if R & S == R:
        assert top_join(ctx33, S) & j == j
