import itertools

import pytest

from weaktensor.catalog import mo, power_set
from weaktensor.core import ParseError
from weaktensor.harness import frozen
from weaktensor.products import ProductContext, enumerate_top
from weaktensor.universal import (
    NotBimorphism,
    canonical_bimorphism,
    factor_bimorphism,
    format_map_table,
    galois_correspondence,
    join_preserving_maps,
    map_to_set,
    parse_map_table,
    point_separating_map,
    product_bimorphism,
    set_to_map,
)


def count_dual_join_maps(L1, L2):
    """Maps on all closed sets with f(0) = top and f(a v b) = f(a) ^ f(b)."""
    elems = list(L1.closed)
    n = 0
    for vals in itertools.product(L2.closed, repeat=len(elems)):
        f = dict(zip(elems, vals))
        if f[0] != L2.full:
            continue
        if all(f[L1.closure(a | b)] == f[a] & f[b] for a in elems for b in elems):
            n += 1
    return n


def test_galois_counts():
    L1, L2 = power_set(2), mo(3)
    r = galois_correspondence(L1, L2)
    assert r.verdict.holds
    assert r.counts == (frozen("galois_2x2_mo3"), frozen("galois_2x2_mo3"))
    assert count_dual_join_maps(L1, L2) == 25


def test_map_set_round_trip(mo3):
    top = enumerate_top([mo3, mo3])
    for R in top.closed:
        assert map_to_set(set_to_map(R, mo3, mo3)) == R
    assert len(join_preserving_maps(mo3, mo3)) == len(top)


def test_point_separating_maps(mo3):
    for a in mo3.closed:
        h = point_separating_map(mo3, a)
        assert h(a) == 0 and (a == mo3.full or h(mo3.full) == 1)


def _round_trip(g, L1, L2, L):
    text = format_map_table(g, L1, L2, L)
    assert parse_map_table(text, L1, L2, L) == g


def test_canonical_bimorphism(mo3):
    g = canonical_bimorphism(mo3, mo3)
    top = enumerate_top([mo3, mo3])
    h = factor_bimorphism(g, mo3, mo3, top)
    assert all(h(R) == R for R in top.closed)
    _round_trip(g, mo3, mo3, top)


def test_product_of_automorphisms(mo3):
    top = enumerate_top([mo3, mo3])
    g = product_bimorphism((1, 2, 0), (2, 1, 0), mo3, mo3, mo3, mo3)
    h = factor_bimorphism(g, mo3, mo3, top)
    assert sorted(h(1 << p) for p in range(9)) == [1 << p for p in range(9)]
    _round_trip(g, mo3, mo3, top)


def test_projection_bimorphism(mo3):
    L1 = power_set(2)
    g = {(p1, p2): 1 << p2 for p1 in range(2) for p2 in range(3)}
    h = factor_bimorphism(g, L1, mo3, mo3)
    ctx = ProductContext([L1, mo3])
    assert h(ctx.cylinder(1, 1)) == 1
    assert h(ctx.full) == mo3.full
    _round_trip(g, L1, mo3, mo3)


def test_non_bimorphism_is_rejected(mo3):
    target = power_set(3)
    g = {(p1, p2): 1 << p2 for p1 in range(3) for p2 in range(3)}
    with pytest.raises(NotBimorphism) as e:
        factor_bimorphism(g, mo3, mo3, target)
    assert e.value.witness["kind"] in ("row", "column")


def test_map_table_errors(mo3):
    with pytest.raises(ParseError):
        parse_map_table("p0 p0 -> p1\n", mo3, mo3, mo3)
    with pytest.raises(ParseError):
        parse_map_table("p0 -> p1\n", mo3, mo3, mo3)
    with pytest.raises(ParseError):
        parse_map_table("p0 q9 -> p1\n", mo3, mo3, mo3)
