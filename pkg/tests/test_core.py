import itertools
import json

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from weaktensor.catalog import mo, power_set
from weaktensor.core import (
    BoundsExceeded,
    GroundSet,
    MissingBottom,
    MissingSingleton,
    MissingTop,
    NotIntersectionClosed,
    ParseError,
    ValidationError,
    bits,
    covers,
    direct_product,
    from_positions,
    has_covering_property,
    hasse_edges,
    is_atomistic,
    is_coatomistic,
    is_power_set,
    loads,
    popcount,
    to_dot,
    validate,
    validate_bits,
)


def test_bit_helpers():
    assert list(bits(0b10110)) == [1, 2, 4]
    assert from_positions([1, 2, 4]) == 0b10110
    assert popcount(0b10110) == 3


def test_ground_encode_decode():
    g = GroundSet(("a", "b", "c"))
    assert g.decode(g.encode(["c", "a"])) == ["a", "c"]
    with pytest.raises(ValidationError):
        GroundSet(("a", "a"))


@pytest.mark.parametrize("family, exc", [
    ([["a", "b"], ["a"], ["b"]], MissingBottom),
    ([[], ["a"], ["b"]], MissingTop),
    ([[], ["a"], ["a", "b", "c"], ["c"]], MissingSingleton),
])
def test_validate_reports_first_violation(family, exc):
    with pytest.raises(exc):
        validate(["a", "b", "c"] if exc is not MissingTop else ["a", "b"], family)


def test_validate_intersection_failure():
    with pytest.raises(NotIntersectionClosed):
        validate(["a", "b", "c", "d"], [[], ["a"], ["b"], ["c"], ["d"], ["a", "b", "c"], ["b", "c", "d"],
                                        ["a", "b", "c", "d"]])


def test_validate_atom_cap():
    g = GroundSet(tuple(f"x{i}" for i in range(70)))
    with pytest.raises(BoundsExceeded):
        validate_bits(g, [0, g.full], max_atoms=64)


def test_mo3_operations(mo3):
    assert len(mo3) == 5
    assert mo3.closure(0b011) == 0b111
    assert mo3.join(1, 2) == 7
    assert set(mo3.coatoms) == {1, 2, 4}
    assert is_atomistic(mo3) and is_coatomistic(mo3)
    assert has_covering_property(mo3).holds
    assert covers(mo3, 7, 1)


def test_covering_failure_detected():
    # {a} < {a,b} < top while {a} v c is the top
    L = validate(["a", "b", "c"], [[], ["a"], ["b"], ["c"], ["a", "b"], ["a", "b", "c"]])
    v = has_covering_property(L)
    assert v.fails and v.witness["between"] == ["a", "b"]
    L2 = validate(["a", "b", "c", "d"], [[], ["a"], ["b"], ["c"], ["d"], ["a", "b", "c"], ["a", "b", "c", "d"]])
    v = has_covering_property(L2)
    assert v.fails and v.witness["kind"] == "covering_failure"


def test_document_round_trip(mo4):
    text = mo4.dumps()
    assert loads(text) == mo4
    assert loads(loads(text).dumps()).dumps() == text
    doc = json.loads(text)
    assert doc["closed"][0] == [] and doc["closed"][-1] == doc["atoms"]


@pytest.mark.parametrize("text", ["not json", '{"atoms": [1, 2], "closed": []}', '{"atoms": ["a"]}'])
def test_loads_rejects_garbage(text):
    with pytest.raises(ParseError):
        loads(text)


def test_power_set_detection():
    assert is_power_set(power_set(3))
    assert not is_power_set(mo(3))


def test_direct_product_counts():
    L = direct_product(mo(3), power_set(1, "z"))
    assert len(L) == 10 and L.n_atoms == 4


def test_dot_is_acyclic_and_transitively_reduced(mo4):
    edges = hasse_edges(mo4)
    G = nx.DiGraph(edges)
    assert nx.is_directed_acyclic_graph(G)
    assert nx.transitive_reduction(G).number_of_edges() == G.number_of_edges()
    dot = to_dot(mo4)
    assert dot.count("->") == len(edges)


@st.composite
def moore_families(draw):
    n = draw(st.integers(1, 5))
    full = (1 << n) - 1
    gens = draw(st.lists(st.integers(0, full), max_size=6))
    family = {full}
    for k in range(len(gens) + 1):
        for combo in itertools.combinations(gens, k):
            x = full
            for g in combo:
                x &= g
            family.add(x)
    family |= {0} | {1 << i for i in range(n)}
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(family), 2):
            if a & b not in family:
                family.add(a & b)
                changed = True
    return validate_bits(GroundSet(tuple(f"a{i}" for i in range(n))), family)


@settings(max_examples=60, deadline=None)
@given(moore_families(), st.data())
def test_closure_operator_laws(L, data):
    x = data.draw(st.integers(0, L.full))
    y = data.draw(st.integers(0, L.full))
    cx = L.closure(x)
    assert x & cx == x
    assert L.closure(cx) == cx
    assert cx in L
    if x & y == x:
        assert L.closure(y) & cx == cx


@settings(max_examples=40, deadline=None)
@given(moore_families())
def test_round_trip_property(L):
    assert loads(L.dumps()) == L
