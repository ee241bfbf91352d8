import itertools

import networkx as nx
import pytest
from networkx.algorithms.isomorphism import GraphMatcher

from weaktensor.catalog import complement_ortho, mo, mo_orthocomplementation, power_set, projective
from weaktensor.core import direct_product, popcount
from weaktensor.harness import frozen
from weaktensor.ortho import check as check_ortho, from_atom_images
from weaktensor.products import ProductContext, aerts_product, separated_product
from weaktensor.structure import (
    AtomMap,
    Exhausted,
    NotLarge,
    automorphisms,
    central_elements,
    contains_mo,
    factor_endomorphism,
    find_orthocomplementation,
    is_central,
    is_connected,
    is_group,
    is_irreducible,
    is_large,
    is_orthomodular,
    is_transitive,
    is_weakly_connected,
    ortho_central_test,
    product_automorphism,
)


def brute_orthos(L):
    """Every atom -> coatom assignment that extends to a valid orthocomplementation."""
    coatoms = list(L.coatoms)
    found = []
    for images in itertools.permutations(coatoms, L.n_atoms):
        o = from_atom_images(L, dict(enumerate(images)))
        if check_ortho(o).holds:
            found.append(images)
    return found


@pytest.mark.parametrize("name", ["mo3", "mo4", "2^3", "fano", "mo3+2"])
def test_ortho_search_agrees_with_brute_force(name):
    from weaktensor.harness import lattice

    L = lattice(name)
    exists = bool(brute_orthos(L)) if len(L.coatoms) >= L.n_atoms else False
    r = find_orthocomplementation(L, count_shortcut=False)
    assert isinstance(r, Exhausted) != exists
    if exists:
        assert check_ortho(r).holds


def test_ortho_search_on_mo4_products(mo4, sep44, circ44, top44):
    r = find_orthocomplementation(sep44, count_shortcut=False)
    assert not isinstance(r, Exhausted) and check_ortho(r).holds
    o = mo_orthocomplementation(4, mo4)
    assert check_ortho(aerts_product([mo4, mo4], [o, o]).ortho).holds
    for L in (circ44, top44):
        assert isinstance(find_orthocomplementation(L, count_shortcut=False), Exhausted)


def incidence_graph(L):
    G = nx.Graph()
    for p in range(L.n_atoms):
        G.add_node(("a", p), kind="atom")
    for x in L.closed:
        if popcount(x) >= 2 and x != L.full:
            G.add_node(("s", x), kind="set")
            for p in range(L.n_atoms):
                if x >> p & 1:
                    G.add_edge(("a", p), ("s", x))
    return G


def nx_automorphism_count(L):
    G = incidence_graph(L)
    gm = GraphMatcher(G, G, node_match=lambda a, b: a["kind"] == b["kind"])
    return len({tuple(m[("a", p)][1] for p in range(L.n_atoms)) for m in gm.isomorphisms_iter()})


def test_automorphisms_match_graph_oracle(sep33, mo4):
    auts = automorphisms(sep33)
    assert len(auts) == frozen("aut_sep_mo3_mo3") == 72
    assert len(auts) == nx_automorphism_count(sep33)
    assert len(automorphisms(mo4)) == nx_automorphism_count(mo4) == 24
    assert is_group(auts) and is_transitive(sep33, auts)


def test_product_automorphisms_factor(ctx33, sep33):
    u = product_automorphism(ctx33, sep33, (1, 0), [(1, 2, 0), (0, 2, 1)])
    assert u.is_bijective() and all(u.image_set(a) in sep33 for a in sep33.closed)
    fact = factor_endomorphism(u, ctx33)
    assert fact.permutation == (1, 0)
    assert [m.images for m in fact.maps] == [(1, 2, 0), (0, 2, 1)]


def test_constant_map_is_not_large(ctx33, sep33):
    u = AtomMap(sep33, sep33, (0,) * 9)
    assert not is_large(u, ctx33)
    with pytest.raises(NotLarge):
        factor_endomorphism(u, ctx33)


def test_center_of_direct_product():
    L = direct_product(mo(3), power_set(1, "z"))
    dec = central_elements(L)
    assert len(dec.center) == 4 and len(dec.central_atoms) == 2
    assert dec.reconstruction.holds
    assert is_irreducible(mo(3)) and not is_irreducible(L)


def test_power_set_center_is_everything():
    L = power_set(3)
    assert all(is_central(L, z) for z in L.closed)
    o = complement_ortho(L)
    assert all(ortho_central_test(L, o, z) for z in L.closed)


def test_central_atoms_of_separated_products(ctx44, sep44):
    assert central_elements(sep44).central_atoms == [sep44.full]
    ctx = ProductContext([power_set(2), mo(3)])
    dec = central_elements(separated_product(ctx))
    assert sorted(dec.central_atoms) == sorted(ctx.rectangle((1 << i, 7)) for i in range(2))
    assert dec.reconstruction.holds


def test_orthomodularity(mo4, sep44):
    assert is_orthomodular(mo4, mo_orthocomplementation(4, mo4)).holds
    o = mo_orthocomplementation(4, mo4)
    ae = aerts_product([mo4, mo4], [o, o])
    v = is_orthomodular(sep44, ae.ortho)
    assert v.fails and v.witness["kind"] == "orthomodular_failure"


def test_contains_mo():
    assert contains_mo(mo(4), 4).holds
    assert contains_mo(mo(4), 3).holds
    assert contains_mo(mo(3), 4).fails
    assert contains_mo(power_set(3), 3).fails
    with pytest.raises(ValueError):
        contains_mo(mo(3), 2)


def test_connectedness():
    assert is_connected(mo(3)).holds
    assert is_connected(projective(2, 3)).holds
    assert is_connected(power_set(2)).fails
    assert is_weakly_connected(mo(3)).holds
    assert is_weakly_connected(power_set(3)).fails
    assert is_weakly_connected(power_set(1)).fails

