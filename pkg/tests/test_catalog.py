import pytest

from weaktensor.catalog import (
    GeneratorSpec,
    OddAtomCount,
    complement_ortho,
    generate,
    mo,
    mo_orthocomplementation,
    power_set,
    projective,
)
from weaktensor.core import BoundsExceeded, has_covering_property, is_coatomistic
from weaktensor.ortho import check, is_orthocomplementation


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
def test_mo_sizes(n):
    L = mo(n)
    assert L.n_atoms == n
    assert len(L) == (1 << n if n <= 2 else n + 2)


def test_projective_counts():
    assert len(projective(2, 3)) == 16
    assert len(projective(3, 3)) == 28
    assert len(projective(2, 2)) == 5  # a projective line over GF(2) is MO3


def test_projective_plane_is_modular_geometry():
    L = projective(2, 3)
    assert has_covering_property(L).holds
    assert is_coatomistic(L)
    assert len(L.coatoms) == 7


def test_mo_orthocomplementation():
    assert is_orthocomplementation(mo_orthocomplementation(4))
    with pytest.raises(OddAtomCount):
        mo_orthocomplementation(3)


def test_complement_ortho():
    assert check(complement_ortho(power_set(3))).holds


@pytest.mark.parametrize("spec", [GeneratorSpec.mo(0), GeneratorSpec.projective(5, 3), GeneratorSpec("weird")])
def test_bounds(spec):
    with pytest.raises(BoundsExceeded):
        generate(spec)


def test_generate_dispatch():
    assert generate(GeneratorSpec.power_set(2)) == power_set(2)
    assert generate(GeneratorSpec.projective(2, 3)) == projective(2, 3)
