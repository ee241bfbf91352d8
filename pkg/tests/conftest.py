import pytest

from weaktensor.catalog import mo, power_set
from weaktensor.products import ProductContext, circ_product, enumerate_top, separated_product


@pytest.fixture(scope="session")
def mo3():
    return mo(3)


@pytest.fixture(scope="session")
def mo4():
    return mo(4)


@pytest.fixture(scope="session")
def ctx33(mo3):
    return ProductContext([mo3, mo3])


@pytest.fixture(scope="session")
def ctx44(mo4):
    return ProductContext([mo4, mo4])


@pytest.fixture(scope="session")
def sep33(ctx33):
    return separated_product(ctx33)


@pytest.fixture(scope="session")
def sep44(ctx44):
    return separated_product(ctx44)


@pytest.fixture(scope="session")
def top33(ctx33):
    return enumerate_top(ctx33)


@pytest.fixture(scope="session")
def top44(ctx44):
    return enumerate_top(ctx44)


@pytest.fixture(scope="session")
def circ33(mo3):
    return circ_product(mo3, mo3)


@pytest.fixture(scope="session")
def circ44(mo4):
    return circ_product(mo4, mo4)


@pytest.fixture(scope="session")
def p2():
    return power_set(2)
