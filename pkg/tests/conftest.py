import pytest
from hypothesis import HealthCheck, settings

from artifact.characters import base_change, quadratic_character_mod, trivial_character
from artifact.field_arith import create_field

settings.register_profile("artifact", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("artifact")


@pytest.fixture(scope="session")
def Q():
    return create_field(1)


@pytest.fixture(scope="session")
def F5():
    return create_field(5)


@pytest.fixture(scope="session")
def chi7():
    return quadratic_character_mod(7)


@pytest.fixture(scope="session")
def chi3():
    return quadratic_character_mod(3)


@pytest.fixture(scope="session")
def one(Q):
    return trivial_character(Q)


@pytest.fixture(scope="session")
def phi5(F5, chi7):
    """Base change of the quadratic character mod 7 to Q(sqrt 5)."""
    return base_change(F5, chi7)


def legendre(a: int, p: int) -> int:
    """Euler's criterion, independent of the library's Kronecker symbol."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1
