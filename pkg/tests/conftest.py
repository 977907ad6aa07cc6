import pathlib

import pytest

from discval import parse_spec
from discval.ratfunc import RatFunc, parse_ratfunc
from discval.tseries import TSeries
from discval.valuation import make_spec

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def load(name: str, ramify=(), prec=None, prec_cap=None):
    return parse_spec(fixture_path(name), tuple(ramify), prec, prec_cap)


def monomial_spec(orders, prec=32):
    """psi(X_i) = t^orders[i-1]; parameter-free entries over one dummy slot."""
    entries = [TSeries(1, {d: RatFunc.one(1)}, prec) for d in orders]
    return make_spec(entries, prec, name="monomial")


def rf(text: str, s: int) -> RatFunc:
    return parse_ratfunc(text, s)


@pytest.fixture
def ex41():
    return load("ex41.val")


@pytest.fixture
def ex61():
    return load("ex61.val", ramify=("T4=S^4",))


@pytest.fixture
def ex71():
    return load("ex71.val")


@pytest.fixture
def order_n3():
    return load("order_n3.val")


@pytest.fixture
def order_n4():
    return load("order_n4.val")
