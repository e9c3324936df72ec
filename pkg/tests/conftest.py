"""Shared systems for the test suite; expensive results are built once per session."""

from fractions import Fraction

import pytest

from univoque.GammaEnumerator import enumerate_gamma
from univoque.automaton import build
from univoque.builtin import cantor, ex1, ex2, ex4


@pytest.fixture(scope="session")
def ex1_cfg():
    return ex1(Fraction(1, 3))


@pytest.fixture(scope="session")
def ex2_cfg():
    return ex2(Fraction(1, 3))


@pytest.fixture(scope="session")
def ex4_cfg():
    return ex4()


@pytest.fixture(scope="session")
def cantor_cfg():
    return cantor()


@pytest.fixture(scope="session")
def ex1_trunc(ex1_cfg):
    return enumerate_gamma(ex1_cfg.ifs, ex1_cfg.invariant_box, 12)


@pytest.fixture(scope="session")
def ex2_trunc(ex2_cfg):
    return enumerate_gamma(ex2_cfg.ifs, ex2_cfg.invariant_box, 6)


@pytest.fixture(scope="session")
def ex4_trunc(ex4_cfg):
    return enumerate_gamma(ex4_cfg.ifs, ex4_cfg.invariant_box, 10)


@pytest.fixture(scope="session")
def ex1_aut(ex1_cfg):
    return build(ex1_cfg.ifs, ex1_cfg.invariant_box, 10)


@pytest.fixture(scope="session")
def ex2_aut(ex2_cfg):
    return build(ex2_cfg.ifs, ex2_cfg.invariant_box, 10)


@pytest.fixture(scope="session")
def ex4_aut(ex4_cfg):
    return build(ex4_cfg.ifs, ex4_cfg.invariant_box, 10)


@pytest.fixture(scope="session")
def cantor_aut(cantor_cfg):
    return build(cantor_cfg.ifs, cantor_cfg.invariant_box, 4)
