"""Shared fixtures and the seeded random-expression generator."""

import random

import pytest

from approxlie import expr as ex
from approxlie.creeping import (B, RE, X, Y, ansatz_case, creeping_system,
                                constraint_expr, paper_generators)
from approxlie.invariance import onshell_rules
from approxlie.symbols import TABLE


@pytest.fixture(scope="session")
def system():
    return creeping_system()


@pytest.fixture(scope="session")
def rules(system):
    return onshell_rules(system, 1)


@pytest.fixture(scope="session")
def rules_modulo(system):
    return onshell_rules(system, 1, modulo=[constraint_expr()])


@pytest.fixture(scope="session")
def generators():
    """The nine catalog generators with symbolic f1, f2."""
    return paper_generators()


@pytest.fixture(scope="session")
def case_i():
    return ansatz_case("i")


@pytest.fixture(scope="session")
def case_ii():
    return ansatz_case("ii")


@pytest.fixture(scope="session")
def case_iii():
    return ansatz_case("iii")


# -- random expression source -------------------------------------------

_U0 = None


def _vocabulary():
    global _U0
    if _U0 is None:
        _U0 = TABLE.find_function("u0")
    xe, ye = ex.sym(X), ex.sym(Y)
    return [
        xe, ye, ex.sym(B), ex.sym(RE),
        ex.sym(TABLE.jet(_U0, (0, 0))), ex.sym(TABLE.jet(_U0, (1, 0))),
        ex.sym(TABLE.jet(_U0, (0, 1))),
        ex.sin(ex.sym(B) * xe), ex.cos(ex.sym(B) * xe),
        ex.exp(ex.sym(B) * ye), ex.log(xe),
        ex.log(xe * xe + ye * ye), ex.arctan(ye / xe),
    ]


def random_expr(rng: random.Random, depth: int = 3) -> ex.Expr:
    """Small random expression over the model vocabulary."""
    leaves = _vocabulary()
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.25:
            return ex.rat(rng.randint(-4, 4))
        return leaves[rng.randrange(len(leaves))]
    op = rng.random()
    if op < 0.45:
        return ex.add(*(random_expr(rng, depth - 1)
                        for _ in range(rng.randint(2, 3))))
    if op < 0.85:
        return ex.mul(*(random_expr(rng, depth - 1)
                        for _ in range(rng.randint(2, 3))))
    return ex.pow_(random_expr(rng, depth - 1), rng.randint(2, 3))
