import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_projector, random_state
from gluing.cbd import build_order_effect_system, cyclic_criterion, qq_statistic
from gluing.errors import ParseError, ValidationError
from gluing.qorder import parse_entry, quantum_order_model

F = Fraction
S2 = "sqrt(2)/2"


def test_zx_tables():
    d = quantum_order_model(["1", "0"], [["1", "0"], ["0", "0"]], [["1/2", "1/2"], ["1/2", "1/2"]])
    assert d.ab == {(1, 1): F(1, 2), (1, 0): F(1, 2), (0, 1): 0, (0, 0): 0}
    assert d.ba == {k: F(1, 4) for k in d.ba} and len(d.ba) == 4
    assert qq_statistic(d) == 0
    assert cyclic_criterion(build_order_effect_system(d)) == (-1, False)


def test_commuting_and_identity():
    psi = [S2, S2]
    P = [["1", "0"], ["0", "0"]]
    d = quantum_order_model(psi, P, P)
    assert d.ab == d.ba
    d = quantum_order_model(psi, [[1, 0], [0, 1]], [["1/2", "1/2"], ["1/2", "1/2"]])
    assert d.ab[(0, 0)] + d.ab[(0, 1)] == 0
    assert d.ab[(1, 1)] == 1  # psi is the +1 eigenvector of B


def test_surd_entries():
    assert parse_entry("sqrt(2)/2") == sp.sqrt(2) / 2
    assert parse_entry("-1/3*sqrt(3)") == -sp.sqrt(3) / 3
    assert parse_entry("3/4") == sp.Rational(3, 4)
    for bad in ("", "x", "sqrt(-2)", "1/0", "2**3"):
        with pytest.raises(ParseError):
            parse_entry(bad)


@pytest.mark.parametrize(
    "state, a, b, pattern",
    [
        (["1", "1"], [[1, 0], [0, 0]], [[1, 0], [0, 0]], "normalized"),
        (["1", "0"], [[1, 1], [0, 0]], [[1, 0], [0, 0]], "self-adjoint"),
        (["1", "0"], [[2, 0], [0, 0]], [[1, 0], [0, 0]], "idempotent"),
        (["1", "0"], [[1, 0], [0, 0]], [[1, 0, 0]], "shape"),
        (["1", "0", "0", "0", "0"], [[1]], [[1]], "dimension"),
        (["1", "0"], [[1, 0], [0, 0]], [["1/2", "1/2"], ["1/2", "1/2"], ["0", "0"]], "shape"),
    ],
)
def test_rejections(state, a, b, pattern):
    with pytest.raises(ValidationError, match=pattern):
        quantum_order_model(state, a, b)


def test_irrational_probability_rejected():
    c, s = "1/2", "sqrt(3)/2"
    P = [["1/4", "sqrt(3)/4"], ["sqrt(3)/4", "3/4"]]  # projector onto (1/2, sqrt3/2)
    with pytest.raises(ValidationError, match="irrational"):
        quantum_order_model([S2, S2], P, [[1, 0], [0, 0]])
    quantum_order_model([c, s], P, [[1, 0], [0, 0]])


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=2, max_value=4))
def test_qq_equality_random(seed, dim):
    rng = random.Random(seed)
    d = quantum_order_model(random_state(rng, dim), random_projector(rng, dim), random_projector(rng, dim))
    assert sum(d.ab.values()) == 1 and sum(d.ba.values()) == 1
    assert qq_statistic(d) == 0
