import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import cyclic_contexts, random_consistent_cyclic_system, random_cyclic_system
from gluing import fixtures
from gluing.cbd import (
    CbDContext,
    CbDSystem,
    Connection,
    OrderEffectData,
    build_order_effect_system,
    cbd_contextual,
    cyclic_criterion,
    cycle_order,
    multimaximal_constraints,
    order_effect_from_system,
    parse_cbd,
    qq_statistic,
    s_odd,
    serialize_cbd,
    system_to_model,
    verify_coupling,
)
from gluing.errors import ParseError, SizeCapError, ValidationError
from gluing.lp import noncontextuality_lp

F = Fraction
half, quarter = F(1, 2), F(1, 4)


def marginals(sys):
    return {(c.content, ctx): p for c in sys.connections() for ctx, p in zip(c.contexts, c.marginals)}


def test_order_effect_system_examples():
    zx = fixtures.qorder_zx()
    assert [c.id for c in zx.contexts] == ["AB", "BA"]
    assert marginals(zx) == {("a", "AB"): 1, ("a", "BA"): half, ("b", "AB"): half, ("b", "BA"): half}
    t = {(1, 1): F(1, 3), (0, 1): F(2, 3)}
    same = build_order_effect_system(OrderEffectData(t, {(y, x): w for (x, y), w in t.items()}))
    for c in same.connections():
        assert c.marginals[0] == c.marginals[1]
    yes = build_order_effect_system(OrderEffectData({(1, 1): 1}, {(1, 1): 1}))
    assert set(marginals(yes).values()) == {1}
    with pytest.raises(ValidationError, match="sums to"):
        build_order_effect_system(OrderEffectData({(1, 1): half}, {(1, 1): 1}))
    with pytest.raises(ValidationError, match="missing"):
        build_order_effect_system(OrderEffectData({}, {(1, 1): 1}))


def test_multimaximal_examples():
    [mm] = multimaximal_constraints(Connection("a", ("c", "d"), (F(1), half)))
    assert mm.both_one == half and mm.p_equal == half
    [mm] = multimaximal_constraints(Connection("a", ("c", "d"), (F(1, 3), F(1, 3))))
    assert mm.both_one == F(1, 3) and mm.p_equal == 1
    [mm] = multimaximal_constraints(Connection("a", ("c", "d"), (F(0), F(1))))
    assert mm.both_one == 0 and mm.p_equal == 0
    assert len(multimaximal_constraints(Connection("a", ("c", "d", "e"), (F(0),) * 3))) == 3
    with pytest.raises(ValueError):
        multimaximal_constraints(Connection("a", ("c", "d"), (F(2), F(0))))


def test_coupling_examples():
    v = cbd_contextual(fixtures.qorder_zx())
    assert not v.contextual and v.total_delta == 1
    assert verify_coupling(fixtures.qorder_zx(), v.variables, v.coupling)
    v = cbd_contextual(fixtures.cbd_prbox())
    assert v.contextual and v.certificate is not None and v.total_delta == 0
    single = CbDSystem(("x", "y"), (CbDContext("only", ("x", "y"), {(0, 1): quarter, (1, 1): F(3, 4)}),))
    assert not cbd_contextual(single).contextual
    with pytest.raises(SizeCapError):
        cbd_contextual(fixtures.cbd_prbox(), max_columns=2**7)


def test_cyclic_examples():
    assert cyclic_criterion(fixtures.qorder_zx()) == (-1, False)
    assert cyclic_criterion(fixtures.cbd_prbox()) == (2, True)
    assert s_odd([1, 1, 1, -1]) == 4
    for n in range(2, 7):
        qs, pairs = cyclic_contexts(n)
        unif = {(x, y): quarter for x in (0, 1) for y in (0, 1)}
        sys = CbDSystem(tuple(qs), tuple(CbDContext(f"c{k}", p, unif) for k, p in enumerate(pairs)))
        assert cyclic_criterion(sys) == (-(n - 2), False)
    single = CbDSystem(("x", "y"), (CbDContext("only", ("x", "y"), {(1, 1): 1}),))
    with pytest.raises(ValueError):
        cycle_order(single)


def test_qq_examples():
    assert qq_statistic(order_effect_from_system(fixtures.qorder_zx())) == 0
    t = {(1, 1): F(1, 3), (1, 0): F(2, 3)}
    assert qq_statistic(OrderEffectData(t, t)) == 0
    assert qq_statistic(OrderEffectData({(1, 1): 1}, {(1, 1): half, (1, 0): half})) == half
    # same-answer mass is order independent here even though the tables differ
    assert qq_statistic(OrderEffectData({(1, 1): 1}, {(1, 1): half, (0, 0): half})) == 0
    with pytest.raises(ValidationError):
        order_effect_from_system(fixtures.cbd_prbox())


def test_file_round_trip_and_errors():
    for name in ("qorder-zx", "cbd-prbox"):
        text = fixtures.text(name)
        assert serialize_cbd(parse_cbd(text)) == text
    data = json.loads(fixtures.text("qorder-zx"))
    bad = json.loads(json.dumps(data))
    bad["contexts"][0]["table"]["1,1"] = "1/4"
    with pytest.raises(ValidationError, match="sums to"):
        parse_cbd(json.dumps(bad))
    bad = json.loads(json.dumps(data))
    bad["contexts"][0]["table"]["2,1"] = "0"
    with pytest.raises((ParseError, ValidationError)):
        parse_cbd(json.dumps(bad))
    bad = json.loads(json.dumps(data))
    bad["contexts"][0]["measures"] = ["a", "zz"]
    with pytest.raises(ValidationError):
        parse_cbd(json.dumps(bad))
    bad = json.loads(json.dumps(data))
    bad["colour"] = 1
    with pytest.raises(ParseError):
        parse_cbd(json.dumps(bad))


seeds = st.integers(min_value=0, max_value=2**32)


@settings(max_examples=120, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=3))
def test_cyclic_criterion_matches_coupling(seed, n):
    sys = random_cyclic_system(random.Random(seed), n)
    v = cbd_contextual(sys)
    assert cyclic_criterion(sys)[1] == v.contextual
    if not v.contextual:
        assert verify_coupling(sys, v.variables, v.coupling)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(min_value=3, max_value=4))
def test_consistent_systems_match_standard_lp(seed, n):
    sys = random_consistent_cyclic_system(random.Random(seed), n)
    assert all(c.delta() == 0 for c in sys.connections())
    assert cbd_contextual(sys).contextual == (not noncontextuality_lp(system_to_model(sys)).feasible)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_rank_two_consistent_systems_are_noncontextual(seed):
    # two contexts over the same pair: consistent connection means equal tables up to order
    rng = random.Random(seed)
    t = random_cyclic_system(rng, 2).contexts[0].table
    d = OrderEffectData(dict(t), {(y, x): w for (x, y), w in t.items()})
    sys = build_order_effect_system(d)
    assert not cbd_contextual(sys).contextual
    assert qq_statistic(d) == 0
