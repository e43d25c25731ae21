import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import brute_force_global, random_model, random_ns_model
from gluing.glue import (
    SupportModel,
    classify,
    extend_section,
    global_sections,
    non_extendable,
    signalling_report,
    support_model,
)
from gluing.scenario import Section, model_from_tables, restrict_section

BIN = ("0", "1")


def values(gs):
    return [g.values for g in gs]


def test_support_model_examples(prbox):
    sm = support_model(prbox)
    assert [len(s) for s in sm.supports] == [2, 2, 2, 2]
    det = model_from_tables({"a": BIN, "b": BIN}, {("a", "b"): {("0", "1"): 1}})
    assert [len(s) for s in support_model(det).supports] == [1]
    uni = model_from_tables({"a": BIN, "b": BIN}, {("a", "b"): {r: Fraction(1, 4) for r in itertools.product(BIN, BIN)}})
    assert [len(s) for s in support_model(uni).supports] == [4]


def test_signalling_examples(prbox):
    assert signalling_report(prbox).violations == ()
    half = Fraction(1, 2)
    m = model_from_tables(
        {"a1": BIN, "b1": BIN, "b2": BIN},
        {("a1", "b1"): {("0", "0"): 1}, ("a1", "b2"): {("0", "0"): half, ("1", "0"): half}},
    )
    rep = signalling_report(m)
    assert [(v.overlap.observables, v.section.values, v.p_i, v.p_j) for v in rep.violations] == [
        (("a1",), ("0",), 1, half),
        (("a1",), ("1",), 0, half),
    ]
    disjoint = model_from_tables({"a": BIN, "b": BIN}, {("a",): {("0",): 1}, ("b",): {("1",): 1}})
    assert not signalling_report(disjoint).signalling


def test_global_sections_examples(prbox, hardy):
    sm = support_model(prbox)
    assert global_sections(sm) == [] and brute_force_global(sm) == []
    hs = support_model(hardy)
    assert values(global_sections(hs)) == brute_force_global(hs)
    assert ("1", "0", "1", "0") in values(global_sections(hs))
    full = SupportModel.from_sets(prbox.scenario, [prbox.scenario.sections(c) for c in prbox.scenario.cover])
    assert len(global_sections(full)) == 16


def test_extend_section_examples(hardy):
    sm = support_model(hardy)
    c = hardy.scenario.cover[0]
    assert extend_section(sm, Section(c, ("0", "0"))) is None
    assert extend_section(sm, Section(c, ("1", "1"))).values == ("1", "0", "1", "0")
    det = model_from_tables(
        {"a": BIN, "b": BIN, "c": BIN},
        {("a", "b"): {("0", "1"): 1}, ("b", "c"): {("1", "1"): 1}},
    )
    dsm = support_model(det)
    assert extend_section(dsm, dsm.supports[0][0]).values == ("0", "1", "1")
    with pytest.raises(ValueError):
        extend_section(sm, Section(hardy.scenario.cover[1], ("0", "0")))


def test_classify_examples(prbox, hardy, product):
    v = classify(prbox)
    assert (v.signalling, v.probabilistically_contextual, v.logically_contextual, v.strongly_contextual) == (
        False, True, True, True
    )
    v = classify(hardy)
    assert v.logically_contextual and not v.strongly_contextual
    assert v.details["non_extendable"][0] == Section(hardy.scenario.cover[0], ("0", "0"))
    # the uniform-over-support Hardy tables disagree on overlaps
    assert v.signalling and v.confounded and v.probabilistically_contextual is None
    v = classify(product)
    assert not any((v.signalling, v.probabilistically_contextual, v.logically_contextual, v.strongly_contextual))


seeds = st.integers(min_value=0, max_value=2**32)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_search_matches_brute_force(seed):
    rng = random.Random(seed)
    m = random_model(rng) if seed % 2 else random_ns_model(rng)
    sm = support_model(m)
    assert values(global_sections(sm)) == brute_force_global(sm)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_extension_and_logical_contextuality_agree(seed):
    m = random_model(random.Random(seed))
    sm = support_model(m)
    gs = global_sections(sm)
    blocked = set(non_extendable(sm))
    for k, c in enumerate(m.scenario.cover):
        for s in sm.supports[k]:
            ext = extend_section(sm, s)
            assert (ext is None) == (s in blocked)
            if ext is not None:
                assert restrict_section(ext, c) == s and ext in gs
                # lexicographically least witness
                assert ext == min((g for g in gs if restrict_section(g, c) == s), key=m.scenario.sort_key)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_enlarging_supports_keeps_global_sections(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    sm = support_model(m)
    sc = m.scenario
    bigger = []
    for k, c in enumerate(sc.cover):
        extra = [s for s in sc.sections(c) if rng.random() < 0.3]
        bigger.append(set(sm.supports[k]) | set(extra))
    big = SupportModel.from_sets(sc, bigger)
    assert set(global_sections(sm)) <= set(global_sections(big))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_hierarchy(seed):
    m = random_ns_model(random.Random(seed))
    v = classify(m)
    assert not v.signalling
    if v.strongly_contextual:
        assert v.logically_contextual
    if v.logically_contextual:
        assert v.probabilistically_contextual
