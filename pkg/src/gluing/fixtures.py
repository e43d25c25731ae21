"""Built-in example inputs, stored as canonical file text."""

from __future__ import annotations

from fractions import Fraction

from .cbd import CbDContext, CbDSystem, build_order_effect_system, check_system, serialize_cbd
from .scenario import model_from_tables, serialize_model

BELL = {"a1": ("0", "1"), "a2": ("0", "1"), "b1": ("0", "1"), "b2": ("0", "1")}
BELL_CONTEXTS = (("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2"))
ROWS = (("0", "0"), ("0", "1"), ("1", "0"), ("1", "1"))


def prbox():
    half = Fraction(1, 2)
    same = {("0", "0"): half, ("1", "1"): half}
    diff = {("0", "1"): half, ("1", "0"): half}
    return model_from_tables(BELL, dict(zip(BELL_CONTEXTS, (same, same, same, diff))))


HARDY_SUPPORT = {
    ("a1", "b1"): (1, 1, 1, 1),
    ("a1", "b2"): (0, 1, 1, 1),
    ("a2", "b1"): (0, 1, 1, 1),
    ("a2", "b2"): (1, 1, 1, 0),
}


def hardy():
    tables = {}
    for ctx, mask in HARDY_SUPPORT.items():
        w = Fraction(1, sum(mask))
        tables[ctx] = {row: w for row, on in zip(ROWS, mask) if on}
    return model_from_tables(BELL, tables)


PRODUCT_MARGINALS = {"a1": Fraction(1, 2), "a2": Fraction(1, 3), "b1": Fraction(1, 4), "b2": Fraction(3, 5)}


def product(marginals=PRODUCT_MARGINALS):
    """p(x, y) = p(x) p(y) on every Bell context; ``marginals`` are P(outcome 0)."""

    def p(obs, v):
        return marginals[obs] if v == "0" else 1 - marginals[obs]

    tables = {
        (x, y): {(u, v): p(x, u) * p(y, v) for u, v in ROWS}
        for x, y in BELL_CONTEXTS
    }
    return model_from_tables(BELL, tables)


def qorder_zx():
    """Z-basis state, A = |0><0|, B = |+><+|: tables computed by hand."""
    from .cbd import OrderEffectData

    q = Fraction(1, 4)
    data = OrderEffectData(
        ab={(1, 1): Fraction(1, 2), (1, 0): Fraction(1, 2)},
        ba={(1, 1): q, (1, 0): q, (0, 1): q, (0, 0): q},
    )
    return build_order_effect_system(data)


def cbd_prbox():
    half = Fraction(1, 2)
    same = {(0, 0): half, (1, 1): half}
    diff = {(0, 1): half, (1, 0): half}
    contexts = tuple(
        CbDContext(x + y, (x, y), t)
        for (x, y), t in zip(BELL_CONTEXTS, (same, same, same, diff))
    )
    return check_system(CbDSystem(tuple(BELL), contexts))


EXAMPLES = {
    "prbox": ("scenario", prbox),
    "hardy": ("scenario", hardy),
    "product": ("scenario", product),
    "qorder-zx": ("cbd", qorder_zx),
    "cbd-prbox": ("cbd", cbd_prbox),
}


def names() -> list[str]:
    return list(EXAMPLES)


def load(name: str):
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    return EXAMPLES[name][1]()


def text(name: str) -> str:
    kind, _ = EXAMPLES.get(name, (None, None))
    obj = load(name)
    return serialize_model(obj) if kind == "scenario" else serialize_cbd(obj)
