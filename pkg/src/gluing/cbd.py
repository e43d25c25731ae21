"""Contextuality-by-Default for binary systems.

Every variable is indexed by what it measures (its content) and where it
is measured (its context), so ``R[q, c]`` and ``R[q, c']`` are distinct
random variables. A system is noncontextual when one joint distribution
over all variables reproduces every context table while each pair of
same-content variables coincides with the largest probability its two
marginals allow.

File format (JSON)::

    {"contents": ["a", "b"],
     "contexts": [{"id": "AB", "measures": ["a", "b"],
                   "table": {"1,1": "1/2", "1,0": "1/2"}}, ...]}

Row keys list the values of ``measures`` in order; values are 0 or 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InvariantBreach, ParseError, ValidationError
from .lp import DEFAULT_MAX_COLUMNS, check_size
from .scenario import (
    _expect_keys,
    _str_list,
    dump_canonical,
    format_rational,
    load_json,
    model_from_tables,
    parse_rational,
)
from .simplex import LPProblem, RationalMatrix, solve_lp, verify_farkas

Bits = tuple[int, ...]


@dataclass(frozen=True)
class CbDContext:
    id: str
    measures: tuple[str, ...]
    table: Mapping[Bits, Fraction]

    def weight(self, row: Bits) -> Fraction:
        return self.table.get(row, Fraction(0))

    def rows(self) -> list[Bits]:
        return list(itertools.product((0, 1), repeat=len(self.measures)))

    def marginal(self, q: str) -> Fraction:
        """P(R[q, this context] = 1)."""
        k = self.measures.index(q)
        return sum((w for r, w in self.table.items() if r[k] == 1), Fraction(0))

    def expectation(self, *qs: str) -> Fraction:
        """Mean of the product of the named variables under 0 -> -1, 1 -> +1."""
        idx = [self.measures.index(q) for q in qs]
        total = Fraction(0)
        for r, w in self.table.items():
            sign = 1
            for k in idx:
                sign *= 1 if r[k] else -1
            total += sign * w
        return total


@dataclass(frozen=True)
class CbDSystem:
    contents: tuple[str, ...]
    contexts: tuple[CbDContext, ...]

    def variables(self) -> tuple[tuple[str, str], ...]:
        """``(content, context id)`` pairs, context order then measure order."""
        return tuple((q, c.id) for c in self.contexts for q in c.measures)

    def context(self, cid: str) -> CbDContext:
        for c in self.contexts:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def connections(self) -> list[Connection]:
        out = []
        for q in self.contents:
            ctxs = [c for c in self.contexts if q in c.measures]
            out.append(Connection(q, tuple(c.id for c in ctxs), tuple(c.marginal(q) for c in ctxs)))
        return out


@dataclass(frozen=True)
class Connection:
    content: str
    contexts: tuple[str, ...]
    marginals: tuple[Fraction, ...]

    def delta(self) -> Fraction:
        """Largest spread of the content's +/-1 mean across its contexts."""
        if not self.marginals:
            return Fraction(0)
        return 2 * (max(self.marginals) - min(self.marginals))


@dataclass(frozen=True)
class MultimaximalConstraint:
    content: str
    contexts: tuple[str, str]
    both_one: Fraction
    marginals: tuple[Fraction, Fraction]

    @property
    def p_equal(self) -> Fraction:
        return 1 - abs(self.marginals[0] - self.marginals[1])


@dataclass(frozen=True)
class CouplingVerdict:
    contextual: bool
    variables: tuple[tuple[str, str], ...]
    coupling: dict[Bits, Fraction] | None
    certificate: tuple[Fraction, ...] | None
    delta: dict[str, Fraction]

    @property
    def total_delta(self) -> Fraction:
        return sum(self.delta.values(), Fraction(0))


@dataclass(frozen=True)
class OrderEffectData:
    """Yes(1)/no(0) answers to questions ``a`` and ``b`` asked in both orders.

    ``ab`` is keyed by (answer to a, answer to b) with a asked first;
    ``ba`` by (answer to b, answer to a) with b asked first.
    """

    ab: Mapping[Bits, Fraction]
    ba: Mapping[Bits, Fraction]
    a: str = "a"
    b: str = "b"


# -- validation and files ------------------------------------------------------


def system_violations(sys: CbDSystem) -> list[str]:
    problems = []
    if len(set(sys.contents)) != len(sys.contents):
        problems.append("duplicate content ids")
    ids = [c.id for c in sys.contexts]
    if len(set(ids)) != len(ids):
        problems.append("duplicate context ids")
    if not sys.contexts:
        problems.append("no contexts")
    for c in sys.contexts:
        if not c.measures:
            problems.append(f"context {c.id!r} measures nothing")
        if len(set(c.measures)) != len(c.measures):
            problems.append(f"context {c.id!r} repeats a content")
        for q in c.measures:
            if q not in sys.contents:
                problems.append(f"context {c.id!r} measures unknown content {q!r}")
        for row, w in c.table.items():
            if len(row) != len(c.measures) or any(v not in (0, 1) for v in row):
                problems.append(f"context {c.id!r}: row {row!r} is not a binary row of length {len(c.measures)}")
            if w < 0:
                problems.append(f"context {c.id!r}: negative weight {w}")
        total = sum(c.table.values(), Fraction(0))
        if total != 1:
            problems.append(f"context {c.id!r} table sums to {total}, not 1")
    for q in sys.contents:
        if not any(q in c.measures for c in sys.contexts):
            problems.append(f"content {q!r} is measured in no context")
    return problems


def check_system(sys: CbDSystem) -> CbDSystem:
    problems = system_violations(sys)
    if problems:
        raise ValidationError("; ".join(problems))
    return sys


def system_from_dict(data: dict) -> CbDSystem:
    _expect_keys(data, {"contents", "contexts"}, "system")
    contents = tuple(_str_list(data["contents"], "contents"))
    if not isinstance(data["contexts"], list):
        raise ParseError("contexts: expected a list")
    contexts = []
    for k, c in enumerate(data["contexts"]):
        where = f"contexts[{k}]"
        _expect_keys(c, {"id", "measures", "table"}, where)
        if not isinstance(c["id"], str):
            raise ParseError(f"{where}.id: expected a string")
        measures = tuple(_str_list(c["measures"], f"{where}.measures"))
        if not isinstance(c["table"], dict):
            raise ParseError(f"{where}.table: expected an object")
        table: dict[Bits, Fraction] = {}
        for row, value in c["table"].items():
            vals = row.split(",")
            if len(vals) != len(measures) or any(v not in ("0", "1") for v in vals):
                raise ValidationError(f"{where}: row {row!r} is not a binary row for {list(measures)}")
            bits = tuple(int(v) for v in vals)
            if bits in table:
                raise ValidationError(f"{where}: row {row!r} repeated")
            w = parse_rational(value, f"{where}.table[{row!r}]")
            if w != 0:
                table[bits] = w
        contexts.append(CbDContext(c["id"], measures, table))
    return check_system(CbDSystem(contents, tuple(contexts)))


def parse_cbd(text: str | bytes) -> CbDSystem:
    return system_from_dict(load_json(text))


def system_to_dict(sys: CbDSystem) -> dict:
    return {
        "contents": list(sys.contents),
        "contexts": [
            {
                "id": c.id,
                "measures": list(c.measures),
                "table": {
                    ",".join(map(str, r)): format_rational(c.weight(r))
                    for r in c.rows()
                    if c.weight(r) != 0
                },
            }
            for c in sys.contexts
        ],
    }


def serialize_cbd(sys: CbDSystem) -> str:
    return dump_canonical(system_to_dict(sys))


# -- coupling analysis ---------------------------------------------------------


def multimaximal_constraints(conn: Connection) -> list[MultimaximalConstraint]:
    """One equality per pair of contexts sharing the content."""
    for p in conn.marginals:
        if not 0 <= p <= 1:
            raise ValueError(f"marginal {p} of {conn.content!r} outside [0, 1]")
    out = []
    for (c1, p1), (c2, p2) in itertools.combinations(zip(conn.contexts, conn.marginals), 2):
        out.append(MultimaximalConstraint(conn.content, (c1, c2), min(p1, p2), (p1, p2)))
    return out


def _coupling_problem(sys: CbDSystem, max_columns: int):
    variables = sys.variables()
    n = len(variables)
    check_size(2**n, max_columns)
    where = {v: k for k, v in enumerate(variables)}
    columns = list(itertools.product((0, 1), repeat=n))
    rows, rhs = [], []
    for c in sys.contexts:
        idx = [where[(q, c.id)] for q in c.measures]
        for r in c.rows():
            rows.append([int(all(col[k] == v for k, v in zip(idx, r))) for col in columns])
            rhs.append(c.weight(r))
    constraints = [mm for conn in sys.connections() for mm in multimaximal_constraints(conn)]
    for mm in constraints:
        k1 = where[(mm.content, mm.contexts[0])]
        k2 = where[(mm.content, mm.contexts[1])]
        rows.append([int(col[k1] == 1 and col[k2] == 1) for col in columns])
        rhs.append(mm.both_one)
    return variables, columns, constraints, LPProblem(RationalMatrix.from_rows(rows, len(columns)), tuple(rhs))


def cbd_contextual(sys: CbDSystem, max_columns: int = DEFAULT_MAX_COLUMNS) -> CouplingVerdict:
    variables, columns, constraints, problem = _coupling_problem(sys, max_columns)
    delta = {conn.content: conn.delta() for conn in sys.connections()}
    res = solve_lp(problem)
    if not res.feasible:
        if not verify_farkas(problem, res.farkas):
            raise InvariantBreach("coupling certificate failed verification")
        return CouplingVerdict(True, variables, None, res.farkas, delta)
    coupling = {col: w for col, w in zip(columns, res.x) if w}
    if not verify_coupling(sys, variables, coupling, constraints):
        raise InvariantBreach("coupling does not reproduce the system")
    return CouplingVerdict(False, variables, coupling, None, delta)


def verify_coupling(sys: CbDSystem, variables, coupling: Mapping[Bits, Fraction], constraints=None) -> bool:
    where = {v: k for k, v in enumerate(variables)}
    if sum(coupling.values(), Fraction(0)) != 1 or any(w < 0 for w in coupling.values()):
        return False
    for c in sys.contexts:
        idx = [where[(q, c.id)] for q in c.measures]
        marg: dict[Bits, Fraction] = {}
        for col, w in coupling.items():
            key = tuple(col[k] for k in idx)
            marg[key] = marg.get(key, Fraction(0)) + w
        if any(marg.get(r, 0) != c.weight(r) for r in c.rows()):
            return False
    if constraints is None:
        constraints = [mm for conn in sys.connections() for mm in multimaximal_constraints(conn)]
    for mm in constraints:
        k1 = where[(mm.content, mm.contexts[0])]
        k2 = where[(mm.content, mm.contexts[1])]
        both = sum((w for col, w in coupling.items() if col[k1] == 1 and col[k2] == 1), Fraction(0))
        if both != mm.both_one:
            return False
    return True


def cycle_order(sys: CbDSystem) -> list[CbDContext]:
    """Contexts in cycle order; raises ValueError if the system is not cyclic."""
    n = len(sys.contents)
    if n < 2 or len(sys.contexts) != n:
        raise ValueError("a cyclic system needs n >= 2 contents and n contexts")
    for c in sys.contexts:
        if len(c.measures) != 2 or c.measures[0] == c.measures[1]:
            raise ValueError(f"context {c.id!r} does not measure exactly two contents")
    for q in sys.contents:
        if sum(q in c.measures for c in sys.contexts) != 2:
            raise ValueError(f"content {q!r} is not in exactly two contexts")
    order = [sys.contexts[0]]
    used = {sys.contexts[0].id}
    q = sys.contexts[0].measures[1]
    while len(order) < n:
        nxt = next((c for c in sys.contexts if c.id not in used and q in c.measures), None)
        if nxt is None:
            raise ValueError("contexts do not form a single cycle")
        order.append(nxt)
        used.add(nxt.id)
        q = nxt.measures[0] if nxt.measures[1] == q else nxt.measures[1]
    return order


def s_odd(xs) -> Fraction:
    """Max of sum(+/- x_k) over sign patterns with an odd number of minuses."""
    best = None
    for signs in itertools.product((1, -1), repeat=len(xs)):
        if signs.count(-1) % 2 == 1:
            total = sum((s * x for s, x in zip(signs, xs)), Fraction(0))
            if best is None or total > best:
                best = total
    return best


def cyclic_criterion(sys: CbDSystem) -> tuple[Fraction, bool]:
    """``D = s_odd(correlations) - (n - 2) - Delta``; contextual iff ``D > 0``."""
    order = cycle_order(sys)
    n = len(order)
    corr = [c.expectation(*c.measures) for c in order]
    delta = Fraction(0)
    for q in sys.contents:
        c1, c2 = [c for c in order if q in c.measures]
        delta += abs(c1.expectation(q) - c2.expectation(q))
    D = s_odd(corr) - (n - 2) - delta
    return D, D > 0


def system_to_model(sys: CbDSystem):
    """The empirical model over contents that a consistently connected system describes."""
    tables = {}
    for c in sys.contexts:
        tables[c.measures] = {tuple(map(str, r)): w for r, w in c.table.items()}
    return model_from_tables({q: ("0", "1") for q in sys.contents}, tables)


# -- question order ------------------------------------------------------------


def _check_table(t, name: str) -> None:
    if not t:
        raise ValidationError(f"missing table for order {name}")
    for row, w in t.items():
        if len(row) != 2 or any(v not in (0, 1) for v in row) or w < 0:
            raise ValidationError(f"order {name}: bad row {row!r} -> {w}")
    total = sum(t.values(), Fraction(0))
    if total != 1:
        raise ValidationError(f"order {name} table sums to {total}, not 1")


def build_order_effect_system(d: OrderEffectData) -> CbDSystem:
    _check_table(d.ab, "AB")
    _check_table(d.ba, "BA")
    return check_system(CbDSystem(
        (d.a, d.b),
        (
            CbDContext("AB", (d.a, d.b), {k: Fraction(v) for k, v in d.ab.items() if v}),
            CbDContext("BA", (d.b, d.a), {k: Fraction(v) for k, v in d.ba.items() if v}),
        ),
    ))


def order_effect_from_system(sys: CbDSystem) -> OrderEffectData:
    if len(sys.contents) != 2 or len(sys.contexts) != 2:
        raise ValidationError("an order-effect system has two contents and two contexts")
    a, b = sys.contents
    first = [c for c in sys.contexts if c.measures == (a, b)]
    second = [c for c in sys.contexts if c.measures == (b, a)]
    if len(first) != 1 or len(second) != 1:
        raise ValidationError("an order-effect system asks (a, b) in one context and (b, a) in the other")
    return OrderEffectData(dict(first[0].table), dict(second[0].table), a, b)


def qq_statistic(d: OrderEffectData) -> Fraction:
    """Same-answer probability with a first minus the same with b first."""
    ab = lambda r: Fraction(d.ab.get(r, 0))  # noqa: E731
    ba = lambda r: Fraction(d.ba.get(r, 0))  # noqa: E731
    return (ab((1, 1)) + ab((0, 0))) - (ba((1, 1)) + ba((0, 0)))
