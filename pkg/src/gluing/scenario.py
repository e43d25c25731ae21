"""Measurement scenarios, local sections and empirical models.

A scenario is a finite list of observables (each with an ordered outcome
list) and a cover: an antichain of maximal contexts, each a set of
observable ids. Subcontexts are subsets; overlaps are intersections.
Every probability is a :class:`fractions.Fraction`.

The on-disk format is JSON::

    {"observables": [{"id": "a1", "outcomes": ["0", "1"]}, ...],
     "contexts": [["a1", "b1"], ...],
     "tables": {"a1,b1": {"0,0": "1/2", "1,1": "1/2"}, ...}}
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import ParseError, ValidationError

_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


@dataclass(frozen=True)
class Observable:
    id: str
    outcomes: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class Context:
    """A set of observable ids, stored in scenario order.

    Equality and hashing are set-based; the tuple order only fixes how
    sections over the context are laid out.
    """

    observables: tuple[str, ...]

    def __eq__(self, other):
        if not isinstance(other, Context):
            return NotImplemented
        return frozenset(self.observables) == frozenset(other.observables)

    def __hash__(self):
        return hash(frozenset(self.observables))

    def __le__(self, other: Context) -> bool:
        return set(self.observables) <= set(other.observables)

    def __lt__(self, other: Context) -> bool:
        return self <= other and self != other

    def __and__(self, other: Context) -> Context:
        keep = set(other.observables)
        return Context(tuple(o for o in self.observables if o in keep))

    def __contains__(self, obs: str) -> bool:
        return obs in self.observables

    def __iter__(self) -> Iterator[str]:
        return iter(self.observables)

    def __len__(self) -> int:
        return len(self.observables)

    def __repr__(self):
        return "{" + ",".join(self.observables) + "}"

    @property
    def key(self) -> str:
        return ",".join(self.observables)


@dataclass(frozen=True, eq=False)
class Section:
    """An outcome assignment over one context (a local account)."""

    context: Context
    values: tuple[str, ...]

    def __post_init__(self):
        if len(self.values) != len(self.context):
            raise ValueError(f"section over {self.context!r} needs {len(self.context)} values")

    @classmethod
    def from_dict(cls, context: Context, values: Mapping[str, str]) -> Section:
        return cls(context, tuple(values[o] for o in context.observables))

    def as_dict(self) -> dict[str, str]:
        return dict(zip(self.context.observables, self.values))

    def __getitem__(self, obs: str) -> str:
        return self.values[self.context.observables.index(obs)]

    def _items(self):
        return frozenset(zip(self.context.observables, self.values))

    def __eq__(self, other):
        if not isinstance(other, Section):
            return NotImplemented
        return self._items() == other._items()

    def __hash__(self):
        return hash(self._items())

    def __repr__(self):
        return "(" + ",".join(f"{o}={v}" for o, v in zip(self.context.observables, self.values)) + ")"

    @property
    def row_key(self) -> str:
        return ",".join(self.values)


@dataclass(frozen=True)
class Distribution:
    """Weights on sections over one context; missing sections weigh 0."""

    context: Context
    weights: Mapping[Section, Fraction] = field(default_factory=dict)

    def weight(self, s: Section) -> Fraction:
        return self.weights.get(s, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def support(self) -> frozenset[Section]:
        return frozenset(s for s, w in self.weights.items() if w > 0)


@dataclass(frozen=True)
class Scenario:
    observables: tuple[Observable, ...]
    cover: tuple[Context, ...]

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {o.id: o for o in self.observables})
        object.__setattr__(self, "_rank", {o.id: i for i, o in enumerate(self.observables)})

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(o.id for o in self.observables)

    def outcomes(self, obs: str) -> tuple[str, ...]:
        return self._by_id[obs].outcomes

    def context(self, ids: Iterable[str]) -> Context:
        """Canonical context over ``ids``; unknown ids raise ``KeyError``."""
        ids = set(ids)
        for i in ids:
            if i not in self._rank:
                raise KeyError(i)
        return Context(tuple(sorted(ids, key=self._rank.__getitem__)))

    @property
    def full_context(self) -> Context:
        return Context(self.ids)

    def sections(self, ctx: Context) -> list[Section]:
        """All sections over ``ctx`` in lexicographic order."""
        ctx = self.context(ctx.observables)
        outs = [self.outcomes(o) for o in ctx.observables]
        return [Section(ctx, vals) for vals in itertools.product(*outs)]

    def global_assignments(self) -> Iterator[Section]:
        ctx = self.full_context
        for vals in itertools.product(*(o.outcomes for o in self.observables)):
            yield Section(ctx, vals)

    def n_global(self) -> int:
        n = 1
        for o in self.observables:
            n *= len(o.outcomes)
        return n

    def sort_key(self, s: Section) -> tuple:
        """Lexicographic key: observables in scenario order, outcomes in list order."""
        d = s.as_dict()
        return tuple(
            (self._rank[o], self.outcomes(o).index(d[o]))
            for o in sorted(d, key=self._rank.__getitem__)
        )

    def cover_index(self, ctx: Context) -> int:
        return self.cover.index(ctx)


@dataclass(frozen=True)
class EmpiricalModel:
    scenario: Scenario
    tables: tuple[Distribution, ...]

    def table(self, i: int) -> Distribution:
        return self.table_for(self.scenario.cover[i])

    def table_for(self, ctx: Context) -> Distribution:
        for t in self.tables:
            if t.context == ctx:
                return t
        raise KeyError(ctx)


def restrict_section(s: Section, d: Context) -> Section:
    if not d <= s.context:
        raise ValueError(f"{d!r} is not a subcontext of {s.context!r}")
    vals = s.as_dict()
    return Section(d, tuple(vals[o] for o in d.observables))


def marginalize(p: Distribution, d: Context) -> Distribution:
    if not d <= p.context:
        raise ValueError(f"{d!r} is not a subcontext of {p.context!r}")
    out: dict[Section, Fraction] = {}
    for s, w in p.weights.items():
        t = restrict_section(s, d)
        out[t] = out.get(t, Fraction(0)) + w
    return Distribution(d, out)


def scenario_violations(sc: Scenario) -> list[str]:
    problems = []
    seen = set()
    for o in sc.observables:
        if not o.id:
            problems.append("observable with empty id")
        if o.id in seen:
            problems.append(f"duplicate observable id {o.id!r}")
        seen.add(o.id)
        if not o.outcomes:
            problems.append(f"observable {o.id!r} has no outcomes")
        if len(set(o.outcomes)) != len(o.outcomes):
            problems.append(f"observable {o.id!r} has repeated outcomes")
    if not sc.cover:
        problems.append("empty cover")
    for c in sc.cover:
        if not c.observables:
            problems.append("empty context in cover")
        for obs in c:
            if obs not in seen:
                problems.append(f"context {c!r} references unknown observable {obs!r}")
    for i, c in enumerate(sc.cover):
        for j, d in enumerate(sc.cover):
            if i < j and c == d:
                problems.append(f"context {c!r} listed twice")
            elif i != j and c < d:
                problems.append(f"cover is not an antichain: {c!r} is contained in {d!r}")
    covered = {o for c in sc.cover for o in c}
    for o in sc.observables:
        if o.id not in covered:
            problems.append(f"observable {o.id!r} is in no context")
    return problems


def validate_model(m: EmpiricalModel) -> list[str]:
    """Invariant violations of ``m`` as messages; an empty list means valid."""
    sc = m.scenario
    problems = scenario_violations(sc)
    if problems:
        return problems
    counts: dict[Context, int] = {}
    for t in m.tables:
        counts[t.context] = counts.get(t.context, 0) + 1
        if t.context not in sc.cover:
            problems.append(f"table over {t.context!r}, which is not a cover context")
            continue
        for s, w in t.weights.items():
            if s.context != t.context:
                problems.append(f"table {t.context!r} has a row over {s.context!r}")
                continue
            for obs, val in s.as_dict().items():
                if val not in sc.outcomes(obs):
                    problems.append(f"table {t.context!r}: {val!r} is not an outcome of {obs!r}")
            if not isinstance(w, Fraction) and not isinstance(w, int):
                problems.append(f"table {t.context!r}: non-rational weight {w!r}")
            elif w < 0:
                problems.append(f"table {t.context!r}: negative weight {w} on {s!r}")
        total = t.total()
        if total != 1:
            problems.append(f"table {t.context!r} sums to {total}, not 1")
    for c in sc.cover:
        n = counts.get(c, 0)
        if n == 0:
            problems.append(f"no table for context {c!r}")
        elif n > 1:
            problems.append(f"{n} tables for context {c!r}")
    return problems


def check_model(m: EmpiricalModel) -> EmpiricalModel:
    problems = validate_model(m)
    if problems:
        raise ValidationError("; ".join(problems))
    return m


# -- file format -------------------------------------------------------------


def parse_rational(text, where: str = "") -> Fraction:
    if not isinstance(text, str) or not _RATIONAL.match(text.strip()):
        raise ParseError(f"{where}: expected a rational string like '1/2', got {text!r}")
    num, _, den = text.strip().partition("/")
    if den and int(den) == 0:
        raise ParseError(f"{where}: zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def _no_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ParseError(f"duplicate key {k!r}")
        out[k] = v
    return out


def load_json(text: str | bytes) -> dict:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    return data


def _expect_keys(obj, required: set[str], where: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = set(obj) - required
    if unknown:
        raise ParseError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ParseError(f"{where}: missing keys {sorted(missing)}")


def _str_list(obj, where: str) -> list[str]:
    if not isinstance(obj, list) or not all(isinstance(x, str) for x in obj):
        raise ParseError(f"{where}: expected a list of strings")
    return obj


def model_from_dict(data: dict) -> EmpiricalModel:
    _expect_keys(data, {"observables", "contexts", "tables"}, "scenario")
    if not isinstance(data["observables"], list):
        raise ParseError("observables: expected a list")
    obs = []
    for k, o in enumerate(data["observables"]):
        _expect_keys(o, {"id", "outcomes"}, f"observables[{k}]")
        if not isinstance(o["id"], str):
            raise ParseError(f"observables[{k}].id: expected a string")
        obs.append(Observable(o["id"], tuple(_str_list(o["outcomes"], f"observables[{k}].outcomes"))))
    if not isinstance(data["contexts"], list):
        raise ParseError("contexts: expected a list")
    raw_cover = [_str_list(c, f"contexts[{k}]") for k, c in enumerate(data["contexts"])]
    rank = {o.id: i for i, o in enumerate(obs)}
    cover = tuple(
        Context(tuple(sorted(set(c), key=lambda x: rank.get(x, len(rank))))) for c in raw_cover
    )
    for k, c in enumerate(raw_cover):
        if len(set(c)) != len(c):
            raise ValidationError(f"contexts[{k}] repeats an observable")
    sc = Scenario(tuple(obs), cover)
    problems = scenario_violations(sc)
    if problems:
        raise ValidationError("; ".join(problems))

    if not isinstance(data["tables"], dict):
        raise ParseError("tables: expected an object")
    tables = []
    for key, rows in data["tables"].items():
        ids = key.split(",")
        if len(set(ids)) != len(ids) or any(i not in rank for i in ids):
            raise ValidationError(f"table key {key!r} does not name a context of known observables")
        ctx = sc.context(ids)
        if not isinstance(rows, dict):
            raise ParseError(f"tables[{key!r}]: expected an object")
        weights: dict[Section, Fraction] = {}
        for row, value in rows.items():
            vals = row.split(",")
            if len(vals) != len(ids):
                raise ValidationError(f"tables[{key!r}]: row {row!r} has {len(vals)} values, expected {len(ids)}")
            for i, v in zip(ids, vals):
                if v not in sc.outcomes(i):
                    raise ValidationError(f"tables[{key!r}]: {v!r} is not an outcome of {i!r}")
            s = Section.from_dict(ctx, dict(zip(ids, vals)))
            if s in weights:
                raise ValidationError(f"tables[{key!r}]: row {row!r} repeated")
            w = parse_rational(value, f"tables[{key!r}][{row!r}]")
            if w != 0:
                weights[s] = w
        tables.append(Distribution(ctx, weights))
    by_ctx = {t.context: t for t in tables}
    ordered = [by_ctx[c] for c in sc.cover if c in by_ctx]
    ordered += [t for t in tables if all(t is not o for o in ordered)]
    return check_model(EmpiricalModel(sc, tuple(ordered)))


def parse_scenario(text: str | bytes) -> EmpiricalModel:
    """Parse and validate a scenario file.

    Raises :class:`ParseError` for grammar problems and
    :class:`ValidationError` for invariant violations.
    """
    return model_from_dict(load_json(text))


def model_to_dict(m: EmpiricalModel) -> dict:
    sc = m.scenario
    tables = {}
    for c in sc.cover:
        t = m.table_for(c)
        rows = sorted((s for s, w in t.weights.items() if w != 0), key=sc.sort_key)
        tables[c.key] = {s.row_key: format_rational(t.weight(s)) for s in rows}
    return {
        "observables": [{"id": o.id, "outcomes": list(o.outcomes)} for o in sc.observables],
        "contexts": [list(c.observables) for c in sc.cover],
        "tables": tables,
    }


def dump_canonical(data: dict) -> str:
    """JSON with one line per top-level entry item; stable byte output."""

    def compact(v):
        return json.dumps(v, ensure_ascii=False, separators=(", ", ": "))

    parts = []
    for key, value in data.items():
        if isinstance(value, list) and value:
            body = ",\n".join("    " + compact(v) for v in value)
            parts.append(f"  {compact(key)}: [\n{body}\n  ]")
        elif isinstance(value, dict) and value:
            body = ",\n".join(f"    {compact(k)}: {compact(v)}" for k, v in value.items())
            parts.append(f"  {compact(key)}: {{\n{body}\n  }}")
        else:
            parts.append(f"  {compact(key)}: {compact(value)}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def serialize_model(m: EmpiricalModel) -> str:
    return dump_canonical(model_to_dict(m))


def model_from_tables(
    observables: Mapping[str, Iterable[str]],
    tables: Mapping[tuple[str, ...], Mapping[tuple[str, ...], Fraction | int | str]],
) -> EmpiricalModel:
    """Build and validate a model from Python data.

    ``tables`` maps a tuple of observable ids (the context) to rows keyed by
    outcome tuples in the same order. The cover is the key order.
    """
    data = {
        "observables": [{"id": k, "outcomes": list(v)} for k, v in observables.items()],
        "contexts": [list(c) for c in tables],
        "tables": {
            ",".join(c): {",".join(r): format_rational(Fraction(w)) for r, w in rows.items()}
            for c, rows in tables.items()
        },
    }
    return model_from_dict(data)
