"""Possibilistic gluing: overlap agreement, global sections, classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import InvariantBreach
from .scenario import (
    Context,
    EmpiricalModel,
    Scenario,
    Section,
    marginalize,
    restrict_section,
)

GlobalAssignment = Section
"""A section over the full context of a scenario."""


@dataclass(frozen=True)
class SupportModel:
    scenario: Scenario
    supports: tuple[tuple[Section, ...], ...]  # per cover context, lexicographic

    def support(self, i: int) -> tuple[Section, ...]:
        return self.supports[i]

    def contains(self, s: Section) -> int | None:
        """Index of the cover context whose support holds ``s``, if any."""
        for i, c in enumerate(self.scenario.cover):
            if c == s.context and s in self.supports[i]:
                return i
        return None

    @classmethod
    def from_sets(cls, scenario: Scenario, supports) -> SupportModel:
        return cls(scenario, tuple(tuple(sorted(set(s), key=scenario.sort_key)) for s in supports))


@dataclass(frozen=True)
class SignallingViolation:
    pair: tuple[int, int]
    overlap: Context
    section: Section
    p_i: Fraction
    p_j: Fraction


@dataclass(frozen=True)
class SignallingReport:
    violations: tuple[SignallingViolation, ...]

    @property
    def signalling(self) -> bool:
        return bool(self.violations)


@dataclass
class Verdict:
    signalling: bool
    probabilistically_contextual: bool | None  # None: skipped
    logically_contextual: bool
    strongly_contextual: bool
    confounded: bool = False
    details: dict = field(default_factory=dict)


def support_model(m: EmpiricalModel) -> SupportModel:
    sc = m.scenario
    return SupportModel.from_sets(sc, [m.table_for(c).support() for c in sc.cover])


def signalling_report(m: EmpiricalModel) -> SignallingReport:
    sc = m.scenario
    out = []
    for i, ci in enumerate(sc.cover):
        for j in range(i + 1, len(sc.cover)):
            d = ci & sc.cover[j]
            if not d.observables:
                continue
            pi = marginalize(m.table(i), d)
            pj = marginalize(m.table(j), d)
            for t in sc.sections(d):
                if pi.weight(t) != pj.weight(t):
                    out.append(SignallingViolation((i, j), d, t, pi.weight(t), pj.weight(t)))
    return SignallingReport(tuple(out))


def _search(sm: SupportModel, fixed: dict[str, str]) -> Iterator[GlobalAssignment]:
    """Depth-first over observables in scenario order, lexicographic yield order.

    After each assignment, every context must still have a supported section
    agreeing with the assigned part of it.
    """
    sc = sm.scenario
    ids = sc.ids
    rows = [[s.as_dict() for s in sup] for sup in sm.supports]
    touching = {o: [k for k, c in enumerate(sc.cover) if o in c] for o in ids}
    partial: dict[str, str] = {}

    def alive(k: int) -> bool:
        ctx = sc.cover[k]
        return any(all(r[o] == partial[o] for o in ctx if o in partial) for r in rows[k])

    def rec(depth: int) -> Iterator[GlobalAssignment]:
        if depth == len(ids):
            yield Section(sc.full_context, tuple(partial[o] for o in ids))
            return
        o = ids[depth]
        choices = [fixed[o]] if o in fixed else sc.outcomes(o)
        for v in choices:
            partial[o] = v
            if all(alive(k) for k in touching[o]):
                yield from rec(depth + 1)
            del partial[o]

    if any(not sup for sup in sm.supports):
        return
    yield from rec(0)


def global_sections(sm: SupportModel) -> list[GlobalAssignment]:
    """All global assignments whose every cover restriction is supported."""
    return list(_search(sm, {}))


def extend_section(sm: SupportModel, s: Section) -> GlobalAssignment | None:
    """Lexicographically least global section restricting to ``s``, or None."""
    if sm.contains(s) is None:
        raise ValueError(f"{s!r} is not in the support of any cover context")
    return next(_search(sm, s.as_dict()), None)


def non_extendable(sm: SupportModel) -> list[Section]:
    """Supported sections with no global extension, cover order then lexicographic."""
    out = []
    for sup in sm.supports:
        for s in sup:
            if extend_section(sm, s) is None:
                out.append(s)
    return out


def classify(m: EmpiricalModel, with_lp: bool = True) -> Verdict:
    sm = support_model(m)
    sig = signalling_report(m)
    gs = global_sections(sm)
    blocked = non_extendable(sm)
    logical = bool(blocked)
    strong = not gs
    details: dict = {
        "signalling_violations": list(sig.violations),
        "non_extendable": blocked,
        "global_section": gs[0] if gs else None,
    }
    prob: bool | None = None
    if with_lp and not sig.signalling:
        from .lp import noncontextuality_lp

        res = noncontextuality_lp(m)
        prob = not res.feasible
        details["lp"] = res
    v = Verdict(
        signalling=sig.signalling,
        probabilistically_contextual=prob,
        logically_contextual=logical,
        strongly_contextual=strong,
        confounded=sig.signalling,
        details=details,
    )
    if strong and not logical:
        raise InvariantBreach("strong contextuality without logical contextuality")
    if prob is False and logical:
        raise InvariantBreach("logically contextual model admits a global distribution")
    return v
