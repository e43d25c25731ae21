"""Probabilistic gluing: is there one joint distribution behind every table?"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvariantBreach, SignallingError, SizeCapError
from .scenario import EmpiricalModel, Scenario, Section, restrict_section
from .simplex import LPProblem, RationalMatrix, solve_lp, verify_farkas

DEFAULT_MAX_COLUMNS = 2**20


@dataclass(frozen=True)
class Incidence:
    matrix: RationalMatrix
    rows: tuple[tuple[int, Section], ...]  # (cover index, section)
    columns: tuple[Section, ...]  # global assignments, lexicographic


@dataclass(frozen=True)
class GlobalDistribution:
    weights: dict[Section, Fraction]

    def marginal(self, ctx) -> dict[Section, Fraction]:
        out: dict[Section, Fraction] = {}
        for g, w in self.weights.items():
            t = restrict_section(g, ctx)
            out[t] = out.get(t, Fraction(0)) + w
        return out


@dataclass(frozen=True)
class NoncontextualityResult:
    feasible: bool
    joint: GlobalDistribution | None
    certificate: tuple[Fraction, ...] | None
    incidence: Incidence
    v: tuple[Fraction, ...]


def check_size(n_columns: int, max_columns: int) -> None:
    if n_columns > max_columns:
        raise SizeCapError(f"{n_columns} columns exceed the cap of {max_columns}")


def incidence_matrix(sc: Scenario, max_columns: int = DEFAULT_MAX_COLUMNS) -> Incidence:
    check_size(sc.n_global(), max_columns)
    cols = tuple(sc.global_assignments())
    rows = tuple((i, s) for i, c in enumerate(sc.cover) for s in sc.sections(c))
    index = {(i, s): r for r, (i, s) in enumerate(rows)}
    data = [[0] * len(cols) for _ in rows]
    for j, g in enumerate(cols):
        for i, c in enumerate(sc.cover):
            data[index[(i, restrict_section(g, c))]][j] = 1
    return Incidence(RationalMatrix.from_rows(data, len(cols)), rows, cols)


def observed_vector(m: EmpiricalModel, inc: Incidence) -> tuple[Fraction, ...]:
    return tuple(m.table(i).weight(s) for i, s in inc.rows)


def noncontextuality_lp(m: EmpiricalModel, max_columns: int = DEFAULT_MAX_COLUMNS) -> NoncontextualityResult:
    """Solve ``M x = v, x >= 0`` for a joint distribution over global assignments."""
    inc = incidence_matrix(m.scenario, max_columns)
    v = observed_vector(m, inc)
    problem = LPProblem(inc.matrix, v)
    res = solve_lp(problem)
    if not res.feasible:
        if not verify_farkas(problem, res.farkas):
            raise InvariantBreach("Farkas certificate failed verification")
        return NoncontextualityResult(False, None, res.farkas, inc, v)
    joint = GlobalDistribution({g: w for g, w in zip(inc.columns, res.x) if w})
    if sum(joint.weights.values()) != 1:
        raise InvariantBreach("joint distribution is not normalized")
    for c in m.scenario.cover:
        table = m.table_for(c)
        marg = joint.marginal(c)
        if any(marg.get(s, 0) != table.weight(s) for s in m.scenario.sections(c)):
            raise InvariantBreach(f"joint does not reproduce the table on {c!r}")
    return NoncontextualityResult(True, joint, None, inc, v)


def contextual_fraction(m: EmpiricalModel, max_columns: int = DEFAULT_MAX_COLUMNS) -> Fraction:
    """``1 - max{sum(b) : M b <= v, b >= 0}`` for a non-signalling model."""
    from .glue import signalling_report

    if signalling_report(m).signalling:
        raise SignallingError(
            "contextual fraction is undefined for signalling models; "
            "analyse the system with Contextuality-by-Default (cbd) instead"
        )
    inc = incidence_matrix(m.scenario, max_columns)
    v = observed_vector(m, inc)
    n = inc.matrix.n_cols
    res = solve_lp(LPProblem(inc.matrix, v, (Fraction(1),) * n, ("<=",) * len(v)))
    if res.status != "optimal":
        raise InvariantBreach(f"contextual-fraction LP is {res.status}")
    cf = 1 - res.objective
    if not 0 <= cf <= 1:
        raise InvariantBreach(f"contextual fraction {cf} outside [0, 1]")
    return cf
