"""Dense two-phase simplex over exact rationals.

Variables are always nonnegative. Rows carry a relation ("=", "<=" or
">="). Pivoting follows Bland's rule (lowest-index entering column,
lowest-index basic variable on ratio ties), so the method terminates on
degenerate problems.

Infeasible problems come back with a Farkas vector ``y`` over the original
rows such that ``y @ A <= 0`` componentwise, ``y @ b > 0``, ``y_i <= 0`` on
"<=" rows and ``y_i >= 0`` on ">=" rows. Any such ``y`` proves that no
``x >= 0`` satisfies the rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

from .errors import InvariantBreach

RELATIONS = ("=", "<=", ">=")


@dataclass(frozen=True)
class RationalMatrix:
    rows: tuple[tuple[Fraction, ...], ...]
    n_cols: int

    @classmethod
    def from_rows(cls, rows, n_cols: int | None = None) -> RationalMatrix:
        rows = tuple(tuple(Fraction(v) for v in r) for r in rows)
        if n_cols is None:
            n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise ValueError("ragged matrix")
        return cls(rows, n_cols)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.rows)

    def dot(self, x: Sequence[Fraction]) -> list[Fraction]:
        if len(x) != self.n_cols:
            raise ValueError("dimension mismatch")
        return [sum((a * v for a, v in zip(r, x) if a), Fraction(0)) for r in self.rows]

    def rdot(self, y: Sequence[Fraction]) -> list[Fraction]:
        """``y @ self``."""
        if len(y) != self.n_rows:
            raise ValueError("dimension mismatch")
        out = [Fraction(0)] * self.n_cols
        for yi, r in zip(y, self.rows):
            if yi:
                for j, a in enumerate(r):
                    if a:
                        out[j] += yi * a
        return out


@dataclass(frozen=True)
class LPProblem:
    """``maximize c @ x`` subject to ``A x (rel) b`` and ``x >= 0``.

    ``c=None`` asks for feasibility only.
    """

    A: RationalMatrix
    b: tuple[Fraction, ...]
    c: tuple[Fraction, ...] | None = None
    relations: tuple[str, ...] | None = None

    def __post_init__(self):
        if len(self.b) != self.A.n_rows:
            raise ValueError(f"b has {len(self.b)} entries for {self.A.n_rows} rows")
        if self.c is not None and len(self.c) != self.A.n_cols:
            raise ValueError(f"c has {len(self.c)} entries for {self.A.n_cols} columns")
        rel = self.relations or ("=",) * self.A.n_rows
        if len(rel) != self.A.n_rows or any(r not in RELATIONS for r in rel):
            raise ValueError("relations must be one of '=', '<=', '>=' per row")
        object.__setattr__(self, "relations", tuple(rel))
        object.__setattr__(self, "b", tuple(Fraction(v) for v in self.b))
        if self.c is not None:
            object.__setattr__(self, "c", tuple(Fraction(v) for v in self.c))


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None = None
    objective: Fraction | None = None
    farkas: tuple[Fraction, ...] | None = None
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def check_feasible_point(p: LPProblem, x: Sequence[Fraction]) -> bool:
    if any(v < 0 for v in x):
        return False
    for lhs, rel, rhs in zip(p.A.dot(x), p.relations, p.b):
        if rel == "=" and lhs != rhs:
            return False
        if rel == "<=" and lhs > rhs:
            return False
        if rel == ">=" and lhs < rhs:
            return False
    return True


def verify_farkas(p: LPProblem, y: Sequence[Fraction]) -> bool:
    """Pure-arithmetic check that ``y`` certifies infeasibility of ``p``."""
    if len(y) != p.A.n_rows:
        return False
    for yi, rel in zip(y, p.relations):
        if (rel == "<=" and yi > 0) or (rel == ">=" and yi < 0):
            return False
    if any(v > 0 for v in p.A.rdot(y)):
        return False
    return sum((yi * bi for yi, bi in zip(y, p.b)), Fraction(0)) > 0


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


class _Tableau:
    """Rows of ``B^-1 [A | b]`` plus a reduced-cost row, in gmpy2 rationals."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.T = rows
        self.basis = basis
        self.obj: list[Fraction] = []
        self.pivots = 0

    def pivot(self, r: int, j: int) -> None:
        row = self.T[r]
        p = row[j]
        if p != 1:
            row[:] = [v / p if v else v for v in row]
        nz = [k for k, v in enumerate(row) if v]
        for i, other in enumerate(self.T):
            if i != r:
                f = other[j]
                if f:
                    for k in nz:
                        other[k] -= f * row[k]
        f = self.obj[j]
        if f:
            for k in nz:
                self.obj[k] -= f * row[k]
        self.basis[r] = j
        self.pivots += 1

    def set_costs(self, cost: list) -> None:
        obj = [mpq(v) for v in cost] + [mpq(0)]
        for r, bj in enumerate(self.basis):
            cb = cost[bj]
            if cb:
                for k, v in enumerate(self.T[r]):
                    if v:
                        obj[k] -= cb * v
        self.obj = obj

    def run(self, enterable: int) -> bool:
        """Minimize the current cost row. Returns False when unbounded."""
        while True:
            j = next((k for k in range(enterable) if self.obj[k] < 0), None)
            if j is None:
                return True
            best = None
            for i, row in enumerate(self.T):
                a = row[j]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], j)


def solve_lp(p: LPProblem) -> LPResult:
    A, m, n = p.A, p.A.n_rows, p.A.n_cols
    slack_cols = [i for i, rel in enumerate(p.relations) if rel != "="]
    n_slack = len(slack_cols)
    art0 = n + n_slack
    width = art0 + m

    zero, one = mpq(0), mpq(1)
    signs = []
    rows = []
    for i in range(m):
        row = [zero] * (width + 1)
        row[:n] = [mpq(v.numerator, v.denominator) for v in A.rows[i]]
        if p.relations[i] != "=":
            row[n + slack_cols.index(i)] = one if p.relations[i] == "<=" else -one
        sign = -1 if p.b[i] < 0 else 1
        if sign < 0:
            row = [-v for v in row]
        bi = abs(p.b[i])
        row[-1] = mpq(bi.numerator, bi.denominator)
        row[art0 + i] = one
        signs.append(sign)
        rows.append(row)

    tab = _Tableau(rows, list(range(art0, width)))
    tab.set_costs([0] * art0 + [1] * m)
    tab.run(art0)
    phase1 = -tab.obj[-1]

    if phase1 > 0:
        y = [signs[i] * _frac(1 - tab.obj[art0 + i]) for i in range(m)]
        y = tuple(y)
        if not verify_farkas(p, y):
            raise InvariantBreach("phase-1 dual is not a Farkas certificate")
        return LPResult("infeasible", farkas=y, pivots=tab.pivots)

    # drive zero-level artificials out of the basis; drop redundant rows
    r = 0
    while r < len(tab.T):
        if tab.basis[r] >= art0:
            j = next((k for k in range(art0) if tab.T[r][k] != 0), None)
            if j is None:
                del tab.T[r]
                del tab.basis[r]
                continue
            tab.pivot(r, j)
        r += 1

    if p.c is None:
        x = _extract(tab, n)
        objective = None
    else:
        cost = [mpq(-v.numerator, v.denominator) for v in p.c] + [0] * (width - n)
        tab.set_costs(cost)
        if not tab.run(art0):
            return LPResult("unbounded", pivots=tab.pivots)
        x = _extract(tab, n)
        objective = sum((ci * xi for ci, xi in zip(p.c, x)), Fraction(0))
    if not check_feasible_point(p, x):
        raise InvariantBreach("simplex returned a point violating the constraints")
    return LPResult("optimal", x=x, objective=objective, pivots=tab.pivots)


def _extract(tab: _Tableau, n: int) -> tuple[Fraction, ...]:
    x = [Fraction(0)] * n
    for r, bj in enumerate(tab.basis):
        if bj < n:
            x[bj] = _frac(tab.T[r][-1])
    return tuple(x)
