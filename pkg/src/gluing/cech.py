"""Integer-coefficient extension obstruction over the nerve of the cover.

The coefficient presheaf is the free abelian group on supported sections:
over a cover context its basis is the support; over a smaller context ``D``
the basis is every restriction to ``D`` of a supported section of a cover
context containing ``D``. Restriction extends linearly, so two supported
sections with the same restriction add their coefficients.

For a supported section ``s`` over ``C_i0`` we look for integer vectors
``z_j`` (one per cover context) with ``z_i0 = e_s`` and
``z_j|D = z_k|D`` on every nerve edge ``D = C_j & C_k``. If no such family
exists, ``s`` has no genuine extension either. A family may exist even
when no extension does, so a vanishing result is not a certificate of
extendability.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .glue import SupportModel
from .scenario import Context, Scenario, Section, restrict_section
from .snf import matvec, smith_normal_form, solve_integer

ONE_SIDED_NOTE = "vanishing does not by itself certify a genuine extension"


@dataclass(frozen=True)
class Nerve:
    cover: tuple[Context, ...]
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    triangles: tuple[tuple[int, int, int], ...]

    def overlap(self, *idx: int) -> Context:
        ctx = self.cover[idx[0]]
        for i in idx[1:]:
            ctx = ctx & self.cover[i]
        return ctx


def build_nerve(sc: Scenario) -> Nerve:
    cover = sc.cover
    n = len(cover)
    edges = tuple(
        (i, j) for i, j in itertools.combinations(range(n), 2) if (cover[i] & cover[j]).observables
    )
    triangles = tuple(
        (i, j, k)
        for i, j, k in itertools.combinations(range(n), 3)
        if (cover[i] & cover[j] & cover[k]).observables
    )
    return Nerve(cover, tuple(range(n)), edges, triangles)


class FreeAbelianPresheaf:
    def __init__(self, sm: SupportModel):
        self.sm = sm
        self.scenario = sm.scenario
        self._basis: dict[Context, tuple[Section, ...]] = {}

    @cached_property
    def contexts(self) -> tuple[Context, ...]:
        """Cover contexts closed under non-empty intersection."""
        seen = list(self.scenario.cover)
        frontier = list(seen)
        while frontier:
            new = []
            for a in frontier:
                for b in list(seen):
                    d = a & b
                    if d.observables and d not in seen and d not in new:
                        new.append(d)
            seen.extend(new)
            frontier = new
        return tuple(seen)

    def basis(self, d: Context) -> tuple[Section, ...]:
        d = self.scenario.context(d.observables)
        if d not in self._basis:
            found = set()
            covering = [k for k, c in enumerate(self.scenario.cover) if d <= c]
            if not covering:
                raise ValueError(f"{d!r} lies in no cover context")
            for k in covering:
                found.update(restrict_section(s, d) for s in self.sm.supports[k])
            self._basis[d] = tuple(sorted(found, key=self.scenario.sort_key))
        return self._basis[d]


def presheaf_restriction_matrix(F: FreeAbelianPresheaf, C: Context, D: Context) -> list[list[int]]:
    """Rows: basis of F(D); columns: basis of F(C)."""
    if not D <= C:
        raise ValueError(f"{D!r} is not a subcontext of {C!r}")
    rows = F.basis(D)
    where = {t: r for r, t in enumerate(rows)}
    cols = F.basis(C)
    M = [[0] * len(cols) for _ in rows]
    for j, s in enumerate(cols):
        M[where[restrict_section(s, D)]][j] = 1
    return M


@dataclass(frozen=True)
class ObstructionResult:
    section: Section
    context_index: int
    vanishes: bool
    witness: tuple[tuple[int, ...], ...] | None
    note: str | None


class ExtensionSystem:
    """The integer linear system for one base context, factored once."""

    def __init__(self, F: FreeAbelianPresheaf, i0: int, nerve: Nerve | None = None):
        self.F = F
        self.i0 = i0
        sc = F.scenario
        self.nerve = nerve or build_nerve(sc)
        self.bases = [F.basis(c) for c in sc.cover]
        self.offsets = list(itertools.accumulate([0] + [len(b) for b in self.bases]))
        n = self.offsets[-1]
        rows: list[list[int]] = []
        base = self.offsets[i0]
        for r in range(len(self.bases[i0])):
            row = [0] * n
            row[base + r] = 1
            rows.append(row)
        self.restrictions = {}
        for j, k in self.nerve.edges:
            d = self.nerve.overlap(j, k)
            Rj = presheaf_restriction_matrix(F, sc.cover[j], d)
            Rk = presheaf_restriction_matrix(F, sc.cover[k], d)
            self.restrictions[(j, k)] = (Rj, Rk)
            for rj, rk in zip(Rj, Rk):
                row = [0] * n
                row[self.offsets[j]:self.offsets[j + 1]] = rj
                row[self.offsets[k]:self.offsets[k + 1]] = [-v for v in rk]
                rows.append(row)
        self.matrix = rows
        self.snf = smith_normal_form(rows)

    def solve(self, s: Section) -> ObstructionResult:
        basis = self.bases[self.i0]
        if s not in basis:
            raise ValueError(f"{s!r} is not supported on context {self.i0}")
        b = [0] * len(self.matrix)
        b[basis.index(s)] = 1
        z = solve_integer(self.matrix, b, self.snf)
        if z is None:
            return ObstructionResult(s, self.i0, False, None, None)
        family = tuple(
            tuple(z[self.offsets[j]:self.offsets[j + 1]]) for j in range(len(self.bases))
        )
        if not verify_family(self, family, s):
            from .errors import InvariantBreach

            raise InvariantBreach("integer witness failed edge verification")
        return ObstructionResult(s, self.i0, True, family, ONE_SIDED_NOTE)


def verify_family(system: ExtensionSystem, family, s: Section) -> bool:
    """Recheck a witness family by direct matrix arithmetic."""
    basis = system.bases[system.i0]
    expected = [int(t == s) for t in basis]
    if list(family[system.i0]) != expected:
        return False
    for (j, k), (Rj, Rk) in system.restrictions.items():
        if matvec(Rj, list(family[j])) != matvec(Rk, list(family[k])):
            return False
    return True


def obstruction(sm: SupportModel, s: Section) -> ObstructionResult:
    i0 = sm.contains(s)
    if i0 is None:
        raise ValueError(f"{s!r} is not in the support of any cover context")
    return ExtensionSystem(FreeAbelianPresheaf(sm), i0).solve(s)


def all_obstructions(sm: SupportModel) -> list[ObstructionResult]:
    """Obstruction for every supported section, cover order then lexicographic."""
    F = FreeAbelianPresheaf(sm)
    nerve = build_nerve(sm.scenario)
    out = []
    for i, sup in enumerate(sm.supports):
        if not sup:
            continue
        system = ExtensionSystem(F, i, nerve)
        out.extend(system.solve(s) for s in sup)
    return out
