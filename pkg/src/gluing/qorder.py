"""Sequential yes/no measurements with projectors, in exact arithmetic.

Entries may be rationals or rational multiples of square roots
(``"1/2"``, ``"sqrt(2)/2"``, ``"-1/3*sqrt(3)"``). Every Born probability
must come out rational; anything else is rejected.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

import sympy as sp

from .cbd import OrderEffectData
from .errors import ParseError, ValidationError

MAX_DIM = 4

_TOKEN = re.compile(
    r"^(?P<sign>[+-])?"
    r"(?P<coef>\d+(?:/\d+)?)?"
    r"(?:(?(coef)\*)sqrt\((?P<rad>\d+(?:/\d+)?)\))?"
    r"(?:/(?P<den>\d+))?$"
)


def parse_entry(token) -> sp.Expr:
    if isinstance(token, (int, Fraction)):
        q = Fraction(token)
        return sp.Rational(q.numerator, q.denominator)
    if isinstance(token, sp.Expr):
        return token
    text = str(token).strip().replace(" ", "")
    m = _TOKEN.match(text)
    if not text or not m or (m["coef"] is None and m["rad"] is None):
        raise ParseError(f"cannot read {token!r} as a rational or rational surd")
    if m["den"] and m["rad"] is None:
        raise ParseError(f"cannot read {token!r} as a rational or rational surd")
    value = sp.Rational(1)
    if m["coef"]:
        num, _, den = m["coef"].partition("/")
        if den and int(den) == 0:
            raise ParseError(f"zero denominator in {token!r}")
        value *= sp.Rational(int(num), int(den or 1))
    if m["rad"]:
        num, _, den = m["rad"].partition("/")
        if den and int(den) == 0:
            raise ParseError(f"zero denominator in {token!r}")
        value *= sp.sqrt(sp.Rational(int(num), int(den or 1)))
    if m["den"]:
        if int(m["den"]) == 0:
            raise ParseError(f"zero denominator in {token!r}")
        value /= int(m["den"])
    return -value if m["sign"] == "-" else value


def _matrix(entries, dim: int, name: str) -> sp.Matrix:
    if isinstance(entries, sp.MatrixBase):
        M = sp.Matrix(entries)
    else:
        entries = list(entries)
        if entries and isinstance(entries[0], (list, tuple)):
            M = sp.Matrix([[parse_entry(v) for v in row] for row in entries])
        else:
            if len(entries) != dim * dim:
                raise ValidationError(f"{name} needs {dim * dim} entries for dimension {dim}, got {len(entries)}")
            M = sp.Matrix(dim, dim, [parse_entry(v) for v in entries])
    if M.shape != (dim, dim):
        raise ValidationError(f"{name} has shape {M.shape}, expected {(dim, dim)}")
    return M


def _is_zero(M: sp.Matrix) -> bool:
    return all(sp.expand(v) == 0 for v in M)


def _check_projector(P: sp.Matrix, name: str) -> None:
    if any(not v.is_real for v in P):
        raise ValidationError(f"{name} must have real entries")
    if not _is_zero(P - P.T):
        raise ValidationError(f"{name} is not self-adjoint")
    if not _is_zero(P * P - P):
        raise ValidationError(f"{name} is not idempotent")


def _probability(v: sp.Matrix) -> Fraction:
    p = sp.expand((v.T * v)[0])
    if not p.is_Rational:
        raise ValidationError(f"Born probability {p} is irrational; exact tables need rational probabilities")
    return Fraction(int(p.p), int(p.q))


def quantum_order_model(
    state: Sequence,
    proj_a,
    proj_b,
    a: str = "a",
    b: str = "b",
) -> OrderEffectData:
    """Tables for asking a then b, and b then a, of a real pure state.

    ``p_ab(x, y) = |P_b^y P_a^x psi|^2`` with ``P^1 = P`` and ``P^0 = I - P``.
    Projectors are d x d nested lists or flat row-major lists.
    """
    psi = sp.Matrix([parse_entry(v) for v in state])
    dim = psi.shape[0]
    if not 1 <= dim <= MAX_DIM:
        raise ValidationError(f"dimension {dim} outside 1..{MAX_DIM}")
    if any(not v.is_real for v in psi):
        raise ValidationError("state must have real entries")
    if sp.expand((psi.T * psi)[0]) != 1:
        raise ValidationError("state is not normalized")
    A = _matrix(proj_a, dim, "projector A")
    B = _matrix(proj_b, dim, "projector B")
    _check_projector(A, "projector A")
    _check_projector(B, "projector B")
    eye = sp.eye(dim)
    PA = {1: A, 0: eye - A}
    PB = {1: B, 0: eye - B}
    ab = {(x, y): _probability(PB[y] * PA[x] * psi) for x in (1, 0) for y in (1, 0)}
    ba = {(y, x): _probability(PA[x] * PB[y] * psi) for y in (1, 0) for x in (1, 0)}
    for name, t in (("AB", ab), ("BA", ba)):
        if sum(t.values()) != 1:
            raise ValidationError(f"order {name} probabilities do not sum to 1")
    return OrderEffectData(ab, ba, a, b)
