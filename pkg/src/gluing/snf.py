"""Smith normal form over the integers, with transforms.

``smith_normal_form(A)`` returns ``(U, S, V)`` with ``U @ A @ V == S``,
``U`` and ``V`` unimodular, ``S`` diagonal with nonnegative entries
``d1 | d2 | ...``. Matrices are lists of lists of Python ints.
"""

from __future__ import annotations

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = [[0] * cols for _ in A]
    for i, row in enumerate(A):
        if len(row) != inner:
            raise ValueError("dimension mismatch")
        oi = out[i]
        for k, a in enumerate(row):
            if a:
                bk = B[k]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += a * bk[j]
    return out


def matvec(A: Matrix, x: list[int]) -> list[int]:
    return [sum(a * v for a, v in zip(row, x) if a) for row in A]


def smith_normal_form(A: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    m = len(A)
    n = len(A[0]) if m else 0
    S = [list(map(int, row)) for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (S, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row[dst] += q * row[src]
        for M in (S, U):
            rs, rd = M[src], M[dst]
            for k, v in enumerate(rs):
                if v:
                    rd[k] += q * v

    def add_col(dst, src, q):
        for M in (S, V):
            for row in M:
                if row[src]:
                    row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    v = S[i][j]
                    if v and (pivot is None or abs(v) < pivot[0]):
                        pivot = (abs(v), i, j)
                        if pivot[0] == 1:
                            break
                if pivot and pivot[0] == 1:
                    break
            if pivot is None:
                return U, S, V
            _, i, j = pivot
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = S[t][t]
            clean = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // p))
                    clean = clean and S[i][t] == 0
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // p))
                    clean = clean and S[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) if any(S[i][j] % p for j in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            S[t] = [-v for v in S[t]]
            U[t] = [-v for v in U[t]]
    return U, S, V


def diagonal(S: Matrix) -> list[int]:
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0))]


def solve_integer(A: Matrix, b: list[int], snf=None) -> list[int] | None:
    """An integer ``x`` with ``A x = b``, or None if none exists.

    Pass a precomputed ``snf = smith_normal_form(A)`` to reuse it across
    right-hand sides.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    U, S, V = snf if snf is not None else smith_normal_form(A)
    c = matvec(U, b)
    w = [0] * n
    for i in range(m):
        d = S[i][i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
        elif c[i] % d:
            return None
        else:
            w[i] = c[i] // d
    return matvec(V, w)
