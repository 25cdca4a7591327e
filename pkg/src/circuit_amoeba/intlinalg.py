"""Exact integer linear algebra for small lattice matrices.

All routines take plain nested lists of Python ints.  Results that are meant
to fit machine integers are range-checked against the signed 64-bit limit.
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .errors import MagnitudeTooLarge

INT64_MAX = 2**63 - 1

IntMatrix = List[List[int]]


class IllConditionedWarning(UserWarning):
    pass


def check_int64(value: int, what: str = "value") -> int:
    if abs(value) > INT64_MAX:
        raise MagnitudeTooLarge(f"{what} {value} exceeds the signed 64-bit range")
    return value


def det_bareiss(a: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination (Bareiss).  Every intermediate is an
    exact minor of the input, so no rationals are needed."""
    m = [list(map(int, row)) for row in a]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return check_int64(sign * m[n - 1][n - 1], "determinant")


def det_cofactor(a: Sequence[Sequence[int]]) -> int:
    """Laplace expansion along the first row; only used as a cross-check."""
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return int(a[0][0])
    total = 0
    for j in range(n):
        if a[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in (list(r) for r in a[1:])]
        total += (-1) ** j * int(a[0][j]) * det_cofactor(minor)
    return total


def transpose(a: Sequence[Sequence[int]]) -> IntMatrix:
    return [list(col) for col in zip(*a)]


def replace_column(a: Sequence[Sequence[int]], j: int, col: Sequence[int]) -> IntMatrix:
    out = [list(row) for row in a]
    for i, v in enumerate(col):
        out[i][j] = int(v)
    return out


def inverse_fraction(a: Sequence[Sequence[int]]) -> List[List[Fraction]]:
    """Exact inverse by Gauss-Jordan over the rationals."""
    n = len(a)
    m = [[Fraction(int(v)) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular integer matrix")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def solve_integer_system(a: Sequence[Sequence[int]], rhs) -> np.ndarray:
    """Solve ``a @ x = rhs`` for an integer matrix and a float right-hand side.

    The inverse is formed exactly and only the final product is rounded, so
    the result is as accurate as the right-hand side allows.
    """
    inv = np.array([[float(v) for v in row] for row in inverse_fraction(a)])
    af = np.asarray(a, dtype=float)
    cond = np.linalg.cond(af)
    if cond > 1e12:
        warnings.warn(f"integer system has condition number {cond:.3g}", IllConditionedWarning,
                      stacklevel=2)
    rhs = np.asarray(rhs, dtype=float)
    x = inv @ rhs
    # one step of iterative refinement absorbs the rounding of the inverse
    x = x - inv @ (af @ x - rhs)
    return x


def smith_normal_form(a: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U @ a @ V == D`` diagonal, U and V unimodular,
    and each diagonal entry dividing the next."""
    n_rows, n_cols = len(a), len(a[0])
    d = [list(map(int, row)) for row in a]
    u = [[int(i == j) for j in range(n_rows)] for i in range(n_rows)]
    v = [[int(i == j) for j in range(n_cols)] for i in range(n_cols)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for row in d:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    for t in range(min(n_rows, n_cols)):
        while True:
            nonzero = [(abs(d[i][j]), i, j) for i in range(t, n_rows)
                       for j in range(t, n_cols) if d[i][j] != 0]
            if not nonzero:
                return u, d, v
            _, pi, pj = min(nonzero)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = d[t][t]
            clean = True
            for i in range(t + 1, n_rows):
                q = d[i][t] // p
                if q:
                    add_row(i, t, -q)
                if d[i][t] != 0:
                    clean = False
            for j in range(t + 1, n_cols):
                q = d[t][j] // p
                if q:
                    add_col(j, t, -q)
                if d[t][j] != 0:
                    clean = False
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, n_rows) for j in range(t + 1, n_cols)
                        if d[i][j] % p != 0), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return u, d, v


def matmul_int(a, b) -> IntMatrix:
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]
