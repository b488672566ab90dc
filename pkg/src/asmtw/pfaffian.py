"""Pfaffians and small dense linear algebra over exact or big-float scalars.

Matrices are plain lists of rows so that any field type works (gmpy2 ``mpq``
and ``mpfr``, ``fractions.Fraction``, Python floats).
"""
from __future__ import annotations

from typing import Sequence


def _copy(m) -> list[list]:
    return [list(row) for row in m]


def _is_exact(x) -> bool:
    return not isinstance(x, float) and type(x).__name__ not in ("mpfr", "mpf")


def check_skew(m, tol=0) -> None:
    n = len(m)
    for i in range(n):
        if len(m[i]) != n:
            raise ValueError("matrix is not square")
        for j in range(i, n):
            if abs(m[i][j] + m[j][i]) > tol:
                raise ValueError(f"matrix is not skew-symmetric at ({i},{j})")


def pfaffian(m: Sequence[Sequence], check: bool = True):
    """Pfaffian by skew-symmetric elimination with pivoting.

    Exact inputs pivot on the first nonzero entry; inexact inputs on the
    entry of largest magnitude.
    """
    n = len(m)
    if n % 2:
        raise ValueError("Pfaffian needs an even dimension")
    if check:
        check_skew(m)
    if n == 0:
        return 1
    a = _copy(m)
    exact = _is_exact(a[0][1]) if n else True
    result = 1
    for k in range(0, n, 2):
        row = a[k]
        if exact:
            p = next((j for j in range(k + 1, n) if row[j] != 0), None)
            if p is None:
                return 0 * a[0][1]
        else:
            p = max(range(k + 1, n), key=lambda j: abs(row[j]))
            if row[p] == 0:
                return 0 * a[0][1]
        if p != k + 1:
            a[k + 1], a[p] = a[p], a[k + 1]
            for r in a:
                r[k + 1], r[p] = r[p], r[k + 1]
            result = -result
        result = result * _schur_step(a, k)
    return result


def _schur_step(a, k):
    """Eliminate rows/columns ``k, k+1`` in place; returns the pivot."""
    n = len(a)
    piv = a[k][k + 1]
    rk, rk1 = a[k], a[k + 1]
    for i in range(k + 2, n):
        bi0, bi1 = rk[i], rk1[i]
        if bi0 == 0 and bi1 == 0:
            continue
        ri = a[i]
        for j in range(i + 1, n):
            v = ri[j] + (bi1 * rk[j] - bi0 * rk1[j]) / piv
            ri[j] = v
            a[j][i] = -v
    return piv


def leading_pfaffians(m: Sequence[Sequence], check: bool = True) -> list:
    """Pfaffians of the leading ``2s x 2s`` blocks for ``s = 1..n/2``.

    Uses elimination without pivoting, so that the ``s``-th value is the
    product of the first ``s`` pivots.  Raises ``ZeroDivisionError`` if a
    leading block is singular before the last one.
    """
    n = len(m)
    if n % 2:
        raise ValueError("Pfaffian needs an even dimension")
    if check:
        check_skew(m)
    a = _copy(m)
    out = []
    acc = 1
    for k in range(0, n, 2):
        if a[k][k + 1] == 0:
            out.append(0 * acc)
            if k + 2 < n:
                raise ZeroDivisionError(f"leading block {k + 2} is singular")
            break
        acc = acc * _schur_step(a, k)
        out.append(acc)
    return out


def determinant(m: Sequence[Sequence]):
    """Determinant by Gaussian elimination (first nonzero pivot)."""
    a = _copy(m)
    n = len(a)
    det = 1
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return 0
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        piv = a[k][k]
        det = det * piv
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f != 0:
                ai, ak = a[i], a[k]
                for j in range(k + 1, n):
                    ai[j] -= f * ak[j]
    return det


def inverse(m: Sequence[Sequence], one=1):
    """Gauss-Jordan inverse; ``one`` fixes the scalar type of the identity."""
    n = len(m)
    a = [list(row) + [one if i == j else 0 * one for j in range(n)] for i, row in enumerate(m)]
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            raise ZeroDivisionError("matrix is singular")
        a[k], a[p] = a[p], a[k]
        piv = a[k][k]
        ak = [v / piv for v in a[k]]
        a[k] = ak
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                ai = a[i]
                for j in range(k, 2 * n):
                    if ak[j] != 0:
                        ai[j] -= f * ak[j]
    return [row[n:] for row in a]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col) if x != 0 and y != 0), 0) for col in bt] for row in a]


def pfaffian_float(m):
    """Pfaffian of a real skew-symmetric numpy array (partial pivoting)."""
    import numpy as np

    a = np.array(m, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or n % 2:
        raise ValueError("Pfaffian needs an even square matrix")
    result = 1.0
    for k in range(0, n - 1, 2):
        p = k + 1 + int(np.argmax(np.abs(a[k, k + 1:])))
        if p != k + 1:
            a[[k + 1, p]] = a[[p, k + 1]]
            a[:, [k + 1, p]] = a[:, [p, k + 1]]
            result = -result
        piv = a[k, k + 1]
        if piv == 0:
            return 0.0
        result *= piv
        if k + 2 < n:
            u = a[k, k + 2:]
            v = a[k + 1, k + 2:]
            a[k + 2:, k + 2:] += (np.outer(v, u) - np.outer(u, v)) / piv
    return result
