"""Small linear algebra over F_p and Z, on plain lists of ints.

Row reduction and null spaces go through sympy's ``DomainMatrix`` over GF(p);
Smith normal form through ``sympy.matrices.normalforms.smith_normal_decomp``.
Vectors are tuples, matrices are lists of rows, and matrices act on column
vectors.
"""

from __future__ import annotations

from typing import Sequence

from sympy import GF, ZZ, Matrix
from sympy.matrices.normalforms import smith_normal_decomp
from sympy.polys.matrices import DomainMatrix

Vector = tuple[int, ...]


def _dm(rows: Sequence[Sequence[int]], p: int, ncols: int) -> DomainMatrix:
    field = GF(p)
    data = [[field(int(x) % p) for x in row] for row in rows]
    return DomainMatrix(data, (len(data), ncols), field)


def _to_int_rows(dm: DomainMatrix, p: int) -> list[list[int]]:
    return [[int(x) % p for x in row] for row in dm.to_list()]


def rref(rows: Sequence[Sequence[int]], p: int, ncols: int) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form mod p; returns the nonzero rows and pivot columns."""
    if not rows:
        return [], []
    reduced, pivots = _dm(rows, p, ncols).rref()
    out = [tuple(r) for r in _to_int_rows(reduced, p)[: len(pivots)]]
    return out, list(pivots)


def rank(rows: Sequence[Sequence[int]], p: int, ncols: int) -> int:
    return len(rref(rows, p, ncols)[1])


def span_basis(rows: Sequence[Sequence[int]], p: int, ncols: int) -> list[Vector]:
    return rref(rows, p, ncols)[0]


def reduce_mod_span(v: Sequence[int], basis: Sequence[Vector], pivots: Sequence[int], p: int) -> Vector:
    """Canonical representative of ``v`` modulo the span of an RREF basis."""
    w = [x % p for x in v]
    for row, c in zip(basis, pivots):
        coeff = w[c]
        if coeff:
            w = [(a - coeff * b) % p for a, b in zip(w, row)]
    return tuple(w)


def in_span(v: Sequence[int], basis: Sequence[Vector], pivots: Sequence[int], p: int) -> bool:
    return not any(reduce_mod_span(v, basis, pivots, p))


def extend_basis(
    basis: Sequence[Sequence[int]], candidates: Sequence[Sequence[int]], p: int, ncols: int
) -> list[Vector]:
    """Greedily append candidates (in the given order) that raise the rank.

    Returns only the appended vectors.
    """
    current = [tuple(x % p for x in b) for b in basis]
    red, piv = rref(current, p, ncols)
    added: list[Vector] = []
    for c in candidates:
        v = tuple(x % p for x in c)
        if in_span(v, red, piv, p):
            continue
        current.append(v)
        added.append(v)
        red, piv = rref(current, p, ncols)
        if len(piv) == ncols:
            break
    return added


def nullspace(matrix: Sequence[Sequence[int]], p: int, ncols: int) -> list[Vector]:
    """Basis (RREF) of {v : M v = 0} over F_p."""
    if not matrix:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    ns = _dm(matrix, p, ncols).nullspace()
    rows = _to_int_rows(ns, p) if ns.shape[0] else []
    return span_basis(rows, p, ncols)


def solve(columns: Sequence[Sequence[int]], target: Sequence[int], p: int) -> list[int] | None:
    """Coefficients c with sum c_i columns_i = target over F_p, or None."""
    n = len(target)
    if not columns:
        return [] if not any(x % p for x in target) else None
    k = len(columns)
    aug = [[columns[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    reduced, pivots = rref(aug, p, k + 1)
    if k in pivots:
        return None
    coeffs = [0] * k
    for row, c in zip(reduced, pivots):
        coeffs[c] = row[k] % p
    return coeffs


def mat_vec(m: Sequence[Sequence[int]], v: Sequence[int], p: int) -> Vector:
    return tuple(sum(a * b for a, b in zip(row, v)) % p for row in m)


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % p for col in cols] for row in a]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_pow(m: Sequence[Sequence[int]], k: int, p: int) -> list[list[int]]:
    result = identity(len(m))
    base = [list(r) for r in m]
    while k:
        if k & 1:
            result = mat_mul(result, base, p)
        base = mat_mul(base, base, p)
        k >>= 1
    return result


def det_mod(m: Sequence[Sequence[int]], p: int) -> int:
    if not m:
        return 1
    return int(_dm(m, p, len(m)).det()) % p


def smith(m: Sequence[Sequence[int]]) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Smith form over Z: returns (diagonal, U, V) with U * M * V = D.

    The diagonal has length ``min(rows, cols)``; U is rows x rows.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if rows == 0 or cols == 0:
        return [], identity(rows), identity(cols)
    M = Matrix(m)
    D, U, V = smith_normal_decomp(M, domain=ZZ)
    diag = [int(abs(D[i, i])) for i in range(min(rows, cols))]
    # normalise signs so the diagonal is non-negative
    U = [[int(U[i, j]) for j in range(rows)] for i in range(rows)]
    for i in range(min(rows, cols)):
        if int(D[i, i]) < 0:
            U[i] = [-x for x in U[i]]
    V = [[int(V[i, j]) for j in range(cols)] for i in range(cols)]
    return diag, U, V
