"""Exact linear algebra on sparse rows over Q(i).

Rows are dicts ``{column: GaussianRational}``.  Real matrices go through
python-flint; matrices with imaginary entries are realified for ranks
(the real rank is twice the complex one) and eliminated directly otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import flint

from .scalars import ONE, GaussianRational


def _is_real(rows) -> bool:
    return all(not c.im for row in rows for c in row.values())


def _int_rows(rows):
    """Scale each real row to integers (row scaling keeps the rank)."""
    out = []
    for row in rows:
        if not row:
            continue
        den = 1
        for c in row.values():
            den = lcm(den, c.re.denominator)
        out.append({j: int(c.re * den) for j, c in row.items()})
    return out


def _fmpz_rank(int_rows, ncols) -> int:
    if not int_rows or ncols == 0:
        return 0
    cols = sorted({j for row in int_rows for j in row})
    remap = {j: k for k, j in enumerate(cols)}
    M = flint.fmpz_mat(len(int_rows), len(cols))
    for i, row in enumerate(int_rows):
        for j, v in row.items():
            M[i, remap[j]] = v
    return M.rank()


def rank(rows, ncols: int) -> int:
    rows = [r for r in rows if r]
    if not rows:
        return 0
    if _is_real(rows):
        return _fmpz_rank(_int_rows(rows), ncols)
    real = []
    for row in rows:
        r1, r2 = {}, {}
        for j, c in row.items():
            if c.re:
                r1[j] = GaussianRational(c.re)
                r2[j + ncols] = GaussianRational(c.re)
            if c.im:
                r1[j + ncols] = GaussianRational(-c.im)
                r2[j] = GaussianRational(c.im)
        real.extend([r1, r2])
    return _fmpz_rank(_int_rows(real), 2 * ncols) // 2


def _rref_flint(rows, ncols):
    M = flint.fmpq_mat(len(rows), ncols)
    for i, row in enumerate(rows):
        for j, c in row.items():
            M[i, j] = flint.fmpq(c.re.numerator, c.re.denominator)
    R, rk = M.rref()
    out, pivots = [], []
    for i in range(rk):
        row = {}
        for j in range(ncols):
            v = R[i, j]
            if v != 0:
                row[j] = GaussianRational(Fraction(int(v.p), int(v.q)))
        pivots.append(min(row))
        out.append(row)
    return out, pivots


def _rref_python(rows, ncols):
    work = [dict(r) for r in rows if r]
    out, pivots = [], []
    for col in range(ncols):
        pivot = next((r for r in work if col in r), None)
        if pivot is None:
            continue
        work.remove(pivot)
        inv = pivot[col].inverse()
        pivot = {j: c * inv for j, c in pivot.items()}
        for target in work + out:
            f = target.get(col)
            if f:
                for j, c in pivot.items():
                    v = target.get(j, GaussianRational(0)) - f * c
                    if v:
                        target[j] = v
                    else:
                        target.pop(j, None)
        out.append(pivot)
        pivots.append(col)
    order = sorted(range(len(pivots)), key=pivots.__getitem__)
    return [out[k] for k in order], [pivots[k] for k in order]


def rref(rows, ncols: int):
    """Reduced row echelon form: ``(rows, pivot_columns)``, pivots ascending."""
    rows = [r for r in rows if r]
    if not rows:
        return [], []
    if _is_real(rows):
        return _rref_flint(rows, ncols)
    return _rref_python(rows, ncols)


def nullspace(rows, ncols: int) -> list:
    """Basis of ``{x : row . x = 0 for every row}``, one vector per free column.

    Each basis vector has a 1 in its free column and zeros in the other free
    columns, so the basis is canonical for the column order.
    """
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = {free: ONE}
        for row, p in zip(reduced, pivots):
            c = row.get(free)
            if c:
                vec[p] = -c
        basis.append(vec)
    return basis


def in_span(vector, rows, ncols: int) -> bool:
    return rank(list(rows) + [vector], ncols) == rank(rows, ncols)


def matmul_sparse(A, B):
    """Compose sparse row matrices: rows of ``A`` index columns of ``B`` rows."""
    out = []
    for row in A:
        acc = {}
        for k, a in row.items():
            for j, b in B[k].items():
                acc[j] = acc.get(j, GaussianRational(0)) + a * b
        out.append({j: c for j, c in acc.items() if c})
    return out
