"""Exact linear algebra over rationals: rank, nullity, nullspace.

Plain Gaussian elimination over :class:`fractions.Fraction`.  Intended for
desk-scale matrices (tens of rows); tolerance-free by construction.
"""

from __future__ import annotations

from fractions import Fraction


def as_rational_rows(matrix):
    """Copy an iterable-of-iterables into Fraction rows; raises on non-rationals."""
    rows = []
    for row in matrix:
        rows.append([x if isinstance(x, Fraction) else Fraction(x) for x in row])
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise ValueError("ragged matrix")
    return rows


def _eliminate(rows):
    """In-place row echelon reduction; returns the list of pivot columns."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = next((k for k in range(r, len(rows)) if rows[k][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def rank(matrix):
    rows = as_rational_rows(matrix)
    return len(_eliminate(rows))


def nullity(matrix):
    rows = as_rational_rows(matrix)
    if not rows:
        return 0
    return len(rows[0]) - len(_eliminate(rows))


def nullspace(matrix):
    """Deterministic nullspace basis: one vector per free column, unit there."""
    rows = as_rational_rows(matrix)
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = _eliminate(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -rows[r][fc]
        basis.append(tuple(vec))
    return basis


def matmul(a, b):
    """Exact product of Fraction matrices (lists of rows)."""
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def solve_in_span(basis_rows, target):
    """Whether ``target`` lies in the row span of ``basis_rows`` (all exact)."""
    rows = as_rational_rows(basis_rows)
    r0 = len(_eliminate(rows)) if rows else 0
    rows2 = as_rational_rows(list(basis_rows) + [list(target)])
    return len(_eliminate(rows2)) == r0
