"""Sparse exact linear algebra over the rationals.

Just enough for the package: rank and nullspace bases of sparse constraint
systems (rows are {column: coefficient} dicts), and small dense inverses.
Pivoting is deterministic (smallest column first, rows in given order) so
cached bases and seeded samples are reproducible.
"""

from __future__ import annotations

from equicurv._rational import Q


def _eliminate(rows):
    """Forward elimination; returns {pivot_col: monic reduced row}."""
    pivots = {}
    for row in rows:
        r = {c: Q(v) for c, v in row.items() if v}
        while r:
            col = min(r)
            piv = pivots.get(col)
            if piv is None:
                inv = 1 / r[col]
                pivots[col] = {c: v * inv for c, v in r.items()}
                break
            factor = r[col]
            for c, v in piv.items():
                s = r.get(c, Q(0)) - factor * v
                if s:
                    r[c] = s
                elif c in r:
                    del r[c]
    return pivots


def rank(rows, ncols):
    """Rank of the sparse row system (ncols only bounds the column range)."""
    return len(_eliminate(rows))


def nullspace(rows, ncols):
    """Basis of {x : row . x = 0 for all rows}, as {column: value} dicts.

    One basis vector per free column, with a 1 in the free column; entries
    are exact rationals.  Deterministic for a fixed row order.
    """
    pivots = _eliminate(rows)
    # back-substitute so each pivot row touches no other pivot column
    for col in sorted(pivots, reverse=True):
        row = pivots[col]
        for other_col in sorted(pivots):
            if other_col == col:
                continue
            other = pivots[other_col]
            f = other.get(col)
            if not f:
                continue
            for c, v in row.items():
                s = other.get(c, Q(0)) - f * v
                if s:
                    other[c] = s
                elif c in other:
                    del other[c]
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free_cols:
        vec = {f: Q(1)}
        for pcol, prow in pivots.items():
            v = prow.get(f)
            if v:
                vec[pcol] = -v
        basis.append(vec)
    return basis


def invert_matrix(rows):
    """Inverse of a small dense rational matrix; raises on singular input."""
    m = len(rows)
    aug = [[Q(rows[i][j]) for j in range(m)] + [Q(1) if j == i else Q(0) for j in range(m)]
           for i in range(m)]
    for col in range(m):
        pivot_row = next((r for r in range(col, m) if aug[r][col]), None)
        if pivot_row is None:
            raise ValueError("matrix is singular")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[m:] for row in aug]
