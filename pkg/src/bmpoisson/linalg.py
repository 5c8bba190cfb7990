"""Exact linear algebra over Q on lists of Fraction rows."""

from __future__ import annotations

from fractions import Fraction


def to_fractions(rows):
    return [[Fraction(v) for v in row] for row in rows]


def rref(rows, ncols: int | None = None):
    """Reduced row echelon form with full-magnitude pivoting within each column.

    Returns ``(reduced_rows, pivot_columns)``.
    """
    a = to_fractions(rows)
    if not a:
        return [], []
    ncols = len(a[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(a):
            break
        best = max(range(r, len(a)), key=lambda i: abs(a[i][c]))
        if a[best][c] == 0:
            continue
        a[r], a[best] = a[best], a[r]
        piv = a[r][c]
        a[r] = [v / piv for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref(rows)[1])


def transpose(rows, ncols: int | None = None):
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def matmul(a, b):
    if not a or not b:
        ncols = len(b[0]) if b else 0
        return [[Fraction(0)] * ncols for _ in a]
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def nullspace(rows, ncols: int):
    """Basis of {v : A v = 0}, one vector per free column, in RREF normal form."""
    if not rows:
        basis = []
        for j in range(ncols):
            v = [Fraction(0)] * ncols
            v[j] = Fraction(1)
            basis.append(v)
        return basis
    red, pivots = rref(rows, ncols)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def column_space(rows, ncols: int):
    """Basis of the column space, as the pivot columns of the matrix."""
    if not rows:
        return []
    _, pivots = rref(rows, ncols)
    return [[row[p] for row in rows] for p in pivots]


def extend_independent(span, candidates):
    """Greedily pick candidates that are independent modulo ``span``.

    Returns the chosen candidate vectors (not the span).
    """
    current = [list(v) for v in span]
    r = rank(current) if current else 0
    chosen = []
    for v in candidates:
        trial = current + [list(v)]
        rt = rank(trial)
        if rt > r:
            current, r = trial, rt
            chosen.append(list(v))
    return chosen


def in_span(span, v) -> bool:
    if not any(v):
        return True
    if not span:
        return False
    return rank(list(span) + [list(v)]) == rank(list(span))


def symmetric_signature(m):
    """(positive, negative, zero) inertia of a symmetric rational matrix via
    congruence diagonalization (Sylvester's law of inertia)."""
    a = to_fractions(m)
    n = len(a)
    diag = []
    active = list(range(n))
    while active:
        # find a nonzero diagonal pivot
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            # all active diagonals zero: look for an off-diagonal entry
            pair = next(((i, j) for i in active for j in active if i < j and a[i][j] != 0), None)
            if pair is None:
                diag.extend([Fraction(0)] * len(active))
                break
            i, j = pair
            # replace row/col i by row/col i + row/col j; the new (i, i) is 2 a_ij != 0
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        p = a[piv][piv]
        rest = [i for i in active if i != piv]
        for i in rest:
            f = a[i][piv] / p
            if f:
                for k in range(n):
                    a[i][k] -= f * a[piv][k]
                for k in range(n):
                    a[k][i] -= f * a[k][piv]
        diag.append(p)
        active = rest
    pos = sum(1 for d in diag if d > 0)
    neg = sum(1 for d in diag if d < 0)
    return pos, neg, n - pos - neg
