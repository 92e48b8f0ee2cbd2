"""Exact integer linear algebra on sparse boundary-style matrices.

Sparse matrices are ``dict[int, dict[int, int]]`` keyed by row then column.
Elimination runs on unit pivots first (boundary matrices are mostly +-1, so
nearly everything is cleared there) and hands the small leftover block to a
dense Smith normal form over Python integers.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd


def dense_to_sparse(matrix):
    out = {}
    for i, row in enumerate(matrix):
        r = {j: int(v) for j, v in enumerate(row) if v}
        if r:
            out[i] = r
    return out


def smith_normal_form(matrix, transforms=False):
    """Dense Smith normal form of an integer matrix (list of lists).

    Returns the diagonal ``d`` (nonzero invariant factors, each dividing the
    next).  With ``transforms=True`` also returns unimodular ``U`` and ``V``
    such that ``U @ matrix @ V`` is diagonal with entries ``d``.
    """
    a = [[int(x) for x in row] for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        if k:
            ra, rs = a[dst], a[src]
            for j in range(n):
                if rs[j]:
                    ra[j] += k * rs[j]
            if U is not None:
                ua, us = U[dst], U[src]
                for j in range(m):
                    if us[j]:
                        ua[j] += k * us[j]

    def add_col(dst, src, k):
        if k:
            for row in a:
                if row[src]:
                    row[dst] += k * row[src]
            if V is not None:
                for row in V:
                    if row[src]:
                        row[dst] += k * row[src]

    diag = []
    t = 0
    while t < min(m, n):
        # smallest nonzero entry in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    add_row(i, t, -q)
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    add_col(j, t, -q)
                    if a[t][j]:
                        done = False
            if not done:
                # move a smaller remainder into the pivot slot and retry
                best = None
                for i in range(t, m):
                    if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                        best = (abs(a[i][t]), i, t)
                for j in range(t, n):
                    if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                        best = (abs(a[t][j]), t, j)
                _, i, j = best
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            # divisibility of the trailing block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        diag.append(a[t][t])
        t += 1
    if transforms:
        return diag, U, V
    return diag


class _Eliminator:
    """Forward elimination of a sparse integer matrix on unit pivots."""

    def __init__(self, rows, ncols, rhs=None):
        self.rows = {r: dict(v) for r, v in rows.items() if v}
        self.ncols = ncols
        self.rhs = dict(rhs) if rhs is not None else None
        self.cols = {}
        for r, row in self.rows.items():
            for c in row:
                self.cols.setdefault(c, set()).add(r)
        self.pivots = []  # (row, col, row entries at pivot time, rhs value)

    def _unit_row(self, c):
        best = None
        for r in self.cols.get(c, ()):
            v = self.rows[r][c]
            if v == 1 or v == -1:
                ln = len(self.rows[r])
                if best is None or ln < best[0] or (ln == best[0] and r < best[1]):
                    best = (ln, r)
        return None if best is None else best[1]

    def run(self):
        heap = [(len(s), c) for c, s in self.cols.items()]
        heapq.heapify(heap)
        stuck = set()
        while heap:
            cnt, c = heapq.heappop(heap)
            s = self.cols.get(c)
            if not s:
                continue
            if cnt != len(s):
                heapq.heappush(heap, (len(s), c))
                continue
            r = self._unit_row(c)
            if r is None:
                stuck.add(c)
                continue
            self._pivot(r, c, heap, stuck)
        return self

    def _pivot(self, r, c, heap, stuck):
        prow = self.rows.pop(r)
        for cc in prow:
            self.cols[cc].discard(r)
        p = prow[c]
        brow = self.rhs.pop(r, 0) if self.rhs is not None else 0
        self.pivots.append((r, c, prow, brow))
        touched = set()
        for r2 in list(self.cols.get(c, ())):
            row2 = self.rows[r2]
            k = row2[c] * p  # p is +-1, so dividing by p equals multiplying
            for cc, v in prow.items():
                nv = row2.get(cc, 0) - k * v
                if nv:
                    if cc not in row2:
                        self.cols.setdefault(cc, set()).add(r2)
                    row2[cc] = nv
                else:
                    if cc in row2:
                        del row2[cc]
                        self.cols[cc].discard(r2)
                touched.add(cc)
            if self.rhs is not None and brow:
                nb = self.rhs.get(r2, 0) - k * brow
                if nb:
                    self.rhs[r2] = nb
                else:
                    self.rhs.pop(r2, None)
            if not row2:
                del self.rows[r2]
        self.cols.pop(c, None)
        for cc in touched:
            s = self.cols.get(cc)
            if s:
                if cc in stuck:
                    stuck.discard(cc)
                heapq.heappush(heap, (len(s), cc))

    def remainder(self):
        rows = sorted(r for r, v in self.rows.items() if v)
        cols = sorted({c for r in rows for c in self.rows[r]})
        dense = [[self.rows[r].get(c, 0) for c in cols] for r in rows]
        return rows, cols, dense


def invariant_factors(rows, ncols):
    """Rank and the invariant factors > 1 of a sparse integer matrix."""
    el = _Eliminator(rows, ncols).run()
    rank = len(el.pivots)
    _, _, dense = el.remainder()
    torsion = []
    if dense:
        diag = smith_normal_form(dense)
        rank += len(diag)
        torsion = [d for d in diag if d > 1]
    return rank, torsion


def solve_integer(rows, ncols, rhs):
    """Find an integer ``x`` with ``M x = rhs`` (sparse ``M``, dict ``rhs``).

    Returns a dict ``{col: value}`` or ``None`` when no integer solution
    exists.
    """
    return _solve(rows, ncols, rhs, rational=False)


def solve_rational(rows, ncols, rhs):
    """Same as :func:`solve_integer` over the rationals (values are Fractions)."""
    return _solve(rows, ncols, rhs, rational=True)


def _solve(rows, ncols, rhs, rational):
    el = _Eliminator(rows, ncols, {r: v for r, v in rhs.items() if v}).run()
    rrows, rcols, dense = el.remainder()
    x = {}
    covered = set(el.rows)
    for r, b in el.rhs.items():
        if b and r not in covered:
            return None
    if dense:
        b = [el.rhs.get(r, 0) for r in rrows]
        y = _dense_solve(dense, b, rational)
        if y is None:
            return None
        for c, v in zip(rcols, y):
            if v:
                x[c] = v
    for r, c, prow, brow in reversed(el.pivots):
        acc = brow
        for cc, v in prow.items():
            if cc != c and cc in x:
                acc -= v * x[cc]
        val = acc * prow[c]  # unit pivot
        if val:
            x[c] = val
    return x


def _dense_solve(a, b, rational):
    if rational:
        return _fraction_solve(a, b)
    d, U, V = smith_normal_form(a, transforms=True)
    m = len(a)
    n = len(a[0])
    ub = [sum(U[i][k] * b[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i, di in enumerate(d):
        if ub[i] % di:
            return None
        y[i] = ub[i] // di
    if any(ub[i] for i in range(len(d), m)):
        return None
    return [sum(V[i][k] * y[k] for k in range(n)) for i in range(n)]


def _fraction_solve(a, b):
    m = len(a)
    n = len(a[0])
    aug = [[Fraction(v) for v in row] + [Fraction(bv)] for row, bv in zip(a, b)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [vi - f * vr for vi, vr in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    if any(aug[i][n] != 0 for i in range(r, m)):
        return None
    y = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        y[c] = aug[i][n]
    return y


def exact_inverse(matrix):
    """Inverse of a small square integer matrix as Fractions; None if singular."""
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            return None
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [v / pv for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [vi - f * vc for vi, vc in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def exact_det(matrix):
    """Determinant of a small integer matrix (Bareiss, exact)."""
    a = [[int(v) for v in row] for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def vector_gcd(values):
    g = 0
    for v in values:
        g = gcd(g, abs(int(v)))
    return g
