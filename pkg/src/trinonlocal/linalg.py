"""Exact and modular elimination on sparse integer rows.

Rows are ``dict[int, int]`` mapping column index to a nonzero entry.  Three
routes compute rank:

* :class:`IntEchelon` - incremental fraction-free elimination over Z.  Each
  combination ``a*r - b*P`` is followed by division by the row content, so
  entries stay small and no rational ever appears.
* :class:`ModpEchelon` - the same sweep over GF(p).
* :func:`bareiss_rank` - dense one-step Bareiss on a list-of-lists matrix.

Pivoting is deterministic everywhere: a row is reduced against existing pivots
in increasing column order and its first surviving column becomes its pivot.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping

SparseRow = dict


def primitive(row: Mapping[int, int]) -> dict[int, int]:
    """Divide by the content and make the leading entry positive."""
    if not row:
        return {}
    g = reduce(gcd, row.values())
    lead = row[min(row)]
    if lead < 0:
        g = -abs(g)
    else:
        g = abs(g)
    if g == 1:
        return dict(row)
    return {c: x // g for c, x in row.items()}


def clear_denominators(row: Mapping[int, Fraction]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row with the same kernel."""
    items = {c: Fraction(x) for c, x in row.items() if x != 0}
    if not items:
        return {}
    den = reduce(lcm, (x.denominator for x in items.values()), 1)
    return primitive({c: int(x * den) for c, x in items.items()})


class IntEchelon:
    """Row echelon basis over the integers, grown one row at a time."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def nullity(self) -> int:
        return self.ncols - len(self.pivots)

    def reduce(self, row: Mapping[int, int]) -> dict[int, int]:
        r = {c: x for c, x in row.items() if x}
        heap = list(r)
        heapq.heapify(heap)
        pivots = self.pivots
        while heap:
            c = heapq.heappop(heap)
            b = r.get(c)
            if b is None:
                continue
            P = pivots.get(c)
            if P is None:
                continue
            a = P[c]
            g = gcd(a, b)
            ma, mb = a // g, b // g
            if ma != 1:
                for k in r:
                    r[k] *= ma
            for k, x in P.items():
                v = r.get(k)
                if v is None:
                    r[k] = -mb * x
                    heapq.heappush(heap, k)
                else:
                    v -= mb * x
                    if v:
                        r[k] = v
                    else:
                        del r[k]
            if r and ma != 1:
                r = primitive(r)
        return r

    def add(self, row: Mapping[int, int]) -> bool:
        """Insert ``row``; return True when it raised the rank."""
        r = self.reduce(row)
        if not r:
            return False
        r = primitive(r)
        self.pivots[min(r)] = r
        return True

    def kernel_basis(self) -> list[list[Fraction]]:
        """Rational basis of the right kernel, one vector per free column."""
        free = [c for c in range(self.ncols) if c not in self.pivots]
        order = sorted(self.pivots, reverse=True)
        basis = []
        for f in free:
            x: dict[int, Fraction] = {f: Fraction(1)}
            for c in order:
                P = self.pivots[c]
                s = sum((P[j] * x[j] for j in P if j != c and j in x), Fraction(0))
                if s:
                    x[c] = -s / P[c]
            basis.append([x.get(j, Fraction(0)) for j in range(self.ncols)])
        return basis


class ModpEchelon:
    """Row echelon basis over GF(p); pivot rows are kept monic."""

    def __init__(self, ncols: int, p: int):
        self.ncols = ncols
        self.p = p
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def nullity(self) -> int:
        return self.ncols - len(self.pivots)

    def add(self, row: Mapping[int, int]) -> bool:
        p = self.p
        r = {}
        for c, x in row.items():
            x %= p
            if x:
                r[c] = x
        heap = list(r)
        heapq.heapify(heap)
        pivots = self.pivots
        while heap:
            c = heapq.heappop(heap)
            b = r.get(c)
            if b is None:
                continue
            P = pivots.get(c)
            if P is None:
                continue
            for k, x in P.items():
                v = r.get(k)
                if v is None:
                    r[k] = (-b * x) % p
                    heapq.heappush(heap, k)
                else:
                    v = (v - b * x) % p
                    if v:
                        r[k] = v
                    else:
                        del r[k]
        if not r:
            return False
        lead = min(r)
        inv = pow(r[lead], -1, p)
        self.pivots[lead] = {k: (x * inv) % p for k, x in r.items()}
        return True


def rank_int(rows: Iterable[Mapping[int, int]], ncols: int) -> int:
    ech = IntEchelon(ncols)
    for r in rows:
        ech.add(r)
    return ech.rank


def rank_modp(rows: Iterable[Mapping[int, int]], ncols: int, p: int) -> int:
    ech = ModpEchelon(ncols, p)
    for r in rows:
        ech.add(r)
    return ech.rank


def bareiss_rank(matrix: list[list[int]]) -> int:
    """Rank of a dense integer matrix by fraction-free Bareiss elimination.

    Pivot: first nonzero entry at or below the current row, columns scanned
    left to right.  Every division in the update is exact.
    """
    A = [list(map(int, row)) for row in matrix]
    m = len(A)
    if m == 0:
        return 0
    n = len(A[0])
    prev = 1
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        Ar = A[r]
        for i in range(r + 1, m):
            Ai = A[i]
            f = Ai[c]
            for j in range(c + 1, n):
                Ai[j] = (p * Ai[j] - f * Ar[j]) // prev
            Ai[c] = 0
        prev = p
        r += 1
    return r


def to_dense(rows: Iterable[Mapping[int, int]], ncols: int) -> list[list[int]]:
    out = []
    for r in rows:
        line = [0] * ncols
        for c, x in r.items():
            line[c] = x
        out.append(line)
    return out
