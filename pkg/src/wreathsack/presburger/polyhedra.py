"""Integer points of a conjunction of linear constraints as a hybrid linear set.

The solution set of ``A x = b`` together with congruences is a translated
lattice ``x0 + N z``.  In lattice coordinates the inequalities (including
``x >= 0``) cut out a pointed polyhedron ``P``; with extreme rays ``r_i`` every
integer point of ``P`` is ``b + sum n_i r_i`` for a base point ``b`` inside
``vertices + sum [0, 1) r_i``, which is a bounded box that we enumerate.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Vector = Tuple[int, ...]


class ExtractionLimitError(RuntimeError):
    """The base-point box is too large to enumerate."""


BOX_LIMIT = 2_000_000


def _ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def column_echelon(A: List[List[int]]) -> Tuple[List[List[int]], List[List[int]], int]:
    """Return (H, U, r) with A U = H, U unimodular, H's first r columns echelon, rest zero."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    H = [row[:] for row in A]
    U = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def colop(i: int, j: int, a: int, b: int, c: int, d: int) -> None:
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for M in (H, U):
            for row in M:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + d * y

    r = 0
    for i in range(rows):
        if r >= cols:
            break
        for j in range(r + 1, cols):
            if H[i][j] == 0:
                continue
            a, b = H[i][r], H[i][j]
            g, s, t = _ext_gcd(a, b)
            colop(r, j, s, t, -b // g, a // g)
        if H[i][r] != 0:
            if H[i][r] < 0:
                colop(r, r, -1, 0, -1, 0)
            r += 1
    return H, U, r


def solve_lattice(A: List[List[int]], b: List[int], nvars: int) -> Optional[Tuple[Vector, List[Vector]]]:
    """Integer solutions of ``A v = b``, projected onto the first ``nvars`` coordinates.

    Returns ``(x0, basis)`` with the projected solutions equal to ``x0 + Z basis``
    (basis linearly independent), or None if there is no integer solution.
    """
    cols = len(A[0]) if A else nvars
    if not A:
        return tuple([0] * nvars), [tuple(int(i == j) for i in range(nvars)) for j in range(nvars)]
    H, U, r = column_echelon(A)
    # forward substitution on the echelon part
    y = [0] * cols
    k = 0
    for i, row in enumerate(H):
        acc = b[i] - sum(row[j] * y[j] for j in range(k))
        if k < r and row[k] != 0:
            if acc % row[k]:
                return None
            y[k] = acc // row[k]
            k += 1
        elif acc != 0:
            return None
    x0 = tuple(sum(U[i][j] * y[j] for j in range(r)) for i in range(nvars))
    gens = [[U[i][j] for i in range(nvars)] for j in range(r, cols)]
    if not gens:
        return x0, []
    # basis of the lattice generated by gens: column echelon of the nvars x g matrix
    G = [[gens[j][i] for j in range(len(gens))] for i in range(nvars)]
    HG, _, rg = column_echelon(G)
    basis = [tuple(HG[i][j] for i in range(nvars)) for j in range(rg)]
    return x0, basis


def _solve_square(M: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    n = len(M)
    A = [row[:] + [rhs[i]] for i, row in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return None
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c] / piv
                A[r] = [a - f * bb for a, bb in zip(A[r], A[c])]
    return [A[i][n] / A[i][i] for i in range(n)]


def _nullspace_1d(M: List[List[int]], n: int) -> Optional[List[Fraction]]:
    """A spanning vector of the nullspace of M when it is one-dimensional."""
    A = [[Fraction(v) for v in row] for row in M]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        A[r] = [v / piv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * bb for a, bb in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        return None
    f = free[0]
    v = [Fraction(0)] * n
    v[f] = Fraction(1)
    for i, c in enumerate(pivots):
        v[c] = -A[i][f]
    return v


def _primitive(v: Sequence[Fraction]) -> Vector:
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return tuple(x // g for x in ints)




def vertices_and_rays(G: List[List[int]], h: List[int], m: int):
    """Vertices and extreme rays of the pointed polyhedron {z : G z <= h} in R^m."""
    nrows = len(G)
    verts = set()
    for idx in itertools.combinations(range(nrows), m):
        M = [[Fraction(v) for v in G[i]] for i in idx]
        sol = _solve_square(M, [Fraction(h[i]) for i in idx])
        if sol is None:
            continue
        if all(sum(G[i][j] * sol[j] for j in range(m)) <= h[i] for i in range(nrows)):
            verts.add(tuple(sol))
    rays = set()
    if m == 1:
        for d in (1, -1):
            if all(row[0] * d <= 0 for row in G):
                rays.add((d,))
    else:
        for idx in itertools.combinations(range(nrows), m - 1):
            v = _nullspace_1d([G[i] for i in idx], m)
            if v is None:
                continue
            for s in (1, -1):
                w = [s * x for x in v]
                if all(sum(G[i][j] * w[j] for j in range(m)) <= 0 for i in range(nrows)):
                    rays.add(_primitive(w))
    return sorted(verts), sorted(rays)


def integer_hull_decomposition(G: List[List[int]], h: List[int], m: int) -> Tuple[List[Vector], List[Vector]]:
    """(bases, rays) with {z in Z^m : G z <= h} = union of b + N rays."""
    if m == 0:
        return ([()] if all(x >= 0 for x in h) else []), []
    verts, rays = vertices_and_rays(G, h, m)
    if not verts:
        return [], []
    lo = [min(v[j] for v in verts) for j in range(m)]
    hi = [max(v[j] for v in verts) for j in range(m)]
    for r in rays:
        for j in range(m):
            if r[j] < 0:
                lo[j] += r[j]
            else:
                hi[j] += r[j]
    ranges = [range(math.ceil(lo[j]), math.floor(hi[j]) + 1) for j in range(m)]
    volume = 1
    for r in ranges:
        volume *= max(len(r), 0)
    if volume > BOX_LIMIT:
        raise ExtractionLimitError(f"base box of {volume} points")

    def inside(z) -> bool:
        return all(sum(row[j] * z[j] for j in range(m)) <= hh for row, hh in zip(G, h))

    bases = []
    for z in _box_points(G, h, ranges):
        if all(not inside(tuple(zj - rj for zj, rj in zip(z, r))) for r in rays):
            bases.append(z)
    return bases, rays


def _box_points(G, h, ranges):
    """Integer points of the box satisfying G z <= h, pruning on prefix bounds."""
    m = len(ranges)
    # rows usable for pruning once the first k coordinates are fixed
    lo_rest = []
    for row in G:
        tail = []
        for k in range(m + 1):
            s = 0
            for j in range(k, m):
                c = row[j]
                s += c * (ranges[j].start if c > 0 else ranges[j].stop - 1) if len(ranges[j]) else 0
            tail.append(s)
        lo_rest.append(tail)

    out = []
    z = [0] * m

    def rec(k: int, partial: List[int]) -> None:
        for i, row in enumerate(G):
            if partial[i] + lo_rest[i][k] > h[i]:
                return
        if k == m:
            out.append(tuple(z))
            return
        for v in ranges[k]:
            z[k] = v
            rec(k + 1, [p + row[k] * v for p, row in zip(partial, G)])

    rec(0, [0] * len(G))
    return out


def conjunction_to_linear_sets(
    nvars: int,
    equalities: Sequence[Tuple[Sequence[int], int]],
    inequalities: Sequence[Tuple[Sequence[int], int]],
    congruences: Sequence[Tuple[int, Sequence[int], int]],
) -> List[Tuple[Vector, List[Vector]]]:
    """Natural solutions of the constraints as a list of (base, periods).

    equalities: ``a . x + c = 0``; inequalities: ``a . x + c <= 0``;
    congruences: ``d | a . x + c``.  Variables are implicitly non-negative.
    """
    ncong = len(congruences)
    A: List[List[int]] = []
    b: List[int] = []
    for a, c in equalities:
        A.append(list(a) + [0] * ncong)
        b.append(-c)
    for k, (d, a, c) in enumerate(congruences):
        row = list(a) + [0] * ncong
        row[nvars + k] = -d
        A.append(row)
        b.append(-c)
    lat = solve_lattice(A, b, nvars) if A else (tuple([0] * nvars), [tuple(int(i == j) for i in range(nvars)) for j in range(nvars)])
    if lat is None:
        return []
    x0, basis = lat
    m = len(basis)
    G: List[List[int]] = []
    h: List[int] = []
    rows = [(list(a), c) for a, c in inequalities]
    for i in range(nvars):
        e = [0] * nvars
        e[i] = -1
        rows.append((e, 0))
    seen = set()
    for a, c in rows:
        gz = [sum(a[i] * basis[j][i] for i in range(nvars)) for j in range(m)]
        rhs = -c - sum(a[i] * x0[i] for i in range(nvars))
        if not any(gz):
            if rhs < 0:
                return []
            continue
        g = 0
        for v in gz:
            g = math.gcd(g, v)
        gz = [v // g for v in gz]
        rhs = rhs // g
        key = tuple(gz)
        if key in seen:
            # keep the tighter copy
            idx = next(i for i, row in enumerate(G) if tuple(row) == key)
            h[idx] = min(h[idx], rhs)
            continue
        seen.add(key)
        G.append(gz)
        h.append(rhs)
    bases, rays = integer_hull_decomposition(G, h, m)

    def to_x(z) -> Vector:
        return tuple(x0[i] + sum(basis[j][i] * z[j] for j in range(m)) for i in range(nvars))

    def dir_x(r) -> Vector:
        return tuple(sum(basis[j][i] * r[j] for j in range(m)) for i in range(nvars))

    periods = [dir_x(r) for r in rays]
    return [(to_x(z), periods) for z in bases]
