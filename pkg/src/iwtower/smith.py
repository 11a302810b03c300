"""Exact integer matrices, Smith normal form and abelian group invariants."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod
from typing import Iterable, Sequence

from .padic import vp


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]


def _as_rows(M) -> list[list[int]]:
    if isinstance(M, IntMatrix):
        return M.to_rows()
    return [list(map(int, r)) for r in M]


def smith_form(M, rows: int | None = None, cols: int | None = None, transforms: bool = False):
    """Diagonalize ``M`` by unimodular row and column operations.

    Returns ``(diag, U, V)`` with ``U @ M @ V`` diagonal; ``diag`` has
    min(rows, cols) entries and satisfies the divisibility chain (zeros
    last).  ``U`` and ``V`` are only built when ``transforms`` is set.
    The pivot is always a nonzero entry of minimal absolute value.
    """
    A = _as_rows(M)
    m = len(A) if rows is None else rows
    n = (len(A[0]) if A else 0) if cols is None else cols
    if not A:
        A = [[0] * n for _ in range(m)]
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        if V:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        if q:
            rs, rd = A[src], A[dst]
            for c in range(n):
                if rs[c]:
                    rd[c] -= q * rs[c]
            if U:
                us, ud = U[src], U[dst]
                for c in range(m):
                    ud[c] -= q * us[c]

    def add_col(dst, src, q):  # col dst -= q * col src
        if q:
            for r in A:
                if r[src]:
                    r[dst] -= q * r[src]
            if V:
                for r in V:
                    r[dst] -= q * r[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // piv)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // piv)
                    if A[t][j]:
                        done = False
            if done:
                # divisibility: pivot must divide the remaining block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if A[i][j] % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(t, bad, -1)
                continue
            # move the smallest remaining entry of row/col t into the pivot
            cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
            cand += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
            _, i, j = min(cand)
            swap_rows(t, i)
            swap_cols(t, j)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if U:
                U[t] = [-x for x in U[t]]
        t += 1
    diag = [A[i][i] for i in range(min(m, n))]
    return diag, U, V


@dataclass(frozen=True)
class AbelianGroup:
    """Invariant factors d1 | d2 | ... followed by zeros for free summands."""

    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        fs = self.invariant_factors
        tors = [d for d in fs if d != 0]
        if any(d < 2 for d in tors):
            raise ValueError("invariant factors must be >= 2 or 0")
        if any(b % a for a, b in zip(tors, tors[1:])):
            raise ValueError("divisibility chain violated")
        if 0 in fs and any(d != 0 for d in fs[fs.index(0):]):
            raise ValueError("free summands must come last")

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "AbelianGroup":
        """Normalize an arbitrary direct sum of cyclic groups Z/d (d=0 for Z)."""
        orders = [abs(int(d)) for d in orders if abs(int(d)) != 1]
        free = orders.count(0)
        tors = [d for d in orders if d]
        if len(tors) > 1:
            diag, _, _ = smith_form([[d if i == j else 0 for j in range(len(tors))] for i, d in enumerate(tors)])
            tors = [d for d in diag if d != 1]
        return cls(tuple(tors) + (0,) * free)

    @property
    def free_rank(self) -> int:
        return self.invariant_factors.count(0)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d)

    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        return prod(self.torsion)

    def p_rank(self, p: int) -> int:
        return sum(1 for d in self.torsion if d % p == 0) + self.free_rank

    def __str__(self):
        if not self.invariant_factors:
            return "0"
        parts = []
        for d in sorted(set(self.invariant_factors), key=lambda x: (x == 0, x)):
            c = self.invariant_factors.count(d)
            base = "Z" if d == 0 else f"Z/{d}"
            parts.append(base if c == 1 else f"({base})^{c}")
        return " + ".join(parts)


def smith_normal_form(M, rows: int | None = None, cols: int | None = None) -> tuple[AbelianGroup, list[int]]:
    """Cokernel of ``M: Z^cols -> Z^rows`` together with the SNF diagonal."""
    A = _as_rows(M)
    m = len(A) if rows is None else rows
    diag, _, _ = smith_form(A, m, cols)
    rank = sum(1 for d in diag if d)
    factors = [d for d in diag if d > 1] + [0] * (m - rank)
    return AbelianGroup(tuple(factors)), diag


def p_part(g: AbelianGroup, p: int) -> AbelianGroup:
    tors = [p ** vp(d, p) for d in g.torsion if d % p == 0]
    return AbelianGroup(tuple(sorted(tors)) + (0,) * g.free_rank)


def p_exponent(g: AbelianGroup, p: int) -> int | None:
    """Exponent e with #(g tensor Z_p) = p^e; None when g has free part."""
    if g.free_rank:
        return None
    return sum(vp(d, p) for d in g.torsion)


# --- lattice helpers (columns span lattices) -------------------------------

def matmul(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    if not A:
        return []
    n = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [0] * n
        for k, a in enumerate(row):
            if a:
                bk = B[k]
                for j in range(n):
                    acc[j] += a * bk[j]
        out.append(acc)
    return out


def transpose(A: list[list[int]], rows: int | None = None) -> list[list[int]]:
    if not A:
        return [[] for _ in range(rows or 0)]
    return [list(c) for c in zip(*A)]


def kernel_basis(A: list[list[int]], cols: int) -> list[list[int]]:
    """Z-basis (as column vectors, returned as a list) of {x : A x = 0}."""
    if not A:
        return [[int(i == j) for i in range(cols)] for j in range(cols)]
    diag, _, V = smith_form(A, len(A), cols, transforms=True)
    rank = sum(1 for d in diag if d)
    return [[V[i][j] for i in range(cols)] for j in range(rank, cols)]


def column_hnf_basis(gens: list[list[int]], dim: int) -> list[list[int]]:
    """A basis of the lattice spanned by ``gens`` (vectors of length dim)."""
    if not gens:
        return []
    # column operations on the dim x len(gens) matrix: use row ops on transpose
    rows = [list(g) for g in gens]
    basis = []
    col = 0
    r0 = 0
    while col < dim and r0 < len(rows):
        nz = [i for i in range(r0, len(rows)) if rows[i][col]]
        if not nz:
            col += 1
            continue
        while True:
            nz = [i for i in range(r0, len(rows)) if rows[i][col]]
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r0], rows[piv] = rows[piv], rows[r0]
            others = [i for i in range(r0 + 1, len(rows)) if rows[i][col]]
            if not others:
                break
            for i in others:
                q = rows[i][col] // rows[r0][col]
                if q:
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r0])]
        basis.append(rows[r0])
        r0 += 1
        col += 1
    return basis


def solve_in_lattice(basis: list[list[int]], v: list[int]) -> list[int] | None:
    """Integer coordinates c with sum c_i basis_i = v, or None if v is outside."""
    if not basis:
        return [] if all(x == 0 for x in v) else None
    dim = len(v)
    B = [[b[i] for b in basis] for i in range(dim)]  # dim x k
    diag, U, V = smith_form(B, dim, len(basis), transforms=True)
    w = [sum(U[i][j] * v[j] for j in range(dim)) for i in range(dim)]
    y = []
    for i in range(len(basis)):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if w[i] != 0:
                return None
            y.append(0)
        else:
            if w[i] % d:
                return None
            y.append(w[i] // d)
    if any(w[i] for i in range(len(basis), dim)):
        return None
    return [sum(V[i][j] * y[j] for j in range(len(basis))) for i in range(len(basis))]


def lattice_quotient(outer: list[list[int]], inner_gens: list[list[int]]) -> AbelianGroup:
    """Structure of L/J where ``outer`` is a basis of L and J is spanned by inner_gens ⊆ L."""
    k = len(outer)
    coords = []
    for g in inner_gens:
        c = solve_in_lattice(outer, g)
        if c is None:
            raise ValueError("inner lattice is not contained in the outer lattice")
        coords.append(c)
    if not coords:
        return AbelianGroup((0,) * k)
    M = [[c[i] for c in coords] for i in range(k)]
    g, _ = smith_normal_form(M, k, len(coords))
    return g


def det(A: list[list[int]]) -> int:
    """Exact determinant by fraction-free elimination (Bareiss)."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if M[i][k]), None)
            if sw is None:
                return 0
            M[k], M[sw] = M[sw], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def content(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g
