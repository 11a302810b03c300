"""Tate cohomology of modules over a finite cyclic group.

A module is a lattice quotient A = Z^r / R together with an integer matrix
σ on Z^r that preserves R.  Both Tate groups are lattice quotients inside
Z^r, so every computation reduces to kernels and Smith normal forms:

    Ĥ^0 = {x : (σ-1)x ∈ R} / (Nr Z^r + R)
    Ĥ^1 = {x : Nr x ∈ R} / ((σ-1) Z^r + R)
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import HypothesisError, ModuleActionError
from .smith import (AbelianGroup, column_hnf_basis, kernel_basis, lattice_quotient, matmul,
                    solve_in_lattice)


def _identity(r: int) -> list[list[int]]:
    return [[int(i == j) for j in range(r)] for i in range(r)]


def _apply(M: list[list[int]], v: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) for row in M]


@dataclass(frozen=True)
class CyclicGModule:
    """Z^r / span(relations) with the generator of Z/m acting by ``sigma`` (rows)."""

    m: int
    ambient_rank: int
    relations: tuple[tuple[int, ...], ...]
    sigma: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        r = self.ambient_rank
        if self.m < 1 or r < 0:
            raise ModuleActionError("group order must be >= 1 and rank >= 0")
        if len(self.sigma) != r or any(len(row) != r for row in self.sigma):
            raise ModuleActionError(f"sigma must be {r} x {r}")
        if any(len(v) != r for v in self.relations):
            raise ModuleActionError(f"relations must have length {r}")
        basis = self.relation_basis()
        S = self.sigma_rows()
        for v in basis:
            if solve_in_lattice(basis, _apply(S, v)) is None:
                raise ModuleActionError("sigma does not preserve the relation lattice")
        P = _identity(r)
        for _ in range(self.m):
            P = matmul(S, P)
        for j in range(r):
            col = [P[i][j] - int(i == j) for i in range(r)]
            if solve_in_lattice(basis, col) is None:
                raise ModuleActionError(f"sigma^{self.m} is not the identity on the module")

    @classmethod
    def build(cls, m: int, sigma: Sequence[Sequence[int]], relations: Sequence[Sequence[int]] = ()) -> "CyclicGModule":
        r = len(sigma)
        return cls(m, r, tuple(tuple(int(x) for x in v) for v in relations),
                   tuple(tuple(int(x) for x in row) for row in sigma))

    def sigma_rows(self) -> list[list[int]]:
        return [list(row) for row in self.sigma]

    def relation_basis(self) -> list[list[int]]:
        return column_hnf_basis([list(v) for v in self.relations if any(v)], self.ambient_rank)

    def underlying(self) -> AbelianGroup:
        return lattice_quotient(_identity(self.ambient_rank), [list(v) for v in self.relations])

    def norm_rows(self) -> list[list[int]]:
        r = self.ambient_rank
        S = self.sigma_rows()
        N = [[0] * r for _ in range(r)]
        P = _identity(r)
        for _ in range(self.m):
            N = [[a + b for a, b in zip(x, y)] for x, y in zip(N, P)]
            P = matmul(S, P)
        return N


def _preimage(M: CyclicGModule, A: list[list[int]]) -> list[list[int]]:
    """Basis of {x in Z^r : A x lies in the relation lattice}."""
    r = M.ambient_rank
    R = M.relation_basis()
    # [A | -R] (x, y) = 0
    block = [list(A[i]) + [-v[i] for v in R] for i in range(r)]
    ker = kernel_basis(block, r + len(R))
    return column_hnf_basis([k[:r] for k in ker if any(k[:r])], r)


def _image_plus_relations(M: CyclicGModule, A: list[list[int]]) -> list[list[int]]:
    r = M.ambient_rank
    cols = [[A[i][j] for i in range(r)] for j in range(r)]
    return [c for c in cols if any(c)] + [list(v) for v in M.relations if any(v)]


def tate(M: CyclicGModule, i: int) -> AbelianGroup:
    """Ĥ^i(Z/m, A), using 2-periodicity to reduce i modulo 2."""
    r = M.ambient_rank
    if r == 0:
        return AbelianGroup(())
    S = M.sigma_rows()
    Sm1 = [[S[a][b] - int(a == b) for b in range(r)] for a in range(r)]
    N = M.norm_rows()
    if i % 2 == 0:
        outer = _preimage(M, Sm1)
        inner = _image_plus_relations(M, N)
    else:
        outer = _preimage(M, N)
        inner = _image_plus_relations(M, Sm1)
    if not outer:
        return AbelianGroup(())
    return lattice_quotient(outer, inner)


def herbrand_quotient(M: CyclicGModule) -> Fraction:
    h0, h1 = tate(M, 0), tate(M, 1)
    if h0.free_rank or h1.free_rank:
        raise ValueError("Tate group is infinite; Herbrand quotient undefined")
    return Fraction(h0.order(), h1.order())


# --- model modules ------------------------------------------------------------------

def permutation_module(m: int, h: int) -> CyclicGModule:
    """Z[G/H] for G = Z/m and H its subgroup of order h; σ shifts the m/h cosets."""
    if h < 1 or m % h:
        raise ValueError(f"{h} does not divide {m}")
    c = m // h
    sigma = [[int(i == (j + 1) % c) for j in range(c)] for i in range(c)]
    return CyclicGModule.build(m, sigma)


def regular_module(m: int, copies: int = 1) -> CyclicGModule:
    return direct_sum([permutation_module(m, 1)] * copies) if copies != 1 else permutation_module(m, 1)


def trivial_module(m: int, rank: int = 1) -> CyclicGModule:
    return CyclicGModule.build(m, _identity(rank))


def augmentation_ideal(m: int) -> CyclicGModule:
    """I_G = ker(Z[G] -> Z), in the basis g^i - 1 (1 <= i < m)."""
    r = m - 1
    # σ(g^i - 1) = (g^{i+1} - 1) - (g - 1); g^m - 1 = 0
    sigma = [[0] * r for _ in range(r)]
    for j in range(r):
        i = j + 1
        if i + 1 < m:
            sigma[i][j] += 1
        sigma[0][j] -= 1
    return CyclicGModule.build(m, sigma)


def direct_sum(mods: Sequence[CyclicGModule]) -> CyclicGModule:
    if not mods:
        raise ValueError("empty direct sum")
    m = mods[0].m
    if any(x.m != m for x in mods):
        raise ValueError("group orders differ")
    r = sum(x.ambient_rank for x in mods)
    sigma = [[0] * r for _ in range(r)]
    rels = []
    off = 0
    for x in mods:
        k = x.ambient_rank
        for a in range(k):
            for b in range(k):
                sigma[off + a][off + b] = x.sigma[a][b]
        for v in x.relations:
            rels.append([0] * off + list(v) + [0] * (r - off - k))
        off += k
    return CyclicGModule.build(m, sigma, rels)


def augmentation_kernel_model(p: int, s: int) -> CyclicGModule:
    """Cycles relative to an s-point set, modelled as I_G^{s-1}: Ĥ^0 = 0, Ĥ^1 = (Z/p)^{s-1}."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if s == 1:
        return CyclicGModule.build(p, [])
    return direct_sum([augmentation_ideal(p)] * (s - 1))


def sublattice_model(p: int, s: int, index: int = 2) -> tuple[CyclicGModule, CyclicGModule]:
    """A finite-index sublattice of trivial Z^s and the finite quotient.

    Returns (sublattice, quotient); the sublattice has Herbrand quotient p^s
    for any index, the quotient has Herbrand quotient 1.
    """
    if index < 1:
        raise ValueError("index must be >= 1")
    sub = CyclicGModule.build(p, _identity(s))  # index·Z^s ≅ Z^s as a trivial module
    quo = CyclicGModule.build(p, _identity(s), [[index * int(i == j) for j in range(s)] for i in range(s)])
    return sub, quo


def submodule_and_quotient(M: CyclicGModule, gens: Sequence[Sequence[int]]) -> tuple[CyclicGModule, CyclicGModule]:
    """0 -> A -> M -> C -> 0 with A generated by ``gens`` and its σ-translates."""
    r = M.ambient_rank
    S = M.sigma_rows()
    span = [list(v) for v in M.relations if any(v)]
    for g in gens:
        v = list(g)
        for _ in range(M.m):
            span.append(v)
            v = _apply(S, v)
    basis = column_hnf_basis([v for v in span if any(v)], r)
    k = len(basis)
    # σ and the relations in the basis of the sublattice
    sig_cols = [solve_in_lattice(basis, _apply(S, b)) for b in basis]
    sigma_sub = [[sig_cols[j][i] for j in range(k)] for i in range(k)]
    rel_sub = [solve_in_lattice(basis, list(v)) for v in M.relations if any(v)]
    A = CyclicGModule.build(M.m, sigma_sub, rel_sub)
    C = CyclicGModule.build(M.m, S, basis)
    return A, C


# --- random modules for property tests ----------------------------------------------

def random_module(m: int, rng: random.Random, max_blocks: int = 3, finite: bool = False) -> CyclicGModule:
    """A random direct sum of standard blocks, disguised by a unimodular change of basis."""
    blocks = []
    for _ in range(rng.randint(1, max_blocks)):
        kind = rng.choice(["trivial", "regular", "aug", "perm"])
        if kind == "trivial":
            blocks.append(trivial_module(m))
        elif kind == "regular":
            blocks.append(permutation_module(m, 1))
        elif kind == "aug" and m > 1:
            blocks.append(augmentation_ideal(m))
        else:
            divs = [h for h in range(1, m + 1) if m % h == 0]
            blocks.append(permutation_module(m, rng.choice(divs)))
    M = direct_sum(blocks)
    r = M.ambient_rank
    rels = [list(v) for v in M.relations]
    if finite:
        for i in range(r):
            e = [0] * r
            e[i] = rng.randint(1, 6)
            for _ in range(m):
                rels.append(e)
                e = _apply(M.sigma_rows(), e)
    P, Pinv = _random_unimodular(r, rng)
    sigma = matmul(matmul(P, M.sigma_rows()), Pinv)
    rels = [_apply(P, v) for v in rels]
    return CyclicGModule.build(m, sigma, rels)


def _random_unimodular(r: int, rng: random.Random, steps: int = 6):
    P, Q = _identity(r), _identity(r)
    if r < 2:
        return P, Q
    for _ in range(steps):
        i, j = rng.sample(range(r), 2)
        c = rng.randint(-2, 2)
        # P <- E P with E = I + c e_ij ; Q <- Q E^{-1}
        P[i] = [a + c * b for a, b in zip(P[i], P[j])]
        for row in Q:
            row[j] -= c * row[i]
    return P, Q


# --- ℏ-defect ---------------------------------------------------------------------------

HBAR_FLAGS = ("qhs3_levels", "cyclic_of_order_p")


def hbar_defect(p: int, flags: dict) -> int:
    """ℏ2 - ℏ1 for a degree-p step of QHS^3 towers.

    ℏ_i is the p-rank of the Tate group of the cycle module in the relevant
    degree; the cycle module is cohomologically a trivial Z shifted by one
    degree, so ℏ1 = rank Ĥ^0(Z) = 1 and ℏ2 = rank Ĥ^1(Z) = 0.
    """
    missing = [f for f in HBAR_FLAGS if not flags.get(f)]
    if missing:
        raise HypothesisError(f"hypotheses not met: {', '.join(missing)}")
    Z = trivial_module(p)
    h1 = tate(Z, 0).p_rank(p)
    h2 = tate(Z, 1).p_rank(p)
    return h2 - h1


# --- files ---------------------------------------------------------------------------

def load_module(source, base_dir: Path | None = None) -> CyclicGModule:
    from .corpus import resolve

    if isinstance(source, (str, Path)):
        path = resolve(str(source), base_dir)
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ModuleActionError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise ModuleActionError("module file must hold a JSON object")
    try:
        m = int(data["m"])
        r = int(data["ambient_rank"])
        sigma = data["sigma"]
        rels = data.get("relations", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModuleActionError(f"missing or malformed field: {exc}") from exc
    if len(sigma) != r:
        raise ModuleActionError(f"field 'sigma' must have {r} rows")
    return CyclicGModule.build(m, sigma, rels)
