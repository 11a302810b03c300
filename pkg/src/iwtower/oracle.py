"""Brute-force homology of cyclic branched covers.

H_1 of the degree-N cyclic cover is read off an abelianized
Reidemeister–Schreier presentation of ker(π_1 -> Z/N); the branched
filling kills, for every meridian generator and every coset, the lift of
the smallest meridian power lying in the kernel.
"""

from __future__ import annotations

from math import gcd
from typing import Sequence

from .errors import InvalidTauError
from .links import LinkPresentation
from .smith import AbelianGroup, smith_normal_form


def cyclic_cover_homology(pres: LinkPresentation, values: Sequence[int], degree: int) -> AbelianGroup:
    """H_1 of the degree-``degree`` cyclic cover of S^3 branched along the link.

    ``values[i]`` is the image of the meridian of component i in Z/degree.
    Every Wirtinger generator is a meridian of its component.
    """
    N = degree
    G = len(pres.generators)
    tau = [values[c] % N for c in pres.generators]
    try:
        a = next(g for g in range(G) if gcd(tau[g], N) == 1)
    except StopIteration:
        raise InvalidTauError(f"no meridian maps to a generator of Z/{N}") from None
    inv = pow(tau[a], -1, N) if N > 1 else 0
    k_of = [(c * inv) % N for c in range(N)]  # T_c = a^k_of[c]

    def y(c, g):
        return (c % N) * G + g

    rels: list[dict[int, int]] = []
    for c in range(N):
        if k_of[c] < N - 1:
            rels.append({y(c, a): 1})
    for r in pres.relators:
        for c0 in range(N):
            vec: dict[int, int] = {}
            c = c0
            for g, e in r:
                if e == 1:
                    idx = y(c, g)
                    vec[idx] = vec.get(idx, 0) + 1
                    c = (c + tau[g]) % N
                else:
                    c = (c - tau[g]) % N
                    idx = y(c, g)
                    vec[idx] = vec.get(idx, 0) - 1
            vec = {i: v for i, v in vec.items() if v}
            if vec:
                rels.append(vec)
    for g in range(G):
        o = N // gcd(N, tau[g]) if tau[g] else 1
        seen = set()
        for c0 in range(N):
            orbit = frozenset((c0 + j * tau[g]) % N for j in range(o))
            if orbit in seen:
                continue
            seen.add(orbit)
            vec = {}
            for cc in orbit:
                vec[y(cc, g)] = vec.get(y(cc, g), 0) + 1
            rels.append(vec)
    dim = N * G
    M = [[0] * len(rels) for _ in range(dim)]
    for j, vec in enumerate(rels):
        for i, v in vec.items():
            M[i][j] = v
    group, _ = smith_normal_form(M, dim, len(rels))
    return group
