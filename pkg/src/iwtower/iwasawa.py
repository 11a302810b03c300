"""Truncated power series over Z_p and finitely generated Λ-modules.

Λ = Z_p[[T]] with t = 1 + T.  A ``LambdaElement`` keeps D coefficients
modulo p^k; a series known only up to T^D is treated as the polynomial of
degree < D it truncates to, so every identity below is exact for that
polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import PrecisionError
from .padic import AtLeast, PAdicInt, Valuation, vp

INFINITE = "infinite"


# --- polynomial helpers over Z/p^k, coefficient lists low degree first -----

def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_mul(a: Sequence[int], b: Sequence[int], mod: int, limit: int | None = None) -> list[int]:
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if limit is not None:
        n = min(n, limit)
    out = [0] * n
    for i, x in enumerate(a):
        if x == 0 or i >= n:
            continue
        for j in range(min(len(b), n - i)):
            if b[j]:
                out[i + j] += x * b[j]
    return [x % mod for x in out]


def poly_divmod_monic(f: Sequence[int], g: Sequence[int], mod: int) -> tuple[list[int], list[int]]:
    """Division by a monic polynomial g; exact over Z/mod."""
    g = _trim(list(g))
    if not g or g[-1] % mod != 1 % mod:
        raise ValueError("divisor must be monic")
    r = [x % mod for x in f]
    dg = len(g) - 1
    if len(r) <= dg:
        return [], _trim(r)
    q = [0] * (len(r) - dg)
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i]
        if c:
            q[i - dg] = c
            for j in range(dg + 1):
                r[i - dg + j] = (r[i - dg + j] - c * g[j]) % mod
    return q, _trim(r[:dg])


def shift_t_to_T(coeffs: Sequence[int]) -> list[int]:
    """Rewrite Σ a_i t^i as a polynomial in T = t - 1 (exact integers)."""
    n = len(coeffs)
    out = [0] * n
    for i, a in enumerate(coeffs):
        if a:
            for j in range(i + 1):
                out[j] += a * math.comb(i, j)
    return out


def shift_T_to_t(coeffs: Sequence[int]) -> list[int]:
    n = len(coeffs)
    out = [0] * n
    for i, a in enumerate(coeffs):
        if a:
            for j in range(i + 1):
                out[j] += a * math.comb(i, j) * (-1) ** (i - j)
    return out


def det_valuation(M: list[list[int]], p: int, k: int) -> int:
    """v_p(det M) for a square matrix known modulo p^k.

    Full pivoting on minimal valuation loses no precision.  Raises
    ``PrecisionError`` when a remaining block vanishes mod p^k.
    """
    mod = p**k
    A = [[x % mod for x in row] for row in M]
    n = len(A)
    total = 0
    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                x = A[i][j]
                if x:
                    v = vp(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best and best[0] == 0:
                break
        if best is None:
            raise PrecisionError(f"determinant valuation is at least {total + k} (precision {k} exhausted)")
        v, i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        total += v
        piv = A[t][t]
        unit_inv = pow(piv // p**v, -1, mod)
        for i in range(t + 1, n):
            if A[i][t]:
                fac = (A[i][t] // p**v) * unit_inv % mod
                row_t = A[t]
                A[i] = [(a - fac * b) % mod for a, b in zip(A[i], row_t)]
    return total


# --- Λ elements -------------------------------------------------------------

@dataclass(frozen=True)
class LambdaElement:
    prime: int
    precision: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("truncation order D must be >= 1")
        mod = self.prime**self.precision
        object.__setattr__(self, "coeffs", tuple(int(c) % mod for c in self.coeffs))

    @property
    def truncation(self) -> int:
        return len(self.coeffs)

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    @classmethod
    def from_T(cls, coeffs: Iterable[int], p: int, k: int, D: int | None = None) -> "LambdaElement":
        c = list(coeffs) or [0]
        D = D if D is not None else len(c)
        c = (c + [0] * D)[:D]
        return cls(p, k, tuple(c))

    @classmethod
    def from_t(cls, coeffs: Sequence[int], p: int, k: int, D: int | None = None) -> "LambdaElement":
        """Element given as an integer polynomial in t = 1+T."""
        return cls.from_T(shift_t_to_T(coeffs), p, k, D)

    @classmethod
    def constant(cls, c: int, p: int, k: int, D: int = 1) -> "LambdaElement":
        return cls.from_T([c], p, k, D)

    def coeff(self, i: int) -> PAdicInt:
        return PAdicInt(self.prime, self.precision, self.coeffs[i] if i < len(self.coeffs) else 0)

    def degree(self) -> int:
        """Index of the last nonzero coefficient (-1 for zero)."""
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    def poly(self) -> list[int]:
        return _trim(list(self.coeffs))

    def is_zero(self) -> bool:
        return self.degree() < 0

    def _check(self, other: "LambdaElement") -> tuple[int, int]:
        if other.prime != self.prime:
            from .errors import PrimeMismatchError
            raise PrimeMismatchError("different primes")
        return min(self.precision, other.precision), min(self.truncation, other.truncation)

    def __add__(self, other: "LambdaElement") -> "LambdaElement":
        k, D = self._check(other)
        return LambdaElement(self.prime, k, tuple(a + b for a, b in zip(self.coeffs[:D], other.coeffs[:D])))

    def __sub__(self, other: "LambdaElement") -> "LambdaElement":
        k, D = self._check(other)
        return LambdaElement(self.prime, k, tuple(a - b for a, b in zip(self.coeffs[:D], other.coeffs[:D])))

    def __neg__(self):
        return LambdaElement(self.prime, self.precision, tuple(-a for a in self.coeffs))

    def __mul__(self, other) -> "LambdaElement":
        if isinstance(other, int):
            return LambdaElement(self.prime, self.precision, tuple(a * other for a in self.coeffs))
        k, D = self._check(other)
        prod_ = poly_mul(self.coeffs, other.coeffs, self.prime**k, D)
        return LambdaElement.from_T(prod_, self.prime, k, D)

    __rmul__ = __mul__

    def reduce(self, k: int | None = None, D: int | None = None) -> "LambdaElement":
        k = self.precision if k is None else min(k, self.precision)
        D = self.truncation if D is None else D
        return LambdaElement.from_T(list(self.coeffs[:D]), self.prime, k, D)

    def valuations(self) -> list[Valuation]:
        return [vp(c, self.prime) if c else AtLeast(self.precision) for c in self.coeffs]

    def __str__(self):
        terms = []
        mod = self.modulus
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            c = c - mod if c > mod // 2 else c
            mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
            if mono and abs(c) == 1:
                s = mono
            else:
                s = f"{abs(c)}{'*' + mono if mono else ''}"
            terms.append((c < 0, s))
        if not terms:
            return "0"
        out = ("-" if terms[0][0] else "") + terms[0][1]
        for neg, s in terms[1:]:
            out += (" - " if neg else " + ") + s
        return out


@dataclass(frozen=True)
class WeierstrassData:
    mu: int
    lam: int
    distinguished: LambdaElement
    unit: LambdaElement
    precision: int  # digits to which distinguished and unit are determined

    @property
    def lambda_(self) -> int:
        return self.lam

    def recompose(self, D: int | None = None) -> LambdaElement:
        """p^mu * unit * distinguished, at precision mu + self.precision."""
        p = self.unit.prime
        D = D if D is not None else self.unit.truncation
        mod = p**self.precision
        prod_ = poly_mul(list(self.unit.coeffs[:D]), self.distinguished.poly(), mod, D)
        return LambdaElement.from_T([c * p**self.mu for c in prod_], p, self.precision + self.mu, D)


def weierstrass_prepare(f: LambdaElement) -> WeierstrassData:
    """f = p^mu * unit * distinguished, computed by Newton-Hensel iteration.

    The truncated input is treated as a polynomial, so the factorization is
    an exact polynomial identity modulo p^(k - mu).
    """
    p, k = f.prime, f.precision
    vals = [vp(c, p) for c in f.coeffs if c]
    if not vals:
        raise PrecisionError(f"all coefficients vanish modulo {p}^{k}; cannot prepare")
    mu = min(vals)
    kk = k - mu
    mod = p**kk
    g = [(c // p**mu) % mod for c in f.coeffs]
    lam = next(i for i, c in enumerate(g) if c % p)
    D = f.truncation
    if lam == 0:
        one = LambdaElement.from_T([1], p, kk, 1)
        return WeierstrassData(mu, 0, one, LambdaElement.from_T(g, p, kk, D), kk)
    P = [0] * lam + [1]
    gpoly = _trim(list(g))
    for _ in range(4 * (kk.bit_length() + lam.bit_length()) + 8):
        Q, R = poly_divmod_monic(gpoly, P, mod)
        if not R:
            break
        Qinv = _inverse_mod_monic(Q, P, p, kk)
        delta = poly_divmod_monic(poly_mul(R, Qinv, mod), P, mod)[1]
        P = [(a + (delta[i] if i < len(delta) else 0)) % mod for i, a in enumerate(P[:lam])] + [1]
    else:
        raise PrecisionError("Weierstrass iteration did not converge")
    unit = LambdaElement.from_T(Q, p, kk, D)
    return WeierstrassData(mu, lam, LambdaElement.from_T(P, p, kk), unit, kk)


def _inverse_mod_monic(a: Sequence[int], P: Sequence[int], p: int, k: int) -> list[int]:
    """Inverse of a in Z/p^k[T]/(P) for distinguished P and a(0) a unit."""
    mod = p**k
    a = poly_divmod_monic(a, P, mod)[1]
    if not a or a[0] % p == 0:
        raise ValueError("element is not a unit modulo the distinguished polynomial")
    x = [pow(a[0], -1, mod)]
    lam = len(P) - 1
    # error 1 - a x lies in (p, T); T^lam is in pR, so it dies after enough squarings
    for _ in range((k * max(lam, 1)).bit_length() + 2):
        ax = poly_divmod_monic(poly_mul(a, x, mod), P, mod)[1]
        two_minus = [(-c) % mod for c in ax] or [0]
        two_minus[0] = (two_minus[0] + 2) % mod
        x = poly_divmod_monic(poly_mul(x, two_minus, mod), P, mod)[1]
    return x


def nu_poly(p: int, n: int, precision: int = 64) -> LambdaElement:
    """ν_{p^n} = Σ_{i<p^n} (1+T)^i = Σ_j C(p^n, j+1) T^j."""
    N = p**n
    return LambdaElement.from_T([math.comb(N, j + 1) for j in range(N)], p, precision, N)


def cyclotomic_p_power(p: int, j: int, precision: int = 64) -> LambdaElement:
    """Φ_{p^j}(1+T) = Σ_{i<p} (1+T)^{i p^{j-1}}."""
    if j < 1:
        raise ValueError("j must be >= 1")
    step = p ** (j - 1)
    deg = step * (p - 1)
    coeffs = [0] * (deg + 1)
    for i in range(p):
        e = i * step
        for r in range(e + 1):
            coeffs[r] += math.comb(e, r)
    return LambdaElement.from_T(coeffs, p, precision)


def cyclotomic_factor_profile(f: LambdaElement, p: int, j_max: int) -> list[tuple[int, int]]:
    """Multiplicities of Φ_{p^j}(1+T), 1 <= j <= j_max, in f."""
    if f.prime != p:
        raise ValueError("prime mismatch")
    wd = weierstrass_prepare(f)
    if wd.precision < 1:
        raise PrecisionError("no precision left after removing p^mu")
    P = wd.distinguished.poly()
    mod = p**wd.precision
    out = []
    for j in range(1, j_max + 1):
        phi = cyclotomic_p_power(p, j, wd.precision).poly()
        if len(phi) > len(P):
            break
        mult = 0
        while len(P) >= len(phi):
            q, r = poly_divmod_monic(P, phi, mod)
            if r:
                break
            mult += 1
            P = q
        if mult:
            out.append((j, mult))
    return out


def binom_series(v: PAdicInt, D: int) -> LambdaElement:
    """(1+T)^v truncated at T^D.

    C(v, i) is determined modulo p^(k - floor(log_p i)); the result carries
    the uniform precision k - floor(log_p(D-1)).
    """
    p, k = v.prime, v.precision
    loss = 0
    while D - 1 >= p ** (loss + 1):
        loss += 1
    kk = k - loss
    if kk < 1:
        raise PrecisionError(f"order {D} needs more than {k} digits of precision")
    V, mod = v.residue, p**kk
    coeffs, c = [], 1
    for i in range(D):
        coeffs.append(c % mod)
        c = c * (V - i) // (i + 1)
    return LambdaElement.from_T(coeffs, p, kk, D)


def _ring_pow(x: list[int], e: int, P: Sequence[int], mod: int) -> list[int]:
    result = [1]
    base = x
    while e:
        if e & 1:
            result = poly_divmod_monic(poly_mul(result, base, mod), P, mod)[1]
        e >>= 1
        if e:
            base = poly_divmod_monic(poly_mul(base, base, mod), P, mod)[1]
    return result


def nu_mod(P: Sequence[int], p: int, n: int, mod: int) -> list[int]:
    """ν_{p^n}(1+T) reduced modulo the monic polynomial P."""
    s = poly_divmod_monic([1, 1], P, mod)[1]
    acc = [1]
    for _ in range(n):
        block = [0]
        power = [1]
        for _ in range(p):
            block = [(a + b) % mod for a, b in _zip_pad(block, power)]
            power = poly_divmod_monic(poly_mul(power, s, mod), P, mod)[1]
        acc = poly_divmod_monic(poly_mul(acc, block, mod), P, mod)[1]
        s = _ring_pow(s, p, P, mod)
    return acc


def _zip_pad(a, b):
    n = max(len(a), len(b))
    return zip(list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b)))


def norm_valuation(g: Sequence[int], P: Sequence[int], p: int, k: int) -> int:
    """v_p of det(multiplication by g on Z_p[T]/(P)), i.e. of Res(P, g)."""
    mod = p**k
    lam = len(P) - 1
    if lam == 0:
        return 0
    g = poly_divmod_monic(g, P, mod)[1]
    cols = []
    x = list(g)
    for _ in range(lam):
        cols.append((x + [0] * lam)[:lam])
        x = poly_divmod_monic([0] + x, P, mod)[1]
    M = [[cols[j][i] for j in range(lam)] for i in range(lam)]
    return det_valuation(M, p, k)


def resultant_valuation(f: Sequence[int], g, p: int, precision: int = 64) -> int:
    """v_p(Res(f, g)) by a Sylvester determinant over Z/p^k.

    ``f`` is an integer polynomial in t (low degree first); ``g`` is either a
    polynomial ``LambdaElement`` in T or an integer polynomial in t.
    Translation t = 1+T leaves the resultant unchanged.
    """
    fT = _trim(shift_t_to_T(f))
    if isinstance(g, LambdaElement):
        gT = g.poly()
        k = min(precision, g.precision)
    else:
        gT = _trim(shift_t_to_T(g))
        k = precision
    mod = p**k
    fT = [c % mod for c in fT]
    gT = [c % mod for c in gT]
    fT, gT = _trim(fT), _trim(gT)
    if not fT or not gT:
        raise PrecisionError("zero polynomial has no resultant at this precision")
    m, n = len(fT) - 1, len(gT) - 1
    if m == 0:
        return n * vp(fT[0], p) if fT[0] else 0
    if n == 0:
        return m * vp(gT[0], p)
    size = m + n
    S = []
    for i in range(n):
        row = [0] * size
        for j, c in enumerate(reversed(fT)):
            row[i + j] = c
        S.append(row)
    for i in range(m):
        row = [0] * size
        for j, c in enumerate(reversed(gT)):
            row[i + j] = c
        S.append(row)
    return det_valuation(S, p, k)


def cyclotomic_valuations(f: LambdaElement, j_from: int, j_to: int) -> list[int | str]:
    """v_p(Res(Φ_{p^j}(1+T), f)) for j_from <= j <= j_to (INFINITE on a shared factor)."""
    p = f.prime
    wd = weierstrass_prepare(f)
    shared = {j for j, _ in cyclotomic_factor_profile(f, p, j_to)}
    P = wd.distinguished.poly()
    mod = p**wd.precision
    out: list[int | str] = []
    s = poly_divmod_monic([1, 1], P, mod)[1] if len(P) > 1 else []
    for j in range(1, j_to + 1):
        if j >= j_from:
            if j in shared:
                out.append(INFINITE)
            else:
                block, power = [0], [1]
                for _ in range(p):
                    block = [(a + b) % mod for a, b in _zip_pad(block, power)]
                    power = poly_divmod_monic(poly_mul(power, s, mod), P, mod)[1] if len(P) > 1 else []
                phi_deg = p ** (j - 1) * (p - 1)
                out.append(wd.mu * phi_deg + norm_valuation(block, P, p, wd.precision))
        if len(P) > 1:
            s = _ring_pow(s, p, P, mod)
    return out


def level_exponent(f: LambdaElement, n: int, base_level: int = 0) -> int | str:
    """p-exponent of |Λ/(f, ν_{p^n}/ν_{p^base_level})|, or INFINITE on a shared cyclotomic factor.

    With base_level = 0 this is v_p Res(ν_{p^n}, f): the product of f(ζ-1)
    over the p^n-th roots of unity ζ != 1.
    """
    if n <= base_level:
        return 0
    vals = cyclotomic_valuations(f, base_level + 1, n)
    if INFINITE in vals:
        return INFINITE
    return sum(vals)


# --- normal forms -------------------------------------------------------------

@dataclass(frozen=True)
class LambdaModuleNF:
    """Λ^r ⊕ (⊕ Λ/(f_i^e_i)) ⊕ (⊕ Λ/(p^m_j)); irreducibility of f_i is not checked."""

    prime: int
    free_rank: int = 0
    poly_factors: tuple[tuple[LambdaElement, int], ...] = ()
    p_factors: tuple[int, ...] = ()

    def __post_init__(self):
        for f, e in self.poly_factors:
            c = f.poly()
            if f.prime != self.prime:
                raise ValueError("factor over a different prime")
            if not c or c[-1] != 1 or any(x % f.prime for x in c[:-1]) or e < 1:
                raise ValueError(f"{f} is not a distinguished polynomial")
        if self.free_rank < 0 or any(m < 1 for m in self.p_factors):
            raise ValueError("invalid normal form")


def nf_quotient_order(nf: LambdaModuleNF, n: int) -> int | str:
    """p-exponent of |E/ν_{p^n}E|, or INFINITE."""
    if nf.free_rank:
        return INFINITE
    total = 0
    for f, e in nf.poly_factors:
        x = level_exponent(f, n)
        if x == INFINITE:
            return INFINITE
        total += e * x
    for m in nf.p_factors:
        total += m * (nf.prime**n - 1)
    return total


def nf_invariants(nf: LambdaModuleNF) -> tuple[int, int]:
    if nf.free_rank:
        raise ValueError("free rank is nonzero")
    lam = sum(e * (len(f.poly()) - 1) for f, e in nf.poly_factors)
    return lam, sum(nf.p_factors)


def direct_limit_shape(nf: LambdaModuleNF) -> tuple[int, bool]:
    """(rank of the divisible part, whether a nonzero bounded part is present)."""
    if nf.free_rank:
        raise ValueError("free rank is nonzero")
    for f, _ in nf.poly_factors:
        if cyclotomic_factor_profile(f, f.prime, max(1, len(f.poly()))):
            raise ValueError("normal form has a p-power cyclotomic factor")
    lam, mu = nf_invariants(nf)
    return lam, mu > 0
