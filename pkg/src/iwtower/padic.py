"""Fixed-precision p-adic integers and Hensel lifting.

Elements of Z_p are stored as a residue modulo p^k.  Every operation is
exact on residues; precision only ever shrinks (mixed precisions coerce to
the minimum), and exhausted valuations are reported as ``AtLeast(k)``
instead of infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence, Union

from .errors import HenselError, NonUnitError, PrimeMismatchError


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp(n: int, p: int) -> int | None:
    """p-adic valuation of a nonzero integer; None for 0."""
    if n == 0:
        return None
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


class AtLeast(NamedTuple):
    """Valuation of a residue that vanished at the working precision."""

    bound: int

    def __str__(self):
        return f"at-least-{self.bound}"


Valuation = Union[int, AtLeast]


@dataclass(frozen=True)
class PAdicInt:
    prime: int
    precision: int
    residue: int

    def __post_init__(self):
        if not is_prime(self.prime):
            raise ValueError(f"{self.prime} is not prime")
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        mod = self.prime**self.precision
        if not 0 <= self.residue < mod:
            object.__setattr__(self, "residue", self.residue % mod)

    @classmethod
    def of(cls, value: int, p: int, k: int) -> "PAdicInt":
        return cls(p, k, value % p**k)

    @classmethod
    def from_digits(cls, digits: str, p: int, k: int | None = None) -> "PAdicInt":
        """Parse base-p digits written least significant first ("2121" -> 182 in Z_5)."""
        if not digits or any(not c.isdigit() or int(c) >= p for c in digits):
            raise ValueError(f"bad base-{p} digit string {digits!r}")
        k = k if k is not None else len(digits)
        value = sum(int(c) * p**i for i, c in enumerate(digits))
        return cls.of(value, p, k)

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    def digits(self) -> list[int]:
        """All k base-p digits, least significant first."""
        out, r = [], self.residue
        for _ in range(self.precision):
            out.append(r % self.prime)
            r //= self.prime
        return out

    def digit_string(self) -> str:
        return "".join(str(d) for d in self.digits())

    def _coerce(self, other) -> tuple[int, int, int]:
        if isinstance(other, int):
            return self.precision, self.residue, other
        if not isinstance(other, PAdicInt):
            return NotImplemented
        if other.prime != self.prime:
            raise PrimeMismatchError(f"primes {self.prime} and {other.prime} differ")
        return min(self.precision, other.precision), self.residue, other.residue

    def _binop(self, other, op):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        k, a, b = c
        return PAdicInt.of(op(a, b), self.prime, k)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return PAdicInt.of(-self.residue, self.prime, self.precision)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.residue == other % self.modulus
        if isinstance(other, PAdicInt):
            if other.prime != self.prime:
                return False
            k = min(self.precision, other.precision)
            m = self.prime**k
            return self.residue % m == other.residue % m
        return NotImplemented

    def __hash__(self):
        return hash((self.prime, self.precision, self.residue))

    def reduce(self, k: int) -> "PAdicInt":
        return PAdicInt.of(self.residue, self.prime, min(k, self.precision))

    def valuation(self) -> Valuation:
        return valuation(self)

    def inverse(self) -> "PAdicInt":
        return unit_inverse(self)

    def __repr__(self):
        return f"PAdicInt(p={self.prime}, k={self.precision}, {self.residue})"


def padic_add(a: PAdicInt, b: PAdicInt) -> PAdicInt:
    return a + b


def padic_mul(a: PAdicInt, b: PAdicInt) -> PAdicInt:
    return a * b


def valuation(a: PAdicInt) -> Valuation:
    if a.residue == 0:
        return AtLeast(a.precision)
    return vp(a.residue, a.prime)


def unit_inverse(a: PAdicInt) -> PAdicInt:
    if a.residue % a.prime == 0:
        raise NonUnitError(f"{a.residue} is not a unit in Z_{a.prime}")
    return PAdicInt(a.prime, a.precision, pow(a.residue, -1, a.modulus))


def _poly_eval(f: Sequence[int], x: int, mod: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % mod
    return acc


def _poly_deriv(f: Sequence[int]) -> list[int]:
    return [i * c for i, c in enumerate(f)][1:]


def hensel_root(f: Sequence[int], x0: int | None, p: int, k: int) -> PAdicInt:
    """Lift a simple root of ``f`` (coefficients low degree first) to Z/p^k.

    With ``x0=None`` the smallest simple root mod p is used as the seed.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    df = _poly_deriv(f)
    if x0 is None:
        seeds = [x for x in range(p) if _poly_eval(f, x, p) == 0]
        if not seeds:
            raise HenselError(f"no root mod {p}")
        simple = [x for x in seeds if _poly_eval(df, x, p) != 0]
        if not simple:
            raise HenselError(f"only non-simple roots mod {p}")
        x0 = simple[0]
    if _poly_eval(f, x0, p) != 0:
        raise HenselError(f"{x0} is not a root mod {p}")
    if _poly_eval(df, x0, p) == 0:
        raise HenselError(f"seed {x0} is a non-simple root mod {p}")
    x, prec = x0 % p, 1
    while prec < k:
        prec = min(2 * prec, k)
        mod = p**prec
        inv = pow(_poly_eval(df, x, mod), -1, mod)
        x = (x - _poly_eval(f, x, mod) * inv) % mod
    return PAdicInt(p, k, x % p**k)


def parse_padic(value, p: int, k: int) -> tuple[PAdicInt, int | None]:
    """Parse a tower-file p-adic value.

    Accepts JSON integers, base-p digit strings (least significant first),
    and ``"sqrt(-1)"``.  Returns the element and, when it is a genuine
    integer, that integer.
    """
    if isinstance(value, bool):
        raise ValueError("boolean is not a p-adic value")
    if isinstance(value, int):
        return PAdicInt.of(value, p, k), value
    if isinstance(value, PAdicInt):
        return value.reduce(k) if value.precision > k else value, None
    if isinstance(value, str):
        s = value.strip().replace(" ", "")
        if s == "sqrt(-1)":
            return hensel_root([1, 0, 1], None, p, k), None
        neg = s.startswith("-")
        body = s[1:] if neg else s
        x = PAdicInt.from_digits(body, p, k)
        n = sum(int(c) * p**i for i, c in enumerate(body))
        return (-x if neg else x), (-n if neg else n)
    raise ValueError(f"cannot read p-adic value {value!r}")
