import pytest

from iwtower.errors import HenselError, NonUnitError, PrimeMismatchError
from iwtower.padic import AtLeast, PAdicInt, hensel_root, padic_add, padic_mul, parse_padic, unit_inverse, valuation


def Z(p, k, r):
    return PAdicInt.of(r, p, k)


def test_add_examples():
    assert padic_add(Z(5, 4, 182), Z(5, 4, 443)).residue == 0
    x = Z(7, 3, 100)
    assert padic_add(x, Z(7, 3, 0)) == x
    assert padic_add(Z(5, 2, 24), Z(5, 2, 1)).residue == 0


def test_mul_examples():
    assert padic_mul(Z(5, 4, 182), Z(5, 4, 182)).residue == 624
    x = Z(3, 4, 50)
    assert padic_mul(x, Z(3, 4, 1)) == x
    assert padic_mul(Z(3, 2, 3), Z(3, 2, 3)).residue == 0


def test_mixed_precision_coerces_to_minimum():
    s = Z(5, 4, 182) + Z(5, 2, 1)
    assert s.precision == 2 and s.residue == 183 % 25


def test_prime_mismatch():
    with pytest.raises(PrimeMismatchError):
        Z(5, 4, 1) + Z(3, 4, 1)


def test_valuation():
    assert valuation(Z(3, 5, 18)) == 2
    assert valuation(Z(3, 5, 1)) == 0
    v = valuation(Z(3, 5, 0))
    assert v == AtLeast(5) and str(v) == "at-least-5"


def test_unit_inverse():
    assert unit_inverse(Z(5, 4, 2)).residue == 313
    assert unit_inverse(Z(5, 4, 1)).residue == 1
    with pytest.raises(NonUnitError):
        unit_inverse(Z(5, 4, 5))


def test_hensel():
    r = hensel_root([1, 0, 1], 2, 5, 4)
    assert r.residue == 182 and r.digits() == [2, 1, 2, 1]
    for p, k in [(2, 5), (7, 3), (11, 2)]:
        assert hensel_root([-7, 1], 7 % p, p, k).residue == 7 % p**k
    with pytest.raises(HenselError):
        hensel_root([1, 0, 1], 1, 3, 4)
    with pytest.raises(HenselError):
        hensel_root([1, 0, 1], None, 3, 4)


def test_hensel_rejects_double_root():
    with pytest.raises(HenselError):
        hensel_root([0, 0, 1], 0, 5, 3)


@pytest.mark.parametrize("p", [5, 13, 17, 29])
def test_hensel_sqrt_minus_one_squares_to_minus_one(p):
    r = hensel_root([1, 0, 1], None, p, 20)
    assert (r * r + 1).residue == 0


def test_digit_strings():
    x = PAdicInt.from_digits("2121", 5)
    assert x.residue == 182 and x.digit_string() == "2121"
    with pytest.raises(ValueError):
        PAdicInt.from_digits("2151", 5)
    v, n = parse_padic("-1", 5, 4)
    assert v.residue == 624 and n == -1
    v, n = parse_padic("sqrt(-1)", 5, 4)
    assert v.residue == 182 and n is None
    v, n = parse_padic(3, 5, 4)
    assert v.residue == 3 and n == 3
