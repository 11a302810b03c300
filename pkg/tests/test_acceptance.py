"""End-to-end acceptance criteria; each prints a PASS/FAIL line in the summary."""

import random
import time

import pytest

from iwtower import cli
from iwtower.cohomology import (augmentation_kernel_model, herbrand_quotient, random_module, regular_module,
                                sublattice_model, submodule_and_quotient, tate, trivial_module)
from iwtower.corpus import entries
from iwtower.iwasawa import (INFINITE, LambdaElement, LambdaModuleNF, cyclotomic_p_power, nf_quotient_order,
                             nu_poly, poly_divmod_monic, poly_mul, weierstrass_prepare)
from iwtower.links import TauMap, hosokawa_at_1, linking_matrix, load_link
from iwtower.padic import hensel_root
from iwtower.smith import p_exponent, smith_normal_form
from iwtower.tower import (TowerSpec, branched_sublink, cover_homology, iwasawa_invariants, level_homology_oracle,
                           level_order_fast, load_tower, qhs3_check, reduced_alexander, tln_lambda_shortcut)


def tln(link, p):
    L = load_link(link)
    return TowerSpec(L, TauMap.parse([1] * L.d, p, 64), p, raw_tau=(1,) * L.d)


@pytest.mark.acceptance(1, "trefoil homology ladder")
def test_criterion_1_trefoil_ladder():
    level_homology_oracle.cache_clear()
    start = time.perf_counter()
    g2 = level_homology_oracle(tln("trefoil", 2), 1)
    g3 = level_homology_oracle(tln("trefoil", 3), 1)
    g6 = cover_homology(tln("trefoil", 2), 6)
    elapsed = time.perf_counter() - start
    assert (g2.free_rank, g2.torsion) == (0, (3,))
    assert (g3.free_rank, g3.torsion) == (0, (2, 2))
    assert (g6.free_rank, g6.torsion) == (2, ())
    assert elapsed < 5


@pytest.mark.acceptance(2, "Hensel digits of sqrt(-1) in Z_5")
def test_criterion_2_hensel_digits():
    r = hensel_root([1, 0, 1], 2, 5, 4)
    assert r.residue == 182
    assert tuple(r.digits()) == (2, 1, 2, 1)


@pytest.mark.acceptance(3, "Kida end to end on the Borromean example")
def test_criterion_3_kida_end_to_end():
    start = time.perf_counter()
    M, N = load_tower("example74_M"), load_tower("example74_N")
    subM, subN = branched_sublink(M)[0], branched_sublink(N)[0]
    assert tln_lambda_shortcut(subM, 3) == 1
    assert tln_lambda_shortcut(subN, 3) == 3
    assert abs(hosokawa_at_1(linking_matrix(subM))) == 1
    assert abs(hosokawa_at_1(linking_matrix(subN))) == 1
    assert cli.main(["kida", "example74", "--quiet"]) == 0
    from iwtower.kida import evaluate_morphism, load_morphism
    v = evaluate_morphism(load_morphism("example74"))
    assert v.passed and v.hbar == -1 and (v.lhs, v.degree_term, v.branch_term) == (2, 0, 2)
    assert time.perf_counter() - start < 1


@pytest.mark.acceptance(4, "oracle and resultant exponents agree")
def test_criterion_4_oracle_fast_equivalence():
    start = time.perf_counter()
    checked = 0
    for link in ("unknot", "trefoil", "figure_eight", "hopf", "whitehead", "borromean"):
        for p in (2, 3, 5):
            s = tln(link, p)
            n = 1
            while p ** n <= 9:
                oracle = p_exponent(level_homology_oracle(s, n), p)
                oracle = INFINITE if oracle is None else oracle
                assert level_order_fast(s, n) == oracle, (link, p, n)
                checked += 1
                n += 1
    assert checked == 6 * 6
    assert time.perf_counter() - start < 180


@pytest.mark.acceptance(5, "growth law fits exactly on QHS corpus towers")
def test_criterion_5_growth_law():
    fitted = 0
    for f in entries("tower"):
        s = load_tower(f)
        if not all(qhs3_check(s, n) for n in range(1, s.n_max + 1)):
            continue
        wd = weierstrass_prepare(reduced_alexander(s))
        inv = iwasawa_invariants(s)
        assert (inv.lam, inv.mu) == (wd.lam, wd.mu), f.stem
        for n in range(s.n_max - 2, s.n_max + 1):
            e = level_order_fast(s, n)
            assert e == inv.lam * n + inv.mu * s.p ** n + inv.nu, (f.stem, n)
        fitted += 1
    assert fitted >= 10


@pytest.mark.acceptance(6, "Weierstrass round trip on 200 random elements")
def test_criterion_6_weierstrass_round_trip():
    rng = random.Random(31337)
    done = 0
    while done < 200:
        p = rng.choice([2, 3, 5])
        k, D = rng.randint(8, 24), rng.randint(1, 9)
        mu = rng.choice([0, 0, 1, 2])
        coeffs = [rng.randrange(p ** k) * p ** mu for _ in range(D)]
        f = LambdaElement.from_T(coeffs, p, k, D)
        if f.is_zero():
            continue
        wd = weierstrass_prepare(f)
        mod = p ** (wd.precision + wd.mu)
        assert [c % mod for c in wd.recompose(D).coeffs] == [c % mod for c in f.coeffs]
        P = wd.distinguished.poly()
        assert P[-1] == 1 and len(P) == wd.lam + 1
        assert all(c % p == 0 for c in P[:-1])
        assert wd.unit.coeffs[0] % p != 0
        done += 1


def _brute_quotient_exponent(g, p, n):
    """p-exponent of Z[T]/(ν_{p^n}) modulo multiplication by g, by Smith normal form."""
    nu = nu_poly(p, n).poly()
    d = len(nu) - 1
    if d == 0:
        return 0
    big = p ** 200
    rows = []
    for i in range(d):
        x = poly_mul(g, [0] * i + [1], big)
        r = poly_divmod_monic(x, nu, big)[1]
        r = [c if c <= big // 2 else c - big for c in r]
        rows.append((r + [0] * d)[:d])
    grp, _ = smith_normal_form(rows, d, d)
    e = p_exponent(grp, p)
    return INFINITE if e is None else e


@pytest.mark.acceptance(7, "Lambda-quotient orders")
def test_criterion_7_quotient_laws():
    for p in (2, 3):
        T = LambdaElement.from_T([0, 1], p, 64)
        T2 = LambdaElement.from_T([0, 0, 1], p, 64)
        Tp = LambdaElement.from_T([p, 1], p, 64)
        cases = [
            (LambdaModuleNF(p, 0, ((T, 1),)), [0, 1]),
            (LambdaModuleNF(p, 0, ((T2, 1),)), [0, 0, 1]),
            (LambdaModuleNF(p, 0, (), (1,)), [p]),
            (LambdaModuleNF(p, 0, ((Tp, 1),)), [p, 1]),
        ]
        for n in range(1, 4):
            for nf, g in cases:
                assert nf_quotient_order(nf, n) == _brute_quotient_exponent(g, p, n), (p, n, g)
        for j in (1, 2):
            nf = LambdaModuleNF(p, 0, ((cyclotomic_p_power(p, j), 1),))
            for n in range(1, 4):
                assert (nf_quotient_order(nf, n) == INFINITE) == (n >= j)
                assert _brute_quotient_exponent(cyclotomic_p_power(p, j).poly(), p, n) == \
                    nf_quotient_order(nf, n)


@pytest.mark.acceptance(8, "Tate cohomology suite")
def test_criterion_8_tate_suite():
    for p in (2, 3, 5):
        G = regular_module(p)
        assert tate(G, 0).order() == 1 and tate(G, 1).order() == 1
        Z = trivial_module(p)
        assert tate(Z, 0).invariant_factors == (p,) and tate(Z, 1).order() == 1
        for s in (2, 3, 4):
            A = augmentation_kernel_model(p, s)
            assert tate(A, 0).order() == 1
            assert tate(A, 1).invariant_factors == (p,) * (s - 1)
            sub, _ = sublattice_model(p, s)
            assert herbrand_quotient(sub) == p ** s
    rng = random.Random(99)
    for _ in range(100):
        m = rng.choice([2, 3, 4, 5, 6])
        M = random_module(m, rng)
        gens = [[rng.randint(-2, 2) for _ in range(M.ambient_rank)] for _ in range(rng.randint(1, 2))]
        A, C = submodule_and_quotient(M, gens)
        assert herbrand_quotient(M) == herbrand_quotient(A) * herbrand_quotient(C)
