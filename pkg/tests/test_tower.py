import pytest

from iwtower.corpus import entries
from iwtower.errors import FitError, HypothesisError, OracleBoundError, PrecisionError, SpecError
from iwtower.iwasawa import INFINITE
from iwtower.links import TauMap, load_link
from iwtower.smith import p_exponent
from iwtower.tower import (QHSData, TowerSpec, alexander_routes_agree, cover_homology, homology_ladder,
                           iwasawa_invariants, level_homology_oracle, level_order_fast, load_tower,
                           qhs3_check, reduced_alexander, sakuma_quotient_check, tln_lambda_shortcut,
                           tower_report)


def spec(link, p, tau=None, **kw):
    L = load_link(link)
    tau = tau if tau is not None else [1] * L.d
    k = kw.pop("precision", 64)
    return TowerSpec(L, TauMap.parse(tau, p, k), p, precision=k, raw_tau=tuple(tau), **kw)


def qhs_spec(p, coeffs, n_max=4, h1=(2,)):
    return TowerSpec(None, TauMap.parse([1], p, 64), p, n_max=n_max, base=QHSData(tuple(h1), tuple(coeffs)))


def test_reduced_alexander_examples():
    assert reduced_alexander(spec("trefoil", 3)).poly() == [1, 1, 1]
    assert reduced_alexander(spec("trefoil", 7)).poly() == [1, 1, 1]
    assert reduced_alexander(spec("unknot", 5)).poly() == [1]
    f = reduced_alexander(spec("figure_eight", 5))
    assert f.poly() == [-1 % 5**64, -1 % 5**64, 1]


def test_reduced_alexander_for_links_has_T_factor():
    assert reduced_alexander(spec("hopf", 3)).poly() == [0, 1]
    assert reduced_alexander(spec("whitehead", 3)).poly() == [0, 0, 0, 1]
    assert reduced_alexander(spec("borromean", 5)).poly() == [0, 0, 0, 0, 1]


def test_unbranched_components_are_dropped():
    s = spec("example74_L_Sbar", 3, [1, 1, 0])
    assert reduced_alexander(s).poly() == [0, 1]
    assert s.profile.unbranched == (2,)


@pytest.mark.parametrize("link, p", [("trefoil", 3), ("figure_eight", 2), ("hopf", 5), ("whitehead", 3),
                                     ("borromean", 2), ("torus_link_2_4", 3), ("example74_L_Sbar", 3)])
def test_alexander_routes_agree(link, p):
    L = load_link(link)
    tau = [1] * L.d if link != "example74_L_Sbar" else [1, 1, 0]
    assert alexander_routes_agree(spec(link, p, tau))


def test_level_order_fast_examples():
    assert level_order_fast(spec("trefoil", 3), 1) == 0
    assert level_order_fast(spec("trefoil", 2), 1) == 0
    for p in (2, 3, 5):
        for n in (1, 2, 3):
            assert level_order_fast(spec("unknot", p), n) == 0


def test_oracle_examples():
    s2, s3 = spec("trefoil", 2), spec("trefoil", 3)
    assert str(level_homology_oracle(s2, 1)) == "Z/3"
    assert str(level_homology_oracle(s3, 1)) == "(Z/2)^2"
    assert str(cover_homology(s2, 6)) == "(Z)^2"
    with pytest.raises(OracleBoundError):
        level_homology_oracle(s3, 3)
    assert str(level_homology_oracle(s3, 3, bound=27)) == "(Z/2)^2"


def test_oracle_sqrt_character_reduces_mod_level():
    s = spec("hopf", 5, [1, "sqrt(-1)"])
    # τ mod 5 = (1, 2): the 5-fold cover of the Hopf link is a lens space L(5, ·)
    assert str(level_homology_oracle(s, 1)) == "Z/5"


def test_qhs3_check():
    assert qhs3_check(spec("trefoil", 2), 1)
    assert qhs3_check(spec("trefoil", 2), 2)
    assert not qhs3_check(qhs_spec(3, [3, 3, 1]), 1)
    assert qhs3_check(qhs_spec(3, [3, 0, 1]), 3)


def test_invariants_examples():
    inv = iwasawa_invariants(spec("trefoil", 3))
    assert (inv.lam, inv.mu, inv.nu) == (0, 0, 0)
    inv = iwasawa_invariants(load_tower("example74_M"))
    assert (inv.lam, inv.mu, inv.nu) == (1, 0, 0)
    inv = iwasawa_invariants(spec("unknot", 2))
    assert (inv.lam, inv.mu, inv.nu) == (0, 0, 0)


def test_invariants_refuse_non_qhs():
    with pytest.raises(HypothesisError):
        iwasawa_invariants(qhs_spec(3, [3, 3, 1], n_max=2))


def test_qhs_base_invariants():
    inv = iwasawa_invariants(qhs_spec(3, [3, 0, 1]))
    assert (inv.lam, inv.mu, inv.nu) == (2, 0, 1)
    inv = iwasawa_invariants(qhs_spec(3, [3]))
    assert (inv.lam, inv.mu, inv.nu) == (0, 1, -1)


def test_fit_error_reports_table():
    # T^9 + 2 over Z_2: level exponents 1, 3, 7, 15, 24, 33 settle only from n = 4
    coeffs = [2] + [0] * 8 + [1]
    with pytest.raises(FitError) as exc:
        iwasawa_invariants(qhs_spec(2, coeffs, n_max=4))
    assert exc.value.table == [(1, 1), (2, 3), (3, 7), (4, 15)]
    inv = iwasawa_invariants(qhs_spec(2, coeffs, n_max=6))
    assert (inv.lam, inv.mu, inv.nu, inv.n0) == (9, 0, -21, 4)


def test_tln_shortcut():
    L = load_link("hopf")
    assert tln_lambda_shortcut(L, 3) == 1
    from iwtower.tower import branched_sublink
    N = branched_sublink(load_tower("example74_N"))[0]
    assert tln_lambda_shortcut(N, 3) == 3
    T26 = load_link({"braid": {"word": [1] * 6, "strands": 2}})
    assert tln_lambda_shortcut(T26, 3) == "inapplicable"
    assert tln_lambda_shortcut(load_link("trefoil"), 3) == "inapplicable"


def test_sakuma_quotient_check():
    r = sakuma_quotient_check(spec("trefoil", 2), 1)
    assert (r["oracle"], r["quotient"], r["equal"]) == (0, 0, True)
    r = sakuma_quotient_check(spec("unknot", 3), 2)
    assert (r["oracle"], r["quotient"]) == (0, 0)
    r = sakuma_quotient_check(spec("figure_eight", 5), 1)
    assert (r["oracle"], r["quotient"], r["group"]) == (0, 0, "(Z/11)^2")
    r = sakuma_quotient_check(spec("whitehead", 3), 2)
    assert (r["oracle"], r["quotient"]) == (6, 6)
    with pytest.raises(HypothesisError):
        sakuma_quotient_check(spec("hopf", 2, [1, 2]), 2)


def test_rebased_tower_matches_oracle_increments():
    s = spec("whitehead", 2, [1, 2])
    assert s.base_level == 1
    lad = homology_ladder(s, 3)
    assert [e.fast_exponent for e in lad.entries] == [0, 4, 8]
    assert [str(e.group) for e in lad.entries] == ["0", "(Z/4)^2", "(Z/2)^2 + (Z/8)^2"]
    assert lad.consistent


def test_rebased_tower_with_infinite_base():
    s = spec("borromean", 2, [1, 2, 1])
    assert not qhs3_check(s, 2)
    lad = homology_ladder(s, 3)
    assert all(e.oracle_exponent == INFINITE and e.fast_exponent == INFINITE for e in lad.entries)


def test_padic_character_ladder():
    s = spec("hopf", 5, [1, "sqrt(-1)"])
    inv = iwasawa_invariants(s)
    assert (inv.lam, inv.mu, inv.nu) == (1, 0, 0)
    s = spec("figure_eight", 5, ["sqrt(-1)"])
    lad = homology_ladder(s, 2)
    assert lad.consistent and lad.entries[0].oracle_exponent == 0


def test_precision_escalation(monkeypatch):
    s = spec("figure_eight", 5, ["sqrt(-1)"], precision=1)
    assert level_order_fast(s, 3) == 0
    monkeypatch.setenv("IWTOWER_PRECISION_CAP", "1")
    with pytest.raises(PrecisionError):
        level_order_fast(spec("figure_eight", 5, ["sqrt(-1)"], precision=1), 3)


def test_spec_validation():
    with pytest.raises(SpecError):
        spec("trefoil", 3, n_max=1)
    with pytest.raises(ValueError):
        spec("trefoil", 4)
    with pytest.raises(SpecError):
        QHSData((0,), (1,))
    with pytest.raises(SpecError):
        load_tower({"link": "trefoil", "p": 3, "schema": "2"})


def test_monotone_and_bounded_rank_on_corpus():
    for f in entries("tower"):
        s = load_tower(f)
        lad = homology_ladder(s)
        fast = [e.fast_exponent for e in lad.entries if isinstance(e.fast_exponent, int)]
        assert fast == sorted(fast), f.stem
        rep = tower_report(s)
        inv = rep["invariants"]
        if inv and inv["mu"] == 0:
            for e in lad.entries:
                if e.group is not None:
                    assert e.group.p_rank(s.p) <= inv["lambda"], f.stem


def test_report_is_deterministic():
    import json
    a = json.dumps(tower_report(load_tower("example74_N")), sort_keys=True)
    b = json.dumps(tower_report(load_tower("example74_N")), sort_keys=True)
    assert a == b


def test_oracle_p_exponent_sanity():
    s = spec("torus_link_2_4", 2, [1, -1])
    g = level_homology_oracle(s, 2)
    assert p_exponent(g, 2) == 5
