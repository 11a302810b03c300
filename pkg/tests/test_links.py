import pytest

from iwtower.corpus import entries
from iwtower.errors import InvalidTauError, LinkParseError
from iwtower.links import (TauMap, braid_closure_pd, fox_jacobian, fundamental_identity_holds, hosokawa_at_1,
                           linking_matrix, load_link, mirror_pd, multivariable_alexander, one_variable_order,
                           parse_pd, sublink_pd, submatrix, validate_tau)

TREFOIL_PD = [[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]]


def t_poly(coeffs):
    """{(e,): c} from low-first coefficients."""
    return {(i,): c for i, c in enumerate(coeffs) if c}


def test_parse_pd_trefoil():
    K = parse_pd(TREFOIL_PD)
    assert (K.d, len(K.generators), len(K.relators)) == (1, 3, 3)


def test_parse_pd_unknot():
    U = parse_pd([])
    assert (U.d, len(U.generators), len(U.relators)) == (1, 1, 0)
    assert multivariable_alexander(U) == {(0,): 1}


def test_parse_pd_bad_arc():
    with pytest.raises(LinkParseError):
        parse_pd([[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 7, 3]])


def test_fox_fundamental_identity():
    for f in entries("link"):
        J = fox_jacobian(load_link(f))
        assert fundamental_identity_holds(J), f.stem


@pytest.mark.parametrize("name, poly", [
    ("trefoil", {(0,): 1, (1,): -1, (2,): 1}),
    ("figure_eight", {(0,): 1, (1,): -3, (2,): 1}),
    ("hopf", {(0, 0): 1}),
    ("whitehead", {(0, 0): 1, (1, 0): -1, (0, 1): -1, (1, 1): 1}),
    ("torus_link_2_4", {(0, 0): 1, (1, 1): 1}),
])
def test_multivariable_alexander(name, poly):
    assert multivariable_alexander(load_link(name)) == poly


def test_borromean_alexander():
    # (t1-1)(t2-1)(t3-1) up to units
    poly = multivariable_alexander(load_link("borromean"))
    expected = {}
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                expected[(a, b, c)] = (-1) ** (3 - a - b - c)
    assert poly in (expected, {k: -v for k, v in expected.items()})


def test_mirror_keeps_alexander():
    for pd in (TREFOIL_PD, load_link("figure_eight").pd_code):
        assert multivariable_alexander(parse_pd(mirror_pd(pd))) == multivariable_alexander(parse_pd(pd))


def test_wirtinger_input_matches_pd():
    gens = [{"id": g, "component": 0} for g in "abc"]
    W = load_link({"wirtinger": {"generators": gens, "relators": ["a b A C", "b c B A", "c a C B"]}})
    assert multivariable_alexander(W) == {(0,): 1, (1,): -1, (2,): 1}
    with pytest.raises(LinkParseError):
        load_link({"wirtinger": {"generators": gens, "relators": ["a b A D"]}})


def test_one_variable_order_for_links_carries_T():
    # d >= 2: order = (t - 1) Δ_L(t, ..., t)
    assert one_variable_order(load_link("hopf"), [1, 1]) == [-1, 1]
    assert one_variable_order(load_link("torus_link_2_4"), [1, 1]) == [-1, 1, -1, 1]
    assert one_variable_order(load_link("trefoil"), [1]) == [1, -1, 1]


def test_linking_matrices():
    lk = linking_matrix(load_link("example74_L_Sbar"))
    assert (lk[0][1], lk[0][2], lk[1][2]) == (1, 3, 1)
    lk = linking_matrix(load_link("example74_Lprime_S"))
    assert [lk[i][3] for i in range(3)] == [1, 1, 1]
    assert (lk[0][1], lk[0][2], lk[1][2]) == (0, 0, 0)
    unlink = linking_matrix({(0, 1): 0})
    assert unlink == [[0, 0], [0, 0]]


def test_hosokawa():
    assert hosokawa_at_1(linking_matrix(load_link("hopf"))) == 1
    full = linking_matrix(load_link("example74_Lprime_S"))
    assert hosokawa_at_1(submatrix(full, [0, 1, 2, 3])) == 1
    assert hosokawa_at_1(linking_matrix({(0, 1): 0})) == 0
    with pytest.raises(ValueError):
        hosokawa_at_1([[0]])


def test_linking_override_must_be_symmetric():
    with pytest.raises(LinkParseError):
        load_link({"braid": {"word": [1, 1], "strands": 2}, "linking_matrix": [[0, 1], [2, 0]]})


def test_braid_closures():
    pd, free = braid_closure_pd([1, 1, 1], 2)
    assert free == 0 and parse_pd(pd).d == 1
    pd, free = braid_closure_pd([1], 3)
    assert free == 1
    with pytest.raises(LinkParseError):
        braid_closure_pd([3], 3)


def test_sublink_drops_axis():
    L = load_link("example74_L_Sbar")
    pd, free = sublink_pd(L.pd_code, [0, 1])
    H = parse_pd(pd, "", free)
    assert H.d == 2 and linking_matrix(H)[0][1] == 1
    assert multivariable_alexander(H) == {(0, 0): 1}


def test_validate_tau():
    hopf = load_link("hopf")
    prof = validate_tau(hopf, TauMap.tln(2, 3))
    assert prof.branched == (0, 1) and prof.totally_branched
    prof = validate_tau(hopf, TauMap.parse([1, "sqrt(-1)"], 5, 8))
    assert prof.branched == (0, 1) and prof.n0 == 0
    prof = validate_tau(hopf, TauMap.parse([1, 4], 2, 8))
    assert prof.n0 == 2 and not prof.totally_branched
    with pytest.raises(InvalidTauError):
        validate_tau(hopf, TauMap.parse([3, 3], 3, 8))
    with pytest.raises(InvalidTauError):
        validate_tau(hopf, TauMap.parse([1], 3, 8))


def test_all_corpus_links_parse():
    for f in entries("link"):
        L = load_link(f)
        assert L.d >= 1 and len(L.names()) == L.d
