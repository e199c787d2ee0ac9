import random

import pytest
from hypothesis import given, settings, strategies as st

from qloop.cartan import GradedDimVector, preset
from qloop.charlab import (
    LWeight,
    NormalizationMismatch,
    NotStabilized,
    QCharacter,
    Term,
    YMonomial,
    a_monomial,
    hj_limit_compare,
    is_dominant,
    is_right_negative,
    kr_qcharacter,
    kr_support_character,
    lweight_match,
    monomial_of,
    monomial_product_route,
    prefundamental_qcharacter,
    prefundamental_weight,
    specialness_certificate,
    visible,
    y,
)
from qloop.grassmann import rational_catalog
from qloop.preproj import build_kr_module
from qloop.scalars import RatFunc

D = GradedDimVector
u, zeta = RatFunc.var("u"), RatFunc.var("zeta")


def Y(*factors):
    """Y(i, k, e, i, k, e, ...) with 1-based vertices, as printed."""
    out = YMonomial()
    for n in range(0, len(factors), 3):
        i, k, e = factors[n:n + 3]
        out = out * y(i - 1, k, e)
    return out


# ------------------------------------------------------------- monomials


def test_a_monomials():
    assert a_monomial(0, 4, preset("A1")) == Y(1, 3, 1, 1, 5, 1)
    assert a_monomial(0, 4, preset("A2")) == Y(1, 3, 1, 1, 5, 1, 2, 4, -1)
    b2 = preset("B2")
    assert a_monomial(1, 4, b2) == Y(2, 3, 1, 2, 5, 1, 1, 4, -1)
    assert a_monomial(0, 4, b2) == Y(1, 2, 1, 1, 6, 1, 2, 3, -1, 2, 5, -1)


def test_monomial_render():
    assert Y(1, 0, 1, 2, 3, -2).render() == "Y[1,0] * Y[2,3]^-2"
    assert YMonomial().render() == "1"


def test_monomial_of_examples():
    cd = preset("A1")
    w = D({(0, 0): 1, (0, 4): 2})
    assert monomial_of(w, D(), cd) == Y(1, 0, 1, 1, 4, 2)
    assert monomial_of(D.delta(0, 5), D.delta(0, 6), cd) == Y(1, 7, -1)
    w2 = D({(0, 4): 1, (0, 6): 1})
    v2 = D({(0, 7): 1, (0, 5): 1})
    assert monomial_of(w2, v2, cd) == Y(1, 6, -1, 1, 8, -1)


def test_right_negative_and_dominant():
    m = Y(1, 7, -1)
    assert is_right_negative(m) and not is_dominant(m)
    assert is_dominant(Y(1, 5, 1)) and not is_right_negative(Y(1, 5, 1))
    assert is_right_negative(Y(1, 4, 1, 1, 8, -1))


def test_top_of_empty_monomial():
    with pytest.raises(ValueError):
        YMonomial().top()


_vec = st.dictionaries(st.tuples(st.integers(0, 1), st.integers(-4, 4)), st.integers(0, 2), max_size=4).map(D)


@pytest.mark.parametrize("name", ["A2", "B2", "G2"])
@given(w=_vec, v=_vec)
def test_two_monomial_routes(name, w, v):
    cd = preset(name)
    assert monomial_of(w, v, cd) == monomial_product_route(w, v, cd)


_mono = st.dictionaries(st.tuples(st.integers(0, 1), st.integers(-4, 4)), st.integers(-2, 2), min_size=1, max_size=4)


@pytest.mark.parametrize("name", ["A2", "B2", "G2"])
@given(data=_mono, j=st.integers(0, 1), r=st.integers(-6, 6))
def test_right_negative_closed_under_a_inverse(name, data, j, r):
    m = YMonomial(data)
    if not m or not is_right_negative(m):
        return
    assert is_right_negative(m * a_monomial(j, r, preset(name)).inverse())


# ------------------------------------------------------------ KR characters


def test_kr_a1_l1():
    qc = kr_qcharacter(0, 3, 1, preset("A1"))
    assert qc.as_dict() == {Y(1, 3, 1): 1, Y(1, 5, -1): 1}


def test_kr_a1_l2():
    qc = kr_qcharacter(0, 3, 2, preset("A1"))
    assert qc.as_dict() == {
        Y(1, 2, 1, 1, 4, 1): 1,
        Y(1, 2, 1, 1, 6, -1): 1,
        Y(1, 4, -1, 1, 6, -1): 1,
    }


def test_kr_a2_fundamental():
    qc = kr_qcharacter(0, 3, 1, preset("A2"))
    assert qc.as_dict() == {Y(1, 3, 1): 1, Y(1, 5, -1, 2, 4, 1): 1, Y(2, 6, -1): 1}


def test_kr_rows_are_sorted_by_v():
    rows = kr_qcharacter(0, 0, 2, preset("A1")).rows()
    assert [r[2] for r in rows] == ["0", "[1,2]:1", "[1,0]:1,[1,2]:1"]


def test_kr_from_rational_catalog_matches():
    cd = preset("A2")
    cat = rational_catalog(build_kr_module(1, 0, 2, cd))
    assert kr_qcharacter(1, 0, 2, cd, catalog=cat).as_dict() == kr_qcharacter(1, 0, 2, cd).as_dict()


@pytest.mark.parametrize("name,l", [("A1", 3), ("A2", 2), ("A3", 1), ("D4", 1)])
def test_certificates(name, l):
    cd = preset(name)
    for i in range(cd.n):
        assert specialness_certificate(kr_qcharacter(i, 0, l, cd)).ok


def test_non_thin_kr_coefficient():
    qc = kr_qcharacter(1, 0, 1, preset("D4"))
    assert sorted(qc.as_dict().values()) == [1] * (len(qc) - 1) + [2]


@pytest.mark.parametrize("i", [0, 1])
def test_b2_support_only_certificate(i):
    qc = kr_support_character(i, 0, 1, preset("B2"))
    assert qc.support_only
    assert specialness_certificate(qc).ok


def test_certificate_rejects_two_dominant_monomials():
    top = Y(1, 0, 1)
    qc = QCharacter([Term(top, 1, D()), Term(Y(1, 4, 1), 1, D.delta(0, 2))], top)
    cert = specialness_certificate(qc)
    assert not cert.ok
    assert any("several dominant" in line for line in cert.lines)


def test_certificate_rejects_missing_top():
    cert = specialness_certificate(QCharacter([Term(Y(1, 2, -1), 1, D.delta(0, 1))], Y(1, 0, 1)))
    assert not cert.ok


# --------------------------------------------------------- prefundamental


def A_inv(cd, *pairs):
    out = YMonomial()
    for i, k in pairs:
        out = out * a_monomial(i, k, cd).inverse()
    return out


def test_prefundamental_a1_depth3():
    cd = preset("A1")
    qc = prefundamental_qcharacter(0, 0, 3, cd)
    expected = [YMonomial(), A_inv(cd, (0, 1)), A_inv(cd, (0, 1), (0, -1)), A_inv(cd, (0, 1), (0, -1), (0, -3))]
    assert qc.as_dict() == {m: 1 for m in expected}


def test_prefundamental_depth1_and_depth0():
    cd = preset("A1")
    assert prefundamental_qcharacter(0, 0, 1, cd).as_dict() == {YMonomial(): 1, A_inv(cd, (0, 1)): 1}
    assert prefundamental_qcharacter(0, 0, 0, cd).as_dict() == {YMonomial(): 1}


@pytest.mark.parametrize("name", ["A2", "B2"])
def test_prefundamental_constant_term(name):
    cd = preset(name)
    for i in range(cd.n):
        assert prefundamental_qcharacter(i, 0, 1, cd).by_v()[D()] == 1


def test_visibility():
    cd = preset("A1")
    assert visible(D({(0, 0): 1, (0, 4): 1}), 3, cd)
    assert not visible(D({(0, 0): 1, (0, 6): 1}), 3, cd)


def test_hj_limit_a1():
    cd = preset("A1")
    rep = hj_limit_compare(0, 4, 4, 2, cd)
    assert (rep.index, rep.equal) == (3, True)


def test_hj_limit_depth0():
    rep = hj_limit_compare(0, 0, 3, 0, preset("A1"))
    assert (rep.index, rep.equal) == (1, True)


def test_hj_limit_a2():
    rep = hj_limit_compare(0, 0, 3, 1, preset("A2"))
    assert rep.equal and rep.index <= 3


def test_hj_not_stabilized():
    # at the short B2 vertex two KR lengths are too few for depth 1
    with pytest.raises(NotStabilized):
        hj_limit_compare(1, 0, 2, 1, preset("B2"))
    assert hj_limit_compare(1, 0, 3, 1, preset("B2")).equal


def test_hj_argument_checks():
    with pytest.raises(ValueError):
        hj_limit_compare(0, 0, 0, 0, preset("A1"))


# ------------------------------------------------------------- l-weights


def test_prefundamental_weight():
    cd = preset("A2")
    assert prefundamental_weight(D(), cd) == LWeight((RatFunc.one(), RatFunc.one()))
    single = prefundamental_weight(D.delta(0, 3), cd)
    assert single[0] == (1 - zeta**3 / u).inverse() and single[1].is_one()
    assert prefundamental_weight(D.delta(0, 3, 2), cd)[0] == single[0] ** 2


def test_prefundamental_weight_uses_zeta_i():
    cd = preset("B2")
    assert prefundamental_weight(D.delta(0, 1), cd)[0] == (1 - zeta**2 / u).inverse()


@pytest.mark.parametrize("ks", [[0], [], [0, 3], [2, 2], [-1, 1, 5]])
def test_lweight_match(ks):
    report = lweight_match(ks)
    assert report.ok


def test_lweight_match_single_line():
    report = lweight_match([4])
    assert report.vacuum == u / (u - zeta**4)


def test_lweight_match_d2():
    assert lweight_match([2], d=2).ok


def test_lweight_mismatch_is_reported():
    with pytest.raises(NormalizationMismatch):
        lweight_match([1], unit=RatFunc.var("zeta"))
    assert not lweight_match([1], strict=False, unit=2).ok
