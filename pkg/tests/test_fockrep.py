import pytest

from qloop.scalars import RatFunc, expand, residue_by_derivative
from qloop.fockrep import (
    SHIFTED,
    UNSHIFTED,
    FixedPointRep,
    FramingData,
    basis,
    central_element,
    check_relations,
    psi_closed_form,
    psi_data,
    psi_function,
    psi_lambda_route,
    psi_series,
    scale,
    taut_class,
)

q, u = RatFunc.var("q"), RatFunc.var("u")
chi1, chi2, chi3 = (RatFunc.var(f"chi{s}") for s in (1, 2, 3))


def test_framing_validation():
    with pytest.raises(ValueError):
        FramingData(-1)
    with pytest.raises(ValueError):
        FramingData(1, 0)
    with pytest.raises(ValueError):
        FramingData(1, 1, "twisted")


def test_basis():
    fd = FramingData(2)
    assert basis(2, fd) == [(0, 2), (1, 1), (2, 0)]
    assert basis(0, FramingData(0)) == [()] and basis(1, FramingData(0)) == []


def test_tautological_classes():
    assert taut_class((0, 0), FramingData(2)) == []
    assert taut_class((1,), FramingData(1)) == [chi1 * q]
    assert taut_class((2, 1), FramingData(2)) == [chi1 * q, chi1 * q**-1, chi2 * q]


def test_a_minus_entries():
    rep = FixedPointRep(FramingData(1))
    for n in range(-2, 3):
        assert rep.a_minus(n, 0) == {((0,), (1,)): (chi1 * q) ** n}
    assert rep.a_minus(0, 1) == {((1,), (2,)): 1 + q**-2}


def test_a_plus_entries():
    rep = FixedPointRep(FramingData(1))
    assert rep.a_plus(0, 0) == {((1,), (0,)): (1 - q**-2).inverse()}
    assert FixedPointRep(FramingData(0)).a_plus(0, 0) == {}


def test_a_plus_two_framing_poles_against_oracle():
    fd = FramingData(2)
    rep = FixedPointRep(fd)
    f = rep.plus_integrand((0, 0)).to_ratfunc()
    assert rep.plus_entry((0, 0), 0) == residue_by_derivative(f, chi1 * q)
    assert rep.plus_entry((0, 0), 0).involves("chi2")


@pytest.mark.parametrize("mode", [SHIFTED, UNSHIFTED])
def test_every_residue_matches_oracle(mode):
    fd = FramingData(2, 1, mode)
    rep = FixedPointRep(fd)
    for v in range(3):
        for lam in basis(v, fd):
            f = rep.plus_integrand(lam).to_ratfunc()
            for s in range(fd.w):
                point = chi1 * q ** (1 - 2 * lam[0]) if s == 0 else chi2 * q ** (1 - 2 * lam[1])
                assert rep.plus_entry(lam, s) == residue_by_derivative(f, point)


def test_support_pattern():
    fd = FramingData(3)
    rep = FixedPointRep(fd)
    for v in range(3):
        for op in (rep.a_plus(1, v), rep.a_minus(-1, v)):
            for a, b in op:
                diff = sorted(x - y for x, y in zip(a, b))
                assert diff in ([-1, 0, 0], [0, 0, 1])


def test_x_minus_twists():
    sh = FixedPointRep(FramingData(2, 1, SHIFTED))
    un = FixedPointRep(FramingData(2, 1, UNSHIFTED))
    assert sh.x_minus(1, 1) == scale(sh.a_minus(1, 1), q**-1)
    assert un.x_minus(1, 1) == scale(un.a_minus(1 - 2, 1), q**-1)


def test_x_vanish_without_framing():
    rep = FixedPointRep(FramingData(0))
    assert rep.x_plus(0, 0) == {} and rep.x_minus(0, 0) == {}


def test_shifted_vacuum_psi():
    fd = FramingData(1)
    assert psi_function((0,), fd) == u / (u - chi1 * q)
    data = psi_data(FixedPointRep(fd), (0,), 4)
    assert data.psi_minus(-1) == -(chi1 * q).inverse()
    assert data.psi_plus(0).is_one()


def test_unshifted_vacuum_leading_mode():
    for w in range(4):
        fd = FramingData(w, 1, UNSHIFTED)
        assert psi_data(FixedPointRep(fd), (0,) * w, 2).psi_plus(0) == q**w


@pytest.mark.parametrize("mode", [SHIFTED, UNSHIFTED])
@pytest.mark.parametrize("d", [1, 2])
def test_psi_routes_agree(mode, d):
    fd = FramingData(2, d, mode)
    for v in range(4):
        for lam in basis(v, fd):
            f = psi_function(lam, fd)
            assert f == psi_closed_form(lam, fd)
            for direction in ("inf", "zero"):
                assert psi_lambda_route(lam, fd, direction, 5).equals(expand(f, direction, 5))


def test_psi_series_is_diagonal_expansion():
    fd = FramingData(2)
    series = psi_series(2, fd, "inf", 3)
    assert set(series) == set(basis(2, fd))


def test_relations_vacuous_without_framing():
    for mode in (SHIFTED, UNSHIFTED):
        assert check_relations(FramingData(0, 1, mode), 2, 2).ok


def test_relations_w1_shifted():
    report = check_relations(FramingData(1), 2, 2)
    assert report.ok, report.failures[:3]
    assert {"psi-psi", "x-psi", "h-x", "x-x", "x+x-"} <= set(report.counts)


@pytest.mark.parametrize("mode", [SHIFTED, UNSHIFTED])
def test_relations_w2(mode):
    report = check_relations(FramingData(2, 1, mode), 3, 2)
    assert report.ok, report.failures[:3]
    if mode == UNSHIFTED:
        assert report.counts["psi0"] == 4


@pytest.mark.parametrize("mode", [SHIFTED, UNSHIFTED])
def test_relations_non_simply_laced_vertex(mode):
    assert check_relations(FramingData(2, 2, mode), 2, 2).ok


def test_relations_detect_a_wrong_sign(monkeypatch):
    # dropping the sign twist of x+ must break the commutator relation
    monkeypatch.setattr(FixedPointRep, "x_plus", lambda self, n, v: self.a_plus(n, v))
    report = check_relations(FramingData(1), 1, 1)
    assert not report.ok
    assert any(f.startswith("x+x-") for f in report.failures)


def test_central_element_values():
    assert central_element(FramingData(0), 2).values[(0, ())].is_one()
    rep = central_element(FramingData(1), 2)
    assert rep.ok
    assert set(rep.values.values()) == {-(q * chi1).inverse()}
    rep3 = central_element(FramingData(3), 2)
    assert rep3.ok
    assert set(rep3.values.values()) == {-(q**3 * chi1 * chi2 * chi3).inverse()}


def test_central_element_needs_shifted_mode():
    with pytest.raises(ValueError):
        central_element(FramingData(1, 1, UNSHIFTED))
