import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qloop.cartan import preset
from qloop.scalars import (
    LaurentPoly,
    LinearFactors,
    LSeries,
    NotExpandable,
    RatFunc,
    VirtualCharacter,
    adams,
    expand,
    g_func,
    lambda_u,
    log_lambda_series,
    quantum_int,
    residue_by_derivative,
)

q, u = RatFunc.var("q"), RatFunc.var("u")
chi = RatFunc.var("chi1")


def lp(**exps):
    return LaurentPoly.monomial(exps)


# ------------------------------------------------------------ quantum ints


def test_quantum_int_examples():
    assert quantum_int(1) == LaurentPoly.const(1)
    assert quantum_int(2) == lp(q=1) + lp(q=-1)
    assert quantum_int(3, 2) == lp(q=4) + LaurentPoly.const(1) + lp(q=-4)


def test_quantum_int_defining_quotient():
    for m in range(-3, 6):
        for d in (1, 2, 3):
            lhs = quantum_int(m, d).to_ratfunc() * (q**d - q**-d)
            assert lhs == q ** (d * m) - q ** (-d * m)


def test_quantum_int_rejects_bad_d():
    with pytest.raises(ValueError):
        quantum_int(2, 0)


# ---------------------------------------------------------- rational funcs


def test_ratfunc_normal_form():
    f = (u**2 - 1) / (u - 1)
    assert f == u + 1
    assert (u / u).is_one()
    assert (u - u).is_zero()


def test_ratfunc_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        RatFunc.one() / RatFunc.zero()


def test_subs_and_derivative():
    f = (u - q) / (u + q)
    assert f.subs("u", q).is_zero()
    assert f.derivative("u") == 2 * q / (u + q) ** 2


_small = st.integers(-3, 3)


@st.composite
def ratfuncs(draw):
    num = sum((c * u**a * q**b for c, a, b in draw(st.lists(st.tuples(_small, st.integers(0, 2), _small), max_size=3))),
              RatFunc.zero())
    den = u ** draw(st.integers(0, 2)) + q ** draw(_small) * draw(st.integers(1, 3))
    return num / den


@settings(max_examples=40, deadline=None)
@given(a=ratfuncs(), b=ratfuncs(), c=ratfuncs())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == RatFunc.zero()
    if not a.is_zero():
        assert (a * a.inverse()).is_one()


# ------------------------------------------------------------ structure g


def test_g_orthogonal_vertices_is_one():
    cd = preset("A3")
    assert g_func(0, 2, cd).is_one()


def test_g_a1():
    cd = preset("A1")
    assert g_func(0, 0, cd) == (q**-2 * u - 1) / (u - q**-2)


@pytest.mark.parametrize("name", ["A2", "B2", "G2", "C3"])
def test_g_symmetric_and_unitary(name):
    cd = preset(name)
    for i in range(cd.n):
        for j in range(cd.n):
            g = g_func(i, j, cd)
            assert g == g_func(j, i, cd)
            assert (g * g.subs("u", u.inverse())).is_one()


# -------------------------------------------------------------- expansions


def test_geometric_series():
    a = chi
    s = expand(1 / (1 - a / u), "inf", 2)
    assert [s.u_coeff(-e) for e in range(3)] == [1, a, a**2]


def test_expand_at_infinity_and_zero():
    f = u / (u - chi * q)
    inf = expand(f, "inf", 1)
    assert inf.u_coeff(0).is_one() and inf.u_coeff(-1) == chi * q
    zero = expand(f, "zero", 1)
    assert zero.valuation == 1
    assert zero.u_coeff(1) == -(chi * q).inverse()
    assert zero.u_coeff(2) == -(chi * q) ** -2


def test_expand_beyond_precision():
    s = expand(u / (u - 1), "inf", 2)
    with pytest.raises(ValueError):
        s.u_coeff(-3)


def test_expand_bad_direction():
    with pytest.raises(NotExpandable):
        expand(u, "sideways")


@settings(max_examples=30, deadline=None)
@given(a=ratfuncs(), b=ratfuncs(), direction=st.sampled_from(["inf", "zero"]))
def test_expand_is_a_ring_homomorphism(a, b, direction):
    n = 4
    assert expand(a + b, direction, n).equals(expand(a, direction, n) + expand(b, direction, n))
    ea, eb = expand(a, direction, n), expand(b, direction, n)
    assert expand(a * b, direction, n).equals(ea * eb)


def test_exp_log_inverse():
    s = LSeries("zero", {1: q, 2: chi, 3: RatFunc.const(Fraction(1, 2))}, 6)
    assert s.exp().log().equals(s)


# ------------------------------------------------------ lambda and adams


def test_lambda_examples():
    assert lambda_u(VirtualCharacter()).is_one()
    E = VirtualCharacter.of(chi.as_laurent())
    assert lambda_u(E) == 1 - u * chi
    assert lambda_u(-E) == (1 - u * chi).inverse()


def test_adams_examples():
    E = VirtualCharacter.of((chi * q).as_laurent())
    assert adams(E, 1) == E
    assert adams(E, 2) == VirtualCharacter.of((chi**2 * q**2).as_laurent())
    with pytest.raises(ValueError):
        adams(E, 0)


def random_virtual(rng: random.Random, lines: int = 4) -> VirtualCharacter:
    chars = []
    for _ in range(rng.randint(0, lines)):
        mono = q ** rng.randint(-3, 3) * RatFunc.var(f"chi{rng.randint(1, 3)}") ** rng.randint(-1, 1)
        chars.append((mono.as_laurent(), rng.choice([1, 1, -1])))
    return VirtualCharacter([(m.monomial_exponent(), s) for m, s in chars])


def wa_identity_holds(E: VirtualCharacter, order: int = 6) -> bool:
    lhs = expand(lambda_u(E), "zero", order).log()
    return lhs.equals(log_lambda_series(E, order))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_wa_identity(seed):
    assert wa_identity_holds(random_virtual(random.Random(seed)))


# ---------------------------------------------------------------- residues


def test_residue_matches_derivative_oracle():
    a, b = chi * q, chi * q**-1
    lf = LinearFactors(q, 1, [(a, -1), (b, -1), (q**2, 1)])
    f = lf.to_ratfunc()
    for pole in (a, b):
        assert lf.residue(pole) == residue_by_derivative(f, pole)
    assert lf.residue(q**5).is_zero()


def test_residue_rejects_double_pole():
    lf = LinearFactors(1, 0, [(chi, -2)])
    with pytest.raises(ValueError):
        lf.residue(chi)


def test_evaluate_at_pole_raises():
    with pytest.raises(ZeroDivisionError):
        LinearFactors(1, 0, [(chi, -1)]).evaluate(chi)
