"""Exact scalars: Laurent polynomials, rational functions, truncated series,
quantum integers, structure functions and lambda/Adams operations.

All rational functions live in one fixed variable universe ``VARIABLES``
(q, the spectral variables u and v, the transcendental zeta and framing
parameters chi1..chi8).  Arithmetic is backed by FLINT multivariate
polynomials over QQ; no floating point is ever involved.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import flint

from .cartan import CartanData

MAX_FRAMING = 8
VARIABLES: tuple[str, ...] = ("q", "u", "v", "zeta") + tuple(f"chi{s}" for s in range(1, MAX_FRAMING + 1))
NVARS = len(VARIABLES)
_INDEX = {name: i for i, name in enumerate(VARIABLES)}
_CTX = flint.fmpq_mpoly_ctx.get(VARIABLES, "degrevlex")

DEFAULT_ORDER = 6

Exponent = tuple[int, ...]


class NotExpandable(ValueError):
    pass


def var_index(name: str) -> int:
    try:
        return _INDEX[name]
    except KeyError:
        raise KeyError(f"unknown variable {name!r}; known: {', '.join(VARIABLES)}") from None


def chi_name(s: int) -> str:
    """Name of the framing parameter for 0-based slot s."""
    if not 0 <= s < MAX_FRAMING:
        raise ValueError(f"at most {MAX_FRAMING} framing lines are supported")
    return f"chi{s + 1}"


def _unit(i: int, e: int = 1) -> Exponent:
    return tuple(e if j == i else 0 for j in range(NVARS))


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


# ------------------------------------------------------------------ Laurent


class LaurentPoly:
    """Sparse Laurent polynomial over QQ in ``VARIABLES``.  Immutable."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, Fraction | int] | None = None):
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[tuple(e)] = c
        self._terms = clean
        self._hash = hash(frozenset(clean.items()))

    # constructors
    @classmethod
    def const(cls, c: Fraction | int) -> "LaurentPoly":
        return cls({(0,) * NVARS: c})

    @classmethod
    def var(cls, name: str, e: int = 1) -> "LaurentPoly":
        return cls({_unit(var_index(name), e): 1})

    @classmethod
    def monomial(cls, exps: Mapping[str, int], c: Fraction | int = 1) -> "LaurentPoly":
        e = [0] * NVARS
        for name, k in exps.items():
            e[var_index(name)] += k
        return cls({tuple(e): c})

    # access
    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def monomial_exponent(self) -> Exponent:
        if not self.is_monomial():
            raise ValueError("not a monomial")
        return next(iter(self._terms))

    # arithmetic
    def __add__(self, other: "LaurentPoly | int | Fraction") -> "LaurentPoly":
        other = _as_laurent(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "LaurentPoly | int | Fraction") -> "LaurentPoly":
        return self + (-_as_laurent(other))

    def __rsub__(self, other: "LaurentPoly | int | Fraction") -> "LaurentPoly":
        return _as_laurent(other) - self

    def __mul__(self, other: "LaurentPoly | int | Fraction") -> "LaurentPoly":
        other = _as_laurent(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = _add_exp(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only for monomials")
            (e, c), = self._terms.items()
            return LaurentPoly({tuple(k * x for x in e): Fraction(c) ** k})
        out = LaurentPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return self._hash

    def subs_power(self, name: str, factor: int) -> "LaurentPoly":
        """Substitute name -> name^factor (e.g. q -> q^d)."""
        i = var_index(name)
        return LaurentPoly(
            {tuple(x * factor if j == i else x for j, x in enumerate(e)): c for e, c in self._terms.items()}
        )

    def to_ratfunc(self) -> "RatFunc":
        if not self._terms:
            return RatFunc.zero()
        shift = [min(0, min(e[i] for e in self._terms)) for i in range(NVARS)]
        num = _CTX.from_dict(
            {tuple(x - s for x, s in zip(e, shift)): flint.fmpq(c.numerator, c.denominator) for e, c in self._terms.items()}
        )
        den = _CTX.from_dict({tuple(-s for s in shift): 1})
        return RatFunc(num, den)

    def render(self) -> str:
        return render_terms(self._terms)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"LaurentPoly({self.render()})"


def _as_laurent(x: "LaurentPoly | int | Fraction") -> LaurentPoly:
    return x if isinstance(x, LaurentPoly) else LaurentPoly.const(x)


def _render_monomial(e: Exponent) -> str:
    parts = []
    for name, k in zip(VARIABLES, e):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def render_terms(terms: Mapping[Exponent, Fraction | int]) -> str:
    """Canonical rendering: terms by descending exponent tuple in variable order.

    Grammar: ``term (' + ' | ' - ') term ...`` where a term is
    ``coeff*var^e*...``; coefficient 1 is omitted unless the monomial is 1,
    and ``^e`` is omitted when e == 1.  Zero renders as ``0``.
    """
    if not terms:
        return "0"
    out = []
    for e in sorted(terms, reverse=True):
        c = Fraction(terms[e])
        mono = _render_monomial(e)
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f" + {body}" if c > 0 else f" - {body}")
    return "".join(out)


# ----------------------------------------------------------------- RatFunc


def _poly_from_int(c: int | Fraction) -> flint.fmpq_mpoly:
    c = Fraction(c)
    return _CTX.from_dict({(0,) * NVARS: flint.fmpq(c.numerator, c.denominator)}) if c else _CTX.from_dict({})


class RatFunc:
    """Reduced fraction num/den of FLINT polynomials; den is monic (leading
    coefficient 1 in degrevlex order).  Laurent monomials live in den."""

    __slots__ = ("num", "den")

    def __init__(self, num: flint.fmpq_mpoly, den: flint.fmpq_mpoly | None = None, *, reduced: bool = False):
        if den is None:
            den = _ONE_POLY
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not reduced:
            if num.is_zero():
                den = _ONE_POLY
            else:
                if not den.is_constant():
                    g = num.gcd(den)
                    if not g.is_one():
                        num = num / g
                        den = den / g
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self.num = num
        self.den = den

    @classmethod
    def zero(cls) -> "RatFunc":
        return _ZERO

    @classmethod
    def one(cls) -> "RatFunc":
        return _ONE

    @classmethod
    def const(cls, c: int | Fraction) -> "RatFunc":
        return cls(_poly_from_int(c), _ONE_POLY, reduced=True)

    @classmethod
    def var(cls, name: str, e: int = 1) -> "RatFunc":
        return LaurentPoly.var(name, e).to_ratfunc()

    # arithmetic
    def __add__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        other = _as_rat(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        # Henrici: with g = gcd(d1, d2) only g can share factors with the new numerator
        g = self.den.gcd(other.den)
        if g.is_one():
            return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den, reduced=True)
        d1, d2 = self.den / g, other.den / g
        num = self.num * d2 + other.num * d1
        if num.is_zero():
            return _ZERO
        den = d1 * other.den
        h = num.gcd(g)
        if not h.is_one():
            num, den = num / h, den / h
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RatFunc(num, den, reduced=True)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, reduced=True)

    def __sub__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        return self + (-_as_rat(other))

    def __rsub__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        return _as_rat(other) - self

    def __mul__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        other = _as_rat(other)
        if self.num.is_zero() or other.num.is_zero():
            return _ZERO
        if other.den.is_one() and other.num.is_constant():
            return RatFunc(self.num * other.num, self.den, reduced=True)
        if self.den.is_one() and self.num.is_constant():
            return RatFunc(other.num * self.num, other.den, reduced=True)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        return self * _as_rat(other).inverse()

    def __rtruediv__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        return _as_rat(other) * self.inverse()

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num**k, self.den**k, reduced=True)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((tuple(self.num.to_dict().items()), tuple(self.den.to_dict().items())))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    # calculus in one variable
    def degree_in(self, name: str) -> tuple[int, int]:
        i = var_index(name)
        return self.num.degrees()[i], self.den.degrees()[i]

    def involves(self, name: str) -> bool:
        n, d = self.degree_in(name)
        return bool(n or d)

    def derivative(self, name: str) -> "RatFunc":
        n, d = self.num, self.den
        return RatFunc(n.derivative(name) * d - n * d.derivative(name), d * d)

    def subs(self, name: str, value: "RatFunc | int | Fraction") -> "RatFunc":
        """Substitute a rational function for one variable (Horner on both parts)."""
        value = _as_rat(value)
        num = _horner(coefficients_in(self.num, name), value)
        den = _horner(coefficients_in(self.den, name), value)
        if den.is_zero():
            raise ZeroDivisionError(f"denominator vanishes at {name} = {value}")
        return num / den

    def specialize_power(self, name: str, factor: int) -> "RatFunc":
        """name -> name^factor, factor >= 1."""
        i = var_index(name)
        gens = list(_CTX.gens())
        gens[i] = gens[i] ** factor
        return RatFunc(self.num.compose(*gens), self.den.compose(*gens))

    def as_laurent(self) -> LaurentPoly:
        """Exact conversion when the denominator is a monomial."""
        dd = self.den.to_dict()
        if len(dd) != 1:
            raise ValueError(f"{self} is not a Laurent polynomial")
        (de, dc), = dd.items()
        out = {}
        for e, c in self.num.to_dict().items():
            out[tuple(x - y for x, y in zip(e, de))] = Fraction(int(c.p), int(c.q)) / Fraction(int(dc.p), int(dc.q))
        return LaurentPoly(out)

    def render(self) -> str:
        n = render_terms(_fmpq_dict(self.num))
        if self.den.is_one():
            return n
        d = render_terms(_fmpq_dict(self.den))
        return f"({n})/({d})"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"RatFunc({self.render()})"


def _fmpq_dict(p: flint.fmpq_mpoly) -> dict[Exponent, Fraction]:
    return {tuple(e): Fraction(int(c.p), int(c.q)) for e, c in p.to_dict().items()}


def _as_rat(x: "RatFunc | LaurentPoly | int | Fraction") -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, LaurentPoly):
        return x.to_ratfunc()
    return RatFunc.const(x)


_ONE_POLY = _CTX.from_dict({(0,) * NVARS: 1})
_ZERO = RatFunc(_CTX.from_dict({}), _ONE_POLY, reduced=True)
_ONE = RatFunc(_ONE_POLY, _ONE_POLY, reduced=True)


def as_ratfunc(x: "RatFunc | LaurentPoly | int | Fraction") -> RatFunc:
    return _as_rat(x)


def coefficients_in(p: flint.fmpq_mpoly, name: str) -> dict[int, RatFunc]:
    """Split a polynomial by powers of one variable."""
    i = var_index(name)
    groups: dict[int, dict[Exponent, flint.fmpq]] = {}
    for e, c in p.to_dict().items():
        k = e[i]
        rest = tuple(0 if j == i else x for j, x in enumerate(e))
        groups.setdefault(k, {})[rest] = c
    return {k: RatFunc(_CTX.from_dict(t), _ONE_POLY, reduced=True) for k, t in groups.items()}


def _horner(coeffs: Mapping[int, RatFunc], x: RatFunc) -> RatFunc:
    if not coeffs:
        return _ZERO
    top = max(coeffs)
    acc = _ZERO
    for k in range(top, -1, -1):
        acc = acc * x + coeffs.get(k, _ZERO)
    return acc


def q_power(d: int, e: int = 1) -> RatFunc:
    """(q^d)^e."""
    return RatFunc.var("q", d * e)


# ------------------------------------------------------------------ series


@dataclass(frozen=True)
class LSeries:
    """Truncated Laurent series in s, where s = 1/u ('inf') or s = u ('zero').

    ``coeffs`` maps s-exponents to u-free rational functions; every
    exponent below ``prec`` (inclusive) is known, anything above is unknown.
    """

    direction: str
    coeffs: Mapping[int, RatFunc]
    prec: int

    def __post_init__(self) -> None:
        if self.direction not in ("inf", "zero"):
            raise NotExpandable(f"unknown direction {self.direction!r}")

    @property
    def valuation(self) -> int | None:
        nz = [k for k, c in self.coeffs.items() if not c.is_zero()]
        return min(nz) if nz else None

    @property
    def order(self) -> int:
        val = self.valuation
        return self.prec - (val if val is not None else 0)

    def s_coeff(self, k: int) -> RatFunc:
        if k > self.prec:
            raise ValueError(f"coefficient s^{k} beyond truncation s^{self.prec}")
        return self.coeffs.get(k, _ZERO)

    def u_coeff(self, e: int) -> RatFunc:
        """Coefficient of u^e."""
        return self.s_coeff(-e if self.direction == "inf" else e)

    def _check(self, other: "LSeries") -> None:
        if self.direction != other.direction:
            raise ValueError("series expanded in different directions")

    def __add__(self, other: "LSeries") -> "LSeries":
        self._check(other)
        prec = min(self.prec, other.prec)
        keys = {k for k in list(self.coeffs) + list(other.coeffs) if k <= prec}
        return LSeries(self.direction, {k: self.coeffs.get(k, _ZERO) + other.coeffs.get(k, _ZERO) for k in keys}, prec)

    def __neg__(self) -> "LSeries":
        return LSeries(self.direction, {k: -c for k, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other: "LSeries") -> "LSeries":
        return self + (-other)

    def scale(self, c: RatFunc | int | Fraction) -> "LSeries":
        c = _as_rat(c)
        return LSeries(self.direction, {k: c * x for k, x in self.coeffs.items()}, self.prec)

    def __mul__(self, other: "LSeries") -> "LSeries":
        self._check(other)
        v1, v2 = self.valuation, other.valuation
        if v1 is None or v2 is None:
            return LSeries(self.direction, {}, min(self.prec + (v2 or 0), other.prec + (v1 or 0)))
        prec = min(self.prec + v2, other.prec + v1)
        out: dict[int, RatFunc] = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = k1 + k2
                if k <= prec:
                    out[k] = out.get(k, _ZERO) + c1 * c2
        return LSeries(self.direction, out, prec)

    def truncate(self, prec: int) -> "LSeries":
        return LSeries(self.direction, {k: c for k, c in self.coeffs.items() if k <= prec}, min(prec, self.prec))

    def equals(self, other: "LSeries") -> bool:
        """Coefficientwise equality up to the common precision."""
        self._check(other)
        prec = min(self.prec, other.prec)
        keys = {k for k in list(self.coeffs) + list(other.coeffs) if k <= prec}
        return all(self.coeffs.get(k, _ZERO) == other.coeffs.get(k, _ZERO) for k in keys)

    def exp(self) -> "LSeries":
        """exp of a series with positive valuation (constant term 1 result)."""
        val = self.valuation
        if val is not None and val < 1:
            raise NotExpandable("exp needs a series without constant or polar part")
        out: dict[int, RatFunc] = {0: _ONE}
        # e' = f' e  (coefficient recursion k e_k = sum_j j f_j e_{k-j})
        for k in range(1, self.prec + 1):
            acc = _ZERO
            for j in range(1, k + 1):
                fj = self.coeffs.get(j)
                if fj is not None and not fj.is_zero():
                    acc = acc + fj * out.get(k - j, _ZERO) * j
            out[k] = acc / k
        return LSeries(self.direction, out, self.prec)

    def log(self) -> "LSeries":
        """log of a series with constant term 1 and no polar part."""
        if self.valuation != 0 or not self.s_coeff(0).is_one():
            raise NotExpandable("log needs a series of the form 1 + O(s)")
        out: dict[int, RatFunc] = {}
        # f'/f = g'  =>  k g_k = k f_k - sum_{j<k} j g_j f_{k-j}
        for k in range(1, self.prec + 1):
            acc = self.coeffs.get(k, _ZERO) * k
            for j in range(1, k):
                gj = out.get(j)
                fk = self.coeffs.get(k - j)
                if gj is not None and fk is not None:
                    acc = acc - gj * fk * j
            out[k] = acc / k
        return LSeries(self.direction, out, self.prec)

    def render(self) -> str:
        sgn = -1 if self.direction == "inf" else 1
        parts = [f"({c})*u^{sgn * k}" for k, c in sorted(self.coeffs.items()) if not c.is_zero()]
        return " + ".join(parts) + f" + O(u^{sgn * (self.prec + 1)})"


def expand(f: RatFunc | LaurentPoly, direction: str, order: int = DEFAULT_ORDER, var: str = "u") -> LSeries:
    """Expand f in powers of var^-1 ('inf') or var ('zero').

    ``order`` counts terms beyond the leading one, so the result knows
    s^val .. s^(val + order).
    """
    f = _as_rat(f)
    if direction not in ("inf", "zero"):
        raise NotExpandable(f"unknown direction {direction!r}")
    if order < 0:
        raise NotExpandable("order must be non-negative")
    if f.is_zero():
        return LSeries(direction, {}, order)
    num = coefficients_in(f.num, var)
    den = coefficients_in(f.den, var)
    # rewrite each part as s^shift * (series in s with unit constant term)
    if direction == "inf":
        nn, dd = max(num), max(den)
        ns = {nn - k: c for k, c in num.items()}
        ds = {dd - k: c for k, c in den.items()}
        val = dd - nn
    else:
        nn, dd = min(num), min(den)
        ns = {k - nn: c for k, c in num.items()}
        ds = {k - dd: c for k, c in den.items()}
        val = nn - dd
    inv0 = ds[0].inverse()
    quot: dict[int, RatFunc] = {}
    for k in range(order + 1):
        acc = ns.get(k, _ZERO)
        for j in range(1, k + 1):
            dj = ds.get(j)
            if dj is not None:
                acc = acc - dj * quot[k - j]
        quot[k] = acc * inv0
    return LSeries(direction, {k + val: c for k, c in quot.items() if not c.is_zero()}, val + order)


# --------------------------------------------------------- q-combinatorics


def quantum_int(m: int, d: int = 1) -> LaurentPoly:
    """[m]_{q^d} = (q^{dm} - q^{-dm}) / (q^d - q^{-d})."""
    if d <= 0:
        raise ValueError("d must be positive")
    if m < 0:
        return -quantum_int(-m, d)
    return LaurentPoly({_unit(0, d * (m - 1 - 2 * j)): 1 for j in range(m)})


def g_func(i: int, j: int, cd: CartanData, var: str = "u") -> RatFunc:
    """g_ij(u) = (q_i^{-c_ij} u - 1) / (u - q_i^{-c_ij}),  q_i = q^{d_i}."""
    a = q_power(1, -cd.b(i, j))
    u = RatFunc.var(var)
    return (a * u - 1) / (u - a)


# ------------------------------------------------------- virtual characters


class VirtualCharacter:
    """Signed multiset of monomial characters (Laurent monomials)."""

    __slots__ = ("_mult",)

    def __init__(self, mult: Mapping[Exponent, int] | Iterable[tuple[Exponent, int]] = ()):
        items = mult.items() if isinstance(mult, Mapping) else mult
        acc: Counter[Exponent] = Counter()
        for e, k in items:
            acc[tuple(e)] += int(k)
        self._mult = {e: k for e, k in acc.items() if k}

    @classmethod
    def from_laurent(cls, p: LaurentPoly) -> "VirtualCharacter":
        mult = {}
        for e, c in p.terms.items():
            if c.denominator != 1:
                raise ValueError("virtual characters need integer multiplicities")
            mult[e] = int(c)
        return cls(mult)

    @classmethod
    def of(cls, *chars: LaurentPoly, sign: int = 1) -> "VirtualCharacter":
        return cls([(c.monomial_exponent(), sign) for c in chars])

    @property
    def multiplicities(self) -> Mapping[Exponent, int]:
        return self._mult

    def rank(self) -> int:
        return sum(self._mult.values())

    def __add__(self, other: "VirtualCharacter") -> "VirtualCharacter":
        return VirtualCharacter(list(self._mult.items()) + list(other._mult.items()))

    def __neg__(self) -> "VirtualCharacter":
        return VirtualCharacter({e: -k for e, k in self._mult.items()})

    def __sub__(self, other: "VirtualCharacter") -> "VirtualCharacter":
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VirtualCharacter) and self._mult == other._mult

    def __hash__(self) -> int:
        return hash(frozenset(self._mult.items()))

    def to_laurent(self) -> LaurentPoly:
        return LaurentPoly({e: k for e, k in self._mult.items()})

    def dual(self) -> "VirtualCharacter":
        return VirtualCharacter({tuple(-x for x in e): k for e, k in self._mult.items()})

    def __iter__(self) -> Iterator[tuple[Exponent, int]]:
        return iter(sorted(self._mult.items()))


def adams(E: VirtualCharacter, m: int) -> VirtualCharacter:
    """psi^m: every character raised to the m-th power."""
    if m < 1:
        raise ValueError("Adams operations need m >= 1")
    return VirtualCharacter({tuple(m * x for x in e): k for e, k in E.multiplicities.items()})


def lambda_u(E: VirtualCharacter, sign: int = 1, var: str = "u") -> RatFunc:
    """Lambda_{-x}(E) with x = u (sign=+1) or x = 1/u (sign=-1)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    x = RatFunc.var(var, sign)
    out = _ONE
    for e, k in E.multiplicities.items():
        factor = 1 - x * LaurentPoly({e: 1}).to_ratfunc()
        out = out * factor**k
    return out


def log_lambda_series(E: VirtualCharacter, order: int = DEFAULT_ORDER, var: str = "u") -> LSeries:
    """-sum_{m=1..order} psi^m(E) u^m / m, as a series in u."""
    coeffs = {m: adams(E, m).to_laurent().to_ratfunc() * Fraction(-1, m) for m in range(1, order + 1)}
    return LSeries("zero", coeffs, order)


# ------------------------------------------------------ linear factor products


class LinearFactors:
    """c * u^e * prod_r (u - r)^{m_r}, roots r in the u-free field.

    Used for exact evaluation and simple-pole residues by partial-fraction
    extraction: equal roots are merged so cancellations are explicit.
    """

    def __init__(self, const: RatFunc | int = 1, upow: int = 0, roots: Iterable[tuple[RatFunc, int]] = ()):
        self.const = _as_rat(const)
        self.upow = upow
        acc: dict[RatFunc, int] = {}
        for r, m in roots:
            if r.is_zero():
                self.upow += m
                continue
            acc[r] = acc.get(r, 0) + m
        self.roots = {r: m for r, m in acc.items() if m}

    def times(self, other: "LinearFactors") -> "LinearFactors":
        return LinearFactors(self.const * other.const, self.upow + other.upow,
                             list(self.roots.items()) + list(other.roots.items()))

    def evaluate(self, point: RatFunc) -> RatFunc:
        out = self.const * point**self.upow
        for r, m in self.roots.items():
            diff = point - r
            if diff.is_zero():
                if m < 0:
                    raise ZeroDivisionError("evaluation at a pole")
                return _ZERO
            out = out * diff**m
        return out

    def residue(self, point: RatFunc) -> RatFunc:
        """Residue at a simple pole ``point`` (a root of multiplicity -1)."""
        m = self.roots.get(point, 0)
        if m == 0:
            return _ZERO
        if m != -1:
            raise ValueError(f"pole of order {-m} at {point}; only simple poles are supported")
        rest = LinearFactors(self.const, self.upow, [(r, k) for r, k in self.roots.items() if r != point])
        return rest.evaluate(point)

    def poles(self) -> list[RatFunc]:
        return [r for r, m in self.roots.items() if m < 0]

    def to_ratfunc(self, var: str = "u") -> RatFunc:
        u = RatFunc.var(var)
        out = self.const * u**self.upow
        for r, m in self.roots.items():
            out = out * (u - r) ** m
        return out


def residue_by_derivative(f: RatFunc, point: RatFunc, var: str = "u") -> RatFunc:
    """Res_{var=point} f = N(point) / D'(point) for a simple pole; used as an oracle."""
    n = RatFunc(f.num, _ONE_POLY, reduced=True)
    d = RatFunc(f.den, _ONE_POLY, reduced=True)
    if not d.subs(var, point).is_zero():
        return _ZERO
    dd = d.derivative(var).subs(var, point)
    if dd.is_zero():
        raise ValueError("pole is not simple")
    return n.subs(var, point) / dd
