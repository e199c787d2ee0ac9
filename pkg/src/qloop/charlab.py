"""q-characters and l-weights assembled from the Grassmannian pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .cartan import CartanData, GradedDimVector, Key, preset, validate_cartan, weight_shift
from .fockrep import SHIFTED, FramingData, psi_function
from .grassmann import (
    DEFAULT_BOUND,
    NoCountingPolynomial,
    SubmoduleCatalog,
    fp_catalog,
    graded_support,
)
from .preproj import build_injective_trunc, build_kr_module
from .scalars import RatFunc, chi_name

# A framing line chi_s carries the spectral parameter a = chi_s q_i, and the
# vacuum psi-function equals Psi_{-w} exactly (the normalization unit is 1).
SPECTRAL_SHIFT = 1
NORMALIZATION_UNIT = 1


class EmptyMonomial(ValueError):
    pass


class NotStabilized(RuntimeError):
    pass


class NormalizationMismatch(ArithmeticError):
    pass


# ---------------------------------------------------------------- monomials


class YMonomial(GradedDimVector):
    """prod Y_{i,k}^{e_{i,k}}, stored as a signed graded vector of exponents."""

    __slots__ = ()

    def __mul__(self, other: Mapping[Key, int]) -> "YMonomial":  # type: ignore[override]
        return YMonomial(list(self.items()) + list(other.items()))

    def inverse(self) -> "YMonomial":
        return YMonomial([(k, -e) for k, e in self.items()])

    def __pow__(self, n: int) -> "YMonomial":
        return YMonomial([(k, n * e) for k, e in self.items()])

    def top(self) -> int:
        """|m|: the largest k carrying a nonzero exponent."""
        if not self:
            raise EmptyMonomial("the constant monomial has no top index")
        return max(k for _, k in self)

    def render(self) -> str:
        if not self:
            return "1"
        return " * ".join(f"Y[{i + 1},{k}]" + (f"^{e}" if e != 1 else "") for (i, k), e in self.items())

    def __repr__(self) -> str:
        return f"YMonomial({self.render()})"


def y(i: int, k: int, e: int = 1) -> YMonomial:
    return YMonomial({(i, k): e})


def a_monomial(i: int, k: int, cd: CartanData) -> YMonomial:
    """A_{i,k} = Y_{i,k-d_i} Y_{i,k+d_i} prod_{j~i} prod_s Y_{j,k+s}^{-1}, s in c_ji+1, c_ji+3, .., -c_ji-1."""
    items: list[tuple[Key, int]] = [((i, k - cd.d(i)), 1), ((i, k + cd.d(i)), 1)]
    for j in cd.neighbors(i):
        c = cd.c(j, i)
        items += [((j, k + s), -1) for s in range(c + 1, -c, 2)]
    return YMonomial(items)


def monomial_of(w: Mapping[Key, int], v: Mapping[Key, int], cd: CartanData) -> YMonomial:
    """e^{w - c v}."""
    return YMonomial(weight_shift(w, v, cd).items())


def monomial_product_route(w: Mapping[Key, int], v: Mapping[Key, int], cd: CartanData) -> YMonomial:
    """prod Y^w * prod A^{-v}: the second route to ``monomial_of``."""
    out = YMonomial(w.items())
    for (j, r), n in v.items():
        out = out * a_monomial(j, r, cd) ** (-n)
    return out


def is_right_negative(m: Mapping[Key, int]) -> bool:
    m = YMonomial(m.items())
    top = m.top()
    return all(e <= 0 for (i, k), e in m.items() if k == top)


def is_dominant(m: Mapping[Key, int]) -> bool:
    return all(e >= 0 for e in m.values())


# -------------------------------------------------------------- characters


@dataclass(frozen=True)
class Term:
    monomial: YMonomial
    coeff: int
    v: GradedDimVector


def _row_key(t: Term) -> tuple:
    return (t.v.sort_key(), t.monomial.render())


@dataclass
class QCharacter:
    terms: list[Term]
    top: YMonomial | None = None
    support_only: bool = False

    def __post_init__(self) -> None:
        merged: dict[YMonomial, Term] = {}
        for t in self.terms:
            if t.monomial in merged:
                old = merged[t.monomial]
                merged[t.monomial] = Term(t.monomial, old.coeff + t.coeff, min(old.v, t.v, key=GradedDimVector.sort_key))
            else:
                merged[t.monomial] = t
        self.terms = sorted((t for t in merged.values() if t.coeff), key=_row_key)

    def as_dict(self) -> dict[YMonomial, int]:
        return {t.monomial: t.coeff for t in self.terms}

    def by_v(self) -> dict[GradedDimVector, int]:
        return {t.v: t.coeff for t in self.terms}

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def rows(self) -> list[tuple[str, int, str]]:
        return [(t.monomial.render(), t.coeff, t.v.render()) for t in self.terms]

    def normalized(self) -> "QCharacter":
        if self.top is None:
            raise ValueError("no top monomial to normalize by")
        inv = self.top.inverse()
        return QCharacter([Term(t.monomial * inv, t.coeff, t.v) for t in self.terms], YMonomial(), self.support_only)

    def restrict(self, keep: Callable[[GradedDimVector], bool]) -> "QCharacter":
        return QCharacter([t for t in self.terms if keep(t.v)], self.top, self.support_only)


def kr_highest_weight(i: int, k: int, l: int, cd: CartanData) -> GradedDimVector:
    """w with Y^w = m_{i,k,l} = Y_{i,k-(l-1)d_i} ... Y_{i,k+(l-1)d_i}."""
    d = cd.d(i)
    return GradedDimVector([((i, k - (l - 1) * d + 2 * m * d), 1) for m in range(l)])


def character_from_catalog(w: Mapping[Key, int], cat: SubmoduleCatalog, cd: CartanData) -> QCharacter:
    terms = []
    for e in cat.rows():
        if not e.nonempty:
            continue
        if e.chi is None:
            raise NoCountingPolynomial(f"v={e.v.render()}: {e.error}")
        terms.append(Term(monomial_of(w, e.v, cd), e.chi, e.v))
    return QCharacter(terms, YMonomial(w.items()))


def kr_qcharacter(i: int, k: int, l: int, cd: CartanData, catalog: SubmoduleCatalog | None = None,
                  bound: int = DEFAULT_BOUND) -> QCharacter:
    """sum_v chi(Gr_v(K_{i,k,l})) e^{w - c v}."""
    if catalog is None:
        catalog = fp_catalog(build_kr_module(i, k, l, cd), bound=bound)
    return character_from_catalog(kr_highest_weight(i, k, l, cd), catalog, cd)


def kr_support_character(i: int, k: int, l: int, cd: CartanData, bound: int = DEFAULT_BOUND) -> QCharacter:
    """Monomials of every v in the support, coefficient 1 (no Euler characteristics)."""
    w = kr_highest_weight(i, k, l, cd)
    support = graded_support(build_kr_module(i, k, l, cd), bound)
    return QCharacter([Term(monomial_of(w, v, cd), 1, v) for v in support], YMonomial(w.items()), support_only=True)


@dataclass
class Certificate:
    ok: bool
    lines: list[str] = field(default_factory=list)


def specialness_certificate(qc: QCharacter) -> Certificate:
    """Top monomial dominant, every other monomial right-negative (hence not dominant)."""
    lines = []
    if qc.top is None:
        return Certificate(False, ["no top monomial"])
    if not is_dominant(qc.top):
        lines.append(f"top monomial {qc.top.render()} is not dominant")
    if qc.top not in qc.as_dict():
        lines.append(f"top monomial {qc.top.render()} does not occur")
    dominant = [t.monomial for t in qc if is_dominant(t.monomial)]
    if len(dominant) > 1:
        lines.append("several dominant monomials: " + ", ".join(m.render() for m in dominant))
    for t in qc:
        if t.monomial == qc.top:
            continue
        if not t.monomial or not is_right_negative(t.monomial):
            lines.append(f"monomial {t.monomial.render()} (v={t.v.render()}) is not right-negative")
    return Certificate(not lines, lines)


# ------------------------------------------------------------ prefundamental


def visible(v: Mapping[Key, int], depth: int, cd: CartanData) -> bool:
    """At every vertex the degrees of v span less than 2 t depth.

    Such v satisfy omega^depth U = 0 for every submodule U of dimension v,
    so the Grassmannians of I_{i,k} and of its depth truncation coincide.
    """
    span = 2 * cd.lacing * depth
    per: dict[int, list[int]] = {}
    for (j, k), n in v.items():
        if n:
            per.setdefault(j, []).append(k)
    return all(max(ks) - min(ks) < span for ks in per.values())


def prefundamental_qcharacter(i: int, k: int, depth: int, cd: CartanData,
                              catalog: SubmoduleCatalog | None = None, bound: int = DEFAULT_BOUND) -> QCharacter:
    """Normalized sum_v chi(Gr_v(I_{i,k})) prod A^{-v}, over the v visible at this depth.

    The socle of I_{i,k} sits in degree (i, k + d_i), matching the
    normalized KR characters of KR_{i, k-(l-1)d_i, l}.
    """
    if depth == 0:
        return QCharacter([Term(YMonomial(), 1, GradedDimVector())], YMonomial())
    if catalog is None:
        catalog = fp_catalog(build_injective_trunc(i, k + cd.d(i), depth, cd), bound=bound)
    qc = character_from_catalog(GradedDimVector(), catalog, cd)
    return qc.restrict(lambda v: visible(v, depth, cd))


def hj_kr_parameters(i: int, k: int, l: int, cd: CartanData) -> tuple[int, int, int]:
    """(i, k - (l-1) d_i, l): the KR module whose segment ends at Y_{i,k}."""
    return i, k - (l - 1) * cd.d(i), l


@dataclass
class LimitReport:
    index: int
    equal: bool
    restricted: list[dict[GradedDimVector, int]]
    prefundamental: dict[GradedDimVector, int]


def hj_limit_compare(i: int, k: int, l_max: int, depth: int, cd: CartanData,
                     catalogs: Mapping[int, SubmoduleCatalog] | None = None,
                     pref_catalog: SubmoduleCatalog | None = None) -> LimitReport:
    """Compare depth-restricted normalized KR characters for l = 1..l_max with the prefundamental one.

    The index is 1 when every restriction agrees, otherwise the least l >= 2
    with restricted(l-1) = restricted(l) = ... = restricted(l_max).
    """
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    if depth > l_max - 1:
        raise ValueError("depth must not exceed l_max - 1")
    restricted = []
    for l in range(1, l_max + 1):
        cat = catalogs.get(l) if catalogs else None
        qc = kr_qcharacter(*hj_kr_parameters(i, k, l, cd), cd, catalog=cat).normalized()
        restricted.append(qc.restrict(lambda v: visible(v, depth, cd)).by_v())
    if all(r == restricted[0] for r in restricted):
        index = 1
    else:
        index = None
        for l in range(2, l_max + 1):
            if all(r == restricted[l - 2] for r in restricted[l - 2:]):
                index = l
                break
        if index is None:
            raise NotStabilized(f"restricted characters still change at l = {l_max}")
    pref = prefundamental_qcharacter(i, k, depth, cd, catalog=pref_catalog).by_v()
    return LimitReport(index, pref == restricted[-1], restricted, pref)


# ---------------------------------------------------------------- l-weights


@dataclass(frozen=True)
class LWeight:
    components: tuple[RatFunc, ...]

    def __getitem__(self, i: int) -> RatFunc:
        return self.components[i]

    def render(self) -> str:
        return "; ".join(c.render() for c in self.components)


def prefundamental_weight(w: Mapping[Key, int], cd: CartanData) -> LWeight:
    """Psi_{-w,i}(u) = prod_k (1 - zeta_i^k / u)^{-w_{i,k}},  zeta_i = zeta^{d_i}."""
    u = RatFunc.var("u")
    comps = []
    for i in range(cd.n):
        f = RatFunc.one()
        for (j, k), n in sorted(w.items()):
            if j == i and n:
                f = f * (1 - RatFunc.var("zeta", cd.d(i) * k) / u) ** (-n)
        comps.append(f)
    return LWeight(tuple(comps))


def specialize_framing(f: RatFunc, ks: Sequence[int], d: int) -> RatFunc:
    """q -> zeta and chi_s -> zeta^{d (k_s - 1)}, so that chi_s q_i = zeta_i^{k_s}."""
    zeta = RatFunc.var("zeta")
    out = f.subs("q", zeta)
    for s, k in enumerate(ks):
        out = out.subs(chi_name(s), RatFunc.var("zeta", d * (k - SPECTRAL_SHIFT)))
    return out


@dataclass
class MatchReport:
    vacuum: RatFunc
    expected: RatFunc
    residual: RatFunc

    @property
    def ok(self) -> bool:
        return self.residual.is_one()


def lweight_match(ks: Sequence[int], d: int = 1, strict: bool = True,
                  unit: RatFunc | int = NORMALIZATION_UNIT) -> MatchReport:
    """Vacuum psi-function of the shifted A1 representation with lines at zeta_i^{k_s}
    against Psi_{-w} for w = sum_s delta_{k_s}, after multiplying by ``unit``."""
    fd = FramingData(len(ks), d, SHIFTED)
    vac = specialize_framing(psi_function((0,) * fd.w, fd), ks, d) * unit
    cd = _a1(d)
    w = GradedDimVector([((0, k), 1) for k in ks])
    expected = prefundamental_weight(w, cd)[0]
    report = MatchReport(vac, expected, vac / expected)
    if strict and not report.ok:
        raise NormalizationMismatch(f"vacuum and Psi differ by the factor {report.residual.render()}")
    return report


def _a1(d: int) -> CartanData:
    if d == 1:
        return preset("A1")
    return validate_cartan([[2]], [d], (), name=f"A1(d={d})")


def render_table(rows: Iterable[Sequence]) -> str:
    return "".join("\t".join(str(x) for x in r) + "\n" for r in rows)
