"""The type-A1 fixed-point representation on framing tuples.

Basis vectors of weight v are tuples lam in N^w with |lam| = v.  Slot s of
lam contributes the lines chi_s q_i^{1-2r}, 0 <= r < lam_s, and the next
free line of slot s is chi_s q_i^{1-2 lam_s}.  All matrices are exact over
Q(q, chi_1..chi_w), stored sparsely as {(row tuple, column tuple): entry}.

Sign and index twists (see ``x_plus``/``x_minus``):

* shifted:   x+_n = -A+_n,                       x-_n = q_i^{-1} A-_n
* unshifted: x+_n = (-1)^{w+1} det(W) A+_n,      x-_n = q_i^{-1} A-_{n-w}
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .scalars import (
    MAX_FRAMING,
    LinearFactors,
    LSeries,
    RatFunc,
    VirtualCharacter,
    adams,
    chi_name,
    expand,
    lambda_u,
    quantum_int,
)

SHIFTED = "shifted"
UNSHIFTED = "unshifted"

Tuple = tuple[int, ...]
Sparse = dict[tuple[Tuple, Tuple], RatFunc]


class PoleCollision(ArithmeticError):
    pass


@dataclass(frozen=True)
class FramingData:
    w: int
    d: int = 1
    mode: str = SHIFTED

    def __post_init__(self) -> None:
        if not 0 <= self.w <= MAX_FRAMING:
            raise ValueError(f"w must lie in [0, {MAX_FRAMING}]")
        if self.d < 1:
            raise ValueError("d must be positive")
        if self.mode not in (SHIFTED, UNSHIFTED):
            raise ValueError(f"unknown mode {self.mode!r}")

    def qi(self, e: int = 1) -> RatFunc:
        return RatFunc.var("q", self.d * e)

    def chi(self, s: int) -> RatFunc:
        """Equivariant parameter of framing line s (0-based)."""
        return RatFunc.var(chi_name(s))

    def det_w(self) -> RatFunc:
        out = RatFunc.one()
        for s in range(self.w):
            out = out * self.chi(s)
        return out


def basis(v: int, fd: FramingData) -> list[Tuple]:
    """Tuples lam in N^w with |lam| = v, lexicographically sorted."""
    if v < 0:
        return []
    if fd.w == 0:
        return [()] if v == 0 else []
    out = [c for c in itertools.product(range(v + 1), repeat=fd.w) if sum(c) == v]
    return sorted(out)


def line(lam: Tuple, s: int, fd: FramingData, offset: int = 0) -> RatFunc:
    """chi_s q_i^{1 - 2 (lam_s + offset)}: the next free line of slot s when offset is 0."""
    return fd.chi(s) * fd.qi(1 - 2 * (lam[s] + offset))


def taut_class(lam: Tuple, fd: FramingData) -> list[RatFunc]:
    """V_lam = {chi_s q_i^{1-2r} : 0 <= r < lam_s} (as a list of monomials)."""
    return [fd.chi(s) * fd.qi(1 - 2 * r) for s in range(fd.w) for r in range(lam[s])]


def taut_character(lam: Tuple, fd: FramingData) -> VirtualCharacter:
    return VirtualCharacter.of(*(z.as_laurent() for z in taut_class(lam, fd)))


def framing_character(fd: FramingData) -> VirtualCharacter:
    return VirtualCharacter.of(*(fd.chi(s).as_laurent() for s in range(fd.w)))


def _bump(lam: Tuple, s: int) -> Tuple:
    return lam[:s] + (lam[s] + 1,) + lam[s + 1:]


# ---------------------------------------------------------------- A-operators


class FixedPointRep:
    """Lazy family of weight blocks with memoized mode-0 matrix coefficients.

    ``A-_n`` and ``A+_n`` differ from their n = 0 versions by the factor
    L^n, where L is the added line, so only n = 0 entries are cached.
    """

    def __init__(self, fd: FramingData):
        self.fd = fd
        self._lock = threading.Lock()
        self._minus: dict[tuple[Tuple, int], RatFunc] = {}
        self._plus: dict[tuple[Tuple, int], RatFunc] = {}
        self._psi: dict[Tuple, RatFunc] = {}

    # matrix coefficients -----------------------------------------------

    def minus_entry(self, lam: Tuple, s: int) -> RatFunc:
        """<lam| A-_0 |lam + e_s>."""
        key = (lam, s)
        with self._lock:
            hit = self._minus.get(key)
        if hit is not None:
            return hit
        fd = self.fd
        point = line(lam, s, fd)
        qm2 = fd.qi(-2)
        roots = []
        for z in taut_class(lam, fd):
            roots += [(z / qm2, 1), (z, -1)]
        f = LinearFactors(qm2 ** len(taut_class(lam, fd)), 0, roots)
        if fd.mode == UNSHIFTED:
            # extra framing factor prod_s (1 - u q_i / chi_s) = prod_s (-q_i / chi_s) (u - chi_s q_i^{-1})
            for t in range(fd.w):
                f = f.times(LinearFactors(-fd.qi() / fd.chi(t), 0, [(fd.chi(t) * fd.qi(-1), 1)]))
        try:
            val = f.evaluate(point)
        except ZeroDivisionError:
            raise PoleCollision(f"A- evaluation point {point} is a pole") from None
        with self._lock:
            self._minus[key] = val
        return val

    def plus_integrand(self, lam: Tuple, m: int = 0) -> LinearFactors:
        """(1 - q_i^{-2})^{-1} u^{m+w-1} prod_z (u - z)/(u - z q_i^{-2}) / prod_s (u - chi_s q_i)."""
        fd = self.fd
        roots = []
        for z in taut_class(lam, fd):
            roots += [(z, 1), (z * fd.qi(-2), -1)]
        roots += [(fd.chi(s) * fd.qi(), -1) for s in range(fd.w)]
        return LinearFactors((1 - fd.qi(-2)).inverse(), m + fd.w - 1, roots)

    def plus_entry(self, lam: Tuple, s: int) -> RatFunc:
        """<lam + e_s| A+_0 |lam>."""
        key = (lam, s)
        with self._lock:
            hit = self._plus.get(key)
        if hit is not None:
            return hit
        f = self.plus_integrand(lam)
        point = line(lam, s, self.fd)
        if f.roots.get(point, 0) >= 0:
            raise PoleCollision(f"A+ residue point {point} is not a pole")
        val = f.residue(point)
        with self._lock:
            self._plus[key] = val
        return val

    # operators ---------------------------------------------------------

    def a_minus(self, n: int, v: int) -> Sparse:
        """A-_n : weight v+1 -> weight v."""
        out: Sparse = {}
        for lam in basis(v, self.fd):
            for s in range(self.fd.w):
                point = line(lam, s, self.fd)
                out[(lam, _bump(lam, s))] = self.minus_entry(lam, s) * point**n
        return {k: x for k, x in out.items() if not x.is_zero()}

    def a_plus(self, m: int, v: int) -> Sparse:
        """A+_m : weight v -> weight v+1."""
        out: Sparse = {}
        for lam in basis(v, self.fd):
            for s in range(self.fd.w):
                point = line(lam, s, self.fd)
                out[(_bump(lam, s), lam)] = self.plus_entry(lam, s) * point**m
        return {k: x for k, x in out.items() if not x.is_zero()}

    def x_plus(self, n: int, v: int) -> Sparse:
        fd = self.fd
        if fd.mode == SHIFTED:
            c = RatFunc.const(-1)
        else:
            c = fd.det_w() * (-1) ** (fd.w + 1)
        return scale(self.a_plus(n, v), c)

    def x_minus(self, n: int, v: int) -> Sparse:
        fd = self.fd
        shift = 0 if fd.mode == SHIFTED else fd.w
        return scale(self.a_minus(n - shift, v), fd.qi(-1))

    # psi ---------------------------------------------------------------

    def psi_function(self, lam: Tuple) -> RatFunc:
        with self._lock:
            hit = self._psi.get(lam)
        if hit is not None:
            return hit
        f = psi_function(lam, self.fd)
        with self._lock:
            self._psi[lam] = f
        return f


def psi_function(lam: Tuple, fd: FramingData) -> RatFunc:
    """The diagonal eigenvalue psi_lam(u) as a rational function of u."""
    u = RatFunc.var("u")
    qi = fd.qi
    v = sum(lam)
    if fd.mode == SHIFTED:
        # u^w prod_z g(u/z) / prod_s (u - chi_s q_i),  g(x) = (q_i^{-2} x - 1)/(x - q_i^{-2})
        out = u**fd.w
        for z in taut_class(lam, fd):
            out = out * (qi(-2) * u - z) / (u - qi(-2) * z)
        for s in range(fd.w):
            out = out / (u - fd.chi(s) * qi())
        return out
    # unshifted: q_i^{w-2v} Lambda_{-1/u}((q_i^{-1} - q_i) H_1),  H_1 = W - [2]_{q_i} V
    out = qi(fd.w - 2 * v)
    for s in range(fd.w):
        out = out * (u - fd.chi(s) * qi(-1)) / (u - fd.chi(s) * qi())
    for z in taut_class(lam, fd):
        out = out * (u - qi(2) * z) / (u - qi(-2) * z)
    return out


def psi_closed_form(lam: Tuple, fd: FramingData) -> RatFunc:
    """Telescoped product form, used as an independent check of ``psi_function``."""
    u = RatFunc.var("u")
    qi = fd.qi
    v = sum(lam)
    out = qi(-2 * v) * u**fd.w if fd.mode == SHIFTED else qi(fd.w - 2 * v)
    for s in range(fd.w):
        chi = fd.chi(s)
        p = line(lam, s, fd)
        num = u - chi * qi(3)
        if fd.mode == UNSHIFTED:
            num = num * (u - chi * qi(-1))
        out = out * num / ((u - p) * (u - qi(2) * p))
    return out


def h_character(lam: Tuple, fd: FramingData, dual: bool = False) -> VirtualCharacter:
    """H_{1} = W - [2]_{q_i} V_lam, or its dual H_{-1}."""
    two = quantum_int(2, fd.d)
    v = taut_character(lam, fd)
    prod = VirtualCharacter()
    for e, k in VirtualCharacter.from_laurent(two):
        shifted = VirtualCharacter({tuple(a + b for a, b in zip(e, x)): k * m for x, m in v})
        prod = prod + shifted
    h = framing_character(fd) - prod
    return h.dual() if dual else h


def psi_lambda_route(lam: Tuple, fd: FramingData, direction: str, order: int) -> LSeries:
    """psi^+ (direction 'inf') or psi^- ('zero') built from Lambda-operations.

    shifted:   q^{-w} q^{w-2v} Lambda_{-1/u}((q^2 - q^{-2}) V - q W) at infinity,
               (-u)^w q^{-(w-2v)} det(W)^{-1} Lambda_{-u}((q^{-2} - q^2) V^dual - q^{-1} W^dual) at zero;
    unshifted: q^{+-(w-2v)} exp(+-(q - q^{-1}) sum_m H_{+-m} u^{-+m}) with
               H_{+-m} = [m]/m psi^m(H_{+-1}), summed through Adams operations.
    """
    qi = fd.qi
    v = sum(lam)
    wt = fd.w - 2 * v
    if fd.mode == SHIFTED:
        V = taut_character(lam, fd)
        W = framing_character(fd)
        if direction == "inf":
            E = _scaled(V, fd.d * 2) - _scaled(V, -2 * fd.d) - _scaled(W, fd.d)
            f = qi(-fd.w + wt) * lambda_u(E, sign=-1)
        else:
            E = _scaled(V.dual(), -2 * fd.d) - _scaled(V.dual(), 2 * fd.d) - _scaled(W.dual(), -fd.d)
            f = (RatFunc.var("u") * -1) ** fd.w * qi(-wt) * fd.det_w().inverse() * lambda_u(E, sign=1)
        return expand(f, direction, order)
    # unshifted: sum the Adams series explicitly, then exponentiate
    sign = 1 if direction == "inf" else -1
    H = h_character(lam, fd, dual=(direction == "zero"))
    coeffs = {}
    for m in range(1, order + 1):
        hm = quantum_int(m, fd.d).to_ratfunc() * Fraction(1, m) * adams(H, m).to_laurent().to_ratfunc()
        coeffs[m] = hm * (qi(1) - qi(-1)) * sign
    series = LSeries(direction, coeffs, order).exp()
    return series.scale(qi(sign * wt))


def _scaled(E: VirtualCharacter, qexp: int) -> VirtualCharacter:
    """q^qexp * E."""
    return VirtualCharacter({(e[0] + qexp,) + tuple(e[1:]): k for e, k in E})


# ------------------------------------------------------------ sparse algebra


def scale(a: Sparse, c: RatFunc) -> Sparse:
    if c.is_zero():
        return {}
    return {k: x * c for k, x in a.items()}


def matmul(a: Sparse, b: Sparse) -> Sparse:
    """(a b)[i, k] = sum_j a[i, j] b[j, k]."""
    by_row: dict[Tuple, list[tuple[Tuple, RatFunc]]] = {}
    for (j, k), x in b.items():
        by_row.setdefault(j, []).append((k, x))
    out: Sparse = {}
    for (i, j), x in a.items():
        for k, y in by_row.get(j, ()):
            out[(i, k)] = out.get((i, k), RatFunc.zero()) + x * y
    return {k: x for k, x in out.items() if not x.is_zero()}


def add(*terms: tuple[RatFunc | int, Sparse]) -> Sparse:
    out: Sparse = {}
    for c, a in terms:
        for k, x in a.items():
            out[k] = out.get(k, RatFunc.zero()) + x * c
    return {k: x for k, x in out.items() if not x.is_zero()}


def diagonal(entries: Mapping[Tuple, RatFunc]) -> Sparse:
    return {(lam, lam): x for lam, x in entries.items() if not x.is_zero()}


# -------------------------------------------------------------- psi series


@dataclass
class PsiData:
    """Expansions of psi_lam at infinity and at zero, plus h-modes."""

    plus: LSeries
    minus: LSeries
    lead_minus: int  # u-exponent of the leading term of psi^-

    def psi_plus(self, n: int) -> RatFunc:
        return self.plus.u_coeff(-n) if n >= 0 else RatFunc.zero()

    def psi_minus(self, n: int) -> RatFunc:
        return self.minus.u_coeff(-n) if -n >= self.lead_minus else RatFunc.zero()


def psi_data(rep: FixedPointRep, lam: Tuple, order: int) -> PsiData:
    f = rep.psi_function(lam)
    plus = expand(f, "inf", order)
    minus = expand(f, "zero", order)
    return PsiData(plus, minus, minus.valuation or 0)


def psi_series(v: int, fd: FramingData, direction: str, order: int = 6) -> dict[Tuple, LSeries]:
    """Diagonal psi operator on weight v, entry-wise expanded."""
    rep = FixedPointRep(fd)
    return {lam: expand(rep.psi_function(lam), direction, order) for lam in basis(v, fd)}


def h_modes(data: PsiData, fd: FramingData, rmax: int) -> dict[int, RatFunc]:
    """h_r (r != 0) from psi^+ = psi^+_0 exp((q_i - q_i^{-1}) sum h_r u^{-r}) and
    psi^- = psi^-_lead u^lead exp(-(q_i - q_i^{-1}) sum h_{-r} u^r)."""
    k = fd.qi(1) - fd.qi(-1)
    out: dict[int, RatFunc] = {}
    lp = data.plus.scale(data.plus.s_coeff(0).inverse()).log()
    val = data.lead_minus
    norm = LSeries("zero", {e - val: c for e, c in data.minus.coeffs.items()}, data.minus.prec - val)
    lm = norm.scale(norm.s_coeff(0).inverse()).log()
    for r in range(1, rmax + 1):
        out[r] = lp.s_coeff(r) / k
        out[-r] = -lm.s_coeff(r) / k
    return out


def central_element(fd: FramingData, vmax: int = 2) -> "Report":
    """psi^+_0 psi^-_{-w} on every weight block v <= vmax versus (-1)^w q_i^{-w} det(W)^{-1}."""
    if fd.mode != SHIFTED:
        raise ValueError("the central element is defined for the shifted representation")
    rep = FixedPointRep(fd)
    expected = fd.det_w().inverse() * fd.qi(-fd.w) * (-1) ** fd.w
    report = Report(fd)
    for v in range(vmax + 1):
        for lam in basis(v, fd):
            data = psi_data(rep, lam, fd.w + 1)
            value = data.psi_plus(0) * data.psi_minus(-fd.w)
            report.record("central", f"v={v} lam={lam}", value == expected,
                          f"got {value.render()}, expected {expected.render()}")
            report.values[(v, lam)] = value
    return report


# ---------------------------------------------------------------- relations


@dataclass
class Report:
    fd: FramingData
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, relation: str, where: str, ok: bool, detail: str = "") -> None:
        self.checked += 1
        self.counts[relation] = self.counts.get(relation, 0) + 1
        if not ok:
            self.failures.append(f"{relation}\t{where}\t{detail}")


def _first_diff(lhs: Sparse, rhs: Sparse) -> str:
    for key in sorted(set(lhs) | set(rhs)):
        a, b = lhs.get(key, RatFunc.zero()), rhs.get(key, RatFunc.zero())
        if a != b:
            return f"entry {key}: {a.render()} != {b.render()}"
    return ""


def cleared_exchange(fd: FramingData, sign: int) -> tuple[list[tuple[RatFunc, int, int]], list[tuple[RatFunc, int, int]]]:
    """Denominator-cleared form of x(u) x(v) = x(v) x(u) g(u/v)^{sign}.

    Returns (D, N) as lists of (coefficient, a, b) for monomials c u^a v^b,
    so that D(u, v) x(u) x(v) = N(u, v) x(v) x(u).
    """
    u, w = RatFunc.var("u"), RatFunc.var("v")
    a = fd.qi(-2)
    g = (a * u / w - 1) / (u / w - a)
    if sign < 0:
        g = g.inverse()
    return _uv_terms(g.den), _uv_terms(g.num)


def _uv_terms(poly) -> list[tuple[RatFunc, int, int]]:
    from .scalars import coefficients_in  # noqa: PLC0415 - local helper import

    out = []
    for a, cu in coefficients_in(poly, "u").items():
        for b, cv in coefficients_in(cu.num, "v").items():
            out.append((cv / RatFunc(cu.den), a, b))
    return out


def check_relations(fd: FramingData, v_max: int, mode_bound: int) -> Report:
    """Exact verification of the one-vertex current relations.

    Labels: psi-psi (psi modes commute), x-psi (conjugation by the leading psi
    modes), h-x (h_r against x^{+-}), x-x (denominator-cleared exchange) and
    x+x- (the commutator of opposite currents); unshifted mode adds psi0, the
    inverse pair psi+_0 psi-_0 = 1.

    Every relation is checked as an operator identity with source weight v <= v_max.
    """
    rep = FixedPointRep(fd)
    report = Report(fd)
    M = mode_bound
    order = 2 * M + fd.w + 2
    blocks = {v: basis(v, fd) for v in range(v_max + 3)}
    psi = {lam: psi_data(rep, lam, order) for v in range(v_max + 2) for lam in blocks[v]}
    hm = {lam: h_modes(d, fd, M) for lam, d in psi.items()}
    xp = {(n, v): rep.x_plus(n, v) for n in range(-M, M + 1) for v in range(v_max + 2)}
    xm = {(n, v): rep.x_minus(n, v) for n in range(-M, M + 1) for v in range(v_max + 1)}
    k = fd.qi(1) - fd.qi(-1)

    def psi_op(which: str, n: int, v: int) -> Sparse:
        get = (lambda d: d.psi_plus(n)) if which == "+" else (lambda d: d.psi_minus(n))
        return diagonal({lam: get(psi[lam]) for lam in blocks[v]})

    for v in range(v_max + 1):
        # psi-psi: psi-modes commute (diagonal in the fixed-point basis)
        for a, b in itertools.product(range(-M, M + 1), repeat=2):
            for s1, s2 in (("+", "+"), ("+", "-"), ("-", "-")):
                p1, p2 = psi_op(s1, a, v), psi_op(s2, b, v)
                lhs, rhs = matmul(p1, p2), matmul(p2, p1)
                report.record("psi-psi", f"v={v} psi{s1}_{a} psi{s2}_{b}", lhs == rhs, _first_diff(lhs, rhs))

        # x-psi: x^a psi^b_lead = q_i^{2ab} psi^b_lead x^a for signs a, b
        for lead, n0, e in (("+", 0, 1), ("-", -fd.w if fd.mode == SHIFTED else 0, -1)):
            here, up = psi_op(lead, n0, v), psi_op(lead, n0, v + 1)
            for n in range(-M, M + 1):
                lhs = matmul(xp[(n, v)], here)
                rhs = scale(matmul(up, xp[(n, v)]), fd.qi(2 * e))
                report.record("x-psi", f"v={v} x+_{n} psi{lead}_{n0}", lhs == rhs, _first_diff(lhs, rhs))
                if v >= 1:
                    lhs = matmul(xm[(n, v - 1)], here)
                    rhs = scale(matmul(psi_op(lead, n0, v - 1), xm[(n, v - 1)]), fd.qi(-2 * e))
                    report.record("x-psi", f"v={v} x-_{n} psi{lead}_{n0}", lhs == rhs, _first_diff(lhs, rhs))

        # h-x: [h_r, x+-_n] = -+ [2r]_{q_i}/r x+-_{n+r}
        for r in [x for x in range(-M, M + 1) if x]:
            coeff = quantum_int(2 * r, fd.d).to_ratfunc() * Fraction(1, r)
            for n in range(-M, M + 1):
                if not -M <= n + r <= M:
                    continue
                for sgn, ops, src, tgt in (("+", xp, v, v + 1), ("-", xm, v - 1, v)):
                    if src < 0:
                        continue
                    x = ops[(n, src)]
                    comm = {key: (hm[key[0]][r] - hm[key[1]][r]) * val for key, val in x.items()}
                    comm = {key: val for key, val in comm.items() if not val.is_zero()}
                    expect = scale(ops[(n + r, src)], coeff * (-1 if sgn == "+" else 1))
                    report.record("h-x", f"v={src} h_{r} x{sgn}_{n}", comm == expect, _first_diff(comm, expect))

        # x-x: exchange relation, denominator cleared
        for sgn, ops, step in (("+", xp, 1), ("-", xm, -1)):
            src = v if sgn == "+" else v - 2
            if src < 0:
                continue
            D, N = cleared_exchange(fd, 1 if sgn == "+" else -1)

            cache: dict[tuple[int, int], Sparse] = {}

            def pair(i1: int, i2: int) -> Sparse:
                # x_{i1} x_{i2} applied to block src (x_{i2} first)
                if (i1, i2) not in cache:
                    if sgn == "+":
                        cache[(i1, i2)] = matmul(ops[(i1, src + 1)], ops[(i2, src)])
                    else:
                        cache[(i1, i2)] = matmul(ops[(i1, src)], ops[(i2, src + 1)])
                return cache[(i1, i2)]

            for A, B in itertools.product(range(-M, M), repeat=2):
                lhs = add(*((c, pair(A + a, B + b)) for c, a, b in D))
                rhs = add(*((c, pair(B + b, A + a)) for c, a, b in N))
                report.record("x-x", f"v={src} x{sgn} modes ({A},{B})", lhs == rhs, _first_diff(lhs, rhs))

        # x+x-: (q_i - q_i^{-1}) [x+_m, x-_n] = psi+_{m+n} - psi-_{m+n}
        for m, n in itertools.product(range(-M, M + 1), repeat=2):
            first = matmul(xp[(m, v - 1)], xm[(n, v - 1)]) if v >= 1 else {}
            second = matmul(xm[(n, v)], xp[(m, v)])
            lhs = add((k, first), (-k, second))
            rhs = add((1, psi_op("+", m + n, v)), (-1, psi_op("-", m + n, v)))
            report.record("x+x-", f"v={v} m={m} n={n}", lhs == rhs, _first_diff(lhs, rhs))

        if fd.mode == UNSHIFTED:
            prod = matmul(psi_op("+", 0, v), psi_op("-", 0, v))
            ident = diagonal({lam: RatFunc.one() for lam in blocks[v]})
            report.record("psi0", f"v={v}", prod == ident, _first_diff(prod, ident))
    return report
