"""Graded quiver Grassmannians of GradedModules.

Two independent routes:

* finite fields: exhaustive search over graded F_p-subspaces stable under
  every reduced action matrix, tallied by dimension vector, then a
  counting polynomial is interpolated and evaluated at 1;
* rationals: every graded subspace lies in a unique product of Schubert
  cells (RREF shapes); inside a cell the stability conditions are
  polynomial equations in the free RREF entries, solved with sympy.
  A cell contributes 1 when its solution set is an affine space and its
  number of points when finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import sympy

from . import linalg
from .cartan import GradedDimVector, Key
from .preproj import GradedModule

PRIMES = (2, 3, 5, 7, 11)
DEFAULT_BOUND = 6


class TooLarge(ValueError):
    pass


class BadReduction(ArithmeticError):
    pass


class NoCountingPolynomial(ArithmeticError):
    pass


def _check_bound(m: GradedModule, bound: int) -> None:
    for key, n in m.dims.items():
        if n > bound:
            raise TooLarge(f"piece ({key[0] + 1},{key[1]}) has dimension {n} > bound {bound}")


def _constraints(m: GradedModule) -> dict[int, list[tuple[int, int, list[list]]]]:
    """For each piece index, arrows to/from earlier pieces: (src idx, tgt idx, matrix)."""
    order = m.pieces()
    index = {key: n for n, key in enumerate(order)}
    out: dict[int, list] = {n: [] for n in range(len(order))}
    for (a, src, tgt), mat in m.actions.items():
        s, t = index[src], index[tgt]
        out[max(s, t)].append((s, t, [list(r) for r in mat]))
    return out


# ------------------------------------------------------------ finite fields


def _fp_subspaces(n: int, r: int, p: int) -> list[tuple[list[list[int]], tuple[int, ...]]]:
    """All r-dimensional subspaces of F_p^n as (RREF rows, pivots)."""
    out = []
    for pivots in itertools.combinations(range(n), r):
        slots = [(row, c) for row, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for values in itertools.product(range(p), repeat=len(slots)):
            rows = [[0] * n for _ in range(r)]
            for row, pc in enumerate(pivots):
                rows[row][pc] = 1
            for (row, c), x in zip(slots, values):
                rows[row][c] = x
            out.append((rows, pivots))
    return out


def _stable_fp(mat, src_rows, tgt, p: int) -> bool:
    tgt_rows, tgt_piv = tgt
    for b in src_rows:
        y = [sum(x * z for x, z in zip(row, b)) % p for row in mat]
        for r, pc in enumerate(tgt_piv):
            c = y[pc]
            if c:
                y = [(u - c * w) % p for u, w in zip(y, tgt_rows[r])]
        if any(y):
            return False
    return True


def count_all_fp(m: GradedModule, p: int, bound: int = DEFAULT_BOUND,
                 only: Mapping[Key, int] | None = None) -> dict[GradedDimVector, int]:
    """Number of graded F_p-submodules for every dimension vector (or just ``only``)."""
    _check_bound(m, bound)
    order = m.pieces()
    cons = _constraints(m)
    try:
        cons = {n: [(s, t, linalg.reduce_matrix(mat, p)) for s, t, mat in lst] for n, lst in cons.items()}
    except ZeroDivisionError as exc:
        raise BadReduction(str(exc)) from None
    cache: dict[tuple[int, int], list] = {}

    def choices(idx: int) -> Iterator[tuple[int, tuple]]:
        n = m.dim(order[idx])
        dims = [only.get(order[idx], 0)] if only is not None else range(n + 1)
        for r in dims:
            if r > n:
                continue
            if (n, r) not in cache:
                cache[(n, r)] = _fp_subspaces(n, r, p)
            for sub in cache[(n, r)]:
                yield r, sub

    tally: dict[tuple[int, ...], int] = {}
    chosen: list[tuple] = [None] * len(order)  # type: ignore[list-item]
    dimv: list[int] = [0] * len(order)

    def dfs(idx: int) -> None:
        if idx == len(order):
            key = tuple(dimv)
            tally[key] = tally.get(key, 0) + 1
            return
        for r, sub in choices(idx):
            chosen[idx] = sub
            if all(_stable_fp(mat, chosen[s][0], chosen[t], p) for s, t, mat in cons[idx]):
                dimv[idx] = r
                dfs(idx + 1)
        chosen[idx] = None  # type: ignore[call-overload]

    if only is not None and any(k not in m.dims for k, n in only.items() if n):
        return {}
    dfs(0)
    return {GradedDimVector(zip(order, key)): c for key, c in tally.items()}


def count_points_fp(m: GradedModule, v: Mapping[Key, int], p: int, bound: int = DEFAULT_BOUND) -> int:
    """|Gr_v(M)(F_p)|: graded subspaces of dimension v stable under every arrow."""
    v = GradedDimVector(v)
    if not v.is_nonnegative() or any(n > m.dim(key) for key, n in v.items()):
        return 0
    return count_all_fp(m, p, bound, only=v).get(v, 0)


# ----------------------------------------------------------- interpolation


@dataclass(frozen=True)
class CountingPolynomial:
    coeffs: tuple[int, ...]  # constant term first

    def __call__(self, x: int) -> int:
        return sum(c * x ** e for e, c in enumerate(self.coeffs))

    def render(self) -> str:
        terms = []
        for e, c in enumerate(self.coeffs):
            if not c:
                continue
            power = "" if e == 0 else "p" if e == 1 else f"p^{e}"
            coef = str(c) if not power or c not in (1, -1) else "-" if c == -1 else ""
            terms.append(f"{coef}*{power}" if coef not in ("", "-") and power else coef + power)
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def fit_counting_polynomial(counts: Mapping[int, int]) -> CountingPolynomial:
    """Interpolate through all primes but the largest, which serves as a check.

    Constant counts give the constant polynomial.  The polynomial must have
    integer coefficients and reproduce the check prime.
    """
    primes = sorted(counts)
    values = [counts[p] for p in primes]
    if len(set(values)) == 1:
        return CountingPolynomial((values[0],) if values[0] else ())
    if len(primes) < 3:
        raise NoCountingPolynomial(f"too few primes to interpolate: {primes}")
    fit, check = primes[:-1], primes[-1]
    coeffs = _lagrange(fit, [counts[p] for p in fit])
    if any(c.denominator != 1 for c in coeffs):
        raise NoCountingPolynomial(f"non-integral interpolant through counts {dict(counts)}")
    poly = CountingPolynomial(tuple(int(c) for c in _trim(coeffs)))
    if poly(check) != counts[check]:
        raise NoCountingPolynomial(f"counts {dict(counts)} are not polynomial of degree < {len(fit)}")
    return poly


def _trim(coeffs: list[Fraction]) -> list[Fraction]:
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    return coeffs


def _lagrange(xs: Sequence[int], ys: Sequence[int]) -> list[Fraction]:
    n = len(xs)
    total = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for e in range(len(basis) - 1):
                basis[e] -= xj * basis[e + 1]
            denom *= xi - xj
        for e, c in enumerate(basis):
            total[e] += yi * c / denom
    return total


def euler_char(m: GradedModule, v: Mapping[Key, int], primes: Sequence[int] = PRIMES,
               bound: int = DEFAULT_BOUND) -> int:
    counts = {p: count_points_fp(m, v, p, bound) for p in primes}
    return fit_counting_polynomial(counts)(1)


# ---------------------------------------------------------------- rationals


@dataclass(frozen=True)
class Cell:
    """One product of Schubert cells with its stability equations."""

    v: GradedDimVector
    bases: tuple[tuple[tuple, ...], ...]  # per piece, RREF rows (sympy entries)
    params: tuple[sympy.Symbol, ...]
    equations: tuple[sympy.Expr, ...]


def _q_cells(n: int, r: int, tag: str) -> list[tuple[list[list], tuple[int, ...], list[sympy.Symbol]]]:
    out = []
    for pivots in itertools.combinations(range(n), r):
        rows = [[sympy.Integer(0)] * n for _ in range(r)]
        params = []
        for row, pc in enumerate(pivots):
            rows[row][pc] = sympy.Integer(1)
            for c in range(pc + 1, n):
                if c not in pivots:
                    s = sympy.Symbol(f"{tag}_{''.join(map(str, pivots))}_{row}_{c}")
                    rows[row][c] = s
                    params.append(s)
        out.append((rows, pivots, params))
    return out


def _stability_eqs(mat, src_rows, tgt_rows, tgt_piv) -> list[sympy.Expr]:
    eqs = []
    for b in src_rows:
        y = [sum((sympy.Rational(x.numerator, x.denominator) * z for x, z in zip(row, b) if x), sympy.Integer(0))
             for row in mat]
        for r, pc in enumerate(tgt_piv):
            c = y[pc]
            if c != 0:
                y = [sympy.expand(u - c * w) for u, w in zip(y, tgt_rows[r])]
        eqs.extend(e for e in (sympy.expand(x) for x in y) if e != 0)
    return eqs


def _consistent(eqs: Sequence[sympy.Expr], params: Sequence[sympy.Symbol]) -> bool:
    if not eqs:
        return True
    if any(e.is_number for e in eqs):
        return False
    gb = sympy.groebner(list(eqs), *params, order="grevlex")
    return not (len(gb.exprs) == 1 and gb.exprs[0].is_number)


def rational_cells(m: GradedModule, bound: int = DEFAULT_BOUND) -> Iterator[Cell]:
    """Every nonempty Schubert-cell stratum of the graded quiver Grassmannian."""
    _check_bound(m, bound)
    order = m.pieces()
    cons = _constraints(m)
    options = []
    for idx, key in enumerate(order):
        n = m.dim(key)
        opts = []
        for r in range(n + 1):
            for rows, piv, params in _q_cells(n, r, f"x{idx}"):
                opts.append((r, rows, piv, params))
        options.append(opts)

    chosen: list = [None] * len(order)

    def dfs(idx: int, params: list, eqs: list) -> Iterator[Cell]:
        if idx == len(order):
            v = GradedDimVector({order[i]: chosen[i][0] for i in range(len(order))})
            yield Cell(v, tuple(tuple(tuple(r) for r in c[1]) for c in chosen), tuple(params), tuple(eqs))
            return
        for opt in options[idx]:
            chosen[idx] = opt
            new = []
            for s, t, mat in cons[idx]:
                new += _stability_eqs(mat, chosen[s][1], chosen[t][1], chosen[t][2])
            all_params = params + opt[3]
            all_eqs = eqs + new
            if new and not _consistent(all_eqs, all_params):
                continue
            yield from dfs(idx + 1, all_params, all_eqs)
        chosen[idx] = None

    yield from dfs(0, [], [])


def cell_euler_char(cell: Cell) -> int | None:
    """chi of the solution set inside one cell; None when neither affine nor finite."""
    eqs = list(cell.equations)
    if not eqs:
        return 1
    gb = sympy.groebner(eqs, *cell.params, order="grevlex")
    polys = [sympy.Poly(e, *cell.params) for e in gb.exprs]
    if all(p.total_degree() <= 1 for p in polys):
        return 1
    if gb.is_zero_dimensional:
        sols = sympy.solve(gb.exprs, cell.params, dict=True)
        return len({tuple(s[x] for x in cell.params) for s in sols})
    return None


# ------------------------------------------------------------------ support


def graded_support(m: GradedModule, bound: int = DEFAULT_BOUND) -> set[GradedDimVector]:
    """{v : Gr_v(M) nonempty}, decided over the rationals cell by cell."""
    return {cell.v for cell in rational_cells(m, bound)}


@dataclass
class CatalogEntry:
    v: GradedDimVector
    counts: dict[int, int] = field(default_factory=dict)
    polynomial: CountingPolynomial | None = None
    chi: int | None = None
    error: str | None = None
    submodules: tuple | None = None  # explicit bases when the Grassmannian is a finite set
    nonempty: bool = True


@dataclass
class SubmoduleCatalog:
    entries: dict[GradedDimVector, CatalogEntry]

    def support(self) -> list[GradedDimVector]:
        return sorted((v for v, e in self.entries.items() if e.nonempty),
                      key=GradedDimVector.sort_key)

    def rows(self) -> list[CatalogEntry]:
        return [self.entries[v] for v in sorted(self.entries, key=GradedDimVector.sort_key)]


def catalog_from_counts(per_prime: Mapping[int, Mapping[GradedDimVector, int]]) -> SubmoduleCatalog:
    """Merge per-prime tallies (in any order) into a catalog with chi values."""
    primes = sorted(per_prime)
    vs = set().union(*(set(t) for t in per_prime.values())) if primes else set()
    entries = {}
    for v in vs:
        e = CatalogEntry(v, {p: per_prime[p].get(v, 0) for p in primes})
        e.nonempty = any(e.counts.values())
        try:
            e.polynomial = fit_counting_polynomial(e.counts)
            e.chi = e.polynomial(1)
        except NoCountingPolynomial as exc:
            e.error = str(exc)
        entries[v] = e
    return SubmoduleCatalog(entries)


def fp_catalog(m: GradedModule, primes: Sequence[int] = PRIMES, bound: int = DEFAULT_BOUND) -> SubmoduleCatalog:
    return catalog_from_counts({p: count_all_fp(m, p, bound) for p in primes})


def rational_catalog(m: GradedModule, bound: int = 2) -> SubmoduleCatalog:
    """The Q-route catalog: support plus chi from the cell decomposition."""
    acc: dict[GradedDimVector, CatalogEntry] = {}
    for cell in rational_cells(m, bound):
        e = acc.setdefault(cell.v, CatalogEntry(cell.v, chi=0, submodules=()))
        c = cell_euler_char(cell)
        if c is None or e.chi is None:
            e.chi = None
            e.error = "cell with neither affine nor finite solution set"
        else:
            e.chi += c
        if e.submodules is not None:
            if cell.params:
                e.submodules = None
            else:
                e.submodules = e.submodules + (cell.bases,)
    return SubmoduleCatalog(acc)


def compare_catalogs(a: SubmoduleCatalog, b: SubmoduleCatalog) -> list[str]:
    """Differences in support or chi (entries with unknown chi compare by support only)."""
    diffs = []
    sa, sb = set(a.support()), set(b.support())
    for v in sorted(sa ^ sb, key=GradedDimVector.sort_key):
        diffs.append(f"support differs at v={v.render()}")
    for v in sorted(sa & sb, key=GradedDimVector.sort_key):
        ca, cb = a.entries[v].chi, b.entries[v].chi
        if ca is not None and cb is not None and ca != cb:
            diffs.append(f"chi differs at v={v.render()}: {ca} vs {cb}")
    return diffs


def random_base_change(m: GradedModule, rng, entries: Iterable[int] = (-2, -1, 1, 2)) -> GradedModule:
    """Conjugate every piece by a random unimodular (triangular) matrix."""
    entries = list(entries)
    change: dict[Key, tuple[list, list]] = {}
    for key, n in m.dims.items():
        upper = linalg.identity(n)
        for i in range(n):
            for j in range(i + 1, n):
                upper[i][j] = rng.choice(entries + [0])
        perm = list(range(n))
        rng.shuffle(perm)
        g = [[Fraction(upper[perm[i]][j]) for j in range(n)] for i in range(n)]
        change[key] = (g, _inverse(g))
    actions = {}
    for (a, s, t), mat in m.actions.items():
        g_t, _ = change[t]
        _, ginv_s = change[s]
        new = linalg.matmul(linalg.matmul(g_t, [list(r) for r in mat]), ginv_s)
        actions[(a, s, t)] = tuple(tuple(Fraction(x) for x in r) for r in new)
    return GradedModule(m.cartan, m.dims, actions)


def _inverse(g: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(g)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(g)]
    red, piv = linalg.rref(aug, 2 * n)
    if piv[:n] != list(range(n)):
        raise ValueError("singular base change")
    return [row[n:] for row in red]
