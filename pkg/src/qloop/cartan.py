"""Cartan data, graded triple quivers and weight bookkeeping.

Vertices are 0-based internally.  Everything user facing (config files,
CLI tables, monomial strings) uses 1-based labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


class NotCartan(ValueError):
    pass


class NotSymmetrizable(ValueError):
    pass


class BadOrientation(ValueError):
    pass


Pair = tuple[int, int]


@dataclass(frozen=True)
class CartanData:
    cartan: tuple[tuple[int, ...], ...]
    symmetrizer: tuple[int, ...]
    orientation: frozenset[Pair]
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.cartan)

    @property
    def lacing(self) -> int:
        return max(self.symmetrizer)

    def c(self, i: int, j: int) -> int:
        return self.cartan[i][j]

    def b(self, i: int, j: int) -> int:
        return self.symmetrizer[i] * self.cartan[i][j]

    def d(self, i: int) -> int:
        return self.symmetrizer[i]

    def t(self, i: int) -> int:
        """t_i = t / d_i."""
        return self.lacing // self.symmetrizer[i]

    def o(self, i: int, j: int) -> int:
        if (i, j) in self.orientation:
            return 1
        if (j, i) in self.orientation:
            return -1
        return 0

    def neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if j != i and self.cartan[i][j] < 0)

    def edges(self) -> Iterator[Pair]:
        """Ordered pairs (i, j), i != j, with c_ij < 0 (both directions)."""
        for i in range(self.n):
            for j in self.neighbors(i):
                yield i, j


def validate_cartan(
    matrix: Sequence[Sequence[int]],
    symmetrizer: Sequence[int],
    orientation: Iterable[Pair] = (),
    name: str = "",
) -> CartanData:
    """Check every axiom and return frozen CartanData.

    ``orientation`` lists 0-based oriented pairs (i, j); exactly one of
    (i, j), (j, i) must be present for each edge.
    """
    n = len(matrix)
    if n == 0 or any(len(row) != n for row in matrix):
        raise NotCartan("matrix must be square and non-empty")
    c = tuple(tuple(int(x) for x in row) for row in matrix)
    for i in range(n):
        if c[i][i] != 2:
            raise NotCartan(f"diagonal entry c[{i + 1},{i + 1}] = {c[i][i]}, expected 2")
        for j in range(n):
            if i == j:
                continue
            if c[i][j] > 0:
                raise NotCartan(f"off-diagonal entry c[{i + 1},{j + 1}] = {c[i][j]} is positive")
            if (c[i][j] == 0) != (c[j][i] == 0):
                raise NotCartan(f"c[{i + 1},{j + 1}] and c[{j + 1},{i + 1}] disagree on zero pattern")
            if c[i][j] < -3:
                raise NotCartan(f"c[{i + 1},{j + 1}] = {c[i][j]} is outside the finite-type range")
    d = tuple(int(x) for x in symmetrizer)
    if len(d) != n or any(x <= 0 for x in d):
        raise NotSymmetrizable("symmetrizer must have one positive entry per vertex")
    for i in range(n):
        for j in range(n):
            if d[i] * c[i][j] != d[j] * c[j][i]:
                raise NotSymmetrizable(f"d_{i + 1} c_{i + 1}{j + 1} != d_{j + 1} c_{j + 1}{i + 1}")
            if i != j and c[i][j] < 0 and d[i] * c[i][j] != -max(d[i], d[j]):
                raise NotSymmetrizable(
                    f"b_{i + 1}{j + 1} = {d[i] * c[i][j]} differs from -max(d_{i + 1}, d_{j + 1})"
                )
    orient = frozenset((int(i), int(j)) for i, j in orientation)
    for i, j in orient:
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise BadOrientation(f"pair ({i + 1},{j + 1}) is not a pair of distinct vertices")
        if c[i][j] == 0:
            raise BadOrientation(f"pair ({i + 1},{j + 1}) is not an edge")
        if (j, i) in orient:
            raise BadOrientation(f"edge {{{i + 1},{j + 1}}} oriented both ways")
    for i in range(n):
        for j in range(i + 1, n):
            if c[i][j] < 0 and (i, j) not in orient and (j, i) not in orient:
                raise BadOrientation(f"edge {{{i + 1},{j + 1}}} has no orientation")
    return CartanData(c, d, orient, name)


def _chain(n: int) -> list[list[int]]:
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = 2
        if i + 1 < n:
            m[i][i + 1] = m[i + 1][i] = -1
    return m


def preset(name: str) -> CartanData:
    """Named finite types A_n, B_n, C_n, D_n, G2 with orientation i -> j for i < j.

    B_n has long roots (d=2) at vertices 1..n-1 and the short root last;
    C_n is the transpose.
    """
    key = name.strip().upper()
    kind, rank_s = key[0], key[1:]
    if not rank_s.isdigit():
        raise NotCartan(f"unknown preset {name!r}")
    n = int(rank_s)
    if kind == "A" and n >= 1:
        m, d = _chain(n), [1] * n
    elif kind == "B" and n >= 2:
        m, d = _chain(n), [2] * (n - 1) + [1]
        m[n - 1][n - 2] = -2
    elif kind == "C" and n >= 2:
        m, d = _chain(n), [1] * (n - 1) + [2]
        m[n - 2][n - 1] = -2
    elif kind == "D" and n >= 4:
        m, d = _chain(n), [1] * n
        m[n - 2][n - 1] = m[n - 1][n - 2] = 0
        m[n - 3][n - 1] = m[n - 1][n - 3] = -1
    elif kind == "G" and n == 2:
        m, d = [[2, -1], [-3, 2]], [3, 1]
    else:
        raise NotCartan(f"unknown preset {name!r}")
    orient = [(i, j) for i in range(n) for j in range(i + 1, n) if m[i][j] < 0]
    return validate_cartan(m, d, orient, name=key)


# --------------------------------------------------------------- quivers


@dataclass(frozen=True)
class Arrow:
    """A graded arrow.  ``kind`` is 'alpha', 'eps', 'a' or 'astar'.

    Framing vertices are numbered n + i.
    """

    kind: str
    source: int
    target: int
    degree: int

    @property
    def label(self) -> str:
        n_src, n_tgt = self.source + 1, self.target + 1
        if self.kind == "alpha":
            return f"alpha[{n_tgt},{n_src}]"
        if self.kind == "eps":
            return f"eps[{n_src}]"
        return f"{self.kind}[{min(n_src, n_tgt)}]"

    def shift(self, k: int) -> int:
        return k + self.degree


@dataclass(frozen=True)
class GradedQuiver:
    cartan: CartanData
    framed: bool
    arrows: tuple[Arrow, ...] = field(default=())

    def vertices(self) -> range:
        return range(self.cartan.n * (2 if self.framed else 1))

    def out_of(self, vertex: int) -> tuple[Arrow, ...]:
        return tuple(a for a in self.arrows if a.source == vertex)

    def into(self, vertex: int) -> tuple[Arrow, ...]:
        return tuple(a for a in self.arrows if a.target == vertex)


def alpha(cd: CartanData, i: int, j: int) -> Arrow:
    """alpha_ij : j -> i."""
    return Arrow("alpha", j, i, cd.b(i, j))


def eps(cd: CartanData, i: int) -> Arrow:
    return Arrow("eps", i, i, 2 * cd.d(i))


def build_triple_quiver(cd: CartanData, framed: bool = False) -> GradedQuiver:
    arrows: list[Arrow] = [alpha(cd, i, j) for i, j in cd.edges()]
    arrows += [eps(cd, i) for i in range(cd.n)]
    if framed:
        for i in range(cd.n):
            arrows.append(Arrow("a", i, cd.n + i, -cd.d(i)))
            arrows.append(Arrow("astar", cd.n + i, i, -cd.d(i)))
    return GradedQuiver(cd, framed, tuple(arrows))


# ---------------------------------------------------------- dim vectors


Key = tuple[int, int]


class GradedDimVector(Mapping[Key, int]):
    """Finitely supported map (i, k) -> int.  Zero entries are dropped.

    Entries may be negative (the signed variant); ``is_nonnegative`` tells.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, data: Mapping[Key, int] | Iterable[tuple[Key, int]] = ()):
        items = data.items() if isinstance(data, Mapping) else data
        acc: dict[Key, int] = {}
        for (i, k), n in items:
            acc[(int(i), int(k))] = acc.get((int(i), int(k)), 0) + int(n)
        self._items = tuple(sorted((key, n) for key, n in acc.items() if n != 0))
        self._hash = hash(self._items)

    @classmethod
    def delta(cls, i: int, k: int, n: int = 1) -> "GradedDimVector":
        return cls({(i, k): n})

    def __getitem__(self, key: Key) -> int:
        for k, n in self._items:
            if k == key:
                return n
        return 0

    def get(self, key: Key, default: int = 0) -> int:  # type: ignore[override]
        return self[key] if key in self else default

    def __contains__(self, key: object) -> bool:
        return any(k == key for k, _ in self._items)

    def __iter__(self) -> Iterator[Key]:
        return (k for k, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GradedDimVector):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self == GradedDimVector(other)
        return NotImplemented

    def __add__(self, other: Mapping[Key, int]) -> "GradedDimVector":
        return GradedDimVector(list(self.items()) + list(other.items()))

    def __sub__(self, other: Mapping[Key, int]) -> "GradedDimVector":
        return GradedDimVector(list(self.items()) + [(k, -n) for k, n in other.items()])

    def __neg__(self) -> "GradedDimVector":
        return GradedDimVector([(k, -n) for k, n in self.items()])

    def scale(self, c: int) -> "GradedDimVector":
        return GradedDimVector([(k, c * n) for k, n in self.items()])

    def is_nonnegative(self) -> bool:
        return all(n >= 0 for _, n in self._items)

    def total(self) -> int:
        return sum(n for _, n in self._items)

    def sort_key(self) -> tuple:
        """Graded-lex: total dimension first, then the sorted entries."""
        return (self.total(), self._items)

    def render(self) -> str:
        if not self._items:
            return "0"
        return ",".join(f"[{i + 1},{k}]:{n}" for (i, k), n in self._items)

    def __repr__(self) -> str:
        return f"GradedDimVector({self.render()})"


def weight_shift(w: Mapping[Key, int], v: Mapping[Key, int], cd: CartanData) -> GradedDimVector:
    """w - c v, entrywise at each graded vertex (i, k)."""
    out: dict[Key, int] = dict(w)

    def bump(key: Key, n: int) -> None:
        out[key] = out.get(key, 0) + n

    for (j, r), n in v.items():
        # v_{j,r} feeds (j, r -+ d_j) with -1 and every neighbour i with c_ij-dependent spread
        bump((j, r - cd.d(j)), -n)
        bump((j, r + cd.d(j)), -n)
        for i in cd.neighbors(j):
            cij = cd.c(i, j)
            for s in range(cij + 1, -cij, 2):
                bump((i, r + s), n)
    return GradedDimVector(out)
