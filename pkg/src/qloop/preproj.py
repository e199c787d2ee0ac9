"""Graded modules over the generalized preprojective algebra.

Modules are given by explicit exact matrices.  The cyclic quotients
Pi e_i / Pi eps_i^l are built by a graded closure: pieces are indexed by
(end vertex, number of alpha arrows, degree); each piece is the quotient
of the direct sum of its predecessors by the images of the defining
relations, computed by exact row reduction.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg
from .cartan import CartanData, GradedDimVector, Key

ArrowKey = tuple  # ("alpha", i, j) for alpha_ij : j -> i, or ("eps", i)
Matrix = tuple[tuple[Fraction, ...], ...]

DEFAULT_CAP = 64


class CapExceeded(RuntimeError):
    pass


def arrow_keys(cd: CartanData) -> list[ArrowKey]:
    return [("alpha", i, j) for i, j in cd.edges()] + [("eps", i) for i in range(cd.n)]


def arrow_source(a: ArrowKey) -> int:
    return a[2] if a[0] == "alpha" else a[1]


def arrow_target(a: ArrowKey) -> int:
    return a[1]


def arrow_degree(cd: CartanData, a: ArrowKey) -> int:
    return cd.b(a[1], a[2]) if a[0] == "alpha" else 2 * cd.d(a[1])


def arrow_label(a: ArrowKey) -> str:
    return f"alpha[{a[1] + 1},{a[2] + 1}]" if a[0] == "alpha" else f"eps[{a[1] + 1}]"


def tau(a: ArrowKey) -> ArrowKey:
    """The anti-involution: alpha_ij <-> alpha_ji, eps fixed."""
    return ("alpha", a[2], a[1]) if a[0] == "alpha" else a


# ---------------------------------------------------------------- relations

Word = tuple[ArrowKey, ...]  # in order of application (first arrow first)


@dataclass(frozen=True)
class Relation:
    start: int
    end: int
    terms: tuple[tuple[int, Word], ...]
    name: str


def relations(cd: CartanData) -> list[Relation]:
    """Cyclic derivatives of the potential sum_{c_ij<0} o_ij eps_i^{-c_ij} alpha_ij alpha_ji."""
    rels = []
    for i, j in cd.edges():
        a = ("alpha", i, j)
        ci, cj = -cd.c(i, j), -cd.c(j, i)
        lhs = (a,) + (("eps", i),) * ci
        rhs = (("eps", j),) * cj + (a,)
        rels.append(Relation(j, i, ((1, lhs), (-1, rhs)), f"eps[{i + 1}]^{ci} alpha[{i + 1},{j + 1}] = "
                                                          f"alpha[{i + 1},{j + 1}] eps[{j + 1}]^{cj}"))
    for i in range(cd.n):
        terms = []
        for j in cd.neighbors(i):
            c = -cd.c(i, j)
            for k in range(c):
                word = (("eps", i),) * (c - 1 - k) + (("alpha", j, i), ("alpha", i, j)) + (("eps", i),) * k
                terms.append((cd.o(i, j), word))
        if terms:
            rels.append(Relation(i, i, tuple(terms), f"vertex relation at {i + 1}"))
    return rels


# ------------------------------------------------------------------ modules


@dataclass(frozen=True)
class GradedModule:
    """Finite-dimensional graded module; actions keyed by (arrow, source piece, target piece)."""

    cartan: CartanData
    dims: GradedDimVector
    actions: Mapping[tuple[ArrowKey, Key, Key], Matrix] = field(default_factory=dict)

    def pieces(self) -> list[Key]:
        return sorted(self.dims)

    def dim(self, key: Key) -> int:
        return self.dims.get(key, 0)

    def total_dim(self) -> int:
        return self.dims.total()

    def target_of(self, a: ArrowKey, src: Key) -> Key:
        return (arrow_target(a), src[1] + arrow_degree(self.cartan, a))

    def action(self, a: ArrowKey, src: Key) -> list[list[Fraction]]:
        """Matrix of ``a`` from piece src to its graded target (zero if absent)."""
        tgt = self.target_of(a, src)
        m = self.actions.get((a, src, tgt))
        if m is None:
            return linalg.zeros(self.dim(tgt), self.dim(src))
        return [list(r) for r in m]

    def arrow_maps(self) -> list[tuple[ArrowKey, Key, Key]]:
        """Every (arrow, source, target) with both pieces nonzero."""
        out = []
        for src in self.pieces():
            for a in arrow_keys(self.cartan):
                if arrow_source(a) != src[0]:
                    continue
                tgt = self.target_of(a, src)
                if self.dim(tgt):
                    out.append((a, src, tgt))
        return out

    def apply_word(self, word: Word, src: Key) -> list[list[Fraction]]:
        """Matrix of a path (first arrow applied first) from piece src."""
        m = linalg.identity(self.dim(src))
        key = src
        for a in word:
            nxt = self.target_of(a, key)
            m = linalg.matmul(self.action(a, key), m, inner=self.dim(key), cols=self.dim(src))
            key = nxt
        return m

    def dump(self) -> str:
        data = {
            "dims": [[i + 1, k, n] for (i, k), n in sorted(self.dims.items())],
            "actions": [
                {"arrow": arrow_label(a), "source": [s[0] + 1, s[1]], "target": [t[0] + 1, t[1]],
                 "matrix": [[str(x) for x in row] for row in m]}
                for (a, s, t), m in sorted(self.actions.items(), key=lambda kv: (kv[0][1], kv[0][2], str(kv[0][0])))
            ],
        }
        return json.dumps(data, sort_keys=True)


def _freeze(m: Sequence[Sequence[Fraction]]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in m)


# ------------------------------------------------------------- the closure


@dataclass
class _Piece:
    dim: int
    incoming: dict[ArrowKey, tuple[tuple[int, int, int], list[list[Fraction]]]]


def build_cyclic_quotient(i: int, l: int, cd: CartanData, cap: int = DEFAULT_CAP) -> GradedModule:
    """Pi e_i / Pi eps_i^l, generated in degree (i, 0)."""
    if l < 1:
        raise ValueError("l must be at least 1")
    if not 0 <= i < cd.n:
        raise ValueError(f"vertex {i + 1} out of range")
    rels = relations(cd)
    arrows = arrow_keys(cd)
    extra = Relation(i, i, ((1, (("eps", i),) * l),), f"eps[{i + 1}]^{l} e[{i + 1}]")
    gen = (i, 0, 0)
    pieces: dict[tuple[int, int, int], _Piece] = {gen: _Piece(1, {})}

    def is_alpha(a: ArrowKey) -> int:
        return 1 if a[0] == "alpha" else 0

    def f_of(key: tuple[int, int, int]) -> int:
        # strictly increasing along every arrow: alpha adds 4 + b >= 1, eps adds 2 d >= 2
        return key[2] + 4 * key[1]

    def step(a: ArrowKey, key: tuple[int, int, int]) -> tuple[int, int, int]:
        return (arrow_target(a), key[1] + is_alpha(a), key[2] + arrow_degree(cd, a))

    def apply(word: Word, key: tuple[int, int, int], vec: list[Fraction]) -> tuple[tuple[int, int, int], list[Fraction]] | None:
        for a in word:
            nxt = step(a, key)
            piece = pieces.get(nxt)
            if piece is None or a not in piece.incoming:
                return None
            vec = linalg.matvec(piece.incoming[a][1], vec)
            key = nxt
        return key, vec

    def word_shift(word: Word) -> tuple[int, int]:
        return sum(is_alpha(a) for a in word), sum(arrow_degree(cd, a) for a in word)

    heap: list[tuple[int, tuple[int, int, int]]] = []
    seen = {gen}

    def push_targets(key: tuple[int, int, int]) -> None:
        for a in arrows:
            if arrow_source(a) == key[0]:
                t = step(a, key)
                if t not in seen:
                    seen.add(t)
                    heapq.heappush(heap, (f_of(t), t))

    push_targets(gen)
    rounds = 0
    level = None
    while heap:
        f, key = heapq.heappop(heap)
        if f != level:
            level = f
            rounds += 1
            if rounds > cap:
                raise CapExceeded(f"closure did not stabilize within {cap} rounds")
        v, na, deg = key
        blocks: list[tuple[ArrowKey, tuple[int, int, int], int]] = []
        offset = 0
        offsets: dict[ArrowKey, int] = {}
        for a in arrows:
            if arrow_target(a) != v:
                continue
            src = (arrow_source(a), na - is_alpha(a), deg - arrow_degree(cd, a))
            if src in pieces:
                offsets[a] = offset
                blocks.append((a, src, pieces[src].dim))
                offset += pieces[src].dim
        total = offset
        if total == 0:
            continue
        rel_rows: list[list[Fraction]] = []
        for rel in rels + [extra]:
            if rel.end != v:
                continue
            sh_a, sh_d = word_shift(rel.terms[0][1])
            start = (rel.start, na - sh_a, deg - sh_d)
            if start not in pieces or (rel is extra and start != gen):
                continue
            for b in range(pieces[start].dim):
                basis = [Fraction(int(x == b)) for x in range(pieces[start].dim)]
                row = [Fraction(0)] * total
                for coef, word in rel.terms:
                    res = apply(word[:-1], start, basis)
                    if res is None or word[-1] not in offsets:
                        continue
                    pre_key, vec = res
                    off = offsets[word[-1]]
                    for idx, x in enumerate(vec):
                        row[off + idx] += coef * x
                if any(row):
                    rel_rows.append(row)
        red, pivots = linalg.rref(rel_rows, total)
        free = [c for c in range(total) if c not in pivots]
        if not free:
            continue
        # projection T -> T / span(red) in the basis of free coordinates
        proj = linalg.zeros(len(free), total)
        pos = {c: n for n, c in enumerate(free)}
        for c in free:
            proj[pos[c]][c] = Fraction(1)
        for row, pc in zip(red, pivots):
            for c in free:
                if row[c]:
                    proj[pos[c]][pc] = -row[c]
        incoming = {}
        for a, src, d in blocks:
            off = offsets[a]
            incoming[a] = (src, [r[off:off + d] for r in proj])
        pieces[key] = _Piece(len(free), incoming)
        push_targets(key)

    return _assemble(cd, pieces)


def _assemble(cd: CartanData, pieces: Mapping[tuple[int, int, int], _Piece]) -> GradedModule:
    """Merge the (vertex, alpha-count, degree) layers into graded pieces."""
    layout: dict[Key, list[tuple[int, int, int]]] = {}
    for key in sorted(pieces, key=lambda k: (k[0], k[2], k[1])):
        layout.setdefault((key[0], key[2]), []).append(key)
    offset: dict[tuple[int, int, int], int] = {}
    dims: dict[Key, int] = {}
    for gkey, layers in layout.items():
        o = 0
        for lk in layers:
            offset[lk] = o
            o += pieces[lk].dim
        dims[gkey] = o
    acts: dict[tuple[ArrowKey, Key, Key], list[list[Fraction]]] = {}
    for key, piece in pieces.items():
        gt = (key[0], key[2])
        for a, (src, m) in piece.incoming.items():
            gs = (src[0], src[2])
            big = acts.setdefault((a, gs, gt), linalg.zeros(dims[gt], dims[gs]))
            for r, row in enumerate(m):
                for c, x in enumerate(row):
                    if x:
                        big[offset[key] + r][offset[src] + c] = x
    actions = {k: _freeze(m) for k, m in acts.items() if not linalg.is_zero(m)}
    return GradedModule(cd, GradedDimVector(dims), actions)


def dualize_shift(m: GradedModule, shift: int) -> GradedModule:
    """Graded dual twisted by tau, then shifted by [shift].

    A piece in degree k moves to degree -k - shift.
    """
    dims = {(i, -k - shift): n for (i, k), n in m.dims.items()}
    actions = {}
    for (a, src, tgt), mat in m.actions.items():
        nsrc = (tgt[0], -tgt[1] - shift)
        ntgt = (src[0], -src[1] - shift)
        actions[(tau(a), nsrc, ntgt)] = _freeze(linalg.transpose(mat, len(mat[0]) if mat else 0))
    return GradedModule(m.cartan, GradedDimVector(dims), actions)


def build_kr_module(i: int, k: int, l: int, cd: CartanData, cap: int = DEFAULT_CAP) -> GradedModule:
    """K_{i,k,l}: dual of Pi e_i / Pi eps_i^l shifted by [-k - l d_i]; socle at (i, k + l d_i)."""
    return dualize_shift(build_cyclic_quotient(i, l, cd, cap), -k - l * cd.d(i))


def build_injective_trunc(i: int, k: int, depth: int, cd: CartanData, cap: int = DEFAULT_CAP) -> GradedModule:
    """(Pi_depth e_i)^dual shifted by [-k]: socle at (i, k).

    omega^depth e_i = eps_i^{t_i depth} e_i, so this is a cyclic quotient dual.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return dualize_shift(build_cyclic_quotient(i, cd.t(i) * depth, cd, cap), -k)


def direct_sum(mods: Iterable[GradedModule]) -> GradedModule:
    mods = list(mods)
    if not mods:
        raise ValueError("empty direct sum")
    cd = mods[0].cartan
    dims: dict[Key, int] = {}
    offsets: list[dict[Key, int]] = []
    for m in mods:
        off = {}
        for key, n in m.dims.items():
            off[key] = dims.get(key, 0)
            dims[key] = dims.get(key, 0) + n
        offsets.append(off)
    acts: dict[tuple[ArrowKey, Key, Key], list[list[Fraction]]] = {}
    for m, off in zip(mods, offsets):
        for (a, s, t), mat in m.actions.items():
            big = acts.setdefault((a, s, t), linalg.zeros(dims[t], dims[s]))
            for r, row in enumerate(mat):
                for c, x in enumerate(row):
                    big[off[t] + r][off[s] + c] = x
    return GradedModule(cd, GradedDimVector(dims), {k: _freeze(v) for k, v in acts.items()})


# --------------------------------------------------------------- verification


@dataclass(frozen=True)
class RelationReport:
    ok: bool
    failures: tuple[str, ...] = ()
    checked: int = 0

    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None


def verify_module(m: GradedModule) -> RelationReport:
    """Grading compatibility, both relation families, and nilpotency of eps."""
    cd = m.cartan
    failures: list[str] = []
    checked = 0
    for (a, src, tgt), mat in m.actions.items():
        checked += 1
        if a[0] not in ("alpha", "eps"):
            failures.append(f"unknown arrow {a!r}")
            continue
        if arrow_source(a) != src[0] or m.target_of(a, src) != tgt:
            failures.append(f"grading violation: {arrow_label(a)} maps piece {src} to {tgt}")
            continue
        if len(mat) != m.dim(tgt) or any(len(r) != m.dim(src) for r in mat):
            failures.append(f"shape mismatch for {arrow_label(a)} on piece {src}")
    if failures:
        return RelationReport(False, tuple(failures), checked)
    for rel in relations(cd):
        for src in m.pieces():
            if src[0] != rel.start:
                continue
            checked += 1
            total = None
            for coef, word in rel.terms:
                piece = m.apply_word(word, src)
                term = [[coef * x for x in row] for row in piece]
                total = term if total is None else [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(total, term)]
            if total is not None and not linalg.is_zero(total):
                failures.append(f"relation violated: {rel.name} on piece ({src[0] + 1},{src[1]})")
    for i in range(cd.n):
        for src in m.pieces():
            if src[0] != i:
                continue
            checked += 1
            steps = len([p for p in m.pieces() if p[0] == i]) + 1
            if not linalg.is_zero(m.apply_word((("eps", i),) * steps, src)):
                failures.append(f"eps[{i + 1}] is not nilpotent on piece ({i + 1},{src[1]})")
    return RelationReport(not failures, tuple(failures), checked)
