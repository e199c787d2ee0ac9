"""Command-line front end.

Config file grammar (``--cartan-file``), one ``key = value`` per line,
``#`` starts a comment, values are JSON:

    cartan = [[2, -1], [-2, 2]]
    symmetrizer = [2, 1]
    orientation = [[1, 2]]      # 1-based oriented pairs (i, j)
    preset = "B2"               # alternative to the three keys above

Exit codes: 0 success, 1 usage error, 2 failed verification, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

from . import cartan as cartan_mod
from .cartan import BadOrientation, CartanData, NotCartan, NotSymmetrizable, preset, validate_cartan
from .charlab import (
    NormalizationMismatch,
    NotStabilized,
    hj_kr_parameters,
    hj_limit_compare,
    kr_qcharacter,
    kr_support_character,
    prefundamental_qcharacter,
    specialness_certificate,
)
from .fockrep import SHIFTED, UNSHIFTED, FramingData, central_element, check_relations
from .grassmann import (
    DEFAULT_BOUND,
    PRIMES,
    BadReduction,
    NoCountingPolynomial,
    TooLarge,
    catalog_from_counts,
    count_all_fp,
)
from .preproj import CapExceeded, GradedModule, build_injective_trunc, build_kr_module, verify_module

SCHEMA_VERSION = 1

VERIFICATION_ERRORS = (
    NotCartan, NotSymmetrizable, BadOrientation, CapExceeded, TooLarge, BadReduction,
    NoCountingPolynomial, NotStabilized, NormalizationMismatch,
)


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


# ------------------------------------------------------------------ config


def parse_config(text: str) -> CartanData:
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        if key not in ("cartan", "symmetrizer", "orientation", "preset"):
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = json.loads(value)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config line {lineno}: cannot parse value for {key!r}: {exc.msg}") from None
    if "preset" in values:
        if set(values) != {"preset"}:
            raise UsageError("config: 'preset' excludes 'cartan', 'symmetrizer' and 'orientation'")
        return preset(str(values["preset"]))
    if "cartan" not in values or "symmetrizer" not in values:
        raise UsageError("config: need 'cartan' and 'symmetrizer' (or 'preset')")
    matrix = values["cartan"]
    orient = [(int(i) - 1, int(j) - 1) for i, j in values.get("orientation", [])]
    return validate_cartan(matrix, values["symmetrizer"], orient)


def load_cartan(args: argparse.Namespace) -> CartanData:
    if getattr(args, "preset", None) and getattr(args, "cartan_file", None):
        raise UsageError("--preset and --cartan-file are mutually exclusive")
    if getattr(args, "cartan_file", None):
        try:
            with open(args.cartan_file, encoding="utf-8") as fh:
                return parse_config(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {args.cartan_file}: {exc.strerror}") from None
    if getattr(args, "preset", None):
        return preset(args.preset)
    raise UsageError("give --preset or --cartan-file")


def jobs_from(args: argparse.Namespace) -> int:
    if args.jobs is not None:
        n = args.jobs
    else:
        env = os.environ.get("QLOOP_JOBS", "1")
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"QLOOP_JOBS must be an integer, got {env!r}") from None
    if n < 1:
        raise UsageError("--jobs must be positive")
    return n


def pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    """Order-preserving map, in-process for one job."""
    if jobs == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _vertex(cd: CartanData, i: int) -> int:
    if not 1 <= i <= cd.n:
        raise UsageError(f"--i must lie in 1..{cd.n}")
    return i - 1


# ---------------------------------------------------------------- emission


@dataclass
class Output:
    header: list[str]
    rows: list[list[Any]]
    ok: bool = True
    notes: list[str] | None = None

    def render(self, fmt: str, command: str) -> str:
        if fmt == "json":
            data = {
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "ok": self.ok,
                "rows": [dict(zip(self.header, r)) for r in self.rows],
            }
            if self.notes:
                data["notes"] = self.notes
            return json.dumps(data, sort_keys=True, indent=1) + "\n"
        lines = ["\t".join(self.header)] + ["\t".join(str(x) for x in r) for r in self.rows]
        lines += [f"# {n}" for n in self.notes or ()]
        return "\n".join(lines) + "\n"


def _catalog(module: GradedModule, primes: Sequence[int], jobs: int, bound: int):
    tallies = pmap(_count_job, [(module, p, bound) for p in primes], jobs)
    return catalog_from_counts(dict(zip(primes, tallies)))


def _count_job(args: tuple) -> dict:
    module, p, bound = args
    return count_all_fp(module, p, bound)


def _dims_json(v) -> list[list[int]]:
    return [[i + 1, k, n] for (i, k), n in v.items()]


# ------------------------------------------------------------- subcommands


def cmd_qchar(args: argparse.Namespace) -> Output:
    cd = load_cartan(args)
    i = _vertex(cd, args.i)
    jobs = jobs_from(args)
    if args.kind == "kr":
        if args.l is None or args.l < 1:
            raise UsageError("qchar kr needs --l >= 1")
        module = build_kr_module(i, args.k, args.l, cd)
        if args.support_only:
            qc = kr_support_character(i, args.k, args.l, cd, args.bound)
        else:
            qc = kr_qcharacter(i, args.k, args.l, cd, catalog=_catalog(module, PRIMES, jobs, args.bound))
        cert = specialness_certificate(qc)
        report = verify_module(module)
        notes = cert.lines + list(report.failures)
        ok = cert.ok and report.ok
    else:
        if args.depth is None or args.depth < 0:
            raise UsageError("qchar pref needs --depth >= 0")
        cat = None
        if args.depth:
            module = build_injective_trunc(i, args.k + cd.d(i), args.depth, cd)
            cat = _catalog(module, PRIMES, jobs, args.bound)
        qc = prefundamental_qcharacter(i, args.k, args.depth, cd, catalog=cat)
        notes, ok = [], True
    if args.format == "json":
        rows = [[t.monomial.render(), t.coeff, t.v.render(), _dims_json(t.v)] for t in qc]
        return Output(["monomial", "coefficient", "v", "dims"], rows, ok, notes)
    return Output(["monomial", "coefficient", "v"], [list(r) for r in qc.rows()], ok, notes)


def _relations_job(spec: tuple) -> tuple:
    w, d, mode, vmax, modes = spec
    r = check_relations(FramingData(w, d, mode), vmax, modes)
    return sorted(r.counts.items()), list(r.failures)


def cmd_relations(args: argparse.Namespace) -> Output:
    d = 1
    if args.preset or args.cartan_file:
        cd = load_cartan(args)
        d = cd.d(_vertex(cd, args.i))
    modes = []
    if args.shifted:
        modes.append(SHIFTED)
    if args.unshifted:
        modes.append(UNSHIFTED)
    if not modes:
        modes = [SHIFTED]
    if min(args.w) < 0 or args.vmax < 0 or args.modes < 0:
        raise UsageError("--w, --vmax and --modes must be non-negative")
    specs = [(w, d, mode, args.vmax, args.modes) for w in args.w for mode in modes]
    results = pmap(_relations_job, specs, jobs_from(args))
    rows, notes = [], []
    for (w, _, mode, _, _), (counts, failures) in zip(specs, results):
        per_rel: dict[str, int] = {}
        for f in failures:
            rel = f.split("\t", 1)[0]
            per_rel[rel] = per_rel.get(rel, 0) + 1
        for rel, n in counts:
            bad = per_rel.get(rel, 0)
            rows.append([w, mode, rel, n, bad, "pass" if not bad else "FAIL"])
        notes += [f"w={w} {mode}: {f}" for f in failures]
    return Output(["w", "mode", "relation", "checked", "failed", "status"], rows, not notes, notes)


def cmd_grassmann(args: argparse.Namespace) -> Output:
    cd = load_cartan(args)
    i = _vertex(cd, args.i)
    if args.module == "kr":
        if args.l is None or args.l < 1:
            raise UsageError("grassmann --module kr needs --l >= 1")
        module = build_kr_module(i, args.k, args.l, cd)
    else:
        if args.depth is None or args.depth < 1:
            raise UsageError("grassmann --module inj needs --depth >= 1")
        module = build_injective_trunc(i, args.k, args.depth, cd)
    cat = _catalog(module, PRIMES, jobs_from(args), args.bound)
    rows = []
    for e in cat.rows():
        if not e.nonempty:
            continue
        rows.append([e.v.render()] + [e.counts[p] for p in PRIMES] + [e.chi if e.chi is not None else "?"])
    notes = [f"v={e.v.render()}: {e.error}" for e in cat.rows() if e.error]
    return Output(["v"] + [f"p={p}" for p in PRIMES] + ["chi"], rows, not notes, notes)


def cmd_limit(args: argparse.Namespace) -> Output:
    cd = load_cartan(args)
    i = _vertex(cd, args.i)
    jobs = jobs_from(args)
    cats = {}
    for l in range(1, args.lmax + 1):
        ii, kk, ll = hj_kr_parameters(i, args.k, l, cd)
        cats[l] = _catalog(build_kr_module(ii, kk, ll, cd), PRIMES, jobs, args.bound)
    pref_cat = None
    if args.depth:
        pref_cat = _catalog(build_injective_trunc(i, args.k + cd.d(i), args.depth, cd), PRIMES, jobs, args.bound)
    rep = hj_limit_compare(i, args.k, args.lmax, args.depth, cd, cats, pref_cat)
    rows = [[l, len(r), "yes" if r == rep.prefundamental else "no"] for l, r in enumerate(rep.restricted, 1)]
    notes = [f"stabilization index {rep.index}", f"equal to prefundamental: {'yes' if rep.equal else 'no'}"]
    return Output(["l", "visible_terms", "matches_prefundamental"], rows, rep.equal, notes)


def _central_job(spec: tuple) -> tuple:
    w, d, vmax = spec
    rep = central_element(FramingData(w, d, SHIFTED), vmax)
    return rep.ok, [(v, lam, value.render()) for (v, lam), value in sorted(rep.values.items())]


def cmd_central(args: argparse.Namespace) -> Output:
    if min(args.w) < 0 or args.vmax < 0 or args.d < 1:
        raise UsageError("--w and --vmax must be non-negative, --d positive")
    results = pmap(_central_job, [(w, args.d, args.vmax) for w in args.w], jobs_from(args))
    rows = []
    ok = True
    for w, (good, values) in zip(args.w, results):
        ok &= good
        rows += [[w, v, ",".join(map(str, lam)) or "-", text] for v, lam, text in values]
    return Output(["w", "v", "lambda", "psi+_0*psi-_-w"], rows, ok)


def cmd_validate(args: argparse.Namespace) -> Output:
    cd = load_cartan(args)
    rows = [
        ["n", cd.n],
        ["lacing", cd.lacing],
        ["symmetrizer", json.dumps(list(cd.symmetrizer))],
        ["b", json.dumps([[cd.b(i, j) for j in range(cd.n)] for i in range(cd.n)])],
        ["orientation", json.dumps(sorted([i + 1, j + 1] for i, j in cd.orientation))],
    ]
    quiver = cartan_mod.build_triple_quiver(cd, framed=True)
    rows += [[f"arrow {a.label}", a.degree] for a in quiver.arrows]
    return Output(["field", "value"], rows)


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qloop", description="Exact toolkit for quantum loop group representations.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp: argparse.ArgumentParser, cartan: bool = True) -> None:
        if cartan:
            sp.add_argument("--preset", help="named Cartan type, e.g. A2, B2, G2")
            sp.add_argument("--cartan-file", help="key = value config file")
        sp.add_argument("--format", choices=("tsv", "json"), default="tsv")
        sp.add_argument("--jobs", type=int, default=None, help="worker processes (default $QLOOP_JOBS or 1)")

    q = sub.add_parser("qchar", help="q-characters of KR or prefundamental modules")
    q.add_argument("kind", choices=("kr", "pref"))
    common(q)
    q.add_argument("--i", type=int, required=True)
    q.add_argument("--k", type=int, default=0)
    q.add_argument("--l", type=int)
    q.add_argument("--depth", type=int)
    q.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    q.add_argument("--support-only", action="store_true")
    q.set_defaults(func=cmd_qchar)

    r = sub.add_parser("relations", help="verify the A1 fixed-point representation")
    common(r)
    r.add_argument("--i", type=int, default=1, help="vertex whose symmetrizer is used")
    r.add_argument("--w", type=int, nargs="+", default=[1])
    r.add_argument("--vmax", type=int, default=2)
    r.add_argument("--modes", type=int, default=2)
    r.add_argument("--shifted", action="store_true")
    r.add_argument("--unshifted", action="store_true")
    r.set_defaults(func=cmd_relations)

    g = sub.add_parser("grassmann", help="point counts and Euler characteristics")
    common(g)
    g.add_argument("--module", choices=("kr", "inj"), default="kr")
    g.add_argument("--i", type=int, required=True)
    g.add_argument("--k", type=int, default=0)
    g.add_argument("--l", type=int)
    g.add_argument("--depth", type=int)
    g.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    g.set_defaults(func=cmd_grassmann)

    lim = sub.add_parser("limit", help="compare KR characters with the prefundamental limit")
    common(lim)
    lim.add_argument("--i", type=int, required=True)
    lim.add_argument("--k", type=int, default=0)
    lim.add_argument("--lmax", type=int, required=True)
    lim.add_argument("--depth", type=int, required=True)
    lim.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    lim.set_defaults(func=cmd_limit)

    c = sub.add_parser("central", help="the central element on each weight block")
    common(c, cartan=False)
    c.add_argument("--w", type=int, nargs="+", default=[1])
    c.add_argument("--d", type=int, default=1)
    c.add_argument("--vmax", type=int, default=2)
    c.set_defaults(func=cmd_central)

    v = sub.add_parser("validate", help="check Cartan data")
    common(v)
    v.set_defaults(func=cmd_validate)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("qloop: choose a subcommand (qchar, relations, grassmann, limit, central, validate)")
        result = args.func(args)
    except UsageError as exc:
        print(str(exc), file=err)
        return 1
    except VERIFICATION_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=err)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=err)
        return 3
    out.write(result.render(args.format, args.command))
    if not result.ok:
        for note in result.notes or ():
            print(note, file=err)
        return 2
    return 0


def main(argv: Iterable[str] | None = None) -> None:
    sys.exit(run(list(argv) if argv is not None else None))
