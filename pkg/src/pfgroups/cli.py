"""``pfgroups``: command-line front end.

Every command prints a report::

    # pfgroups report v1
    # command: <argv>
    # digest: sha256:<hex digest of the body>
    <body>
    RESULT <key>=<value> ...

Exit codes: 0 success, 1 domain error (printed as ``error: <code>: ...`` on
stderr), 2 usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import shlex
import sys
from fractions import Fraction
from typing import Sequence

from pfgroups import __version__
from pfgroups.errors import PfgroupsError

FORMAT_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


class Report:
    def __init__(self):
        self.lines: list[str] = []

    def add(self, text: str = "") -> None:
        self.lines.extend(text.rstrip("\n").split("\n") if text else [""])

    def result(self, **fields) -> None:
        parts = [f"{k.replace('_', '-')}={_fmt(v)}" for k, v in fields.items()]
        self.lines.append("RESULT " + " ".join(parts))

    def render(self, argv: Sequence[str]) -> str:
        body = "\n".join(self.lines) + "\n"
        digest = hashlib.sha256(body.encode()).hexdigest()
        head = [f"# pfgroups report v{FORMAT_VERSION}",
                f"# command: {shlex.join(['pfgroups', *argv])}",
                f"# digest: sha256:{digest}"]
        return "\n".join(head) + "\n" + body


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return dyadic(v)
    return str(v)


def dyadic(x: Fraction) -> str:
    """Exact text for a dyadic rational: ``0``, ``1`` or ``a/2^n``."""
    if x.denominator == 1:
        return str(x.numerator)
    n = x.denominator.bit_length() - 1
    if x.denominator != 1 << n:
        raise ValueError(f"{x} is not dyadic")
    return f"{x.numerator}/2^{n}"


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _digits(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text in ("", "-"):
        return ()
    try:
        if "," in text:
            return tuple(int(d) for d in text.split(","))
        return tuple(int(d) for d in text)
    except ValueError as exc:
        raise UsageError(f"bad digit string {text!r}") from exc


def _show_path(sigma) -> str:
    return ",".join(map(str, sigma)) if sigma else "-"


# -- lattice ----------------------------------------------------------------------

def cmd_lattice(args, rep: Report):
    from pfgroups import lattice as lt
    from pfgroups.formats import write_lattice_element
    from pfgroups.parsing import parse_word

    if args.verb == "enum":
        L = lt.enumerate_lattice(args.i)
        rep.add(write_lattice_element(L))
        rep.result(index=args.i, order=L.order, support=L.support)
    elif args.verb == "leq":
        rep.result(leq=lt.leq(lt.enumerate_lattice(args.i), lt.enumerate_lattice(args.j)))
    elif args.verb in ("meet", "join"):
        op = lt.meet if args.verb == "meet" else lt.join
        L = op(lt.enumerate_lattice(args.i), lt.enumerate_lattice(args.j))
        rep.add(write_lattice_element(L))
        idx = lt.enumeration_index(L)
        rep.result(order=L.order, index=idx if idx is not None else "none")
    elif args.verb == "base":
        L = lt.base_element(args.n)
        rep.add(write_lattice_element(L))
        rep.result(level=args.n, order=L.order, cutoff=lt.base_cutoff(args.n))
    elif args.verb == "delta":
        g, h = parse_word(args.g), parse_word(args.h)
        d = lt.delta(g, h, args.precision)
        rep.add(f"g = {g}")
        rep.add(f"h = {h}")
        if d == 0:
            rep.result(delta=f"<=1/2^{args.precision}")
        else:
            rep.result(delta=d)


# -- filters ------------------------------------------------------------------------

def cmd_filter(args, rep: Report):
    from pfgroups import filters as ft
    from pfgroups.finite import is_isomorphic
    from pfgroups.formats import atomic_write, read_filter, read_graph, write_filter, write_group

    if args.verb == "quotient":
        R = read_filter(_read(args.file))
        g = ft.quotient_at(R, args.level)
        rep.add(write_group(g))
        rep.result(level=args.level, order=g.order)
    elif args.verb == "principal":
        R = read_filter(_read(args.file))
        rep.result(depth=args.depth, principal=ft.is_principal_up_to(R, args.depth))
    elif args.verb == "hausdorff":
        R = read_filter(_read(args.R))
        S = read_filter(_read(args.S))
        rep.result(level=args.level, equal=ft.hausdorff_level(R, S, args.level))
    elif args.verb == "make":
        if args.kind == "mod":
            R = ft.FilterChain.mod_power(args.p, args.gen)
        else:
            from pfgroups.mekler import rn_chain

            if args.graph is None:
                raise UsageError("filter make rn needs --graph")
            R = rn_chain(read_graph(_read(args.graph)), args.p)
        text = write_filter(R.prefix(args.depth))
        if args.out:
            atomic_write(args.out, text)
            rep.add(f"wrote {args.out}")
        else:
            rep.add(text)
        rep.result(depth=args.depth, orders=",".join(str(L.order) for L in R.prefix(args.depth)))


# -- mekler ------------------------------------------------------------------------

def cmd_mekler(args, rep: Report):
    from pfgroups import mekler as mk
    from pfgroups.formats import read_graph
    from pfgroups.parsing import parse_element, render_element

    if args.verb == "nice":
        A = read_graph(_read(args.graph_file))
        r = mk.is_nice(A)
        if not r:
            rep.add(f"violation {r.reason} {' '.join(map(str, r.witness))}")
        rep.result(nice=r.nice)
        return
    A = read_graph(_read(args.graph))
    p = args.p
    if p < 3 or not mk.is_prime(p):
        raise mk.BadPrime(f"p must be an odd prime, got {p}")
    if args.verb == "gamma2":
        res = mk.gamma2(A, p)
        rep.add(f"classes {len(res.classes)}")
        for k, (c, v) in enumerate(zip(res.classes, res.vertex_map)):
            rep.add(f"class {k} rep={','.join(map(str, c))} vertex={v if v is not None else '-'}")
        for i, j in sorted(res.edges):
            rep.add(f"R {i} {j}")
        rep.result(isomorphic=res.isomorphic_to(A))
        return
    elts = [parse_element(t, A, p) for t in args.elements]
    need = {"mul": 2, "comm": 2, "inv": 1, "classify": 1}[args.verb]
    if len(elts) != need:
        raise UsageError(f"mekler {args.verb} takes {need} element(s)")
    if args.verb == "mul":
        rep.result(value=render_element(mk.multiply(*elts)))
    elif args.verb == "inv":
        rep.result(value=render_element(mk.inverse(elts[0])))
    elif args.verb == "comm":
        f = mk.commutator_formula(*elts)
        o = mk.commutator_oracle(*elts)
        rep.add(f"oracle {render_element(o)}")
        rep.result(value=render_element(f), agrees=f == o)
    elif args.verb == "classify":
        v = elts[0]
        tag = mk.case_classify(v)
        rep.result(case=str(tag), class_size=mk.class_size(v))


# -- cantor --------------------------------------------------------------------------

def _tree(args, depth: int):
    from pfgroups.cantor import build_tree
    from pfgroups.filters import FilterChain
    from pfgroups.formats import read_filter

    R = read_filter(_read(args.filter)) if args.filter else FilterChain.mod_power(2)
    return build_tree(R, depth)


def cmd_cantor(args, rep: Report):
    from pfgroups import cantor as ct

    if args.verb == "tree":
        t = _tree(args, args.depth)
        rep.add(ct.dump_tree(t))
        rep.result(depth=t.depth, branching=",".join(map(str, t.branching)) or "-")
    elif args.verb == "encode":
        sigma = _digits(args.digits)
        t = _tree(args, args.depth if args.depth is not None else len(sigma))
        bits = ct.encode_F(t, sigma)
        rep.result(path=_show_path(sigma), bits=bits or "-")
    elif args.verb == "rho":
        Z, W = _digits(args.Z), _digits(args.W)
        depth = args.depth if args.depth is not None else max(args.level, len(Z), len(W))
        t = _tree(args, depth)
        rep.result(level=args.level, rho=_show_path(ct.rho(t, Z, W, args.level)))
    elif args.verb == "verify":
        depth = args.depth if args.depth is not None else args.level
        t = _tree(args, depth)
        r = ct.verify_difference_axioms(t, args.level, samples=args.samples,
                                        exhaustive=True if args.exhaustive else None)
        for v in r.violations:
            rep.add(f"violation {v}")
        rep.result(level=args.level, cosets=r.cosets, exhaustive=r.exhaustive,
                   checked=r.checked, ok=r.ok)


# -- sl-family ------------------------------------------------------------------------

def cmd_slfam(args, rep: Report):
    from pfgroups import slfamily as sl
    from pfgroups.formats import atomic_write, read_group, write_group

    if args.verb == "build":
        g = sl.gP_level(sl.PrimeSet.parse(args.primes), args.level)
        text = write_group(g)
        if args.out:
            atomic_write(args.out, text)
            rep.add(f"wrote {args.out}")
        else:
            rep.add(text)
        rep.result(order=g.order)
    elif args.verb == "detect":
        g = read_group(_read(args.group_file))
        rep.result(primes=str(sl.primes_detected(g, sl.PrimeSet.parse(args.candidates))))
    elif args.verb == "distinguish":
        k = sl.distinguishing_level(sl.PrimeSet.parse(args.p), sl.PrimeSet.parse(args.q))
        rep.result(level=k)
    elif args.verb == "ut3":
        g = sl.ut3(args.p)
        rep.result(order=g.order, exponent=g.exponent(), abelian=g.is_abelian())


# -- argument parsing ---------------------------------------------------------------

def _nat(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pfgroups", description="Exact computations with profinite group quotients.")
    ap.add_argument("--version", action="version", version=f"pfgroups {__version__}")
    ap.add_argument("--format-version", type=int, default=FORMAT_VERSION,
                    help="report format revision (only 1 is defined)")
    sub = ap.add_subparsers(dest="module", required=True, parser_class=_Parser)

    lat = sub.add_parser("lattice", help="open normal subgroups of the free profinite group")
    lv = lat.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = lv.add_parser("enum"); p.add_argument("i", type=_nat)
    for verb in ("leq", "meet", "join"):
        p = lv.add_parser(verb); p.add_argument("i", type=_nat); p.add_argument("j", type=_nat)
    p = lv.add_parser("base"); p.add_argument("n", type=_nat)
    p = lv.add_parser("delta"); p.add_argument("g"); p.add_argument("h")
    p.add_argument("--precision", type=_nat, default=8)

    fil = sub.add_parser("filter", help="closed normal subgroups as filter chains")
    fv = fil.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = fv.add_parser("quotient"); p.add_argument("file"); p.add_argument("--level", type=_nat, required=True)
    p = fv.add_parser("principal"); p.add_argument("file"); p.add_argument("--depth", type=_nat, required=True)
    p = fv.add_parser("hausdorff"); p.add_argument("R"); p.add_argument("S")
    p.add_argument("--level", type=_nat, required=True)
    p = fv.add_parser("make", help="write a filter file for a standard chain")
    p.add_argument("kind", choices=["mod", "rn"])
    p.add_argument("--p", type=_nat, required=True)
    p.add_argument("--gen", type=_nat, default=0)
    p.add_argument("--graph")
    p.add_argument("--depth", type=_nat, required=True)
    p.add_argument("--out")

    mek = sub.add_parser("mekler", help="nil-2 exponent-p groups of graphs")
    mv = mek.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = mv.add_parser("nice"); p.add_argument("graph_file")
    p = mv.add_parser("gamma2")
    p.add_argument("--graph", required=True); p.add_argument("--p", type=_nat, required=True)
    for verb in ("mul", "inv", "comm", "classify"):
        p = mv.add_parser(verb)
        p.add_argument("elements", nargs="+")
        p.add_argument("--graph", required=True); p.add_argument("--p", type=_nat, required=True)

    can = sub.add_parser("cantor", help="coset trees and the Cantor-space encoding")
    cv = can.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def tree_opts(p, depth_required=False):
        p.add_argument("--filter", help="filter file (default: the mod-2^n chain on x0)")
        p.add_argument("--depth", type=_nat, required=depth_required)

    p = cv.add_parser("tree"); p.add_argument("filter_file", nargs="?")
    p.add_argument("--depth", type=_nat, required=True)
    p = cv.add_parser("encode"); p.add_argument("digits"); tree_opts(p)
    p = cv.add_parser("rho"); p.add_argument("Z"); p.add_argument("W")
    p.add_argument("--level", type=_nat, required=True); tree_opts(p)
    p = cv.add_parser("verify"); p.add_argument("--level", type=_nat, required=True)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--samples", type=_nat, default=1000); tree_opts(p)

    sl = sub.add_parser("slfam", help="SL2 towers and unitriangular groups")
    sv = sl.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = sv.add_parser("build"); p.add_argument("--primes", required=True)
    p.add_argument("--level", type=_nat, required=True); p.add_argument("--out")
    p = sv.add_parser("detect"); p.add_argument("group_file")
    p.add_argument("--candidates", default="2,3,5")
    p = sv.add_parser("distinguish"); p.add_argument("--p", required=True); p.add_argument("--q", required=True)
    p = sv.add_parser("ut3"); p.add_argument("--p", type=_nat, required=True)
    return ap


COMMANDS = {"lattice": cmd_lattice, "filter": cmd_filter, "mekler": cmd_mekler,
            "cantor": cmd_cantor, "slfam": cmd_slfam}


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(argv)
    try:
        args = build_parser().parse_args(argv)
        if args.format_version != FORMAT_VERSION:
            raise UsageError(f"unsupported --format-version {args.format_version}")
        if args.module == "cantor" and args.verb == "tree":
            args.filter = args.filter_file
        rep = Report()
        COMMANDS[args.module](args, rep)
    except UsageError as exc:
        print(exc, file=stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except PfgroupsError as exc:
        print(f"error: {exc.code}: {exc}", file=stderr)
        return 1
    except ValueError as exc:
        print(f"error: value: {exc}", file=stderr)
        return 1
    stdout.write(rep.render(argv))
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
