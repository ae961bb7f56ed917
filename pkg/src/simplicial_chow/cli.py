"""Command-line front end.

Every command reads one complex (``--input``), does its work and writes a
report in json, csv or text.  Reports are assembled on the main thread in a
fixed order, so the bytes written do not depend on ``--threads``.

Exit codes: 0 success, 1 usage, 2 invalid input, 3 size guard,
4 internal consistency failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import checks, corpus
from .complexes import ComplexError, SimplicialComplex, load_complex
from .graphs import (
    MalformedGraphError,
    cover_relations,
    enumerate_graphs,
    graph_from_json,
    vertices,
)
from .oracle import InterpolationError, count_points, interpolate_profile
from .presentation import ChowRing, ConsistencyError, RingElement

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_SIZE, EXIT_CONSISTENCY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class SizeGuardError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class Report:
    """One command's result in all three output shapes."""

    data: Any
    table: list[list[Any]]
    text: list[str]
    status: int = EXIT_OK
    notes: list[str] = field(default_factory=list)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.data, indent=2) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerows(self.table)
            return buf.getvalue()
        return "".join(line + "\n" for line in self.text)


# -- helpers -------------------------------------------------------------------


def _ring(K: SimplicialComplex) -> ChowRing:
    return ChowRing(K)


def _element_report(R: ChowRing, x: RingElement) -> Report:
    names = list(R.gens.names)
    rows = [["monomial", "coeff"]]
    for m, c in x.terms:
        rows.append([RingElement(((m, 1),)).format(names).lstrip("+") if m else "1", c])
    return Report(x.to_json(), rows, [x.format(names)])


def _parse_element(R: ChowRing, text: str) -> RingElement:
    text = text.strip()
    if text.startswith("["):
        try:
            x = RingElement.from_json(json.loads(text))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"bad element JSON: {exc}") from None
        if any(g >= len(R.gens) or g < 0 for m, _ in x.terms for g in m):
            raise ValueError("generator index out of range")
        return x
    return R.parse_element(text)


def _load_json_arg(arg: str):
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            arg = fh.read()
    try:
        return json.loads(arg)
    except json.JSONDecodeError as exc:
        raise MalformedGraphError(f"graph argument is neither a file nor JSON ({exc})") from None


# -- commands ------------------------------------------------------------------


def cmd_validate(K: SimplicialComplex, args) -> Report:
    fmt = K.ground.format
    tri = K.is_at_least_triparted()
    verdict = "at least triparted" if tri else "not at least triparted"
    data = {
        "labels": list(K.ground.labels),
        "facets": [K.ground.subset_labels(f) for f in K.facets],
        "faces": len(K.faces()),
        "triparted": tri,
        "verdict": verdict,
    }
    table = [
        ["key", "value"],
        ["labels", " ".join(K.ground.labels)],
        ["facets", " ".join(fmt(f) for f in K.facets)],
        ["faces", len(K.faces())],
        ["triparted", tri],
    ]
    text = [
        "labels: " + " ".join(K.ground.labels),
        "facets: " + " ".join(fmt(f) for f in K.facets),
        f"faces: {len(K.faces())}",
        verdict,
    ]
    return Report(data, table, text, EXIT_OK if tri else EXIT_INVALID)


def cmd_divisors(K: SimplicialComplex, args) -> Report:
    R = _ring(K)
    data, table, text = [], [["index", "name", "kind", "subset"]], []
    for i, (D, name) in enumerate(zip(R.gens.divisors, R.gens.names)):
        subset = K.ground.subset_labels(D.subset)
        data.append({"index": i, "name": name, "kind": D.kind, "subset": subset})
        table.append([i, name, D.kind, " ".join(subset)])
        text.append(f"{i}\t{name}")
    return Report(data, table, text)


def cmd_strata(K: SimplicialComplex, args) -> Report:
    codim = "all" if args.all or args.codim is None else args.codim
    graphs = enumerate_graphs(K, codim)
    edges = cover_relations(K, graphs)
    full = K.ground.full
    data = {"graphs": [], "edges": [list(e) for e in edges]}
    table = [["index", "codim", "vertices", "graph"]]
    text = []
    for i, G in enumerate(graphs):
        c = G.codimension(K.n)
        nv = len(vertices(G, full))
        entry = {"index": i, "codim": c, "vertices": nv}
        entry.update(G.to_json(K.ground))
        data["graphs"].append(entry)
        desc = G.describe(K.ground)
        table.append([i, c, nv, desc])
        text.append(f"G{i}\tcodim {c}\t{desc}")
    if edges:
        text.append("covers:")
        text.extend(f"G{a} < G{b}" for a, b in edges)
    return Report(data, table, text)


def cmd_ring(K: SimplicialComplex, args) -> Report:
    R = _ring(K)
    names = list(R.gens.names)
    rels = R.relation_set()
    quad = [f"{names[a]}*{names[b]}" for a, b in rels.quadratic]
    seen, linear = set(), []
    for x in rels.linear:
        if x and x not in seen and -x not in seen:
            seen.add(x)
            linear.append(x)
    data = {
        "generators": names,
        "quadratic": quad,
        "linear": [x.to_json() for x in linear],
        "linear_rank": len(R.linear_basis()),
    }
    table = [["kind", "relation"]]
    table += [["generator", n] for n in names]
    table += [["quadratic", q] for q in quad]
    table += [["linear", R.format(x)] for x in linear]
    text = [f"generators ({len(names)}): " + " ".join(names)]
    text.append(f"quadratic ({len(quad)}):")
    text += ["  " + q for q in quad]
    text.append(f"linear ({len(linear)}, rank {len(R.linear_basis())}):")
    text += ["  " + R.format(x) for x in linear]
    return Report(data, table, text)


def cmd_betti(K: SimplicialComplex, args) -> Report:
    prof = _ring(K).poincare_profile(args.threads)
    table = [["degree", "rank", "torsion"]]
    for d, (r, t) in enumerate(zip(prof.ranks, prof.torsion)):
        table.append([d, r, " ".join(map(str, t))])
    text = [",".join(map(str, prof.ranks))]
    text += [f"torsion in degree {d}: {list(t)}" for d, t in enumerate(prof.torsion) if t]
    return Report(prof.to_json(), table, text)


def cmd_multiply(K: SimplicialComplex, args) -> Report:
    R = _ring(K)
    x, y = _parse_element(R, args.x), _parse_element(R, args.y)
    return _element_report(R, R.multiply(x, y))


def cmd_stratum_class(K: SimplicialComplex, args) -> Report:
    R = _ring(K)
    G = graph_from_json(K.ground, _load_json_arg(args.graph))
    return _element_report(R, R.stratum_class(G))


def cmd_wdvv(K: SimplicialComplex, args) -> Report:
    R = _ring(K)
    return _element_report(R, R.wdvv(*args.labels))


def cmd_pushforward(K: SimplicialComplex, args) -> Report:
    R = _ring(K)
    labels = [s.strip() for s in args.subset.strip("{}").split(",") if s.strip()]
    return _element_report(R, R.pushforward_divisor(labels))


def cmd_pointcount(K: SimplicialComplex, args) -> Report:
    if args.q is not None:
        value = count_points(K, args.q)
        return Report({"q": args.q, "count": value}, [["q", "count"], [args.q, value]], [str(value)])
    poly = interpolate_profile(K, args.threads)
    table = [["degree", "coefficient"]] + [[d, c] for d, c in enumerate(poly.coeffs)]
    return Report({"coefficients": list(poly.coeffs)}, table, [",".join(map(str, poly.coeffs))])


def _corpus_match(K: SimplicialComplex) -> str | None:
    for name in corpus.names():
        if corpus.load(name) == K:
            return name
    return None


def cmd_selftest(K: SimplicialComplex, args) -> Report:
    results = list(checks.run_all(K, args.threads))
    name = _corpus_match(K)
    if name is not None:
        exp = corpus.expected(name)
        R = _ring(K)
        prof = R.poincare_profile(args.threads)
        got = {
            "point_count_coeffs": list(interpolate_profile(K, args.threads).coeffs),
            "presentation_ranks": list(prof.ranks),
            "torsion": [list(t) for t in prof.torsion],
            "match": True,
        }
        fails = [f"{k}: expected {exp[k]}, got {got[k]}" for k in exp if exp[k] != got.get(k)]
        results.append((f"corpus-report[{name}]", fails))
    data = [{"check": n, "ok": not f, "failures": f} for n, f in results]
    table = [["check", "status", "detail"]]
    text = []
    for n, f in results:
        table.append([n, "PASS" if not f else "FAIL", "; ".join(f)])
        text.append(f"PASS {n}" if not f else f"FAIL {n}: " + "; ".join(f[:5]))
    bad = sum(1 for _, f in results if f)
    text.append(f"{len(results) - bad}/{len(results)} checks passed")
    return Report(data, table, text, EXIT_CONSISTENCY if bad else EXIT_OK)


COMMANDS = {
    "validate": cmd_validate,
    "divisors": cmd_divisors,
    "strata": cmd_strata,
    "ring": cmd_ring,
    "betti": cmd_betti,
    "multiply": cmd_multiply,
    "stratum-class": cmd_stratum_class,
    "wdvv": cmd_wdvv,
    "pushforward": cmd_pushforward,
    "pointcount": cmd_pointcount,
    "selftest": cmd_selftest,
}


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", default=argparse.SUPPRESS, help="complex or weights JSON file")
    common.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    common.add_argument("--threads", type=_positive, default=argparse.SUPPRESS)
    common.add_argument("--max-labels", type=_positive, default=argparse.SUPPRESS)

    p = _Parser(prog="simplicial-chow", description=__doc__.splitlines()[0])
    p.add_argument("--input", help="complex or weights JSON file")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--max-labels", type=_positive, default=8, help="size guard on #labels (default 8)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name: str, help: str):
        return sub.add_parser(name, help=help, parents=[common])

    add("validate", "complex invariants and the triparted verdict")
    add("divisors", "generator table")
    s = add("strata", "stable graphs and the covering relations of the poset")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--codim", type=int)
    g.add_argument("--all", action="store_true")
    add("ring", "generators and relations")
    add("betti", "graded ranks and torsion")
    m = add("multiply", "normal form of a product")
    m.add_argument("x")
    m.add_argument("y")
    sc = add("stratum-class", "class of a stratum closure")
    sc.add_argument("graph", help="graph JSON or a path to it")
    w = add("wdvv", "WDVV element for four labels")
    w.add_argument("labels", nargs=4)
    pf = add("pushforward", "image of a two-component divisor of the discrete space")
    pf.add_argument("subset", help="comma-separated labels, e.g. 1,2")
    pc = add("pointcount", "point count polynomial, or its value at q")
    pc.add_argument("--q", type=int)
    add("selftest", "oracle comparison and brute-force cross-checks")
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR)
    if not args.input:
        print("simplicial-chow: error: --input is required", file=stderr)
        return EXIT_USAGE
    try:
        K = load_complex(args.input)
        if args.command != "validate" and K.n > args.max_labels:
            raise SizeGuardError(
                f"{K.n} labels exceeds --max-labels {args.max_labels}"
            )
        if args.command not in ("validate",) and not K.is_at_least_triparted():
            raise ComplexError("not at least triparted")
        report = COMMANDS[args.command](K, args)
    except SizeGuardError as exc:
        print(f"simplicial-chow: {exc}", file=stderr)
        return EXIT_SIZE
    except (ConsistencyError, InterpolationError) as exc:
        print(f"simplicial-chow: internal consistency failure: {exc}", file=stderr)
        return EXIT_CONSISTENCY
    except OSError as exc:
        print(f"simplicial-chow: {exc}", file=stderr)
        return EXIT_INVALID
    except (ComplexError, MalformedGraphError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"simplicial-chow: {msg}", file=stderr)
        return EXIT_INVALID
    stdout.write(report.render(args.format))
    stdout.flush()
    return report.status


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
