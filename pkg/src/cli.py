"""Command line for generating, checking and exporting Matsumoto graphs.

Exit codes: 0 on success, 1 when a verification fails (axiom report,
certificate replay, coloring witness, disagreeing distances) and 2 for bad
input. Stdout only ever carries the requested document.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional, Type

from core.config import settings
from core.errors import AxiomViolationError, MatsumotoError, OutOfWindowError, ParseError
from core.log import setup_logging
from schemas.backend import Backend
from schemas.graph import GraphDocument
from schemas.path import CertificateDocument, PathDocument
from schemas.fan import FanDocument
from services.axioms import check_axioms
from services.braid import matsumoto_transform, shortest_paths, verify_certificate
from services.coloring import global_coloring
from services.dual import dual_reconstruct, extract_fan, locate, midpoint_fan
from services.generators import (
    CartanMatrix,
    CoxeterMatrix,
    build_cayley,
    build_from_file,
    build_rank2,
    build_weyl,
    cartan_matrix,
    coxeter_from_cartan,
    coxeter_matrix_of_type,
)
from services.graph_model import MGraph, distance, distance_geometric
from services.serialization import (
    Document,
    certificate_from_document,
    certificate_to_document,
    coloring_to_document,
    dump_document,
    dump_graph,
    fan_from_document,
    fan_to_document,
    load_matrix,
    parse_document,
    path_from_document,
    path_to_document,
    read_document,
    to_dot,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2


def _read(path: str, model: Type[Document]) -> Document:
    """Read a document from a file, or from stdin when ``path`` is ``-``."""
    if path == "-":
        return parse_document(sys.stdin.read(), model)
    return read_document(path, model)


def _load_graph(path: str, verify: bool = True) -> MGraph:
    return build_from_file(_read(path, GraphDocument), verify=verify)


def _emit(text: str, out: Optional[str] = None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w") as f:
            f.write(text)
    except OSError as e:
        raise ParseError(f"cannot write {out}: {e.strerror}")
    logger.info(f"Wrote {out}")


# gen


def _coxeter_input(args: argparse.Namespace) -> CoxeterMatrix:
    if args.matrix:
        matrix = load_matrix(args.matrix)
        return coxeter_from_cartan(matrix) if isinstance(matrix, CartanMatrix) else matrix
    if args.type:
        return coxeter_matrix_of_type(args.type, args.rank)
    raise ParseError("gen coxeter needs --matrix FILE or --type KIND --rank N")


def _cartan_input(args: argparse.Namespace) -> CartanMatrix:
    if args.cartan:
        matrix = load_matrix(args.cartan)
        if not isinstance(matrix, CartanMatrix):
            raise ParseError(f"{args.cartan} holds a Coxeter matrix, expected a Cartan matrix")
        return matrix
    if args.type:
        return cartan_matrix(args.type, args.rank)
    raise ParseError("gen weyl needs --cartan FILE or --type KIND --rank N")


def _gen_coxeter(args: argparse.Namespace) -> int:
    g = build_cayley(_coxeter_input(args), radius=args.radius, backend=args.backend, verify=not args.no_verify)
    _emit(dump_graph(g), args.out)
    return EXIT_OK


def _gen_weyl(args: argparse.Namespace) -> int:
    g = build_weyl(_cartan_input(args), radius=args.radius, verify=not args.no_verify)
    _emit(dump_graph(g), args.out)
    return EXIT_OK


def _gen_rank2(args: argparse.Namespace) -> int:
    g = build_rank2(
        args.kind, m=args.m, k=args.k, edges=args.edges, radius=args.radius, verify=not args.no_verify
    )
    _emit(dump_graph(g), args.out)
    return EXIT_OK


def _gen_midpoint(args: argparse.Namespace) -> int:
    _, g = midpoint_fan(args.n)
    _emit(dump_graph(g), args.out)
    return EXIT_OK


def _gen_file(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph, verify=not args.no_verify)
    _emit(dump_graph(g), args.out)
    return EXIT_OK


def _add_gen_args(parser: argparse.ArgumentParser) -> None:
    kinds = parser.add_subparsers(dest="kind_command", required=True)

    coxeter = kinds.add_parser("coxeter", help="Cayley graph of a Coxeter group.")
    coxeter.add_argument("--matrix", help="Coxeter or Cartan matrix JSON file.")
    coxeter.add_argument("--type", help="Named type A, B, C, D or G instead of a file.")
    coxeter.add_argument("--rank", type=int, default=2)
    coxeter.add_argument("--radius", type=int)
    coxeter.add_argument("--backend", choices=[str(b) for b in Backend], default=str(Backend.FLOAT))
    coxeter.add_argument("--no-verify", action="store_true", help="Skip the axiom checks.")
    coxeter.add_argument("--out")
    coxeter.set_defaults(func=_gen_coxeter)

    weyl = kinds.add_parser("weyl", help="Weyl group of a Cartan matrix with integer roots.")
    weyl.add_argument("--cartan", help="Cartan matrix JSON file.")
    weyl.add_argument("--type", help="Named type A, B, C, D or G instead of a file.")
    weyl.add_argument("--rank", type=int, default=2)
    weyl.add_argument("--radius", type=int)
    weyl.add_argument("--no-verify", action="store_true", help="Skip the axiom checks.")
    weyl.add_argument("--out")
    weyl.set_defaults(func=_gen_weyl)

    rank2 = kinds.add_parser("rank2", help="Rank two graph: polygon, idihedral, segment or tail.")
    rank2.add_argument("--kind", required=True, choices=["polygon", "idihedral", "segment", "tail"])
    rank2.add_argument("--m", type=int)
    rank2.add_argument("--k", type=int)
    rank2.add_argument("--edges", type=int)
    rank2.add_argument("--radius", type=int)
    rank2.add_argument("--no-verify", action="store_true", help="Skip the axiom checks.")
    rank2.add_argument("--out")
    rank2.set_defaults(func=_gen_rank2)

    midpoint = kinds.add_parser("midpoint", help="Graph of the triangle midpoint fan.")
    midpoint.add_argument("--n", type=int, required=True)
    midpoint.add_argument("--out")
    midpoint.set_defaults(func=_gen_midpoint)

    from_file = kinds.add_parser("file", help="Load, check and re-serialise a graph file.")
    from_file.add_argument("graph")
    from_file.add_argument("--no-verify", action="store_true", help="Skip the axiom checks.")
    from_file.add_argument("--out")
    from_file.set_defaults(func=_gen_file)


# verify, dist, words


def _verify(args: argparse.Namespace) -> int:
    report = check_axioms(_load_graph(args.graph, verify=False))
    _emit(dump_document(report))
    return EXIT_OK if report.passed else EXIT_FAILED


def _dist(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    bfs = distance(g, args.v, args.w)
    geometric = distance_geometric(g, args.v, args.w)
    _emit(f"{bfs} {geometric}")
    if bfs != geometric:
        logger.error(f"Distances from {args.v} to {args.w} disagree: bfs {bfs}, geometric {geometric}")
        return EXIT_FAILED
    return EXIT_OK


def _words(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    paths = shortest_paths(g, args.v, args.w, limit=args.limit)
    _emit(json.dumps([path_to_document(p).model_dump() for p in paths], indent=2))
    return EXIT_OK


# certificates


def _cert(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    a = path_from_document(g, _read(args.a, PathDocument))
    b = path_from_document(g, _read(args.b, PathDocument))
    certificate = matsumoto_transform(g, a, b)
    _emit(dump_document(certificate_to_document(certificate)), args.out)
    return EXIT_OK


def _cert_verify(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    doc = _read(args.certificate, CertificateDocument)
    try:
        certificate = certificate_from_document(g, doc)
    except MatsumotoError as e:
        # a certificate naming paths that do not exist fails verification
        logger.error(f"Certificate rejected: {e}")
        _emit(json.dumps({"ok": False, "failed_at": None, "reason": str(e)}, indent=2))
        return EXIT_FAILED
    result = verify_certificate(g, certificate)
    _emit(dump_document(result))
    return EXIT_OK if result.ok else EXIT_FAILED


# coloring


def _color(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    palette = args.palette.split(",") if args.palette else None
    result = global_coloring(g, palette)
    _emit(dump_document(coloring_to_document(g, result)))
    return EXIT_OK if result.ok else EXIT_FAILED


# dual


def _dual_locate(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    xi = [c for c in args.xi.split(",") if c.strip()]
    try:
        found = locate(g, xi)
    except OutOfWindowError as e:
        logger.warning(f"{e}")
        found = None
    _emit("none" if found is None else str(found))
    return EXIT_OK


def _dual_fan(args: argparse.Namespace) -> int:
    if args.midpoint is not None:
        fan, _ = midpoint_fan(args.midpoint)
    elif args.graph:
        fan = extract_fan(_load_graph(args.graph))
    else:
        raise ParseError("dual fan needs --midpoint N or a graph file")
    _emit(dump_document(fan_to_document(fan)), args.out)
    return EXIT_OK


def _dual_reconstruct(args: argparse.Namespace) -> int:
    g = dual_reconstruct(fan_from_document(_read(args.fan, FanDocument)))
    _emit(dump_graph(g), args.out)
    return EXIT_OK


def _add_dual_args(parser: argparse.ArgumentParser) -> None:
    actions = parser.add_subparsers(dest="dual_command", required=True)

    locate_parser = actions.add_parser("locate", help="Vertex whose dual chamber contains a functional.")
    locate_parser.add_argument("graph")
    locate_parser.add_argument("--xi", required=True, help='Coordinates "c1,c2,..."; use --xi=-1,2 for a leading minus.')
    locate_parser.set_defaults(func=_dual_locate)

    fan_parser = actions.add_parser("fan", help="Chamber fan of the midpoint example or of a graph.")
    fan_parser.add_argument("graph", nargs="?")
    fan_parser.add_argument("--midpoint", type=int)
    fan_parser.add_argument("--out")
    fan_parser.set_defaults(func=_dual_fan)

    reconstruct = actions.add_parser("reconstruct", help="Rebuild a graph from a fan document.")
    reconstruct.add_argument("fan")
    reconstruct.add_argument("--out")
    reconstruct.set_defaults(func=_dual_reconstruct)


# export


def _export(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    text = to_dot(g) if args.format == "dot" else dump_graph(g)
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matsumoto", description="Matsumoto graphs toolkit.")
    parser.add_argument("--tol", type=float, help="Float backend tolerance (overrides MK_TOL).")
    parser.add_argument("--log-level", help="Log level for stderr diagnostics (overrides MK_LOG_LEVEL).")
    subparsers = parser.add_subparsers(dest="command", required=True)

    _add_gen_args(subparsers.add_parser("gen", help="Generate a graph."))

    verify = subparsers.add_parser("verify", help="Check the axioms of a graph file.")
    verify.add_argument("graph", help="Graph JSON file, or - for stdin.")
    verify.set_defaults(func=_verify)

    dist = subparsers.add_parser("dist", help="BFS and geometric distance between two vertices.")
    dist.add_argument("graph")
    dist.add_argument("v", type=int)
    dist.add_argument("w", type=int)
    dist.set_defaults(func=_dist)

    words = subparsers.add_parser("words", help="All shortest paths between two vertices.")
    words.add_argument("graph")
    words.add_argument("v", type=int)
    words.add_argument("w", type=int)
    words.add_argument("--limit", type=int)
    words.set_defaults(func=_words)

    cert = subparsers.add_parser("cert", help="Braid move certificate between two shortest paths.")
    cert.add_argument("graph")
    cert.add_argument("--a", required=True, help="Path JSON file.")
    cert.add_argument("--b", required=True, help="Path JSON file.")
    cert.add_argument("--out")
    cert.set_defaults(func=_cert)

    cert_verify = subparsers.add_parser("cert-verify", help="Replay a certificate.")
    cert_verify.add_argument("graph")
    cert_verify.add_argument("certificate")
    cert_verify.set_defaults(func=_cert_verify)

    color = subparsers.add_parser("color", help="Global edge coloring, or a holonomy witness.")
    color.add_argument("graph")
    color.add_argument("--palette", help="Comma separated color names, one per rank.")
    color.set_defaults(func=_color)

    _add_dual_args(subparsers.add_parser("dual", help="Dual chambers and fans."))

    export = subparsers.add_parser("export", help="Export a graph as DOT or canonical JSON.")
    export.add_argument("format", choices=["dot", "json"])
    export.add_argument("graph")
    export.add_argument("--out")
    export.set_defaults(func=_export)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_BAD_INPUT

    setup_logging(args.log_level)
    if args.tol is not None:
        settings.MK_TOL = args.tol

    try:
        return int(args.func(args))
    except AxiomViolationError as e:
        print(f"error: {e}", file=sys.stderr)
        if e.report is not None:
            for check in e.report.checks:
                for witness in check.witnesses:
                    print(f"  {check.name}: {witness}", file=sys.stderr)
        return EXIT_FAILED
    except MatsumotoError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
