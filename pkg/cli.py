"""Command-line front end; JSON on stdout, diagnostics on stderr"""

from typing import Optional, Sequence
import argparse
import json
import logging
import sys

from app.core.config import settings
from app.core.exceptions import GraphAlgebraError
from app.core.logging_config import configure_logging
from app.models.graph import ClassPredicate
from app.models.vectors import format_rational
from app.services.algebra_service import algebra_service
from app.services.check_service import SUITES, check_service
from app.services.cobar_service import cobar_service
from app.services.feynman_service import feynman_service
from app.services.graph_service import graph_service
from app.services.io_service import io_service

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cli.py", description="Graph Hopf algebra, cobar cohomology and Feynman-rule obstructions"
    )
    parser.add_argument("--seed", type=int, default=settings.default_seed,
                        help="Seed of every randomized computation")
    parser.add_argument("--class", dest="graph_class", choices=["default", "no-parallel-off"], default="default",
                        help="Admissible graph class")
    parser.add_argument("--log-level", default=None, help="Logging level on stderr")
    verbs = parser.add_subparsers(dest="verb", required=True)

    enumerate_parser = verbs.add_parser("enumerate", help="List the canonical graphs with n internal, m boundary vertices and excess l")
    enumerate_parser.add_argument("-n", type=int, required=True)
    enumerate_parser.add_argument("-m", type=int, required=True)
    enumerate_parser.add_argument("-l", type=int, default=0)

    for verb, text in (("d", "Differential"), ("coproduct", "Coproduct"), ("antipode", "Antipode"),
                       ("product", "Product in file order"), ("cobar-d", "Cobar differential of the file as one word")):
        verb_parser = verbs.add_parser(verb, help=text)
        verb_parser.add_argument("--in", dest="path", required=True, help="Graph file")

    check_parser = verbs.add_parser("check", help="Run an axiom suite")
    check_parser.add_argument("suite", choices=SUITES)
    check_parser.add_argument("--max-n", type=int, default=2)
    check_parser.add_argument("--max-m", type=int, default=3)
    check_parser.add_argument("--max-l", type=int, default=0)
    check_parser.add_argument("--max-len", type=int, default=2, help="Longest cobar word for cobar-d2")

    cocycle_parser = verbs.add_parser("cocycle", help="Test delta W = 0 on the excess -1 graphs")
    cocycle_parser.add_argument("--weights", required=True, help="Weight table JSON")
    cocycle_parser.add_argument("--max-n", type=int, default=2)
    cocycle_parser.add_argument("--max-m", type=int, default=3)

    obstruction_parser = verbs.add_parser("obstruction", help="Assemble the obstruction on (n, m)")
    obstruction_parser.add_argument("--weights", help="Weight table JSON; seeded random when absent")
    obstruction_parser.add_argument("--state", help="State JSON; seeded random when absent")
    obstruction_parser.add_argument("--args", dest="args_path", help="Arguments JSON; seeded random when absent")
    obstruction_parser.add_argument("-n", type=int, required=True)
    obstruction_parser.add_argument("-m", type=int, required=True)
    obstruction_parser.add_argument("--dimension", type=int, default=None)

    cohomology_parser = verbs.add_parser("cohomology", help="Ranks of the truncated dual cobar complex")
    cohomology_parser.add_argument("--max-edges", type=int, default=3)
    cohomology_parser.add_argument("--max-len", type=int, default=2)
    cohomology_parser.add_argument("--max-boundary", type=int, default=None)
    return parser


def run(options: argparse.Namespace) -> int:
    """
    Execute one parsed command and print its JSON report

    Returns:
        Exit status: 0 on success, 1 when a check fails
    """
    predicate = ClassPredicate.named(options.graph_class)
    status = EXIT_OK

    if options.verb == "enumerate":
        graphs = graph_service.enumerate_graphs(options.n, options.m, options.l, predicate)
        data = {"count": len(graphs), "graphs": [g.key() for g in graphs]}

    elif options.verb in ("d", "coproduct", "antipode"):
        terms = io_service.parse_graph_file(io_service.read_text(options.path))
        operation = {
            "d": algebra_service.differential,
            "coproduct": algebra_service.coproduct,
            "antipode": algebra_service.antipode,
        }[options.verb]
        data = io_service.per_graph(terms, lambda t: operation(algebra_service.from_term(t), predicate).to_json())

    elif options.verb == "product":
        terms = io_service.parse_graph_file(io_service.read_text(options.path))
        result = algebra_service.unit()
        for _, term in terms:
            result = algebra_service.product(result, algebra_service.from_term(term))
        data = result.to_json()

    elif options.verb == "cobar-d":
        terms = io_service.parse_graph_file(io_service.read_text(options.path))
        word = io_service.word_from_keys([term.graph.key() for _, term in terms])
        sign = 1
        for _, term in terms:
            sign *= term.sign
        data = cobar_service.cobar_differential(word * sign, predicate).to_json()

    elif options.verb == "check":
        data = check_service.run_suite(
            options.suite, options.max_n, options.max_m, options.max_l, predicate, options.seed, options.max_len
        )
        if not data["passed"]:
            status = EXIT_FAILED_CHECK

    elif options.verb == "cocycle":
        weights = io_service.load_weights(io_service.read_json(options.weights))
        holds, witnesses = cobar_service.is_cocycle(weights, options.max_n, options.max_m, predicate)
        data = {
            "cocycle": holds,
            "witnesses": {graph.key(): format_rational(value) for graph, value in witnesses},
        }
        if not holds:
            status = EXIT_FAILED_CHECK

    elif options.verb == "obstruction":
        weights = io_service.load_weights(io_service.read_json(options.weights)) if options.weights else None
        states = io_service.load_state(io_service.read_json(options.state)) if options.state else None
        args = io_service.load_arguments(io_service.read_json(options.args_path)) if options.args_path else None
        weights, states, args = feynman_service.obstruction_inputs(
            options.n, options.m, weights, states, args, options.seed, options.dimension, predicate
        )
        dimension = options.dimension or (args[0].ring.ngens if args else None)
        data = feynman_service.assemble_obstruction(options.n, options.m, weights, states, args, predicate, dimension)
        if not (data["paths_agree"] and data["lhs_equals_rhs"]):
            status = EXIT_FAILED_CHECK

    else:
        data = cobar_service.truncated_cohomology_ranks(
            options.max_edges, options.max_len, predicate, options.max_boundary
        )

    sys.stdout.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        options = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    configure_logging(options.log_level)
    try:
        return run(options)
    except GraphAlgebraError as e:
        logger.error(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
