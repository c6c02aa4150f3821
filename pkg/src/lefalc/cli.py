"""Command line front end: parse -> unravel -> saturate -> report.

Exit codes: 0 consistent / success, 1 inconsistent, 2 input error,
3 internal limit (safety cap or search budget).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__, fca, modelgen, oracle, report, syntax, tableau, unravel
from .heyting import AlgebraError
from .oracle import BudgetExceededError
from .syntax import KbError
from .tableau import CapacityError
from .unravel import TBoxError

EXIT_CONSISTENT = 0
EXIT_INCONSISTENT = 1
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL_LIMIT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="falc",
        description="Consistency checking and concept-lattice tooling for "
                    "graded two-sorted knowledge bases.")
    parser.add_argument("--version", action="version",
                        version=f"falc {__version__} "
                                f"(rules {tableau.rule_revision_hash()})")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, figures=False):
        p.add_argument("file", help="knowledge base file")
        p.add_argument("--format", choices=("human", "kv"), default="human")
        p.add_argument("--seed", type=int, default=None,
                       help="shuffle the saturation worklist deterministically")
        if figures:
            p.add_argument("--figures", metavar="DIR", default=None,
                           help="also render figures into this directory")

    p_check = sub.add_parser("check", help="decide ABox consistency")
    add_common(p_check)
    p_check.add_argument("--trace", action="store_true",
                         help="print the derivation steps")
    p_check.add_argument("--emit-completion", action="store_true",
                         help="print every fact of the completion")
    p_check.add_argument("--emit-expanded", action="store_true",
                         help="print the unraveled knowledge base first")
    p_check.add_argument("--cap", type=int, default=None,
                         help="override the saturation safety cap")

    p_model = sub.add_parser("model", help="extract a model from a "
                                           "clash-free completion")
    add_common(p_model, figures=True)
    p_model.add_argument("--cap", type=int, default=None)

    p_trace = sub.add_parser("trace", help="print the full derivation trace")
    add_common(p_trace)

    p_expand = sub.add_parser("expand", help="print the unraveled "
                                             "knowledge base")
    add_common(p_expand)

    p_lattice = sub.add_parser("lattice", help="enumerate the concept "
                                               "lattice of a model block")
    add_common(p_lattice, figures=True)
    p_lattice.add_argument("--cap", type=int, default=10000,
                           help="concept enumeration cap")
    p_lattice.add_argument("--dot", action="store_true",
                           help="print a DOT digraph instead of tables")
    p_lattice.add_argument("--edges", action="store_true",
                           help="print the plain-text cover-edge list")

    p_oracle = sub.add_parser("oracle", help="exhaustive bounded model search")
    add_common(p_oracle)
    p_oracle.add_argument("--max-obj", type=int, default=3)
    p_oracle.add_argument("--max-feat", type=int, default=3)
    p_oracle.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)
    return parser


def _read_document(path: str, need_model: bool = False) -> syntax.Document:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    doc = syntax.parse_document(text)
    if need_model and doc.interpretation is None:
        raise KbError("the file has no model block")
    return doc


def _saturated(doc: syntax.Document, args) -> tableau.Verdict:
    expanded = unravel.expand(doc.kb)
    state = tableau.initialize(expanded, cap=getattr(args, "cap", None))
    return tableau.saturate(state, seed=args.seed)


def cmd_check(args) -> int:
    doc = _read_document(args.file)
    if args.emit_expanded:
        expanded = unravel.expand(doc.kb)
        print(syntax.print_kb(expanded), end="")
        stats = unravel.expansion_stats(doc.kb, expanded)
        print(f"expansion: {stats.definitions} definitions, "
              f"{stats.abox_nodes_before} -> {stats.abox_nodes_after} "
              f"concept nodes", file=sys.stderr)
    verdict = _saturated(doc, args)
    lines = report.check_kv(verdict) if args.format == "kv" \
        else report.check_human(verdict)
    print("\n".join(lines))
    if args.trace:
        print("\n".join(report.trace_lines(
            verdict.trace, verdict.state.algebra, kv=args.format == "kv")))
    if args.emit_completion:
        print("\n".join(report.completion_lines(verdict)))
    return EXIT_CONSISTENT if verdict.consistent else EXIT_INCONSISTENT


def cmd_model(args) -> int:
    doc = _read_document(args.file)
    verdict = _saturated(doc, args)
    if not verdict.consistent:
        lines = report.check_kv(verdict) if args.format == "kv" \
            else report.check_human(verdict)
        print("\n".join(lines))
        return EXIT_INCONSISTENT
    model = modelgen.extract_model(verdict.state, doc.kb)
    ctx = model.context
    if args.format == "kv":
        print("\n".join(report.model_kv(ctx)))
    else:
        print("\n".join(report.model_tables(ctx)))
        legend = [f"# {name} = {desc}" for name, desc in model.legend.items()
                  if name != desc]
        if legend:
            print("\n".join(legend))
    print(syntax.print_model(model.interpretation, verdict.state.kb,
                             model.legend), end="")
    if args.figures:
        for path in report.save_model_figures(ctx, args.figures):
            print(f"figure: {path}", file=sys.stderr)
    return EXIT_CONSISTENT


def cmd_trace(args) -> int:
    doc = _read_document(args.file)
    verdict = _saturated(doc, args)
    print("\n".join(report.trace_lines(
        verdict.trace, verdict.state.algebra, kv=args.format == "kv")))
    return EXIT_CONSISTENT if verdict.consistent else EXIT_INCONSISTENT


def cmd_expand(args) -> int:
    doc = _read_document(args.file)
    expanded = unravel.expand(doc.kb)
    print(syntax.print_kb(expanded), end="")
    stats = unravel.expansion_stats(doc.kb, expanded)
    print(f"expansion: {stats.definitions} definitions, "
          f"{stats.abox_nodes_before} -> {stats.abox_nodes_after} "
          f"concept nodes", file=sys.stderr)
    return EXIT_CONSISTENT


def cmd_lattice(args) -> int:
    doc = _read_document(args.file, need_model=True)
    ctx = doc.interpretation.context
    concepts = fca.enumerate_concepts(ctx, cap=args.cap)
    edges = fca.hasse_edges(ctx.algebra, concepts)
    if args.dot:
        print(report.hasse_dot(concepts, edges, ctx.algebra), end="")
    elif args.edges:
        print(report.hasse_text(concepts, edges), end="")
    elif args.format == "kv":
        print("\n".join(report.lattice_kv(ctx, concepts, edges)))
    else:
        print("\n".join(report.lattice_tables(ctx, concepts, edges)))
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        path = report.save_hasse_figure(
            ctx.algebra, concepts, edges, os.path.join(args.figures,
                                                       "hasse.png"))
        print(f"figure: {path}", file=sys.stderr)
    return EXIT_CONSISTENT


def cmd_oracle(args) -> int:
    doc = _read_document(args.file)
    result = oracle.find_model(doc.kb, args.max_obj, args.max_feat,
                               budget=args.budget)
    if args.format == "kv":
        print(report.kv_line("status", result.status))
        print(report.kv_line("worlds", result.stats.worlds))
    else:
        print(f"{result.status} (about {result.stats.worlds} candidate "
              f"evaluations)")
    if result.found:
        print(syntax.print_model(result.interpretation, doc.kb), end="")
    print(f"elapsed: {result.stats.elapsed:.3f}s", file=sys.stderr)
    return EXIT_CONSISTENT


COMMANDS = {
    "check": cmd_check,
    "model": cmd_model,
    "trace": cmd_trace,
    "expand": cmd_expand,
    "lattice": cmd_lattice,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (KbError, TBoxError, AlgebraError, fca.FcaError,
            modelgen.ModelgenError, FileNotFoundError) as exc:
        category = type(exc).__name__
        print(f"error[{category}]: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (CapacityError, BudgetExceededError) as exc:
        category = type(exc).__name__
        print(f"error[{category}]: {exc}", file=sys.stderr)
        return EXIT_INTERNAL_LIMIT


if __name__ == "__main__":
    sys.exit(main())
