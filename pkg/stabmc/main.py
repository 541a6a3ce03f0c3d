"""
Command-line driver.

    stabmc [check] MODEL [--format text|json] [--property I] [--dump-tree PATH] [--replay PATH]
    stabmc parse MODEL
    stabmc tree MODEL [--show-leaves] [--dump-tree PATH]

Exit codes: 0 every property holds, 1 some property is violated, 2 usage or
front-end error, 3 an Undefined verdict or an exceeded run limit.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from stabmc.check_service import CheckService
from stabmc.diagnostics import has_errors
from stabmc.frontend import compile_source
from stabmc.printer import format_program
from stabmc.report import (
    EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, RunReport, TraceFile,
)
from stabmc.settings import LOG_LEVEL, Limits
from stabmc.tree import describe_leaf

logger = logging.getLogger("stabmc")

SUBCOMMANDS = ("check", "parse", "tree")


def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("model", help="model file (.qmc)")
    common.add_argument("--max-depth", type=_count, default=None, help="maximum tree depth")
    common.add_argument("--max-nodes", type=_count, default=None, help="maximum number of tree nodes")
    common.add_argument("--support-cap", type=_count, default=None,
                        help="largest support dimension k (2^k valuations) to enumerate")
    common.add_argument("--format", choices=("text", "json"), default="text", help="report format")
    common.add_argument("-v", "--verbose", action="count", default=0, help="log more (repeatable)")
    common.add_argument("--timings", action="store_true", help="include per-phase timings")

    parser = argparse.ArgumentParser(prog="stabmc", description="Model checker for stabilizer quantum protocols")
    sub = parser.add_subparsers(dest="command")

    check = sub.add_parser("check", parents=[common], help="check the model's properties")
    check.add_argument("--property", type=int, default=None, metavar="I", help="check only the I-th property")
    check.add_argument("--dump-tree", metavar="PATH", help="write the execution tree as DOT")
    check.add_argument("--replay", metavar="PATH", help="replay a counterexample trace (JSON)")

    sub.add_parser("parse", parents=[common], help="run the front end only")

    tree = sub.add_parser("tree", parents=[common], help="build the execution tree without checking")
    tree.add_argument("--dump-tree", metavar="PATH", help="write the execution tree as DOT")
    tree.add_argument("--show-leaves", action="store_true", help="list every leaf with its valuations")
    return parser


def configure_logging(verbose: int) -> None:
    level = LOG_LEVEL.upper()
    if verbose == 1:
        level = "INFO"
    elif verbose > 1:
        level = "DEBUG"
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def _read_model(path: str) -> Optional[bytes]:
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as e:
        print(f"stabmc: cannot read {path}: {e.strerror or e}", file=sys.stderr)
        return None


def _write(path: str, text: str) -> bool:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return True
    except OSError as e:
        print(f"stabmc: cannot write {path}: {e.strerror or e}", file=sys.stderr)
        return False


# ==================== SUBCOMMANDS ====================

def cmd_parse(args, service: CheckService, source: bytes) -> int:
    program, diagnostics = compile_source(source)
    for d in diagnostics:
        print(f"{args.model}:{d}", file=sys.stderr)
    if program is None or has_errors(diagnostics):
        return EXIT_USAGE
    if args.format == "json":
        print(json.dumps({"model": program.name, "processes": [p.name for p in program.processes],
                          "properties": len(program.properties)}))
    else:
        sys.stdout.write(format_program(program))
    return EXIT_OK


def cmd_tree(args, service: CheckService, source: bytes) -> int:
    program, report = service.compile(source, args.model)
    if program is None:
        _emit(report, args)
        return report.exit_code()
    tree = service.build(program, report)
    if tree is not None:
        if args.dump_tree and not _write(args.dump_tree, tree.to_dot()):
            return EXIT_USAGE
        if args.show_leaves and args.format == "text":
            _emit(report, args)
            for leaf in tree.leaves():
                print(describe_leaf(leaf, service.limits.support_cap))
            return report.exit_code()
    _emit(report, args)
    return report.exit_code()


def cmd_check(args, service: CheckService, source: bytes) -> int:
    if args.replay:
        return cmd_replay(args, service, source)
    report, tree = service.check(source, args.model, property_index=args.property)
    if tree is not None and args.dump_tree and not _write(args.dump_tree, tree.to_dot()):
        return EXIT_USAGE
    _emit(report, args)
    return report.exit_code()


def cmd_replay(args, service: CheckService, source: bytes) -> int:
    try:
        with open(args.replay, "r", encoding="utf-8") as f:
            data = json.load(f)
        trace = _trace_from(data, args.property)
    except (OSError, ValueError, ValidationError) as e:
        print(f"stabmc: cannot read trace {args.replay}: {e}", file=sys.stderr)
        return EXIT_USAGE
    if trace is None:
        print(f"stabmc: {args.replay} holds no trace to replay", file=sys.stderr)
        return EXIT_USAGE
    program, report = service.compile(source, args.model)
    if program is None:
        _emit(report, args)
        return EXIT_USAGE
    code, message = service.replay(program, trace.index, [a.to_action() for a in trace.trace])
    if args.format == "json":
        print(json.dumps({"model": program.name, "index": trace.index, "exit": code, "message": message}))
    else:
        print(f"[{trace.index}] {message}")
    return code


def _trace_from(data: dict, property_index: Optional[int]) -> Optional[TraceFile]:
    """A trace file, or a full JSON report from which the selected (or first false) property is taken."""
    if "properties" not in data:
        trace = TraceFile.model_validate(data)
        if property_index is not None:
            trace.index = property_index
        return trace
    report = RunReport.model_validate(data)
    for prop in report.properties:
        if property_index is not None and prop.index != property_index:
            continue
        if property_index is None and prop.verdict != "false":
            continue
        return TraceFile(index=prop.index, trace=prop.trace)
    return None


def _emit(report: RunReport, args) -> None:
    if not args.timings:
        report.timings = None
    if args.format == "json":
        print(report.to_json())
    else:
        sys.stdout.write(report.render_text(show_timings=args.timings))


# ==================== ENTRY POINTS ====================

def run(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in SUBCOMMANDS and not argv[0].startswith("-"):
        argv.insert(0, "check")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    configure_logging(args.verbose)
    try:
        limits = Limits.from_env(max_depth=args.max_depth, max_nodes=args.max_nodes, support_cap=args.support_cap)
    except ValidationError as e:
        print(f"stabmc: invalid limits: {e}", file=sys.stderr)
        return EXIT_USAGE
    source = _read_model(args.model)
    if source is None:
        return EXIT_USAGE
    service = CheckService(limits)
    handler = {"check": cmd_check, "parse": cmd_parse, "tree": cmd_tree}[args.command]
    try:
        return handler(args, service, source)
    except Exception as e:
        logger.debug("[CHECK] unexpected failure", exc_info=True)
        print(f"stabmc: internal error: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
