import argparse
import os
import sys
from typing import Dict, List, Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Add project root to path to ensure imports work
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from app.core.config import EngineConfig
from app.core.errors import InputError, InvariantError
from app.models.presets import get_presets_menu
from app.services.pipeline import StringTopologyPipeline
from app.services.twisted import parse_window
from app.utils.export import (
    connection_to_document,
    connection_to_tsv,
    report_to_document,
    report_to_tsv,
    table_to_document,
    table_to_tsv,
    to_json,
    verify_to_document,
    verify_to_tsv,
)
from app.utils.log import get_logger, set_verbosity

LOG = get_logger("app.cli")


def _reps(values: Optional[List[str]]) -> Dict[str, str]:
    reps = {}
    for value in values or []:
        name, sep, expr = value.partition("=")
        if not sep or not name.strip():
            raise InputError(f"--rep expects NAME=EXPR, got {value!r}")
        reps[name.strip()] = expr.strip()
    return reps


def _join_window(argv: List[str]) -> List[str]:
    """Glue `--window -6..4` into `--window=-6..4` so argparse does not read -6..4 as an option"""
    joined, i = [], 0
    while i < len(argv):
        if argv[i] == "--window" and i + 1 < len(argv):
            joined.append(f"--window={argv[i + 1]}")
            i += 2
        else:
            joined.append(argv[i])
            i += 1
    return joined


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgloops",
        description="Exact loop homology, Hochschild cohomology and brane topology from finite dg models",
        epilog=get_presets_menu(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="preset spec (sphere:3, cpn:2, product(a,b)) or .dgm/.json file")
    common.add_argument("--format", choices=["tsv", "json"], default=EngineConfig.DEFAULT_FORMAT)
    common.add_argument("--single-thread", action="store_true", help="evaluate every degree sequentially")
    common.add_argument("--verbose", action="store_true", help="stage progress and timings on stderr")

    windowed = argparse.ArgumentParser(add_help=False)
    windowed.add_argument("--window", required=True, help="degree window lo..hi")

    ringed = argparse.ArgumentParser(add_help=False)
    ringed.add_argument("--ring", action="store_true", help="ring structure on the named generators")
    ringed.add_argument("--rep", action="append", metavar="NAME=EXPR", help="named representative (leading terms)")

    sub = parser.add_subparsers(dest="command", required=True)

    loops = sub.add_parser("loops", parents=[common, windowed, ringed], help="free loop homology H_•(LM)")
    loops.add_argument("--top-degree", type=int, help="dimension n of M (default: top degree of the model)")
    loops.add_argument("--route", choices=["algebra", "dual"], default="algebra")

    hoch = sub.add_parser("hochschild", parents=[common, windowed], help="Hochschild cohomology by twisted complex")
    hoch.add_argument("--module", choices=["dual"], help="coefficients in the dual bimodule A*")

    sub.add_parser("based", parents=[common, windowed, ringed], help="based loop homology H_•(ΩM)")

    brane = sub.add_parser("brane", parents=[common, windowed, ringed], help="brane homology H_•(L_f)")
    brane.add_argument("--sub", required=True, help="model of the submanifold Z")
    brane.add_argument("--map", required=True, help=".dgmap file with f*: A_M -> A_Z")
    brane.add_argument("--top-degree", type=int, help="dimension p of Z (default: top degree of A_Z)")
    brane.add_argument("--intersection", action="store_true", help="images of the loop generators")

    conn = sub.add_parser("connection", parents=[common], help="Chen connection (ω, ð)")
    conn.add_argument("--max-len", type=int, required=True)

    verify = sub.add_parser("verify", parents=[common, windowed], help="invariant suite")
    verify.add_argument("--oracle", action="store_true", help="compare with the brute-force bar complex")
    verify.add_argument("--poincare", action="store_true", help="Poincaré map and dual-route agreement")
    verify.add_argument("--sub", help="brane checks: model of Z")
    verify.add_argument("--map", help="brane checks: .dgmap file")
    return parser


def execute(args) -> int:
    config = EngineConfig(workers=1) if args.single_thread else EngineConfig()
    pipeline = StringTopologyPipeline(config)
    fmt = args.format

    if args.command == "loops":
        report = pipeline.loops(args.model, args.top_degree, args.window, args.ring, _reps(args.rep), args.route)
        sys.stdout.write(to_json(report_to_document(report)) if fmt == "json" else report_to_tsv(report))
    elif args.command == "hochschild":
        table, convention = pipeline.hochschild(args.model, args.window, args.module)
        if fmt == "json":
            sys.stdout.write(to_json(table_to_document(table, args.model, convention)))
        else:
            sys.stdout.write(table_to_tsv(table, args.model, convention))
    elif args.command == "based":
        report = pipeline.based(args.model, args.window, args.ring, _reps(args.rep))
        sys.stdout.write(to_json(report_to_document(report)) if fmt == "json" else report_to_tsv(report))
    elif args.command == "brane":
        report, images = pipeline.brane(args.model, args.sub, args.map, args.top_degree, args.window,
                                        args.intersection, args.ring, _reps(args.rep))
        if fmt == "json":
            sys.stdout.write(to_json(report_to_document(report, images)))
        else:
            sys.stdout.write(report_to_tsv(report, images))
    elif args.command == "connection":
        connection, hd = pipeline.connection(args.model, args.max_len)
        if fmt == "json":
            sys.stdout.write(to_json(connection_to_document(connection, hd)))
        else:
            sys.stdout.write(connection_to_tsv(connection, hd))
    elif args.command == "verify":
        checks = pipeline.verify(args.model, args.window, args.oracle, args.poincare, args.sub, args.map)
        doc = verify_to_document(args.model, parse_window(args.window), checks)
        sys.stdout.write(to_json(doc) if fmt == "json" else verify_to_tsv(doc))
        if not doc.ok:
            return 1
    return 0


def run(argv: Optional[List[str]] = None) -> int:
    """Command-line entry point; returns 0 on success, 1 on invariant failure, 2 on input error"""
    parser = build_parser()
    try:
        args = parser.parse_args(_join_window(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as exit_:
        return int(exit_.code or 0)
    set_verbosity(args.verbose)
    try:
        return execute(args)
    except InputError as e:
        LOG.error(f"❌ Error: {e}")
        return 2
    except InvariantError as e:
        LOG.error(f"❌ Invariant violated: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(run())
