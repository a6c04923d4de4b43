#!/usr/bin/env python3
"""
tcas - a two-mode tensor computer algebra system
Main entry point for running scripts, the interactive REPL and the cloak pipeline.
"""

import argparse
import sys
import traceback
from fractions import Fraction
from pathlib import Path
from typing import Dict, List

# Add the src directory to the Python path
sys.path.append(str(Path(__file__).parent / "src"))

from src.part_1_abstract_tensor_algebra.tensor_context import Context
from src.part_1_abstract_tensor_algebra.tensor_expression_renderer import RenderOptions
from src.part_3_maxwell_geometrization.cloak_analyzer import CloakAnalyzer
from src.reporting.medium_report_generator import MediumReportGenerator
from src.session.script_session import Session, repl_step, run_script
from src.utils.exceptions import TcasError


def progress(message: str) -> None:
    """Progress lines go to stderr so stdout carries only the payload."""
    print(message, file=sys.stderr)


def width_argument(value: str) -> int:
    width = int(value)
    if width < 20:
        raise argparse.ArgumentTypeError(f"width must be at least 20, got {width}")
    return width


def sample_argument(value: str) -> Dict[str, Fraction]:
    name, separator, number = value.partition("=")
    if not separator or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=rational, got '{value}'")
    try:
        return {name.strip(): Fraction(number.strip())}
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def rational_argument(value: str):
    try:
        return Fraction(value)
    except ValueError:
        return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcas",
        description="tcas - abstract-index rewriting, component calculation and Maxwell geometrization",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py run assets/scripts/maxwell_bianchi.cdb
  python main.py run assets/scripts/cloak_determinant.frm --width 40
  python main.py repl
  python main.py cloak --geometry cylindrical --a 1 --b 3 --sample r=2
  python main.py cloak --geometry spherical --emit latex --output spherical.tex
        """
    )
    parser.add_argument("--verbose", action="store_true", help="Print tracebacks on failure")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a script file")
    run.add_argument("file", type=str, help="Script file (UTF-8)")
    run.add_argument("--format", choices=["text", "latex"], default="text", help="Output format (default: text)")
    run.add_argument("--width", type=width_argument, default=80, help="Line width (default: 80)")
    run.add_argument("--dim", type=int, default=4, help="Space-time dimension (default: 4)")

    repl = commands.add_parser("repl", help="Start the interactive session")
    repl.add_argument("--width", type=width_argument, default=80, help="Line width (default: 80)")

    cloak = commands.add_parser("cloak", help="Derive cloak medium parameters")
    cloak.add_argument("--geometry", choices=["cylindrical", "spherical"], required=True)
    cloak.add_argument("--a", type=rational_argument, default="a", help="Inner radius (rational or symbol)")
    cloak.add_argument("--b", type=rational_argument, default="b", help="Outer radius (rational or symbol)")
    cloak.add_argument("--sample", type=sample_argument, action="append", default=[],
                       help="Evaluation point, e.g. r=2 (repeatable)")
    cloak.add_argument("--emit", choices=["table", "csv", "latex"], default="table")
    cloak.add_argument("--output", type=str, help="Write the payload to a file instead of stdout")
    return parser


def command_run(args) -> int:
    path = Path(args.file)
    if not path.exists():
        progress(f"❌ Error: Script '{path}' does not exist.")
        return 2
    progress(f"🚀 Running script...")
    progress(f"📁 Script: {path}")
    render_format = "latex" if args.format == "latex" else "plain"
    session = Session(ctx=Context(dimension=args.dim), render=RenderOptions(render_format, args.width))
    transcript = run_script(path.read_text(encoding="utf-8"), session)
    for note in dict.fromkeys(transcript.notes):
        progress(f"⚠️  {note}")
    if transcript.outputs:
        print(transcript.text())
    if transcript.status:
        progress(f"❌ Error: {transcript.error}")
        return transcript.status
    progress(f"✅ {len(transcript.entries)} statements executed")
    return 0


def command_repl(args) -> int:
    session = Session(mode="repl", render=RenderOptions(width=args.width))
    print("🚀 tcas interactive session (:ctx, :show label, :quit)")
    while not session.finished:
        try:
            line = input("... " if session.buffer.strip() else ">>> ")
        except EOFError:
            break
        session, output = repl_step(session, line)
        if output:
            print(output)
    return 0


def command_cloak(args) -> int:
    progress(f"🚀 Deriving {args.geometry} cloak parameters...")
    sample: Dict[str, Fraction] = {}
    for item in args.sample:
        sample.update(item)
    analyzer = CloakAnalyzer(args.geometry, args.a, args.b)
    result = analyzer.analyze_cloak(sample or None)
    if not result['positive']:
        progress("⚠️  some parameters are not positive inside the shell")

    generator = MediumReportGenerator()
    table = generator.build_parameter_table([result])
    if args.emit == "csv":
        payload = generator.to_csv(table)
    elif args.emit == "latex":
        payload = generator.to_latex(table)
    else:
        payload = generator.to_text(table)

    if args.output:
        Path(args.output).write_text(payload, encoding="utf-8")
        progress(f"📁 Written to {args.output}")
    else:
        print(payload)
    progress("✅ Done")
    return 0


COMMANDS = {"run": command_run, "repl": command_repl, "cloak": command_cloak}


def main(argv: List[str] = None) -> int:
    """Main function dispatching the sub-commands."""
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except TcasError as exc:
        progress(f"❌ Error: {exc}")
        if args.verbose:
            traceback.print_exc()
        return exc.exit_code
    except Exception as exc:
        progress(f"❌ Error during {args.command}: {exc}")
        if args.verbose:
            traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
