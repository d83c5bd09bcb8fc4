import sys
from argparse import ArgumentParser
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from src.app import create_app
from src.app.commands import describe_command, run_command


def build_parser() -> ArgumentParser:
    arg = ArgumentParser(description="Run continuous-frame experiments and write reports.")
    commands = arg.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run the experiment named in a config file.")
    run.add_argument("--config", type=Path, required=True, help="JSON or YAML experiment config.")
    run.add_argument("--out", type=Path, default=None, help="Report path (stdout when omitted).")
    run.add_argument("--format", choices=["json", "csv"], default=None, help="Report format.")
    run.add_argument("--seed", type=int, default=None, help="Seed overriding the config.")
    run.add_argument("--quiet", action="store_true", help="Only log warnings and errors.")

    describe = commands.add_parser("describe", help="Show an experiment's parameters and claims.")
    describe.add_argument("name", nargs="?", default=None, help="Experiment name; lists all when omitted.")
    return arg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    app = create_app(quiet=getattr(args, "quiet", False))
    if args.command == "describe":
        return describe_command(app, args.name)
    return run_command(app, args.config, args.out, args.format, args.seed, args.quiet)


if __name__ == "__main__":
    sys.exit(main())
