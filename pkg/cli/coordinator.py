"""
Run Coordinator
Orchestrates one CLI run: parse, configure, dispatch, report, summarize
"""
import logging
import sys

from cli.commands import build_parser, command_name, config_overrides, format_value
from cli.config import load_config
from cli.report import build_report, write_report
from core.diagnostics import DiagnosticsBus
from core.errors import IddlabError, exit_code_for

logger = logging.getLogger(__name__)

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def configure_logging(verbosity):
    logging.basicConfig(
        level=LOG_LEVELS.get(verbosity, logging.DEBUG),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


class RunCoordinator:
    def __init__(self, bus=None, stderr=None):
        self.bus = bus if bus is not None else DiagnosticsBus()
        self.stderr = stderr if stderr is not None else sys.stderr
        self.report = None

    def run(self, argv):
        """Execute one command line and return its exit status"""
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else 1
        configure_logging(args.verbose)

        command = command_name(args)
        try:
            config = load_config(args.config, config_overrides(args))
            outcome = args.handler(args, config, self.bus)
            self.report = build_report(command, config, outcome.result, self.bus.to_list())
            write_report(self.report, config.output)
        except IddlabError as e:
            print(f"iddlab {command}: error: {e}", file=self.stderr)
            return exit_code_for(e)
        except (ArithmeticError, ValueError) as e:
            # numpy / scipy failures not already mapped
            logger.debug("unmapped failure", exc_info=True)
            print(f"iddlab {command}: numeric error: {e}", file=self.stderr)
            return 2

        if not args.quiet:
            self._print_run_summary(command, outcome)
        return outcome.exit_code

    def _print_run_summary(self, command, outcome):
        """Print the run summary to the diagnostic stream"""
        out = self.stderr
        print("\n" + "=" * 60, file=out)
        print(f"IDDLAB {command.upper()}", file=out)
        print("=" * 60, file=out)
        for label, value in outcome.summary:
            print(f"{label}: {format_value(value)}", file=out)
        notes = self.bus.get_history()
        if notes:
            print("\nDiagnostics:", file=out)
            for note in notes:
                print(f"  • {note!r}", file=out)
        if outcome.exit_code:
            print(f"\nExit status: {outcome.exit_code}", file=out)
        print("=" * 60, file=out)


def run(argv=None):
    """Entry point: run(['detect', '--family', 'laplace']) -> exit status"""
    return RunCoordinator().run(sys.argv[1:] if argv is None else argv)
