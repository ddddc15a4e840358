"""
Point d'entrée de la ligne de commande:

    hmergm.py decompose | simulate | fit | gof | summarize [options]

Les erreurs de l'application sont converties en message sur stderr et en
code de sortie (0 succès, 1 configuration ou usage, 2 données,
3 échec numérique).
"""
import argparse
import logging
import sys
from typing import List, Optional

from .commands import decompose, fit, gof, simulate, summarize
from .config import APP_NAME, APP_SUBTITLE, APP_TITLE, EXIT_CONFIG, EXIT_OK, LOG_DATE_FORMAT, LOG_FORMAT, VERSION
from .errors import HmergmError

logger = logging.getLogger(__name__)

COMMANDS = (decompose, simulate, fit, gof, summarize)


class ArgumentParser(argparse.ArgumentParser):
    """Erreurs d'usage avec le code de sortie des erreurs de configuration"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: erreur: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog=APP_NAME, description=f"{APP_TITLE}. {APP_SUBTITLE}")
    parser.add_argument('--version', action='version', version=f"{APP_NAME} {VERSION}")
    subparsers = parser.add_subparsers(dest='command', metavar='commande', parser_class=ArgumentParser)
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, datefmt=LOG_DATE_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    args.argv = argv
    setup_logging(args.verbose, args.quiet)

    try:
        code = args.handler(args)
    except HmergmError as exc:
        logger.debug("Détail de l'erreur", exc_info=True)
        print(f"{APP_NAME}: erreur: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception:
        logger.exception("Erreur inattendue")
        raise
    return EXIT_OK if code is None else code
