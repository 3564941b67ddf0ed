"""Parses a guide output and prints the result as one record.
Exits with status 0 for a usable strategy block, 1 otherwise."""

import sys

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from cli.command import EXIT_CONFIG, EXIT_VERIFICATION
from common.records import dump_record
from strategy_format.constraints import ConstraintNotFound
from strategy_format.parser import parse_strategy, structure_indicator


class Command(BaseCommand):
    help = (
        "Checks a guide output for exactly one well-formed strategy "
        "block within the token budget. Reads the given file, "
        "or standard input.")

    def add_arguments(self, parser):
        parser.add_argument(
            'path',
            nargs='?',
            help="File with the guide output; standard input if omitted",
        )
        parser.add_argument(
            '--budget',
            type=int,
            default=settings.DEFAULT_STRATEGY_TOKEN_BUDGET,
            help="Token budget of the strategy body",
        )
        parser.add_argument(
            '--constraint',
            action='append',
            default=[],
            help="ID of an interface constraint to enforce (repeatable)",
        )

    def handle(self, *args, **options):
        path = options.get('path')
        if options['budget'] < 1:
            raise CommandError(
                "--budget must be positive", returncode=EXIT_CONFIG)
        try:
            if path:
                with open(path, 'r', encoding='utf-8') as fh:
                    text = fh.read()
            else:
                text = sys.stdin.read()
        except OSError as err:
            raise CommandError(str(err), returncode=EXIT_CONFIG)

        parsed = parse_strategy(text, options['budget'])
        try:
            i_str = structure_indicator(
                text, options['budget'], options['constraint'])
        except ConstraintNotFound as err:
            raise CommandError(
                f"Unknown constraint {err}", returncode=EXIT_CONFIG)

        self.stdout.write(dump_record({**parsed.to_record(), 'i_str': i_str}))
        if not i_str:
            raise CommandError(
                "No usable strategy block", returncode=EXIT_VERIFICATION)
