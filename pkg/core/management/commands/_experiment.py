import json

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import CrouzeixError
from core.forms import RunConfigForm
from core.runner import FORMATS, run

FORM_KEYS = ('weights', 'matrix', 'd', 'count', 'grid', 'a_grid', 'n', 'seed', 'output', 'format', 'tol')


class ExperimentCommand(BaseCommand):
    """Shared flags, validation and exit-status mapping for the experiment commands."""

    command_name = None

    def add_arguments(self, parser):
        parser.add_argument('--output', help='Report path (default: CROUZEIX_OUTPUT_DIR/<command>.<format>)')
        parser.add_argument('--format', choices=FORMATS, help='Output format')
        parser.add_argument('--n', type=int, help='Boundary/contour grid size (power of two >= 256)')
        parser.add_argument('--seed', type=int, help='Seed for random draws')
        parser.add_argument('--config', help='JSON file with default values for any flag')
        parser.add_argument(
            '--tol',
            action='append',
            metavar='NAME=VALUE',
            help='Tolerance override, repeatable (e.g. --tol quadrature=1e-7)',
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def _load_config_file(self, path):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            raise CommandError(f'Cannot read config file {path}: {e}', returncode=2)
        if not isinstance(data, dict):
            raise CommandError(f'Config file {path} must hold a JSON object', returncode=2)
        return data

    def handle(self, *args, **options):
        data = self._load_config_file(options['config']) if options.get('config') else {}
        data.update({key: options[key] for key in FORM_KEYS if options.get(key) is not None})
        data['command'] = self.command_name

        form = RunConfigForm(data)
        if not form.is_valid():
            errors = '; '.join(
                f'{field}: {" ".join(messages)}' if field != '__all__' else ' '.join(messages)
                for field, messages in form.errors.items()
            )
            raise CommandError(f'Invalid arguments: {errors}', returncode=2)
        config = form.to_config()

        self.stdout.write(f'Running {self.command_name} (n={config.n}, seed={config.seed})...')
        try:
            outcome = run(config)
        except CrouzeixError as e:
            self.stdout.write(self.style.ERROR(f'✗ {self.command_name} failed: {e}'))
            raise CommandError(str(e), returncode=1)

        for line in outcome.summary:
            self.stdout.write(line)
        for path in outcome.files:
            self.stdout.write(f'Wrote {path}')
        if outcome.status != 0:
            self.stdout.write(self.style.ERROR(f'✗ {len(outcome.failures)} check(s) failed'))
            raise CommandError(
                f'Invariant violations, see {", ".join(outcome.failures)}', returncode=outcome.status)
        self.stdout.write(self.style.SUCCESS(f'✓ {self.command_name}: all checks passed'))
