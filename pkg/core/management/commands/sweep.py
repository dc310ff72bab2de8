from ._experiment import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Verify a seeded batch of random weight vectors; failing reports are dumped next to the summary'
    command_name = 'sweep'

    def add_command_arguments(self, parser):
        parser.add_argument('--d', type=int, help='Matrix dimension')
        parser.add_argument('--count', type=int, help='Number of random weight vectors')
