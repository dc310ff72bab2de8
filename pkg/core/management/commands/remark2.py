from ._experiment import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Tabulate psi for M(2 sin phi, 2 cos phi, 0), whose numerical range is the unit disk'
    command_name = 'remark2'

    def add_command_arguments(self, parser):
        parser.add_argument('--grid', type=int, help='Number of angles phi in [0, pi/2] (default 64)')
