from ._experiment import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Compare the best Blaschke product with the best power on the 4x4 rotation-invariant family'
    command_name = 'family4'

    def add_command_arguments(self, parser):
        parser.add_argument('--a-grid', dest='a_grid', help='Comma-separated values of a (default 0,0.25,0.5,1,2,4)')
