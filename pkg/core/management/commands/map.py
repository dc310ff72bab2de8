from ._experiment import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Compute the disk map of W(M) and export its coefficients or boundary correspondence'
    command_name = 'map'

    def add_command_arguments(self, parser):
        parser.add_argument('--weights', help='Comma-separated weights alpha_1..alpha_d')
