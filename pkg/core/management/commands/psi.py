from ._experiment import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Compute psi(M) for one weighted cyclic shift (or any 2x2 matrix) and check the bound chain'
    command_name = 'psi'

    def add_command_arguments(self, parser):
        parser.add_argument('--weights', help='Comma-separated weights alpha_1..alpha_d, e.g. 1.2,0.9,0.8')
        parser.add_argument('--matrix', help='Four comma-separated entries of a 2x2 matrix, row-major')
