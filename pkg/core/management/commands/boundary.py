from ._experiment import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Export the sampled boundary of W(M) as (theta, rho, re, im) rows'
    command_name = 'boundary'

    def add_command_arguments(self, parser):
        parser.add_argument('--weights', help='Comma-separated weights alpha_1..alpha_d')
