"""
Django settings for crouzeix_lab project.

The project has no web surface: it hosts the `core` numerical library and the
management commands that run the verification experiments.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='django-insecure-crouzeix-lab-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'core',
]

# Reports are flat files; no database is used.
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Experiment defaults

CROUZEIX_OUTPUT_DIR = Path(config('CROUZEIX_OUTPUT_DIR', default=str(BASE_DIR / 'reports')))
CROUZEIX_GRID_SIZE = config('CROUZEIX_GRID_SIZE', default=2048, cast=int)
CROUZEIX_MAX_GRID_SIZE = config('CROUZEIX_MAX_GRID_SIZE', default=8192, cast=int)
CROUZEIX_SEED = config('CROUZEIX_SEED', default=7, cast=int)
CROUZEIX_LOG_LEVEL = config('CROUZEIX_LOG_LEVEL', default='INFO')

# Tolerance ladder, keyed like core.crouzeix_report.Tolerances
CROUZEIX_TOLERANCES = {
    'geometry': config('CROUZEIX_TOL_GEOMETRY', default=1e-8, cast=float),
    'map': config('CROUZEIX_TOL_MAP', default=1e-8, cast=float),
    'quadrature': config('CROUZEIX_TOL_QUADRATURE', default=1e-6, cast=float),
    'chain': config('CROUZEIX_TOL_CHAIN', default=1e-6, cast=float),
    'widened': config('CROUZEIX_TOL_WIDENED', default=1e-4, cast=float),
    'orthogonality': config('CROUZEIX_TOL_ORTHOGONALITY', default=1e-5, cast=float),
    'h0_agreement': config('CROUZEIX_TOL_H0_AGREEMENT', default=1e-7, cast=float),
    'gap': config('CROUZEIX_TOL_GAP', default=1e-6, cast=float),
}

# Boundary-correspondence iteration
CROUZEIX_MAP_DAMPING = config('CROUZEIX_MAP_DAMPING', default=0.5, cast=float)
CROUZEIX_MAP_MAX_ITER = config('CROUZEIX_MAP_MAX_ITER', default=2000, cast=int)
CROUZEIX_MAP_TOL = config('CROUZEIX_MAP_TOL', default=1e-12, cast=float)

# Blaschke multistart search
CROUZEIX_BLASCHKE_STARTS = config('CROUZEIX_BLASCHKE_STARTS', default=32, cast=int)
CROUZEIX_BLASCHKE_MAXFEV = config('CROUZEIX_BLASCHKE_MAXFEV', default=2000, cast=int)


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'core': {
            'handlers': ['console'],
            'level': CROUZEIX_LOG_LEVEL,
            'propagate': False,
        },
    },
}
