"""
Django settings for the netarch project - root finding in growing random networks
"""
from pathlib import Path

from decouple import config


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# No request handling happens here; the key only satisfies Django's checks.
SECRET_KEY = config('SECRET_KEY', default='netarch-cli-only-not-secret')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
DJANGO_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
]

THIRD_PARTY_APPS = [
    'rest_framework',
]

LOCAL_APPS = [
    'graphs',
    'anchors',
    'estimator',
    'experiments',
    'core',
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

# Nothing is persisted; sqlite keeps Django's checks satisfied.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
    'COERCE_DECIMAL_TO_STRING': False,
}

# Root-finding configuration
ARCHAEOLOGY = {
    'WORKERS': config('NETARCH_WORKERS', default=1, cast=int),
    'OUTPUT_DIR': config('NETARCH_OUTPUT_DIR', default=str(BASE_DIR / 'results')),
    'SE_MULT': config('NETARCH_SE_MULT', default=3.0, cast=float),
    'MARGINAL_SE_MULT': config('NETARCH_MARGINAL_SE_MULT', default=4.0, cast=float),
    'MIN_CYCLE_LENGTH': 3,
}

ARCHAEOLOGY_GUARDS = {
    'ORACLE_MAX_VERTICES': config('NETARCH_ORACLE_MAX_VERTICES', default=14, cast=int),
    'ORACLE_MAX_M': config('NETARCH_ORACLE_MAX_M', default=8, cast=int),
    'MAX_VERTICES': config('NETARCH_MAX_VERTICES', default=200000, cast=int),
    'MAX_STEPS': config('NETARCH_MAX_STEPS', default=400000, cast=int),
}

LOG_LEVEL = config('NETARCH_LOG_LEVEL', default='INFO')
LOG_FILE = config('NETARCH_LOG_FILE', default='')

# Logging Configuration - console goes to stderr, stdout carries JSON payloads
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        'graphs': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'anchors': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'estimator': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'experiments': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'core': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'utils': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Add file logging only when a log file is configured
if LOG_FILE:
    LOGGING['handlers']['file'] = {
        'level': 'INFO',
        'class': 'logging.handlers.RotatingFileHandler',
        'filename': LOG_FILE,
        'maxBytes': 1024 * 1024 * 15,  # 15MB
        'backupCount': 5,
        'formatter': 'verbose',
    }
    for logger_name in LOCAL_APPS + ['utils']:
        LOGGING['loggers'][logger_name]['handlers'] = ['console', 'file']
