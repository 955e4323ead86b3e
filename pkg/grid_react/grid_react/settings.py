"""
Django settings for grid_react project.

The project hosts the REACT toolkit: DC power flow, cyber-physical attack simulation,
attacked-area containment and line-failure detection. Numerical tolerances and run
defaults live in the ``GRID_REACT`` dict at the bottom of this file.

For the full list of Django settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    'GRID_REACT_SECRET_KEY',
    'django-insecure-grid-react-local-development-key-change-me',
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('GRID_REACT_DEBUG', '0') == '1'

ALLOWED_HOSTS = ['localhost', '127.0.0.1', 'testserver']


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'react_app',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'grid_react.urls'

WSGI_APPLICATION = 'grid_react.wsgi.application'


# The toolkit keeps no state between requests; the database is only here because
# django.contrib.auth (needed for DRF's anonymous user) expects one to be configured.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Django REST Framework Configuration
REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
    'UNAUTHENTICATED_USER': None,
}


# Logging
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
        'react_app': {
            'handlers': ['console'],
            'level': os.environ.get('GRID_REACT_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# REACT toolkit configuration (see react_app.conf for defaults)
GRID_REACT = {
    'TOL_SOLVE': 1e-8,
    'TOL_SUPP': 1e-6,
    'TOL_LP': 1e-7,
    'TOL_FEAS': 1e-6,
    'TOL_X': 1e-6,
    'CONFIDENCE_THRESHOLD': 99.99,
    'DEFAULT_T': 20,
    'DEFAULT_JOBS': int(os.environ.get('GRID_REACT_JOBS', '1')),
}
