"""
WSGI config for grid_react project.

Serves the stateless REACT HTTP API (see react_app.urls).
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'grid_react.settings')

application = get_wsgi_application()
