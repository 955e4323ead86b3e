import os
import sys
from pathlib import Path

import django

sys.path.insert(0, str(Path(__file__).resolve().parent / 'grid_react'))
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'grid_react.settings')
django.setup()
