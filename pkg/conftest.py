"""Pytest wiring: configure Django settings as ``manage.py test`` does."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'gcop.settings')
django.setup()
