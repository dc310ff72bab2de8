import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'crouzeix_lab.settings')
django.setup()
