import importlib
from django.apps import AppConfig


class Config(AppConfig):
    name = 'llm_gateway'

    def ready(self):
        # Import modules to make adapters register as a side effect
        importlib.import_module('llm_gateway.adapters')
        importlib.import_module('llm_gateway.scripted')
