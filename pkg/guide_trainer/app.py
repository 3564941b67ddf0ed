from django.apps import AppConfig


class Config(AppConfig):
    name = 'guide_trainer'
