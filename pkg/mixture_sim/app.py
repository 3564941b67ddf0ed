from django.apps import AppConfig


class Config(AppConfig):
    name = 'mixture_sim'
