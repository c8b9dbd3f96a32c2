from django.apps import AppConfig


class PromptkitConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "promptkit"
    verbose_name = "Prompt composition"
