from django.apps import AppConfig


class ShaperConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "shaper"
    verbose_name = "Reward shaping"
