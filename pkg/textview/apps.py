from django.apps import AppConfig


class TextviewConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "textview"
    verbose_name = "Text observations"
