from django.apps import AppConfig


class KeyroomConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "keyroom"
    verbose_name = "Key-door room"
