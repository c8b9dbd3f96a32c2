from django.apps import AppConfig


class AnnotatorsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "annotators"
    verbose_name = "Subgoal annotators"
