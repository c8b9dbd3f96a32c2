# annotators/models.py
from django.db import models


class CachedResponse(models.Model):
    """
    One model reply, keyed by backend kind, model and the sha256 of the prompt text.
    Rows are only ever inserted, never updated.
    """
    backend_id = models.CharField(max_length=64)
    model_name = models.CharField(max_length=255, blank=True, default="")
    prompt_hash = models.CharField(max_length=64)
    raw_text = models.TextField(blank=True)
    latency_ms = models.FloatField(default=0.0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        constraints = [
            models.UniqueConstraint(
                fields=["backend_id", "model_name", "prompt_hash"],
                name="unique_cached_response",
            ),
        ]

    def __str__(self):
        return f"{self.backend_id}/{self.model_name or '-'} {self.prompt_hash[:12]}"
