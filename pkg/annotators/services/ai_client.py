# annotators/services/ai_client.py
"""
Gemini client factory for the Gemini annotator backend.
Switch between the Gemini API and Vertex AI with USE_VERTEX_AI in settings.
"""

import logging
import os

from django.conf import settings
from google import genai

logger = logging.getLogger(__name__)


def get_ai_client():
    """Returns the client matching the configured API."""
    if getattr(settings, "USE_VERTEX_AI", False):
        return _get_vertex_client()
    return _get_gemini_client()


def _get_gemini_client():
    api_key = getattr(settings, "GEMINI_API_KEY", "") or os.getenv("GEMINI_API_KEY")
    if not api_key:
        raise ValueError("GEMINI_API_KEY not found in settings or environment")
    return genai.Client(api_key=api_key)


def _get_vertex_client():
    project_id = getattr(settings, "VERTEX_PROJECT_ID", "")
    if not project_id:
        raise ValueError("VERTEX_PROJECT_ID is not configured in settings.py")
    return genai.Client(
        vertexai=True,
        project=project_id,
        location=getattr(settings, "VERTEX_LOCATION", "us-central1"),
    )


# Default annotator model per API type, used when no --model / CALM_LLM_MODEL is given
MODELS = {
    "gemini_api": "gemini-2.5-flash-lite",
    "vertex_ai": "gemini-2.5-flash-lite",
}


def get_model() -> str:
    api_type = "vertex_ai" if getattr(settings, "USE_VERTEX_AI", False) else "gemini_api"
    return MODELS[api_type]
