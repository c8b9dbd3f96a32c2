import logging

logger = logging.getLogger(__name__)


class TokenService:
    """
    Heuristic token estimation for annotation cost summaries, plus the byte cap
    applied to stored responses. A rough char count is enough for reporting.
    """

    CHARS_PER_TOKEN = 4

    @staticmethod
    def estimate_tokens(text: str) -> int:
        """Estimates token count based on character length."""
        if not text:
            return 0
        return len(text) // TokenService.CHARS_PER_TOKEN

    @staticmethod
    def cap_bytes(text: str, cap: int) -> str:
        """
        Cuts ``text`` to at most ``cap`` UTF-8 bytes without splitting a character.
        Text under the cap is returned unchanged.
        """
        if not text:
            return ""
        encoded = text.encode("utf-8")
        if len(encoded) <= cap:
            return text

        logger.warning(f"[TokenService] Capping response from {len(encoded)} to {cap} bytes")
        return encoded[:cap].decode("utf-8", errors="ignore")
