"""
Parsing of free-form model replies into subgoal -> boolean maps.

Replies are expected to end with a dictionary, usually inside a fenced
code block. Models deviate in many small ways (JSON booleans, unquoted keys,
trailing commas, comments, escaped quotes, truncated output), so each
candidate block goes through a chain of progressively more lenient readers.
``parse_response`` never raises.
"""

import ast
import json
import logging
import re

from json_repair import repair_json

from annotators.domain import ParseStatus

logger = logging.getLogger(__name__)

# Unclosed fences (truncated replies) run to the end of the text.
FENCE_RE = re.compile(r"```[^\n`]*\n?(.*?)(?:```|\Z)", re.DOTALL)

PAIR_RE = re.compile(
    r"""^\s*(?:"((?:[^"\\]|\\.)*)"|'((?:[^'\\]|\\.)*)'|([^\s"'{}:,][^"'{}:,]*?))"""
    r"""\s*:\s*(True|False|true|false)\s*$""",
    re.DOTALL,
)

BOOLEAN_WORDS = {"True": True, "true": True, "False": False, "false": False}
_LITERAL_ERRORS = (ValueError, SyntaxError, TypeError, MemoryError, RecursionError)


def parse_response(text: str) -> tuple:
    """
    Returns ``(flags, status)``. The last brace-balanced block holding at least one
    boolean pair wins; fenced code blocks are searched before bare braces.
    """
    if not text:
        return {}, ParseStatus.UNPARSEABLE

    for block in _candidate_blocks(text):
        if ":" not in block:
            continue
        flags, failed, repaired = _read_block(block)
        if not flags:
            continue
        if failed or repaired:
            logger.debug(f"[ResponseParser] Partial parse: {len(flags)} pairs, {failed} rejected")
            return flags, ParseStatus.PARTIAL
        return flags, ParseStatus.OK

    return {}, ParseStatus.UNPARSEABLE


def _candidate_blocks(text: str) -> list:
    fenced = []
    for match in FENCE_RE.finditer(text):
        fenced.extend(find_brace_blocks(match.group(1)))
    bare = find_brace_blocks(text)
    return list(reversed(fenced)) + list(reversed(bare))


def find_brace_blocks(text: str) -> list:
    """
    Outermost ``{...}`` blocks in order of appearance. Quotes are tracked only
    inside braces so apostrophes in prose do not matter. An unclosed trailing
    block is returned as well.
    """
    blocks = _scan_braces(text, quote_aware=True)
    if not blocks:
        blocks = _scan_braces(text, quote_aware=False)
    return blocks


def _scan_braces(text: str, quote_aware: bool) -> list:
    blocks = []
    depth = 0
    start = None
    quote = None
    escaped = False
    for i, ch in enumerate(text):
        if quote is not None:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == quote:
                quote = None
            elif ch == "\n":
                # Quoted keys never span lines; a stray apostrophe should not eat the block.
                quote = None
            continue
        if ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                blocks.append(text[start:i + 1])
        elif quote_aware and depth > 0 and ch in "\"'":
            quote = ch
    if depth > 0 and start is not None:
        blocks.append(text[start:])
    return blocks


def _read_block(block: str) -> tuple:
    """Returns ``(flags, rejected pair count, salvaged)`` for one candidate block."""
    cleaned = clean_block(block)

    obj = _literal(cleaned)
    if obj is None:
        obj = _json(cleaned)
    if isinstance(obj, dict):
        flags, failed = flatten_flags(obj)
        if flags:
            return flags, failed, False

    flags, failed = scan_pairs(cleaned)
    if flags:
        return flags, failed, False

    salvaged = _repair(block)
    if isinstance(salvaged, dict):
        flags, failed = flatten_flags(salvaged)
        if flags:
            logger.warning(f"[ResponseParser] Salvaged {len(flags)} pairs from a malformed block")
            return flags, failed, True
    return {}, 0, False


def clean_block(block: str) -> str:
    """Drops ``#`` and ``//`` comments and trailing commas outside of strings."""
    out = []
    quote = None
    escaped = False
    i = 0
    n = len(block)
    while i < n:
        ch = block[i]
        if quote is not None:
            out.append(ch)
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == quote or ch == "\n":
                quote = None
            i += 1
            continue
        if ch in "\"'":
            quote = ch
            out.append(ch)
        elif ch == "#" or block.startswith("//", i):
            while i < n and block[i] != "\n":
                i += 1
            continue
        elif ch == ",":
            j = i + 1
            while j < n and block[j].isspace():
                j += 1
            if j < n and block[j] in "}]":
                i += 1
                continue
            out.append(ch)
        else:
            out.append(ch)
        i += 1
    return "".join(out)


def _literal(cleaned: str):
    try:
        return ast.literal_eval(cleaned)
    except _LITERAL_ERRORS:
        return None


def _json(cleaned: str):
    try:
        return json.loads(cleaned)
    except ValueError:
        return None


def _repair(block: str):
    try:
        return repair_json(block, return_objects=True)
    except Exception as e:
        logger.debug(f"[ResponseParser] json_repair gave up: {e}")
        return None


def flatten_flags(obj: dict) -> tuple:
    """
    Boolean pairs of a decoded dictionary; nested dictionaries contribute their
    own keys. Returns ``(flags, rejected)`` where rejected counts non-boolean values.
    """
    flags = {}
    failed = 0
    for key, value in obj.items():
        if isinstance(value, dict):
            inner, inner_failed = flatten_flags(value)
            for name, flag in inner.items():
                flags.setdefault(name, flag)
            failed += inner_failed
        elif isinstance(value, bool):
            flags.setdefault(str(key).strip(), value)
        else:
            failed += 1
    return flags, failed


def scan_pairs(cleaned: str) -> tuple:
    """Entry-by-entry reading of a dictionary body that no decoder accepted."""
    body = cleaned.strip()
    if body.startswith("{"):
        body = body[1:]
    if body.endswith("}"):
        body = body[:-1]

    flags = {}
    failed = 0
    for entry in _split_entries(body):
        if not entry.strip():
            continue
        match = PAIR_RE.match(entry)
        if match is None:
            failed += 1
            continue
        double, single, bare, word = match.groups()
        key = double if double is not None else single if single is not None else bare
        key = re.sub(r"\\(.)", r"\1", key).strip()
        flags.setdefault(key, BOOLEAN_WORDS[word])
    return flags, failed


def _split_entries(body: str) -> list:
    entries = []
    current = []
    quote = None
    escaped = False
    depth = 0
    for ch in body:
        if quote is not None and ch == "\n":
            quote = None
            escaped = False
        if quote is not None:
            current.append(ch)
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == quote:
                quote = None
            continue
        if ch in "\"'":
            quote = ch
        elif ch in "{[(":
            depth += 1
        elif ch in "}])":
            depth = max(depth - 1, 0)
        elif ch in ",\n" and depth == 0:
            entries.append("".join(current))
            current = []
            continue
        current.append(ch)
    entries.append("".join(current))
    return entries
