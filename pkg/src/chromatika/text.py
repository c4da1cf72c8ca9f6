"""Word normalization for transcripts and queries.

Pipeline per surface form: strip digits/special characters, lowercase, drop
stop words (built-in + handcrafted), map month names to meteorological
seasons (northern hemisphere), then stem. The pipeline is re-applied until
the token is stable, so every emitted token normalizes to itself (a stem or
season word that lands on a stop word is dropped rather than emitted).

Hyphenated compounds are decomposed by the tokenizer, with each piece
normalized on its own.
"""

import re

from ._stopwords import BUILTIN_STOP_WORDS, HANDCRAFTED_STOP_WORDS
from .stemming import porter_stem

MONTH_TO_SEASON = {
    "december": "winter",
    "january": "winter",
    "february": "winter",
    "march": "spring",
    "april": "spring",
    "may": "spring",
    "june": "summer",
    "july": "summer",
    "august": "summer",
    "september": "fall",
    "october": "fall",
    "november": "fall",
}

_HYPHENS = re.compile(r"[-‐‑–—]+")
_NON_LETTER = re.compile(r"[^a-zA-Z]+")
_MAX_PASSES = 10


def is_stop_word(token: str) -> bool:
    return token in BUILTIN_STOP_WORDS or token in HANDCRAFTED_STOP_WORDS


def _normalize_once(piece: str) -> str | None:
    token = _NON_LETTER.sub("", piece).lower()
    if not token:
        return None
    if is_stop_word(token):
        return None
    token = MONTH_TO_SEASON.get(token, token)
    return porter_stem(token)


def normalize_word(raw: str) -> str | None:
    """Normalize one surface form to zero or one vocabulary token."""
    token = _normalize_once(raw)
    for _ in range(_MAX_PASSES):
        if token is None:
            return None
        again = _normalize_once(token)
        if again == token:
            return token
        token = again
    return token


def split_surfaces(text: str) -> list[str]:
    """Raw surface forms: whitespace-delimited, hyphenated compounds
    decomposed."""
    pieces = []
    for surface in text.split():
        pieces.extend(p for p in _HYPHENS.split(surface) if p)
    return pieces


def tokenize_text(text: str) -> list[str]:
    """Split on whitespace and hyphens and normalize every piece."""
    tokens = []
    for piece in split_surfaces(text):
        token = normalize_word(piece)
        if token is not None:
            tokens.append(token)
    return tokens
