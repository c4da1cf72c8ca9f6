"""Corpus construction: manifests of (image, transcript) entries become
tokenized documents over the 512-color basis and a built word vocabulary.

Token order inside a document is canonicalized (ascending index) — the
model is exchangeable, and canonical order keeps training byte-reproducible
regardless of how the corpus was produced.

Entries are independent up to the final vocabulary merge, so ingestion
could be parallelized per entry; this implementation processes them
serially. All produced structures are immutable once built.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import TOTAL_BINS, ColorBasis
from .errors import IngestError
from .imaging import image_histogram
from .text import is_stop_word, normalize_word, tokenize_text

log = logging.getLogger(__name__)

CORPUS_FORMAT = "chromatika-corpus"
CORPUS_VERSION = 1


@dataclass(frozen=True)
class Vocabulary:
    tokens: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("vocabulary tokens must be unique")
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.tokens)})

    @property
    def size(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    genre: str
    color_tokens: np.ndarray  # N_d bin indices, ascending
    word_tokens: np.ndarray  # M_d vocabulary indices, ascending

    @property
    def n_colors(self) -> int:
        return int(self.color_tokens.size)

    @property
    def n_words(self) -> int:
        return int(self.word_tokens.size)

    def color_counts(self) -> np.ndarray:
        return np.bincount(self.color_tokens, minlength=TOTAL_BINS)


@dataclass
class Corpus:
    documents: list[Document]
    vocabulary: Vocabulary
    basis: ColorBasis = field(default_factory=ColorBasis)
    excluded_ids: list[str] = field(default_factory=list)
    # reduced color alphabets are used by synthetic corpora; real corpora
    # always span the full 512-bin basis
    n_color_types: int | None = None

    @property
    def color_types(self) -> int:
        return self.n_color_types if self.n_color_types is not None else self.basis.total_bins


def _canonical_tokens(counts: np.ndarray) -> np.ndarray:
    return np.repeat(np.arange(counts.size, dtype=np.int64), counts)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    title: str
    genre: str
    transcript: Path
    image: Path | None = None
    histogram: Path | None = None
    categories: tuple[str, ...] = ()


def load_manifest(path) -> list[CorpusEntry]:
    """Read a corpus manifest; relative paths resolve against its directory."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    base = path.parent
    entries = []
    for raw in data["entries"]:
        entry_id = str(raw["id"])
        if ("image" in raw) == ("histogram" in raw):
            raise IngestError(entry_id, "need exactly one of 'image' or 'histogram'")
        entries.append(
            CorpusEntry(
                id=entry_id,
                title=raw.get("title", entry_id),
                genre=raw.get("genre", ""),
                transcript=base / raw["transcript"],
                image=base / raw["image"] if "image" in raw else None,
                histogram=base / raw["histogram"] if "histogram" in raw else None,
                categories=tuple(raw.get("categories", [])),
            )
        )
    return entries


def read_histogram_csv(path) -> np.ndarray:
    """512 comma-separated non-negative integer counts."""
    text = Path(path).read_text(encoding="utf-8").strip()
    parts = [p for p in text.replace("\n", ",").split(",") if p.strip()]
    if len(parts) != TOTAL_BINS:
        raise ValueError(f"expected {TOTAL_BINS} counts, got {len(parts)}")
    counts = np.array([int(p) for p in parts], dtype=np.int64)
    if (counts < 0).any():
        raise ValueError("histogram counts must be non-negative")
    if counts.sum() < 1:
        raise ValueError("histogram has no mass")
    return counts


def _entry_word_surfaces(entry: CorpusEntry) -> list[str]:
    try:
        transcript = entry.transcript.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(entry.id, f"cannot read transcript: {exc}") from exc
    tokens = tokenize_text(transcript)
    for cat in entry.categories:
        token = normalize_word(cat)
        if token is not None:
            tokens.append(token)
    return tokens


def _entry_color_counts(entry: CorpusEntry) -> np.ndarray:
    if entry.histogram is not None:
        try:
            return read_histogram_csv(entry.histogram)
        except (OSError, ValueError) as exc:
            raise IngestError(entry.id, f"bad histogram: {exc}") from exc
    try:
        return image_histogram(entry.image)
    except (OSError, ValueError) as exc:
        raise IngestError(entry.id, f"bad image: {exc}") from exc


def build_corpus(entries: list[CorpusEntry]) -> Corpus:
    """Tokenize all entries against a shared vocabulary.

    Entries whose transcript yields no usable word token are excluded from
    the corpus (the model needs at least one of each token type) and logged.
    """
    if not entries:
        raise ValueError("no corpus entries")
    seen_ids = set()
    for entry in entries:
        if entry.id in seen_ids:
            raise IngestError(entry.id, "duplicate entry id")
        seen_ids.add(entry.id)

    word_lists = [_entry_word_surfaces(e) for e in entries]
    color_counts = [_entry_color_counts(e) for e in entries]

    # documents are kept in id order: training sweeps documents in list
    # order, and id order makes that independent of manifest ordering
    kept = sorted(
        (i for i, words in enumerate(word_lists) if words),
        key=lambda i: entries[i].id,
    )
    excluded = [entries[i].id for i in range(len(entries)) if i not in set(kept)]
    for entry_id in excluded:
        log.warning("entry %s has no surviving word tokens; excluded from corpus", entry_id)
    if not kept:
        raise ValueError("no entry produced any word tokens")

    vocab = Vocabulary(tuple(sorted({t for i in kept for t in word_lists[i]})))
    documents = []
    for i in kept:
        entry = entries[i]
        word_idx = np.sort(np.array([vocab.index[t] for t in word_lists[i]], dtype=np.int64))
        documents.append(
            Document(
                id=entry.id,
                title=entry.title,
                genre=entry.genre,
                color_tokens=_canonical_tokens(color_counts[i]),
                word_tokens=word_idx,
            )
        )
    return Corpus(documents=documents, vocabulary=vocab, excluded_ids=excluded)


def verify_vocabulary(vocab: Vocabulary) -> None:
    """Re-scan invariants: no stop words, stemmed lowercase letters only."""
    for token in vocab.tokens:
        if is_stop_word(token):
            raise ValueError(f"stop word {token!r} in vocabulary")
        if not token.isalpha() or token != token.lower():
            raise ValueError(f"malformed vocabulary token {token!r}")
        if normalize_word(token) != token:
            raise ValueError(f"unstable vocabulary token {token!r}")


def save_corpus(corpus: Corpus, path) -> None:
    docs = []
    for d in corpus.documents:
        color = np.bincount(d.color_tokens, minlength=TOTAL_BINS)
        word = np.bincount(d.word_tokens, minlength=corpus.vocabulary.size)
        docs.append(
            {
                "id": d.id,
                "title": d.title,
                "genre": d.genre,
                "color_counts": [[int(b), int(c)] for b, c in enumerate(color) if c],
                "word_counts": [[int(w), int(c)] for w, c in enumerate(word) if c],
            }
        )
    payload = {
        "format": CORPUS_FORMAT,
        "version": CORPUS_VERSION,
        "color_bins": TOTAL_BINS,
        "vocabulary": list(corpus.vocabulary.tokens),
        "excluded_ids": list(corpus.excluded_ids),
        "documents": docs,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_corpus(path) -> Corpus:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != CORPUS_FORMAT:
        raise ValueError(f"not a corpus file: {path}")
    if payload.get("version") != CORPUS_VERSION:
        raise ValueError(f"unsupported corpus version {payload.get('version')}")
    vocab = Vocabulary(tuple(payload["vocabulary"]))
    documents = []
    for raw in payload["documents"]:
        color = np.zeros(TOTAL_BINS, dtype=np.int64)
        for b, c in raw["color_counts"]:
            color[b] = c
        word = np.zeros(vocab.size, dtype=np.int64)
        for w, c in raw["word_counts"]:
            word[w] = c
        documents.append(
            Document(
                id=raw["id"],
                title=raw["title"],
                genre=raw["genre"],
                color_tokens=_canonical_tokens(color),
                word_tokens=_canonical_tokens(word),
            )
        )
    return Corpus(
        documents=documents,
        vocabulary=vocab,
        excluded_ids=list(payload.get("excluded_ids", [])),
    )
