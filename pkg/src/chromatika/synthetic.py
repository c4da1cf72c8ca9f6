"""Synthetic corpora with planted topics, for estimator validation.

Topic k concentrates ``sharpness`` of its mass uniformly on its own
contiguous block of the vocabulary (and of the color basis) and spreads the
rest uniformly; sharpness 1 gives disjoint supports. ``theta_star`` records
the per-document topic proportions actually realized by the sampled tokens,
which is the right target when scoring recovery.
"""

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Vocabulary
from .topicmodel import generate

_SAFE_LETTERS = "bcdfghjkmnpqrtz"  # consonants only: tokens are stem-stable


def _safe_token(i: int, width: int) -> str:
    digits = []
    for _ in range(width):
        i, rem = divmod(i, len(_SAFE_LETTERS))
        digits.append(_SAFE_LETTERS[rem])
    return "q" + "".join(reversed(digits))


def synthetic_vocabulary(n_words: int) -> Vocabulary:
    width = 1
    while len(_SAFE_LETTERS) ** width < n_words:
        width += 1
    return Vocabulary(tuple(_safe_token(i, width) for i in range(n_words)))


def planted_topics(n_topics: int, n_types: int, sharpness: float) -> np.ndarray:
    """K x V row-stochastic matrix with block-concentrated topics."""
    if not 0 < sharpness <= 1:
        raise ValueError("sharpness must be in (0, 1]")
    if n_topics > n_types:
        raise ValueError("need at least one type per topic")
    mat = np.full((n_topics, n_types), (1.0 - sharpness) / n_types)
    bounds = [k * n_types // n_topics for k in range(n_topics + 1)]
    for k in range(n_topics):
        lo, hi = bounds[k], bounds[k + 1]
        mat[k, lo:hi] += sharpness / (hi - lo)
    return mat


@dataclass(frozen=True)
class SyntheticCorpus:
    corpus: Corpus
    phi_star: np.ndarray  # planted K x C color topics
    psi_star: np.ndarray  # planted K x W word topics
    theta_star: np.ndarray  # D x K realized assignment proportions
    theta_drawn: np.ndarray  # D x K mixtures drawn from Dirichlet(alpha)
    word_assignments: list[list[int]]
    color_assignments: list[list[int]]


def generate_synthetic_corpus(
    n_topics: int,
    n_words: int,
    n_colors: int,
    n_docs: int,
    tokens_per_doc: int,
    sharpness: float,
    seed: int,
    alpha: float = 0.8,
) -> SyntheticCorpus:
    """Corpus drawn from the generative process with planted topics.

    ``tokens_per_doc`` is per token type: every document gets that many word
    tokens and that many color tokens. Deterministic given the seed.
    """
    if n_topics > min(n_words, n_colors):
        raise ValueError("need n_topics <= min(n_words, n_colors)")
    if n_docs < 1 or tokens_per_doc < 1:
        raise ValueError("need at least one document and one token per type")
    phi_star = planted_topics(n_topics, n_colors, sharpness)
    psi_star = planted_topics(n_topics, n_words, sharpness)
    sample = generate(
        phi_star,
        psi_star,
        alpha,
        [(tokens_per_doc, tokens_per_doc)] * n_docs,
        seed=seed,
    )
    theta_star = np.zeros((n_docs, n_topics))
    for d in range(n_docs):
        for k in sample.word_assignments[d]:
            theta_star[d, k] += 1
        for k in sample.color_assignments[d]:
            theta_star[d, k] += 1
    theta_star /= theta_star.sum(axis=1, keepdims=True)
    docs = [
        type(doc)(
            id=f"syn-{i:04d}",
            title=f"syn-{i:04d}",
            genre="synthetic",
            color_tokens=doc.color_tokens,
            word_tokens=doc.word_tokens,
        )
        for i, doc in enumerate(sample.documents)
    ]
    corpus = Corpus(
        documents=docs,
        vocabulary=synthetic_vocabulary(n_words),
        n_color_types=n_colors,
    )
    return SyntheticCorpus(
        corpus=corpus,
        phi_star=phi_star,
        psi_star=psi_star,
        theta_star=theta_star,
        theta_drawn=sample.theta,
        word_assignments=sample.word_assignments,
        color_assignments=sample.color_assignments,
    )
