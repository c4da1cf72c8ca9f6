"""Applications on top of a trained model: text query -> topic weights ->
palette recommendation, image re-ranking, semantic pixel selection, and
grayscale-pattern recoloring.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import QueryError
from .imaging import is_gray, luma, native_histogram, to_rgb_array
from .palette import Palette5, WeightedColorHistogram, nearest_palettes
from .text import normalize_word, split_surfaces
from .topicmodel import TrainedModel

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TopicQuery:
    raw_text: str
    tokens: tuple[int, ...]  # vocabulary indices, multiplicity kept
    dropped: tuple[str, ...]  # surfaces filtered out or out-of-vocabulary
    weights: np.ndarray  # K, sums to 1


def query_to_topic_weights(
    text: str, model: TrainedModel, combine: str = "sum"
) -> TopicQuery:
    """Map query text to topic weights.

    combine="sum" (default) scores topic k by the sum of its word-topic
    probabilities over the query tokens; "product" multiplies them
    (geometric-mean style), which is stricter on off-topic tokens.
    """
    if combine not in ("sum", "product"):
        raise ValueError(f"unknown combine mode {combine!r}")
    pieces = split_surfaces(text)
    token_ids: list[int] = []
    dropped: list[str] = []
    for piece in pieces:
        token = normalize_word(piece)
        if token is None:
            dropped.append(piece)
        elif token in model.vocabulary:
            token_ids.append(model.vocabulary.index[token])
        else:
            dropped.append(token)
    if not token_ids:
        raise QueryError(dropped)
    if combine == "sum":
        weights = model.psi[:, token_ids].sum(axis=1)
    else:
        weights = np.exp(np.log(model.psi[:, token_ids]).sum(axis=1))
    weights = weights / weights.sum()
    return TopicQuery(
        raw_text=text,
        tokens=tuple(token_ids),
        dropped=tuple(dropped),
        weights=weights,
    )


def blended_color_histogram(weights, model: TrainedModel) -> np.ndarray:
    """Mix the color topics by the query weights: h = sum_k w_k * phi_k."""
    w = np.asarray(weights, dtype=np.float64)
    return w @ model.phi


def recommend_palettes(
    text: str,
    model: TrainedModel,
    pool: list[Palette5],
    n: int,
    combine: str = "sum",
) -> tuple[TopicQuery, list[tuple[int, Palette5, float]]]:
    """Rank pool palettes against the query's blended color histogram."""
    query = query_to_topic_weights(text, model, combine=combine)
    h = blended_color_histogram(query.weights, model)
    return query, nearest_palettes(h, pool, n)


def rerank_images(
    text: str, images, model: TrainedModel, combine: str = "sum"
) -> list[tuple[str, float]]:
    """Sort images by L1 distance between their normalized 512-bin color
    histogram and the query's blended histogram (ascending, stable).

    ``images`` is a list of (name, source) pairs or plain paths.
    Undecodable images are excluded with a warning.
    """
    items = [im if isinstance(im, tuple) else (str(im), im) for im in images]
    if not items:
        raise ValueError("no images to rank")
    query = query_to_topic_weights(text, model, combine=combine)
    h = blended_color_histogram(query.weights, model)
    scored = []
    for name, source in items:
        try:
            counts = native_histogram(source)
        except ValueError as exc:
            log.warning("skipping %s: %s", name, exc)
            continue
        hist = counts / counts.sum()
        scored.append((name, float(np.abs(hist - h).sum())))
    scored.sort(key=lambda t: t[1])
    return scored


def bin_scores(weights, model: TrainedModel) -> np.ndarray:
    """Per-bin query affinity, normalized to [0, 1] across the 512 bins.

    The raw score is the query-blended probability of the bin over its
    uniform-topic-mixture probability, so globally common colors are not
    over-selected."""
    w = np.asarray(weights, dtype=np.float64)
    K = model.n_topics
    blended = w @ model.phi
    baseline = model.phi.mean(axis=0)  # uniform 1/K mixture
    raw = blended / baseline
    lo, hi = float(raw.min()), float(raw.max())
    if hi == lo:
        return np.ones_like(raw)
    return (raw - lo) / (hi - lo)


def select_pixels(
    image, text: str, model: TrainedModel, tau: float = 0.5, combine: str = "sum"
) -> tuple[np.ndarray, np.ndarray]:
    """Keep pixels whose color bin scores at least tau for the query;
    everything else goes grayscale (Rec. 709 luma on all three channels).

    Returns (output image, boolean mask); masked pixels are bit-exact
    copies of the input."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    query = query_to_topic_weights(text, model, combine=combine)
    scores = bin_scores(query.weights, model)
    px = to_rgb_array(image)
    from .basis import quantize_array

    bins = quantize_array(px)
    mask = scores[bins] >= tau
    gray = luma(px)
    out = np.repeat(gray[..., None], 3, axis=2)
    out[mask] = px[mask]
    return out, mask


def equal_mass_bands(gray_values: np.ndarray, n_bands: int = 5) -> np.ndarray:
    """Band boundaries t_1..t_{n-1}: t_k is the lowest level whose CDF
    reaches k/n. A value v belongs to band #{k : v > t_k}."""
    counts = np.bincount(gray_values.reshape(-1), minlength=256)
    total = counts.sum()
    if total == 0:
        raise ValueError("empty image")
    cdf = np.cumsum(counts) / total
    bounds = []
    for k in range(1, n_bands):
        level = int(np.searchsorted(cdf, k / n_bands, side="left"))
        bounds.append(level)
    return np.array(bounds, dtype=np.int64)


def band_index(gray_values: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    return (gray_values.reshape(*gray_values.shape, 1) > bounds).sum(axis=-1)


def recolor_pattern(
    image, text: str, model: TrainedModel, pool: list[Palette5], combine: str = "sum"
) -> np.ndarray:
    """Colorize a grayscale pattern with the query's best-matching palette:
    five equal-mass luminance bands map to the palette colors in order of
    lightness (darkest band gets the darkest color)."""
    px = to_rgb_array(image)
    if not is_gray(px):
        raise ValueError("recoloring expects a grayscale image (R=G=B)")
    _, hits = recommend_palettes(text, model, pool, 1, combine=combine)
    palette = hits[0][1]
    order = sorted(range(5), key=lambda i: (palette.lab[i][0], i))
    ramp = np.array([palette.colors[i] for i in order], dtype=np.uint8)
    gray = px[..., 0]
    bounds = equal_mass_bands(gray, n_bands=5)
    bands = band_index(gray, bounds)
    return ramp[bands]
