"""5-color palettes and their distance to weighted color histograms.

A topic's color distribution lives on the 512-bin basis; a palette is 5
concrete sRGB colors. The distance between them pairs each palette color
with a distinct nonzero histogram bin (optimal assignment) where an edge
costs ``(1/w_i) * deltaE(bin_i, color_j)``. Both a literal all-pairs
double-sum variant and a ``w_i``-proportional edge weighting are available
behind flags for comparison runs.

Everything here is a pure function over immutable inputs; scoring a pool
is safe to parallelize per palette.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .assignment import assignment_cost, hungarian
from .basis import TOTAL_BINS, all_representatives
from .colorspace import srgb_to_lab_array
from .errors import DegenerateHistogramError

log = logging.getLogger(__name__)

_BIN_LAB: np.ndarray | None = None


def bin_lab_table() -> np.ndarray:
    """(512, 3) L*a*b* coordinates of the basis bin centers (cached)."""
    global _BIN_LAB
    if _BIN_LAB is None:
        _BIN_LAB = srgb_to_lab_array(all_representatives())
    return _BIN_LAB


@dataclass(frozen=True)
class Palette5:
    """Exactly five ordered sRGB colors, with cached L*a*b* forms."""

    colors: tuple[tuple[int, int, int], ...]
    source_id: str | None = None
    lab: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.colors) != 5:
            raise ValueError(f"palette needs exactly 5 colors, got {len(self.colors)}")
        colors = tuple(tuple(int(v) for v in c) for c in self.colors)
        for c in colors:
            if len(c) != 3 or any(not 0 <= v <= 255 for v in c):
                raise ValueError(f"bad sRGB triple {c}")
        object.__setattr__(self, "colors", colors)
        object.__setattr__(self, "lab", srgb_to_lab_array(np.array(colors, dtype=float)))


class WeightedColorHistogram:
    """512 non-negative weights over the color basis, summing to 1."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (TOTAL_BINS,):
            raise ValueError(f"expected {TOTAL_BINS} weights, got shape {w.shape}")
        if (w < 0).any():
            raise ValueError("weights must be non-negative")
        total = float(w.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1 (got {total!r})")
        self.weights = w

    @classmethod
    def from_counts(cls, counts) -> "WeightedColorHistogram":
        c = np.asarray(counts, dtype=np.float64)
        total = c.sum()
        if total <= 0:
            raise ValueError("histogram has no mass")
        return cls(c / total)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)


def wed_distance(
    hist: WeightedColorHistogram,
    palette: Palette5,
    mode: str = "assignment",
    weighting: str = "inverse",
) -> float:
    """Weighted-Euclidean distance between a histogram and a 5-color palette.

    mode="assignment" (default) pairs the 5 palette colors with 5 distinct
    nonzero bins at minimum total edge cost; mode="double_sum" evaluates the
    literal sum over all (bin, color) pairs. weighting="inverse" uses 1/w_i
    edge costs as defined; "direct" uses w_i.
    """
    if mode not in ("assignment", "double_sum"):
        raise ValueError(f"unknown mode {mode!r}")
    if weighting not in ("inverse", "direct"):
        raise ValueError(f"unknown weighting {weighting!r}")
    support = hist.support()
    w = hist.weights[support]
    factor = 1.0 / w if weighting == "inverse" else w
    # pairwise deltaE between support bins and the 5 palette colors;
    # plain multiply-add so values match the scalar delta_e bit for bit
    diff = bin_lab_table()[support][:, None, :] - palette.lab[None, :, :]
    d0, d1, d2 = diff[..., 0], diff[..., 1], diff[..., 2]
    dist = np.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
    cost = factor[:, None] * dist  # (support, 5)
    if mode == "double_sum":
        return float(cost.sum())
    if support.size < 5:
        raise DegenerateHistogramError(
            f"need >= 5 nonzero bins to assign a 5-color palette, got {support.size}"
        )
    return assignment_cost(cost.T)


def nearest_palettes(
    topic_weights,
    pool: list[Palette5],
    n: int,
    mode: str = "assignment",
    weighting: str = "inverse",
) -> list[tuple[int, Palette5, float]]:
    """The n pool palettes closest to a color-topic histogram.

    Returns (pool index, palette, score) tuples, ascending by score; ties
    keep pool order.
    """
    if not pool:
        raise ValueError("palette pool is empty")
    if n > len(pool):
        raise ValueError(f"asked for {n} palettes from a pool of {len(pool)}")
    hist = (
        topic_weights
        if isinstance(topic_weights, WeightedColorHistogram)
        else WeightedColorHistogram(topic_weights)
    )
    scored = [
        (i, p, wed_distance(hist, p, mode=mode, weighting=weighting))
        for i, p in enumerate(pool)
    ]
    scored.sort(key=lambda t: t[2])
    return scored[:n]


def extract_palette(image, seed: int = 0) -> Palette5:
    """Dominant 5-color palette of an image: count-weighted k-means in L*a*b*.

    Deterministic for a given (image, seed). Images with fewer than 5
    distinct colors are padded by repeating the dominant colors.
    """
    from .imaging import to_rgb_array

    px = to_rgb_array(image).reshape(-1, 3)
    colors, counts = np.unique(px, axis=0, return_counts=True)
    if colors.shape[0] < 5:
        log.warning(
            "image has only %d distinct colors; padding palette by repetition",
            colors.shape[0],
        )
        order = np.argsort(-counts, kind="stable")
        ranked = [tuple(int(v) for v in colors[i]) for i in order]
        padded = [ranked[i % len(ranked)] for i in range(5)]
        return Palette5(tuple(padded))

    lab = srgb_to_lab_array(colors.astype(float))
    weights = counts.astype(np.float64)
    centers, labels = _weighted_kmeans(lab, weights, k=5, seed=seed)
    masses = np.array([weights[labels == c].sum() for c in range(5)])
    order = np.argsort(-masses, kind="stable")

    from .colorspace import lab_to_srgb

    out = []
    for c in order:
        rgb = lab_to_srgb(centers[c])
        out.append(tuple(int(round(v)) for v in rgb))
    return Palette5(tuple(out))


def _weighted_kmeans(points, weights, k, seed, iters=100, tol=1e-9):
    rng = np.random.default_rng(seed)
    n = points.shape[0]
    # k-means++ seeding on the weighted point set
    centers = np.empty((k, points.shape[1]))
    probs = weights / weights.sum()
    centers[0] = points[rng.choice(n, p=probs)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        p = weights * d2
        total = p.sum()
        if total <= 0:
            centers[c] = points[rng.choice(n, p=probs)]
        else:
            centers[c] = points[rng.choice(n, p=p / total)]
        d2 = np.minimum(d2, ((points - centers[c]) ** 2).sum(axis=1))

    labels = np.zeros(n, dtype=np.int64)
    for _ in range(iters):
        dist2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = dist2.argmin(axis=1)
        new_centers = centers.copy()
        for c in range(k):
            mask = labels == c
            mass = weights[mask].sum()
            if mass > 0:
                new_centers[c] = (points[mask] * weights[mask, None]).sum(axis=0) / mass
            else:
                # revive an empty cluster at the worst-served point
                far = (weights * dist2.min(axis=1)).argmax()
                new_centers[c] = points[far]
        shift = np.abs(new_centers - centers).max()
        centers = new_centers
        if shift < tol:
            break
    dist2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return centers, dist2.argmin(axis=1)


def load_pool(path) -> list[Palette5]:
    """Read a palette pool file: a JSON array of palettes, each either a
    5x3 integer array or {"id": ..., "colors": 5x3 array}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError("palette pool must be a JSON array")
    pool = []
    for entry in data:
        if isinstance(entry, dict):
            pool.append(
                Palette5(tuple(tuple(c) for c in entry["colors"]), source_id=entry.get("id"))
            )
        else:
            pool.append(Palette5(tuple(tuple(c) for c in entry)))
    return pool


def save_pool(pool: list[Palette5], path) -> None:
    data = []
    for p in pool:
        if p.source_id is not None:
            data.append({"id": p.source_id, "colors": [list(c) for c in p.colors]})
        else:
            data.append([list(c) for c in p.colors])
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
