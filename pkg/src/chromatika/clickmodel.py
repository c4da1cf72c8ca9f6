"""Survey-trial click model: position bias, intrinsic relevance estimation,
diagonal aggregates, and a forward simulator for validating the estimators.

A trial shows one palette (for topic i) and three word clouds in shuffled
vertical positions, with "None of the above" as a fixed fourth option; the
respondent may tick several boxes. Selection of the cloud at position p is
modeled as Bernoulli(r_ij * b_p): intrinsic relevance times position bias.

All estimators are pure batch computations over immutable trial lists.
"""

import csv
import itertools
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

log = logging.getLogger(__name__)


class SurveyTrial(NamedTuple):
    set_id: int  # 1 = closest palettes, 2 = second closest
    palette_topic: int
    clouds: tuple[int, int, int]  # cloud ids at positions 1..3
    selected_positions: tuple[int, ...]  # subset of (1, 2, 3)
    selected_none: bool  # the fixed fourth option
    gender: str = ""
    country: str = ""
    designer: bool = False
    age: int = 0


def validate_trial(trial: SurveyTrial) -> None:
    if len(set(trial.clouds)) != 3:
        raise ValueError(f"cloud ids must be distinct: {trial.clouds}")
    if trial.palette_topic not in trial.clouds:
        raise ValueError(
            f"palette topic {trial.palette_topic} not among shown clouds {trial.clouds}"
        )
    if any(p not in (1, 2, 3) for p in trial.selected_positions):
        raise ValueError(f"bad selected positions {trial.selected_positions}")


def position_bias(trials) -> np.ndarray:
    """Selection rate of each vertical position over all trials:
    (b_1, b_2, b_3, b_4) with position 4 the "None of the above" option.
    Multi-select means the rates need not sum to 1."""
    if not trials:
        raise ValueError("no trials")
    counts = [0, 0, 0, 0]
    for t in trials:
        for p in t.selected_positions:
            counts[p - 1] += 1
        if t.selected_none:
            counts[3] += 1
    return np.array(counts, dtype=np.float64) / len(trials)


def display_prob(i: int, j: int, K: int) -> float:
    """Probability cloud j is among the three shown for palette i: the
    matching cloud always is; each other cloud fills one of 2 slots drawn
    from the remaining K-1."""
    if not (0 <= i < K and 0 <= j < K):
        raise ValueError(f"cloud/palette index out of range for K={K}")
    return 1.0 if i == j else 2.0 / (K - 1)


def q_factor(b, i: int, j: int, K: int) -> float:
    """Display-and-examination factor: q_ij = Pr(j shown) * mean(b_1..b_3),
    since a shown cloud lands on each position with probability 1/3."""
    b = np.asarray(b, dtype=np.float64)
    if b.size < 3:
        raise ValueError("need biases for at least positions 1..3")
    return display_prob(i, j, K) * float(b[:3].sum()) / 3.0


@dataclass
class RelevanceMatrix:
    r_hat: np.ndarray  # K x K; rows with no trials are NaN
    m_i: np.ndarray  # trials per palette
    m_ij: np.ndarray  # displayed-and-selected counts
    biases: np.ndarray  # position biases used (length 4, b_4 may be NaN)
    defined: np.ndarray  # per-row mask: m_i > 0

    @property
    def n_topics(self) -> int:
        return self.r_hat.shape[0]


def relevance(trials, K: int, position_biases=None) -> RelevanceMatrix:
    """Maximum-likelihood intrinsic relevance r_ij = m_ij / (m_i * q_ij).

    By default position biases are estimated from the same trials; pass
    ``position_biases`` (e.g. known simulator biases, or biases from a
    specific question set) to override. Values are reported raw, without
    clamping to [0, 1]. Selections co-occurring with "None of the above"
    count; pure none-selections contribute to m_i only.
    """
    if not trials:
        raise ValueError("no trials")
    if position_biases is None:
        b = position_bias(trials)
    else:
        b = np.asarray(position_biases, dtype=np.float64)
        if b.size == 3:
            b = np.append(b, np.nan)
    m_i = np.zeros(K, dtype=np.int64)
    m_ij = np.zeros((K, K), dtype=np.int64)
    for t in trials:
        i = t.palette_topic
        m_i[i] += 1
        clouds = t.clouds
        row = m_ij[i]
        for p in t.selected_positions:
            row[clouds[p - 1]] += 1
    r_hat = np.zeros((K, K), dtype=np.float64)
    defined = m_i > 0
    for i in range(K):
        if not defined[i]:
            r_hat[i, :] = np.nan
            continue
        for j in range(K):
            if m_ij[i, j]:
                r_hat[i, j] = m_ij[i, j] / (m_i[i] * q_factor(b, i, j, K))
    return RelevanceMatrix(r_hat=r_hat, m_i=m_i, m_ij=m_ij, biases=b, defined=defined)


def subgroup_relevance(
    trials,
    predicate: Callable[[SurveyTrial], bool],
    K: int,
    name: str | None = None,
    position_biases=None,
) -> RelevanceMatrix:
    """relevance() over the trials matching a respondent predicate; biases
    are recomputed on the subgroup unless given explicitly."""
    subset = [t for t in trials if predicate(t)]
    if not subset:
        label = name or getattr(predicate, "__name__", repr(predicate))
        raise ValueError(f"no trials match subgroup predicate {label}")
    return relevance(subset, K, position_biases=position_biases)


def _row_stats(R: np.ndarray):
    R = np.asarray(R, dtype=np.float64)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError("need a square matrix")
    if np.isnan(R).any():
        raise ValueError("matrix contains undefined rows; drop them first")
    if (R < 0).any():
        raise ValueError("entries must be non-negative")
    n = R.shape[0]
    if n < 2:
        raise ValueError("need at least a 2x2 matrix")
    off = np.array([np.delete(R[i], i) for i in range(n)])
    return R, off


def diagonal_dominance(R, aggregate: str = "rows") -> tuple[np.ndarray, float]:
    """Per-row ratio of the diagonal to the mean off-diagonal entry.

    Rows whose off-diagonal mean is zero are NaN and excluded from the
    summary (with a warning). aggregate="rows" (default) averages the
    per-row ratios; "offdiag_means" averages the off-diagonal means
    instead, for comparison runs.
    """
    if aggregate not in ("rows", "offdiag_means"):
        raise ValueError(f"unknown aggregate {aggregate!r}")
    R, off = _row_stats(R)
    means = off.mean(axis=1)
    d = np.where(means > 0, np.divide(R.diagonal(), means, where=means > 0), np.nan)
    bad = int(np.isnan(d).sum())
    if bad:
        log.warning("%d row(s) have all-zero off-diagonals; excluded from mean", bad)
    if aggregate == "offdiag_means":
        return d, float(means.mean())
    valid = d[~np.isnan(d)]
    return d, (float(valid.mean()) if valid.size else float("nan"))


def diagonal_separation(
    R, std_divisor: str = "sample", aggregate: str = "rows"
) -> tuple[np.ndarray, float]:
    """Per-row |diagonal - off-diagonal mean| / off-diagonal spread.

    std_divisor="sample" (default) divides squared deviations of the N-1
    off-diagonal values by N-2 (their sample standard deviation);
    "population" divides by N-1. Zero-spread rows are NaN and excluded from
    the summary with a warning. aggregate="offdiag_stds" averages the
    spreads instead of the per-row ratios.
    """
    if std_divisor not in ("sample", "population"):
        raise ValueError(f"unknown std_divisor {std_divisor!r}")
    if aggregate not in ("rows", "offdiag_stds"):
        raise ValueError(f"unknown aggregate {aggregate!r}")
    R, off = _row_stats(R)
    n_off = off.shape[1]
    means = off.mean(axis=1)
    divisor = n_off - 1 if std_divisor == "sample" else n_off
    if divisor < 1:
        raise ValueError("matrix too small for the chosen divisor")
    stds = np.sqrt(((off - means[:, None]) ** 2).sum(axis=1) / divisor)
    s = np.where(stds > 0, np.divide(np.abs(R.diagonal() - means), stds, where=stds > 0), np.nan)
    bad = int(np.isnan(s).sum())
    if bad:
        log.warning("%d row(s) have zero off-diagonal spread; excluded from mean", bad)
    if aggregate == "offdiag_stds":
        return s, float(stds.mean())
    valid = s[~np.isnan(s)]
    return s, (float(valid.mean()) if valid.size else float("nan"))


_PERMS = np.array(list(itertools.permutations(range(3))), dtype=np.int64)
_SEL_LUT = [tuple(p + 1 for p in range(3) if bits & (1 << p)) for bits in range(8)]


def simulate_survey(
    r,
    b,
    trials_per_palette: int,
    K: int,
    seed: int,
    set_id: int = 1,
    gender: str = "",
    country: str = "",
    designer: bool = False,
    age: int = 0,
) -> list[SurveyTrial]:
    """Forward-simulate trials: for each palette, two distractor clouds are
    drawn uniformly from the other K-1, the three clouds are shuffled over
    the positions, and the cloud at position p is selected independently
    with probability r_ij * b_p. Deterministic given the seed."""
    r = np.asarray(r, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if r.shape != (K, K):
        raise ValueError(f"r must be {K}x{K}")
    if b.shape != (3,) or (b < 0).any() or (b > 1).any():
        raise ValueError("b must be three probabilities")
    if (r < 0).any() or float(r.max()) * float(b.max()) > 1:
        raise ValueError("r*b must lie in [0, 1] for every entry")
    if K < 3:
        raise ValueError("need K >= 3 to show two distractors")
    rng = np.random.default_rng(seed)
    trials: list[SurveyTrial] = []
    n = trials_per_palette
    for i in range(K):
        first = rng.integers(0, K - 1, size=n)
        second = rng.integers(0, K - 2, size=n)
        second = second + (second >= first)
        # map out of "all topics except i" index space
        d1 = first + (first >= i)
        d2 = second + (second >= i)
        clouds = np.stack([np.full(n, i, dtype=np.int64), d1, d2], axis=1)
        placed = np.take_along_axis(clouds, _PERMS[rng.integers(0, 6, size=n)], axis=1)
        probs = r[i, placed] * b[None, :]
        sel = rng.random((n, 3)) < probs
        bits = (sel * np.array([1, 2, 4])).sum(axis=1).tolist()
        none_flags = (~sel.any(axis=1)).tolist()
        placed_list = placed.tolist()
        for c3, bit, nn in zip(placed_list, bits, none_flags):
            trials.append(
                SurveyTrial(
                    set_id=set_id,
                    palette_topic=i,
                    clouds=tuple(c3),
                    selected_positions=_SEL_LUT[bit],
                    selected_none=nn,
                    gender=gender,
                    country=country,
                    designer=designer,
                    age=age,
                )
            )
    return trials


CSV_HEADER = [
    "set_id", "palette", "cloud_pos1", "cloud_pos2", "cloud_pos3",
    "sel1", "sel2", "sel3", "sel_none", "gender", "country", "designer", "age",
]


def save_trials_csv(trials, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for t in trials:
            sel = [1 if p in t.selected_positions else 0 for p in (1, 2, 3)]
            writer.writerow(
                [
                    t.set_id, t.palette_topic, *t.clouds, *sel,
                    int(t.selected_none), t.gender, t.country,
                    int(t.designer), t.age,
                ]
            )


def load_trials_csv(path) -> list[SurveyTrial]:
    trials = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected trials CSV header in {path}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(CSV_HEADER)} fields")
            trial = SurveyTrial(
                set_id=int(row[0]),
                palette_topic=int(row[1]),
                clouds=(int(row[2]), int(row[3]), int(row[4])),
                selected_positions=tuple(
                    p for p, flag in zip((1, 2, 3), row[5:8]) if int(flag)
                ),
                selected_none=bool(int(row[8])),
                gender=row[9],
                country=row[10],
                designer=bool(int(row[11])),
                age=int(row[12]),
            )
            try:
                validate_trial(trial)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            trials.append(trial)
    return trials


def _nan_to_none(values):
    return [None if (isinstance(v, float) and math.isnan(v)) else v for v in values]


def relevance_report(result: RelevanceMatrix, std_divisor: str = "sample") -> dict:
    """JSON-ready report: matrix, counts, biases, diagonal aggregates."""
    K = result.n_topics
    defined_rows = [i for i in range(K) if result.defined[i]]
    aggregates: dict = {"diagonal_dominance": None, "diagonal_separation": None}
    if len(defined_rows) == K and K >= 2:
        d_i, d_bar = diagonal_dominance(result.r_hat)
        s_i, s_bar = diagonal_separation(result.r_hat, std_divisor=std_divisor)
        aggregates = {
            "diagonal_dominance": {
                "per_row": _nan_to_none([float(v) for v in d_i]),
                "mean": None if math.isnan(d_bar) else d_bar,
            },
            "diagonal_separation": {
                "per_row": _nan_to_none([float(v) for v in s_i]),
                "mean": None if math.isnan(s_bar) else s_bar,
            },
        }
    return {
        "n_topics": K,
        "position_bias": _nan_to_none([float(v) for v in result.biases]),
        "m_i": [int(v) for v in result.m_i],
        "relevance": [
            _nan_to_none([float(v) for v in row]) for row in result.r_hat
        ],
        "aggregates": aggregates,
    }


def save_report_csv(result: RelevanceMatrix, path, std_divisor: str = "sample") -> None:
    """Relevance matrix as CSV: one row per palette plus aggregate columns."""
    K = result.n_topics
    all_defined = bool(result.defined.all()) and K >= 2
    if all_defined:
        d_i, _ = diagonal_dominance(result.r_hat)
        s_i, _ = diagonal_separation(result.r_hat, std_divisor=std_divisor)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["palette"] + [f"r_{j}" for j in range(K)] + ["m_i", "D_i", "S_i"]
        )
        for i in range(K):
            row = [i]
            row += ["" if math.isnan(v) else repr(float(v)) for v in result.r_hat[i]]
            row.append(int(result.m_i[i]))
            if all_defined:
                row.append("" if math.isnan(d_i[i]) else repr(float(d_i[i])))
                row.append("" if math.isnan(s_i[i]) else repr(float(s_i[i])))
            else:
                row += ["", ""]
            writer.writerow(row)
