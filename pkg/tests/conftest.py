import json
from pathlib import Path

import numpy as np
import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(rep, "when", "call") in ("call", "setup"):
                if rep.when == "setup" and outcome == "passed":
                    continue
                name = nodeid.split("::")[-1]
                rows.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if rows:
        terminalreporter.section("acceptance criteria")
        for name, status in rows:
            terminalreporter.write_line(f"[{status}] {name}")

from chromatika.corpus import Corpus, Document, Vocabulary, build_corpus, load_manifest
from chromatika.palette import load_pool
from chromatika.topicmodel import HyperParams, TrainedModel

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def frozen(data_dir):
    def _load(name):
        with open(data_dir / "frozen" / name, "r", encoding="utf-8") as fh:
            return json.load(fh)

    return _load


@pytest.fixture(scope="session")
def manifest_path(data_dir) -> Path:
    return data_dir / "fixture_corpus" / "manifest.json"


@pytest.fixture(scope="session")
def fixture_corpus(manifest_path) -> Corpus:
    return build_corpus(load_manifest(manifest_path))


@pytest.fixture(scope="session")
def pool(data_dir):
    return load_pool(data_dir / "pool.json")


def make_tiny_corpus(word_tokens, color_tokens, n_color_types, vocab_size):
    """Corpus from raw token index lists; synthetic-safe vocabulary names."""
    from chromatika.synthetic import synthetic_vocabulary

    vocab = synthetic_vocabulary(vocab_size)
    docs = [
        Document(
            id=f"d{d:02d}",
            title=f"d{d:02d}",
            genre="",
            color_tokens=np.array(color_tokens[d], dtype=np.int64),
            word_tokens=np.array(word_tokens[d], dtype=np.int64),
        )
        for d in range(len(word_tokens))
    ]
    return Corpus(documents=docs, vocabulary=vocab, n_color_types=n_color_types)


@pytest.fixture()
def tiny_corpus():
    return make_tiny_corpus(
        word_tokens=[[0, 1], [1, 2, 2]],
        color_tokens=[[3, 0], [1]],
        n_color_types=4,
        vocab_size=3,
    )


def smoothed(rows, eps=1e-9):
    """Row-stochastic matrix with strictly positive entries."""
    mat = np.asarray(rows, dtype=np.float64) + eps
    return mat / mat.sum(axis=1, keepdims=True)


def make_model(phi_rows, psi_rows, vocab_tokens, theta_rows=None,
               phi_eps=1e-4, psi_eps=1e-300) -> TrainedModel:
    # psi smoothing is denormal-small so single-token queries produce
    # exactly one-hot weights in float64 (the reduction-identity tests
    # rely on that), while phi keeps full support over the basis
    phi = smoothed(phi_rows, eps=phi_eps)
    psi = smoothed(psi_rows, eps=psi_eps)
    K = phi.shape[0]
    if theta_rows is None:
        theta_rows = np.ones((2, K))
    theta = smoothed(theta_rows)
    weights = np.full(K, 1.0 / K)
    return TrainedModel(
        phi=phi,
        psi=psi,
        theta=theta,
        topic_weights=weights,
        word_topic_weights=weights.copy(),
        color_topic_weights=weights.copy(),
        hyperparams=HyperParams(n_topics=K, sweeps=0, burn_in=0),
        vocabulary=Vocabulary(tuple(vocab_tokens)),
        doc_ids=tuple(f"d{i}" for i in range(theta.shape[0])),
    )


@pytest.fixture(scope="session")
def apps_model() -> TrainedModel:
    """K=3 model with hand-designed topics over a tiny real vocabulary."""
    C = 512
    phi = np.zeros((3, C))
    # topic 0: greens (g-heavy bins), topic 1: pinks, topic 2: blues
    phi[0, [1 * 64 + 4 * 8 + 1, 2 * 64 + 5 * 8 + 2, 1 * 64 + 3 * 8 + 0]] = [0.5, 0.3, 0.2]
    phi[1, [7 * 64 + 5 * 8 + 6, 7 * 64 + 7 * 8 + 7, 5 * 64 + 2 * 8 + 4]] = [0.4, 0.3, 0.3]
    phi[2, [0 * 64 + 0 * 8 + 2, 2 * 64 + 4 * 8 + 6, 6 * 64 + 6 * 8 + 7]] = [0.5, 0.25, 0.25]
    vocab = ("beauti", "fashion", "garden", "plant", "polit", "techi")
    psi = np.zeros((3, len(vocab)))
    psi[0, [2, 3]] = [0.7, 0.3]  # garden, plant
    psi[1, [0, 1]] = [0.4, 0.6]  # beauti, fashion
    psi[2, [4, 5]] = [0.45, 0.55]  # polit, techi
    return make_model(phi, psi, vocab)
