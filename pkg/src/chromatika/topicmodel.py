"""Dual-vocabulary topic model: documents carry two bags of tokens (color
bins and words), and both token types share one per-document topic mixture.

Inference is collapsed Gibbs sampling over token-topic assignments, with the
mixture and the per-topic distributions integrated out. Because colors and
words share the document mixture, the document-topic counts in the
conditionals pool both assignment types; see docs/model.md for the
derivation.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import Corpus, Document, Vocabulary


@dataclass(frozen=True)
class HyperParams:
    n_topics: int = 12
    alpha: float = 0.8
    beta: float = 0.1
    gamma: float = 0.1
    sweeps: int = 200
    burn_in: int = 100
    seed: int = 0
    estimate: str = "final"  # "final" or "average"

    def __post_init__(self):
        if self.n_topics < 1:
            raise ValueError("need at least one topic")
        if min(self.alpha, self.beta, self.gamma) <= 0:
            raise ValueError("Dirichlet concentrations must be positive")
        if not self.sweeps >= self.burn_in >= 0:
            raise ValueError("need sweeps >= burn_in >= 0")
        if self.estimate not in ("final", "average"):
            raise ValueError(f"unknown estimate mode {self.estimate!r}")

    def to_dict(self) -> dict:
        return {
            "n_topics": self.n_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "sweeps": self.sweeps,
            "burn_in": self.burn_in,
            "seed": self.seed,
            "estimate": self.estimate,
        }


class SamplerState:
    """Assignments plus incrementally-maintained count tables.

    Count tables are plain nested lists: the sweep is a tight scalar loop
    and list indexing beats array scalar access there. One chain is strictly
    single-threaded.
    """

    def __init__(self, corpus: Corpus, hp: HyperParams):
        self.hp = hp
        self.K = hp.n_topics
        self.W = corpus.vocabulary.size
        self.C = corpus.color_types
        self.documents = corpus.documents
        self.vocabulary = corpus.vocabulary
        self.word_tokens = [[int(w) for w in d.word_tokens] for d in self.documents]
        self.color_tokens = [[int(c) for c in d.color_tokens] for d in self.documents]
        self.rng = np.random.default_rng(hp.seed)
        self.total_tokens = sum(len(w) + len(c) for w, c in zip(self.word_tokens, self.color_tokens))
        self._init_assignments()

    def _init_assignments(self) -> None:
        K, D = self.K, len(self.documents)
        self.y = []
        self.z = []
        self.n_dk_words = [[0] * K for _ in range(D)]
        self.n_dk_colors = [[0] * K for _ in range(D)]
        self.n_wk = [[0] * K for _ in range(self.W)]
        self.n_ck = [[0] * K for _ in range(self.C)]
        self.n_k_words = [0] * K
        self.n_k_colors = [0] * K
        for d in range(D):
            y_d = [int(k) for k in self.rng.integers(0, K, size=len(self.word_tokens[d]))]
            z_d = [int(k) for k in self.rng.integers(0, K, size=len(self.color_tokens[d]))]
            self.y.append(y_d)
            self.z.append(z_d)
            for w, k in zip(self.word_tokens[d], y_d):
                self.n_dk_words[d][k] += 1
                self.n_wk[w][k] += 1
                self.n_k_words[k] += 1
            for c, k in zip(self.color_tokens[d], z_d):
                self.n_dk_colors[d][k] += 1
                self.n_ck[c][k] += 1
                self.n_k_colors[k] += 1

    # numpy views (reconstructed on demand; used by estimates and tests)
    @property
    def n_kw(self) -> np.ndarray:
        return np.array(self.n_wk, dtype=np.int64).T

    @property
    def n_kc(self) -> np.ndarray:
        return np.array(self.n_ck, dtype=np.int64).T

    def recount(self) -> dict:
        """Rebuild all count tables from (z, y); for consistency checks."""
        y, z = self.y, self.z
        n_dk_words = [[0] * self.K for _ in self.documents]
        n_dk_colors = [[0] * self.K for _ in self.documents]
        n_wk = [[0] * self.K for _ in range(self.W)]
        n_ck = [[0] * self.K for _ in range(self.C)]
        n_k_words = [0] * self.K
        n_k_colors = [0] * self.K
        for d in range(len(self.documents)):
            for w, k in zip(self.word_tokens[d], y[d]):
                n_dk_words[d][k] += 1
                n_wk[w][k] += 1
                n_k_words[k] += 1
            for c, k in zip(self.color_tokens[d], z[d]):
                n_dk_colors[d][k] += 1
                n_ck[c][k] += 1
                n_k_colors[k] += 1
        return {
            "n_dk_words": n_dk_words,
            "n_dk_colors": n_dk_colors,
            "n_wk": n_wk,
            "n_ck": n_ck,
            "n_k_words": n_k_words,
            "n_k_colors": n_k_colors,
        }


def _check_address(seq, d, i, what):
    if not 0 <= d < len(seq):
        raise ValueError(f"document index {d} out of range")
    if not 0 <= i < len(seq[d]):
        raise ValueError(f"{what} index {i} out of range for document {d}")


def conditional_word(state: SamplerState, d: int, m: int) -> np.ndarray:
    """p(y_{d,m} = k | everything else), the token's own assignment removed."""
    _check_address(state.word_tokens, d, m, "word token")
    hp = state.hp
    w = state.word_tokens[d][m]
    k_old = state.y[d][m]
    row = state.n_wk[w]
    ndk_c = state.n_dk_colors[d]
    ndk_w = state.n_dk_words[d]
    n_k = state.n_k_words
    wgamma = state.W * hp.gamma
    probs = np.empty(state.K)
    for k in range(state.K):
        removed = 1 if k == k_old else 0
        probs[k] = (
            (ndk_c[k] + ndk_w[k] - removed + hp.alpha)
            * (row[k] - removed + hp.gamma)
            / (n_k[k] - removed + wgamma)
        )
    return probs / probs.sum()


def conditional_color(state: SamplerState, d: int, n: int) -> np.ndarray:
    """p(z_{d,n} = k | everything else), the token's own assignment removed."""
    _check_address(state.color_tokens, d, n, "color token")
    hp = state.hp
    c = state.color_tokens[d][n]
    k_old = state.z[d][n]
    row = state.n_ck[c]
    ndk_c = state.n_dk_colors[d]
    ndk_w = state.n_dk_words[d]
    n_k = state.n_k_colors
    cbeta = state.C * hp.beta
    probs = np.empty(state.K)
    for k in range(state.K):
        removed = 1 if k == k_old else 0
        probs[k] = (
            (ndk_c[k] - removed + ndk_w[k] + hp.alpha)
            * (row[k] - removed + hp.beta)
            / (n_k[k] - removed + cbeta)
        )
    return probs / probs.sum()


def gibbs_sweep(state: SamplerState) -> SamplerState:
    """One full pass: every word token then every color token of each
    document, in deterministic order, resampled from its conditional."""
    hp = state.hp
    K = state.K
    alpha, beta, gamma = hp.alpha, hp.beta, hp.gamma
    wgamma = state.W * gamma
    cbeta = state.C * beta
    uniforms = state.rng.random(state.total_tokens)
    ui = 0
    cum = [0.0] * K
    n_k_words = state.n_k_words
    n_k_colors = state.n_k_colors
    for d in range(len(state.documents)):
        words = state.word_tokens[d]
        colors = state.color_tokens[d]
        y_d = state.y[d]
        z_d = state.z[d]
        ndk_w = state.n_dk_words[d]
        ndk_c = state.n_dk_colors[d]
        for m in range(len(words)):
            w = words[m]
            k = y_d[m]
            row = state.n_wk[w]
            row[k] -= 1
            n_k_words[k] -= 1
            ndk_w[k] -= 1
            total = 0.0
            for j in range(K):
                total += (
                    (ndk_c[j] + ndk_w[j] + alpha)
                    * (row[j] + gamma)
                    / (n_k_words[j] + wgamma)
                )
                cum[j] = total
            u = uniforms[ui] * total
            ui += 1
            k = 0
            while cum[k] <= u:
                k += 1
            row[k] += 1
            n_k_words[k] += 1
            ndk_w[k] += 1
            y_d[m] = k
        for n in range(len(colors)):
            c = colors[n]
            k = z_d[n]
            row = state.n_ck[c]
            row[k] -= 1
            n_k_colors[k] -= 1
            ndk_c[k] -= 1
            total = 0.0
            for j in range(K):
                total += (
                    (ndk_c[j] + ndk_w[j] + alpha)
                    * (row[j] + beta)
                    / (n_k_colors[j] + cbeta)
                )
                cum[j] = total
            u = uniforms[ui] * total
            ui += 1
            k = 0
            while cum[k] <= u:
                k += 1
            row[k] += 1
            n_k_colors[k] += 1
            ndk_c[k] += 1
            z_d[n] = k
    return state


def log_joint(state: SamplerState) -> float:
    """Log of the collapsed joint p(assignments, tokens): the mixture and
    both per-topic distributions are integrated out analytically."""
    hp = state.hp
    lg = math.lgamma
    K, W, C = state.K, state.W, state.C
    total = len(state.documents) * (lg(K * hp.alpha) - K * lg(hp.alpha))
    for d in range(len(state.documents)):
        n_d = len(state.word_tokens[d]) + len(state.color_tokens[d])
        for k in range(K):
            total += lg(state.n_dk_words[d][k] + state.n_dk_colors[d][k] + hp.alpha)
        total -= lg(n_d + K * hp.alpha)
    total += K * (lg(C * hp.beta) - C * lg(hp.beta))
    total += K * (lg(W * hp.gamma) - W * lg(hp.gamma))
    lg_beta = lg(hp.beta)
    lg_gamma = lg(hp.gamma)
    per_topic_c = [C * lg_beta] * K
    for row in state.n_ck:
        for k in range(K):
            if row[k]:
                per_topic_c[k] += lg(row[k] + hp.beta) - lg_beta
    per_topic_w = [W * lg_gamma] * K
    for row in state.n_wk:
        for k in range(K):
            if row[k]:
                per_topic_w[k] += lg(row[k] + hp.gamma) - lg_gamma
    for k in range(K):
        total += per_topic_c[k] - lg(state.n_k_colors[k] + C * hp.beta)
        total += per_topic_w[k] - lg(state.n_k_words[k] + W * hp.gamma)
    return total


@dataclass(frozen=True)
class TrainedModel:
    phi: np.ndarray  # K x C color topics, row-stochastic
    psi: np.ndarray  # K x W word topics, row-stochastic
    theta: np.ndarray  # D x K document mixtures, row-stochastic
    topic_weights: np.ndarray  # K, pooled share of all tokens per topic
    word_topic_weights: np.ndarray  # K, share of word tokens per topic
    color_topic_weights: np.ndarray  # K, share of color tokens per topic
    hyperparams: HyperParams
    vocabulary: Vocabulary
    doc_ids: tuple[str, ...]
    doc_titles: tuple[str, ...] = ()
    doc_genres: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("phi", "psi", "theta"):
            mat = getattr(self, name)
            if (mat <= 0).any():
                raise ValueError(f"{name} must be strictly positive")
            if np.abs(mat.sum(axis=1) - 1.0).max() > 1e-9:
                raise ValueError(f"{name} rows must sum to 1")

    @property
    def n_topics(self) -> int:
        return self.phi.shape[0]


def _estimates(state: SamplerState):
    hp = state.hp
    n_kc = state.n_kc.astype(np.float64)
    n_kw = state.n_kw.astype(np.float64)
    phi = (n_kc + hp.beta) / (n_kc.sum(axis=1, keepdims=True) + state.C * hp.beta)
    psi = (n_kw + hp.gamma) / (n_kw.sum(axis=1, keepdims=True) + state.W * hp.gamma)
    n_dk = np.array(state.n_dk_words, dtype=np.float64) + np.array(
        state.n_dk_colors, dtype=np.float64
    )
    theta = (n_dk + hp.alpha) / (n_dk.sum(axis=1, keepdims=True) + state.K * hp.alpha)
    n_w = np.array(state.n_k_words, dtype=np.float64)
    n_c = np.array(state.n_k_colors, dtype=np.float64)
    return phi, psi, theta, (n_w + n_c) / (n_w + n_c).sum(), n_w / n_w.sum(), n_c / n_c.sum()


def train(corpus: Corpus, hp: HyperParams) -> TrainedModel:
    """Random initialization, hp.sweeps Gibbs passes, point estimates from
    the final state (or averaged over post-burn-in states)."""
    if not corpus.documents:
        raise ValueError("corpus has no documents")
    for doc in corpus.documents:
        if doc.n_colors < 1 or doc.n_words < 1:
            raise ValueError(f"document {doc.id} needs at least one token of each type")
    state = SamplerState(corpus, hp)
    averaging = hp.estimate == "average"
    acc = None
    n_acc = 0
    for sweep in range(hp.sweeps):
        gibbs_sweep(state)
        if averaging and sweep >= hp.burn_in:
            parts = _estimates(state)
            if acc is None:
                acc = [p.copy() for p in parts]
            else:
                for a, p in zip(acc, parts):
                    a += p
            n_acc += 1
    if averaging and n_acc > 0:
        phi, psi, theta, tw, ww, cw = (a / n_acc for a in acc)
        # renormalize away float drift
        phi /= phi.sum(axis=1, keepdims=True)
        psi /= psi.sum(axis=1, keepdims=True)
        theta /= theta.sum(axis=1, keepdims=True)
        tw, ww, cw = tw / tw.sum(), ww / ww.sum(), cw / cw.sum()
    else:
        phi, psi, theta, tw, ww, cw = _estimates(state)
    return TrainedModel(
        phi=phi,
        psi=psi,
        theta=theta,
        topic_weights=tw,
        word_topic_weights=ww,
        color_topic_weights=cw,
        hyperparams=hp,
        vocabulary=corpus.vocabulary,
        doc_ids=tuple(d.id for d in corpus.documents),
        doc_titles=tuple(d.title for d in corpus.documents),
        doc_genres=tuple(d.genre for d in corpus.documents),
    )


@dataclass(frozen=True)
class GeneratedSample:
    documents: list[Document]
    theta: np.ndarray  # D x K mixtures actually drawn
    word_assignments: list[list[int]]
    color_assignments: list[list[int]]


def generate(phi, psi, alpha: float, doc_sizes, seed: int = 0) -> GeneratedSample:
    """Ancestral sampling from the generative process: per document draw a
    mixture from Dirichlet(alpha), then a topic and a token for every word
    and every color slot."""
    phi = np.asarray(phi, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.float64)
    if phi.ndim != 2 or psi.ndim != 2 or phi.shape[0] != psi.shape[0]:
        raise ValueError("phi and psi must be matrices with one row per topic")
    for name, mat in (("phi", phi), ("psi", psi)):
        if (mat < 0).any() or np.abs(mat.sum(axis=1) - 1.0).max() > 1e-9:
            raise ValueError(f"{name} rows must be probability vectors")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    K, C = phi.shape
    W = psi.shape[1]
    rng = np.random.default_rng(seed)
    documents = []
    thetas = []
    all_y = []
    all_z = []
    for d, (n_colors, m_words) in enumerate(doc_sizes):
        theta = rng.dirichlet([alpha] * K)
        y = rng.choice(K, size=m_words, p=theta)
        words = np.empty(m_words, dtype=np.int64)
        for k in range(K):
            mask = y == k
            if mask.any():
                words[mask] = rng.choice(W, size=int(mask.sum()), p=psi[k])
        z = rng.choice(K, size=n_colors, p=theta)
        colors = np.empty(n_colors, dtype=np.int64)
        for k in range(K):
            mask = z == k
            if mask.any():
                colors[mask] = rng.choice(C, size=int(mask.sum()), p=phi[k])
        documents.append(
            Document(
                id=f"gen-{d:04d}",
                title=f"gen-{d:04d}",
                genre="synthetic",
                color_tokens=colors,
                word_tokens=words,
            )
        )
        thetas.append(theta)
        all_y.append([int(v) for v in y])
        all_z.append([int(v) for v in z])
    return GeneratedSample(
        documents=documents,
        theta=np.array(thetas),
        word_assignments=all_y,
        color_assignments=all_z,
    )


def topic_proportions_by_group(model: TrainedModel, grouping: dict) -> dict:
    """Average the mixture rows of documents sharing a label; labels map
    doc id -> group. Documents without a label are skipped with a warning."""
    import logging

    by_label: dict = {}
    for i, doc_id in enumerate(model.doc_ids):
        label = grouping.get(doc_id)
        if label is None:
            logging.getLogger(__name__).warning("document %s has no group label; skipped", doc_id)
            continue
        by_label.setdefault(label, []).append(model.theta[i])
    return {label: np.mean(rows, axis=0) for label, rows in by_label.items()}


def relabel_topics(model: TrainedModel, perm) -> TrainedModel:
    """Apply a topic permutation: row/column reordering of every table."""
    perm = list(perm)
    if sorted(perm) != list(range(model.n_topics)):
        raise ValueError("not a permutation of the topics")
    idx = np.array(perm)
    return replace(
        model,
        phi=model.phi[idx],
        psi=model.psi[idx],
        theta=model.theta[:, idx],
        topic_weights=model.topic_weights[idx],
        word_topic_weights=model.word_topic_weights[idx],
        color_topic_weights=model.color_topic_weights[idx],
    )
