import numpy as np
import pytest

from chromatika.topicmodel import (
    HyperParams,
    SamplerState,
    conditional_color,
    conditional_word,
    generate,
    gibbs_sweep,
    log_joint,
    relabel_topics,
    topic_proportions_by_group,
    train,
)

from conftest import make_tiny_corpus
from oracles import collapsed_log_joint, conditional_by_enumeration


def random_tiny_instance(rng):
    K = int(rng.integers(2, 4))
    W = int(rng.integers(2, 5))
    C = int(rng.integers(2, 5))
    D = int(rng.integers(1, 4))
    total_budget = 6
    word_tokens, color_tokens = [], []
    for _ in range(D):
        nw = int(rng.integers(1, 3))
        nc = int(rng.integers(1, 3))
        word_tokens.append([int(rng.integers(0, W)) for _ in range(nw)])
        color_tokens.append([int(rng.integers(0, C)) for _ in range(nc)])
    corpus = make_tiny_corpus(word_tokens, color_tokens, C, W)
    hp = HyperParams(
        n_topics=K,
        alpha=float(rng.uniform(0.2, 1.5)),
        beta=float(rng.uniform(0.05, 0.8)),
        gamma=float(rng.uniform(0.05, 0.8)),
        sweeps=0,
        burn_in=0,
        seed=int(rng.integers(0, 10_000)),
    )
    return corpus, hp, word_tokens, color_tokens


def test_hyperparams_defaults_and_validation():
    hp = HyperParams()
    assert (hp.n_topics, hp.alpha, hp.beta, hp.gamma) == (12, 0.8, 0.1, 0.1)
    with pytest.raises(ValueError):
        HyperParams(n_topics=0)
    with pytest.raises(ValueError):
        HyperParams(alpha=0)
    with pytest.raises(ValueError):
        HyperParams(sweeps=1, burn_in=2)


def test_conditionals_match_enumeration_oracle():
    rng = np.random.default_rng(123)
    for _ in range(25):
        corpus, hp, wt, ct = random_tiny_instance(rng)
        state = SamplerState(corpus, hp)
        for d in range(len(wt)):
            for m in range(len(wt[d])):
                got = conditional_word(state, d, m)
                want = conditional_by_enumeration(
                    wt, ct, state.y, state.z, hp.n_topics, state.W, state.C,
                    hp.alpha, hp.beta, hp.gamma, "word", d, m,
                )
                assert np.abs(got - want).max() <= 1e-12
            for n in range(len(ct[d])):
                got = conditional_color(state, d, n)
                want = conditional_by_enumeration(
                    wt, ct, state.y, state.z, hp.n_topics, state.W, state.C,
                    hp.alpha, hp.beta, hp.gamma, "color", d, n,
                )
                assert np.abs(got - want).max() <= 1e-12


def test_conditionals_sum_to_one(tiny_corpus):
    hp = HyperParams(n_topics=3, sweeps=0, burn_in=0, seed=1)
    state = SamplerState(tiny_corpus, hp)
    for d in range(2):
        for m in range(len(state.word_tokens[d])):
            assert conditional_word(state, d, m).sum() == pytest.approx(1.0, abs=1e-12)
        for n in range(len(state.color_tokens[d])):
            assert conditional_color(state, d, n).sum() == pytest.approx(1.0, abs=1e-12)


def test_symmetric_single_word_corpus_uniform():
    # one document holding a single word token and nothing else: removing
    # the token leaves a fully symmetric state, so both topics tie exactly
    corpus = make_tiny_corpus([[0]], [[]], 2, 2)
    hp = HyperParams(n_topics=2, alpha=0.7, beta=0.3, gamma=0.3, sweeps=0, burn_in=0, seed=0)
    state = SamplerState(corpus, hp)
    assert conditional_word(state, 0, 0) == pytest.approx([0.5, 0.5], abs=1e-15)
    # mirrored case for a single color token
    corpus = make_tiny_corpus([[]], [[1]], 3, 2)
    state = SamplerState(corpus, HyperParams(n_topics=2, sweeps=0, burn_in=0, seed=0))
    assert conditional_color(state, 0, 0) == pytest.approx([0.5, 0.5], abs=1e-15)


def test_invalid_address_rejected(tiny_corpus):
    hp = HyperParams(n_topics=2, sweeps=0, burn_in=0)
    state = SamplerState(tiny_corpus, hp)
    with pytest.raises(ValueError):
        conditional_word(state, 0, 99)
    with pytest.raises(ValueError):
        conditional_color(state, 9, 0)


def test_sweep_keeps_counts_consistent(tiny_corpus):
    hp = HyperParams(n_topics=3, sweeps=0, burn_in=0, seed=9)
    state = SamplerState(tiny_corpus, hp)
    for _ in range(5):
        gibbs_sweep(state)
        rebuilt = state.recount()
        assert rebuilt["n_dk_words"] == state.n_dk_words
        assert rebuilt["n_dk_colors"] == state.n_dk_colors
        assert rebuilt["n_wk"] == state.n_wk
        assert rebuilt["n_ck"] == state.n_ck
        assert rebuilt["n_k_words"] == state.n_k_words
        assert rebuilt["n_k_colors"] == state.n_k_colors


def test_token_conservation(tiny_corpus):
    hp = HyperParams(n_topics=3, sweeps=0, burn_in=0, seed=2)
    state = SamplerState(tiny_corpus, hp)
    for _ in range(3):
        gibbs_sweep(state)
        for d, doc in enumerate(tiny_corpus.documents):
            assert sum(state.n_dk_words[d]) == doc.n_words
            assert sum(state.n_dk_colors[d]) == doc.n_colors


def test_k1_sweep_is_identity(tiny_corpus):
    hp = HyperParams(n_topics=1, sweeps=0, burn_in=0, seed=4)
    state = SamplerState(tiny_corpus, hp)
    before_y = [list(r) for r in state.y]
    gibbs_sweep(state)
    assert state.y == before_y
    assert all(all(k == 0 for k in row) for row in state.z)


def test_log_joint_matches_oracle_and_relabeling():
    rng = np.random.default_rng(5)
    corpus, hp, wt, ct = random_tiny_instance(rng)
    state = SamplerState(corpus, hp)
    want = collapsed_log_joint(
        wt, ct, state.y, state.z, hp.n_topics, state.W, state.C,
        hp.alpha, hp.beta, hp.gamma,
    )
    assert log_joint(state) == pytest.approx(want, abs=1e-9)
    # relabel topics globally: joint is invariant
    K = hp.n_topics
    perm = list(reversed(range(K)))
    state.y = [[perm[k] for k in row] for row in state.y]
    state.z = [[perm[k] for k in row] for row in state.z]
    for name, table in state.recount().items():
        setattr(state, name, table)
    assert log_joint(state) == pytest.approx(want, abs=1e-9)


def test_log_joint_single_token_closed_form():
    # one doc, one word, one color, K=1: the collapsed joint reduces to
    # p(w) = (gamma + 0)/(W*gamma) = 1/W and p(c) = 1/C
    import math

    corpus = make_tiny_corpus([[1]], [[2]], 3, 4)
    hp = HyperParams(n_topics=1, alpha=0.8, beta=0.1, gamma=0.1, sweeps=0, burn_in=0)
    state = SamplerState(corpus, hp)
    assert log_joint(state) == pytest.approx(math.log(1 / 4) + math.log(1 / 3), abs=1e-12)


def test_log_joint_ratio_equals_conditional_ratio():
    rng = np.random.default_rng(8)
    for _ in range(5):
        corpus, hp, wt, ct = random_tiny_instance(rng)
        if hp.n_topics < 2:
            continue
        state = SamplerState(corpus, hp)
        probs = conditional_word(state, 0, 0)
        lj = {}
        for k in (0, 1):
            state.y[0][0] = k
            for name, table in state.recount().items():
                setattr(state, name, table)
            lj[k] = log_joint(state)
        assert lj[1] - lj[0] == pytest.approx(np.log(probs[1] / probs[0]), abs=1e-9)


def test_train_empty_corpus_rejected():
    from chromatika.corpus import Corpus, Vocabulary

    empty = Corpus(documents=[], vocabulary=Vocabulary(("qb",)))
    with pytest.raises(ValueError, match="no documents"):
        train(empty, HyperParams(sweeps=1, burn_in=0))


def test_train_k1_theta_is_one(tiny_corpus):
    hp = HyperParams(n_topics=1, sweeps=3, burn_in=1, seed=0)
    model = train(tiny_corpus, hp)
    assert np.allclose(model.theta, 1.0)
    assert model.phi.shape == (1, 4)
    assert model.psi.shape == (1, 3)


def test_train_deterministic_bitwise(tiny_corpus):
    hp = HyperParams(n_topics=3, sweeps=5, burn_in=2, seed=42)
    m1 = train(tiny_corpus, hp)
    m2 = train(tiny_corpus, hp)
    assert np.array_equal(m1.phi, m2.phi)
    assert np.array_equal(m1.psi, m2.psi)
    assert np.array_equal(m1.theta, m2.theta)
    assert np.array_equal(m1.topic_weights, m2.topic_weights)


def test_train_rows_stochastic_positive(tiny_corpus):
    hp = HyperParams(n_topics=2, sweeps=4, burn_in=2, seed=1)
    model = train(tiny_corpus, hp)
    for mat in (model.phi, model.psi, model.theta):
        assert (mat > 0).all()
        assert np.abs(mat.sum(axis=1) - 1).max() < 1e-9
    assert model.topic_weights.sum() == pytest.approx(1.0)


def test_train_average_mode(tiny_corpus):
    hp = HyperParams(n_topics=2, sweeps=6, burn_in=2, seed=1, estimate="average")
    model = train(tiny_corpus, hp)
    assert np.abs(model.phi.sum(axis=1) - 1).max() < 1e-9


def test_relabeling_equivariance(tiny_corpus):
    hp = HyperParams(n_topics=3, sweeps=4, burn_in=0, seed=6)
    model = train(tiny_corpus, hp)
    perm = [2, 0, 1]
    swapped = relabel_topics(model, perm)
    for k in range(3):
        assert np.array_equal(swapped.phi[k], model.phi[perm[k]])
        assert np.array_equal(swapped.psi[k], model.psi[perm[k]])
    assert np.array_equal(swapped.theta[:, 0], model.theta[:, perm[0]])


def test_generate_deterministic():
    phi = np.array([[0.5, 0.5, 0.0], [0.0, 0.2, 0.8]])
    psi = np.array([[1.0, 0.0], [0.1, 0.9]])
    a = generate(phi, psi, 0.8, [(5, 4), (3, 2)], seed=3)
    b = generate(phi, psi, 0.8, [(5, 4), (3, 2)], seed=3)
    for da, db in zip(a.documents, b.documents):
        assert np.array_equal(da.color_tokens, db.color_tokens)
        assert np.array_equal(da.word_tokens, db.word_tokens)
    assert np.array_equal(a.theta, b.theta)


def test_generate_k1_tokens_follow_topics():
    phi = np.array([[0.25, 0.25, 0.25, 0.25]])
    psi = np.array([[0.5, 0.5]])
    sample = generate(phi, psi, 0.8, [(2000, 2000)], seed=0)
    assert all(k == 0 for k in sample.word_assignments[0])
    freq = np.bincount(sample.documents[0].word_tokens, minlength=2) / 2000
    assert np.abs(freq - 0.5).max() < 0.05


def test_generate_rejects_bad_inputs():
    ok = np.array([[0.5, 0.5]])
    with pytest.raises(ValueError, match="probability"):
        generate(np.array([[0.9, 0.2]]), ok, 0.8, [(1, 1)])
    with pytest.raises(ValueError, match="alpha"):
        generate(ok, ok, 0.0, [(1, 1)])


def test_generate_chi_square_against_mixture():
    # K=2, alpha=0.8, 5000 color tokens per doc: the per-document empirical
    # color distribution follows theta_d . Phi; chi-square with 3 d.o.f.,
    # critical value 11.345 at significance 0.01
    phi = np.array([[0.7, 0.1, 0.1, 0.1], [0.05, 0.45, 0.45, 0.05]])
    psi = np.array([[0.5, 0.5], [0.5, 0.5]])
    sample = generate(phi, psi, 0.8, [(5000, 1)] * 6, seed=21)
    crit = 11.345  # chi2 0.99 quantile, df=3
    failures = 0
    for d in range(6):
        # the realized mixture of color assignments is the exact expectation
        z = np.array(sample.color_assignments[d])
        mix = np.array([(z == k).mean() for k in range(2)])
        expected = (mix @ phi) * 5000
        observed = np.bincount(sample.documents[d].color_tokens, minlength=4)
        chi2 = (((observed - expected) ** 2) / expected).sum()
        if chi2 > crit:
            failures += 1
    assert failures <= 1  # significance 0.01 over 6 docs; allow one outlier


def test_topic_proportions_by_group(tiny_corpus, caplog):
    hp = HyperParams(n_topics=2, sweeps=3, burn_in=1, seed=0)
    model = train(tiny_corpus, hp)
    # one doc per label: returns that doc's mixture
    res = topic_proportions_by_group(model, {"d00": "a", "d01": "b"})
    assert np.allclose(res["a"], model.theta[0])
    assert np.allclose(res["b"], model.theta[1])
    # all docs one label: corpus mean
    res = topic_proportions_by_group(model, {"d00": "x", "d01": "x"})
    assert np.allclose(res["x"], model.theta.mean(axis=0))
    assert res["x"].sum() == pytest.approx(1.0)
    # unlabeled docs are skipped with a warning
    with caplog.at_level("WARNING"):
        res = topic_proportions_by_group(model, {"d00": "only"})
    assert list(res) == ["only"]
    assert "d01" in caplog.text
