import numpy as np
import pytest
from PIL import Image

from chromatika.apps import (
    band_index,
    bin_scores,
    blended_color_histogram,
    equal_mass_bands,
    query_to_topic_weights,
    recolor_pattern,
    recommend_palettes,
    rerank_images,
    select_pixels,
)
from chromatika.basis import quantize_array
from chromatika.errors import QueryError
from chromatika.palette import Palette5, nearest_palettes


def test_query_weights_sum_to_one(apps_model):
    q = query_to_topic_weights("garden fashion politics", apps_model)
    assert q.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert (q.weights >= 0).all()


def test_query_one_hot_topic(apps_model):
    q = query_to_topic_weights("garden", apps_model)
    assert q.weights.argmax() == 0
    assert q.weights[0] == 1.0


def test_query_matches_column_sum_oracle(apps_model):
    q = query_to_topic_weights("garden plants beauty", apps_model)
    ids = list(q.tokens)
    raw = np.zeros(3)
    for k in range(3):
        raw[k] = sum(apps_model.psi[k, t] for t in ids)
    assert np.allclose(q.weights, raw / raw.sum(), atol=1e-12)


def test_query_duplication_doubles_summand(apps_model):
    once = query_to_topic_weights("garden beauty", apps_model)
    twice = query_to_topic_weights("garden garden beauty", apps_model)
    ids_once = list(once.tokens)
    raw_once = apps_model.psi[:, ids_once].sum(axis=1)
    garden = apps_model.vocabulary.index["garden"]
    raw_twice = raw_once + apps_model.psi[:, garden]
    assert np.allclose(twice.weights, raw_twice / raw_twice.sum(), atol=1e-12)


def test_query_error_lists_dropped(apps_model):
    with pytest.raises(QueryError) as err:
        query_to_topic_weights("the zzzunknown 42", apps_model)
    assert "zzzunknown" in err.value.dropped_tokens


def test_query_product_mode(apps_model):
    q = query_to_topic_weights("garden plant", apps_model, combine="product")
    assert q.weights.argmax() == 0
    assert q.weights.sum() == pytest.approx(1.0)


def test_recommend_one_hot_reduces_to_nearest(apps_model, pool):
    q, hits = recommend_palettes("garden", apps_model, pool, 4)
    # build the exact blend and compare against nearest_palettes directly
    h = blended_color_histogram(q.weights, apps_model)
    direct = nearest_palettes(h, pool, 4)
    assert [(i, s) for i, _, s in hits] == [(i, s) for i, _, s in direct]
    # one-hot weights: the blend IS the topic row, so the reduction to
    # nearest_palettes on that color topic is exact
    assert np.array_equal(h, apps_model.phi[0])
    topic_direct = nearest_palettes(apps_model.phi[0], pool, 4)
    assert [(i, s) for i, _, s in hits] == [(i, s) for i, _, s in topic_direct]


def test_recommend_full_scan_oracle(apps_model, pool):
    from chromatika.palette import WeightedColorHistogram, wed_distance

    q, hits = recommend_palettes("techy politics", apps_model, pool, len(pool))
    h = WeightedColorHistogram(blended_color_histogram(q.weights, apps_model))
    scores = [wed_distance(h, p) for p in pool]
    order = sorted(range(len(pool)), key=lambda i: scores[i])
    assert [i for i, _, _ in hits] == order


def make_bin_image(bins, width_per_bin=10, height=8):
    from chromatika.basis import bin_representative

    arr = np.zeros((height, width_per_bin * len(bins), 3), dtype=np.uint8)
    for i, b in enumerate(bins):
        arr[:, i * width_per_bin:(i + 1) * width_per_bin] = bin_representative(b)
    return arr


def test_rerank_exact_match_first(apps_model, tmp_path):
    q = query_to_topic_weights("garden", apps_model)
    h = blended_color_histogram(q.weights, apps_model)
    top_bins = np.argsort(-h)[:3]
    # image built from the blend's top bins in its exact proportions
    weights = h[top_bins] / h[top_bins].sum()
    counts = (weights * 100).round().astype(int)
    arr = np.concatenate(
        [np.tile(np.array(make_bin_image([b])[0, 0], dtype=np.uint8), (1, int(c), 1))
         for b, c in zip(top_bins, counts)], axis=1,
    )
    img_best = Image.fromarray(arr)
    img_far = Image.fromarray(make_bin_image([511, 448, 7]))
    ranked = rerank_images("garden", [("best", img_best), ("far", img_far)], apps_model)
    assert ranked[0][0] == "best"
    # duplicates rank adjacently (stable ordering)
    ranked = rerank_images(
        "garden",
        [("a", img_far), ("b", img_best), ("c", img_far)],
        apps_model,
    )
    assert [name for name, _ in ranked] == ["b", "a", "c"]


def test_rerank_hand_computed_l1(apps_model):
    q = query_to_topic_weights("garden", apps_model)
    h = blended_color_histogram(q.weights, apps_model)
    images = [(f"im{i}", make_bin_image(bins)) for i, bins in
              enumerate([[0, 1], [100, 101], [200, 300, 400]])]
    ranked = rerank_images("garden", images, apps_model)
    expected = []
    for name, arr in images:
        counts = np.bincount(quantize_array(arr).reshape(-1), minlength=512)
        hist = counts / counts.sum()
        expected.append((name, float(np.abs(hist - h).sum())))
    expected.sort(key=lambda t: t[1])
    assert ranked == expected


def test_rerank_skips_undecodable(apps_model, tmp_path, caplog):
    good = tmp_path / "good.png"
    Image.fromarray(make_bin_image([0, 511])).save(good)
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"nope")
    with caplog.at_level("WARNING"):
        ranked = rerank_images("garden", [("g", good), ("b", bad)], apps_model)
    assert [name for name, _ in ranked] == ["g"]
    assert "b" in caplog.text


def test_select_pixels_tau_zero_identity(apps_model):
    rng = np.random.default_rng(4)
    px = rng.integers(0, 256, (20, 30, 3), dtype=np.uint8)
    out, mask = select_pixels(px, "garden", apps_model, tau=0.0)
    assert mask.all()
    assert np.array_equal(out, px)


def test_select_pixels_tau_above_one_all_gray(apps_model):
    rng = np.random.default_rng(5)
    px = rng.integers(0, 256, (10, 10, 3), dtype=np.uint8)
    out, mask = select_pixels(px, "garden", apps_model, tau=1.5)
    assert not mask.any()
    assert (out[..., 0] == out[..., 1]).all() and (out[..., 1] == out[..., 2]).all()


def test_select_pixels_mask_matches_bin_scores(apps_model):
    rng = np.random.default_rng(6)
    px = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
    tau = 0.4
    out, mask = select_pixels(px, "garden politics", apps_model, tau=tau)
    q = query_to_topic_weights("garden politics", apps_model)
    scores = bin_scores(q.weights, apps_model)
    bins = quantize_array(px)
    assert np.array_equal(mask, scores[bins] >= tau)
    # kept pixels bit-exact, dropped pixels are gray
    assert np.array_equal(out[mask], px[mask])
    dropped = out[~mask]
    assert (dropped[:, 0] == dropped[:, 1]).all() and (dropped[:, 1] == dropped[:, 2]).all()


def test_select_pixels_monotone_in_tau(apps_model):
    rng = np.random.default_rng(7)
    px = rng.integers(0, 256, (12, 12, 3), dtype=np.uint8)
    taus = [0.0, 0.2, 0.5, 0.8, 1.01]
    masks = [select_pixels(px, "fashion", apps_model, tau=t)[1] for t in taus]
    for lo, hi in zip(masks, masks[1:]):
        assert (hi <= lo).all()  # raising tau never grows the selection


def test_equal_mass_bands_quantile_oracle():
    rng = np.random.default_rng(8)
    gray = rng.integers(0, 256, size=4000, dtype=np.uint8)
    bounds = equal_mass_bands(gray, n_bands=5)
    counts = np.bincount(gray, minlength=256)
    cdf = np.cumsum(counts) / counts.sum()
    for k, t in enumerate(bounds, start=1):
        assert cdf[t] >= k / 5
        if t > 0:
            assert cdf[t - 1] < k / 5  # smallest level reaching the quantile


def test_recolor_five_level_test_card(apps_model, pool):
    levels = [10, 70, 130, 190, 250]
    arr = np.zeros((10, 50, 3), dtype=np.uint8)
    for i, v in enumerate(levels):
        arr[:, i * 10:(i + 1) * 10] = v
    out = recolor_pattern(arr, "garden", apps_model, pool)
    _, hits = recommend_palettes("garden", apps_model, pool, 1)
    palette = hits[0][1]
    order = sorted(range(5), key=lambda i: (palette.lab[i][0], i))
    expected = [palette.colors[i] for i in order]
    for i in range(5):
        got = out[:, i * 10:(i + 1) * 10].reshape(-1, 3)
        assert (got == expected[i]).all()
    # output restricted to the palette
    used = {tuple(c) for c in out.reshape(-1, 3)}
    assert used <= set(palette.colors)


def test_recolor_constant_gray_single_color(apps_model, pool):
    arr = np.full((8, 8, 3), 77, dtype=np.uint8)
    out = recolor_pattern(arr, "garden", apps_model, pool)
    assert len({tuple(c) for c in out.reshape(-1, 3)}) == 1


def test_recolor_rejects_color_input(apps_model, pool):
    arr = np.zeros((4, 4, 3), dtype=np.uint8)
    arr[0, 0] = (10, 20, 30)
    with pytest.raises(ValueError, match="grayscale"):
        recolor_pattern(arr, "garden", apps_model, pool)


def test_recolor_accepts_single_channel(apps_model, pool):
    arr = np.linspace(0, 255, 64, dtype=np.uint8).reshape(8, 8)
    out = recolor_pattern(arr, "garden", apps_model, pool)
    assert out.shape == (8, 8, 3)


def test_band_index_mapping():
    bounds = np.array([10, 20, 30, 40])
    vals = np.array([0, 10, 11, 20, 25, 40, 255], dtype=np.uint8)
    assert band_index(vals, bounds).tolist() == [0, 0, 1, 1, 2, 3, 4]
