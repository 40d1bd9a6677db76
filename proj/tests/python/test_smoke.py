import numpy as np
import pytest

import filanet as fn


def training_params():
    p = fn.SynthParams()
    p.height = 96
    p.width = 96
    p.b0 = 150.0
    p.by = 30.0
    p.noise_sigma = 2.0
    p.seed = 5
    p.filaments = [
        fn.Filament([(20.0, 10.0), (48.0, 50.0), (70.0, 85.0)], half_width=2.0, depth=60.0)
    ]
    return p


def test_generate_shapes_and_determinism():
    p = training_params()
    img, mask = fn.generate(p)
    assert img.shape == (96, 96) and img.dtype == np.uint8
    assert mask.shape == (96, 96) and set(np.unique(mask)) <= {0, 1}
    assert img.min() >= 1
    img2, mask2 = fn.generate(p)
    assert np.array_equal(img, img2) and np.array_equal(mask, mask2)


def test_train_detect_score_round_trip():
    img, mask = fn.generate(training_params())
    res = fn.train(img, mask, k=5)
    assert res.training_error >= 0
    assert res.background_rms > 0
    assert res.model.ws < 0  # filaments are darker than the trend

    pred = fn.detect(img, res.model)
    assert pred.shape == (92, 92)
    s = fn.score(pred, mask)
    assert s.f1 >= 0.9
    assert s.tp + s.fp + s.tn + s.fn == 92 * 92

    padded = fn.detect(img, res.model, pad=True)
    assert padded.shape == (96, 96)
    assert padded[:2].sum() == 0 and padded[:, :2].sum() == 0
    assert np.array_equal(padded[2:-2, 2:-2], pred)


def test_model_file_round_trip(tmp_path):
    img, mask = fn.generate(training_params())
    res = fn.train(img, mask)
    path = tmp_path / "model.json"
    res.model.save(path)
    loaded = fn.Model.load(path)
    assert loaded.k == res.model.k
    assert loaded.ws == res.model.ws
    assert loaded.wu == res.model.wu
    assert loaded.w0 == res.model.w0
    assert loaded.feature_scale == res.model.feature_scale
    assert np.array_equal(fn.detect(img, loaded), fn.detect(img, res.model))


def test_image_io_round_trip(tmp_path):
    img, mask = fn.generate(training_params())
    fn.save_image(img, tmp_path / "f.pgm")
    fn.save_mask(mask, tmp_path / "m.pgm")
    assert np.array_equal(fn.load_image(tmp_path / "f.pgm"), img)
    assert np.array_equal(fn.load_mask(tmp_path / "m.pgm"), mask)


def test_fit_background_recovers_planted_coefficients():
    q = 501
    t = np.array([fn.normalize_index(j, q) for j in range(q)])
    s = 4.0 + 2.5 * t - 1.5 * t * t
    rep = fn.fit_background(s, degree=2)
    c = rep.coefficients
    assert abs(c.c0 - 4.0) < 1e-9
    assert abs(c.c1 - 2.5) < 1e-9
    assert abs(c.c2 + 1.5) < 1e-9
    assert rep.rms_residual < 1e-9
    assert abs(fn.background_eval(c, 0, q) - (4.0 - 2.5 - 1.5)) < 1e-9


def test_fit_background_robust_resists_spikes():
    q = 1001
    rng = np.random.default_rng(3)
    t = np.array([fn.normalize_index(j, q) for j in range(q)])
    s = 100.0 + 10.0 * t + rng.normal(0.0, 0.5, q)
    s[::50] -= 400.0
    plain = fn.fit_background(s, degree=1).coefficients
    robust = fn.fit_background_robust(s, degree=1).coefficients
    assert abs(robust.c0 - 100.0) < abs(plain.c0 - 100.0)
    assert abs(robust.c0 - 100.0) < 0.5


def test_build_columns_and_normalize_index():
    img = np.arange(1, 26, dtype=np.uint8).reshape(5, 5)
    cols = fn.build_columns(img, k=3)
    assert cols.shape == (9, 9)
    assert np.array_equal(cols[:, 0], img[:3, :3].ravel())
    assert fn.normalize_index(0, 9) == -1.0
    assert fn.normalize_index(8, 9) == 1.0
    assert fn.normalize_index(4, 9) == 0.0


def test_corpus_items_and_rasterize():
    items = fn.corpus(3, fn.SynthParams(), seed=11)
    assert len(items) == 3
    assert items[0].image.shape == (256, 256)
    assert not np.array_equal(items[0].image, items[1].image)
    again = fn.corpus(3, fn.SynthParams(), seed=11)
    assert np.array_equal(items[2].image, again[2].image)

    f = items[0].params.filaments[0]
    region = fn.rasterize_filament(256, 256, f)
    assert region.sum() > 0
    assert np.array_equal(region & items[0].mask, region)  # mask covers each filament


def test_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        fn.load_image("/nonexistent/file.pgm")
    with pytest.raises(ValueError):
        fn.train(np.full((10, 10), 50, np.uint8), np.zeros((8, 8), np.uint8))
    with pytest.raises(ValueError):
        fn.fit_background(np.array([1.0, 2.0]), degree=2)
