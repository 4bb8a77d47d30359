import math

import numpy as np
import pytest

from fitguide.mlp import (
    CommandModel,
    TrainConfig,
    TrainingDivergedError,
    forward,
    forward_batch,
    init_model,
    load_model,
    loss_and_gradients,
    save_model,
    train,
)


def _affine_dataset(n=2000, seed=0):
    rng = np.random.default_rng(seed)
    X = np.column_stack([
        rng.uniform(0, 3, n), rng.uniform(0, math.pi, n), rng.uniform(0.1, 4, n),
    ])
    u = 0.7 * X[:, 0] - 0.4 * X[:, 1] + 0.2 * X[:, 2] + 0.05
    return np.column_stack([X, u])


def test_zero_network_collapses_to_output_mean():
    model = init_model(seed=0)
    for W in model.weights:
        W[:] = 0.0
    for b in model.biases:
        b[:] = 0.0
    assert forward(model, (1.0, 2.0, 3.0)) == 0.0
    assert forward(model, (-5.0, 0.4, 9.0)) == 0.0


def test_forward_deterministic_and_finite_checked():
    model = init_model(seed=1)
    x = (0.5, 1.0, 2.0)
    assert forward(model, x) == forward(model, x)
    with pytest.raises(ValueError):
        forward(model, (math.nan, 1.0, 2.0))


def test_affine_map_trains_to_target_stop():
    # deep-convergence sanity on an exactly realizable target; the optimizer
    # reaches the stop threshold well below the real-data noise floor
    config = TrainConfig(target_mse=1e-5, max_epochs=5000, batch_size=512,
                         learning_rate=3e-3, lr_patience=60, lr_min=1e-6, seed=1)
    _, report = train(_affine_dataset(), config)
    assert report.reached_target
    assert report.final_train_mse <= 1e-5


def test_gradients_match_finite_differences():
    model = init_model(seed=3)
    rng = np.random.default_rng(4)
    X = rng.normal(size=(20, 3))
    Y = rng.normal(size=(20, 1))
    _, g_w, g_b = loss_and_gradients(model, X, Y)
    step = 1e-5
    worst = 0.0
    for layer in range(len(model.weights)):
        for arr, grad in ((model.weights[layer], g_w[layer]), (model.biases[layer], g_b[layer])):
            flat = arr.reshape(-1)
            gflat = grad.reshape(-1)
            for i in rng.choice(flat.size, size=min(12, flat.size), replace=False):
                keep = flat[i]
                flat[i] = keep + step
                up = loss_and_gradients(model, X, Y)[0]
                flat[i] = keep - step
                down = loss_and_gradients(model, X, Y)[0]
                flat[i] = keep
                fd = (up - down) / (2 * step)
                worst = max(worst, abs(fd - gflat[i]) / max(abs(fd), abs(gflat[i]), 1e-8))
    assert worst <= 1e-5


def test_training_diverges_loudly():
    np_err = np.seterr(all="ignore")
    try:
        with pytest.raises(TrainingDivergedError) as excinfo:
            train(_affine_dataset(), TrainConfig(max_epochs=3, learning_rate=1e160,
                                                 batch_size=512, seed=0))
        assert excinfo.value.epoch >= 1
    finally:
        np.seterr(**np_err)


def test_training_determinism():
    config = TrainConfig(max_epochs=3, batch_size=512, seed=7)
    m1, r1 = train(_affine_dataset(), config)
    m2, r2 = train(_affine_dataset(), config)
    assert r1.final_train_mse == r2.final_train_mse
    probe = np.array([[1.0, 1.0, 1.0]])
    assert forward_batch(m1, probe)[0] == forward_batch(m2, probe)[0]


def test_best_validation_monotone(train_report):
    vals = [v for _, _, v in train_report.history]
    best = np.minimum.accumulate(vals)
    assert np.all(np.diff(best) <= 0)
    assert train_report.best_val_mse == pytest.approx(min(vals))


def test_report_both_scales(train_report, model):
    assert train_report.final_train_mse_raw == pytest.approx(
        train_report.final_train_mse * model.output_scale**2
    )


def test_trained_rows_predicted_within_bound(model, reduced_dataset, train_report):
    # Markov bound check: err > 10*sqrt(MSE) on at most 1% of rows
    rng = np.random.default_rng(12)
    idx = rng.choice(len(reduced_dataset), size=20000, replace=False)
    rows = reduced_dataset[idx]
    pred = forward_batch(model, rows[:, :3])
    err_norm = np.abs(pred - rows[:, 3]) / model.output_scale
    bound = 10.0 * math.sqrt(train_report.final_train_mse)
    assert np.mean(err_norm <= bound) >= 0.99


def test_forward_finite_on_domain(model):
    rng = np.random.default_rng(13)
    probe = np.column_stack([
        rng.uniform(0.0, 4.0, 500),
        rng.uniform(0.0, math.pi, 500),
        rng.uniform(1e-3, 4.0, 500),
    ])
    out = forward_batch(model, probe)
    assert np.all(np.isfinite(out))


def test_save_load_bitwise(model, tmp_path):
    path = tmp_path / "m.txt"
    save_model(model, path)
    loaded = load_model(path)
    rng = np.random.default_rng(14)
    probe = np.column_stack([
        rng.uniform(0, 4, 100), rng.uniform(0, math.pi, 100), rng.uniform(0.01, 4, 100),
    ])
    assert np.array_equal(forward_batch(model, probe), forward_batch(loaded, probe))
    assert loaded.t_bar == model.t_bar


def test_load_rejects_bad_files(tmp_path, model):
    path = tmp_path / "m.txt"
    save_model(model, path)
    text = path.read_text(encoding="utf-8")

    wrong_version = text.replace("fitguide-model v1", "fitguide-model v9")
    p = tmp_path / "v.txt"
    p.write_text(wrong_version, encoding="utf-8")
    with pytest.raises(ValueError, match="unsupported model version"):
        load_model(p)

    lines = text.splitlines()
    w2 = next(i for i, ln in enumerate(lines) if ln.startswith("W2:"))
    lines[w2] = "W2: " + " ".join(lines[w2].split()[1:-3])  # drop three values
    p = tmp_path / "dim.txt"
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(ValueError, match="layer 2"):
        load_model(p)

    p = tmp_path / "junk.txt"
    p.write_text("not a model\n", encoding="utf-8")
    with pytest.raises(ValueError, match="bad header"):
        load_model(p)


def test_model_validate_catches_inconsistency(model):
    broken = CommandModel(
        layer_sizes=model.layer_sizes,
        weights=[w.copy() for w in model.weights],
        biases=[b.copy() for b in model.biases],
        input_mean=model.input_mean,
        input_scale=model.input_scale,
        output_mean=model.output_mean,
        output_scale=model.output_scale,
        t_bar=model.t_bar,
    )
    broken.weights[1] = broken.weights[1][:, :-1]
    with pytest.raises(ValueError, match="layer 2"):
        broken.validate()
