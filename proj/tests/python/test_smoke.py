import math
import os
from pathlib import Path

import pytest

import hybridclf

DATA = Path(os.environ.get("HYBRIDCLF_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))
TINY = {
    "seq_len": 30,
    "embed_dim": 16,
    "filters": 8,
    "kernel_size": 5,
    "pool_size": 5,
    "num_heads": 4,
    "key_dim": 8,
    "lstm_units": 16,
    "vocab_size": 500,
    "seed": 7,
}


def test_preprocess():
    assert hybridclf.preprocess("Verify your ACCOUNT") == ["verify", "account", "verify_account"]
    assert hybridclf.lemmatize("running") == "run"
    assert hybridclf.tokenize("p@ssw0rd reset") == ["p@ssw0rd", "reset"]
    assert hybridclf.generate_bigrams(["credit", "card"]) == ["credit_card"]
    assert hybridclf.preprocess("Verify account", {"emit_bigrams": False}) == ["verify", "account"]


def test_metrics():
    curve, auc = hybridclf.roc_auc([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
    assert auc == 0.75
    assert curve[0] == (0.0, 0.0) and curve[-1] == (1.0, 1.0)
    assert round(hybridclf.scalar_metrics(47, 3, 4, 46)["f1"], 2) == 0.93


def test_stats():
    s = hybridclf.stats(DATA / "two_rows.csv")
    assert s["total"] == 2
    assert s["per_class"] == {"0": 1, "1": 1}


def test_errors_carry_kind(tmp_path):
    with pytest.raises(hybridclf.Error) as info:
        hybridclf.stats(tmp_path / "missing.csv")
    assert info.value.kind == "config"
    with pytest.raises(hybridclf.Error):
        hybridclf.preprocess("x", {"not_a_key": 1})


def test_train_predict_and_cross_validate(tmp_path):
    cfg = dict(TINY, epochs=3)
    summary = hybridclf.train(DATA / "synthetic_200.csv", tmp_path / "model", cfg)
    assert len(summary["history"]) == 3
    ckpt = tmp_path / "model" / "model.ckpt.json"
    pred = hybridclf.predict(ckpt, "verify your account password now")
    assert math.isclose(sum(pred["probabilities"]), 1.0, abs_tol=1e-12)
    assert pred["class"] in (0, 1)
    report = hybridclf.evaluate(ckpt, DATA / "two_rows.csv")
    assert sum(report["counts"].values()) == 2

    agg = hybridclf.cross_validate(DATA / "synthetic_200.csv", tmp_path / "cv", dict(TINY, epochs=2))
    assert agg["folds"] == 5
    assert (tmp_path / "cv" / "aggregate.json").exists()
