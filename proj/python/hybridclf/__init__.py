"""Deceptive web page classification with a CNN, LSTM and attention hybrid."""

import json

from . import _core
from ._core import Error, generate_bigrams, lemmatize, roc_auc, scalar_metrics, tokenize

__all__ = [
    "Error",
    "cross_validate",
    "evaluate",
    "generate_bigrams",
    "lemmatize",
    "predict",
    "preprocess",
    "roc_auc",
    "scalar_metrics",
    "stats",
    "tokenize",
    "train",
]


def _config(config=None, **overrides):
    merged = dict(config or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return json.dumps(merged)


def preprocess(text, config=None):
    """Token list for one raw page."""
    return _core.preprocess(text, _config(config))


def stats(corpus, bucket=None, config=None):
    """Class counts and length histogram of a labeled CSV."""
    return json.loads(_core.stats(_config(config, corpus=str(corpus), length_bucket=bucket)))


def train(corpus, out_dir, config=None):
    """Trains on a labeled CSV and writes model.ckpt.json and history.csv to out_dir."""
    return json.loads(_core.train(_config(config, corpus=str(corpus), out_dir=str(out_dir))))


def cross_validate(corpus, out_dir, config=None):
    """Stratified k-fold run. Writes the per-fold files and returns the aggregate."""
    return json.loads(_core.cross_validate(_config(config, corpus=str(corpus), out_dir=str(out_dir))))


def evaluate(checkpoint, corpus):
    return json.loads(_core.evaluate(str(checkpoint), str(corpus)))


def predict(checkpoint, text, top_n=10):
    return json.loads(_core.predict(str(checkpoint), text, top_n))
