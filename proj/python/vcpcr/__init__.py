"""Supervised variable clustering (VC-PCR) with CRL and CEN baselines."""

import json

import numpy as np

from . import _vcpcr
from ._vcpcr import VcpcrError, cluster_pair_mcc, lambda_max, mcc, msep, support_mcc

__all__ = [
    "VcpcrError",
    "cluster_pair_mcc",
    "fit_cen",
    "fit_crl",
    "fit_vcpcr",
    "lambda_max",
    "mcc",
    "msep",
    "nested_cv",
    "simulate",
    "support_mcc",
]


def _matrix(X):
    return np.asarray(X, dtype=np.float64, order="F")


def _vector(y):
    return np.asarray(y, dtype=np.float64).ravel()


def simulate(config=3, n=50, rho=0.6, seed=1, replicate=0, allow_noncanonical=False):
    """Returns (X, y, truth) for one simulated replicate."""
    X, y, truth = _vcpcr.simulate(config, n, rho, seed, replicate, allow_noncanonical)
    return X, y, json.loads(truth)


def fit_vcpcr(X, y, task="regression", weights="ridge", delta=1.0, K=5, lam=None, lambda_ratio=0.3, seed=1,
              partition=None):
    """Weighted SOS-NMF followed by latent regression. Returns the fit as a dict."""
    return json.loads(_vcpcr.fit_vcpcr(_matrix(X), _vector(y), task, weights, delta, K, lam, lambda_ratio, seed,
                                       partition))


def fit_crl(X, y, clusterer="kmeans", K=5, delta_ratio=0.1, seed=1):
    return json.loads(_vcpcr.fit_crl(_matrix(X), _vector(y), clusterer, K, delta_ratio, seed))


def fit_cen(X, y, K=5, delta_ratio=0.1, lam=1.0, seed=1):
    return json.loads(_vcpcr.fit_cen(_matrix(X), _vector(y), K, delta_ratio, lam, seed))


def nested_cv(X, y, method, task="regression", grid=None, truth=None):
    """Nested cross-validation; returns one dict per held-fixed hyperparameter value."""
    rows = _vcpcr.nested_cv(_matrix(X), _vector(y), task, method, json.dumps(grid or {}),
                            None if truth is None else json.dumps(truth))
    return [json.loads(line) for line in rows.splitlines() if line]
