"""Covariance-based scoring of sampling sets and a greedy selection baseline."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .belief import SamplingOperator, partial_observation
from .inference import fuse

__all__ = ["METRICS", "covariance_metric", "greedy_select", "exhaustive_select"]

METRICS = ("trace", "logdet", "max_eig")


def covariance_metric(summary, metric):
    """Scalar score of the posterior covariance; smaller is better.

    Any flat (infinite-variance) direction makes every metric ``inf``.
    ``logdet`` is taken over the finite-variance block; when zero-variance
    directions are present it is ``-inf``, the count of such directions
    being readable off ``summary.zero_basis``.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    if summary.null_basis.shape[1] > 0:
        return math.inf
    values = summary.cov_values
    if metric == "trace":
        return float(values.sum())
    if metric == "max_eig":
        return float(values.max()) if values.size else 0.0
    if summary.zero_basis.shape[1] > 0:
        return -math.inf
    return float(np.log(values).sum())


def _score(prior, nodes, sigma2, metric):
    op = SamplingOperator(n=prior.n, nodes=tuple(nodes))
    obs = partial_observation(op, np.zeros(op.n_s), sigma2)
    return covariance_metric(fuse(prior, obs), metric)


def greedy_select(prior, budget, sigma2, metric="trace"):
    """Grow a sampling set one node at a time, each round adding the node
    whose observation most reduces the covariance metric.

    Ties break toward the lowest node id. The posterior is recomputed per
    candidate; at the intended desk scale that is cheap and keeps the
    scoring honest against the same engine used everywhere else.
    """
    n = prior.n
    if not 1 <= budget <= n:
        raise ValueError(f"budget must be in [1, {n}], got {budget}")
    selected = []
    remaining = list(range(n))
    for _ in range(budget):
        best_node = None
        best_value = math.inf
        for candidate in remaining:
            value = _score(prior, selected + [candidate], sigma2, metric)
            if best_node is None or value < best_value:
                best_node = candidate
                best_value = value
        selected.append(best_node)
        remaining.remove(best_node)
    return SamplingOperator(n=n, nodes=tuple(sorted(selected)))


def exhaustive_select(prior, budget, sigma2, metric="trace"):
    """Exact minimizer over all size-``budget`` subsets.

    Exponential; guarded to n <= 12 and meant as an oracle for checking the
    greedy baseline. Ties break toward the lexicographically smallest set.
    """
    n = prior.n
    if n > 12:
        raise ValueError("exhaustive search is limited to n <= 12")
    if not 1 <= budget <= n:
        raise ValueError(f"budget must be in [1, {n}], got {budget}")
    best_set = None
    best_value = math.inf
    for nodes in itertools.combinations(range(n), budget):
        value = _score(prior, nodes, sigma2, metric)
        if best_set is None or value < best_value:
            best_set = nodes
            best_value = value
    return SamplingOperator(n=n, nodes=best_set)
