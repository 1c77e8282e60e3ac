"""Gaussian beliefs over graph signals in information (precision) form.

A belief is parameterized by a finite precision part ``P``, an information
vector ``h = P @ mean`` and a list of exact linear constraints ``c @ x = d``.
The constraints represent directions of infinite precision, so the zero-noise
and exact-subspace limits are stored symbolically instead of as very large
numbers. Fusing two beliefs adds precisions and information vectors and
concatenates constraints; that additivity is what makes the form convenient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .graph_core import _as_signal, _require_symmetric

__all__ = [
    "GaussianBelief",
    "SamplingOperator",
    "SubspaceBasis",
    "smoothness_prior",
    "bandlimit_basis",
    "subspace_prior",
    "full_observation",
    "partial_observation",
]


def _frozen(arr):
    out = np.array(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GaussianBelief:
    """Possibly degenerate Gaussian over R^n in information form.

    ``precision`` must be symmetric positive semidefinite (symmetry is
    checked here, definiteness is the constructor's responsibility).
    ``constraints`` is a tuple of (row, value) pairs meaning ``row @ x ==
    value`` exactly; rows need not be independent, duplicates are reduced
    when a posterior is formed.
    """

    n: int
    precision: np.ndarray
    info: np.ndarray
    constraints: tuple = field(default_factory=tuple)

    def __post_init__(self):
        prec = _require_symmetric(self.precision, name="precision")
        if prec.shape != (self.n, self.n):
            raise ValueError(f"precision must be {self.n}x{self.n}")
        info = _as_signal(self.info, self.n, name="information vector")
        rows = []
        for row, value in self.constraints:
            rows.append((_frozen(_as_signal(row, self.n, name="constraint row")),
                         float(value)))
        object.__setattr__(self, "precision", _frozen(prec))
        object.__setattr__(self, "info", _frozen(info))
        object.__setattr__(self, "constraints", tuple(rows))

    def combine(self, other):
        """Fuse with another belief: precisions and information add,
        constraints are concatenated."""
        if self.n != other.n:
            raise ValueError(
                f"dimension mismatch: {self.n} vs {other.n}"
            )
        return GaussianBelief(
            n=self.n,
            precision=self.precision + other.precision,
            info=self.info + other.info,
            constraints=self.constraints + other.constraints,
        )

    def constraint_arrays(self):
        """Constraints as a (k, n) matrix and length-k vector (k may be 0)."""
        if not self.constraints:
            return np.zeros((0, self.n)), np.zeros(0)
        rows = np.stack([c for c, _ in self.constraints])
        vals = np.array([d for _, d in self.constraints])
        return rows, vals


@dataclass(frozen=True)
class SamplingOperator:
    """Selection of a node subset; columns of the identity at those ids."""

    n: int
    nodes: tuple

    def __post_init__(self):
        nodes = tuple(int(v) for v in self.nodes)
        if len(set(nodes)) != len(nodes):
            raise ValueError("duplicate node ids in sampling set")
        for v in nodes:
            if not 0 <= v < self.n:
                raise ValueError(f"node id {v} out of range for n={self.n}")
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_s(self):
        return len(self.nodes)

    @classmethod
    def all_nodes(cls, n):
        return cls(n=n, nodes=tuple(range(n)))

    def matrix(self):
        """Dense (n, n_s) selection matrix."""
        s = np.zeros((self.n, self.n_s))
        for col, v in enumerate(self.nodes):
            s[v, col] = 1.0
        return s


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns spanning a signal subspace."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.float64)
        if b.ndim != 2 or b.shape[1] < 1:
            raise ValueError("basis must be a 2-d array with at least one column")
        gram = b.T @ b
        defect = np.max(np.abs(gram - np.eye(b.shape[1])))
        if defect > 1e-10:
            raise ValueError(f"basis columns not orthonormal (defect {defect:.2e})")
        object.__setattr__(self, "basis", _frozen(b))

    @property
    def n(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]


def smoothness_prior(lap, eps=0.0):
    """Zero-mean prior whose precision is the Laplacian plus ``eps`` times
    the identity.

    With ``eps = 0`` the prior is improper (flat along the Laplacian kernel,
    e.g. constant signals on a connected graph); the posterior machinery
    handles that case without regularization.
    """
    lap = _require_symmetric(lap, name="laplacian")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    n = lap.shape[0]
    return GaussianBelief(n=n, precision=lap + eps * np.eye(n), info=np.zeros(n))


def bandlimit_basis(spectrum, bandlimit, tol=1e-9):
    """Columns of the eigenbasis with eigenvalue at most ``bandlimit + tol``.

    Raises ``ValueError`` when no eigenvalue qualifies.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    mask = spectrum.values <= bandlimit + tol
    if not np.any(mask):
        raise ValueError(
            f"no eigenvalues at or below bandlimit {bandlimit} (+{tol})"
        )
    return SubspaceBasis(basis=spectrum.vectors[:, mask])


def subspace_prior(subspace, sigma2_prior=0.0, eps=0.0):
    """Prior concentrating the signal on a subspace.

    With ``sigma2_prior > 0`` this is the relaxed form: finite precision
    ``((1 + eps) I - U U') / sigma2_prior``, which puts precision
    ``eps / sigma2_prior`` along the subspace and ``(1 + eps) / sigma2_prior``
    along its orthogonal complement. With ``sigma2_prior = 0`` the limit is
    taken exactly: every direction orthogonal to the subspace becomes a hard
    constraint pinned to zero and the finite precision part vanishes, so
    on-subspace directions carry no information at all.
    """
    if sigma2_prior < 0 or eps < 0:
        raise ValueError("sigma2_prior and eps must be non-negative")
    u = subspace.basis
    n = subspace.n
    if sigma2_prior > 0:
        prec = ((1.0 + eps) * np.eye(n) - u @ u.T) / sigma2_prior
        prec = 0.5 * (prec + prec.T)
        return GaussianBelief(n=n, precision=prec, info=np.zeros(n))
    complement = null_space(u.T)
    constraints = tuple((complement[:, j], 0.0) for j in range(complement.shape[1]))
    return GaussianBelief(
        n=n, precision=np.zeros((n, n)), info=np.zeros(n), constraints=constraints
    )


def full_observation(observed, sigma2):
    """Likelihood of observing every node under i.i.d. Gaussian noise.

    ``sigma2 = 0`` yields exact constraints pinning each node to its
    observed value.
    """
    observed = np.asarray(observed, dtype=np.float64)
    n = observed.shape[0]
    observed = _as_signal(observed, n, name="observation")
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    if sigma2 == 0:
        eye = np.eye(n)
        constraints = tuple((eye[i], observed[i]) for i in range(n))
        return GaussianBelief(
            n=n, precision=np.zeros((n, n)), info=np.zeros(n),
            constraints=constraints,
        )
    return GaussianBelief(
        n=n, precision=np.eye(n) / sigma2, info=observed / sigma2
    )


def partial_observation(sampling, observed_s, sigma2):
    """Likelihood of noisy observations on a node subset.

    The precision is lifted to signal space: ``sigma2 > 0`` gives a diagonal
    precision carrying ``1/sigma2`` on sampled nodes and zero elsewhere (an
    unsampled node contributes no information). ``sigma2 = 0`` pins each
    sampled node exactly. Sampling all nodes reproduces
    :func:`full_observation` entry for entry.
    """
    n = sampling.n
    observed_s = _as_signal(observed_s, sampling.n_s, name="observation")
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    if sigma2 == 0:
        eye = np.eye(n)
        constraints = tuple(
            (eye[v], observed_s[col]) for col, v in enumerate(sampling.nodes)
        )
        return GaussianBelief(
            n=n, precision=np.zeros((n, n)), info=np.zeros(n),
            constraints=constraints,
        )
    prec = np.zeros((n, n))
    info = np.zeros(n)
    for col, v in enumerate(sampling.nodes):
        prec[v, v] = 1.0 / sigma2
        info[v] = observed_s[col] / sigma2
    return GaussianBelief(n=n, precision=prec, info=info)
