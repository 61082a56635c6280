"""Lossy linear-optical network as a quantum process.

The process is fully described by its transfer matrix L acting on row
vectors of phase-space amplitudes, ``beta = alpha @ L``.  Between input
ordering t and output ordering s, the conditional distribution of beta given
alpha is a Gaussian centered on alpha L whose complex covariance is Sigma/2
with

    Sigma = I - L^dag L - diag(s) + L^dag diag(t) L,

well defined (no more singular than a point mass) iff Sigma >= 0.  Sigma = 0
reproduces the deterministic map beta = alpha L exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotPsdError, SimulabilityError
from .linalg import psd_factor_complex, standard_complex_normal, validate_transfer
from .rng import RngStream
from .states import GaussianPQDState

#: Ordering preset realizing classical (heterodyne-like) measurements:
#: s = t = -1 keeps the transition Gaussian proper for every contraction.
CLASSICAL_MEASUREMENT_ORDERING = -1.0


@dataclass(frozen=True)
class LossModel:
    """Uniform-loss network: ell-port elements of transmissivity eta0 each,
    fully connected over M modes, so every path crosses log_ell(M) elements.
    """

    eta0: float
    ell: int
    modes: int

    def __post_init__(self):
        if not 0.0 < self.eta0 <= 1.0:
            raise ValueError(f"eta0 must be in (0, 1], got {self.eta0}")
        if self.ell < 2:
            raise ValueError(f"element arity ell must be >= 2, got {self.ell}")
        if self.modes < 1:
            raise ValueError(f"mode count must be >= 1, got {self.modes}")


def uniform_loss_eta(model: LossModel) -> float:
    """Per-photon transmissivity eta0 ** log_ell(M) through the network."""
    depth = math.log(model.modes) / math.log(model.ell)
    return model.eta0**depth


def sigma_matrix(transfer: np.ndarray, s, t) -> np.ndarray:
    """Sigma = I - L^dag L - diag(s) + L^dag diag(t) L (Hermitian by
    construction; symmetrized to kill roundoff)."""
    matrix = np.asarray(transfer, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"transfer matrix must be square, got {matrix.shape}")
    m = matrix.shape[0]
    s = np.broadcast_to(np.asarray(s, dtype=float), (m,))
    t = np.broadcast_to(np.asarray(t, dtype=float), (m,))
    lh = matrix.conj().T
    sigma = np.eye(m) - lh @ matrix - np.diag(s) + (lh * t) @ matrix
    return (sigma + sigma.conj().T) / 2.0


def transition_sample(
    transfer: np.ndarray,
    s,
    t,
    alpha,
    rng: RngStream,
    size: int | None = None,
) -> np.ndarray:
    """Propagate input amplitudes through the network's transition Gaussian.

    Returns beta = alpha @ L + delta with delta a circularly-symmetric
    complex Gaussian of covariance Sigma/2.  When Sigma = 0 the map is
    deterministic and bitwise stable.  Raises :class:`SimulabilityError` if
    Sigma has an eigenvalue below the PSD tolerance, since the transition
    function is then not a probability density.
    """
    matrix = np.asarray(transfer, dtype=complex)
    sigma = sigma_matrix(matrix, s, t)
    try:
        factor = psd_factor_complex(sigma / 2.0)
    except NotPsdError as exc:
        raise SimulabilityError(
            f"transition function is not nonnegative at these orderings: {exc}"
        ) from exc
    alpha = np.asarray(alpha, dtype=complex)
    gen = rng.generator()
    n = alpha.shape[0] if (size is None and alpha.ndim == 2) else (1 if size is None else int(size))
    w = standard_complex_normal(gen, (n, matrix.shape[0]))
    beta = alpha @ matrix + w @ factor
    return beta[0] if (size is None and alpha.ndim == 1) else beta


def quadrature_rep(matrix: np.ndarray) -> np.ndarray:
    """Real 2K x 2K representation of a complex K x K matrix on interleaved
    (x, p) quadratures, such that row-vector transport alpha -> alpha A maps
    to (x, p) -> (x, p) quadrature_rep(A)."""
    a = np.asarray(matrix, dtype=complex)
    k = a.shape[0]
    out = np.zeros((2 * k, 2 * k))
    out[0::2, 0::2] = a.real
    out[0::2, 1::2] = a.imag
    out[1::2, 0::2] = -a.imag
    out[1::2, 1::2] = a.real
    return out


def propagate_gaussian(state: GaussianPQDState, transfer: np.ndarray) -> GaussianPQDState:
    """Send a Gaussian Wigner state through a (possibly lossy) network.

    The contraction is dilated with vacuum environment modes and those modes
    are traced back out, which lands on the closed form

        mean' = mean B(L),   cov' = B(L)^T cov B(L) + B(I - L^dag L)

    with B the quadrature representation.  The input must be at Wigner
    ordering (t = 0).
    """
    if np.max(np.abs(state.ordering), initial=0.0) > 1e-12:
        raise ValueError("propagate_gaussian expects a Wigner-ordered (t = 0) state")
    matrix = validate_transfer(transfer)
    if matrix.shape[0] != state.modes:
        raise DimensionError(
            f"state has {state.modes} modes but transfer matrix is {matrix.shape[0]} x {matrix.shape[1]}"
        )
    b = quadrature_rep(matrix)
    noise = np.eye(matrix.shape[0]) - matrix.conj().T @ matrix
    cov = b.T @ state.cov @ b + quadrature_rep(noise)
    return GaussianPQDState(
        ordering=np.zeros(state.modes),
        mean=state.mean @ b,
        cov=(cov + cov.T) / 2.0,
    )
