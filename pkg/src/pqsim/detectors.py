"""On-off photodetector model: efficiency, random counts, and the ordered
phase-space distributions of the two POVM outcomes.

The no-click POVM element is a scaled thermal state, so its PQD at output
ordering parameter s is the Gaussian

    W_off(beta) = (1 - p_d)/pi * exp(-eta_d |beta|^2 / D) / D,
    D = 1 - eta_d (1 - s) / 2,

and the click element is W_on = 1/pi - W_off.  Per mode the two sum to
exactly 1/pi, so pi * W_on is a click probability.  W_on is nonnegative
everywhere iff s >= s_bar = 1 - 2 p_d / eta_d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDetectorError,
    DimensionError,
    NegativityError,
    SingularOrderingError,
)
from .rng import RngStream
from .states import ORDERING_TOL


@dataclass(frozen=True)
class DetectorModel:
    """Binary detector with efficiency eta_d and random-count probability p_d."""

    eta_d: float
    p_d: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta_d <= 1.0:
            raise ValueError(f"eta_d must be in [0, 1], got {self.eta_d}")
        if not 0.0 <= self.p_d <= 1.0:
            raise ValueError(f"p_d must be in [0, 1], got {self.p_d}")


def _denominator(s: float, det: DetectorModel) -> float:
    d = 1.0 - det.eta_d * (1.0 - s) / 2.0
    if d <= 0.0:
        raise SingularOrderingError(
            f"detector PQD is singular at ordering s={s:g} for eta_d={det.eta_d:g} "
            f"(requires s > {1.0 - 2.0 / det.eta_d if det.eta_d else -math.inf:g})"
        )
    return d


def pqd_off(beta: complex, s: float, det: DetectorModel) -> float:
    """PQD of the no-click POVM element at output ordering s."""
    d = _denominator(s, det)
    return (1.0 - det.p_d) / math.pi * math.exp(-det.eta_d * abs(beta) ** 2 / d) / d


def pqd_on(beta: complex, s: float, det: DetectorModel) -> float:
    """PQD of the click POVM element; equals 1/pi - pqd_off by completeness."""
    return 1.0 / math.pi - pqd_off(beta, s, det)


def s_bar(det: DetectorModel) -> float:
    """Smallest output ordering with a nonnegative click-element PQD."""
    if det.eta_d == 0.0:
        raise DegenerateDetectorError(
            "eta_d = 0: the detector ignores light and every ordering is admissible"
        )
    return 1.0 - 2.0 * det.p_d / det.eta_d


def click_probabilities(beta, s, dets) -> np.ndarray:
    """Per-mode click probabilities pi * W_on(beta_k) at orderings s_k.

    ``beta`` may be a vector (M,) or a batch (n, M); the result has the same
    shape.  This is the vectorized kernel behind :func:`sample_outcome`.
    """
    beta = np.asarray(beta, dtype=complex)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    dets = list(dets)
    modes = beta.shape[-1]
    if s.size != modes or len(dets) != modes:
        raise DimensionError("beta, s, and detectors must agree on the mode count")
    eta = np.array([d.eta_d for d in dets])
    p_d = np.array([d.p_d for d in dets])
    denom = 1.0 - eta * (1.0 - s) / 2.0
    if np.any(denom <= 0.0):
        k = int(np.argmax(denom <= 0.0))
        raise SingularOrderingError(
            f"detector PQD is singular at ordering s={s[k]:g} on mode {k}"
        )
    return 1.0 - (1.0 - p_d) * np.exp(-eta * np.abs(beta) ** 2 / denom) / denom


def sample_outcome(
    beta,
    s,
    dets,
    rng: RngStream,
    size: int | None = None,
) -> np.ndarray:
    """Sample click/no-click outcomes from the measurement PQDs.

    Each mode clicks independently with probability pi * W_on(beta_k), which
    is a proper probability because the two outcome PQDs sum to 1/pi per
    mode.  Requires s_k >= s_bar of the detector on every mode.  Returns a
    uint8 vector of length M, or (size, M) when ``size`` is given (``beta``
    may then be a matching batch).
    """
    beta = np.asarray(beta, dtype=complex)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    dets = list(dets)
    for k, det in enumerate(dets):
        if det.eta_d > 0.0 and s[k] < s_bar(det) - ORDERING_TOL:
            raise NegativityError(
                f"ordering s={s[k]:g} on mode {k} is below the detector bound "
                f"s_bar={s_bar(det):g}; the click PQD would be negative"
            )
    probs = click_probabilities(beta, s, dets)
    gen = rng.generator()
    n = 1 if size is None else int(size)
    u = gen.random((n, len(dets)))
    bits = (u < np.broadcast_to(probs, (n, len(dets)))).astype(np.uint8)
    return bits[0] if size is None else bits
