"""Decide whether an experiment can be sampled classically by the
phase-space method, and compute the closed-form random-count thresholds for
the uniform-loss single-photon and SPDC scenarios.

The decision rests on one matrix: with t_bar the largest nonnegative input
orderings and s_bar the smallest nonnegative output orderings,

    Sigma_bar = I - L^dag L - diag(s_bar) + L^dag diag(t_bar) L

must be positive semidefinite.  When it is, running the sampler at exactly
(s_bar, t_bar) is valid, and no interior ordering choice does better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detectors import s_bar as detector_s_bar
from .errors import UndefinedOperatingPointError
from .experiment import SCHEME_SINGLE_PHOTON, SCHEME_SPDC, ExperimentConfig
from .linalg import PSD_TOL
from .processes import sigma_matrix
from .states import SpdcPair, t_bar


def t_bar_vector(config: ExperimentConfig) -> np.ndarray:
    """Per-mode input nonnegativity bounds t_bar."""
    out = np.empty(config.modes)
    for entry in config.sources:
        bound = t_bar(entry.source)
        for port in entry.ports:
            out[port] = bound
    return out


def s_bar_vector(config: ExperimentConfig) -> np.ndarray:
    """Per-mode output nonnegativity bounds s_bar.

    A dead detector (eta_d = 0) has a flat, everywhere-nonnegative PQD at
    every ordering; -1 is always a sufficient stand-in for its bound.
    """
    out = np.empty(config.modes)
    for k, det in enumerate(config.detectors):
        out[k] = -1.0 if det.eta_d == 0.0 else detector_s_bar(det)
    return out


@dataclass(frozen=True)
class SimulabilityReport:
    """Outcome of the positivity test, plus the working orderings when it
    passes and the scalar random-count threshold when one is well defined."""

    t_bar: np.ndarray
    s_bar: np.ndarray
    sigma_eigenvalues: np.ndarray
    simulatable: bool
    ordering_s: np.ndarray | None = None
    ordering_t: np.ndarray | None = None
    threshold_p_d: float = math.nan
    margin: float = math.nan
    threshold_note: str = ""

    def to_dict(self) -> dict:
        return {
            "simulatable": bool(self.simulatable),
            "t_bar": self.t_bar.tolist(),
            "s_bar": self.s_bar.tolist(),
            "sigma_eigenvalues": self.sigma_eigenvalues.tolist(),
            "ordering_s": None if self.ordering_s is None else self.ordering_s.tolist(),
            "ordering_t": None if self.ordering_t is None else self.ordering_t.tolist(),
            "threshold_p_d": None if math.isnan(self.threshold_p_d) else self.threshold_p_d,
            "margin": None if math.isnan(self.margin) else self.margin,
            "threshold_note": self.threshold_note,
        }


def check_second_condition(config: ExperimentConfig) -> SimulabilityReport:
    """Build Sigma_bar at the extreme orderings and test its positivity.

    Always returns a report.  With identical detectors the report also
    carries the exact scalar threshold on the random-count probability,
    p_d >= (eta_d / 2) * lambda_max(L^dag (I - diag(t_bar)) L), which the
    positivity test crosses exactly once as p_d grows.
    """
    tbar = t_bar_vector(config)
    sbar = s_bar_vector(config)
    sigma = sigma_matrix(config.transfer, sbar, tbar)
    eigenvalues = np.linalg.eigvalsh(sigma)
    simulatable = bool(eigenvalues[0] >= -PSD_TOL)

    threshold = math.nan
    margin = math.nan
    note = ""
    det = config.identical_detectors()
    if det is not None and det.eta_d > 0.0:
        lh = config.transfer.conj().T
        needed = (lh * (1.0 - tbar)) @ config.transfer
        lam_max = float(np.linalg.eigvalsh((needed + needed.conj().T) / 2.0)[-1])
        threshold = det.eta_d * lam_max / 2.0
        margin = det.p_d - threshold
        note = "exact for identical detectors: simulatable iff p_d >= threshold"
    else:
        note = "no scalar threshold: detectors are heterogeneous or dead"

    return SimulabilityReport(
        t_bar=tbar,
        s_bar=sbar,
        sigma_eigenvalues=eigenvalues,
        simulatable=simulatable,
        ordering_s=sbar if simulatable else None,
        ordering_t=tbar if simulatable else None,
        threshold_p_d=threshold,
        margin=margin,
        threshold_note=note,
    )


def threshold_single_photon(mu: float, eta_b: float, eta_l: float, eta_d: float) -> float:
    """Random-count threshold for uniform-loss single-photon experiments:
    simulatable iff p_d >= mu * eta_b * eta_l * eta_d."""
    return mu * eta_b * eta_l * eta_d


def mode_mismatch_pd(
    mu: float,
    eta_b: float,
    eta_l: float,
    eta_d: float,
    f_b: float,
    f_l: float,
    n_photons: float,
    modes: int,
) -> float:
    """Random-count probability contributed by mode-mismatched photons.

    Of the photons lost at input coupling, a fraction f_b still reaches the
    detectors; of those lost inside the network, a fraction f_l does.  Spread
    over M detectors and counted with efficiency eta_d:

        p_d = (eta_d mu N / M) [f_l (1 - eta_l) eta_b + f_b (1 - eta_b)]
    """
    per_source = f_l * (1.0 - eta_l) * eta_b + f_b * (1.0 - eta_b)
    return eta_d * mu * (n_photons / modes) * per_source


def threshold_spdc(r: float, eta_b: float, eta_l: float, eta_d: float) -> float:
    """Random-count threshold for the SPDC scheme, eta_d (1 - t_bar) / 2
    with t_bar the pair's nonnegativity bound at transmissivity eta_b*eta_l."""
    return eta_d * (1.0 - t_bar(SpdcPair(r=r, eta_bl=eta_b * eta_l))) / 2.0


@dataclass(frozen=True)
class OperatingPoint:
    """Photon budget keeping the expected count number near sqrt(M)."""

    sqrt_m_over_eta: float
    n_photons: int
    sinh2_r: float | None = None


def plan_photon_number(scheme: str, modes: int, eta: float) -> OperatingPoint:
    """Operating-point rule N = min(M, sqrt(M)/eta).

    ``eta`` is the overall per-photon transmissivity (source to click).  For
    the SPDC scheme the same rule is expressed through the squeezing,
    sinh^2 r = min(1, 1/(sqrt(M) eta)), and N = M sinh^2 r.
    """
    if modes < 1:
        raise UndefinedOperatingPointError(f"modes must be >= 1, got {modes}")
    if eta <= 0.0:
        raise UndefinedOperatingPointError(
            "overall transmissivity eta = 0: no photon budget keeps sqrt(M) counts"
        )
    raw = math.sqrt(modes) / eta
    n = min(modes, round(raw))
    if scheme == SCHEME_SPDC:
        return OperatingPoint(raw, n, sinh2_r=min(1.0, 1.0 / (math.sqrt(modes) * eta)))
    if scheme == SCHEME_SINGLE_PHOTON:
        return OperatingPoint(raw, n)
    raise UndefinedOperatingPointError(f"unknown scheme {scheme!r}")
