"""Shared test helpers: independent oracles and the cross-check config suite."""

from __future__ import annotations

import math
from itertools import permutations

import numpy as np

from pqsim import DetectorModel, RngStream
from pqsim.experiment import ExperimentConfig, PortSource
from pqsim.linalg import haar_unitary
from pqsim.states import Coherent, MixedSinglePhoton, SpdcPair, Thermal, Vacuum


def naive_permanent(matrix) -> complex:
    """Leibniz-expansion permanent, O(n! n); the independent reference."""
    a = np.asarray(matrix, dtype=complex)
    n = a.shape[0]
    total = 0.0 + 0.0j
    for perm in permutations(range(n)):
        prod = 1.0 + 0.0j
        for row, col in enumerate(perm):
            prod *= a[row, col]
        total += prod
    return total


def random_contraction(modes: int, seed: int, scale: float = 0.9) -> np.ndarray:
    return scale * haar_unitary(modes, RngStream(seed))


def beamsplitter_50_50() -> np.ndarray:
    return np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def _cfg(modes, sources, transfer, det):
    dets = (det,) * modes if isinstance(det, DetectorModel) else tuple(det)
    return ExperimentConfig(
        modes=modes, sources=tuple(sources), transfer=transfer, detectors=dets
    )


R001 = math.asinh(math.sqrt(0.01))  # sinh^2 r = 0.01


def oracle_suite():
    """Small configs (<= 4 modes, low photon number) whose sampled and exact
    distributions must agree; (name, config, oracle n_max, condition)."""
    suite = []

    suite.append((
        "hom_noisy",
        _cfg(2,
             [PortSource(MixedSinglePhoton(0.5, 0.5), (0,)),
              PortSource(MixedSinglePhoton(0.5, 0.5), (1,))],
             beamsplitter_50_50(),
             DetectorModel(0.9, 0.3)),
        2, 2,
    ))
    suite.append((
        "lossy_single_photon",
        _cfg(3,
             [PortSource(MixedSinglePhoton(0.5, 0.1), (0,)),
              PortSource(Vacuum(), (1,)), PortSource(Vacuum(), (2,))],
             np.sqrt(0.94) * haar_unitary(3, RngStream(11)),
             DetectorModel(0.95, 0.05)),
        2, 2,
    ))
    suite.append((
        "two_photons_m4",
        _cfg(4,
             [PortSource(MixedSinglePhoton(0.6, 0.2), (0,)),
              PortSource(MixedSinglePhoton(0.6, 0.2), (1,)),
              PortSource(Vacuum(), (2,)), PortSource(Vacuum(), (3,))],
             np.sqrt(0.9) * haar_unitary(4, RngStream(5)),
             DetectorModel(0.9, 0.12)),
        2, 2,
    ))
    suite.append((
        "coherent_m3",
        _cfg(3,
             [PortSource(Coherent(0.3), (0,)),
              PortSource(Coherent(0.2j), (1,)), PortSource(Vacuum(), (2,))],
             haar_unitary(3, RngStream(7)),
             DetectorModel(0.8, 0.02)),
        4, 2,
    ))
    suite.append((
        "coherent_lossy_m2",
        _cfg(2,
             [PortSource(Coherent(0.35), (0,)), PortSource(Vacuum(), (1,))],
             random_contraction(2, 3, scale=np.sqrt(0.6)),
             DetectorModel(0.85, 0.04)),
        4, 2,
    ))
    suite.append((
        "thermal_m2",
        _cfg(2,
             [PortSource(Thermal(0.05), (0,)), PortSource(Thermal(0.02), (1,))],
             random_contraction(2, 9, scale=np.sqrt(0.8)),
             DetectorModel(0.9, 0.01)),
        4, 2,
    ))
    suite.append((
        "vacuum_dark_m3",
        _cfg(3,
             [PortSource(Vacuum(), (k,)) for k in range(3)],
             np.eye(3, dtype=complex),
             DetectorModel(0.9, 0.05)),
        1, 2,
    ))
    suite.append((
        "full_loss_m2",
        _cfg(2,
             [PortSource(MixedSinglePhoton(0.5, 0.1), (0,)),
              PortSource(Vacuum(), (1,))],
             np.zeros((2, 2), dtype=complex),
             DetectorModel(0.95, 0.04)),
        2, 2,
    ))
    suite.append((
        "mixed_sources_m3",
        _cfg(3,
             [PortSource(MixedSinglePhoton(0.4, 0.15), (0,)),
              PortSource(Coherent(0.3), (1,)), PortSource(Thermal(0.04), (2,))],
             random_contraction(3, 13, scale=np.sqrt(0.85)),
             DetectorModel(0.9, 0.08)),
        4, 2,
    ))
    suite.append((
        "spdc_pair",
        _cfg(2,
             [PortSource(SpdcPair(R001, 0.9), (0, 1))],
             np.eye(2, dtype=complex),
             DetectorModel(0.9, 0.09)),
        3, 1,
    ))
    suite.append((
        "spdc_pair_lossy_net",
        _cfg(2,
             [PortSource(SpdcPair(R001, 0.9), (0, 1))],
             np.diag([1.0, np.sqrt(0.8)]).astype(complex),
             DetectorModel(0.9, 0.08)),
        3, 1,
    ))
    signals_unitary = np.eye(4, dtype=complex)
    signals_unitary[2:, 2:] = haar_unitary(2, RngStream(21))
    suite.append((
        "spdc_two_pairs",
        _cfg(4,
             [PortSource(SpdcPair(R001, 0.5), (0, 2)),
              PortSource(SpdcPair(R001, 0.5), (1, 3))],
             signals_unitary,
             DetectorModel(0.95, 0.09)),
        3, 1,
    ))
    return suite
