"""Monte Carlo engines that draw detector outcomes from an experiment.

Two routes, mirroring the two positivity conditions:

* :func:`run_condition2` chains input PQD draws, the network's transition
  Gaussian, and the measurement PQDs at the extreme orderings (s_bar, t_bar).
  It works for any source mix that passes the Sigma_bar test.
* :func:`run_condition1` propagates an all-Gaussian input through the
  network exactly and samples the output-state PQD directly; it applies
  whenever the output covariance stays above the s_bar floor, which is a
  weaker requirement than the Sigma_bar test.

Sampling is batched; batch b draws from ``rng.child(b)``, so the outcome
stream depends only on (config, seed), never on the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NotPsdError, SimulabilityError
from .linalg import psd_factor_complex, psd_factor_real, standard_complex_normal
from .experiment import ExperimentConfig
from .processes import propagate_gaussian, sigma_matrix
from .rng import RngStream
from .simulability import check_second_condition, s_bar_vector
from .states import GaussianPQDState, sample_source_pqd, wigner_moments

#: Fixed batch granularity; part of the reproducibility contract.
BATCH_SIZE = 16384

#: Histograms are materialized only up to this many modes (2^M keys).
HISTOGRAM_MODE_LIMIT = 24


@dataclass(frozen=True)
class SampleBatch:
    """Outcome samples plus the provenance needed to reproduce them."""

    outcomes: np.ndarray
    seed: RngStream
    config_hash: str
    counts: dict | None

    def __post_init__(self):
        outcomes = np.asarray(self.outcomes, dtype=np.uint8)
        if outcomes.ndim != 2:
            raise ValueError("outcomes must be a (n_samples, modes) array")
        object.__setattr__(self, "outcomes", outcomes)

    def __len__(self) -> int:
        return self.outcomes.shape[0]

    @property
    def modes(self) -> int:
        return self.outcomes.shape[1]

    def bitstrings(self) -> list[str]:
        return ["".join("1" if b else "0" for b in row) for row in self.outcomes]

    def to_csv_bytes(self) -> bytes:
        body = np.hstack([
            self.outcomes + ord("0"),
            np.full((len(self), 1), ord("\n"), dtype=np.uint8),
        ])
        return body.astype(np.uint8).tobytes()

    def to_jsonl_bytes(self) -> bytes:
        rows = (b'{"n":"' + row.tobytes() + b'"}\n' for row in (self.outcomes + ord("0")))
        return b"".join(rows)

    def write(self, path, fmt: str = "csv") -> None:
        data = self.to_csv_bytes() if fmt == "csv" else self.to_jsonl_bytes()
        with open(path, "wb") as fh:
            fh.write(data)


def _histogram(outcomes: np.ndarray) -> dict:
    m = outcomes.shape[1]
    weights = (1 << np.arange(m - 1, -1, -1)).astype(np.int64)
    codes = outcomes.astype(np.int64) @ weights
    if m <= 20:
        counts = np.bincount(codes, minlength=1 << m)
        indices = np.flatnonzero(counts)
        return {format(i, f"0{m}b"): int(counts[i]) for i in indices}
    uniq, counts = np.unique(codes, return_counts=True)
    return {format(i, f"0{m}b"): int(c) for i, c in zip(uniq, counts)}


def _make_batch(config, outcomes, rng) -> SampleBatch:
    counts = _histogram(outcomes) if config.modes <= HISTOGRAM_MODE_LIMIT else None
    return SampleBatch(
        outcomes=outcomes,
        seed=rng,
        config_hash=config.config_hash(),
        counts=counts,
    )


def _run_batched(draw_batch, modes, n_samples, rng, workers, batch_size):
    """Fill (n_samples, modes) by running ``draw_batch(gen, n)`` per batch.

    Batch boundaries and per-batch streams are fixed by (n_samples,
    batch_size, rng) alone; workers only change scheduling.
    """
    n_samples = int(n_samples)
    if n_samples < 0:
        raise ValueError("n_samples must be nonnegative")
    out = np.empty((n_samples, modes), dtype=np.uint8)
    splits = [
        (b, start, min(start + batch_size, n_samples))
        for b, start in enumerate(range(0, n_samples, batch_size))
    ]

    def run_one(task):
        b, start, stop = task
        gen = rng.child(b).generator()
        out[start:stop] = draw_batch(gen, stop - start)

    if workers <= 1 or len(splits) <= 1:
        for task in splits:
            run_one(task)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_one, splits))
    return out


def _detector_arrays(config, sbar):
    eta = np.array([d.eta_d for d in config.detectors])
    p_d = np.array([d.p_d for d in config.detectors])
    denom = 1.0 - eta * (1.0 - sbar) / 2.0
    if np.any(denom <= 0.0):
        raise SimulabilityError(
            "detector PQD is singular at its own ordering bound (p_d = 1 "
            "with the efficiency-limited ordering); perturb p_d below 1"
        )
    return eta, p_d, denom


def run_condition2(
    config: ExperimentConfig,
    n_samples: int,
    rng: RngStream,
    workers: int = 1,
    batch_size: int = BATCH_SIZE,
) -> SampleBatch:
    """Sample outcomes through input PQDs + transition Gaussian + measurement.

    Refuses with :class:`SimulabilityError` (report attached) unless
    Sigma_bar at the extreme orderings is positive semidefinite; the chain
    then draws unbiased samples from the exact outcome distribution.
    """
    report = check_second_condition(config)
    if not report.simulatable:
        raise SimulabilityError(
            "experiment is not simulatable by the phase-space method: "
            f"min eigenvalue of Sigma_bar is {report.sigma_eigenvalues[0]:.3e}",
            report=report,
        )
    tbar, sbar = report.ordering_t, report.ordering_s
    sigma = sigma_matrix(config.transfer, sbar, tbar)
    noise_factor = psd_factor_complex(sigma / 2.0)
    eta, p_d, denom = _detector_arrays(config, sbar)
    assignments = [
        (entry.source, np.array(entry.ports), tbar[list(entry.ports)])
        for entry in config.sources
    ]
    transfer = config.transfer

    def draw_batch(gen, n):
        alpha = np.empty((n, config.modes), dtype=complex)
        for source, ports, t_block in assignments:
            alpha[:, ports] = sample_source_pqd(source, t_block, gen, n)
        beta = alpha @ transfer + standard_complex_normal(gen, (n, config.modes)) @ noise_factor
        p_click = 1.0 - (1.0 - p_d) * np.exp(-eta * np.abs(beta) ** 2 / denom) / denom
        return (gen.random((n, config.modes)) < p_click).astype(np.uint8)

    outcomes = _run_batched(draw_batch, config.modes, n_samples, rng, workers, batch_size)
    return _make_batch(config, outcomes, rng)


def output_gaussian(config: ExperimentConfig) -> GaussianPQDState:
    """Exact Wigner-ordered Gaussian of the network output for all-Gaussian
    sources; raises :class:`UnsupportedSourceError` otherwise."""
    k = config.modes
    mean = np.zeros(2 * k)
    cov = np.zeros((2 * k, 2 * k))
    for entry in config.sources:
        block_mean, block_cov = wigner_moments(entry.source)
        idx = np.array([2 * p + q for p in entry.ports for q in (0, 1)])
        mean[idx] = block_mean
        cov[np.ix_(idx, idx)] = block_cov
    state = GaussianPQDState(ordering=np.zeros(k), mean=mean, cov=cov)
    return propagate_gaussian(state, config.transfer)


def run_condition1(
    config: ExperimentConfig,
    n_samples: int,
    rng: RngStream,
    workers: int = 1,
    batch_size: int = BATCH_SIZE,
) -> SampleBatch:
    """Sample outcomes by drawing from the output-state PQD directly.

    Requires every source to be Gaussian and the output covariance minus the
    s_bar floor to be positive semidefinite; refuses otherwise.
    """
    out_state = output_gaussian(config)
    sbar = s_bar_vector(config)
    pqd_cov = out_state.cov - np.diag(np.repeat(sbar, 2))
    try:
        factor = psd_factor_real(pqd_cov)
    except NotPsdError as exc:
        raise SimulabilityError(
            "output-state PQD is negative at the detectors' ordering bound: "
            f"{exc}",
            report=check_second_condition(config),
        ) from exc
    eta, p_d, denom = _detector_arrays(config, sbar)
    mean = out_state.mean

    def draw_batch(gen, n):
        quad = mean + gen.standard_normal((n, 2 * config.modes)) @ factor
        beta = (quad[:, 0::2] + 1j * quad[:, 1::2]) / 2.0
        p_click = 1.0 - (1.0 - p_d) * np.exp(-eta * np.abs(beta) ** 2 / denom) / denom
        return (gen.random((n, config.modes)) < p_click).astype(np.uint8)

    outcomes = _run_batched(draw_batch, config.modes, n_samples, rng, workers, batch_size)
    return _make_batch(config, outcomes, rng)


def run_experiment(
    config: ExperimentConfig,
    n_samples: int,
    rng: RngStream,
    condition: int | None = None,
    workers: int = 1,
    batch_size: int = BATCH_SIZE,
) -> SampleBatch:
    """Dispatch to a sampling engine.

    ``condition=None`` picks route 1 for SPDC-scheme experiments (the
    output-state route is never more restrictive there and usually strictly
    less) and route 2 otherwise.
    """
    if condition is None:
        condition = 1 if config.scheme == "spdc" else 2
    if condition == 1:
        return run_condition1(config, n_samples, rng, workers, batch_size)
    if condition == 2:
        return run_condition2(config, n_samples, rng, workers, batch_size)
    raise ValueError(f"condition must be 1 or 2, got {condition!r}")


@dataclass(frozen=True)
class EmpiricalStats:
    """Counting statistics of a sample batch."""

    click_rate: np.ndarray
    mean_total_clicks: float
    histogram: dict


def empirical_stats(batch: SampleBatch) -> EmpiricalStats:
    if len(batch) == 0:
        raise ValueError("cannot summarize an empty sample batch")
    outcomes = batch.outcomes
    counts = batch.counts if batch.counts is not None else _histogram(outcomes)
    return EmpiricalStats(
        click_rate=outcomes.mean(axis=0),
        mean_total_clicks=float(outcomes.sum(axis=1).mean()),
        histogram=counts,
    )
