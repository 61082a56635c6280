"""Sampling a heralded (randomized) photonic experiment built from SPDC
pairs, using the output-state route.

Each down-conversion source feeds a herald mode (kept out of the network)
and a signal mode (sent through it).  Because the joint state is Gaussian,
the exact output distribution over phase space is available in closed form,
so sampling reduces to drawing from one multivariate normal per shot and
flipping per-mode detector coins.  The script sweeps the random-count
probability across the simulability threshold and then inspects the
herald-signal correlations that make the scheme useful.
"""

from pqsim import RngStream
from pqsim.errors import SimulabilityError
from pqsim.presets import ScenarioParams, spdc_config, threshold_row
from pqsim.sampler import empirical_stats, run_condition1

params = ScenarioParams()
pairs = 10

row = threshold_row("spdc", pairs, params)
print(f"{pairs} SPDC pairs on a {pairs}-mode signal network")
print(f"operating point: sinh^2 r = {row.sinh2_r:.2f} "
      f"(mean {row.n_photons} photons), network loss eta_l = {row.eta_l:.2f}")
print(f"simulability threshold: p_d >= {row.p_d_threshold:.3f}")
print()

print("sweeping the random-count probability across the threshold:")
for p_d in (0.05, 0.07, row.p_d_threshold + 0.005, 0.09):
    config = spdc_config(pairs, row.sinh2_r, p_d, params)
    try:
        run_condition1(config, 1000, RngStream(1))
        verdict = "samples"
    except SimulabilityError:
        verdict = "refuses (output distribution not expressible classically)"
    print(f"  p_d = {p_d:.3f}: {verdict}")
print()

config = spdc_config(pairs, row.sinh2_r, p_d=0.09, params=params)
batch = run_condition1(config, 300_000, RngStream(7))
stats = empirical_stats(batch)
heralds = batch.outcomes[:, :pairs].astype(float)
signals = batch.outcomes[:, pairs:].astype(float)

print(f"herald click rate: {heralds.mean():.4f}, signal click rate: {signals.mean():.4f}")
coincidence = (heralds * signals).mean(axis=0)
uncorrelated = heralds.mean(axis=0) * signals.mean(axis=0)
print(f"mean paired coincidence rate:  {coincidence.mean():.4f}")
print(f"if heralds and signals were independent: {uncorrelated.mean():.4f}")
print("heralding works because each detected herald photon implies a")
print("partner photon headed into the network")
