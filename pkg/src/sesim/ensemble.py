"""Random SES Hamiltonian ensemble and its spectral statistics.

The "typical" SES workload is H = g_max * K where the dimensionless K is real
symmetric with diagonal and upper-triangle entries drawn i.i.d. from
uniform(-1, 1), so sigma_K = 1/sqrt(3).  For this ensemble the eigenvalue
bandwidth approaches the Wigner semicircle value (4/sqrt(3)) sqrt(n) and the
mean level spacing (4/sqrt(3)) / sqrt(n), both in units of g_max.

Trials use RNG streams derived from (seed, trial_index), so results do not
depend on execution order and are reproducible per trial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIGMA_K = 1.0 / math.sqrt(3.0)


def trial_rng(seed, trial):
    """Independent per-trial generator keyed by (seed, trial index)."""
    return np.random.default_rng((int(seed), int(trial)))


def sample_k(n, rng):
    """Draw one dimensionless K: symmetric, entries i.i.d. uniform(-1, 1)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    a = rng.uniform(-1.0, 1.0, size=(n, n))
    return np.triu(a) + np.triu(a, 1).T


@dataclass(frozen=True)
class SpectralSummary:
    """Ensemble means (units of g_max) with standard errors of the mean."""

    n: int
    trials: int
    mean_bandwidth: float
    se_bandwidth: float
    mean_spacing: float
    se_spacing: float


def spectral_stats(n, trials, seed):
    """Bandwidth and mean level spacing of the random ensemble at dimension n.

    Per trial the bandwidth is lambda_max - lambda_min and the mean spacing
    is the average of consecutive eigenvalue gaps, i.e. bandwidth / (n - 1).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if n < 2:
        raise ValueError("spectral statistics need n >= 2")
    bw = np.empty(trials)
    for trial in range(trials):
        k = sample_k(n, trial_rng(seed, trial))
        ev = np.linalg.eigvalsh(k)
        bw[trial] = ev[-1] - ev[0]
    sp = bw / (n - 1)
    se_bw = float(bw.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return SpectralSummary(
        n=n,
        trials=trials,
        mean_bandwidth=float(bw.mean()),
        se_bandwidth=se_bw,
        mean_spacing=float(sp.mean()),
        se_spacing=se_bw / (n - 1),
    )


def bandwidth_stats(n, trials, seed):
    """Mean eigenvalue bandwidth, see spectral_stats."""
    return spectral_stats(n, trials, seed)


def level_spacing_stats(n, trials, seed):
    """Mean level spacing, see spectral_stats."""
    return spectral_stats(n, trials, seed)


def wigner_bandwidth(n):
    """Large-n semicircle bandwidth 4 sigma_K sqrt(n) = (4/sqrt(3)) sqrt(n)."""
    return 4.0 * SIGMA_K * math.sqrt(n)


def wigner_spacing(n):
    """Large-n mean spacing (4/sqrt(3)) / sqrt(n)."""
    return 4.0 * SIGMA_K / math.sqrt(n)


def fit_power_law(x, y):
    """Least-squares fit y = a * x^b in log-log space; returns (a, b)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need matching x/y with at least two points")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("power-law fit needs positive data")
    b, log_a = np.polyfit(np.log(x), np.log(y), 1)
    return float(np.exp(log_a)), float(b)
