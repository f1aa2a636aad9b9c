"""Mapping model Hamiltonians onto hardware-compatible SES Hamiltonians.

A model Hamiltonian H (any energy scale) is brought within the coupler range
[-g_max, g_max] by a gauge shift c (mean of the diagonal, a pure global
phase) and a positive scale factor lambda:

    H_qc = (H - c I) / lambda,     t_qc = integral_0^t lambda(t') dt'.

lambda is the smallest positive scale that fits the hardware bound, so at
every instant at least one matrix element sits exactly at g_max.  Occupation
probabilities are invariant under the combined energy/time rescaling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .core import TimeDependentHamiltonian, _as_square_sym


def _gauge_scale(h, g_max):
    """Mean-diagonal shift and minimal scale for one matrix sample."""
    c = float(np.mean(np.diag(h)))
    b = h - c * np.eye(h.shape[0])
    top = float(np.max(np.abs(b)))
    if top == 0.0:
        return c, 1.0, b  # pure gauge: free evolution
    return c, top / g_max, b


@dataclass(frozen=True)
class StaticRescale:
    """Rescaled Hamiltonian with its scale and gauge shift.

    Simulated time runs faster or slower than model time by the constant
    factor lam: t_qc = lam * t.
    """

    h: np.ndarray
    lam: float
    c: float
    g_max: float

    def t_qc(self, t):
        return self.lam * np.asarray(t, dtype=float)


def rescale_static(h, g_max):
    """Rescale a constant model Hamiltonian to fit within +-g_max."""
    h = _as_square_sym(h, "h")
    if g_max <= 0.0:
        raise ValueError("g_max must be positive")
    c, lam, b = _gauge_scale(h, g_max)
    return StaticRescale(h=b / lam, lam=lam, c=c, g_max=g_max)


@dataclass(frozen=True)
class RescalePlan:
    """Time-dependent rescaling: sampled scale, shift, and time map.

    lambda_of_t and c_of_t are sampled on the physical grid t_grid;
    time_map holds t_qc at those samples; scaled is the rescaled
    Hamiltonian resampled on a uniform simulated-time grid.
    """

    t_grid: np.ndarray
    lambda_of_t: np.ndarray
    c_of_t: np.ndarray
    time_map: np.ndarray
    scaled: TimeDependentHamiltonian
    g_max: float

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        lam = np.asarray(self.lambda_of_t, dtype=float)
        c = np.asarray(self.c_of_t, dtype=float)
        tm = np.asarray(self.time_map, dtype=float)
        if not (t.size == lam.size == c.size == tm.size):
            raise ValueError("sampled fields must share one grid")
        if np.any(lam <= 0.0):
            raise ValueError("lambda(t) must be positive everywhere")
        if tm[0] != 0.0 or np.any(np.diff(tm) <= 0.0):
            raise ValueError("time map must start at 0 and increase strictly")
        tol = 1e-9 * self.g_max
        for m in self.scaled.matrices:
            top = float(np.max(np.abs(m)))
            if top > self.g_max + tol:
                raise ValueError("scaled Hamiltonian exceeds the coupler bound")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "lambda_of_t", lam)
        object.__setattr__(self, "c_of_t", c)
        object.__setattr__(self, "time_map", tm)

    @property
    def compressed(self):
        """Per-sample flag: True where simulated time runs faster (lam > 1)."""
        return self.lambda_of_t > 1.0

    @property
    def total_t_qc(self):
        return float(self.time_map[-1])


def rescale_td(h_of_t, g_max, max_lambda_step=0.10):
    """Build a time-dependent rescaling plan from a sampled Hamiltonian.

    The scale lambda(t) and shift c(t) are computed per input sample;
    simulated time follows by trapezoidal integration.  The scaled
    Hamiltonian is then resampled on a uniform simulated-time grid, with
    the gauge and scale recomputed at every resampled point so the bound
    is tight everywhere.  Refuses input grids on which lambda jumps by
    more than max_lambda_step between neighbours.
    """
    if not isinstance(h_of_t, TimeDependentHamiltonian):
        raise TypeError("expected a sampled TimeDependentHamiltonian")
    if g_max <= 0.0:
        raise ValueError("g_max must be positive")
    t = h_of_t.t_grid
    lam = np.empty(t.size)
    c = np.empty(t.size)
    for i, m in enumerate(h_of_t.matrices):
        c[i], lam[i], _ = _gauge_scale(m, g_max)
    ratio = np.maximum(lam[1:], lam[:-1]) / np.minimum(lam[1:], lam[:-1])
    worst = int(np.argmax(ratio))
    if ratio[worst] - 1.0 >= max_lambda_step:
        raise ValueError(
            f"lambda changes by {100 * (ratio[worst] - 1):.1f}% between "
            f"t = {t[worst]:.6g} and t = {t[worst + 1]:.6g}; refine the "
            "sampling grid there before rescaling")
    t_qc = cumulative_trapezoid(lam, t, initial=0.0)

    tau = np.linspace(0.0, t_qc[-1], t.size)
    scaled = np.empty((tau.size,) + h_of_t.matrices.shape[1:])
    for k, tk in enumerate(np.interp(tau, t_qc, t)):
        m = h_of_t(tk)
        _, lk, b = _gauge_scale(m, g_max)
        scaled[k] = b / lk
    return RescalePlan(
        t_grid=t, lambda_of_t=lam, c_of_t=c, time_map=t_qc,
        scaled=TimeDependentHamiltonian(tau, scaled), g_max=g_max)


@dataclass(frozen=True)
class TimeMapInverse:
    """Piecewise-linear inverse t(t_qc) of a plan's time map."""

    t_qc_grid: np.ndarray
    t_samples: np.ndarray

    def __call__(self, t_qc):
        return np.interp(t_qc, self.t_qc_grid, self.t_samples)


def invert_time_map(plan):
    """Return the monotone interpolated inverse of plan.time_map."""
    return TimeMapInverse(t_qc_grid=plan.time_map.copy(), t_samples=plan.t_grid.copy())


def plan_to_json(plan, path=None):
    """Serialize a plan to JSON (grids plus matrices)."""
    doc = {
        "g_max": plan.g_max,
        "t_grid": plan.t_grid.tolist(),
        "lambda": plan.lambda_of_t.tolist(),
        "c": plan.c_of_t.tolist(),
        "time_map": plan.time_map.tolist(),
        "scaled": {
            "t_grid": plan.scaled.t_grid.tolist(),
            "matrices": plan.scaled.matrices.tolist(),
        },
    }
    text = json.dumps(doc, indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def plan_from_json(text):
    """Rebuild a plan from its JSON form."""
    doc = json.loads(text)
    scaled = TimeDependentHamiltonian(
        np.asarray(doc["scaled"]["t_grid"], dtype=float),
        np.asarray(doc["scaled"]["matrices"], dtype=float))
    return RescalePlan(
        t_grid=np.asarray(doc["t_grid"], dtype=float),
        lambda_of_t=np.asarray(doc["lambda"], dtype=float),
        c_of_t=np.asarray(doc["c"], dtype=float),
        time_map=np.asarray(doc["time_map"], dtype=float),
        scaled=scaled,
        g_max=float(doc["g_max"]),
    )
