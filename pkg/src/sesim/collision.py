"""Semiclassical atomic-collision application.

Diabatic potential/coupling tables U(R) (atomic units) combine with a
straight-line trajectory R(t) = sqrt(b^2 + v0^2 (t - t0)^2) to form a
time-dependent scattering Hamiltonian over a small set of channels:

    H_ii = U_ii(R) + (mu/2) (b v0 / R)^2          (centrifugal shift)
    H_ij = (b v0 / R^2) U_ij(R)                   (rotational couplings)
    H_ij = U_ij(R)                                (radial couplings)

Runs integrate the channel amplitudes either directly in atomic units
("ideal") or through the hardware rescaler on the simulated clock.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import physical_constants
from scipy.integrate import solve_ivp

from .core import TimeDependentHamiltonian, basis_state
from .rescaler import rescale_td

ATOMIC_TIME_S = physical_constants["atomic unit of time"][0]
HARTREE_J = physical_constants["atomic unit of energy"][0]
HARTREE_EV = physical_constants["Hartree energy in eV"][0]
HARTREE_RAD_S = 1.0 / ATOMIC_TIME_S


@dataclass(frozen=True)
class PotentialCurveTable:
    """Sampled diabatic potential-coupling matrices on an R grid (a.u.)."""

    r_grid: np.ndarray
    u: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        r = np.asarray(self.r_grid, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if r.ndim != 1 or np.any(np.diff(r) <= 0.0):
            raise ValueError("R grid must be strictly increasing")
        if u.ndim != 3 or u.shape[0] != r.size or u.shape[1] != u.shape[2]:
            raise ValueError("need one m x m matrix per R grid point")
        if u.shape[1] < 2:
            raise ValueError("need at least two channels")
        if not np.allclose(u, np.swapaxes(u, 1, 2), atol=1e-12):
            raise ValueError("potential matrices must be symmetric")
        labels = self.labels or tuple(f"channel {i + 1}" for i in range(u.shape[1]))
        if len(labels) != u.shape[1]:
            raise ValueError("one label per channel")
        object.__setattr__(self, "r_grid", r)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def m(self):
        return self.u.shape[1]

    def __call__(self, r):
        """Interpolated U(R); clamps to the asymptote above the grid.

        Queries below the inner grid edge are rejected: the repulsive wall
        is not safely extrapolable.
        """
        r = float(r)
        if r < self.r_grid[0]:
            raise ValueError(
                f"R = {r:.4g} below the table minimum {self.r_grid[0]:.4g}")
        if r >= self.r_grid[-1]:
            return self.u[-1].copy()
        i = int(np.searchsorted(self.r_grid, r, side="right")) - 1
        w = (r - self.r_grid[i]) / (self.r_grid[i + 1] - self.r_grid[i])
        return (1.0 - w) * self.u[i] + w * self.u[i + 1]


@dataclass(frozen=True)
class CollisionParams:
    """Impact parameter, velocity, and reduced mass in atomic units."""

    b: float
    v0: float
    mu: float
    t0: float = 0.0
    r_start: float = 50.0

    def __post_init__(self):
        if self.b < 0.0:
            raise ValueError("impact parameter must be >= 0")
        if self.v0 <= 0.0:
            raise ValueError("initial velocity must be positive")
        if self.mu <= 0.0:
            raise ValueError("reduced mass must be positive")
        if self.r_start <= self.b:
            raise ValueError("R_start must exceed the impact parameter")

    @property
    def e_cm(self):
        """Collision energy mu v0^2 / 2 in Hartree."""
        return 0.5 * self.mu * self.v0**2

    @property
    def e_cm_ev(self):
        return self.e_cm * HARTREE_EV


def trajectory_r(t, params):
    """Internuclear separation along the straight-line trajectory."""
    dt = np.asarray(t, dtype=float) - params.t0
    return np.sqrt(params.b**2 + (params.v0 * dt) ** 2)


def _default_rotational(m):
    """Nearest-neighbour couplings rotate; all others are radial."""
    return {(i, i + 1) for i in range(1, m)}


def scattering_hamiltonian(table, params, t, rotational=None, centrifugal=True):
    """Channel Hamiltonian (Hartree) at one instant of the trajectory.

    rotational is a set of 1-based (i, j) pairs whose couplings scale with
    the angular velocity b v0 / R^2; remaining couplings are radial.  For
    the standard 3-channel assignment the rotating pairs are (1,2), (2,3).
    """
    r = float(trajectory_r(t, params))
    u = table(r)
    m = table.m
    pairs = _default_rotational(m) if rotational is None else {
        (min(i, j), max(i, j)) for i, j in rotational}
    h = np.diag(np.diag(u)).astype(float)
    if centrifugal:
        h += 0.5 * params.mu * (params.b * params.v0 / r) ** 2 * np.eye(m)
    omega = params.b * params.v0 / r**2
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            factor = omega if (i, j) in pairs else 1.0
            h[i - 1, j - 1] = h[j - 1, i - 1] = factor * u[i - 1, j - 1]
    return h


# --- table I/O -----------------------------------------------------------------

def _header_columns(m):
    return ["R"] + [f"U{i}{j}" for i in range(1, m + 1) for j in range(i, m + 1)]


def save_potential_table(table, path):
    """Write a table as CSV: header R,U11,...,Umm then one row per R."""
    cols = _header_columns(table.m)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for k, r in enumerate(table.r_grid):
            row = [np.format_float_scientific(r, unique=True)]
            for i in range(table.m):
                for j in range(i, table.m):
                    row.append(np.format_float_scientific(table.u[k, i, j], unique=True))
            writer.writerow(row)


def load_potential_table(path, labels=()):
    """Read a potential-coupling CSV (values in atomic units, # comments)."""
    if hasattr(path, "read"):
        lines = path.read().splitlines()
    else:
        with open(path) as fh:
            lines = fh.read().splitlines()
    header = None
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        fields = next(csv.reader(io.StringIO(text)))
        fields = [f.strip() for f in fields]
        if header is None:
            header = fields
            continue
        rows.append((lineno, fields))
    if header is None or header[0] != "R":
        raise ValueError("missing header row starting with R")
    n_cols = len(header)
    m = int(round((math.sqrt(8 * (n_cols - 1) + 1) - 1) / 2))
    if m < 2 or header != _header_columns(m):
        raise ValueError(f"header {header} does not match R,U11..U{m}{m} layout")
    r_vals, mats = [], []
    for lineno, fields in rows:
        if len(fields) != n_cols:
            raise ValueError(f"line {lineno}: expected {n_cols} columns, got {len(fields)}")
        try:
            vals = [float(f) for f in fields]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if r_vals and vals[0] <= r_vals[-1]:
            raise ValueError(f"line {lineno}: R values must increase strictly")
        r_vals.append(vals[0])
        u = np.zeros((m, m))
        pos = 1
        for i in range(m):
            for j in range(i, m):
                u[i, j] = u[j, i] = vals[pos]
                pos += 1
        mats.append(u)
    if len(r_vals) < 2:
        raise ValueError("need at least two grid rows")
    return PotentialCurveTable(np.asarray(r_vals), np.asarray(mats), tuple(labels))


def synthetic_table(m=3, r_max=60.0, points=1200):
    """Synthetic channel data: Morse-like diagonals, Gaussian couplings.

    Couplings are centred near the potential wells and vanish (to double
    precision) at large R, so the asymptotic Hamiltonian is diagonal.
    """
    r = np.linspace(0.3, r_max, points)
    u = np.zeros((points, m, m))
    asymptotes = 0.12 * np.arange(m)
    depths = 0.25 / (1.0 + np.arange(m))
    for i in range(m):
        morse = depths[i] * (1.0 - np.exp(-0.7 * (r - 3.5))) ** 2 - depths[i]
        u[:, i, i] = morse + asymptotes[i]
    for i in range(m):
        for j in range(i + 1, m):
            amp = 0.05 / (j - i)
            gauss = amp * np.exp(-((r - 4.0) ** 2) / (2.0 * 1.5**2))
            u[:, i, j] = u[:, j, i] = gauss
    return PotentialCurveTable(r, u)


# --- end-to-end runs -------------------------------------------------------------

@dataclass(frozen=True)
class CollisionResult:
    """Probability traces over the run plus bookkeeping.

    In ideal mode t_grid is in atomic units of time; in hardware mode it is
    the simulated clock in seconds and plan carries the rescaling.
    """

    t_grid: np.ndarray
    traces: np.ndarray
    finals: np.ndarray
    e_cm: float
    e_cm_ev: float
    plan: object = None
    convergence_delta: float = None


def _integrate_traces(h_of_t, psi0, t_eval, rtol=1e-9, atol=1e-12):
    sol = solve_ivp(lambda tt, y: -1j * (h_of_t(tt) @ y),
                    (t_eval[0], t_eval[-1]), np.asarray(psi0, dtype=complex),
                    t_eval=t_eval, rtol=rtol, atol=atol, method="RK45")
    if not sol.success:
        raise RuntimeError(f"time integration failed: {sol.message}")
    return sol.y.T


def _sample_window(table, params, grid, rotational, centrifugal):
    half = math.sqrt(params.r_start**2 - params.b**2) / params.v0
    t = np.linspace(params.t0 - half, params.t0 + half, grid)
    h = np.stack([scattering_hamiltonian(table, params, tk, rotational, centrifugal)
                  for tk in t])
    return t, h


def run_collision(table, params, g_max=None, grid=4096, rotational=None,
                  centrifugal=True, psi0=None, check_convergence=True):
    """Integrate one trajectory from R_start in, through closest approach, and
    back out to R_start.

    g_max = None runs in model units ("ideal"); a positive g_max (rad/s)
    converts to laboratory units, rescales onto the hardware clock, and
    integrates the scaled Hamiltonian over simulated time.
    """

    def finals_for(npts):
        t_au, h_au = _sample_window(table, params, npts, rotational, centrifugal)
        psi = basis_state(1, table.m) if psi0 is None else np.asarray(psi0, complex)
        if g_max is None:
            tdh = TimeDependentHamiltonian(t_au, h_au)
            amps = _integrate_traces(tdh, psi, t_au)
            return t_au, amps, None
        t_s = (t_au - t_au[0]) * ATOMIC_TIME_S
        tdh = TimeDependentHamiltonian(t_s, h_au * HARTREE_RAD_S)
        plan = rescale_td(tdh, g_max)
        amps = _integrate_traces(plan.scaled, psi, plan.scaled.t_grid)
        return plan.scaled.t_grid, amps, plan

    t_grid, amps, plan = finals_for(grid)
    traces = np.abs(amps) ** 2
    finals = traces[-1]
    delta = None
    if check_convergence:
        _, amps2, _ = finals_for(2 * grid)
        delta = float(np.max(np.abs(np.abs(amps2[-1]) ** 2 - finals)))
        if delta > 1e-5:
            warnings.warn(
                f"grid-doubling changed finals by {delta:.2e}; increase grid",
                stacklevel=2)
    return CollisionResult(
        t_grid=t_grid, traces=traces, finals=finals,
        e_cm=params.e_cm, e_cm_ev=params.e_cm_ev,
        plan=plan, convergence_delta=delta)
