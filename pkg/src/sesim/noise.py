"""Error models: decoherence channels on the SES and control-error estimates.

Amplitude damping empties the single-excitation block toward the qubit
ground state (outside the SES), scaling the whole density matrix by
r = exp(-t/T1).  Pure dephasing scales coherences by r = exp(-2t/Tphi)
while preserving populations.  Control errors from static Hamiltonian
perturbations V are evaluated exactly by Monte Carlo over V (and optionally
over a random Hamiltonian ensemble) and estimated in closed form from the
unperturbed spectrum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import _as_square_sym
from .ensemble import sample_k


@dataclass(frozen=True)
class SesDensity:
    """Density matrix on the SES; trace < 1 records leakage out of it."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        if not np.allclose(rho, rho.conj().T, atol=1e-12):
            raise ValueError("density matrix must be Hermitian")
        w = np.linalg.eigvalsh(rho)
        if w.min() < -1e-10:
            raise ValueError("density matrix must be positive semidefinite")
        if w.sum() > 1.0 + 1e-10:
            raise ValueError("trace must not exceed 1")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_state(cls, psi):
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()))

    @property
    def n(self):
        return self.rho.shape[0]

    @property
    def weight(self):
        """Population retained in the SES."""
        return float(np.real(np.trace(self.rho)))


def damping_map(mat, t, t1):
    """Linear action of the amplitude-damping channel on any matrix."""
    if t < 0.0:
        raise ValueError("t must be >= 0")
    return math.exp(-t / t1) * np.asarray(mat, dtype=complex)


def dephasing_map(mat, t, tphi):
    """Linear action of the pure-dephasing channel on any matrix."""
    if t < 0.0:
        raise ValueError("t must be >= 0")
    mat = np.asarray(mat, dtype=complex)
    r = math.exp(-2.0 * t / tphi)
    return r * mat + (1.0 - r) * np.diag(np.diag(mat))


def amplitude_damping(rho, t, t1):
    """Relaxation channel: the SES block decays uniformly, trace shrinks."""
    return SesDensity(damping_map(rho.rho, t, t1))


def dephasing(rho, t, tphi):
    """Dephasing channel: coherences decay, populations and trace persist."""
    return SesDensity(dephasing_map(rho.rho, t, tphi))


def fidelity_error(rho, psi_ideal):
    """Fidelity loss 1 - <psi|rho|psi> against an ideal pure state."""
    mat = rho.rho if isinstance(rho, SesDensity) else np.asarray(rho, dtype=complex)
    psi = np.asarray(psi_ideal, dtype=complex)
    if psi.size != mat.shape[0]:
        raise ValueError("state and density dimensions differ")
    return float(1.0 - np.real(np.vdot(psi, mat @ psi)))


def damping_error(t, t1):
    """Closed-form fidelity loss of relaxation on any SES pure state."""
    return 1.0 - math.exp(-t / t1)


def dephasing_error(psi, t, tphi):
    """Closed-form dephasing fidelity loss: (1 - r)(1 - sum |a_i|^4)."""
    a4 = float(np.sum(np.abs(np.asarray(psi, dtype=complex)) ** 4))
    return (1.0 - math.exp(-2.0 * t / tphi)) * (1.0 - a4)


def noisy_evolution(h, psi, t, t1=None, tphi=None, slices=100):
    """Trotterized evolution with decoherence interleaved every t/slices.

    Optional mode without a closed-form reference; the end-of-evolution
    channels are the anchored ones.
    """
    h = _as_square_sym(h, "h")
    w, v = np.linalg.eigh(h)
    dt = t / slices
    u = (v * np.exp(-1j * w * dt)) @ v.conj().T
    rho = np.outer(np.asarray(psi, complex), np.asarray(psi, complex).conj())
    for _ in range(slices):
        rho = u @ rho @ u.conj().T
        if t1 is not None:
            rho = damping_map(rho, dt, t1)
        if tphi is not None:
            rho = dephasing_map(rho, dt, tphi)
    return SesDensity(rho)


# --- control errors -------------------------------------------------------------

@dataclass(frozen=True)
class ControlNoiseSpec:
    """Static control-error strength: element distribution full width (rad/s)."""

    delta_v: float

    def __post_init__(self):
        if self.delta_v < 0.0:
            raise ValueError("delta_v must be >= 0")

    @property
    def sigma(self):
        return self.delta_v / math.sqrt(12.0)


def sample_perturbation(n, delta_v, rng):
    """Symmetric matrix with i.i.d. uniform(-delta_v/2, delta_v/2) elements."""
    v = np.zeros((n, n))
    iu = np.triu_indices(n)
    v[iu] = rng.uniform(-0.5 * delta_v, 0.5 * delta_v, size=len(iu[0]))
    return v + np.triu(v, 1).T


def _basis_averaged_error(h, v, t):
    """Exact Eq-of-motion error 1 - (1/n) sum_i |(i|e^{iHt} e^{-i(H+V)t}|i)|^2."""
    w0, u0 = np.linalg.eigh(h)
    w1, u1 = np.linalg.eigh(h + v)
    a = (u0 * np.exp(1j * w0 * t)) @ u0.conj().T
    b = (u1 * np.exp(-1j * w1 * t)) @ u1.conj().T
    amps = np.einsum("ik,ki->i", a, b)
    return float(1.0 - np.mean(np.abs(amps) ** 2))


@dataclass(frozen=True)
class McErrorResult:
    """Monte Carlo mean control error with its standard error."""

    mean: float
    se: float
    trials: int
    n: int


def control_error_mc(h, noise, t, trials, rng, ensemble="fixed-h",
                     g_max=None, n=None):
    """Average the exact control error over random perturbations.

    ensemble="fixed-h" perturbs the given Hamiltonian; "random-h" also
    redraws a standard-form random Hamiltonian g_max * K each trial (h may
    then be None, with n and g_max supplied).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if ensemble not in ("fixed-h", "random-h"):
        raise ValueError(f"unknown ensemble {ensemble!r}")
    if ensemble == "fixed-h":
        h = _as_square_sym(h, "h")
        n = h.shape[0]
    else:
        if n is None or g_max is None:
            raise ValueError("random-h mode needs n and g_max")
    errs = np.empty(trials)
    for k in range(trials):
        if ensemble == "random-h":
            h = g_max * sample_k(n, rng)
        v = sample_perturbation(n, noise.delta_v, rng)
        errs[k] = _basis_averaged_error(h, v, t)
    se = float(errs.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return McErrorResult(mean=float(errs.mean()), se=se, trials=trials, n=n)


def control_error_perturbative(h, sigma, t):
    """Spectral estimate 2 s^2 t^2 + (2 s^2/n) sum_{a!=a'} (1-cos(dE t))/dE^2.

    Valid below t_max = 1/(sqrt(2) sigma); warns beyond.  Degenerate pairs
    contribute their removable-singularity limit t^2/2.
    """
    h = _as_square_sym(h, "h")
    n = h.shape[0]
    if sigma < 0.0:
        raise ValueError("sigma must be >= 0")
    if sigma > 0.0 and t > 1.0 / (math.sqrt(2.0) * sigma):
        warnings.warn("t exceeds the perturbative validity bound 1/(sqrt(2) sigma)",
                      stacklevel=2)
    w = np.linalg.eigvalsh(h)
    d = w[:, None] - w[None, :]
    off = ~np.eye(n, dtype=bool)
    dd = d[off]
    small = np.abs(dd) * abs(t) < 1e-6
    terms = np.empty(dd.size)
    terms[small] = 0.5 * t * t
    big = dd[~small]
    terms[~small] = (1.0 - np.cos(big * t)) / big**2
    return float(2.0 * sigma**2 * t**2 + (2.0 * sigma**2 / n) * terms.sum())


def control_error_scan(n_list, g_max, t, delta_v, trials, seed):
    """Random-H control-error sweep over n with a power-law fit.

    Returns (means, ses, (a, b)) with means ~ a * n^b; each n uses an
    independent seeded stream.
    """
    from .ensemble import fit_power_law

    noise = ControlNoiseSpec(delta_v)
    means = np.empty(len(n_list))
    ses = np.empty(len(n_list))
    for i, n in enumerate(n_list):
        rng = np.random.default_rng((int(seed), int(n)))
        res = control_error_mc(None, noise, t, trials, rng,
                               ensemble="random-h", g_max=g_max, n=int(n))
        means[i], ses[i] = res.mean, res.se
    a, b = fit_power_law(np.asarray(n_list, dtype=float), means)
    return means, ses, (a, b)
