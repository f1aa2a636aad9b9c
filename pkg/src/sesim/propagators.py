"""State-vector propagators for SES Hamiltonians.

Four interchangeable kernels compute psi(t) = exp(-i H t) psi(0) for constant
real symmetric H (rad/s, t in seconds):

  Diagonalization  eigendecomposition, exact up to roundoff
  PadeExpm         Pade scaling-and-squaring matrix exponential
  Krylov           Lanczos projection with full reorthogonalization
  RungeKutta       adaptive embedded Runge-Kutta on the Schrodinger equation

Time-dependent problems use RungeKutta directly or TimeSliced (freeze H at
slice midpoints, propagate each slice with an inner constant-H kernel).
Results are never renormalized; the norm drift is reported as a quality
metric in the result.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal, expm

from .core import TimeDependentHamiltonian, _as_square_sym


@dataclass(frozen=True)
class Diagonalization:
    """Eigendecomposition kernel: V exp(-i D t) V^T psi."""


@dataclass(frozen=True)
class PadeExpm:
    """Dense matrix exponential via Pade scaling-and-squaring."""


@dataclass(frozen=True)
class Krylov:
    """Lanczos/Krylov expm action with full reorthogonalization.

    dim is the Krylov subspace dimension per internal step; long evolutions
    are split so the accumulated phase per step stays within the subspace's
    convergence range.
    """

    dim: int = 30


@dataclass(frozen=True)
class RungeKutta:
    """Adaptive embedded Runge-Kutta integrator (default order 5(4))."""

    rtol: float = 1e-9
    atol: float = 1e-12
    method: str = "RK45"


@dataclass(frozen=True)
class TimeSliced:
    """Uniform time slicing with H frozen at each slice midpoint."""

    dt: float
    inner: Diagonalization | PadeExpm | Krylov = field(default_factory=Diagonalization)

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("slice width dt must be positive")
        if isinstance(self.inner, (RungeKutta, TimeSliced)):
            raise ValueError("TimeSliced inner kernel must be a constant-H kernel")


CONST_KINDS = (Diagonalization, PadeExpm, Krylov, RungeKutta)


@dataclass(frozen=True)
class PropagationResult:
    """Final state plus cost/quality counters for one propagation call.

    matvecs counts H-vector products (0 for dense-factorization kernels);
    steps counts internal time steps; norm_error is the absolute drift of the
    state norm (no renormalization is applied).
    """

    state: np.ndarray
    matvecs: int
    steps: int
    wall_time_s: float
    norm_error: float


def expm_pade(a):
    """exp(-i A) for real symmetric A, computed by Pade scaling-and-squaring."""
    a = _as_square_sym(a, "a")
    return expm(-1j * a)


def _finish(state, psi0, matvecs, steps, t_start):
    norm_err = abs(float(np.linalg.norm(state)) - float(np.linalg.norm(psi0)))
    return PropagationResult(
        state=state,
        matvecs=matvecs,
        steps=steps,
        wall_time_s=time.perf_counter() - t_start,
        norm_error=norm_err,
    )


def _diag_apply(h, psi, t):
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ (v.conj().T @ psi)


def _lanczos_step(h, psi, t, dim, breakdown_tol):
    """One Krylov step: psi -> exp(-i h t) psi projected on K_dim(h, psi)."""
    nrm = float(np.linalg.norm(psi))
    if nrm == 0.0:
        return psi, 0
    n = h.shape[0]
    m = min(dim, n)
    basis = np.zeros((m, n), dtype=complex)
    alphas = np.zeros(m)
    betas = np.zeros(max(m - 1, 0))
    basis[0] = psi / nrm
    matvecs = 0
    m_eff = m
    for j in range(m):
        w = h @ basis[j]
        matvecs += 1
        alphas[j] = float(np.real(np.vdot(basis[j], w)))
        w = w - alphas[j] * basis[j]
        if j > 0:
            w = w - betas[j - 1] * basis[j - 1]
        # full reorthogonalization against all previous vectors
        w = w - basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
        if j == m - 1:
            break
        b = float(np.linalg.norm(w))
        if b <= breakdown_tol:
            m_eff = j + 1  # invariant subspace found: small problem is exact
            break
        betas[j] = b
        basis[j + 1] = w / b
    ew, ev = eigh_tridiagonal(alphas[:m_eff], betas[: m_eff - 1])
    y = ev @ (np.exp(-1j * ew * t) * ev[0, :])
    return nrm * (basis[:m_eff].T @ y), matvecs


def _gershgorin_radius(h):
    return float(np.max(np.sum(np.abs(h), axis=1))) if h.size else 0.0


def _krylov_apply(h, psi, t, kind):
    radius = _gershgorin_radius(h)
    breakdown_tol = 1e-10 * max(radius, 1.0)
    # keep |spectral radius| * dt within the subspace's superlinear regime
    phase_budget = max(kind.dim / 3.0, 1.0)
    nsteps = max(1, int(math.ceil(radius * abs(t) / phase_budget)))
    dt = t / nsteps
    state = psi
    matvecs = 0
    for _ in range(nsteps):
        state, mv = _lanczos_step(h, state, dt, kind.dim, breakdown_tol)
        matvecs += mv
    return state, matvecs, nsteps


def _rk_integrate(rhs, t_span, psi, kind):
    sol = solve_ivp(
        rhs,
        t_span,
        np.asarray(psi, dtype=complex),
        method=kind.method,
        rtol=kind.rtol,
        atol=kind.atol,
    )
    if not sol.success:
        raise RuntimeError(f"Runge-Kutta integration failed: {sol.message}")
    return sol.y[:, -1], sol.nfev, max(sol.t.size - 1, 0)


def propagate_const(h, psi, t, kind=Diagonalization()):
    """Propagate psi under constant H for time t with the chosen kernel."""
    if isinstance(kind, TimeSliced):
        raise ValueError("TimeSliced applies to time-dependent Hamiltonians only")
    if not isinstance(kind, CONST_KINDS):
        raise ValueError(f"unknown propagator kind {kind!r}")
    h = _as_square_sym(h, "h")
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (h.shape[0],):
        raise ValueError("state dimension does not match Hamiltonian")
    t_start = time.perf_counter()
    if isinstance(kind, Diagonalization):
        state, matvecs, steps = _diag_apply(h, psi, t), 0, 1
    elif isinstance(kind, PadeExpm):
        state, matvecs, steps = expm(-1j * h * t) @ psi, 0, 1
    elif isinstance(kind, Krylov):
        state, matvecs, steps = _krylov_apply(h, psi, t, kind)
    else:
        state, matvecs, steps = _rk_integrate(lambda _, y: -1j * (h @ y), (0.0, t), psi, kind)
    return _finish(state, psi, matvecs, steps, t_start)


def propagate_td(h_of_t, psi, t0=None, t1=None, kind=RungeKutta()):
    """Propagate psi under time-dependent H(t) from t0 to t1.

    h_of_t is a TimeDependentHamiltonian (t0/t1 default to its grid ends) or
    any callable t -> matrix, in which case t0 and t1 are required.
    kind must be RungeKutta or TimeSliced.
    """
    if isinstance(h_of_t, TimeDependentHamiltonian):
        t0 = h_of_t.t0 if t0 is None else t0
        t1 = h_of_t.t1 if t1 is None else t1
    elif t0 is None or t1 is None:
        raise ValueError("callable h_of_t requires explicit t0 and t1")
    if not isinstance(kind, (RungeKutta, TimeSliced)):
        raise ValueError("time-dependent propagation needs RungeKutta or TimeSliced")
    psi = np.asarray(psi, dtype=complex)
    t_start = time.perf_counter()
    if isinstance(kind, RungeKutta):
        nfev = 0

        def rhs(t, y):
            nonlocal nfev
            nfev += 1
            return -1j * (h_of_t(t) @ y)

        state, _, steps = _rk_integrate(rhs, (t0, t1), psi, kind)
        # every RHS evaluation contains exactly one H(t) @ y product
        return _finish(state, psi, nfev, steps, t_start)

    nslices = max(1, round((t1 - t0) / kind.dt))
    width = (t1 - t0) / nslices
    state = psi
    matvecs = 0
    for j in range(nslices):
        mid = t0 + (j + 0.5) * width
        h_mid = h_of_t(mid)
        if isinstance(kind.inner, Krylov):
            state, mv, _ = _krylov_apply(h_mid, state, width, kind.inner)
            matvecs += mv
        elif isinstance(kind.inner, PadeExpm):
            state = expm(-1j * h_mid * width) @ state
        else:
            state = _diag_apply(h_mid, state, width)
    return _finish(state, psi, matvecs, nslices, t_start)
