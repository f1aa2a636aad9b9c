"""Brute-force full-Hilbert-space oracle for desk-scale validation.

Builds the exact 2^n-dimensional qubit-array Hamiltonian

    H_qc = sum_i eps_i c_i^dag c_i
         + sum_{i<i'} g_{ii'} sum_{mu nu} J_{mu nu} sigma^mu_i sigma^nu_i'

with c per the hardware convention, evolves states in the full space, and
reports how well the single-excitation-subspace (SES) picture holds:
population leaking out of the SES (into triple-excitation states for
sigma^x sigma^x coupling) and deviations of protocol results.

Dense matrices only; capped at n = 12 qubits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import _as_square_sym, basis_state
from .protocols import PhaseFlip, PulseSchedule

HARD_CAP = 12

_ID = np.eye(2)
_C = np.array([[0.0, 1.0], [0.0, 0.0]])  # lowering: |0><1|
_NUM = _C.T @ _C
_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])  # +1 on the ground state
_PAULI = (_SX, _SY, _SZ)


def _check_cap(n):
    if n > HARD_CAP:
        raise ValueError(f"full-space oracle capped at n = {HARD_CAP} qubits")


def _op_on(op, i, n):
    """Embed a single-qubit operator on qubit i (1-based) into n qubits."""
    left = np.eye(1 << (i - 1))
    right = np.eye(1 << (n - i))
    return np.kron(np.kron(left, op), right)


def _two_site(op_a, i, op_b, j, n):
    return _op_on(op_a, i, n) @ _op_on(op_b, j, n)


def ses_indices(n):
    """Full-space index of each SES basis state |i), i = 1..n."""
    return np.array([1 << (n - i) for i in range(1, n + 1)])


def excitation_numbers(n):
    """Excitation count of every full-space basis state."""
    return np.array([bin(b).count("1") for b in range(1 << n)])


def excitation_operator(n):
    """Total excitation number sum_i c_i^dag c_i as a diagonal matrix."""
    _check_cap(n)
    return np.diag(excitation_numbers(n).astype(float))


def build_full_hamiltonian(eps, g, j=None, rotating_wave=False):
    """Exact dense qubit-array Hamiltonian.

    j is the 3x3 exchange tensor ordered (x, y, z); by default only the
    sigma^x sigma^x term is present (J_xx = 1).  rotating_wave=True keeps
    only the excitation-conserving hopping c_i^dag c_i' + h.c. instead.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    n = eps.size
    _check_cap(n)
    g = _as_square_sym(g, "g")
    if g.shape[0] != n:
        raise ValueError(f"g has dimension {g.shape[0]}, eps has {n}")
    if rotating_wave and j is not None:
        raise ValueError("rotating_wave replaces the exchange tensor; drop j")
    if j is None:
        j = np.zeros((3, 3))
        j[0, 0] = 1.0
    j = np.asarray(j, dtype=float)
    if j.shape != (3, 3):
        raise ValueError("j must be a 3x3 tensor ordered (x, y, z)")

    dim = 1 << n
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(1, n + 1):
        h += eps[i - 1] * _op_on(_NUM, i, n)
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if g[a - 1, b - 1] == 0.0:
                continue
            if rotating_wave:
                hop = _two_site(_C.T, a, _C, b, n)
                h += g[a - 1, b - 1] * (hop + hop.conj().T)
                continue
            for mu in range(3):
                for nu in range(3):
                    if j[mu, nu] == 0.0:
                        continue
                    h += g[a - 1, b - 1] * j[mu, nu] * _two_site(
                        _PAULI[mu], a, _PAULI[nu], b, n)
    if not np.allclose(h, h.conj().T, atol=1e-10):
        raise ValueError("constructed Hamiltonian is not Hermitian")
    return h


def project_to_ses(h_full, n):
    """The n x n SES block (i|H|i') of a full-space Hamiltonian."""
    idx = ses_indices(n)
    return h_full[np.ix_(idx, idx)]


def _evolve(h, psi, t):
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ (v.conj().T @ psi)


@dataclass(frozen=True)
class LeakageResult:
    """Population bookkeeping after full-space evolution."""

    ses_retained: float
    triple_population: float
    outside_ses: float


def leakage_run(eps, g, t, initial=1, j=None):
    """Evolve an SES basis state in the full space and report leakage."""
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    n = eps.size
    h = build_full_hamiltonian(eps, g, j=j)
    psi = np.zeros(1 << n, dtype=complex)
    psi[ses_indices(n)[initial - 1]] = 1.0
    out = _evolve(h, psi, t)
    p = np.abs(out) ** 2
    counts = excitation_numbers(n)
    ses = float(p[ses_indices(n)].sum())
    return LeakageResult(
        ses_retained=ses,
        triple_population=float(p[counts == 3].sum()),
        outside_ses=float(1.0 - ses),
    )


@dataclass(frozen=True)
class ProtocolComparison:
    """Full-space vs SES outcome of one pulse schedule."""

    deviation: float
    leakage: float


def compare_protocol(schedule, eps, j=None):
    """Run a pulse schedule both ways and compare the final states.

    The SES run treats each pulse as g0*K directly.  The full-space run
    realizes the same pulse with physical qubits at frequency eps: the K
    diagonal becomes per-qubit detunings, the K off-diagonals become
    exchange couplings, and phase flips become z pulses on one qubit.
    Deviation is the max elementwise difference of the SES amplitudes after
    global-phase alignment; leakage is the final population outside the SES.
    """
    if not isinstance(schedule, PulseSchedule):
        raise TypeError("expected a PulseSchedule")
    n = schedule.n
    _check_cap(n)
    eps = np.broadcast_to(np.asarray(eps, dtype=float), (n,)).copy()
    idx = ses_indices(n)

    psi_ses = basis_state(1, n)
    psi_full = np.zeros(1 << n, dtype=complex)
    psi_full[idx[0]] = 1.0

    for step in schedule.steps:
        if isinstance(step, PhaseFlip):
            psi_ses = psi_ses.copy()
            psi_ses[step.index - 1] *= -1.0
            bit = 1 << (n - step.index)
            signs = np.where(np.arange(1 << n) & bit, -1.0, 1.0)
            psi_full = signs * psi_full
            continue
        h_ses = step.hamiltonian()
        w, v = np.linalg.eigh(h_ses)
        psi_ses = (v * np.exp(-1j * w * step.duration)) @ (v.conj().T @ psi_ses)
        g = h_ses.copy()
        np.fill_diagonal(g, 0.0)
        h_full = build_full_hamiltonian(eps + np.diag(h_ses), g, j=j)
        psi_full = _evolve(h_full, psi_full, step.duration)

    amps = psi_full[idx]
    leak = float(1.0 - np.sum(np.abs(amps) ** 2))
    overlap = np.vdot(psi_ses, amps)
    if abs(overlap) > 0.0:
        amps = amps * np.exp(-1j * np.angle(overlap))
    return ProtocolComparison(
        deviation=float(np.max(np.abs(amps - psi_ses))),
        leakage=leak,
    )
