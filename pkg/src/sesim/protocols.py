"""Protocol library: pulse schedules and executable drivers.

Computations run as sequences of constant pulses exp(-i g0 K t) with
dimensionless coupling patterns K (entries in [-1, 1]), plus instantaneous
phase-flip oracles realized as z rotations.  Provided here:

  - uniform state preparation from a star coupling pattern
  - envelope pulses obeying the area theorem
  - Grover search schedules
  - controlled-unitary block embedding and the Hadamard / Rz pulses
  - adiabatic ground-state preparation
  - iterative phase estimation (IPE) with three measurement protocols
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import basis_state, _as_square_sym
from .propagators import Diagonalization, RungeKutta, TimeSliced, propagate_const, propagate_td
from .core import TimeDependentHamiltonian


# --- coupling patterns --------------------------------------------------------

def k_star(n):
    """Star pattern: 1 at (1,1), 1/2 along the first row and column, else 0.

    g0 * k_star(n) has the two nonzero energies g0*(1 +- sqrt(n))/2.
    """
    if n < 2:
        raise ValueError("star pattern needs n >= 2")
    k = np.zeros((n, n))
    k[0, 0] = 1.0
    k[0, 1:] = 0.5
    k[1:, 0] = 0.5
    return k


def k_full(n):
    """Fully-connected pattern: all off-diagonal entries 1."""
    if n < 2:
        raise ValueError("full pattern needs n >= 2")
    return np.ones((n, n)) - np.eye(n)


def k_z(big_n):
    """Ancilla-z pattern on 2N states: diag(+1 x N, -1 x N)."""
    if big_n < 1:
        raise ValueError("need N >= 1")
    return np.diag(np.concatenate([np.ones(big_n), -np.ones(big_n)]))


# --- pulse schedule types ------------------------------------------------------

@dataclass(frozen=True)
class PulseStep:
    """One constant pulse exp(-i g0 k duration)."""

    k: np.ndarray
    g0: float
    duration: float
    label: str = ""

    def __post_init__(self):
        k = _as_square_sym(self.k, "k")
        object.__setattr__(self, "k", k)
        if float(np.max(np.abs(k))) > 1.0 + 1e-12:
            raise ValueError("pulse pattern entries must satisfy |K| <= 1")
        if self.duration < 0.0:
            raise ValueError("pulse duration must be >= 0")

    @property
    def n(self):
        return self.k.shape[0]

    def hamiltonian(self):
        return self.g0 * self.k


@dataclass(frozen=True)
class PhaseFlip:
    """Instantaneous diag(1, ..., -1, ..., 1) oracle on one SES index.

    Realized in hardware as a z rotation; duration defaults to the 2*pi
    z-rotation time pi/g_max and may be set to 0 for idealized accounting.
    """

    index: int
    n: int
    duration: float = 0.0
    label: str = ""

    def __post_init__(self):
        if not 1 <= self.index <= self.n:
            raise ValueError(f"marked index {self.index} outside 1..{self.n}")
        if self.duration < 0.0:
            raise ValueError("duration must be >= 0")


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered pulse sequence; all steps share the SES dimension n."""

    steps: tuple
    n: int

    def __post_init__(self):
        for s in self.steps:
            if s.n != self.n:
                raise ValueError("schedule steps must share one dimension")
        object.__setattr__(self, "steps", tuple(self.steps))

    def total_duration(self):
        return float(sum(s.duration for s in self.steps))


def pulse_unitary(step):
    """Dense unitary of a single step (eigendecomposition route)."""
    if isinstance(step, PhaseFlip):
        d = np.ones(step.n, dtype=complex)
        d[step.index - 1] = -1.0
        return np.diag(d)
    h = step.hamiltonian()
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * step.duration)) @ v.conj().T


def run_schedule(schedule, psi0=None, kind=Diagonalization()):
    """Execute a schedule on psi0 (default |1)); returns the final state."""
    psi = basis_state(1, schedule.n) if psi0 is None else np.asarray(psi0, dtype=complex)
    for step in schedule.steps:
        if isinstance(step, PhaseFlip):
            psi = psi.copy()
            psi[step.index - 1] *= -1.0
        else:
            psi = propagate_const(step.hamiltonian(), psi, step.duration, kind).state
    return psi


# --- uniform preparation and the area theorem -----------------------------------

def uniform_prep_pulse(n, g0):
    """Star pulse taking |1) to the uniform superposition.

    Duration pi / (sqrt(n) g0): half a Rabi period between |1) and the
    uniform state over |2)..|n).
    """
    if g0 <= 0.0:
        raise ValueError("g0 must be positive")
    return PulseStep(k=k_star(n), g0=g0, duration=math.pi / (math.sqrt(n) * g0),
                     label="uniform-prep")


def pulse_area(t_grid, envelope):
    """Time-integrated coupling area of a sampled envelope (trapezoid rule)."""
    return float(np.trapezoid(np.asarray(envelope, dtype=float), np.asarray(t_grid, dtype=float)))


def apply_area_theorem(t_grid, envelope, k, psi, kind=None):
    """Evolve psi under H(t) = g(t) K for a sampled envelope g(t) >= 0.

    By the area theorem the result depends on the envelope only through its
    area: it matches a constant pulse g0*K of any duration t_qc with
    g0 * t_qc = integral g dt.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    envelope = np.asarray(envelope, dtype=float)
    if np.any(envelope < 0.0):
        raise ValueError("envelope samples must be >= 0")
    k = _as_square_sym(k, "k")
    h_samples = envelope[:, None, None] * k
    h_of_t = TimeDependentHamiltonian(t_grid, h_samples)
    kind = RungeKutta() if kind is None else kind
    return propagate_td(h_of_t, psi, kind=kind).state


# --- Grover ---------------------------------------------------------------------

def grover_iterations(n):
    """Optimal iteration count floor((pi/4) sqrt(n))."""
    return int(math.floor(0.25 * math.pi * math.sqrt(n)))


def grover_success_probability(n, beta=None):
    """Textbook success probability sin^2((2 beta + 1) theta / 2)."""
    beta = grover_iterations(n) if beta is None else beta
    theta = 2.0 * math.asin(1.0 / math.sqrt(n))
    return math.sin((2 * beta + 1) * theta / 2.0) ** 2


def grover_schedule(n, marked, g_max, oracle_duration=None):
    """Uniform prep followed by beta repetitions of [oracle, W pulse].

    The W pulse exp(-i (pi/n) K_full) equals the inversion-about-average
    operator up to a global phase; the oracle is a phase flip on the marked
    index (duration pi/g_max by default, set oracle_duration=0 to idealize).
    """
    if not 1 <= marked <= n:
        raise ValueError(f"marked index {marked} outside 1..{n}")
    if g_max <= 0.0:
        raise ValueError("g_max must be positive")
    if oracle_duration is None:
        oracle_duration = math.pi / g_max
    steps = [uniform_prep_pulse(n, g_max)]
    w_pulse = PulseStep(k=k_full(n), g0=g_max, duration=math.pi / (n * g_max), label="grover-W")
    for _ in range(grover_iterations(n)):
        steps.append(PhaseFlip(index=marked, n=n, duration=oracle_duration, label="oracle"))
        steps.append(w_pulse)
    return PulseSchedule(steps=tuple(steps), n=n)


# --- controlled-unitary embedding and single-qubit pulses -------------------------

def embed_controlled_hamiltonian(a):
    """Block Hamiltonian diag(0, A) on 2N SES states.

    Under the index map |0>|j> <-> |j), |1>|j> <-> |N+j), propagating for
    t = 1 implements controlled-exp(-iA) with the first encoded qubit as
    control.
    """
    a = _as_square_sym(a, "a")
    big_n = a.shape[0]
    h = np.zeros((2 * big_n, 2 * big_n))
    h[big_n:, big_n:] = a
    return h


def hadamard_pulse(big_n, g_max):
    """Pulse implementing H (x) I on the 2N-state ancilla register, exactly.

    K has N x N blocks [[sin^2(pi/8), -cos(pi/8)sin(pi/8)],
    [-cos(pi/8)sin(pi/8), cos^2(pi/8)]] * I and duration pi/g_max; the
    resulting unitary equals the Hadamard on the encoded ancilla with no
    residual global phase.
    """
    if g_max <= 0.0:
        raise ValueError("g_max must be positive")
    s, c = math.sin(math.pi / 8.0), math.cos(math.pi / 8.0)
    eye = np.eye(big_n)
    k = np.block([[s * s * eye, -c * s * eye], [-c * s * eye, c * c * eye]])
    return PulseStep(k=k, g0=g_max, duration=math.pi / g_max, label="hadamard")


def rz_pulse(omega, big_n, g_max):
    """Pulse implementing R_z(omega) (x) I via K_z for time omega/(2 g_max)."""
    if not 0.0 <= omega < 4.0 * math.pi:
        raise ValueError("omega must lie in [0, 4*pi)")
    if g_max <= 0.0:
        raise ValueError("g_max must be positive")
    return PulseStep(k=k_z(big_n), g0=g_max, duration=omega / (2.0 * g_max),
                     label=f"rz({omega:.6g})")


def controlled_evolution_pulse(h_model, t, g_max, power=0):
    """Controlled-exp(-i H 2^power t) as a single SES pulse on 2N states.

    The model Hamiltonian is compressed by lambda = max|H_ij| / g_max so the
    pulse fits hardware limits; the duration stretches to lambda * 2^power * t.
    """
    h_model = _as_square_sym(h_model, "h_model")
    scale = float(np.max(np.abs(h_model)))
    if scale == 0.0:
        raise ValueError("model Hamiltonian is zero; nothing to control")
    if g_max <= 0.0:
        raise ValueError("g_max must be positive")
    lam = scale / g_max
    k = embed_controlled_hamiltonian(h_model / scale)
    return PulseStep(k=k, g0=g_max, duration=lam * (2.0**power) * t,
                     label=f"controlled-U^(2^{power})")


# --- adiabatic ground-state preparation -------------------------------------------

@dataclass(frozen=True)
class AdiabaticPrepResult:
    """2N-dimensional prepared state with its ground-state overlap."""

    state: np.ndarray
    overlap: float
    duration: float
    lam: float


def adiabatic_prep(h_model, g_max, t_prep, steps=200, kind=None):
    """Prepare the ground state of h_model in the lower half of a 2N register.

    Starting from |1), a star pulse builds the uniform superposition over the
    first N states (the ground state of H0 = -g_max K_full, energy
    -(N-1) g_max); the Hamiltonian then ramps linearly from diag(H0, 0) to
    diag(H/lambda, 0) over t_prep with lambda = max|H_ij|/g_max.  Returns the
    final state and its overlap with the true ground state.
    """
    h_model = _as_square_sym(h_model, "h_model")
    big_n = h_model.shape[0]
    if big_n < 2:
        raise ValueError("need a model dimension of at least 2")
    if t_prep <= 0.0:
        raise ValueError("t_prep must be positive")
    scale = float(np.max(np.abs(h_model)))
    if scale == 0.0:
        raise ValueError("model Hamiltonian is zero")
    lam = scale / g_max

    n2 = 2 * big_n
    prep = np.zeros((n2, n2))
    prep[:big_n, :big_n] = k_star(big_n)
    psi = basis_state(1, n2)
    t_star = math.pi / (math.sqrt(big_n) * g_max)
    psi = propagate_const(g_max * prep, psi, t_star).state

    h_start = np.zeros((n2, n2))
    h_start[:big_n, :big_n] = -g_max * k_full(big_n)
    h_end = np.zeros((n2, n2))
    h_end[:big_n, :big_n] = h_model / lam
    # two samples suffice: the ramp is linear and so is the interpolation
    ramp = TimeDependentHamiltonian([0.0, t_prep], [h_start, h_end])
    if kind is None:
        kind = RungeKutta()
    if isinstance(kind, TimeSliced) and steps:
        kind = TimeSliced(dt=t_prep / steps, inner=kind.inner)
    psi = propagate_td(ramp, psi, kind=kind).state

    w, v = np.linalg.eigh(h_model)
    ground = v[:, 0]
    overlap = float(abs(np.vdot(ground, psi[:big_n])) ** 2)
    if overlap < 0.5:
        warnings.warn(f"adiabatic preparation overlap {overlap:.3f} < 0.5; "
                      "increase t_prep", stacklevel=2)
    return AdiabaticPrepResult(state=psi, overlap=overlap,
                               duration=t_star + t_prep, lam=lam)


# --- measurement -------------------------------------------------------------------

class MeasureProtocol(enum.Enum):
    FULL_COLLAPSE = "full-collapse"
    FIRST_HALF = "first-half"
    PARITY_ANCILLA = "parity-ancilla"


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of one projective measurement.

    bit is the ancilla-parity reading (0 = excitation in the lower half);
    index is the collapsed SES index when the protocol reveals it; collapsed
    means the register must be re-prepared before further use.
    """

    protocol: MeasureProtocol
    bit: int | None
    index: int | None
    post_state: np.ndarray
    collapsed: bool
    repetition: int = 0


def measure(state, protocol, rng, repetition=0):
    """Projective measurement of an SES state under one of three protocols.

    FULL_COLLAPSE reads out every qubit: outcome i with probability |a_i|^2,
    post-state |i).  FIRST_HALF reads only the first N = n/2 qubits: outcome
    "found at i" collapses to |i); "not found" (bit 1) projects onto the
    upper half.  PARITY_ANCILLA reads a single parity bit and projects onto
    the corresponding half, preserving the register in both branches.
    """
    psi = np.asarray(state, dtype=complex)
    n = psi.size
    p = np.abs(psi) ** 2
    p = p / p.sum()
    if protocol is MeasureProtocol.FULL_COLLAPSE:
        i = int(rng.choice(n, p=p)) + 1
        bit = (0 if i <= n // 2 else 1) if n % 2 == 0 else None
        return MeasurementRecord(protocol, bit, i, basis_state(i, n), True, repetition)
    if n % 2 != 0:
        raise ValueError("half-register protocols need an even SES dimension")
    half = n // 2
    if protocol is MeasureProtocol.FIRST_HALF:
        # outcomes: collapse onto one of the first N indices, or "not found"
        probs = np.append(p[:half], 1.0 - p[:half].sum())
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        draw = int(rng.choice(half + 1, p=probs))
        if draw < half:
            i = draw + 1
            return MeasurementRecord(protocol, 0, i, basis_state(i, n), True, repetition)
        post = psi.copy()
        post[:half] = 0.0
        post /= np.linalg.norm(post)
        return MeasurementRecord(protocol, 1, None, post, False, repetition)
    if protocol is MeasureProtocol.PARITY_ANCILLA:
        p_lower = float(p[:half].sum())
        bit = 0 if rng.random() < p_lower else 1
        post = psi.copy()
        if bit == 0:
            post[half:] = 0.0
        else:
            post[:half] = 0.0
        post /= np.linalg.norm(post)
        return MeasurementRecord(protocol, bit, None, post, False, repetition)
    raise ValueError(f"unknown measurement protocol {protocol!r}")


# --- iterative phase estimation ------------------------------------------------------

@dataclass(frozen=True)
class IpeResult:
    """Measured bits (most significant first) and the decoded eigenvalue.

    shot_log holds one (bit_position, outcome) pair per executed shot, in
    execution order (least significant bit first).
    """

    bits: tuple
    phase: float
    energy: float
    preparations: int
    prep_overlap: float
    prep_ok: bool
    total_pulse_time: float
    shot_log: tuple = ()


def ipe_feedback_angle(bits, m, total_bits):
    """Feedback rotation omega_m = pi * sum_{j>m} x_j / 2^(j-m)."""
    return math.pi * sum(bits[j] / 2.0 ** (j - m) for j in range(m + 1, total_bits + 1))


@dataclass(frozen=True)
class ExactEigenstate:
    """Prepare the exact ground eigenstate of the model (idealized)."""


@dataclass(frozen=True)
class Adiabatic:
    """Prepare via the adiabatic ramp with the given duration."""

    t_prep: float
    steps: int = 200


def ipe_run(h_model, t, bits, g_max, rng, prep=ExactEigenstate(),
            shots_per_bit=25, protocol=MeasureProtocol.PARITY_ANCILLA,
            overlap_threshold=0.9):
    """Estimate the ground energy of h_model by iterative phase estimation.

    Bits of phi = E t / (2 pi) are read least significant first; each bit is
    decided by majority vote over shots_per_bit single-shot circuits
    [Hadamard, controlled-U^(2^(m-1)), Rz(omega_m), Hadamard, measure].  A
    collapsed register is re-prepared; an ancilla left in |1> is reset with
    Hadamard-Rz(pi)-Hadamard pulses.  Requires 0 < E t < 2 pi for an
    unaliased estimate.
    """
    h_model = _as_square_sym(h_model, "h_model")
    big_n = h_model.shape[0]
    if bits < 1:
        raise ValueError("need at least one bit")
    if shots_per_bit < 1:
        raise ValueError("shots_per_bit must be >= 1")
    w = np.linalg.eigvalsh(h_model)
    e_ground = float(w[0])
    if not 0.0 < e_ground * t < 2.0 * math.pi:
        warnings.warn("E*t outside (0, 2*pi): the phase estimate is aliased",
                      stacklevel=2)

    half = hadamard_pulse(big_n, g_max)
    reset_z = rz_pulse(math.pi, big_n, g_max)
    pulse_time = 0.0
    preparations = 0
    prep_overlap = 1.0

    def prepare():
        nonlocal preparations, prep_overlap, pulse_time
        preparations += 1
        if isinstance(prep, ExactEigenstate):
            _, v = np.linalg.eigh(h_model)
            state = np.zeros(2 * big_n, dtype=complex)
            state[:big_n] = v[:, 0]
            prep_overlap = 1.0
            return state
        res = adiabatic_prep(h_model, g_max, prep.t_prep, steps=prep.steps)
        prep_overlap = res.overlap
        pulse_time += res.duration
        return res.state

    def apply(step, psi):
        nonlocal pulse_time
        pulse_time += step.duration
        return propagate_const(step.hamiltonian(), psi, step.duration).state

    decided = [0] * (bits + 1)  # 1-indexed bit register
    shot_log = []
    state = None
    for m in range(bits, 0, -1):
        omega = ipe_feedback_angle(decided, m, bits)
        ctrl = controlled_evolution_pulse(h_model, t, g_max, power=m - 1)
        fb = rz_pulse(omega, big_n, g_max) if omega > 0.0 else None
        ones = 0
        for _ in range(shots_per_bit):
            if state is None:
                state = prepare()
            state = apply(half, state)
            state = apply(ctrl, state)
            if fb is not None:
                state = apply(fb, state)
            state = apply(half, state)
            rec = measure(state, protocol, rng)
            outcome = rec.bit if rec.bit is not None else int(rec.index > big_n)
            ones += outcome
            shot_log.append((m, outcome))
            if rec.collapsed:
                state = None
            else:
                state = rec.post_state
                if outcome == 1:
                    # put the ancilla back to |0>: X = H Rz(pi) H up to phase
                    state = apply(half, state)
                    state = apply(reset_z, state)
                    state = apply(half, state)
        decided[m] = 1 if 2 * ones > shots_per_bit else 0

    bit_tuple = tuple(decided[1:])
    phase = sum(b / 2.0**j for j, b in enumerate(bit_tuple, start=1))
    return IpeResult(
        bits=bit_tuple,
        phase=phase,
        energy=2.0 * math.pi * phase / t,
        preparations=preparations,
        prep_overlap=prep_overlap,
        prep_ok=prep_overlap >= overlap_threshold,
        total_pulse_time=pulse_time,
        shot_log=tuple(shot_log),
    )
