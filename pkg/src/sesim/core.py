"""Single-excitation-subspace (SES) Hamiltonians and related plumbing.

An n-qubit register restricted to states with exactly one excitation spans an
n-dimensional subspace with basis states |i), i = 1..n (qubit i excited).  In
that basis the processor Hamiltonian is the real symmetric matrix

    H[i, i] = eps[i]        (qubit frequencies)
    H[i, j] = g[i, j]       (qubit-qubit couplings, i != j)

All Hamiltonian entries are angular frequencies in rad/s and all times are in
seconds unless a function says otherwise.  Basis indices exposed to callers
are 1-based, matching the |1)..|n) labelling; array storage is 0-based.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

_SYM_ATOL = 1e-9


def mhz_to_rad_s(f_mhz):
    """Convert a frequency given as f/2pi in MHz to rad/s."""
    return TWO_PI * 1e6 * np.asarray(f_mhz, dtype=float)


def rad_s_to_mhz(w):
    """Convert an angular frequency in rad/s to f/2pi in MHz."""
    return np.asarray(w, dtype=float) / (TWO_PI * 1e6)


def _as_square_sym(m, name, atol=_SYM_ATOL):
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if not np.allclose(a, a.T, atol=atol * scale, rtol=0.0):
        raise ValueError(f"{name} must be symmetric")
    return a


def assert_unit_norm(psi, tol=1e-9):
    """Raise if a state vector is not normalized to within tol."""
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state norm {nrm} deviates from 1 by more than {tol}")


def basis_state(index, n):
    """SES basis state |index) (1-based) as a complex amplitude vector."""
    if not 1 <= index <= n:
        raise ValueError(f"basis index {index} outside 1..{n}")
    psi = np.zeros(n, dtype=complex)
    psi[index - 1] = 1.0
    return psi


def uniform_state(n):
    """Equal-amplitude superposition over all n SES basis states."""
    return np.full(n, 1.0 / math.sqrt(n), dtype=complex)


def build_ses_hamiltonian(eps, g):
    """Assemble the SES Hamiltonian from frequencies eps and couplings g.

    eps is a length-n vector (rad/s); g is an n x n symmetric coupling matrix
    with zero diagonal (rad/s).  Returns the real symmetric n x n matrix with
    eps on the diagonal and g off it.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    if eps.ndim != 1:
        raise ValueError("eps must be a vector")
    n = eps.size
    g = _as_square_sym(g, "g")
    if g.shape[0] != n:
        raise ValueError(f"g has dimension {g.shape[0]}, eps has {n}")
    if np.max(np.abs(np.diag(g))) > 0.0:
        raise ValueError("coupling matrix g must have zero diagonal")
    return np.diag(eps) + g


def build_ses_hamiltonian_general(eps, g, j):
    """SES Hamiltonian for a general two-body exchange tensor.

    j is the real 3x3 tensor J_{mu nu} (mu, nu in x, y, z) weighting
    sigma^mu_i sigma^nu_i' in the qubit-qubit coupling.  The projection onto
    the SES gives

        diagonal:      eps_i - 2*(sum_j g_ij)*J_zz
        off-diagonal:  (J_xx + J_yy) * g_ii'

    The state-independent shift (sum_{j<j'} g_jj')*J_zz is dropped; it only
    contributes a global phase.  J_xy != J_yx would make the projection
    complex and is rejected.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    n = eps.size
    g = _as_square_sym(g, "g")
    if g.shape[0] != n:
        raise ValueError(f"g has dimension {g.shape[0]}, eps has {n}")
    if np.max(np.abs(np.diag(g))) > 0.0:
        raise ValueError("coupling matrix g must have zero diagonal")
    j = np.asarray(j, dtype=float)
    if j.shape != (3, 3):
        raise ValueError("j must be a 3x3 tensor ordered (x, y, z)")
    if abs(j[0, 1] - j[1, 0]) > _SYM_ATOL * max(1.0, np.max(np.abs(j))):
        raise ValueError("J_xy != J_yx gives a complex SES Hamiltonian; not supported")
    transverse = j[0, 0] + j[1, 1]
    if transverse == 0.0:
        warnings.warn("J_xx + J_yy = 0: couplings vanish in the SES", stacklevel=2)
    diag = eps - 2.0 * g.sum(axis=1) * j[2, 2]
    return np.diag(diag) + transverse * g


@dataclass(frozen=True)
class StandardForm:
    """Decomposition H - omega_ref*I = g0*K with max |K_ij| = 1.

    g0 carries the energy scale (rad/s, > 0); K is dimensionless, real
    symmetric, entries in [-1, 1].
    """

    g0: float
    k: np.ndarray
    omega_ref: float

    def hamiltonian(self):
        n = self.k.shape[0]
        return self.omega_ref * np.eye(n) + self.g0 * self.k


def standard_form(h, omega_ref=None):
    """Rewrite H as omega_ref*I + g0*K with K entries in [-1, 1].

    omega_ref defaults to the mean diagonal element.  For H proportional to
    the identity (nothing left after the shift) K = 0 and g0 = 1 by
    convention.
    """
    h = _as_square_sym(h, "h")
    if omega_ref is None:
        omega_ref = float(np.mean(np.diag(h)))
    shifted = h - omega_ref * np.eye(h.shape[0])
    g0 = float(np.max(np.abs(shifted)))
    if g0 == 0.0:
        return StandardForm(g0=1.0, k=np.zeros_like(h), omega_ref=omega_ref)
    return StandardForm(g0=g0, k=shifted / g0, omega_ref=omega_ref)


def qubit_basis_map(q):
    """Map q-bit register strings to SES indices: |00..0> -> 1, |11..1> -> 2^q.

    Returns a dict {bitstring: index} with 1-based indices into an n = 2^q
    dimensional SES.  The leftmost character is the most significant bit.
    """
    if q < 1:
        raise ValueError("need at least one encoded qubit")
    return {format(x, f"0{q}b"): x + 1 for x in range(2**q)}


def qubit_basis_index(bits):
    """SES index (1-based) for a register bitstring."""
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2) + 1


def basis_bitstring(index, q):
    """Register bitstring for a 1-based SES index in a 2^q dimensional SES."""
    if not 1 <= index <= 2**q:
        raise ValueError(f"index {index} outside 1..2^{q}")
    return format(index - 1, f"0{q}b")


# --- tunable coupler circuit -------------------------------------------------

@dataclass(frozen=True)
class CouplerParams:
    """Lumped-element parameters of the tunable qubit-qubit coupler (SI units).

    m: qubit-coupler mutual inductance (H); l0: qubit self-inductance to the
    coupler loop (H); l0p: coupler-side partial inductance (H); lj: junction
    inductance (H); lc: coupler loop inductance (H); c: qubit capacitance (F).
    """

    m: float
    l0: float
    l0p: float
    lj: float
    lc: float
    c: float


@dataclass(frozen=True)
class CouplerDesign:
    """Derived coupler quantities: g (rad/s) plus intermediate circuit values."""

    g: float
    mutual: float
    lq: float
    epsilon: float

    @property
    def g_mhz(self):
        return rad_s_to_mhz(self.g)


def coupler_strength(params):
    """Qubit-qubit coupling of the tunable inductive coupler circuit.

    Effective mutual M = m^2 / (L_c + 2*L0'), loaded qubit inductance
    L_q = L_j + L0 - M, qubit frequency eps = 1/sqrt(L_q C), and

        g = -m^2 * eps / (2 (L_j + L0)(L_c + 2 L0'))

    g is negative for any nonzero m with passive elements.
    """
    p = params
    for name in ("l0", "l0p", "lj", "lc", "c"):
        if getattr(p, name) <= 0.0:
            raise ValueError(f"coupler parameter {name} must be positive")
    mutual = p.m**2 / (p.lc + 2.0 * p.l0p)
    lq = p.lj + p.l0 - mutual
    if lq <= 0.0:
        raise ValueError("loaded qubit inductance L_q <= 0: coupler too strong")
    epsilon = 1.0 / math.sqrt(lq * p.c)
    g = -p.m**2 * epsilon / (2.0 * (p.lj + p.l0) * (p.lc + 2.0 * p.l0p))
    return CouplerDesign(g=g, mutual=mutual, lq=lq, epsilon=epsilon)


# --- time-dependent Hamiltonians ---------------------------------------------

class TimeDependentHamiltonian:
    """Piecewise-linear interpolation of H(t) from samples on a time grid.

    t_grid must be strictly increasing; matrices is an array of real
    symmetric samples, shape (len(t_grid), n, n).  Calling the object at time
    t returns the interpolated matrix; queries outside the grid clamp to the
    end samples.
    """

    def __init__(self, t_grid, matrices):
        t_grid = np.asarray(t_grid, dtype=float)
        matrices = np.asarray(matrices, dtype=float)
        if t_grid.ndim != 1 or t_grid.size < 2:
            raise ValueError("need at least two time samples")
        if np.any(np.diff(t_grid) <= 0.0):
            raise ValueError("t_grid must be strictly increasing")
        if matrices.ndim != 3 or matrices.shape[0] != t_grid.size:
            raise ValueError("matrices must have shape (len(t_grid), n, n)")
        if matrices.shape[1] != matrices.shape[2]:
            raise ValueError("matrix samples must be square")
        if not np.allclose(matrices, np.swapaxes(matrices, 1, 2),
                           atol=_SYM_ATOL * max(1.0, float(np.max(np.abs(matrices)))),
                           rtol=0.0):
            raise ValueError("matrix samples must be symmetric")
        self.t_grid = t_grid
        self.matrices = matrices

    @property
    def n(self):
        return self.matrices.shape[1]

    @property
    def t0(self):
        return float(self.t_grid[0])

    @property
    def t1(self):
        return float(self.t_grid[-1])

    def __call__(self, t):
        ts = self.t_grid
        if t <= ts[0]:
            return self.matrices[0]
        if t >= ts[-1]:
            return self.matrices[-1]
        k = int(np.searchsorted(ts, t, side="right")) - 1
        w = (t - ts[k]) / (ts[k + 1] - ts[k])
        return (1.0 - w) * self.matrices[k] + w * self.matrices[k + 1]


# --- JSON interchange ----------------------------------------------------------

def hamiltonian_to_json(h, units="rad/s"):
    """Serialize a static Hamiltonian to {n, units, matrix} (row-major)."""
    h = _as_square_sym(h, "h")
    if units == "rad/s":
        out = h
    elif units == "MHz":
        out = rad_s_to_mhz(h)
    else:
        raise ValueError(f"unknown units {units!r} (use 'rad/s' or 'MHz')")
    return {"n": h.shape[0], "units": units, "matrix": out.tolist()}


def hamiltonian_from_json(obj):
    """Parse {n, units, matrix} into a Hamiltonian in rad/s."""
    try:
        n = int(obj["n"])
        units = obj["units"]
        matrix = np.asarray(obj["matrix"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed Hamiltonian object: missing {exc}") from exc
    if matrix.shape != (n, n):
        raise ValueError(f"matrix shape {matrix.shape} does not match n={n}")
    if units == "rad/s":
        pass
    elif units == "MHz":
        matrix = mhz_to_rad_s(matrix)
    else:
        raise ValueError(f"unknown units {units!r} (use 'rad/s' or 'MHz')")
    return _as_square_sym(matrix, "matrix")


def load_hamiltonian(path):
    """Read a static-Hamiltonian JSON file; returns the matrix in rad/s."""
    with open(path, encoding="utf-8") as fh:
        return hamiltonian_from_json(json.load(fh))


def td_hamiltonian_to_json(h_of_t, units="rad/s"):
    """Serialize a sampled H(t) to {n, units, t_grid, matrices} (seconds)."""
    scale = 1.0 if units == "rad/s" else None
    if units == "MHz":
        mats = rad_s_to_mhz(h_of_t.matrices)
    elif scale is not None:
        mats = h_of_t.matrices
    else:
        raise ValueError(f"unknown units {units!r} (use 'rad/s' or 'MHz')")
    return {
        "n": h_of_t.n,
        "units": units,
        "t_grid": h_of_t.t_grid.tolist(),
        "matrices": np.asarray(mats).tolist(),
    }


def td_hamiltonian_from_json(obj):
    """Parse {n, units, t_grid, matrices} into a TimeDependentHamiltonian."""
    try:
        units = obj["units"]
        t_grid = np.asarray(obj["t_grid"], dtype=float)
        matrices = np.asarray(obj["matrices"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed model object: missing {exc}") from exc
    if units == "MHz":
        matrices = mhz_to_rad_s(matrices)
    elif units != "rad/s":
        raise ValueError(f"unknown units {units!r} (use 'rad/s' or 'MHz')")
    return TimeDependentHamiltonian(t_grid, matrices)
