import numpy as np
import pytest

import sesim
from sesim.propagators import (Diagonalization, Krylov, PadeExpm, RungeKutta,
                               TimeSliced, expm_pade, propagate_const,
                               propagate_td)

KERNELS = [Diagonalization(), PadeExpm(), Krylov(), RungeKutta()]


def _rabi_state(g, t):
    # two-level hopping: e^{-iHt}|1> = cos(gt)|1> - i sin(gt)|2>
    return np.array([np.cos(g * t), -1j * np.sin(g * t)])


@pytest.mark.parametrize("kind", KERNELS, ids=lambda k: type(k).__name__)
def test_two_level_closed_form(kind):
    g = 2 * np.pi * 5e6
    t = 37e-9
    h = np.array([[0.0, g], [g, 0.0]])
    res = propagate_const(h, sesim.basis_state(1, 2), t, kind=kind)
    np.testing.assert_allclose(res.state, _rabi_state(g, t), atol=1e-8)
    assert res.norm_error < 1e-8


@pytest.mark.parametrize("kind", KERNELS[1:], ids=lambda k: type(k).__name__)
def test_kernels_agree_on_random_hamiltonian(kind):
    rng = np.random.default_rng(3)
    h = rng.normal(size=(12, 12))
    h = (h + h.T) * 1e7
    psi = rng.normal(size=12) + 1j * rng.normal(size=12)
    psi /= np.linalg.norm(psi)
    t = 80e-9
    ref = propagate_const(h, psi, t).state
    res = propagate_const(h, psi, t, kind=kind)
    np.testing.assert_allclose(res.state, ref, atol=1e-8)


def test_negative_time_inverts_evolution():
    rng = np.random.default_rng(4)
    h = rng.normal(size=(6, 6))
    h = (h + h.T) * 1e8
    psi = sesim.uniform_state(6)
    fwd = propagate_const(h, psi, 50e-9, kind=Krylov()).state
    back = propagate_const(h, fwd, -50e-9, kind=Krylov()).state
    np.testing.assert_allclose(back, psi, atol=1e-9)


def test_expm_pade_is_unitary_exponential():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(5, 5))
    a = a + a.T
    u = expm_pade(a)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(5), atol=1e-12)
    w, v = np.linalg.eigh(a)
    np.testing.assert_allclose(u, v @ np.diag(np.exp(-1j * w)) @ v.T, atol=1e-12)


def test_krylov_substeps_long_evolution():
    rng = np.random.default_rng(6)
    h = rng.normal(size=(40, 40))
    h = (h + h.T) * 1e8
    psi = sesim.basis_state(1, 40)
    t = 2e-6
    res = propagate_const(h, psi, t, kind=Krylov(dim=30))
    assert res.steps > 1
    assert res.matvecs >= res.steps
    ref = propagate_const(h, psi, t).state
    np.testing.assert_allclose(res.state, ref, atol=1e-7)


def test_krylov_eigenvector_breakdown_is_exact():
    h = np.diag([1.0, 2.0, 3.0]) * 1e8
    psi = sesim.basis_state(2, 3)
    res = propagate_const(h, psi, 1e-7, kind=Krylov())
    np.testing.assert_allclose(res.state, np.exp(-1j * 2e8 * 1e-7) * psi,
                               atol=1e-12)


def test_diag_kernel_reports_zero_matvecs():
    h = np.array([[0.0, 1.0], [1.0, 0.0]])
    res = propagate_const(h, sesim.basis_state(1, 2), 0.5)
    assert res.matvecs == 0
    assert res.steps == 1
    assert res.wall_time_s >= 0.0


def test_propagate_const_rejects_time_sliced():
    h = np.eye(2)
    with pytest.raises(ValueError):
        propagate_const(h, sesim.basis_state(1, 2), 1.0, kind=TimeSliced(dt=0.1))


def test_time_sliced_validates_construction():
    with pytest.raises(ValueError):
        TimeSliced(dt=0.0)
    with pytest.raises(ValueError):
        TimeSliced(dt=0.1, inner=RungeKutta())


def test_callable_hamiltonian_requires_span():
    h_of_t = lambda t: np.array([[0.0, t], [t, 0.0]])
    psi = sesim.basis_state(1, 2)
    with pytest.raises(ValueError):
        propagate_td(h_of_t, psi)
    res = propagate_td(h_of_t, psi, t0=0.0, t1=1.0)
    assert res.norm_error < 1e-8


def test_td_defaults_to_grid_span():
    t_grid = np.linspace(0.0, 100e-9, 21)
    w = 2 * np.pi * 20e6
    mats = np.array([[[0.0, w * tt / 100e-9], [w * tt / 100e-9, 0.0]]
                     for tt in t_grid])
    tdh = sesim.TimeDependentHamiltonian(t_grid, mats)
    psi = sesim.basis_state(1, 2)
    # linear ramp of a fixed matrix direction: exact answer from the
    # integrated area, since H(t) commutes with itself at all times
    area = 0.5 * w * 100e-9
    expected = np.array([np.cos(area), -1j * np.sin(area)])
    res = propagate_td(tdh, psi)
    np.testing.assert_allclose(res.state, expected, atol=1e-7)


def test_time_sliced_converges_second_order():
    t_grid = np.linspace(0.0, 50e-9, 401)
    rng = np.random.default_rng(7)
    base = rng.normal(size=(4, 4))
    base = (base + base.T) * 2e7
    bump = rng.normal(size=(4, 4))
    bump = (bump + bump.T) * 2e7
    mats = np.array([base + np.sin(2 * np.pi * tt / 50e-9) * bump
                     for tt in t_grid])
    tdh = sesim.TimeDependentHamiltonian(t_grid, mats)
    psi = sesim.uniform_state(4)
    ref = propagate_td(tdh, psi, kind=RungeKutta(rtol=1e-11, atol=1e-13)).state
    err = {}
    for dt in (1e-9, 0.5e-9):
        state = propagate_td(tdh, psi, kind=TimeSliced(dt=dt)).state
        err[dt] = np.max(np.abs(state - ref))
    ratio = err[1e-9] / err[0.5e-9]
    assert 3.0 < ratio < 5.0


def test_time_sliced_slice_count():
    t_grid = np.array([0.0, 100e-9])
    mats = np.zeros((2, 3, 3))
    tdh = sesim.TimeDependentHamiltonian(t_grid, mats)
    res = propagate_td(tdh, sesim.basis_state(1, 3), kind=TimeSliced(dt=1e-9))
    assert res.steps == 100
    np.testing.assert_allclose(res.state, sesim.basis_state(1, 3))


def test_state_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        propagate_const(np.eye(3), sesim.basis_state(1, 2), 1.0)
