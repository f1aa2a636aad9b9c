"""Acceptance suite: one test per numbered release criterion.

Each test prints the measured values next to the required bounds, so a
failing clause can be read off the pytest -v output directly.  Bounds are
asserted exactly as published in the README acceptance table; criteria 9
and 10 currently fail and the README documents why the printed numbers are
believed correct.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest
import scipy.linalg

from sesim.bench import bench_const, bench_td, timeslice_overhead
from sesim.collision import (CollisionParams, load_potential_table,
                             run_collision, synthetic_table)
from sesim.core import TimeDependentHamiltonian, basis_state, uniform_state
from sesim.ensemble import sample_k, spectral_stats
from sesim.fullspace import compare_protocol
from sesim.noise import (ControlNoiseSpec, SesDensity, amplitude_damping,
                         control_error_mc, control_error_perturbative,
                         damping_error, dephasing, dephasing_error,
                         fidelity_error)
from sesim.propagators import Diagonalization, RungeKutta, propagate_td
from sesim.protocols import (PulseSchedule, PulseStep,
                             controlled_evolution_pulse, grover_schedule,
                             grover_success_probability, ipe_run, k_star,
                             pulse_unitary, run_schedule, uniform_prep_pulse)
from sesim.rescaler import rescale_td

G_MAX = 2.0 * math.pi * 50e6


def test_criterion_01_ensemble_bandwidth():
    start = time.perf_counter()
    violations = []
    for n, coeff, power in ((10, 1.58, 0.58), (30, 1.58, 0.58),
                            (100, 1.58, 0.58), (500, 2.06, 0.52)):
        stats = spectral_stats(n, trials=1000, seed=0)
        fit = coeff * n**power
        rel = abs(stats.mean_bandwidth - fit) / fit
        print(f"n={n:4d}: mean bandwidth {stats.mean_bandwidth:8.4f}  "
              f"fit {fit:8.4f}  rel {rel:.4f}  (require <= 0.05)")
        if rel > 0.05:
            violations.append(f"n={n}: bandwidth off fit by {rel:.4f} > 0.05")
    elapsed = time.perf_counter() - start
    print(f"elapsed {elapsed:.1f}s (require < 120s)")
    if elapsed > 120.0:
        violations.append(f"runtime {elapsed:.1f}s > 120s")
    assert not violations, violations


def test_criterion_02_level_spacing():
    start = time.perf_counter()
    violations = []
    for n in (10, 100):
        stats = spectral_stats(n, trials=1000, seed=0)
        fit = 1.89 * n**-0.46
        rel = abs(stats.mean_spacing - fit) / fit
        print(f"n={n:4d}: mean spacing {stats.mean_spacing:.4f}  "
              f"fit {fit:.4f}  rel {rel:.4f}  (require <= 0.05)")
        if rel > 0.05:
            violations.append(f"n={n}: spacing off fit by {rel:.4f} > 0.05")
    elapsed = time.perf_counter() - start
    if elapsed > 60.0:
        violations.append(f"runtime {elapsed:.1f}s > 60s")
    assert not violations, violations


def test_criterion_03_uniform_prep():
    violations = []
    for n in (2, 9, 64):
        step = uniform_prep_pulse(n, G_MAX)
        assert step.duration == pytest.approx(
            math.pi / (math.sqrt(n) * G_MAX), rel=1e-12)
        psi = run_schedule(PulseSchedule(steps=(step,), n=n))
        fid = abs(np.vdot(uniform_state(n), psi)) ** 2
        print(f"n={n:2d}: prep infidelity {1.0 - fid:.3e}  (require <= 1e-9)")
        if fid < 1.0 - 1e-9:
            violations.append(f"n={n}: fidelity {fid:.12f} < 1 - 1e-9")
        # star spectrum in units of g_max must contain (1 +- sqrt(n)) / 2
        w = np.linalg.eigvalsh(G_MAX * k_star(n)) / G_MAX
        for target in ((1.0 - math.sqrt(n)) / 2.0, (1.0 + math.sqrt(n)) / 2.0):
            miss = float(np.min(np.abs(w - target)))
            if miss > 1e-10:
                violations.append(
                    f"n={n}: star spectrum misses {target:.6f} by {miss:.2e}")
    assert not violations, violations


def test_criterion_04_grover():
    violations = []

    # single iteration at n=4 against brute-force oracle + reflection matrices
    n, marked = 4, 3
    psi = run_schedule(grover_schedule(n, marked, G_MAX))
    p_sim = abs(psi[marked - 1]) ** 2
    oracle = np.eye(n)
    oracle[marked - 1, marked - 1] = -1.0
    reflect = 2.0 * np.full((n, n), 1.0 / n) - np.eye(n)
    brute = reflect @ (oracle @ np.full(n, 1.0 / math.sqrt(n)))
    p_brute = abs(brute[marked - 1]) ** 2
    print(f"n=4: schedule {p_sim:.12f}  brute force {p_brute:.12f}")
    if abs(p_sim - p_brute) > 1e-8:
        violations.append(f"n=4: |{p_sim} - {p_brute}| > 1e-8")
    if abs(p_sim - 1.0) > 1e-8:
        violations.append(f"n=4: success probability {p_sim} != 1.0 +- 1e-8")

    # closed-form success probability at larger sizes
    for n in (16, 64):
        marked = n // 2
        psi = run_schedule(grover_schedule(n, marked, G_MAX))
        p = abs(psi[marked - 1]) ** 2
        want = grover_success_probability(n)
        print(f"n={n}: schedule {p:.9f}  closed form {want:.9f}")
        if abs(p - want) > 1e-6:
            violations.append(f"n={n}: |{p} - {want}| > 1e-6")

    # the W pulse is the inversion-about-average reflection up to global phase
    n = 16
    w_step = next(s for s in grover_schedule(n, 1, G_MAX).steps
                  if s.label == "grover-W")
    u_w = pulse_unitary(w_step)
    reflect = 2.0 * np.full((n, n), 1.0 / n) - np.eye(n)
    align = np.exp(-1j * np.angle(np.vdot(reflect.ravel(), u_w.ravel())))
    dist = float(np.max(np.abs(align * u_w - reflect)))
    print(f"W pulse vs reflection: {dist:.2e}  (require < 1e-10)")
    if dist > 1e-10:
        violations.append(f"W pulse differs from reflection by {dist:.2e}")

    assert not violations, violations


def test_criterion_05_controlled_embedding():
    violations = []
    for big_n in range(2, 9):
        rng = np.random.default_rng((55, big_n))
        a = rng.uniform(-1.0, 1.0, (big_n, big_n))
        a = 0.5 * (a + a.T)
        u_ses = pulse_unitary(controlled_evolution_pulse(a, t=1.0, g_max=G_MAX))
        p0 = np.diag([1.0, 0.0])
        p1 = np.diag([0.0, 1.0])
        oracle = (np.kron(p0, np.eye(big_n))
                  + np.kron(p1, scipy.linalg.expm(-1j * a)))
        align = np.trace(oracle.conj().T @ u_ses)
        u_ses = u_ses * np.exp(-1j * np.angle(align))
        dev = float(np.max(np.abs(u_ses - oracle)))
        print(f"N={big_n}: pulse vs controlled-U oracle {dev:.2e}")
        if dev > 1e-9:
            violations.append(f"N={big_n}: deviation {dev:.2e} > 1e-9")
    assert not violations, violations


def test_criterion_06_iterative_phase_estimation():
    violations = []
    h = np.array([[3.0, 1.0], [1.0, 3.0]]) * 1e8  # ground energy 2e8 rad/s
    e_ground = 2e8

    # dyadic phase 0.0110 in binary = 0.375 must come out exact
    t = 2.0 * math.pi * 0.375 / e_ground
    res = ipe_run(h, t, bits=4, g_max=G_MAX, rng=np.random.default_rng(11))
    print(f"dyadic: bits {res.bits}  phase {res.phase}")
    if res.bits != (0, 1, 1, 0):
        violations.append(f"dyadic bits {res.bits} != (0, 1, 1, 0)")
    if res.phase != 0.375:
        violations.append(f"dyadic phase {res.phase} != 0.375")

    # non-dyadic phase to 2^-6 (circular distance) in >= 80% of 50 runs
    phi = 0.3141
    t = 2.0 * math.pi * phi / e_ground
    hits = 0
    for run in range(50):
        rng = np.random.default_rng((2026, run))
        est = ipe_run(h, t, bits=6, g_max=G_MAX, rng=rng).phase
        d = abs(est - phi)
        if min(d, 1.0 - d) <= 2.0**-6:
            hits += 1
    print(f"non-dyadic: {hits}/50 runs within 2^-6  (require >= 40)")
    if hits < 40:
        violations.append(f"only {hits}/50 runs within 2^-6")

    assert not violations, violations


def test_criterion_07_rescaling_invariance():
    g_target = 2.0 * math.pi * 30e6
    kind = RungeKutta(rtol=1e-10, atol=1e-12)
    violations = []
    worst = 0.0
    for trial in range(20):
        rng = np.random.default_rng((100, trial))
        n = int(rng.integers(2, 21))
        a0 = rng.uniform(-1.0, 1.0, (n, n))
        a0 = 0.5 * (a0 + a0.T)
        a0 *= rng.uniform(0.5, 6.0) * g_target / np.max(np.abs(a0))
        shift = rng.uniform(0.0, 2.0) * g_target
        phase = rng.uniform(0.0, 2.0 * math.pi)
        t_grid = np.linspace(0.0, 150e-9, 800)
        s = 1.0 + 0.5 * np.sin(2.0 * math.pi * t_grid / 150e-9 + phase)
        mats = s[:, None, None] * a0 + shift * np.eye(n)
        tdh = TimeDependentHamiltonian(t_grid, mats)
        plan = rescale_td(tdh, g_target)

        psi0 = basis_state(1, n)
        direct = propagate_td(tdh, psi0, kind=kind).state
        scaled = propagate_td(plan.scaled, psi0, kind=kind).state
        dev = float(np.max(np.abs(np.abs(direct) ** 2 - np.abs(scaled) ** 2)))
        worst = max(worst, dev)
        if dev > 1e-5:
            violations.append(f"trial {trial} (n={n}): deviation {dev:.2e} > 1e-5")

        tops = np.array([np.max(np.abs(m)) for m in plan.scaled.matrices])
        if not np.allclose(tops, g_target, rtol=1e-9):
            slack = float(np.max(np.abs(tops - g_target))) / g_target
            violations.append(f"trial {trial} (n={n}): tightness off by {slack:.2e}")
    print(f"worst occupation deviation over 20 models: {worst:.2e} "
          f"(require <= 1e-5)")
    assert not violations, violations


def test_criterion_08_decoherence_closed_forms():
    violations = []
    rng = np.random.default_rng(88)
    t, t1, tphi = 100e-9, 40e-6, 25e-6
    for n in (2, 5, 9):
        psi = rng.normal(size=n) + 1j * rng.normal(size=n)
        psi /= np.linalg.norm(psi)
        rho = SesDensity.from_state(psi)

        got = fidelity_error(amplitude_damping(rho, t, t1), psi)
        want = damping_error(t, t1)
        if abs(got - want) > 1e-12:
            violations.append(f"n={n}: damping channel {got!r} vs closed "
                              f"form {want!r}")

        got = fidelity_error(dephasing(rho, t, tphi), psi)
        want = dephasing_error(psi, t, tphi)
        if abs(got - want) > 1e-12:
            violations.append(f"n={n}: dephasing channel {got!r} vs closed "
                              f"form {want!r}")

    e_ref = damping_error(100e-9, 40e-6)
    print(f"damping error at t=100ns, T1=40us: {e_ref:.6e} "
          f"(1 - exp(-1/400) = {1.0 - math.exp(-1.0 / 400.0):.6e})")
    if abs(e_ref - (1.0 - math.exp(-1.0 / 400.0))) > 1e-12:
        violations.append(f"reference damping error {e_ref!r}")
    assert not violations, violations


def test_criterion_09_control_errors():
    start = time.perf_counter()
    violations = []
    noise = ControlNoiseSpec(delta_v=2.0 * math.pi * 0.5e6)

    # Monte Carlo at t=10ns vs the fitted curve 8.1e-5 sqrt(n), 2 SE per point
    mc_by_n = {}
    for n in (4, 16, 64, 100):
        rng = np.random.default_rng((2026, n))
        res = control_error_mc(None, noise, 10e-9, trials=1000, rng=rng,
                               ensemble="random-h", g_max=G_MAX, n=n)
        mc_by_n[n] = res
        fit = 8.1e-5 * math.sqrt(n)
        z = (res.mean - fit) / res.se
        print(f"t=10ns  n={n:3d}: mc {res.mean:.4e} +- {res.se:.1e}  "
              f"fit {fit:.4e}  z {z:+.1f}")
        if abs(z) > 2.0:
            violations.append(f"fit at n={n}: |z| = {abs(z):.1f} > 2")

    # t=100ns, n=100: mean error 2% +- 0.3% absolute
    rng = np.random.default_rng((2026, 100, 100))
    res = control_error_mc(None, noise, 100e-9, trials=400, rng=rng,
                           ensemble="random-h", g_max=G_MAX, n=100)
    print(f"t=100ns n=100: mc {res.mean:.4f} +- {res.se:.4f}  "
          f"(require 0.02 +- 0.003)")
    if abs(res.mean - 0.02) > 0.003:
        violations.append(f"t=100ns error {res.mean:.4f} outside 0.02 +- 0.003")

    # spectral perturbative estimate vs MC inside its validity window
    for n in (4, 16, 64, 100):
        rng = np.random.default_rng((2026, 10000 + n))
        pert = float(np.mean([
            control_error_perturbative(G_MAX * sample_k(n, rng),
                                       noise.sigma, 10e-9)
            for _ in range(100)]))
        mc = mc_by_n[n]
        z = (pert - mc.mean) / mc.se
        print(f"perturbative n={n:3d}: {pert:.4e}  vs mc {mc.mean:.4e}  "
              f"z {z:+.1f}")
        if abs(z) > 2.0:
            violations.append(f"perturbative at n={n}: |z| = {abs(z):.1f} > 2")

    elapsed = time.perf_counter() - start
    print(f"elapsed {elapsed:.1f}s (require < 600s)")
    if elapsed > 600.0:
        violations.append(f"runtime {elapsed:.1f}s > 600s")
    assert not violations, violations


def test_criterion_10_oracle_equivalence():
    violations = []
    eps = 2.0 * math.pi * 5e9
    for n in (4, 6, 8):
        rng = np.random.default_rng((77, n))
        k = sample_k(n, rng)
        k /= np.max(np.abs(k))
        step = PulseStep(k=k, g0=0.01 * eps, duration=100e-9,
                         label="oracle-equivalence")
        out = compare_protocol(PulseSchedule(steps=(step,), n=n), eps)
        print(f"n={n}: deviation {out.deviation:.3e} (require < 2e-3)  "
              f"leakage {out.leakage:.3e} (require < 1e-3)")
        if out.deviation > 2e-3:
            violations.append(f"n={n}: deviation {out.deviation:.3e} > 2e-3")
        if out.leakage > 1e-3:
            violations.append(f"n={n}: leakage {out.leakage:.3e} > 1e-3")
    assert not violations, violations


def test_criterion_11_collision_synthetic():
    violations = []
    table = synthetic_table()

    params = CollisionParams(b=1.0, v0=1.0, mu=50.0, r_start=30.0)
    res = run_collision(table, params, grid=4096)
    total = float(res.finals.sum())
    print(f"finals {np.round(res.finals, 6)}  sum {total:.9f}  "
          f"grid-doubling delta {res.convergence_delta:.1e}")
    if abs(total - 1.0) > 1e-7:
        violations.append(f"probability sum {total!r} off 1 by > 1e-7")

    params = CollisionParams(b=15.0, v0=1.0, mu=50.0, r_start=30.0)
    res = run_collision(table, params, grid=2048, check_convergence=False)
    print(f"large-b survival deficit {1.0 - res.finals[0]:.2e}  "
          f"(require < 1e-6)")
    if res.finals[0] <= 1.0 - 1e-6:
        violations.append(f"large-b survival {res.finals[0]!r} <= 1 - 1e-6")

    params = CollisionParams(b=1.0, v0=1.0, mu=100.0, r_start=30.0)
    ideal = run_collision(table, params, grid=10000, check_convergence=False)
    hw = run_collision(table, params, g_max=2.0 * math.pi * 30e6, grid=10000,
                       check_convergence=False)
    diff = float(np.max(np.abs(hw.finals - ideal.finals)))
    print(f"hardware vs ideal finals differ by {diff:.2e} "
          f"(require < 1e-4); simulated duration {hw.plan.total_t_qc:.2e}s")
    if diff > 1e-4:
        violations.append(f"hardware run differs from ideal by {diff:.2e}")

    assert not violations, violations


NA_HE_TABLE = Path(__file__).parent / "data" / "na_he_channels.csv"


def test_criterion_11_collision_na_he():
    if not NA_HE_TABLE.exists():
        pytest.skip(
            "needs digitized Na-He channel data at tests/data/na_he_channels.csv "
            "(CSV header 'R,U11,U12,U13,U22,U23,U33', atomic units, R strictly "
            "increasing); finals are then checked against (0.116, 0.038, 0.846) "
            "+- 0.02 at b=0.5, v0=2.0, mu=6214.35")
    table = load_potential_table(NA_HE_TABLE)
    params = CollisionParams(b=0.5, v0=2.0, mu=6214.35, r_start=50.0)
    res = run_collision(table, params, grid=8192)
    print(f"Na-He finals {np.round(res.finals, 4)}")
    np.testing.assert_allclose(res.finals, [0.116, 0.038, 0.846], atol=0.02)


def test_criterion_12_kernel_scaling():
    start = time.perf_counter()
    violations = []

    # n=16 eigh timings are dominated by call overhead; fit from 32 up
    rc = bench_const([32, 64, 128, 256, 512], trials=5,
                     kernels={"diagonalization": Diagonalization()}, seed=0)
    a_c, b_c = rc.fits["diagonalization"]
    print(f"diagonalization: t = {a_c:.2e} * n^{b_c:.2f}  "
          f"breakeven {rc.breakeven['diagonalization']:.0f}  "
          f"(exponent required in [1.8, 3.2])")
    if not 1.8 <= b_c <= 3.2:
        violations.append(f"diagonalization exponent {b_c:.2f} outside [1.8, 3.2]")

    rt = bench_td([16, 32, 64, 128, 256, 512], trials=3,
                  kernels={"runge-kutta": RungeKutta()}, seed=0)
    a_t, b_t = rt.fits["runge-kutta"]
    print(f"runge-kutta:     t = {a_t:.2e} * n^{b_t:.2f}  "
          f"breakeven {rt.breakeven['runge-kutta']:.0f}  "
          f"(exponent required in [1.0, 1.8])")
    if not 1.0 <= b_t <= 1.8:
        violations.append(f"runge-kutta exponent {b_t:.2f} outside [1.0, 1.8]")

    ratio, n_slices = timeslice_overhead(n=128, seed=0)
    print(f"time-sliced / runge-kutta cost ratio {ratio:.0f} vs "
          f"{n_slices} slices (require within 2x)")
    if not n_slices / 2.0 <= ratio <= 2.0 * n_slices:
        violations.append(f"slice cost ratio {ratio:.0f} not within 2x of "
                          f"{n_slices}")

    elapsed = time.perf_counter() - start
    print(f"elapsed {elapsed:.1f}s (require < 900s)")
    if elapsed > 900.0:
        violations.append(f"runtime {elapsed:.1f}s > 900s")
    assert not violations, violations
