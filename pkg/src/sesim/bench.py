"""Wall-clock benchmarks of the propagator kernels on random workloads.

Times each kernel against matrix dimension on seeded random standard-form
Hamiltonians, fits t = a * n^b, and reports the dimension where the fitted
classical runtime (after an arithmetic parallel-speedup factor) crosses a
fixed quantum execution time.  Absolute times and breakevens are
machine-specific and only reported; scaling exponents are the reproducible
quantity.

Timing runs single-threaded (BLAS thread pools pinned to 1) with a
monotonic clock, warm-up excluded, and a correctness gate against the
diagonalization oracle so a kernel cannot win by being wrong.
"""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .core import TWO_PI, TimeDependentHamiltonian, basis_state
from .ensemble import fit_power_law, sample_k
from .propagators import (Diagonalization, PadeExpm, RungeKutta, TimeSliced,
                          propagate_const, propagate_td)

DEFAULT_G_MAX = TWO_PI * 50e6
DEFAULT_DURATION = 100e-9


@dataclass(frozen=True)
class BenchEntry:
    kernel: str
    n: int
    mean_s: float
    std_s: float
    samples: int


@dataclass(frozen=True)
class BenchReport:
    """Per-kernel timings with power-law fits and breakeven dimensions."""

    mode: str
    entries: tuple
    fits: dict
    breakeven: dict
    t_qu: float
    parallel_factor: float


def median_of_means(xs, blocks=3):
    xs = np.asarray(xs, dtype=float)
    k = max(1, min(blocks, xs.size))
    return float(np.median([c.mean() for c in np.array_split(xs, k)]))


def _breakeven(a, b, t_qu, parallel_factor):
    if a <= 0.0 or b <= 0.0:
        return None
    return float((t_qu / (a * parallel_factor)) ** (1.0 / b))


def _finalize(mode, rows, t_qu, parallel_factor):
    entries = tuple(BenchEntry(*r) for r in rows)
    fits, breakeven = {}, {}
    for kernel in {e.kernel for e in entries}:
        pts = [(e.n, e.mean_s) for e in entries if e.kernel == kernel]
        if len(pts) >= 4:
            ns, ts = zip(*sorted(pts))
            a, b = fit_power_law(np.array(ns, dtype=float), np.array(ts))
            fits[kernel] = (a, b)
            breakeven[kernel] = _breakeven(a, b, t_qu, parallel_factor)
    return BenchReport(mode=mode, entries=entries, fits=fits,
                       breakeven=breakeven, t_qu=t_qu,
                       parallel_factor=parallel_factor)


def bench_const(n_list, trials=5, kernels=None, seed=0, g_max=DEFAULT_G_MAX,
                duration=DEFAULT_DURATION, t_qu=200e-9, parallel_factor=1e-6,
                gate_tol=1e-6):
    """Time constant-Hamiltonian propagation over a list of dimensions.

    Each trial draws a fresh random Hamiltonian g_max * K; every kernel
    sees identical workloads.  Samples whose result strays from the
    diagonalization oracle by more than gate_tol are discarded.
    """
    if trials < 3:
        raise ValueError("need at least 3 trials")
    if kernels is None:
        kernels = {"diagonalization": Diagonalization(), "pade": PadeExpm()}
    rows = []
    with threadpool_limits(limits=1):
        for n in n_list:
            n = int(n)
            work = []
            for trial in range(trials):
                rng = np.random.default_rng((int(seed), n, trial))
                h = g_max * sample_k(n, rng)
                psi = basis_state(1, n)
                ref = propagate_const(h, psi, duration).state
                work.append((h, psi, ref))
            for name, kind in kernels.items():
                propagate_const(work[0][0], work[0][1], duration, kind)  # warm-up
                times = []
                for h, psi, ref in work:
                    t0 = time.perf_counter()
                    res = propagate_const(h, psi, duration, kind)
                    dt = time.perf_counter() - t0
                    if np.max(np.abs(res.state - ref)) > gate_tol:
                        warnings.warn(f"{name} failed the correctness gate at "
                                      f"n={n}; sample discarded", stacklevel=2)
                        continue
                    times.append(dt)
                if times:
                    rows.append((name, n, median_of_means(times),
                                 float(np.std(times)), len(times)))
    return _finalize("const", rows, t_qu, parallel_factor)


def _random_td(n, rng, g_max, duration, sample_dt):
    t_grid = np.arange(0.0, duration + 0.5 * sample_dt, sample_dt)
    mats = np.stack([g_max * sample_k(n, rng) for _ in t_grid])
    return TimeDependentHamiltonian(t_grid, mats)


def bench_td(n_list, trials=3, kernels=None, seed=0, g_max=DEFAULT_G_MAX,
             duration=DEFAULT_DURATION, sample_dt=1e-9, t_qu=200e-9,
             parallel_factor=1e-6, gate_tol=2e-2, gate_max_n=128):
    """Time time-dependent propagation: every element varies per sample_dt.

    The correctness gate compares against a tight-tolerance integration and
    runs only for n <= gate_max_n, where its cost does not dominate the
    measurement itself.  The tolerance is loose enough to admit the
    time-sliced kernel's by-design discretization error (a few 1e-3 at
    0.1 ns slices on fully randomized workloads) while still catching
    order-one mistakes.
    """
    if trials < 3:
        raise ValueError("need at least 3 trials")
    if kernels is None:
        kernels = {"runge-kutta": RungeKutta(),
                   "time-sliced": TimeSliced(dt=0.1e-9)}
    rows = []
    with threadpool_limits(limits=1):
        for n in n_list:
            n = int(n)
            work = []
            for trial in range(trials):
                rng = np.random.default_rng((int(seed), n, trial))
                tdh = _random_td(n, rng, g_max, duration, sample_dt)
                psi = basis_state(1, n)
                ref = None
                if n <= gate_max_n:
                    ref = propagate_td(tdh, psi,
                                       kind=RungeKutta(rtol=1e-10, atol=1e-13)).state
                work.append((tdh, psi, ref))
            for name, kind in kernels.items():
                times = []
                for tdh, psi, ref in work:
                    t0 = time.perf_counter()
                    res = propagate_td(tdh, psi, kind=kind)
                    dt = time.perf_counter() - t0
                    if ref is not None and np.max(np.abs(res.state - ref)) > gate_tol:
                        warnings.warn(f"{name} failed the correctness gate at "
                                      f"n={n}; sample discarded", stacklevel=2)
                        continue
                    times.append(dt)
                if times:
                    rows.append((name, n, median_of_means(times),
                                 float(np.std(times)), len(times)))
    return _finalize("td", rows, t_qu, parallel_factor)


def timeslice_overhead(n=128, seed=0, g_max=DEFAULT_G_MAX,
                       duration=DEFAULT_DURATION, dt=0.1e-9):
    """Measured cost ratio of time-sliced propagation to one constant pulse.

    The slice count duration/dt predicts the ratio; returns
    (ratio, n_slices).
    """
    rng = np.random.default_rng((int(seed), int(n)))
    tdh = _random_td(n, rng, g_max, duration, 1e-9)
    h0 = tdh(0.0)
    psi = basis_state(1, n)
    with threadpool_limits(limits=1):
        propagate_const(h0, psi, duration)  # warm-up
        t0 = time.perf_counter()
        propagate_const(h0, psi, duration)
        single = time.perf_counter() - t0
        t0 = time.perf_counter()
        propagate_td(tdh, psi, kind=TimeSliced(dt=dt))
        sliced = time.perf_counter() - t0
    return sliced / single, int(round(duration / dt))


def report_to_csv(report):
    lines = ["kernel,n,mean_s,std_s,samples"]
    for e in report.entries:
        lines.append(f"{e.kernel},{e.n},{e.mean_s:.9e},{e.std_s:.9e},{e.samples}")
    return "\n".join(lines) + "\n"


def report_summary_json(report):
    doc = {
        "mode": report.mode,
        "t_qu": report.t_qu,
        "parallel_factor": report.parallel_factor,
        "fits": {k: {"a": a, "b": b} for k, (a, b) in report.fits.items()},
        "breakeven": report.breakeven,
    }
    return json.dumps(doc, indent=2)
