"""Command-line interface: deterministic data generation for every module.

All commands emit CSV or JSON with an embedded provenance header (artifact
version, hash of the resolved configuration, seed) so outputs are
reproducible bit-for-bit on one platform.  Exit codes: 0 success, 2
validation error, 3 missing external data, 4 numerical failure.
"""

from __future__ import annotations

import functools
import hashlib
import json
import math
import os
import sys

import click
import numpy as np

from . import __version__
from . import bench as bench_mod
from . import collision as coll_mod
from . import core, ensemble, noise, protocols, rescaler

TABLE_FORMAT_HELP = (
    "potential CSV format: header 'R,U11,U12,...,Umm' (upper triangle, "
    "1-based, i <= j), one row per internuclear distance R (strictly "
    "increasing), all values in atomic units, '#' starts a comment")


class MissingDataError(Exception):
    """External input data required but not supplied."""


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (click.ClickException, click.Abort):
            raise
        except MissingDataError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
        except FileNotFoundError as exc:
            click.echo(f"error: missing input file: {exc}", err=True)
            sys.exit(3)
        except json.JSONDecodeError as exc:
            click.echo(f"error: invalid JSON: {exc}", err=True)
            sys.exit(2)
        except (ValueError, TypeError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except (RuntimeError, np.linalg.LinAlgError) as exc:
            click.echo(f"error: numerical failure: {exc}", err=True)
            sys.exit(4)
    return wrapper


def _config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _provenance(cfg, seed):
    return {"version": __version__, "config_hash": _config_hash(cfg),
            "seed": seed}


def _csv_header(cfg, seed, columns):
    p = _provenance(cfg, seed)
    lines = [f"# artifact-version: {p['version']}",
             f"# config-hash: {p['config_hash']}",
             f"# seed: {p['seed']}"]
    lines.append(",".join(columns))
    return lines


def _out_path(out, default_name):
    if out:
        return out
    return os.path.join(os.environ.get("SESIM_OUTDIR", "."), default_name)


def _write(path, text):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")
    click.echo(f"wrote {path}")


def _fmt(x):
    return f"{x:.12e}"


def _parse_int_list(text):
    try:
        vals = [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise click.UsageError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise click.UsageError("empty list")
    return vals


def _log_spaced(lo, hi, points):
    ns = np.unique(np.round(np.logspace(math.log10(lo), math.log10(hi),
                                        points)).astype(int))
    return [int(v) for v in ns]


@click.group()
@click.version_option(version=__version__)
def main():
    """Single-excitation-subspace processor simulation toolkit."""


# --- coupler ---------------------------------------------------------------------

@main.command()
@click.option("--m", type=float, required=True, help="mutual inductance (H)")
@click.option("--l0", type=float, required=True, help="qubit-side loop inductance (H)")
@click.option("--l0p", type=float, required=True, help="coupler-side partial inductance (H)")
@click.option("--lj", type=float, required=True, help="junction inductance (H)")
@click.option("--lc", type=float, required=True, help="coupler loop inductance (H)")
@click.option("--c", type=float, required=True, help="qubit capacitance (F)")
@_handle_errors
def coupler(m, l0, l0p, lj, lc, c):
    """Print the qubit-qubit coupling g/2pi in MHz for a coupler design."""
    design = core.coupler_strength(core.CouplerParams(m, l0, l0p, lj, lc, c))
    click.echo(f"g/2pi = {design.g_mhz:.6f} MHz")


# --- ensemble ----------------------------------------------------------------------

@main.command("ensemble")
@click.option("--n-list", default="10,30,100", show_default=True)
@click.option("--trials", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, help="output CSV path")
@_handle_errors
def ensemble_cmd(n_list, trials, seed, out):
    """Spectral statistics of the random SES ensemble."""
    ns = _parse_int_list(n_list)
    cfg = {"cmd": "ensemble", "n_list": ns, "trials": trials}
    lines = _csv_header(cfg, seed, ["n", "mean_bandwidth", "se_bandwidth",
                                    "mean_spacing", "se_spacing"])
    for n in ns:
        s = ensemble.spectral_stats(n, trials, seed)
        lines.append(",".join([str(n), _fmt(s.mean_bandwidth),
                               _fmt(s.se_bandwidth), _fmt(s.mean_spacing),
                               _fmt(s.se_spacing)]))
    _write(_out_path(out, "ensemble.csv"), "\n".join(lines))


# --- grover ------------------------------------------------------------------------

@main.command()
@click.option("--n", type=int, required=True)
@click.option("--marked", type=int, required=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--shots", default=100, show_default=True)
@click.option("--gmax-mhz", default=50.0, show_default=True)
@click.option("--zero-oracle-time", is_flag=True,
              help="account the phase flips as instantaneous")
@click.option("--out", default=None, help="output JSON path")
@_handle_errors
def grover(n, marked, seed, shots, gmax_mhz, zero_oracle_time, out):
    """Run a Grover search schedule and sample measurement shots."""
    g_max = core.mhz_to_rad_s(gmax_mhz)
    sched = protocols.grover_schedule(
        n, marked, g_max,
        oracle_duration=0.0 if zero_oracle_time else None)
    psi = protocols.run_schedule(sched)
    rng = np.random.default_rng(seed)
    records = [protocols.measure(psi, protocols.MeasureProtocol.FULL_COLLAPSE,
                                 rng, repetition=k) for k in range(shots)]
    hits = sum(1 for r in records if r.index == marked)
    cfg = {"cmd": "grover", "n": n, "marked": marked, "shots": shots,
           "gmax_mhz": gmax_mhz, "zero_oracle_time": zero_oracle_time}
    doc = {
        "provenance": _provenance(cfg, seed),
        "n": n,
        "marked": marked,
        "iterations": protocols.grover_iterations(n),
        "success_probability_closed_form": protocols.grover_success_probability(n),
        "success_probability_simulated": float(abs(psi[marked - 1]) ** 2),
        "schedule_duration_s": sched.total_duration(),
        "shots": [r.index for r in records],
        "hit_fraction": hits / shots,
    }
    _write(_out_path(out, "grover.json"), json.dumps(doc, indent=2))


# --- ipe ---------------------------------------------------------------------------

@main.command()
@click.option("--hamiltonian", "ham_path", required=True,
              help="model Hamiltonian JSON file")
@click.option("--bits", type=int, required=True)
@click.option("--time", "t", type=float, required=True,
              help="base evolution time (s)")
@click.option("--prep", default="exact", show_default=True,
              help="'exact' or 'adiabatic:<t_prep seconds>'")
@click.option("--shots-per-bit", default=25, show_default=True)
@click.option("--gmax-mhz", default=50.0, show_default=True)
@click.option("--protocol", default="parity-ancilla", show_default=True,
              type=click.Choice([p.value for p in protocols.MeasureProtocol]))
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, help="output JSON path")
@_handle_errors
def ipe(ham_path, bits, t, prep, shots_per_bit, gmax_mhz, protocol, seed, out):
    """Iterative phase estimation of a model Hamiltonian's ground energy."""
    h = core.load_hamiltonian(ham_path)
    if prep == "exact":
        prep_obj = protocols.ExactEigenstate()
    elif prep.startswith("adiabatic:"):
        prep_obj = protocols.Adiabatic(t_prep=float(prep.split(":", 1)[1]))
    else:
        raise click.UsageError("--prep must be 'exact' or 'adiabatic:<seconds>'")
    rng = np.random.default_rng(seed)
    res = protocols.ipe_run(
        h, t, bits, core.mhz_to_rad_s(gmax_mhz), rng, prep=prep_obj,
        shots_per_bit=shots_per_bit,
        protocol=protocols.MeasureProtocol(protocol))
    cfg = {"cmd": "ipe", "hamiltonian": ham_path, "bits": bits, "time": t,
           "prep": prep, "shots_per_bit": shots_per_bit,
           "gmax_mhz": gmax_mhz, "protocol": protocol}
    doc = {
        "provenance": _provenance(cfg, seed),
        "bits_msb_first": list(res.bits),
        "phase": res.phase,
        "energy_rad_s": res.energy,
        "energy_mhz": core.rad_s_to_mhz(res.energy),
        "preparations": res.preparations,
        "prep_overlap": res.prep_overlap,
        "prep_ok": res.prep_ok,
        "total_pulse_time_s": res.total_pulse_time,
        "shot_log": [{"bit": m, "outcome": o} for m, o in res.shot_log],
    }
    _write(_out_path(out, "ipe.json"), json.dumps(doc, indent=2))


# --- rescale -----------------------------------------------------------------------

@main.command()
@click.option("--model", "model_path", required=True,
              help="model Hamiltonian JSON (static or time-dependent)")
@click.option("--gmax-mhz", default=30.0, show_default=True)
@click.option("--out", default=None, help="output JSON path")
@_handle_errors
def rescale(model_path, gmax_mhz, out):
    """Rescale a model Hamiltonian onto hardware limits."""
    with open(model_path) as fh:
        doc = json.load(fh)
    g_max = core.mhz_to_rad_s(gmax_mhz)
    cfg = {"cmd": "rescale", "model": model_path, "gmax_mhz": gmax_mhz}
    if "t_grid" in doc:
        plan = rescaler.rescale_td(core.td_hamiltonian_from_json(doc), g_max)
        payload = json.loads(rescaler.plan_to_json(plan))
        payload["provenance"] = _provenance(cfg, 0)
        _write(_out_path(out, "plan.json"), json.dumps(payload, indent=2))
    else:
        res = rescaler.rescale_static(core.hamiltonian_from_json(doc), g_max)
        payload = {
            "provenance": _provenance(cfg, 0),
            "lambda": res.lam,
            "c_rad_s": res.c,
            "g_max_rad_s": g_max,
            "scaled": core.hamiltonian_to_json(res.h),
        }
        _write(_out_path(out, "rescaled.json"), json.dumps(payload, indent=2))


# --- collide -----------------------------------------------------------------------

def _load_table(table, synthetic):
    if table:
        return coll_mod.load_potential_table(table)
    if synthetic:
        return coll_mod.synthetic_table()
    raise MissingDataError(
        "no potential table given; pass --table FILE (or --synthetic for "
        f"the shipped test table). {TABLE_FORMAT_HELP}")


@main.command()
@click.option("--table", default=None, help="potential-coupling CSV")
@click.option("--synthetic", is_flag=True, help="use the shipped synthetic table")
@click.option("--b", type=float, default=0.5, show_default=True)
@click.option("--v0", type=float, default=2.0, show_default=True)
@click.option("--mu", type=float, default=6214.35, show_default=True)
@click.option("--r-start", type=float, default=50.0, show_default=True)
@click.option("--gmax-mhz", default=30.0, show_default=True)
@click.option("--mode", type=click.Choice(["ideal", "hardware"]),
              default="ideal", show_default=True)
@click.option("--grid", default=4096, show_default=True)
@click.option("--out", default=None, help="output CSV path")
@_handle_errors
def collide(table, synthetic, b, v0, mu, r_start, gmax_mhz, mode, grid, out):
    """Run one semiclassical collision trajectory and emit probability traces."""
    tab = _load_table(table, synthetic)
    params = coll_mod.CollisionParams(b=b, v0=v0, mu=mu, r_start=r_start)
    g_max = core.mhz_to_rad_s(gmax_mhz) if mode == "hardware" else None
    res = coll_mod.run_collision(tab, params, g_max=g_max, grid=grid)
    cfg = {"cmd": "collide", "table": table or "synthetic", "b": b, "v0": v0,
           "mu": mu, "r_start": r_start, "gmax_mhz": gmax_mhz, "mode": mode,
           "grid": grid}
    cols = ["t"] + [f"p{i + 1}" for i in range(tab.m)]
    lines = _csv_header(cfg, 0, cols)
    lines.insert(3, f"# e_cm_ev: {_fmt(res.e_cm_ev)}")
    for k, t in enumerate(res.t_grid):
        lines.append(",".join([_fmt(t)] + [_fmt(p) for p in res.traces[k]]))
    _write(_out_path(out, "traces.csv"), "\n".join(lines))


# --- noise -------------------------------------------------------------------------

@main.group(name="noise")
def noise_group():
    """Decoherence and control-error evaluations."""


@noise_group.command("control")
@click.option("--gmax-mhz", default=50.0, show_default=True)
@click.option("--t-ns", default=10.0, show_default=True)
@click.option("--dv-mhz", default=0.5, show_default=True)
@click.option("--n-list", default="4,16,64,100", show_default=True)
@click.option("--trials", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, help="output CSV path")
@_handle_errors
def noise_control(gmax_mhz, t_ns, dv_mhz, n_list, trials, seed, out):
    """Monte Carlo control error vs dimension, with a power-law fit."""
    ns = _parse_int_list(n_list)
    t = t_ns * 1e-9
    means, ses, (a, b) = noise.control_error_scan(
        ns, core.mhz_to_rad_s(gmax_mhz), t, core.mhz_to_rad_s(dv_mhz),
        trials, seed)
    sigma = core.mhz_to_rad_s(dv_mhz) / math.sqrt(12.0)
    cfg = {"cmd": "noise-control", "gmax_mhz": gmax_mhz, "t_ns": t_ns,
           "dv_mhz": dv_mhz, "n_list": ns, "trials": trials}
    lines = _csv_header(cfg, seed, ["n", "mean_error", "se", "perturbative"])
    lines.insert(3, f"# fit: {_fmt(a)} * n^{b:.4f}")
    for i, n in enumerate(ns):
        rng = np.random.default_rng((seed, 10_000 + n))
        pert = float(np.mean([
            noise.control_error_perturbative(
                core.mhz_to_rad_s(gmax_mhz) * ensemble.sample_k(n, rng),
                sigma, t)
            for _ in range(100)]))
        lines.append(",".join([str(n), _fmt(means[i]), _fmt(ses[i]), _fmt(pert)]))
    _write(_out_path(out, "control_error.csv"), "\n".join(lines))


# --- bench -------------------------------------------------------------------------

@main.command("bench")
@click.option("--mode", type=click.Choice(["const", "td"]), default="const",
              show_default=True)
@click.option("--n-list", default="16,32,64,128,256,512", show_default=True)
@click.option("--trials", default=5, show_default=True)
@click.option("--kernels", default=None,
              help="comma list; const: diagonalization,pade,krylov,runge-kutta;"
                   " td: runge-kutta,time-sliced")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, help="output CSV path")
@_handle_errors
def bench_cmd(mode, n_list, trials, kernels, seed, out):
    """Benchmark propagator kernels and fit runtime power laws."""
    from . import propagators as prop
    ns = _parse_int_list(n_list)
    const_map = {"diagonalization": prop.Diagonalization(),
                 "pade": prop.PadeExpm(), "krylov": prop.Krylov(),
                 "runge-kutta": prop.RungeKutta()}
    td_map = {"runge-kutta": prop.RungeKutta(),
              "time-sliced": prop.TimeSliced(dt=0.1e-9)}
    table = const_map if mode == "const" else td_map
    if kernels:
        names = [k.strip() for k in kernels.split(",") if k.strip()]
        unknown = [k for k in names if k not in table]
        if unknown:
            raise click.UsageError(f"unknown kernels for mode {mode}: {unknown}")
        selected = {k: table[k] for k in names}
    else:
        selected = ({"diagonalization": const_map["diagonalization"],
                     "pade": const_map["pade"]} if mode == "const"
                    else {"runge-kutta": td_map["runge-kutta"]})
    fn = bench_mod.bench_const if mode == "const" else bench_mod.bench_td
    report = fn(ns, trials=trials, kernels=selected, seed=seed)
    cfg = {"cmd": "bench", "mode": mode, "n_list": ns, "trials": trials,
           "kernels": sorted(selected)}
    header = _csv_header(cfg, seed, ["kernel", "n", "mean_s", "std_s", "samples"])
    body = bench_mod.report_to_csv(report).splitlines()[1:]
    path = _out_path(out, "bench.csv")
    _write(path, "\n".join(header + body))
    summary = json.loads(bench_mod.report_summary_json(report))
    summary["provenance"] = _provenance(cfg, seed)
    _write(path.rsplit(".", 1)[0] + "_summary.json", json.dumps(summary, indent=2))


# --- figure recipes ------------------------------------------------------------------

FIGURES = ("fig2", "fig3", "fig4", "fig7", "fig8", "fig9", "fig10", "fig11",
           "fig12", "fig13", "fig14", "fig15")


def _ensemble_figure(name, ns, trials, seed, columns):
    cfg = {"cmd": f"figure:{name}", "n_list": ns, "trials": trials}
    lines = _csv_header(cfg, seed, ["n"] + columns)
    xs, ys = [], []
    for n in ns:
        s = ensemble.spectral_stats(n, trials, seed)
        val = s.mean_bandwidth if "bandwidth" in columns[0] else s.mean_spacing
        se = s.se_bandwidth if "bandwidth" in columns[0] else s.se_spacing
        xs.append(n)
        ys.append(val)
        lines.append(",".join([str(n), _fmt(val), _fmt(se)]))
    a, b = ensemble.fit_power_law(np.array(xs, float), np.array(ys))
    lines.insert(3, f"# fit: {_fmt(a)} * n^{b:.4f}")
    return lines


def _collision_outputs(table, synthetic, trials, seed, out_dir, which):
    tab = _load_table(table, synthetic)
    params = coll_mod.CollisionParams(b=0.5, v0=2.0, mu=6214.35)
    g_max = core.mhz_to_rad_s(30.0)
    cfg = {"cmd": f"figure:{which}", "table": table or "synthetic",
           "b": 0.5, "v0": 2.0, "mu": 6214.35, "gmax_mhz": 30.0}
    if which == "fig9":
        res = coll_mod.run_collision(tab, params, grid=8192,
                                     check_convergence=False)
        cols = ["t_au"] + [f"p{i + 1}" for i in range(tab.m)]
        lines = _csv_header(cfg, seed, cols)
        for k, t in enumerate(res.t_grid):
            lines.append(",".join([_fmt(t)] + [_fmt(p) for p in res.traces[k]]))
        return lines
    # the scale factor varies steeply across the repulsive wall; a dense
    # grid keeps adjacent-sample variation inside the rescaler's bound
    res = coll_mod.run_collision(tab, params, g_max=g_max, grid=20000,
                                 check_convergence=False)
    plan = res.plan
    if which == "fig10":
        lines = _csv_header(cfg, seed, ["t_s", "lambda"])
        for t, lam in zip(plan.t_grid, plan.lambda_of_t):
            lines.append(f"{_fmt(t)},{_fmt(lam)}")
        return lines
    if which == "fig11":
        lines = _csv_header(cfg, seed, ["t_qc_s", "t_s"])
        for t, tqc in zip(plan.t_grid, plan.time_map):
            lines.append(f"{_fmt(tqc)},{_fmt(t)}")
        return lines
    m = plan.scaled.n
    cols = ["t_qc_s"] + [f"h{i + 1}{j + 1}_rad_s"
                         for i in range(m) for j in range(i, m)]
    lines = _csv_header(cfg, seed, cols)
    for k, tqc in enumerate(plan.scaled.t_grid):
        mat = plan.scaled.matrices[k]
        vals = [mat[i, j] for i in range(m) for j in range(i, m)]
        lines.append(",".join([_fmt(tqc)] + [_fmt(v) for v in vals]))
    return lines


def _control_error_figure(name, ns, trials, seed, t_ns):
    g_max = core.mhz_to_rad_s(50.0)
    dv = core.mhz_to_rad_s(0.5)
    t = t_ns * 1e-9
    means, ses, (a, b) = noise.control_error_scan(ns, g_max, t, dv, trials, seed)
    cfg = {"cmd": f"figure:{name}", "n_list": ns, "trials": trials,
           "t_ns": t_ns, "dv_mhz": 0.5, "gmax_mhz": 50.0}
    lines = _csv_header(cfg, seed, ["n", "e_mc", "se", "e_perturbative"])
    lines.insert(3, f"# fit: {_fmt(a)} * n^{b:.4f}")
    sigma = dv / math.sqrt(12.0)
    for i, n in enumerate(ns):
        rng = np.random.default_rng((seed, 10_000 + n))
        pert = float(np.mean([
            noise.control_error_perturbative(g_max * ensemble.sample_k(n, rng),
                                             sigma, t)
            for _ in range(100)]))
        lines.append(",".join([str(n), _fmt(means[i]), _fmt(ses[i]), _fmt(pert)]))
    return lines


@main.command()
@click.argument("name", type=click.Choice(FIGURES))
@click.option("--trials", default=None, type=int,
              help="override the recipe's trial count")
@click.option("--seed", default=0, show_default=True)
@click.option("--table", default=None, help="potential CSV (fig9-fig12)")
@click.option("--synthetic", is_flag=True,
              help="use the synthetic table for fig9-fig12")
@click.option("--out-dir", default=None, help="output directory")
@_handle_errors
def figure(name, trials, seed, table, synthetic, out_dir):
    """Regenerate the dataset behind one named figure."""
    out_dir = out_dir or os.environ.get("SESIM_OUTDIR", ".")
    path = os.path.join(out_dir, f"{name}.csv")
    if name == "fig2":
        lines = _ensemble_figure(name, _log_spaced(2, 100, 12), trials or 1000,
                                 seed, ["mean_bandwidth", "se_bandwidth"])
    elif name == "fig3":
        lines = _ensemble_figure(name, _log_spaced(100, 500, 8), trials or 1000,
                                 seed, ["mean_bandwidth", "se_bandwidth"])
    elif name == "fig4":
        lines = _ensemble_figure(name, _log_spaced(2, 100, 12), trials or 1000,
                                 seed, ["mean_spacing", "se_spacing"])
    elif name in ("fig7", "fig8"):
        ns = [16, 32, 64, 128, 256, 512]
        if name == "fig7":
            report = bench_mod.bench_const(ns, trials=trials or 5, seed=seed)
        else:
            report = bench_mod.bench_td(ns, trials=trials or 3, seed=seed)
        cfg = {"cmd": f"figure:{name}", "n_list": ns, "trials": trials}
        lines = _csv_header(cfg, seed, ["kernel", "n", "mean_s", "std_s",
                                        "samples"])
        lines += bench_mod.report_to_csv(report).splitlines()[1:]
        for kernel, (a, b) in sorted(report.fits.items()):
            lines.insert(3, f"# fit[{kernel}]: {_fmt(a)} * n^{b:.4f}")
    elif name in ("fig9", "fig10", "fig11", "fig12"):
        lines = _collision_outputs(table, synthetic, trials, seed, out_dir, name)
    elif name == "fig13":
        lines = _control_error_figure(name, _log_spaced(4, 100, 10),
                                      trials or 1000, seed, t_ns=10.0)
    elif name == "fig14":
        lines = _control_error_figure(name, _log_spaced(4, 100, 10),
                                      trials or 1000, seed, t_ns=100.0)
    else:
        lines = _control_error_figure(name, _log_spaced(100, 1000, 6),
                                      trials or 200, seed, t_ns=100.0)
    _write(path, "\n".join(lines))


if __name__ == "__main__":
    main()
