"""Command-line entry point.

One scenario per invocation; every scenario writes its delimited output,
matplotlib figures, and a JSON run manifest with per-assertion pass/fail
into the output directory.  Exit code 0 means every scenario assertion
passed, 1 means an assertion failed, 2 means the configuration was bad.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import re
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import attraction_metrics, trace_spectrum
from .errors import ConfigError, DiracPointError, UnknownSpec
from .evolution import (
    SimConfig,
    SpinorField,
    cone_kernel,
    duhamel_solution,
    run,
)
from .model import Grid, ModelParams, nonlinearity_F
from .solitary import linear_frequencies, scan_branch, solitary_params, solitary_field
from . import report

FLOAT_FMT = "%.17g"


# ---------------------------------------------------------------------------
# configuration plumbing

def _deep_update(base: dict, extra: dict) -> dict:
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], val)
        else:
            base[key] = val
    return base


def load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc


def build_model(doc: dict) -> ModelParams:
    try:
        return ModelParams.from_json_dict(doc)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad model section: {exc}") from exc


def build_grid(doc: dict) -> Grid:
    try:
        return Grid(L=float(doc["L"]), n=int(doc["n"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad grid section: {exc}") from exc


def build_sim(doc: dict, model: ModelParams, grid: Grid) -> SimConfig:
    t = doc.get("time", {})
    b = doc.get("boundary", {})
    d = doc.get("diagnostics", {})
    tol = d.get("energy_drift_tol", 1e-6)
    return SimConfig(
        model=model, grid=grid,
        dt=float(t.get("dt", 1e-3)), T=float(t.get("T", 10.0)),
        boundary=b.get("kind", "conservative"),
        absorb_width=float(b.get("width", min(10.0, grid.L / 4))),
        absorb_strength=float(b.get("strength", 2.0)),
        record_every=int(t.get("record_every", 1)),
        snapshot_times=tuple(t.get("snapshot_times", ())),
        energy_drift_tol=None if tol is None else float(tol),
        local_radius=float(d.get("local_radius", 5.0 / model.m)),
    )


def _complex_of(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(float(v), 0.0)


def initial_data_factory(spec: dict, grid: Grid, p: ModelParams) -> SpinorField:
    """Build localized initial data: solitary, gaussian, or seeded noise."""
    kind = spec.get("kind")
    if kind == "solitary":
        sp = solitary_params(
            p, float(spec.get("omega1", 0.0)), float(spec.get("omega2", 0.0)),
            root_index1=int(spec.get("root_index1", -1)),
            root_index2=int(spec.get("root_index2", -1)),
            phase1=float(spec.get("phase1", 0.0)),
            phase2=float(spec.get("phase2", 0.0)),
        )
        scale = float(spec.get("scale", 1.0))
        field = solitary_field(sp, grid, 0.0)
        field.values *= scale
        return field
    if kind == "gaussian":
        center = float(spec.get("center", 0.0))
        width = float(spec.get("width", 1.0))
        amplitude = float(spec.get("amplitude", 1.0))
        carrier = float(spec.get("carrier", 0.0))
        direction = spec.get("spinor", [1.0, 0.0])
        envelope = amplitude * np.exp(-((grid.x - center) ** 2) / (2 * width**2))
        wave = envelope * np.exp(1j * carrier * grid.x)
        values = np.stack([_complex_of(direction[0]) * wave,
                           _complex_of(direction[1]) * wave])
        return SpinorField(grid, values)
    if kind == "noise":
        seed = int(spec.get("seed", 0))
        width = float(spec.get("envelope_width", 3.0))
        amplitude = float(spec.get("amplitude", 0.5))
        rng = np.random.default_rng(seed)
        raw = rng.standard_normal((2, grid.n)) + 1j * rng.standard_normal((2, grid.n))
        raw *= np.exp(-(grid.x**2) / (2 * width**2))
        # band-limit so the draw is honest H1 data
        low_pass = np.exp(-((grid.k / (4.0 * p.m)) ** 2))
        values = np.fft.ifft(np.fft.fft(raw, axis=1) * low_pass, axis=1)
        peak = np.abs(values).max()
        if peak > 0:
            values *= amplitude / peak
        return SpinorField(grid, values)
    raise UnknownSpec(f"unknown initial-data kind {kind!r}")


# ---------------------------------------------------------------------------
# output writers

def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(FLOAT_FMT % v for v in row) + "\n")


def write_trace_csv(path: Path, trace) -> None:
    rows = zip(trace.times,
               trace.y[:, 0].real, trace.y[:, 0].imag,
               trace.y[:, 1].real, trace.y[:, 1].imag,
               trace.energy, trace.l2, trace.h1, trace.h1_local)
    _write_csv(path, ["t", "re_y1", "im_y1", "re_y2", "im_y2",
                      "energy", "l2", "h1", "h1_local"], rows)


def write_snapshot_csv(path: Path, field: SpinorField) -> None:
    v = field.values
    rows = zip(field.grid.x, v[0].real, v[0].imag, v[1].real, v[1].imag)
    _write_csv(path, ["x", "re_psi1", "im_psi1", "re_psi2", "im_psi2"], rows)


def write_spectrum_csv(path: Path, rep) -> None:
    rows = zip(rep.omega, rep.power[0], rep.power[1])
    _write_csv(path, ["omega", "power_1", "power_2"], rows)


def write_manifest(path: Path, scenario: str, config_echo: dict,
                   outputs: list[Path], assertions: list[dict],
                   wall_time: float) -> None:
    doc = {
        "scenario": scenario,
        "version": __version__,
        "config": config_echo,
        "wall_time_s": wall_time,
        "outputs": [str(p) for p in outputs],
        "assertions": assertions,
        "ok": all(a["passed"] for a in assertions),
    }
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


class Scenario:
    """Collects outputs and assertions, then settles the exit code."""

    def __init__(self, name: str, args):
        self.name = name
        self.out_dir = Path(args.out_dir or f"{name}-out")
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs: list[Path] = []
        self.assertions: list[dict] = []
        self.t0 = time.perf_counter()

    def emit(self, path: Path) -> Path:
        self.outputs.append(path)
        return path

    def check(self, name: str, passed: bool, detail: str) -> None:
        self.assertions.append({"name": name, "passed": bool(passed),
                                "detail": detail})
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")

    def finish(self, config_echo: dict) -> int:
        manifest = self.out_dir / "manifest.json"
        write_manifest(manifest, self.name, config_echo, self.outputs,
                       self.assertions, time.perf_counter() - self.t0)
        self.outputs.append(manifest)
        if all(a["passed"] for a in self.assertions):
            return 0
        failed = [a["name"] for a in self.assertions if not a["passed"]]
        print(f"failed assertions: {', '.join(failed)}", file=sys.stderr)
        return 1


# ---------------------------------------------------------------------------
# scenarios

SIMULATE_DEFAULTS = {
    "model": {"m": 1.0, "mode": "polynomial",
              "u": [[0.0, -0.5, 0.25], [0.0, -0.5, 0.25]]},
    "grid": {"L": 40.0, "n": 4096},
    "time": {"dt": 1e-3, "T": 10.0, "record_every": 1, "snapshot_times": []},
    "boundary": {"kind": "conservative"},
    "initial": {"kind": "gaussian", "amplitude": 0.5, "width": 2.0,
                "spinor": [1.0, 0.5]},
    "diagnostics": {"local_radius": 5.0, "energy_drift_tol": 1e-6},
}


def _merged_config(defaults: dict, args) -> dict:
    doc = json.loads(json.dumps(defaults))
    if getattr(args, "config", None):
        _deep_update(doc, load_config_file(args.config))
    if isinstance(doc.get("initial"), dict) and getattr(args, "seed", None):
        doc["initial"].setdefault("seed", args.seed)
    return doc


def cmd_simulate(args) -> int:
    doc = _merged_config(SIMULATE_DEFAULTS, args)
    if args.boundary:
        doc["boundary"]["kind"] = args.boundary
    sc = Scenario("simulate", args)
    model = build_model(doc["model"])
    grid = build_grid(doc["grid"])
    cfg = build_sim(doc, model, grid)
    initial = initial_data_factory(doc["initial"], grid, model)

    drift_failure = None
    try:
        result = run(cfg, initial)
    except DiracPointError as exc:
        drift_failure = str(exc)
        result = None

    if result is not None:
        trace_path = Path(args.out_trace) if args.out_trace \
            else sc.out_dir / "trace.csv"
        write_trace_csv(trace_path, result.trace)
        sc.emit(trace_path)
        snap_dir = Path(args.out_snapshots) if args.out_snapshots \
            else sc.out_dir / "snapshots"
        snap_dir.mkdir(parents=True, exist_ok=True)
        for t, fieldval in sorted(result.snapshots.items()):
            p = snap_dir / f"snapshot_t{t:g}.csv"
            write_snapshot_csv(p, fieldval)
            sc.emit(p)
        final_path = snap_dir / "snapshot_final.csv"
        write_snapshot_csv(final_path, result.final)
        sc.emit(final_path)
        report.save_trace_plot(sc.emit(sc.out_dir / "trace.svg"), result.trace)
        report.save_snapshot_plot(sc.emit(sc.out_dir / "final_snapshot.svg"),
                                  {"final": result.final})
        if cfg.boundary == "conservative":
            e = result.trace.energy
            drift = float(np.max(np.abs(e - e[0])) / max(1.0, abs(e[0])))
            tol = cfg.energy_drift_tol or math.inf
            sc.check("energy_drift", drift < tol,
                     f"relative drift {drift:.3e} (tol {tol:.1e})")
        else:
            sc.check("completed", True, f"absorbing run to T = {cfg.T}")
    else:
        sc.check("run", False, drift_failure)
    return sc.finish(doc)


def _parse_coeffs(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad coefficient list {text!r}") from exc


def _scan_worker(payload):
    model_doc, j, omegas = payload
    return scan_branch(ModelParams.from_json_dict(model_doc), j, omegas)


def cmd_solitary_scan(args) -> int:
    sc = Scenario("solitary-scan", args)
    u1 = [0.0] + _parse_coeffs(args.potential)
    u2 = [0.0] + _parse_coeffs(args.potential2) if args.potential2 else list(u1)
    model = ModelParams(m=args.m, mode="polynomial",
                        u=(tuple(u1), tuple(u2)))
    interior = np.linspace(-model.m, model.m, args.omega_grid + 2)[1:-1]

    jobs = [(model.to_json_dict(), j, chunk)
            for j in (1, 2)
            for chunk in np.array_split(interior, max(1, args.threads))]
    if args.threads > 1:
        with concurrent.futures.ProcessPoolExecutor(args.threads) as pool:
            chunks = list(pool.map(_scan_worker, jobs))
    else:
        chunks = [_scan_worker(job) for job in jobs]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r.j, r.omega, r.root_index))

    csv_path = sc.emit(sc.out_dir / "branches.csv")
    _write_csv(csv_path, ["j", "omega", "root_index", "C", "residual", "h1_norm"],
               [(r.j, r.omega, r.root_index, r.C, r.residual, r.h1_norm)
                for r in records])
    summary = {}
    for j in (1, 2):
        live = [r.omega for r in records if r.j == j and r.C > 0]
        summary[f"component_{j}"] = {
            "omega_min": min(live) if live else None,
            "omega_max": max(live) if live else None,
            "nonzero_roots": len(live),
        }
    summary_path = sc.emit(sc.out_dir / "branch_summary.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    report.save_branch_plot(sc.emit(sc.out_dir / "branches.svg"), records, model.m)

    worst = max((r.residual for r in records), default=0.0)
    sc.check("branch_residuals", worst < 1e-10,
             f"max amplitude-equation residual {worst:.3e}")
    return sc.finish({"model": model.to_json_dict(),
                      "omega_grid": args.omega_grid})


LINEAR_DEFAULTS = {
    "grid": {"L": 40.0, "n": 2048},
    "time": {"dt": 2e-3, "record_every": 2, "settle": 100.0},
    "boundary": {"kind": "absorbing", "width": 10.0, "strength": 2.0},
    "initial": {"kind": "gaussian", "amplitude": 0.1, "width": 2.0,
                "spinor": [1.0, 0.8]},
}


def cmd_linear_verify(args) -> int:
    sc = Scenario("linear-verify", args)
    doc = _merged_config(LINEAR_DEFAULTS, args)
    a = _parse_coeffs(args.a)
    if len(a) != 2:
        raise ConfigError("--a needs two couplings, e.g. 1,1")
    model = ModelParams(m=args.m, mode="linear", a=(a[0], a[1]))
    grid = build_grid(doc["grid"])
    settle = float(doc["time"]["settle"])
    window = (settle, settle + args.T)
    doc["time"]["T"] = window[1]
    doc.setdefault("diagnostics", {})["energy_drift_tol"] = None
    cfg = build_sim(doc, model, grid)
    initial = initial_data_factory(doc["initial"], grid, model)

    result = run(cfg, initial)
    rep = trace_spectrum(result.trace, window, model.m, taper=True)
    predicted = linear_frequencies(model)
    bin_width = 2.0 * np.pi / (rep.t1 - rep.t0)

    write_spectrum_csv(sc.emit(sc.out_dir / "spectrum.csv"), rep)
    report.save_spectrum_plot(sc.emit(sc.out_dir / "spectrum.svg"), [rep],
                              marks=[w for w in predicted if w is not None])
    write_trace_csv(sc.emit(sc.out_dir / "trace.csv"), result.trace)

    for j in (1, 2):
        want = predicted[j - 1]
        if want is None:
            got = rep.peaks[j - 1]
            sc.check(f"component_{j}_no_bound_state", not got,
                     "no nonzero wave expected")
            continue
        got = rep.peaks[j - 1][0].omega if rep.peaks[j - 1] else math.nan
        sc.check(
            f"component_{j}_peak", abs(got - want) <= bin_width,
            f"measured {got:.6f} vs predicted {want:.10f} "
            f"(one bin = {bin_width:.4f})",
        )
        sc.check(f"component_{j}_gap_mass", rep.gap_mass[j - 1] > 0.95,
                 f"gap mass {rep.gap_mass[j - 1]:.4f}")
    return sc.finish({"model": model.to_json_dict(), "window": list(window),
                      "config": doc})


ATTRACTOR_DEFAULTS = {
    "model": {"m": 1.0, "mode": "polynomial",
              "u": [[0.0, -0.5, 0.25], [0.0, -0.5, 0.25]]},
    "grid": {"L": 40.0, "n": 2048},
    "time": {"dt": 2e-3, "T": 600.0, "record_every": 2},
    "boundary": {"kind": "absorbing", "width": 10.0, "strength": 2.0},
    "initial": {"kind": "gaussian", "amplitude": 0.5, "width": 2.0,
                "spinor": [1.0, 0.7]},
    "diagnostics": {"local_radius": 5.0, "windows": [[150.0, 300.0],
                                                     [300.0, 450.0],
                                                     [450.0, 600.0]]},
}


def cmd_attractor_test(args) -> int:
    sc = Scenario("attractor-test", args)
    doc = _merged_config(ATTRACTOR_DEFAULTS, args)
    model = build_model(doc["model"])
    grid = build_grid(doc["grid"])
    windows = [tuple(w) for w in doc["diagnostics"]["windows"]]
    doc["time"]["snapshot_times"] = sorted({w[1] for w in windows})
    doc["diagnostics"]["energy_drift_tol"] = None
    cfg = build_sim(doc, model, grid)
    initial = initial_data_factory(doc["initial"], grid, model)

    result = run(cfg, initial)
    metrics = attraction_metrics(result, model, windows,
                                 R=cfg.local_radius)

    for i, wm in enumerate(metrics):
        write_spectrum_csv(
            sc.emit(sc.out_dir / f"spectrum_window{i}.csv"), wm.spectrum)
    _write_csv(
        sc.emit(sc.out_dir / "metrics.csv"),
        ["window_t0", "window_t1", "gap_mass_1", "gap_mass_2",
         "flatness_1", "flatness_2", "fit_omega1", "fit_omega2",
         "fit_residual"],
        [(wm.t0, wm.t1, wm.gap_mass[0], wm.gap_mass[1], wm.flatness[0],
          wm.flatness[1], wm.fit.omega1, wm.fit.omega2, wm.fit.residual)
         for wm in metrics],
    )
    report.save_spectrum_plot(sc.emit(sc.out_dir / "spectra.svg"),
                              [wm.spectrum for wm in metrics])
    report.save_metric_trends(sc.emit(sc.out_dir / "metrics.svg"), metrics)
    write_trace_csv(sc.emit(sc.out_dir / "trace.csv"), result.trace)

    for j in (1, 2):
        gm = [wm.gap_mass[j - 1] for wm in metrics]
        fl = [wm.flatness[j - 1] for wm in metrics]
        sc.check(f"gap_mass_{j}_trend",
                 all(b >= a for a, b in zip(gm, gm[1:])) and gm[-1] > 0.9,
                 f"series {['%.4f' % v for v in gm]}")
        sc.check(f"flatness_{j}_trend",
                 all(b <= a for a, b in zip(fl, fl[1:])) and fl[-1] < 0.1,
                 f"series {['%.4f' % v for v in fl]}")
    fr = [wm.fit.residual for wm in metrics]
    sc.check("fit_residual_trend", all(b <= a for a, b in zip(fr, fr[1:])),
             f"series {['%.4e' % v for v in fr]}")
    return sc.finish(doc)


DUHAMEL_DEFAULTS = {
    "model": {"m": 1.0, "mode": "polynomial",
              "u": [[0.0, -0.5, 0.25], [0.0, -0.5, 0.25]]},
    "initial": {"kind": "gaussian", "amplitude": 0.5, "width": 1.0,
                "spinor": [1.0, 0.5]},
    "time": {"T": 0.5},
    "levels": [{"L": 40.0, "n": 4096, "dt": 1e-3},
               {"L": 40.0, "n": 8192, "dt": 5e-4}],
}


def _duhamel_gap(model, initial_doc, L, n, dt, T) -> float:
    grid = Grid(L=L, n=n)
    cfg = SimConfig(model=model, grid=grid, dt=dt, T=T,
                    energy_drift_tol=None)
    initial = initial_data_factory(initial_doc, grid, model)
    result = run(cfg, initial)
    trace_f = nonlinearity_F(model, result.trace.y.T).T
    rebuilt = duhamel_solution(cfg, initial, trace_f)
    diff = rebuilt.values - result.final.values
    return float(np.sqrt(grid.dx * np.sum(np.abs(diff) ** 2)))


def cmd_duhamel_check(args) -> int:
    sc = Scenario("duhamel-check", args)
    doc = _merged_config(DUHAMEL_DEFAULTS, args)
    model = build_model(doc["model"])
    T = float(doc["time"]["T"])
    levels = doc["levels"]

    gaps = [_duhamel_gap(model, doc["initial"], float(lv["L"]), int(lv["n"]),
                         float(lv["dt"]), T) for lv in levels]
    base, fine = gaps[0], gaps[-1]
    kernel_origin = float(cone_kernel(0.0, 1e-9, model.m))

    _write_csv(sc.emit(sc.out_dir / "errors.csv"),
               ["dt", "n", "l2_difference"],
               [(lv["dt"], lv["n"], g) for lv, g in zip(levels, gaps)])

    sc.check("reconstruction_error", base < 1e-3,
             f"L2 difference {base:.3e} at dt={levels[0]['dt']}, "
             f"n={levels[0]['n']}")
    ratio = base / fine if fine > 0 else math.inf
    sc.check("refinement_gain", ratio >= 3.0,
             f"error ratio {ratio:.2f} after halving dt and dx")
    sc.check("cone_kernel_origin", kernel_origin == 0.5,
             f"kernel at (0, 0+) = {kernel_origin}")
    return sc.finish(doc)


CONVERGENCE_DEFAULTS = {
    "model": {"m": 1.0, "mode": "polynomial",
              "u": [[0.0, -0.5, 0.25], [0.0, -0.5, 0.25]]},
    "grid": {"L": 40.0, "n": 4096},
    "initial": {"kind": "gaussian", "amplitude": 0.5, "width": 2.0,
                "spinor": [1.0, 0.5]},
    "time": {"T": 1.0},
}


def _final_field_worker(payload):
    doc, dt = payload
    model = build_model(doc["model"])
    grid = build_grid(doc["grid"])
    cfg = SimConfig(model=model, grid=grid, dt=dt, T=float(doc["time"]["T"]),
                    record_every=10**9, energy_drift_tol=None)
    initial = initial_data_factory(doc["initial"], grid, model)
    return run(cfg, initial).final.values


def cmd_convergence_study(args) -> int:
    sc = Scenario("convergence-study", args)
    doc = _merged_config(CONVERGENCE_DEFAULTS, args)
    dts = _parse_coeffs(args.dts)
    if len(dts) < 3:
        raise ConfigError("need at least three dt values")

    jobs = [(doc, dt) for dt in dts]
    if args.threads > 1:
        with concurrent.futures.ProcessPoolExecutor(args.threads) as pool:
            finals = list(pool.map(_final_field_worker, jobs))
    else:
        finals = [_final_field_worker(job) for job in jobs]

    dx = 2.0 * doc["grid"]["L"] / doc["grid"]["n"]
    diffs = [float(np.sqrt(dx * np.sum(np.abs(a - b) ** 2)))
             for a, b in zip(finals, finals[1:])]
    orders = [math.log2(d1 / d2) for d1, d2 in zip(diffs, diffs[1:])]
    order = orders[-1]

    _write_csv(sc.emit(sc.out_dir / "convergence.csv"),
               ["dt_coarse", "dt_fine", "l2_difference"],
               [(dts[i], dts[i + 1], diffs[i]) for i in range(len(diffs))])
    report.save_convergence_plot(sc.emit(sc.out_dir / "convergence.svg"),
                                 dts[:-1], diffs)
    sc.check("strang_order", 1.8 <= order <= 2.2,
             f"measured order {order:.3f} from diffs {diffs}")
    return sc.finish({"config": doc, "dts": dts})


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracpoint",
        description="1D Dirac field with a point-attached nonlinear "
                    "oscillator: solitary waves, evolution, attractor tests.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="scenario", required=True)

    def common(sp):
        # let values like "-0.5,0.25" pass as arguments, not flags
        sp._negative_number_matcher = re.compile(r"^-\d")
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out-dir", help="output directory")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int,
                        default=int(os.environ.get("DIRAC_ATTR_THREADS", "1")))

    sp = sub.add_parser("simulate", help="run one evolution and dump outputs")
    common(sp)
    sp.add_argument("--out-trace")
    sp.add_argument("--out-snapshots")
    sp.add_argument("--boundary", choices=["conservative", "absorbing"])
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("solitary-scan", help="tabulate amplitude branches")
    common(sp)
    sp.add_argument("--m", type=float, default=1.0)
    sp.add_argument("--potential", default="-0.5,0.25",
                    help="coefficients u_1,...,u_N (u_0 = 0)")
    sp.add_argument("--potential2", default=None)
    sp.add_argument("--omega-grid", type=int, default=64)
    sp.set_defaults(func=cmd_solitary_scan)

    sp = sub.add_parser("linear-verify",
                        help="check the linear-coupling bound-state peaks")
    common(sp)
    sp.add_argument("--m", type=float, default=1.0)
    sp.add_argument("--a", default="1,1")
    sp.add_argument("--T", type=float, default=400.0,
                    help="spectral window length")
    sp.set_defaults(func=cmd_linear_verify)

    sp = sub.add_parser("attractor-test",
                        help="late-window attraction metrics")
    common(sp)
    sp.set_defaults(func=cmd_attractor_test)

    sp = sub.add_parser("duhamel-check",
                        help="integral-form reconstruction cross-check")
    common(sp)
    sp.set_defaults(func=cmd_duhamel_check)

    sp = sub.add_parser("convergence-study", help="time-step order study")
    common(sp)
    sp.add_argument("--dts", default="4e-3,2e-3,1e-3")
    sp.set_defaults(func=cmd_convergence_study)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UnknownSpec) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DiracPointError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
