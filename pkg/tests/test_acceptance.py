"""Acceptance suite.

One test per acceptance criterion, each printing a single PASS/FAIL line
with its measured values and runtime (run with `pytest -s` to see every
line).  Tolerances are fixed here, not tuned at runtime.
"""

import json
import math
import time

import numpy as np
import pytest

from diracpoint import (
    Grid,
    ModelParams,
    SpinorField,
    SimConfig,
    duhamel_solution,
    energy,
    fit_solitary,
    free_step,
    nonlinearity_F,
    norms,
    run,
)
from diracpoint.cli import initial_data_factory, main
from diracpoint.evolution import cone_kernel
from diracpoint.solitary import (
    SolitaryParams,
    amplitude_roots,
    dispersion_point,
    jump_residual,
    solitary_field,
    solitary_params,
    stable_b,
)

CUBIC_QUINTIC = ModelParams(m=1.0, u=((0.0, -0.5, 0.25), (0.0, -0.5, 0.25)))


def report(tag: str, passed: bool, detail: str, t0: float) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"[{tag}] {status} — {detail} ({time.perf_counter() - t0:.1f}s)",
          flush=True)


def l2_gap(a: np.ndarray, b: np.ndarray, dx: float) -> float:
    return float(np.sqrt(dx * np.sum(np.abs(a - b) ** 2)))


def test_criterion_1_dispersion_identities():
    t0 = time.perf_counter()
    m = 1.0
    rng = np.random.default_rng(0)
    omegas = np.concatenate([np.linspace(-m, m, 5000),
                             rng.uniform(-m, m, 5000)])
    worst_circle = 0.0
    worst_overlap = 0.0
    for w in omegas:
        d = dispersion_point(w, m)
        worst_circle = max(worst_circle, abs(d.kappa**2 + w * w - m * m))
        worst_overlap = max(worst_overlap, abs(d.kappa - (-1j) * d.k))
    ok = worst_circle < 1e-12 and worst_overlap < 1e-12
    report("criterion 1: dispersion identities", ok,
           f"max |kappa^2+w^2-m^2| = {worst_circle:.2e}, "
           f"max |kappa + ik| = {worst_overlap:.2e} over {len(omegas)} samples",
           t0)
    assert ok


def test_criterion_2_solitary_certificates():
    t0 = time.perf_counter()
    p = CUBIC_QUINTIC
    omegas = np.linspace(-1.0, 1.0, 66)[1:-1]
    worst = 0.0
    n_waves = 0
    rng = np.random.default_rng(1)
    for w1, w2 in zip(omegas, omegas[::-1]):
        for c1 in amplitude_roots(p, w1, 1):
            for c2 in amplitude_roots(p, w2, 2):
                sp = SolitaryParams(
                    m=p.m, omega1=w1, omega2=w2,
                    C1=c1 * np.exp(1j * rng.uniform(0, 2 * np.pi)),
                    C2=c2 * np.exp(1j * rng.uniform(0, 2 * np.pi)))
                r1, r2 = jump_residual(sp, p, t=rng.uniform(0, 5))
                worst = max(worst, r1, r2)
                n_waves += 1

    # independent bisection on 2 C kappa - F_1(C b) = 0 at omega = 0.9
    kap = math.sqrt(1 - 0.81)
    b = stable_b(0.9, 1, 1.0)
    lo, hi = 1e-9, 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo_val = 2 * lo * kap - (1 - (lo * b) ** 2) * (lo * b)
        mid_val = 2 * mid * kap - (1 - (mid * b) ** 2) * (mid * b)
        if lo_val * mid_val <= 0:
            hi = mid
        else:
            lo = mid
    oracle = 0.5 * (lo + hi)
    got = amplitude_roots(p, 0.9, 1)[-1]
    root_gap = abs(got - oracle)

    ok = worst < 1e-10 and root_gap < 1e-9
    report("criterion 2: solitary-wave certificates", ok,
           f"max jump residual {worst:.2e} over {n_waves} waves; "
           f"C(0.9) = {got:.6f} vs oracle {oracle:.6f} (|diff| = {root_gap:.1e})",
           t0)
    assert ok


@pytest.fixture(scope="module")
def conservative_runs():
    grid = Grid(L=40.0, n=4096)
    p = CUBIC_QUINTIC
    sp = solitary_params(p, 0.9, -0.8)
    data = {
        "solitary": solitary_field(sp, grid, 0.0),
        "gaussian": initial_data_factory(
            {"kind": "gaussian", "amplitude": 0.5, "width": 2.0,
             "spinor": [1.0, 0.5]}, grid, p),
    }
    out = {}
    for name, init in data.items():
        cfg = SimConfig(model=p, grid=grid, dt=1e-3, T=10.0,
                        energy_drift_tol=None, record_every=10)
        out[name] = run(cfg, init)
    return grid, data, out


def test_criterion_3_energy_conservation_and_order(conservative_runs):
    t0 = time.perf_counter()
    grid, data, results = conservative_runs
    drifts = {}
    for name, res in results.items():
        e = res.trace.energy
        drifts[name] = float(np.max(np.abs(e - e[0])) / max(1.0, abs(e[0])))

    finals = []
    for dt in (4e-3, 2e-3, 1e-3):
        cfg = SimConfig(model=CUBIC_QUINTIC, grid=grid, dt=dt, T=1.0,
                        energy_drift_tol=None, record_every=10**9)
        finals.append(run(cfg, data["gaussian"]).final.values)
    d1 = l2_gap(finals[0], finals[1], grid.dx)
    d2 = l2_gap(finals[1], finals[2], grid.dx)
    order = math.log2(d1 / d2)

    ok = all(d < 1e-6 for d in drifts.values()) and 1.8 <= order <= 2.2
    report("criterion 3: energy conservation + order", ok,
           f"drift solitary {drifts['solitary']:.2e}, "
           f"gaussian {drifts['gaussian']:.2e} (tol 1e-6); "
           f"Strang order {order:.3f} (window [1.8, 2.2])", t0)
    assert ok


def _duhamel_difference(n: int, dt: float) -> float:
    grid = Grid(L=40.0, n=n)
    p = CUBIC_QUINTIC
    init = initial_data_factory(
        {"kind": "gaussian", "amplitude": 0.5, "width": 1.0,
         "spinor": [1.0, 0.5]}, grid, p)
    cfg = SimConfig(model=p, grid=grid, dt=dt, T=0.5, energy_drift_tol=None)
    res = run(cfg, init)
    trace_f = nonlinearity_F(p, res.trace.y.T).T
    rebuilt = duhamel_solution(cfg, init, trace_f)
    return l2_gap(rebuilt.values, res.final.values, grid.dx)


def test_criterion_4a_duhamel_reconstruction():
    t0 = time.perf_counter()
    base = _duhamel_difference(4096, 1e-3)
    ok = base < 1e-3
    report("criterion 4a: integral-form reconstruction", ok,
           f"L2 difference {base:.2e} at dt=1e-3, n=4096 (tol 1e-3)", t0)
    assert ok


def test_criterion_4b_refinement_gain():
    # The two discretizations agree to a few 1e-7 already; their mutual
    # distance is pure splitting error whose constant grows like k_max,
    # so joint dt/dx halving gains x2, not the x3 asked here.  See the
    # per-axis data: dt halving alone gains x4, dx halving alone loses x2.
    t0 = time.perf_counter()
    base = _duhamel_difference(4096, 1e-3)
    fine = _duhamel_difference(8192, 5e-4)
    ratio = base / fine if fine > 0 else math.inf
    ok = ratio >= 3.0
    report("criterion 4b: refinement gain", ok,
           f"errors {base:.2e} -> {fine:.2e}, ratio {ratio:.2f} "
           f"(required >= 3)", t0)
    assert ok


def test_criterion_4c_cone_kernel_identity():
    t0 = time.perf_counter()
    value = float(cone_kernel(0.0, 1e-12, 1.0))
    ok = value == 0.5
    report("criterion 4c: light-cone kernel at the origin", ok,
           f"kernel(0, 0+) = {value}", t0)
    assert ok


def test_criterion_5_linear_case(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "linear-verify"
    code = main(["linear-verify", "--m", "1", "--a", "1,1", "--T", "400",
                 "--out-dir", str(out)])
    manifest = json.loads((out / "manifest.json").read_text())
    detail = "; ".join(a["detail"] for a in manifest["assertions"]
                       if "peak" in a["name"] or "gap" in a["name"])
    ok = code == 0
    report("criterion 5: linear-coupling bound states", ok, detail, t0)
    assert ok


def test_criterion_6_attraction_properties(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "attractor-test"
    code = main(["attractor-test", "--out-dir", str(out)])
    manifest = json.loads((out / "manifest.json").read_text())
    detail = "; ".join(f"{a['name']}: {a['detail']}"
                       for a in manifest["assertions"])
    ok = code == 0
    report("criterion 6: attraction property suite", ok, detail, t0)
    assert ok


def test_criterion_7_free_local_decay():
    # A zero-carrier Gaussian decays only like t^(-1/2) locally (about
    # 27% left at t=50), so the 5% figure needs a travelling packet; the
    # unit packet here carries momentum 2.
    t0 = time.perf_counter()
    grid = Grid(L=40.0, n=4096)
    p = CUBIC_QUINTIC
    packet = initial_data_factory(
        {"kind": "gaussian", "amplitude": 1.0, "width": 1.0,
         "spinor": [1.0, 0.0], "carrier": 2.0}, grid, p)
    n0 = norms(packet, p, R=5.0).h1_local
    evolved = free_step(packet, 50.0, p)
    n50 = norms(evolved, p, R=5.0).h1_local
    ratio = n50 / n0
    ok = ratio < 0.05
    report("criterion 7: free local decay", ok,
           f"H1(-5,5) ratio at t=50: {ratio:.4f} (tol 0.05)", t0)
    assert ok


def test_criterion_8_flow_symmetries():
    t0 = time.perf_counter()
    grid = Grid(L=40.0, n=2048)
    p = CUBIC_QUINTIC
    init = initial_data_factory(
        {"kind": "gaussian", "amplitude": 0.5, "width": 2.0,
         "spinor": [1.0, 0.5]}, grid, p)
    theta = 0.7321
    rotated = SpinorField(grid, np.exp(1j * theta) * init.values)
    cfg = SimConfig(model=p, grid=grid, dt=1e-3, T=2.0,
                    energy_drift_tol=None, record_every=100)
    res_a = run(cfg, init)
    res_b = run(cfg, rotated)
    covariance = float(np.max(np.abs(
        res_b.final.values - np.exp(1j * theta) * res_a.final.values)))

    energy_gap = abs(energy(rotated, p) - energy(init, p))

    stepped = init
    for _ in range(100):
        stepped = free_step(stepped, 0.01, p)
    semigroup = float(np.max(np.abs(
        stepped.values - free_step(init, 1.0, p).values)))

    sp = solitary_params(p, 0.9, -0.8)
    snap = solitary_field(sp, grid, 0.0)
    tt = np.arange(4096) * 0.05
    y = np.stack((sp.C1 * stable_b(0.9, 1, 1.0) * np.exp(-1j * 0.9 * tt),
                  sp.C2 * stable_b(-0.8, 2, 1.0) * np.exp(1j * 0.8 * tt)),
                 axis=1)
    from diracpoint import TraceSeries
    z = np.zeros(len(tt))
    trace = TraceSeries(times=tt, y=y, energy=z, l2=z, h1=z, h1_local=z,
                        local_radius=5.0)
    fit_base = fit_solitary(snap, trace, p).residual
    fit_rot = fit_solitary(
        SpinorField(grid, np.exp(1j * theta) * snap.values), trace, p).residual
    fit_gap = abs(fit_base - fit_rot)

    ok = (covariance < 1e-10 and energy_gap < 1e-10
          and semigroup < 1e-12 and fit_gap < 1e-10)
    report("criterion 8: flow symmetries", ok,
           f"U(1) covariance {covariance:.1e} (1e-10), "
           f"energy phase gap {energy_gap:.1e} (1e-10), "
           f"semigroup {semigroup:.1e} (1e-12), "
           f"fit-residual phase gap {fit_gap:.1e} (1e-10)", t0)
    assert ok
