"""Acceptance criteria 1-13, one test each.

Every test prints a single ``[criterion N] PASS|FAIL ...`` line (visible
without ``-s``) and then asserts at the criterion's tolerance.
"""
from dataclasses import replace
import time

import numpy as np
import pytest

from hrris import checks
from hrris.checks import random_instance
from hrris.cli import main
from hrris.optimizer import AoConfig, alternating_optimize, coordinate_optimality_check
from hrris.sim import ScenarioConfig, run_monte_carlo

SEED = 20240


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'} {detail}")
    return emit


def _suite(name, report, number, budget=None):
    start = time.perf_counter()
    failures = checks.SUITES[name](SEED)
    elapsed = time.perf_counter() - start
    ok = not failures and (budget is None or elapsed < budget)
    first = f"; first failure: {failures[0]}" if failures else ""
    report(number, ok, f"{name}: {len(failures)} failures in {elapsed:.1f}s{first}")
    assert not failures, failures[:5]
    if budget is not None:
        assert elapsed < budget


def _paired(cfg, a, b):
    x = np.array(run_monte_carlo(cfg, a).per_trial)
    y = np.array(run_monte_carlo(cfg, b).per_trial)
    d = x - y
    return x.mean(), y.mean(), d.mean(), d.std(ddof=1) / np.sqrt(d.size)


def test_c01_monotone_ascent(report):
    _suite("monotone-ascent", report, 1, budget=30.0)


def test_c02_decomposition_identity(report):
    _suite("decomposition", report, 2, budget=10.0)


def test_c03_reconstruction_identity(report):
    _suite("reconstruction", report, 3)


def test_c04_rank_one_eigenvalue(report):
    _suite("trace-eigenvalue", report, 4)


def test_c05_budget_safety(report):
    _suite("budget-safety", report, 5)


def test_c06_upper_bound(report):
    _suite("upper-bound", report, 6)


def test_c07_coordinate_optimality(report):
    passed = tried = 0
    failed = []
    i = 0
    while tried < 50:
        rng = np.random.default_rng([SEED, 7, i])
        i += 1
        n = int(rng.integers(2, 13))
        h_t, h_r, params, active = random_instance(
            rng, n, int(rng.integers(1, 5)), int(rng.integers(1, 5)), int(rng.integers(0, min(n, 3) + 1)), phase_bits=2
        )
        rep = alternating_optimize(h_t, h_r, params, AoConfig(active_set=active, seed=rng))
        if not rep.converged:
            continue
        tried += 1
        if coordinate_optimality_check(h_t, h_r, rep.coefficients, params, grid_size=32):
            passed += 1
        else:
            failed.append(i - 1)
    report(7, passed == 50, f"{passed}/50 converged 2-bit runs coordinate-optimal ({i} drawn)")
    assert passed == 50, failed


def test_c08_k0_reduction(report):
    _suite("k0-reduction", report, 8)


@pytest.mark.slow
def test_c09_method_ordering(report):
    cfg = ScenarioConfig(p_bs_dbm=10.0, p_a_max_dbm=0.0, trials=50, seed=SEED)
    hr, opt, gap1, se1 = _paired(cfg, "hr-ris", "ris-opt")
    _, rnd, gap2, se2 = _paired(cfg, "ris-opt", "ris-random")
    ok = hr > opt > rnd and gap1 > 2 * se1 and gap2 > 2 * se2
    report(9, ok, f"hr-ris {hr:.3f} > ris-opt {opt:.3f} > ris-random {rnd:.3f}; "
                  f"gaps {gap1:.3f} (se {se1:.3f}), {gap2:.3f} (se {se2:.3f})")
    assert ok


@pytest.mark.slow
def test_c10_gain_larger_at_low_bs_power(report):
    base = ScenarioConfig(p_a_max_dbm=0.0, trials=50, seed=SEED)
    low = _paired(replace(base, p_bs_dbm=0.0), "hr-ris", "ris-opt")[2]
    high = _paired(replace(base, p_bs_dbm=30.0), "hr-ris", "ris-opt")[2]
    report(10, low > high, f"gain at P_BS 0 dBm {low:.3f} vs 30 dBm {high:.3f}")
    assert low > high


@pytest.mark.slow
def test_c11_gain_grows_with_distance(report):
    base = ScenarioConfig(k=4, p_a_max_dbm=0.0, p_bs_dbm=30.0, trials=50, seed=SEED)
    near = _paired(replace(base, hrris_x=10.0), "hr-ris", "ris-opt")[2]
    far = _paired(replace(base, hrris_x=100.0), "hr-ris", "ris-opt")[2]
    report(11, far > near, f"gain at x_H 100 m {far:.3f} vs 10 m {near:.3f}")
    assert far > near


@pytest.mark.slow
def test_c12_more_active_elements_not_monotone(report):
    means = []
    for k in (1, 2, 4, 8):
        cfg = ScenarioConfig(k=k, p_a_max_dbm=-10.0, p_bs_dbm=30.0, trials=100, seed=SEED)
        means.append(run_monte_carlo(cfg, "hr-ris").mean_se)
    ok = any(b <= a for a, b in zip(means, means[1:]))
    report(12, ok, "mean SE over K=1,2,4,8: " + ", ".join(f"{m:.4f}" for m in means))
    assert ok


def test_c13_cli_determinism(report, tmp_path, capsys):
    outputs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        assert main(["run", "--seed", "5", "--trials", "5", "--out", str(path)]) == 0
        outputs.append((capsys.readouterr().out, path.read_bytes()))
    ok = outputs[0] == outputs[1] and outputs[0][0] != ""
    report(13, ok, "stdout and CSV byte-identical across two runs")
    assert ok
