"""Acceptance suite: end-to-end checks at their stated tolerances.

Each test prints one pass/fail line (visible with ``pytest -s`` or on
failure). Monte-Carlo checks use pinned seeds so measured numbers double
as regression baselines.
"""

import math
import time

import numpy as np
import pytest

import hisparse as hs
from hisparse.simulate import (
    ChannelConfig,
    Condition,
    ExperimentConfig,
    SystemConfig,
    naive_mse_trial,
    run_trial,
)
from hisparse.verify import suite_hirip, suite_operators
from conftest import REFERENCE_VALUES, REFERENCE_HIER_SUPPORT, REFERENCE_FLAT_SUPPORT

SMALL = SystemConfig(N=128, M=64, D=32, U=1)
SMALL_MU = SystemConfig(N=128, M=64, D=32, U=4)
FULL = SystemConfig(N=1024, M=256, D=256, U=1)
FULL_MU = SystemConfig(N=1024, M=256, D=256, U=4)

# Frozen regression baseline for criterion 3 (measured on the pinned seeds).
NOISELESS_RECOVERY_BASELINE = 100


def _status(num, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def _mean_mse(system, scenario, algorithm, option, Np, V, L, trials, seed,
              lhat=None, Mp=None, snr_db=10.0, K_V=1, K_L=1):
    config = ExperimentConfig(
        scenario=scenario, system=system,
        channel=ChannelConfig(L=L, V=V, K_V=K_V, K_L=K_L),
        sweep=[Np if scenario != "mismatched-L" else (lhat or L)],
        Np=Np if scenario == "mismatched-L" else None,
        Mp=Mp, trials=trials, seed=seed, snr_db=snr_db,
    )
    cond = Condition(label=algorithm, algorithm=algorithm, option=option,
                     V=V, L=L, lhat=lhat)
    vals = [run_trial(config, cond, Np, t) for t in range(trials)]
    return float(np.mean(vals))


def _min_passing(values, mses, threshold):
    for v, m in zip(values, mses):
        if m < threshold:
            return v
    return None


def test_criterion_01_thresholding_ground_truth():
    shape = hs.BlockShape((2, 3, 5))
    x = hs.MultiLevelVector(shape, REFERENCE_VALUES)
    profile = hs.SparsityProfile((1, 2, 2))
    hier = hs.hi_threshold(x, profile)
    flat = hs.hi_threshold(hs.MultiLevelVector(hs.BlockShape((30,)), REFERENCE_VALUES),
                           hs.SparsityProfile((4,)))
    ok = hier.as_set() == REFERENCE_HIER_SUPPORT and flat.as_set() == REFERENCE_FLAT_SUPPORT

    best = math.inf
    for _ in range(10):
        start = time.perf_counter()
        hs.hi_threshold(x, profile)
        best = min(best, time.perf_counter() - start)
    ok = ok and best < 1e-3
    _status(1, ok, f"hier={sorted(hier.as_set())} flat={sorted(flat.as_set())} "
                   f"best time {best * 1e6:.0f} us")


def test_criterion_02_operator_correctness():
    start = time.perf_counter()
    ok = suite_operators(trials=50, seed=0)
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 30.0
    _status(2, ok, f"50 random configurations in {elapsed:.1f} s")


def test_criterion_03_noiseless_exact_recovery():
    start = time.perf_counter()
    hits = 0
    trials = 100
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([42, t]))
        params = hs.ChannelParams(N=128, M=64, D=32, U=1, V=1, L=3)
        realization = hs.gen_ongrid(params, rng, "FS")
        design = hs.make_design(128, 64, 32, 1, 8, 64, seed=int(rng.integers(2**63)))
        op = hs.KroneckerSensingOperator(design, "FS")
        x = hs.stack_delay_angular(realization, "FS")
        y = op.forward(x)
        cfg = hs.RecoveryConfig(algorithm="HiIHT", profile=hs.SparsityProfile((3, 1, 1)))
        result = hs.solve(y, op, cfg)
        if np.array_equal(result.support, np.flatnonzero(x)):
            hits += 1
    elapsed = time.perf_counter() - start
    ok = hits >= 90 and hits == NOISELESS_RECOVERY_BASELINE and elapsed < 120.0
    _status(3, ok, f"exact support in {hits}/100 trials "
                   f"(baseline {NOISELESS_RECOVERY_BASELINE}), {elapsed:.1f} s")


def test_criterion_04_headline_mse_full_scale():
    start = time.perf_counter()
    mse = _mean_mse(FULL, "single-user-sweep", "HiIHT", "FS",
                    Np=10, V=1, L=3, trials=100, seed=33)
    elapsed = time.perf_counter() - start
    ok = mse <= 3e-2
    _status(4, ok, f"N=1024 Np=10 L=3: mean MSE {mse:.2e} "
                   f"(target 1e-2, bar 3e-2), {elapsed:.0f} s")


def test_criterion_05_phase_transition_separation():
    # Small preset: the full-size sweep exceeds the suite's time budget and
    # stays runnable through the CLI with --preset paper.
    hi_ladder = [2, 3, 4, 5, 6, 8]
    flat_ladder = [8, 12, 16, 20, 24, 28, 32, 40, 48]
    trials, seed = 100, 7
    hi_mses = [_mean_mse(SMALL, "single-user-sweep", "HiIHT", "FS", Np=q,
                         V=1, L=5, trials=trials, seed=seed) for q in hi_ladder]
    flat_mses = [_mean_mse(SMALL, "single-user-sweep", "IHT", "FS", Np=q,
                           V=1, L=5, trials=trials, seed=seed) for q in flat_ladder]
    hi_min = _min_passing(hi_ladder, hi_mses, 1e-2)
    flat_min = _min_passing(flat_ladder, flat_mses, 1e-2)
    ok = hi_min is not None and flat_min is not None and flat_min >= 4 * hi_min
    _status(5, ok, f"L=5 small preset: min Np HiIHT={hi_min}, IHT={flat_min} "
                   f"(ratio {flat_min / hi_min:.1f}x, need >= 4x)")


def test_criterion_06_overhead_independence_and_sf_growth():
    trials, seed = 60, 11
    ladder = [3, 4, 5, 6, 8, 10, 12]
    v1 = [_mean_mse(SMALL_MU, "multiuser-sweep", "HiIHT", "FS", Np=q, V=1, L=3,
                    trials=trials, seed=seed) for q in ladder]
    np_star = _min_passing(ladder, v1, 1e-2)
    assert np_star is not None
    bounded = []
    for V in (1, 2, 3, 4):
        m = _mean_mse(SMALL_MU, "multiuser-sweep", "HiIHT", "FS", Np=np_star,
                      V=V, L=3, trials=100, seed=seed)
        bounded.append(m)
    ok = all(np.isfinite(m) and m < 1.0 for m in bounded)

    sf_ladder = [8, 12, 16, 20, 24, 32, 40, 48, 64]
    sf_mins = {}
    for V in (1, 4):
        mses = [_mean_mse(SMALL_MU, "multiuser-sweep", "HiIHT", "SF", Np=q, V=V,
                          L=3, trials=50, seed=seed) for q in sf_ladder]
        sf_mins[V] = _min_passing(sf_ladder, mses, 1e-2)
    ok = ok and sf_mins[1] is not None and sf_mins[4] is not None
    ok = ok and sf_mins[4] > sf_mins[1]
    _status(6, ok, f"FS Np*={np_star}: MSE(V=1..4)={[f'{m:.3f}' for m in bounded]}; "
                   f"SF min Np V=1 -> {sf_mins[1]}, V=4 -> {sf_mins[4]}")


def test_criterion_07_mismatched_path_count():
    trials, seed = 100, 21
    low = _mean_mse(FULL_MU, "mismatched-L", "HiIHT", "FS", Np=15, V=2, L=3,
                    trials=trials, seed=seed, lhat=2)
    high = _mean_mse(FULL_MU, "mismatched-L", "HiIHT", "FS", Np=15, V=2, L=3,
                     trials=trials, seed=seed, lhat=5)
    ok = low > high
    _status(7, ok, f"Np=15 U=4 V=2: MSE(assumed L-1)={low:.3f} > "
                   f"MSE(assumed L+2)={high:.4f}")


def test_criterion_08_sparse_approximation_bound():
    start = time.perf_counter()
    rng = np.random.default_rng(55)
    N = M = 32
    violations = 0
    checked = 0
    for _ in range(1000):
        L = int(rng.choice([1, 3]))
        paths = [
            hs.ChannelPath(float(rng.uniform(0, 0.25)), float(rng.uniform(0, 1)),
                           complex(rng.standard_normal(), rng.standard_normal()))
            for _ in range(L)
        ]
        X = hs.delay_angular_offgrid(hs.superpose_transfer(paths, N, M))
        for L1 in (1, 2, 4):
            for L2 in (1, 2, 4):
                X_sp, bound = hs.sparse_approx(paths, L1, L2, N, M)
                checked += 1
                if np.linalg.norm(X - X_sp) > bound:
                    violations += 1
                if np.count_nonzero(X_sp) > L * (2 * L1 + 1) * (2 * L2 + 1):
                    violations += 1
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 300.0
    _status(8, ok, f"{checked} bound checks, {violations} violations, {elapsed:.0f} s")


def test_criterion_09_leakage_normalization():
    rng = np.random.default_rng(66)
    worst = 0.0
    for K in (2, 16, 256):
        for w in rng.uniform(0, 1, 1000):
            worst = max(worst, abs(np.linalg.norm(hs.dirichlet_vector(K, float(w))) - 1.0))
    ok = worst <= 1e-12
    exact = True
    for K in (2, 16, 256):
        for k in range(K):
            u = hs.dirichlet_vector(K, k / K)
            e = np.zeros(K, dtype=complex)
            e[k] = 1.0
            exact = exact and bool(np.array_equal(u, e))
    ok = ok and exact
    _status(9, ok, f"3000 norm checks, max dev {worst:.1e}; grid points exact: {exact}")


def test_criterion_10_isometry_laws():
    start = time.perf_counter()
    ok = suite_hirip(trials=100, seed=1)
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 300.0
    _status(10, ok, f"100 instances per law, {elapsed:.0f} s")


def test_criterion_11_empirical_contraction():
    rng = np.random.default_rng(5)
    dims = (3, 2, 2)
    shape = hs.BlockShape(dims)
    profile = hs.SparsityProfile((1, 1, 1))
    tripled = hs.SparsityProfile(tuple(min(3 * s, d) for s, d in zip(profile.s, dims)))
    certified = 0
    violations = 0
    for _ in range(10):
        m, n = 40, shape.total
        Q, _ = np.linalg.qr(rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
        A = Q + 0.08 * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / math.sqrt(m)
        A /= np.linalg.norm(A, axis=0)
        report = hs.hirip_constant(A, shape, tripled)
        if report.delta >= 1 / math.sqrt(3):
            continue
        certified += 1
        constants = hs.contraction_constants(report.delta, "HiIHT")
        op = hs.DenseOperator(A, shape)
        for _ in range(3):
            x = np.zeros(n, dtype=complex)
            x[int(rng.integers(n))] = rng.standard_normal() + 1j * rng.standard_normal()
            z = 0.01 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
            y = A @ x + z
            cfg = hs.RecoveryConfig(algorithm="HiIHT", profile=profile)
            res = hs.hi_iht(y, op, cfg, x_true=x)
            nx, nz = np.linalg.norm(x), np.linalg.norm(z)
            for i, err in enumerate(res.error_trace, start=1):
                if err > constants.kappa**i * nx + constants.tau * nz + 1e-12:
                    violations += 1
    ok = certified >= 5 and violations == 0
    _status(11, ok, f"{certified}/10 instances certified, {violations} bound violations")


def test_criterion_12_naive_estimator_calibration():
    vals = [naive_mse_trial(SMALL, L=3, snr_db=10.0, trial_index=t, seed=4)
            for t in range(100)]
    mse = float(np.mean(vals))
    ok = abs(mse - 0.1) <= 0.005
    _status(12, ok, f"full-sampling raw-observation MSE {mse:.5f} vs 1/SNR=0.1")


def test_supplementary_omp_competitive_with_htp():
    # Reduced antenna sampling at full size: greedy selection stays within
    # a factor two of the pursuit solver.
    worst = 0.0
    for Np in (12, 24):
        htp = _mean_mse(FULL_MU, "omp-compare", "HiHTP", "FS", Np=Np, V=2, L=3,
                        trials=12, seed=17, Mp=64)
        greedy = _mean_mse(FULL_MU, "omp-compare", "OMP", "FS", Np=Np, V=2, L=3,
                           trials=12, seed=17, Mp=64)
        worst = max(worst, greedy / htp)
    ok = worst <= 2.0
    print(f"[{'PASS' if ok else 'FAIL'}] supplementary: OMP within {worst:.2f}x of HiHTP")
    assert ok
