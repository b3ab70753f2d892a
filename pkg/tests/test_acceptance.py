"""Acceptance suite: every shipped claim, one criterion per test.

Run ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion.  The module-scope fixture computes all solves once and keeps
a ledger of (primal value, certified dual bound) pairs so criterion 8
can audit weak duality across the whole suite.
"""
import math
import time

import numpy as np
import pytest

from hedgekit import (
    check_dual_feasibility,
    classical_optimum,
    compile_primal,
    entropy_curve,
    entropy_threshold,
    outcome_probabilities,
    parallel_game,
    plan_rounds,
    solve,
    threshold_condition,
    threshold_objective,
    value_objective,
    verify_monotone_inequality,
    witness_average,
    witness_naive,
    witness_recursive_snk,
    witness_tensor_power,
)
from hedgekit.error_reduction import binomial_tail
from hedgekit.hedging import (
    WIN_PROBABILITY,
    hedging_game,
    hedging_optimal_witness,
    phase_flip_strategy,
)
from hedgekit.sampling import random_monotone_instance

from conftest import make_random_diagonal_game, make_random_game

P = WIN_PROBABILITY
COS4 = P * P


def _ok(num, text):
    print(f"[criterion {num:2d}] PASS: {text}")


@pytest.fixture(scope="module")
def suite():
    """All heavy computations, run once; results plus a duality ledger."""
    data = {"ledger": []}
    game = hedging_game()
    doubled = parallel_game(game, 2)
    data["game"] = game
    data["doubled"] = doubled

    t0 = time.perf_counter()
    rep1 = solve(compile_primal(game, game.outcomes[1]), 1e-8)
    data["t_single"] = time.perf_counter() - t0
    data["single"] = rep1
    data["ledger"].append(("hedging win", rep1.primal_value, rep1.dual_value))

    t0 = time.perf_counter()
    rep_k1 = solve(compile_primal(doubled, threshold_objective(game, 2, 1)), 1e-8)
    data["t_k1"] = time.perf_counter() - t0
    data["k1"] = rep_k1
    data["ledger"].append(("hedging 2-rep k=1", rep_k1.primal_value, rep_k1.dual_value))

    rep_k2 = solve(compile_primal(doubled, threshold_objective(game, 2, 2)), 1e-8)
    data["k2"] = rep_k2
    data["ledger"].append(("hedging 2-rep k=2", rep_k2.primal_value, rep_k2.dual_value))

    data["flip_probs"] = dict(
        zip(doubled.outcome_keys, outcome_probabilities(doubled, phase_flip_strategy()))
    )

    # criterion 4: average-value parallel repetition on random games
    rng = np.random.default_rng(12004)
    t0 = time.perf_counter()
    pairs = []
    for trial in range(5):
        dq, dy = (int(d) for d in rng.integers(2, 4, size=2))
        dz = int(rng.integers(1, 3))
        t = int(rng.integers(2, 4))
        g = make_random_game(rng, dq=dq, dz=dz, dy=dy, outcomes=t)
        values = tuple(float(v) for v in rng.random(t))
        r1 = solve(compile_primal(g, value_objective(g, values, 1)), 1e-8)
        r2 = solve(
            compile_primal(parallel_game(g, 2), value_objective(g, values, 2)), 1e-8
        )
        pairs.append((r1, r2))
        data["ledger"].append((f"value game {trial} n=1", r1.primal_value, r1.dual_value))
        data["ledger"].append((f"value game {trial} n=2", r2.primal_value, r2.dual_value))
    data["value_pairs"] = pairs
    data["t_value"] = time.perf_counter() - t0

    # criterion 5: classical binomial law on diagonal games
    rng = np.random.default_rng(12005)
    t0 = time.perf_counter()
    classical = []
    for trial in range(5):
        dq, dy = (int(d) for d in rng.integers(2, 4, size=2))
        g = make_random_diagonal_game(rng, dq=dq, dz=2, dy=dy)
        pc = classical_optimum(g)
        rep = solve(compile_primal(parallel_game(g, 2), threshold_objective(g, 2, 1)), 1e-8)
        classical.append((pc, rep))
        data["ledger"].append((f"diagonal game {trial}", rep.primal_value, rep.dual_value))
    data["classical"] = classical
    data["t_classical"] = time.perf_counter() - t0

    # criterion 6: the witness menu on the hedging game
    w = hedging_optimal_witness()
    data["witness_base"] = w
    menu = {}
    menu["average"] = (
        witness_average(w, game, 2, values=(0.0, 1.0)),
        value_objective(game, (0.0, 1.0), 2),
        doubled,
        w.value,
    )
    menu["tensor-power"] = (
        witness_tensor_power(w, 2, game),
        threshold_objective(game, 2, 2),
        doubled,
        P**2,
    )
    menu["naive"] = (
        witness_naive(w, game, 2, 1),
        threshold_objective(game, 2, 1),
        doubled,
        2 * P + P**2,
    )
    menu["snk"] = (
        witness_recursive_snk(w, game, 2, 1),
        threshold_objective(game, 2, 1),
        doubled,
        2 * P,
    )
    menu["average n=1"] = (
        witness_average(w, game, 1, values=(0.0, 1.0)),
        value_objective(game, (0.0, 1.0), 1),
        game,
        w.value,
    )
    menu["tensor-power n=1"] = (
        witness_tensor_power(w, 1, game),
        threshold_objective(game, 1, 1),
        game,
        P,
    )
    checks = {}
    for name, (cand, objective, target, expect) in menu.items():
        feas = check_dual_feasibility(target, objective, cand, 1e-9)
        checks[name] = (cand, feas, expect)
    data["witness_checks"] = checks
    data["ledger"].append(("k=1 vs naive", rep_k1.primal_value, checks["naive"][1].value))
    data["ledger"].append(("k=1 vs snk", rep_k1.primal_value, checks["snk"][1].value))
    data["ledger"].append(
        ("k=2 vs tensor-power", rep_k2.primal_value, checks["tensor-power"][1].value)
    )
    return data


def test_criterion_1_single_repetition_optimum(suite):
    rep = suite["single"]
    assert rep.status == "optimal"
    assert rep.primal_value == pytest.approx(0.85355339059, abs=1e-6)
    assert suite["t_single"] < 1.0
    _ok(1, f"single-repetition optimum {rep.primal_value:.9f} "
           f"(target cos^2(pi/8), {suite['t_single'] * 1000:.0f} ms)")


def test_criterion_2_perfect_hedge(suite):
    rep = suite["k1"]
    assert rep.status == "optimal"
    assert rep.primal_value == pytest.approx(1.0, abs=1e-6)
    assert suite["t_k1"] < 10.0
    lose_both = suite["flip_probs"][(0, 0)]
    assert abs(lose_both) <= 1e-12
    _ok(2, f"two-repetition k=1 optimum {rep.primal_value:.9f}, "
           f"phase flip loses both with prob {lose_both:.1e}")


def test_criterion_3_k_equals_n(suite):
    rep = suite["k2"]
    assert rep.primal_value == pytest.approx(0.72855339, abs=1e-5)
    cand, feas, expect = suite["witness_checks"]["tensor-power"]
    assert feas.feasible
    assert cand.value == pytest.approx(COS4, abs=1e-12)
    assert rep.primal_value == pytest.approx(cand.value, abs=1e-5)
    _ok(3, f"two-repetition k=2 optimum {rep.primal_value:.9f} matches the "
           f"tensor-power witness value {cand.value:.9f}")


def test_criterion_4_average_value_parallel_repetition(suite):
    assert suite["t_value"] < 60.0
    worst = 0.0
    for r1, r2 in suite["value_pairs"]:
        assert r1.status == r2.status == "optimal"
        worst = max(worst, abs(r1.primal_value - r2.primal_value))
        assert r2.primal_value == pytest.approx(r1.primal_value, abs=1e-5)
    _ok(4, f"five random games keep v = v' at n=2 (worst gap {worst:.2e}, "
           f"{suite['t_value']:.1f} s)")


def test_criterion_5_classical_binomial_law(suite):
    assert suite["t_classical"] < 30.0
    worst = 0.0
    for pc, rep in suite["classical"]:
        expect = binomial_tail(pc, 2, 1)
        worst = max(worst, abs(rep.primal_value - expect))
        assert rep.primal_value == pytest.approx(expect, abs=1e-6)
    _ok(5, f"five diagonal games match 1-(1-p_c)^2 from the enumeration "
           f"oracle (worst gap {worst:.2e}, {suite['t_classical']:.1f} s)")


def test_criterion_6_witness_feasibility_suite(suite):
    for name, (cand, feas, expect) in suite["witness_checks"].items():
        assert feas.feasible, name
        assert min(feas.constraint_min_eigenvalues) >= -1e-9, name
        assert cand.value == pytest.approx(expect, abs=1e-9), name
    traces = {n: c[0].value for n, c in suite["witness_checks"].items()}
    _ok(6, "witness suite feasible at 1e-9 with traces "
           + ", ".join(f"{n}={v:.6f}" for n, v in sorted(traces.items())))


def test_criterion_7_monotone_inequality_fuzz(suite):
    rng = np.random.default_rng(12007)
    worst = 0.0
    for trial in range(150):
        dim = int(rng.integers(2, 4))
        n = int(rng.integers(1, 4))
        k = int(rng.integers(0, n + 1))
        a0, a1, r = random_monotone_instance(rng, dim)
        ok, lo = verify_monotone_inequality(a0, a1, r, n, k)
        worst = min(worst, lo)
        assert ok and lo >= -1e-9
    for trial in range(50):
        dim = int(rng.integers(2, 4))
        n = int(rng.integers(1, 4))
        seeds = [
            tuple(int(b) for b in rng.integers(0, 2, size=n))
            for _ in range(int(rng.integers(1, 4)))
        ]
        closure = set()
        frontier = set(seeds)
        while frontier:
            bits = frontier.pop()
            if bits in closure:
                continue
            closure.add(bits)
            for i, b in enumerate(bits):
                if b == 0:
                    frontier.add(bits[:i] + (1,) + bits[i + 1 :])
        a0, a1, r = random_monotone_instance(rng, dim)
        ok, lo = verify_monotone_inequality(a0, a1, r, n, 0, indices=closure)
        worst = min(worst, lo)
        assert ok and lo >= -1e-9
    _ok(7, f"200 monotone-inequality instances hold (worst min eigenvalue {worst:.2e})")


def test_criterion_8_weak_duality_never_violated(suite):
    assert len(suite["ledger"]) >= 15
    for name, primal, bound in suite["ledger"]:
        assert primal <= bound + 1e-7, (name, primal, bound)
    _ok(8, f"weak duality holds across {len(suite['ledger'])} primal/bound pairs")


def test_criterion_9_error_reduction_plans():
    t0 = time.perf_counter()
    direct = 2.0 ** (
        -(-0.9 * math.log2(0.9) - 0.1 * math.log2(0.1)) / 0.9
    )
    assert threshold_condition(0.9, 0.05)
    assert entropy_threshold(0.9) == pytest.approx(direct, abs=1e-12)
    assert direct == pytest.approx(0.697, abs=5e-4)
    assert direct > 0.05
    epsilons = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    plans = {eps: plan_rounds(0.9, 0.05, eps) for eps in epsilons}
    squared = {eps: plan_rounds(0.9, 0.05, eps * eps) for eps in epsilons}
    for eps in epsilons:
        assert plans[eps].satisfied and squared[eps].satisfied
        assert squared[eps].n <= 2.5 * plans[eps].n + 64
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    _ok(9, f"plans satisfied for eps down to 1e-6 with n(eps^2) <= 2.5 n(eps) + 64 "
           f"({elapsed * 1000:.0f} ms)")


def test_criterion_10_entropy_curve():
    points = entropy_curve(0.01, 0.99, 0.01)
    assert len(points) == 99
    for x, y in points:
        assert y > x / 3
    ys = [y for _, y in points]
    assert all(b > a for a, b in zip(ys, ys[1:]))
    assert entropy_curve(1.0, 1.0, 1.0)[0][1] == pytest.approx(1.0)
    csv_lines = ["x,y"] + [f"{x:.12g},{y:.12g}" for x, y in points]
    parsed = [tuple(float(v) for v in line.split(",")) for line in csv_lines[1:]]
    assert all(py > px / 3 for px, py in parsed)
    _ok(10, "entropy curve stays above x/3 on the grid, increases, and ends at 1")
