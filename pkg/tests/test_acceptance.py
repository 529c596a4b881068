"""End-to-end acceptance checks; each test records one PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from ghz_nonlocality import dense, entanglement
from ghz_nonlocality.bell import (
    P_TRANSITION,
    PAULI_X,
    PAULI_Y,
    Observable,
    bell_value,
    bell_value_enumerated,
    chsh_functional,
    chsh_max,
    chsh_standard_settings,
    correlation,
    mermin_critical_noise,
    mermin_functional,
    mermin_settings,
    mermin_visibility,
    setting_bits,
)
from ghz_nonlocality.ccp import mermin_instance, outcome_distribution, quantum_gain, simulate_game, transition_n
from ghz_nonlocality.nonlocal_content import mermin_content_bounds
from ghz_nonlocality.state import NoiseKind, decohered_ghz, make_ghz

ELEVEN = np.linspace(0.0, 1.0, 11)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def finish(record, name, checks, timer, limit):
    ok_time = timer.elapsed < limit
    failed = [k for k, v in checks.items() if not v]
    if not ok_time:
        failed.append(f"runtime {timer.elapsed:.2f}s >= {limit}s")
    record(name, not failed, f"({timer.elapsed:.3f}s)" + (f" failed: {failed}" if failed else ""))
    assert not failed


def test_ac01_chsh_pure_bell_state(acceptance_record):
    with Timer() as t:
        s = make_ghz(2)
        horodecki = chsh_max(s)
        standard = bell_value(chsh_functional(), s, chsh_standard_settings())
    checks = {
        "horodecki": abs(horodecki - 2 * math.sqrt(2)) < 1e-10,
        "standard settings magnitude": abs(abs(standard) - 2 * math.sqrt(2)) < 1e-10,
    }
    finish(acceptance_record, "AC1 CHSH max 2*sqrt(2) at p=0", checks, t, 1.0)


def test_ac02_phase_damping_anomaly(acceptance_record):
    with Timer() as t:
        grid = np.linspace(0.0, 1.0, 101)
        chsh_pd = np.array([chsh_max(decohered_ghz(2, "pd", p)) for p in grid])
        chsh_d = np.array([chsh_max(decohered_ghz(2, "d", p / 2)) for p in grid])
        conc_pd = np.array([entanglement.concurrence_two_qubit(decohered_ghz(2, "pd", p)) for p in grid])
        conc_d = np.array([entanglement.concurrence_two_qubit(decohered_ghz(2, "d", p / 2)) for p in grid])
        d_wins = conc_d >= conc_pd - 1e-15
        # p_x: first grid point from which the ordering flips for good
        p_cross = grid[np.argmin(d_wins)]
        gap = chsh_pd - chsh_d
        upto = grid <= next(p for p, v in zip(grid, chsh_d) if v < 2)
    checks = {
        "chsh ordering": bool(np.all(chsh_pd >= chsh_d - 1e-15)),
        "concurrence crossover exists": 0 < p_cross < 1 and bool(np.all(d_wins[grid < p_cross])),
        "crossover analytic": abs(entanglement.concurrence_crossover() - 0.8) < 1e-8,
        "gap grows": bool(np.all(np.diff(gap[upto]) > 0)),
    }
    finish(acceptance_record, "AC2 CHSH and concurrence, dephasing vs depolarizing", checks, t, 1.0)


def test_ac03_mermin_three_ways(acceptance_record):
    worst = 0.0
    with Timer() as t:
        for n in (3, 5):
            f = mermin_functional(n)
            settings = mermin_settings(n)
            g = f.table()
            blochs = [(a.bloch, b.bloch) for a, b in settings]
            for p in ELEVEN:
                s = decohered_ghz(n, "d", p)
                enum_v = bell_value_enumerated(f, s, settings)
                ds = dense.from_structured(s)
                dense_v = math.fsum(
                    g[i] * dense.correlation_dense(ds, [blochs[j][x] for j, x in enumerate(bits)])
                    for i, bits in enumerate(setting_bits(n)) if g[i] != 0
                )
                closed = (1 - p) ** n * 2 ** (n - 1)
                worst = max(worst, abs(enum_v - dense_v), abs(enum_v - closed))
    finish(acceptance_record, f"AC3 Mermin enumeration/dense/closed form (max dev {worst:.1e})",
           {"agreement": worst < 1e-10}, t, 5.0)


def test_ac04_transition(acceptance_record):
    with Timer() as t:
        grid = np.concatenate([np.linspace(0.0, 1.0, 51), P_TRANSITION + np.array([-1e-3, -1e-6, 1e-6, 1e-3])])
        ratio_ok, side_ok = True, True
        for p in grid:
            for n in range(3, 40, 2):
                r = mermin_visibility(n + 2, p) / mermin_visibility(n, p) if p < 1 else None
                if r is None:
                    continue
                ratio_ok &= abs(r - 2 * (1 - p) ** 2) <= 1e-12 * max(1.0, r)
                side_ok &= (r > 1) == (p < P_TRANSITION)
    checks = {
        "ratio law": bool(ratio_ok),
        "growth iff p < p_t": bool(side_ok),
        "p_t value": abs(P_TRANSITION - 0.2929) < 1e-4,
    }
    finish(acceptance_record, "AC4 transition p_t = 1 - 1/sqrt(2)", checks, t, 1.0)


def test_ac05_critical_noise(acceptance_record):
    with Timer() as t:
        pc = [mermin_critical_noise(n) for n in range(3, 202)]
        odd = [mermin_critical_noise(n) for n in range(3, 202, 2)]
        even = [mermin_critical_noise(n) for n in range(4, 202, 2)]
    checks = {
        "p_c(3)": abs(pc[0] - (1 - 2 ** (-1 / 3))) < 1e-12 and abs(pc[0] - 0.2063) < 1e-4,
        "below p_t": all(v < P_TRANSITION for v in pc),
        "odd monotone": all(a < b for a, b in zip(odd, odd[1:])),
        "even monotone": all(a < b for a, b in zip(even, even[1:])),
        "approaches p_t": P_TRANSITION - odd[-1] < 2e-3,
    }
    finish(acceptance_record, "AC5 critical noise p_c(n)", checks, t, 1.0)


def test_ac06_sandwich(acceptance_record):
    with Timer() as t:
        bounds = {n: mermin_content_bounds(n, 0.1) for n in range(3, 62, 2)}
        ratio41 = bounds[41].lower / bounds[41].upper
    checks = {
        "sandwich": all(0 <= b.lower <= b.upper <= 1 for b in bounds.values()),
        "ratio at n=41": ratio41 > 0.99,
    }
    finish(acceptance_record, f"AC6 nonlocal content sandwich (ratio {ratio41:.5f} at n=41)", checks, t, 1.0)


def test_ac07_quantum_gain(acceptance_record):
    with Timer() as t:
        expected = {3: 0.1145, 5: 0.1702, 7: 0.1766, 9: 0.1625}
        g = {n: quantum_gain(n, 0.1).gain for n in range(3, 100, 2)}
        arithmetic = {n: 0.5 * (0.9**n - 2 ** (-(n - 1) / 2)) for n in expected}
        n_star = transition_n(0.1)
        peak = max(g, key=g.get)
        rel41 = abs(g[41] - 0.5 * 0.9**41) / (0.5 * 0.9**41)
    checks = {
        "values": all(abs(g[n] - v) < 1e-4 and abs(g[n] - arithmetic[n]) < 1e-4 for n, v in expected.items()),
        "pattern": g[3] < g[5] < g[7] > g[9],
        "N* range": 5 < n_star < 9,
        "discrete peak": peak == 7 and abs(peak - n_star) < 2,
        "universal bound": rel41 < 0.05,
    }
    finish(acceptance_record, f"AC7 CCP quantum gain (N*={n_star:.4f})", checks, t, 1.0)


def test_ac08_separability(acceptance_record):
    with Timer() as t:
        thr = entanglement.separability_threshold(2, NoiseKind.DEPOLARIZING)
        p_star = thr.p
        below = dense.pt_spectrum(dense.from_structured(decohered_ghz(2, "d", p_star - 0.01)), [0])
        above = dense.pt_spectrum(dense.from_structured(decohered_ghz(2, "d", p_star + 0.01)), [0])
        p_sep = {n: entanglement.separability_threshold(n, NoiseKind.DEPOLARIZING).p for n in range(2, 9)}
        p_c = {n: (1 - 2 ** -0.25) if n == 2 else mermin_critical_noise(n) for n in p_sep}
    checks = {
        "n=2 bisection": abs(p_star - (3 - math.sqrt(3)) / 3) < 1e-8,
        "PT sign change": below.min() < 0 <= above.min(),
        "violation inside entangled region": all(p_c[n] < p_sep[n] for n in p_sep),
    }
    finish(acceptance_record, "AC8 separability threshold", checks, t, 10.0)


def test_ac09_oracle_equivalence(acceptance_record):
    dev = {"channel": 0.0, "negativity": 0.0, "correlation": 0.0, "concurrence": 0.0}
    rng = np.random.default_rng(1234)
    with Timer() as t:
        for kind in ("d", "pd"):
            for n in range(2, 7):
                for p in ELEVEN:
                    s = decohered_ghz(n, kind, p)
                    ref = dense.apply_channel_dense(dense.ghz_dense(n), NoiseKind.parse(kind), p)
                    dev["channel"] = max(dev["channel"], float(np.max(np.abs(dense.from_structured(s).matrix - ref.matrix))))
                    for a in range(1, n):
                        d = abs(entanglement.negativity(s, a) - dense.negativity_dense(ref, range(a)))
                        dev["negativity"] = max(dev["negativity"], d)
                    for _ in range(3):
                        obs = [Observable.of(*rng.normal(size=3), normalize=True) for _ in range(n)]
                        d = abs(correlation(s, obs) - dense.correlation_dense(ref, [o.bloch for o in obs]))
                        dev["correlation"] = max(dev["correlation"], d)
                    if n == 2:
                        d = abs(entanglement.concurrence_two_qubit(s) - dense.wootters_concurrence(ref))
                        dev["concurrence"] = max(dev["concurrence"], d)
    checks = {k: v < 1e-10 for k, v in dev.items()}
    worst = max(dev.values())
    finish(acceptance_record, f"AC9 oracle equivalence n<=6 (max dev {worst:.1e})", checks, t, 60.0)


@pytest.mark.parametrize("n,kind,p,seed", [(3, "d", 0.0, 101), (5, "d", 0.1, 202), (5, "pd", 1.0, 303)])
def test_ac10_monte_carlo(acceptance_record, n, kind, p, seed):
    trials = 100_000
    with Timer() as t:
        inst = mermin_instance(n)
        s = decohered_ghz(n, kind, p)
        closed = 0.5 * (1 + 2 * s.coherence)
        rate = simulate_game(inst, s, trials, seed=seed)
        sigma = math.sqrt(closed * (1 - closed) / trials)
        within = rate == closed if sigma == 0 else abs(rate - closed) <= 4 * sigma
        probs_ok = True
        if n == 3:
            for q in ELEVEN:
                sq = decohered_ghz(3, kind, q)
                ds = dense.from_structured(sq)
                for obs in ([PAULI_X] * 3, [PAULI_X, PAULI_Y, PAULI_Y], [PAULI_Y, PAULI_Y, PAULI_X]):
                    ref = dense.outcome_probabilities_dense(ds, [o.bloch for o in obs])
                    probs_ok &= float(np.max(np.abs(outcome_distribution(correlation(sq, obs), 3) - ref))) < 1e-10
    checks = {"within 4 sigma": within, "P(a|x) vs dense": probs_ok}
    label = f"AC10 Monte Carlo CCP n={n} {kind} p={p} (rate {rate:.5f} vs {closed:.5f})"
    finish(acceptance_record, label, checks, t, 30.0)
