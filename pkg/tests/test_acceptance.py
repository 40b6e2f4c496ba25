"""Exit criteria.  One test per criterion; the summary prints PASS/FAIL per line."""

import itertools
import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from hiddenmeasure import hilbert
from hiddenmeasure.cli import main
from hiddenmeasure.core import EpsilonMeasurement, MachineState, UnitVector3, angle_between, outcome_probabilities
from hiddenmeasure.experiments import InterferometerConfig, epr_chsh_demo, rauch_interference, wheeler_mz
from hiddenmeasure.montecarlo import EstimatorConfig, sweep_theta
from hiddenmeasure.probability_structure import (
    AbsPower,
    BellScenario,
    BornSquared,
    check_witness,
    chsh_score,
    kolmogorov_embeddable,
    max_frame_defect,
)
from corpus import chsh, classical_model_tables, corpus
from oracles import break_point_frequency, enumeration_feasible

pytestmark = pytest.mark.acceptance

SQ2 = math.sqrt(2)


def random_units(rng, n):
    return [UnitVector3.from_array(v) for v in rng.normal(size=(n, 3))]


def planar(deg):
    return UnitVector3.from_angles(math.pi / 2, math.radians(deg))


def test_criterion_01_cos_squared_identity(rng):
    t0 = time.perf_counter()
    us, vs = random_units(rng, 1000), random_units(rng, 1000)
    worst = 0.0
    for u, v in zip(us, vs):
        d = outcome_probabilities(EpsilonMeasurement(u, 1.0), MachineState(v))
        th = angle_between(u, v)
        worst = max(worst, abs(d.p1 - math.cos(th / 2) ** 2), abs(d.p2 - math.sin(th / 2) ** 2))
    assert worst <= 1e-12
    assert time.perf_counter() - t0 < 1.0


def test_criterion_02_isomorphism(rng):
    t0 = time.perf_counter()
    us, vs = random_units(rng, 1000), random_units(rng, 1000)
    worst = max(
        abs(hilbert.born_transition(u, v) - outcome_probabilities(EpsilonMeasurement(u, 1.0), MachineState(v)).p1)
        for u, v in zip(us, vs)
    )
    assert worst <= 1e-10
    assert time.perf_counter() - t0 < 1.0


def test_criterion_03_monte_carlo_consistency():
    grid = [k * math.pi / 12 for k in range(13)]
    cfg = EstimatorConfig(1_000_000, seed=2024)
    t0 = time.perf_counter()
    rows = sweep_theta(1.0, grid, cfg)
    elapsed = time.perf_counter() - t0
    assert all(abs(r.z) < 4 for r in rows), [r.z for r in rows]
    assert all(abs(r.analytic_p1 - math.cos(r.theta / 2) ** 2) < 1e-12 for r in rows)
    assert sweep_theta(1.0, grid, cfg) == rows
    assert elapsed < 30.0


def test_criterion_04_epsilon_limits(rng):
    z = UnitVector3(0.0, 0.0, 1.0)
    for c in np.concatenate([rng.uniform(-1, 1, 500), [-1.0, -1e-9, 0.0, 1e-9, 1.0]]):
        v = UnitVector3.of(math.sqrt(max(0.0, 1 - c * c)), 0.0, c)
        p1 = outcome_probabilities(EpsilonMeasurement(z, 0.0), MachineState(v)).p1
        assert p1 == (1.0 if v.z >= 0 else 0.0)
    us, vs = random_units(rng, 1000), random_units(rng, 1000)
    for u, v in zip(us, vs):
        d = outcome_probabilities(EpsilonMeasurement(u, 1.0), MachineState(v))
        assert abs(d.p1 - math.cos(angle_between(u, v) / 2) ** 2) <= 1e-12
    v = UnitVector3.of(math.sqrt(1 - 0.25**2), 0.0, 0.25)
    analytic = outcome_probabilities(EpsilonMeasurement(z, 0.5), MachineState(v)).p1
    assert analytic == pytest.approx(0.75, abs=1e-15)
    n = 1_000_000
    f = break_point_frequency(0.5, 0.25, n, seed=31)
    assert abs(f - analytic) < 4 * math.sqrt(analytic * (1 - analytic) / n)


def test_criterion_05_gleason():
    t0 = time.perf_counter()
    u = np.ones(3) / math.sqrt(3)
    assert max_frame_defect(BornSquared(), u, 10_000, 17) < 1e-10
    assert max_frame_defect(AbsPower(1), u, 10_000, 17) > 0.5
    assert max_frame_defect(AbsPower(4), u, 10_000, 17) > 0.01
    assert time.perf_counter() - t0 < 5.0


def test_criterion_06_epr_chsh(rng):
    t0 = time.perf_counter()
    for a, b in zip(random_units(rng, 500), random_units(rng, 500)):
        assert abs(hilbert.correlation(a, b) + a.dot(b)) <= 1e-10
    rep = epr_chsh_demo(planar(0), planar(90), planar(45), planar(-45))
    assert abs(abs(rep.s) - 2 * SQ2) <= 1e-9
    assert rep.embeddable is False
    # deterministic classical corpus: every local deterministic CHSH box, and mixtures
    boxes = []
    for a, ap, b, bp in itertools.product((1, -1), repeat=4):
        boxes.append(chsh([F(a * b), F(a * bp), F(ap * b), F(ap * bp)]))
    boxes.append(classical_model_tables(4, {(0, 1, 1, 0): F(1, 2), (1, 1, 0, 0): F(1, 2)}))
    for s in boxes:
        res = kolmogorov_embeddable(s)
        assert res.feasible
        assert check_witness(s, res.witness) <= 1e-9
    assert time.perf_counter() - t0 < 5.0


def test_criterion_07_lp_vs_enumeration():
    scenarios = [s for _, s in corpus() if s.k <= 4]
    assert len(scenarios) >= 10
    for s in scenarios:
        assert s.exact
        assert kolmogorov_embeddable(s).feasible == enumeration_feasible(s)


def test_criterion_08_wheeler():
    with_b = wheeler_mz(InterferometerConfig(True))
    without_b = wheeler_mz(InterferometerConfig(False))
    flipped = wheeler_mz(InterferometerConfig(True, math.pi))
    assert abs(with_b.p_d1 - 1) <= 1e-12 and abs(with_b.p_d2) <= 1e-12
    assert abs(without_b.p_d1 - 0.5) <= 1e-12 and abs(without_b.p_d2 - 0.5) <= 1e-12
    assert abs(flipped.p_d1) <= 1e-12 and abs(flipped.p_d2 - 1) <= 1e-12


def test_criterion_09_rauch(rng):
    assert abs(rauch_interference(0.0).p_d1 - 1) <= 1e-9
    assert abs(rauch_interference(2 * math.pi).p_d1) <= 1e-9
    assert abs(rauch_interference(4 * math.pi).p_d1 - 1) <= 1e-9
    for chi in rng.uniform(-20, 20, 100):
        assert abs(rauch_interference(chi).p_d1 - rauch_interference(chi + 4 * math.pi).p_d1) <= 1e-10


SMOKE = [
    ["probe", "--epsilon", "1", "--theta", "1.5707963", "--samples", "1000000"],
    ["probe", "--epsilon", "0.5", "--theta", "1", "--samples", "200000", "--shards", "4", "--format", "json"],
    ["sweep", "--epsilon-grid", "lin:0:1:11", "--theta-grid", "lin:0:pi:13", "--samples", "100000"],
    ["sweep", "--theta-grid", ""],
    ["bell", "--a", "1,0,0", "--aprime", "0,1,0", "--b", "1,1,0", "--bprime", "1,-1,0"],
    ["gleason", "--rule", "abspow:1"],
    ["gleason", "--rule", "born2", "--format", "csv"],
    ["interf", "--no-b"],
    ["interf", "--chi", "6.2831853"],
    ["embed", "--bundled", "singlet_chsh"],
    ["embed", "--bundled", "product_coins"],
    ["embed", "--bundled", "machine_triple"],
]


def test_criterion_10_cli_reproducibility(capsys, tmp_path):
    t0 = time.perf_counter()
    for i, argv in enumerate(SMOKE):
        assert main(argv) == 0
        first = capsys.readouterr().out
        f = tmp_path / f"run{i}.out"
        f.write_text(first)
        assert main(["replay", str(f)]) == 0
        assert capsys.readouterr().out == first, argv
    assert time.perf_counter() - t0 < 60.0
