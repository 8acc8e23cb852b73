import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semisic import selftest as S
from semisic.povm import OutOfRangeError, build_semi_sic, semi_sic_params, sic_povm, verify_povm
from semisic.qmath import I2, SZ, random_density
from semisic.reference import QUOTED_Q, selftest_schedule_1_13, selftest_states_1_13
from semisic.walk import effective_povm

seeds = st.integers(0, 2**32 - 1)


def _trivial_scenario(povm=None):
    return S.PamScenario((I2 / 2,) * 4, (SZ,) * 3, povm or sic_povm())


# ---------------------------------------------------------------- bound and statistics


@pytest.mark.parametrize("B", ["1/13", "1/14", "1/15"])
def test_q_max_quoted(B):
    assert S.q_max(B) == pytest.approx(QUOTED_Q[B], abs=1e-4)


def test_q_max_closed_forms():
    assert S.q_max("1/13") == pytest.approx(24 / math.sqrt(11), abs=1e-12)
    assert S.q_max("1/15") == 8.0
    assert S.q_max("1/12") == pytest.approx(4 * math.sqrt(3), abs=1e-12)
    with pytest.raises(OutOfRangeError):
        S.q_max("1/17")


def test_q_max_monotone_on_grid():
    grid = np.linspace(1 / 16, 1 / 12, 1001)[1:]
    q = np.array([S.q_max(float(b)) for b in grid])
    assert np.all(np.diff(q) < 0)


def test_probabilities_maximally_mixed():
    stats = S.scenario_probabilities(_trivial_scenario())
    np.testing.assert_allclose(stats.dichotomic[:, :, 0], 0.5)
    np.testing.assert_allclose(stats.four.sum(axis=1), 1.0, atol=1e-10)


def test_published_preparations_and_walk_povm_penalty():
    povm = effective_povm(selftest_schedule_1_13()).to_povm()
    preps = tuple(s.projector() for s in selftest_states_1_13())
    stats = S.scenario_probabilities(S.PamScenario(preps, (SZ,) * 3, povm))
    penalty = float(np.trace(stats.four))
    # regression value: the printed coins anti-distinguish the printed states to ~1e-8
    assert penalty == pytest.approx(8.395e-9, rel=1e-3)
    np.testing.assert_allclose(stats.four.sum(axis=1), 1.0, atol=1e-10)


def test_scenario_validation():
    with pytest.raises(ValueError):
        S.PamScenario((I2 / 2,) * 3, (SZ,) * 3, sic_povm())
    with pytest.raises(ValueError):
        S.PamScenario((I2 / 2,) * 4, (2 * SZ,) * 3, sic_povm())
    with pytest.raises(ValueError):
        S.PamScenario((I2 / 2,) * 4, (SZ,) * 3, S.povm_from_effects([I2 / 2] * 4))


@given(seeds)
def test_probability_rows_normalised(seed):
    rng = np.random.default_rng(seed)
    preps = tuple(random_density(rng) for _ in range(4))
    obs = tuple(2 * random_density(rng) - I2 for _ in range(3))
    stats = S.scenario_probabilities(S.PamScenario(preps, obs, build_semi_sic("1/14")))
    np.testing.assert_allclose(stats.dichotomic.sum(axis=2), 1.0, atol=1e-10)
    np.testing.assert_allclose(stats.four.sum(axis=1), 1.0, atol=1e-10)
    assert stats.dichotomic.min() >= 0 and stats.four.min() >= 0


# ---------------------------------------------------------------- witness evaluation


def test_zero_witness_is_minus_penalty():
    s = _trivial_scenario()
    res = S.evaluate_witness(s, S.WitnessSpec(np.zeros((4, 3)), 1.0))
    stats = S.scenario_probabilities(s)
    assert res.w == pytest.approx(-np.trace(stats.four), abs=1e-15)
    assert res.q_bound is None and res.gap is None


def test_optimal_scenario_b13():
    spec = S.default_witness("1/13")
    res = S.evaluate_witness(S.optimal_scenario("1/13", spec), spec)
    assert res.w == pytest.approx(7.2363, abs=1e-3)
    assert res.q_bound == pytest.approx(S.q_max("1/13"))
    assert res.gap == pytest.approx(0.0, abs=1e-8)
    assert res.w == pytest.approx(res.w1 - res.k * res.penalty_term, abs=1e-12)


def test_sic_substitution_is_strictly_worse():
    spec = S.default_witness("1/13")
    s = S.optimal_scenario("1/13", spec)
    margin = S.evaluate_witness(s, spec).w - S.evaluate_witness(s.with_povm(sic_povm()), spec).w
    # regression value for the shipped 1/13 witness
    assert margin == pytest.approx(0.04404, abs=1e-4)


@settings(max_examples=50)
@given(seeds, st.integers(0, 3), st.integers(0, 2), st.floats(-1e-3, 1e-3))
def test_witness_is_affine_in_probabilities(seed, x, y, eps):
    rng = np.random.default_rng(seed)
    spec = S.WitnessSpec(rng.normal(size=(4, 3)), k=float(rng.uniform(0.1, 3)))
    p2 = rng.uniform(size=(4, 3, 2))
    p4 = rng.uniform(size=(4, 4))
    base = S.witness_from_statistics(S.PamStatistics(p2, p4), spec).w
    q2 = p2.copy()
    q2[x, y, 0] += eps
    assert S.witness_from_statistics(S.PamStatistics(q2, p4), spec).w - base == pytest.approx(spec.omega[x, y] * eps, abs=1e-12)
    q4 = p4.copy()
    q4[x, x] += eps
    assert S.witness_from_statistics(S.PamStatistics(p2, q4), spec).w - base == pytest.approx(-spec.k * eps, abs=1e-12)


def test_witness_spec_contract(tmp_path):
    with pytest.raises(ValueError):
        S.WitnessSpec(np.zeros((4, 3)), k=0.0)
    with pytest.raises(ValueError):
        S.WitnessSpec(np.zeros((3, 4)))
    spec = S.default_witness("1/14")
    assert spec.B == pytest.approx(1 / 14) and spec.k > 0
    assert spec.meta["seed"] == 0 and "version" in spec.meta
    path = tmp_path / "w.json"
    path.write_text(json.dumps(spec.to_dict()))
    back = S.WitnessSpec.from_dict(json.loads(path.read_text()))
    np.testing.assert_array_equal(back.omega, spec.omega)


def test_stationary_parameters_match_shipped_fit():
    for B in ("1/12", "1/13", "1/14", "1/15"):
        meta = S.default_witness(B).meta
        np.testing.assert_allclose(S.stationary_parameters(B), (meta["d1"], meta["d2"]), atol=1e-5)
    assert S.stationary_parameters("1/12") == pytest.approx((1.0, 1.0), abs=1e-12)


# ---------------------------------------------------------------- see-saw


def test_seesaw_zero_witness_reaches_zero():
    _, res = S.seesaw_optimize(S.WitnessSpec(np.zeros((4, 3)), 1.0), restarts=3, seed=1)
    assert res.w == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("B", ["1/12", "1/13", "1/14", "1/15"])
def test_seesaw_monotone(B):
    spec = S.default_witness(B)
    for i in range(4):
        run = S.seesaw_run(spec, np.random.default_rng(i))
        assert np.all(np.diff(run.history) >= -1e-12)
        assert run.converged


def test_seesaw_independent_of_threads():
    spec = S.default_witness("1/14")
    _, a = S.seesaw_optimize(spec, restarts=4, seed=9, threads=1)
    _, b = S.seesaw_optimize(spec, restarts=4, seed=9, threads=4)
    assert a.w == b.w and a.history == b.history


@pytest.mark.slow
def test_seesaw_b15_reaches_eight():
    _, res = S.seesaw_optimize(S.default_witness("1/15"), restarts=50, seed=0)
    assert res.w == pytest.approx(8.0, abs=1e-3)


@pytest.mark.slow
def test_seesaw_b13_self_tests_the_family():
    s, res = S.seesaw_optimize(S.default_witness("1/13"), restarts=50, seed=0)
    p = semi_sic_params("1/13")
    rep = verify_povm(s.povm4, "1/13", tol=1e-3)
    assert rep.checks["symmetric"] and rep.checks["trace_spectrum"] and rep.checks["complete"]
    np.testing.assert_allclose(np.sort(s.povm4.weights), [p.a_minus, p.a_minus, p.a_plus, p.a_plus], atol=1e-3)


def test_published_preparations_attain_bound():
    preps = [s.projector() for s in selftest_states_1_13()]
    _, res = S.seesaw_optimize(S.default_witness("1/13"), restarts=5, seed=0, fixed_preparations=preps)
    assert res.w == pytest.approx(7.2363, abs=1e-3)


# ---------------------------------------------------------------- fitting


@pytest.mark.slow
def test_fit_b14():
    spec = S.fit_witness("1/14", seed=0, restarts=20)
    _, res = S.seesaw_optimize(spec, restarts=20, seed=1)
    assert res.w == pytest.approx(7.5895, abs=1e-3)


@pytest.mark.slow
def test_fit_sic_limit():
    spec = S.fit_witness("1/12", seed=0, restarts=20)
    s, _ = S.seesaw_optimize(spec, restarts=20, seed=2)
    rep = verify_povm(s.povm4, "1/12", tol=1e-3)
    assert rep.checks["symmetric"]


def test_fit_failure_is_reported():
    with pytest.raises(S.FitFailedError):
        S.fit_witness("1/13", start=(0.2, 3.0), restarts=2, max_evals=1)


def test_antidistinguishing_povm_of_optimal_preparations():
    s = S.optimal_scenario("1/14")
    povm = S.antidistinguishing_povm(s.preparations)
    assert S.semi_sic_residual(povm, 1 / 14) < 1e-10


# ---------------------------------------------------------------- finite statistics


def test_zero_shots_is_exact():
    spec = S.default_witness("1/13")
    s = S.optimal_scenario("1/13", spec)
    exact = S.evaluate_witness(s, spec)
    res = S.sample_witness(s, spec, 0)
    assert res.w == exact.w and res.stderr == 0.0
    with pytest.raises(ValueError):
        S.sample_witness(s, spec, -1)


def test_sampling_at_experimental_precision():
    spec = S.default_witness("1/13")
    s = S.optimal_scenario("1/13", spec)
    res = S.sample_witness(s, spec, 7500, seed=11)
    assert 0.015 < res.stderr < 0.06
    assert abs(res.w - 7.2363) < 3 * res.stderr


def test_sampling_b15_million_shots():
    spec = S.default_witness("1/15")
    res = S.sample_witness(S.optimal_scenario("1/15", spec), spec, 1_000_000, seed=4, n_boot=200)
    assert res.w == pytest.approx(8.0, abs=0.01)


def test_sampling_deterministic_and_counts():
    spec = S.default_witness("1/14")
    s = S.optimal_scenario("1/14", spec)
    a = S.sample_witness(s, spec, 1000, seed=3)
    b = S.sample_witness(s, spec, 1000, seed=3)
    assert a.to_dict() == b.to_dict()
    res, counts = S.sample_witness_with_counts(s, spec, 1000, seed=3)
    assert res.w == a.w
    rows = counts.rows()
    assert len(rows) == 4 * (3 * 2 + 4)
    assert all(sum(c for x, y, _, c in rows if (x, y) == key) == 1000 for key in {(r[0], r[1]) for r in rows})


def test_estimator_consistency():
    spec = S.default_witness("1/13")
    s = S.optimal_scenario("1/13", spec)
    exact = S.evaluate_witness(s, spec).w
    runs = [S.sample_witness(s, spec, 2000, seed=i, n_boot=200) for i in range(100)]
    mean = np.mean([r.w for r in runs])
    stderr = np.mean([r.stderr for r in runs])
    assert abs(mean - exact) < 3 * stderr / math.sqrt(len(runs))


def test_over_maximal_estimates_are_flagged():
    spec = S.default_witness("1/14")
    res = S.witness_from_statistics(S.scenario_probabilities(S.optimal_scenario("1/14", spec)), spec, 1 / 14)
    res.w += 0.01
    assert res.exceeds_bound and res.to_dict()["exceeds_bound"]


def test_noise_applies_to_four_outcome_rows_only():
    from semisic.optics import NoiseModel

    spec = S.default_witness("1/13")
    s = S.optimal_scenario("1/13", spec)
    clean = S.scenario_probabilities(s)
    noisy = S.noisy_statistics(s, NoiseModel(extinction_ratio=220, efficiency=(1, 0.99, 0.98, 0.99)))
    np.testing.assert_array_equal(noisy.dichotomic, clean.dichotomic)
    assert 0 < np.max(np.abs(noisy.four - clean.four)) < 0.02
    np.testing.assert_allclose(noisy.four.sum(axis=1), 1.0, atol=1e-12)
