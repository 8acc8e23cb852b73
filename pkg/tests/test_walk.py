import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semisic import walk as W
from semisic.povm import NotRankOneError, build_semi_sic, born_probabilities, povm_from_effects, random_rank_one_povm, sic_povm
from semisic.qmath import H, I2, PLUS, SX, V, random_density, random_pure, random_unitary
from semisic.reference import PLUS_PROBABILITIES_1_13, realization_schedule_1_13, selftest_schedule_1_13

PORTS = (5, 3, 1, -1)
seeds = st.integers(0, 2**32 - 1)


def _random_schedule(rng, steps=5):
    coins = {}
    for n in range(1, steps + 1):
        for x in range(-n + 1, n, 2):
            coins[(n, x)] = random_unitary(rng)
    return W.CoinSchedule(steps, coins)


def test_bare_translation():
    state = W.step_walk(W.WalkState.localized(H), W.identity_schedule(1), 1)
    assert set(state.amplitudes) == {1}
    np.testing.assert_allclose(state.amplitudes[1], [1, 0])


def test_flip_then_shift():
    sched = W.CoinSchedule(1, {(1, 0): SX})
    state = W.step_walk(W.WalkState.localized(V), sched, 1)
    np.testing.assert_allclose(state.amplitudes[1], [1, 0])


def test_two_steps_of_printed_schedule():
    sched = realization_schedule_1_13()
    state = W.WalkState.localized(PLUS)
    for n in (1, 2):
        state = W.step_walk(state, sched, n)
    assert abs(state.amplitudes[2][0] - 0.6011 / np.sqrt(2)) < 1e-3


def test_printed_schedule_plus_distribution():
    run = W.run_walk(PLUS, realization_schedule_1_13())
    assert sorted(run.distribution, reverse=True) == list(PORTS)
    np.testing.assert_allclose(run.probabilities(PORTS), PLUS_PROBABILITIES_1_13, atol=2e-3)
    assert sum(run.distribution.values()) == pytest.approx(1.0, abs=1e-10)


def test_identity_schedule_ballistic():
    run = W.run_walk(H, W.identity_schedule())
    assert run.distribution == {5: pytest.approx(1.0)}
    # V moves left every step, so the bare lattice splits H and V into two ports
    ks = W.effective_povm(W.identity_schedule())
    assert ks.positions == [5, -5]
    np.testing.assert_allclose(ks.effects[0], H.projector())
    np.testing.assert_allclose(ks.effects[1], V.projector())


@pytest.mark.parametrize("psi", [H, V])
def test_printed_schedule_matches_born_rule(psi):
    probs = W.run_walk(psi, realization_schedule_1_13()).probabilities(PORTS)
    np.testing.assert_allclose(probs, born_probabilities(build_semi_sic("1/13"), psi), atol=2e-3)


def test_printed_schedule_effects_match_family():
    ks = W.effective_povm(realization_schedule_1_13())
    assert ks.positions == list(PORTS)
    assert ks.residual(build_semi_sic("1/13")) < 2e-3
    np.testing.assert_allclose(sum(ks.effects), I2, atol=1e-9)


def test_selftest_schedule_is_equioverlapping():
    povm = W.effective_povm(selftest_schedule_1_13()).to_povm()
    assert len(povm) == 4
    for i in range(4):
        for j in range(i + 1, 4):
            assert np.trace(povm.ops[i] @ povm.ops[j]).real == pytest.approx(1 / 13, abs=2e-3)


def test_compile_b13_matches_printed_coins():
    sched = W.compile_povm(build_semi_sic("1/13"))
    tops = [sched.coin(2, 1)[0, 0].real, sched.coin(3, 0)[0, 0].real, sched.coin(4, 1)[0, 0].real]
    np.testing.assert_allclose(tops, [0.6011, 0.5551, 0.6941], atol=1e-3)
    np.testing.assert_allclose(sched.coin(2, -1), SX)
    np.testing.assert_allclose(sched.coin(4, -1), SX)


def test_compile_sic_round_trip():
    sched = W.compile_povm(sic_povm())
    assert W.effective_povm(sched).residual_at(PORTS, sic_povm()) <= 1e-9


def test_compile_rejects_bad_targets():
    with pytest.raises(NotRankOneError):
        W.compile_povm(povm_from_effects([I2 / 4] * 4))
    with pytest.raises(ValueError):
        W.compile_povm(povm_from_effects([I2 / 2, I2 / 2]))
    with pytest.raises(ValueError):
        W.compile_povm(povm_from_effects([I2 / 2] * 4))


def test_compile_random_povms(rng):
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        target = random_rank_one_povm(rng)
        worst = max(worst, W.effective_povm(W.compile_povm(target)).residual_at(PORTS, target))
    assert worst <= 1e-9
    assert time.perf_counter() - t0 < 10


def test_compile_handles_degenerate_targets():
    # two elements along the same ray: the analytic peel meets a rank drop
    m = H.projector() / 2
    rest = I2 - 2 * m
    target = povm_from_effects([m, m, rest / 2, rest / 2])
    sched = W.compile_povm(target)
    assert W.effective_povm(sched).residual_at(PORTS, target) <= 1e-9


@settings(max_examples=200)
@given(seeds)
def test_unitarity_of_random_walks(seed):
    rng = np.random.default_rng(seed)
    sched = _random_schedule(rng)
    state = W.WalkState.localized(random_pure(rng))
    for n in range(1, 6):
        state = W.step_walk(state, sched, n)
        assert state.norm() == pytest.approx(1.0, abs=1e-12)
        for x in state.amplitudes:
            assert -n <= x <= n and (x - n) % 2 == 0


@given(seeds)
def test_walk_agrees_with_effects(seed):
    rng = np.random.default_rng(seed)
    sched = _random_schedule(rng)
    rho = random_density(rng)
    ks = W.effective_povm(sched)
    np.testing.assert_allclose(sum(ks.effects), I2, atol=1e-9)
    by_pos = W.evolve_density(sched, rho)
    probs = W.port_probabilities(sched, rho, ks.positions)
    np.testing.assert_allclose([by_pos.get(x, 0.0) for x in ks.positions], probs, atol=1e-10)
    psi = random_pure(rng)
    run = W.run_walk(psi, sched)
    np.testing.assert_allclose(run.probabilities(ks.positions), [np.trace(psi.projector() @ e).real for e in ks.effects], atol=1e-10)


@settings(max_examples=50)
@given(seeds)
def test_compile_round_trip_property(seed):
    target = random_rank_one_povm(np.random.default_rng(seed))
    sched = W.compile_povm(target)
    for e, f in zip(target.ops, [dict(zip(W.effective_povm(sched).positions, W.effective_povm(sched).effects))[x] for x in PORTS]):
        np.testing.assert_allclose(f, e, atol=1e-9)


def test_schedule_validation():
    with pytest.raises(ValueError):
        W.CoinSchedule(5, {(1, 0): 2 * I2})
    with pytest.raises(ValueError):
        W.CoinSchedule(5, {(6, 0): I2})
    with pytest.raises(ValueError):
        W.CoinSchedule(0)


def test_schedule_json_round_trip():
    sched = W.compile_povm(build_semi_sic("1/14"))
    data = sched.to_dict()
    assert set(data) == {"steps", "initial_site", "coins"}
    back = W.CoinSchedule.from_dict(data)
    for key, m in sched.coins.items():
        np.testing.assert_allclose(back.coin(*key), m, atol=1e-15)
    dup = dict(data, coins=data["coins"] + data["coins"][:1])
    with pytest.raises(ValueError):
        W.CoinSchedule.from_dict(dup)


def test_kraus_json_has_positions():
    data = W.effective_povm(realization_schedule_1_13()).to_dict()
    assert [e["final_position"] for e in data["elements"]] == list(PORTS)


def test_dephasing_keeps_normalisation():
    sched = W.compile_povm(build_semi_sic("1/13"))
    out = W.evolve_density(sched, PLUS.projector(), dephasing=0.2)
    assert sum(out.values()) == pytest.approx(1.0, abs=1e-12)
