import math

import numpy as np
import pytest

from qutrit_qkd.adversary import EveStrategy
from qutrit_qkd.mcharness import (
    ChannelModel,
    analytic_expectations,
    apply_loss_and_detect,
    run_experiment,
    sample_photon_number,
    simulate_round,
)
from qutrit_qkd.rates import SystemParams

from conftest import within_4se


def test_photon_sampling_zero_mean(rng):
    assert all(sample_photon_number(0.0, rng) == 0 for _ in range(100))


def test_photon_sampling_rejects_negative_mean(rng):
    with pytest.raises(ValueError):
        sample_photon_number(-0.5, rng)


def test_photon_sampling_matches_poisson(rng):
    n = 200_000
    draws = [sample_photon_number(0.1, rng) for _ in range(n)]
    p0 = sum(d == 0 for d in draws) / n
    assert within_4se(p0, math.exp(-0.1), n)
    mean = sum(draws) / n
    assert abs(mean - 0.1) <= 4 * math.sqrt(0.1 / n)


def test_loss_lossless_single_photon_always_clicks(rng):
    channel = ChannelModel(1.0, 1.0, 1.0, 0.0)
    for _ in range(200):
        survives, click, dark = apply_loss_and_detect(1, channel, rng)
        assert (survives, click, dark) == (1, True, False)


def test_loss_dark_click_rate_on_vacuum(rng):
    channel = ChannelModel(1.0, 1.0, 1.0, 1e-5)
    n = 1_000_000
    clicks = sum(apply_loss_and_detect(0, channel, rng)[1] for _ in range(n))
    assert within_4se(clicks / n, 2e-5, n)


def test_loss_click_rate_matches_signal_formula(rng):
    channel = ChannelModel(0.1, 0.5, 0.1, 0.0)
    mu = 0.1
    n = 1_000_000
    clicks = 0
    for _ in range(n):
        photons = sample_photon_number(mu, rng)
        clicks += apply_loss_and_detect(photons, channel, rng)[1]
    assert within_4se(clicks / n, 0.0004998750208307294, n)


def test_channel_model_validation():
    with pytest.raises(ValueError, match="gamma_q"):
        ChannelModel(0.0, 0.5, 0.1, 0.0)
    with pytest.raises(ValueError, match="p_d"):
        ChannelModel(0.5, 0.5, 0.1, 1.0)


def test_honest_noiseless_run_has_zero_errors(lossless_params):
    report = run_experiment("qutrit", EveStrategy("none"), lossless_params, 50_000, seed=1)
    assert report.errors == 0
    assert report.qber == 0.0


def test_dark_dominated_qber_matches_first_term(rng):
    # q_opt = 0 isolates the dark-count error term p_d(1-R_sig)/R_raw.
    params = SystemParams(
        alpha_db_per_km=0.2, length_km=0.0, gamma_b=1.0, eta=1.0,
        p_d=2e-3, q_opt=0.0, mu=0.1,
    )
    report = run_experiment("bb84", EveStrategy("none"), params, 300_000, seed=2)
    expected = analytic_expectations(params)["q"]
    assert within_4se(report.qber, expected, report.sifted)


def test_dark_click_errors_are_fair_coin():
    params = SystemParams(
        alpha_db_per_km=0.2, length_km=0.0, gamma_b=1.0, eta=1.0,
        p_d=2e-3, q_opt=0.0, mu=0.1,
    )
    report = run_experiment("qutrit", EveStrategy("none"), params, 300_000, seed=3)
    dark = report.breakdown["dark"]
    assert dark["sifted"] > 200
    assert within_4se(dark["qber"], 0.5, dark["sifted"])


def test_detection_rate_and_qber_match_analytic(default_params):
    report = run_experiment("bb84", EveStrategy("none"), default_params, 300_000, seed=4)
    expected = analytic_expectations(default_params)
    assert within_4se(report.detected_rate, expected["r_raw"], report.rounds)
    assert within_4se(report.qber, expected["q"], report.sifted)


def test_counts_are_nested(default_params):
    report = run_experiment("qutrit", EveStrategy("none"), default_params, 100_000, seed=5)
    assert 0 <= report.errors <= report.sifted <= report.decoded
    assert report.decoded <= report.detected <= report.rounds


def test_same_seed_same_report_across_workers(default_params):
    kwargs = dict(rounds=3 * 4096 + 777, seed=99)
    a = run_experiment("qutrit", EveStrategy("none"), default_params, workers=1, **kwargs)
    b = run_experiment("qutrit", EveStrategy("none"), default_params, workers=3, **kwargs)
    assert a.as_dict() == b.as_dict()


def test_different_seeds_differ(default_params):
    a = run_experiment("bb84", EveStrategy("none"), default_params, 20_000, seed=6)
    b = run_experiment("bb84", EveStrategy("none"), default_params, 20_000, seed=7)
    assert a.as_dict() != b.as_dict()


def test_pns_learn_frequency_in_full_runs(lossless_params):
    params = lossless_params.with_(mu=0.6)
    report = run_experiment("qutrit", EveStrategy("pns"), params, 150_000, seed=8)
    pns = report.pns
    assert pns["sifted_replays"] > 1000
    # Mixture of photon numbers >= 2; every extra stored copy only helps,
    # so the learned frequency must sit between the 1-copy and sure-thing rates.
    assert 2 / 3 - 0.02 <= pns["learned_frequency"] <= 1.0
    # Attacked multiphoton rounds leave no errors (the splitting is silent).
    assert report.breakdown["attacked"]["errors"] == 0


def test_strategy_protocol_compatibility(default_params):
    with pytest.raises(ValueError):
        run_experiment("qutrit", EveStrategy("intercept_resend_bb84"), default_params, 10, seed=1)
    with pytest.raises(ValueError):
        run_experiment("bb84", EveStrategy("qubit_forward"), default_params, 10, seed=1)
    with pytest.raises(ValueError):
        run_experiment("bb84", EveStrategy("none"), default_params, 0, seed=1)
    with pytest.raises(ValueError):
        run_experiment(
            "bb84",
            EveStrategy("intercept_resend_bb84", epsilon1=0.1),
            default_params, 10, seed=1,
        )


def test_simulate_round_is_reproducible(default_params):
    channel = ChannelModel.from_params(default_params)
    strategy = EveStrategy("none")
    r1 = [
        simulate_round("qutrit", strategy, default_params, channel, np.random.default_rng(11))
        for _ in range(1)
    ][0]
    r2 = simulate_round("qutrit", strategy, default_params, channel, np.random.default_rng(11))
    assert r1 == r2
