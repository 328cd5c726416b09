import itertools
import math

import numpy as np
import pytest

from qutrit_qkd.adversary import (
    INTERCEPT_RESEND_BB84,
    NONE,
    PNS,
    QUBIT_FORWARD,
    QUTRIT_FORWARD,
    EveStrategy,
    attack_pns,
    attack_single_photon,
    eve_matches_bob_subspace,
)
from qutrit_qkd.protocol import (
    BB84,
    QUTRIT,
    VACUUM,
    RoundRecord,
    alice_prepare,
    bob_receive_bb84,
    bob_receive_qutrit,
    sift,
)
from qutrit_qkd.qcore import MeasBasis, PhasePair, encode_qutrit, equatorial_state

from conftest import within_4se


def test_strategy_validation():
    with pytest.raises(ValueError):
        EveStrategy("mitm")
    with pytest.raises(ValueError):
        EveStrategy(NONE, epsilon1=0.7)


def test_none_strategy_is_identity(rng):
    state = encode_qutrit(PhasePair(0.0, math.pi))
    forwarded, ledger = attack_single_photon(EveStrategy(NONE), state, rng)
    assert forwarded is state
    assert not ledger.attacked


def test_single_photon_contract_violations(rng):
    state = encode_qutrit(PhasePair(0.0, 0.0))
    with pytest.raises(ValueError):
        attack_single_photon(EveStrategy(PNS), state, rng)
    with pytest.raises(ValueError):
        attack_single_photon(EveStrategy(INTERCEPT_RESEND_BB84), state, rng)
    with pytest.raises(ValueError):
        attack_single_photon(
            EveStrategy(QUTRIT_FORWARD), equatorial_state(MeasBasis.B0, 0), rng
        )


def _attacked_round(protocol, strategy, rng):
    """One lossless single-photon round under attack, after sifting."""
    alice, state = alice_prepare(protocol, rng)
    forwarded, ledger = attack_single_photon(strategy, state, rng)
    if protocol == QUTRIT:
        bob, decoded, outcome = bob_receive_qutrit(forwarded, rng)
    else:
        bob, decoded, outcome = bob_receive_bb84(forwarded, rng)
    return sift(
        RoundRecord(
            alice=alice,
            photon_n=1,
            eve=ledger,
            bob=bob,
            detected=forwarded is not VACUUM,
            decoded=decoded,
            outcome_bit=outcome,
        )
    )


def _sifted_error_rate(protocol, kind, rng, rounds):
    sifted = errors = 0
    strategy = EveStrategy(kind)
    for _ in range(rounds):
        rec = _attacked_round(protocol, strategy, rng)
        sifted += rec.sifted
        errors += rec.error
    return errors / sifted, sifted


def test_intercept_resend_quarter_error(rng):
    rate, n = _sifted_error_rate(BB84, INTERCEPT_RESEND_BB84, rng, 40_000)
    assert within_4se(rate, 0.25, n)


def test_qutrit_forward_three_eighths_error(rng):
    rate, n = _sifted_error_rate(QUTRIT, QUTRIT_FORWARD, rng, 50_000)
    assert within_4se(rate, 3 / 8, n)


def test_qubit_forward_one_third_error(rng):
    rate, n = _sifted_error_rate(QUTRIT, QUBIT_FORWARD, rng, 50_000)
    assert within_4se(rate, 1 / 3, n)


def test_qutrit_forward_sends_vacuum_on_decode_failure(rng):
    state = encode_qutrit(PhasePair(math.pi, math.pi / 2))
    n = 30_000
    vac = sum(
        attack_single_photon(EveStrategy(QUTRIT_FORWARD), state, rng)[0] is VACUUM
        for _ in range(n)
    )
    assert within_4se(vac / n, 1 / 3, n)


def test_qubit_forward_halves_cross_subspace_detection(rng):
    # Conditioned on Eve forwarding a bare qubit from the other subspace,
    # Bob's decode succeeds half the time and errs half of those.
    strategy = EveStrategy(QUBIT_FORWARD)
    cross = decoded = 0
    rounds = 60_000
    for _ in range(rounds):
        _, state = alice_prepare(QUTRIT, rng)
        forwarded, ledger = attack_single_photon(strategy, state, rng)
        if forwarded is VACUUM:
            continue
        bob, ok, _ = bob_receive_qutrit(forwarded, rng)
        if bob.subspace != ledger.eve_subspace:
            cross += 1
            decoded += ok
    assert within_4se(decoded / cross, 0.5, cross)


def test_error_rate_ordering_is_analytic_and_simulated():
    # At equal disturbance the qutrit-forward attack always leaves more
    # errors than the qubit-forward attack: the gap is 1/12 - eps/6 > 0.
    for eps in np.linspace(0.0, 0.4999, 200):
        assert (eps + 0.5) / 2 > 2 * eps / 3 + 1 / 6


def test_pns_match_frequency_single_copy(rng):
    strategy = EveStrategy(PNS)
    n = 100_000
    hits = 0
    for _ in range(n):
        pair = PhasePair(0.0, math.pi / 2)
        hits += attack_pns(strategy, pair, 2, 1 + int(rng.integers(2)), MeasBasis.B0, rng)
    assert within_4se(hits / n, 2 / 3, n)


def test_pns_match_frequency_two_copies(rng):
    strategy = EveStrategy(PNS)
    n = 100_000
    hits = sum(
        attack_pns(strategy, PhasePair(math.pi, 0.0), 3, 2, MeasBasis.B1, rng)
        for _ in range(n)
    )
    assert within_4se(hits / n, 8 / 9, n)


def test_pns_against_bb84_always_learns(rng):
    strategy = EveStrategy(PNS)
    assert all(
        attack_pns(strategy, None, 2, None, MeasBasis.B0, rng, protocol=BB84)
        for _ in range(100)
    )


def test_pns_requires_multiphoton(rng):
    with pytest.raises(ValueError):
        attack_pns(EveStrategy(PNS), PhasePair(0, 0), 1, 1, MeasBasis.B0, rng)
    with pytest.raises(ValueError):
        attack_pns(EveStrategy(NONE), PhasePair(0, 0), 2, 1, MeasBasis.B0, rng)


def test_eve_matches_bob_subspace_uniform(rng):
    freq = eve_matches_bob_subspace(100_000, rng)
    assert within_4se(freq, 0.5, 100_000)


def test_eve_matches_bob_subspace_eve_pinned(rng):
    freq = eve_matches_bob_subspace(50_000, rng, eve_subspace=1)
    assert within_4se(freq, 0.5, 50_000)


def test_eve_matches_bob_subspace_both_pinned(rng):
    assert eve_matches_bob_subspace(2_000, rng, eve_subspace=1, bob_subspace=1) == 1.0
