"""Eavesdropping strategies as pure round transformers.

Single-photon strategies intercept the signal state and decide what reaches
Bob; the photon-number-splitting attack stores spare photons and replays them
once the subspace and basis announcements are public.  The concrete
single-photon disturbance simulated here is the random-basis
intercept-and-resend, whose per-attacked-qubit error probability is 1/4; the
``epsilon1`` field on :class:`EveStrategy` exists so the analytic key-rate
module can sweep the abstract parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .protocol import VACUUM, Signal
from .qcore import (
    MeasBasis,
    PhasePair,
    Space,
    StateVec,
    decode_qubit,
    encode_qutrit,
    measure_equatorial,
    phase_for_bit,
)

NONE = "none"
INTERCEPT_RESEND_BB84 = "intercept_resend_bb84"
QUTRIT_FORWARD = "qutrit_forward"
QUBIT_FORWARD = "qubit_forward"
PNS = "pns"
STRATEGY_KINDS = (NONE, INTERCEPT_RESEND_BB84, QUTRIT_FORWARD, QUBIT_FORWARD, PNS)

#: Strategies that act on single-photon pulses.
SINGLE_PHOTON_KINDS = (INTERCEPT_RESEND_BB84, QUTRIT_FORWARD, QUBIT_FORWARD)

#: Error probability induced on an attacked qubit by random-basis intercept.
INTERCEPT_EPSILON1 = 0.25

_BASES = (MeasBasis.B0, MeasBasis.B1)


@dataclass(frozen=True)
class EveStrategy:
    """Attack kind plus the abstract per-qubit disturbance parameter."""

    kind: str
    epsilon1: float = INTERCEPT_EPSILON1

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if not 0.0 <= self.epsilon1 <= 0.5:
            raise ValueError("epsilon1 must lie in [0, 1/2]")


@dataclass(frozen=True)
class EveLedger:
    """What Eve did and what she holds after one round."""

    attacked: bool
    eve_subspace: Optional[int] = None
    eve_bit_known: bool = False
    stored_qutrit: Optional[StateVec] = None


def _decode_subspace(state: StateVec, subspace: int, rng: np.random.Generator):
    """Born-rule subspace decode; returns the decoded qubit or None on failure."""
    prob = state.weight_on((0, 1) if subspace == 1 else (1, 2))
    if prob < 1e-12 or rng.random() >= prob:
        return None
    decoded, _ = decode_qubit(state, subspace)
    return decoded


def _forward_qutrit(state: StateVec, subspace: int, rng: np.random.Generator):
    """Decode one subspace, measure it, and re-encode a fresh qutrit.

    The attacked subspace carries Eve's measured qubit; the other subspace is
    filled with a fresh random equatorial qubit.  Returns (signal, measured),
    where the signal is VACUUM when the decode failed.
    """
    decoded = _decode_subspace(state, subspace, rng)
    if decoded is None:
        return VACUUM, False
    basis = _BASES[int(rng.integers(2))]
    bit, _ = measure_equatorial(decoded, basis, rng.random())
    other_bit = int(rng.integers(2))
    other_basis = _BASES[int(rng.integers(2))]
    attacked_phase = phase_for_bit(basis, bit)
    other_phase = phase_for_bit(other_basis, other_bit)
    if subspace == 1:
        pair = PhasePair(attacked_phase, other_phase)
    else:
        pair = PhasePair(other_phase, attacked_phase)
    return encode_qutrit(pair), True


def attack_single_photon(
    strategy: EveStrategy, alice_state: StateVec, rng: np.random.Generator
) -> tuple[Signal, EveLedger]:
    """Transform a single-photon signal according to Eve's strategy.

    intercept_resend_bb84 measures the qubit in a random basis and resends
    the eigenstate; qutrit_forward decodes a random subspace (success 2/3)
    and re-encodes a fresh qutrit, sending vacuum on failure; qubit_forward
    decodes the same way but forwards the bare post-measurement qubit.
    """
    if strategy.kind == NONE:
        return alice_state, EveLedger(attacked=False)
    if strategy.kind == INTERCEPT_RESEND_BB84:
        if alice_state.space.dim != 2:
            raise ValueError("intercept_resend_bb84 attacks qubit signals")
        basis = _BASES[int(rng.integers(2))]
        _, resent = measure_equatorial(alice_state, basis, rng.random())
        return resent, EveLedger(attacked=True, eve_bit_known=True)
    if strategy.kind in (QUTRIT_FORWARD, QUBIT_FORWARD):
        if alice_state.space is not Space.QUTRIT:
            raise ValueError(f"{strategy.kind} attacks qutrit signals")
        subspace = 1 + int(rng.integers(2))
        if strategy.kind == QUTRIT_FORWARD:
            signal, measured = _forward_qutrit(alice_state, subspace, rng)
            return signal, EveLedger(attacked=True, eve_subspace=subspace, eve_bit_known=measured)
        decoded = _decode_subspace(alice_state, subspace, rng)
        if decoded is None:
            return VACUUM, EveLedger(attacked=True, eve_subspace=subspace)
        basis = _BASES[int(rng.integers(2))]
        _, post = measure_equatorial(decoded, basis, rng.random())
        return post, EveLedger(attacked=True, eve_subspace=subspace, eve_bit_known=True)
    raise ValueError(f"strategy {strategy.kind!r} does not apply to single photons")


def attack_pns(
    strategy: EveStrategy,
    alice_phases: PhasePair,
    photon_n: int,
    announced_subspace: Optional[int],
    announced_basis: MeasBasis,
    rng: np.random.Generator,
    protocol: str = "qutrit",
) -> bool:
    """Replay Eve's stored photons after the public announcements.

    She keeps ``photon_n - 1`` copies.  For the qutrit protocol each copy
    projects onto the announced subspace with its Born probability (2/3 for
    encoded states); on any success she measures in the announced basis and
    learns the sifted bit with certainty.  For the qubit protocol a stored
    copy measured in the announced basis always reveals the bit.  Returns
    whether Eve learned the bit.
    """
    if strategy.kind != PNS:
        raise ValueError("attack_pns requires the pns strategy")
    if photon_n < 2:
        raise ValueError("the photon-number-splitting attack needs photon_n >= 2")
    stored = photon_n - 1
    if protocol == "bb84":
        return True
    state = encode_qutrit(alice_phases)
    prob = state.weight_on((0, 1) if announced_subspace == 1 else (1, 2))
    for _ in range(stored):
        if rng.random() < prob:
            return True
    return False


def eve_matches_bob_subspace(
    trials: int,
    rng: np.random.Generator,
    eve_subspace: Optional[int] = None,
    bob_subspace: Optional[int] = None,
) -> float:
    """Frequency with which Eve and Bob decode the same subspace.

    Runs qutrit_forward rounds conditioned on both Eve and Bob decoding
    successfully; subspace choices are uniform unless pinned by the keyword
    arguments.  Converges to 1/2 for independent uniform choices.
    """
    matches = 0
    done = 0
    while done < trials:
        r = int(rng.integers(16))
        phi_a = phase_for_bit(_BASES[(r >> 2) & 1], r & 1)
        phi_b = phase_for_bit(_BASES[(r >> 3) & 1], (r >> 1) & 1)
        state = encode_qutrit(PhasePair(phi_a, phi_b))
        sub_e = eve_subspace if eve_subspace is not None else 1 + int(rng.integers(2))
        signal, measured = _forward_qutrit(state, sub_e, rng)
        if not measured:
            continue
        sub_b = bob_subspace if bob_subspace is not None else 1 + int(rng.integers(2))
        if _decode_subspace(signal, sub_b, rng) is None:
            continue
        done += 1
        matches += sub_e == sub_b
    return matches / trials
