"""Single-round state machines for the qubit (BB84-style) and qutrit protocols.

Rounds are driven by an injected ``numpy.random.Generator`` so that every
round is reproducible from a seed; records are immutable once produced.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .qcore import (
    MeasBasis,
    PhasePair,
    Space,
    StateVec,
    decode_qubit,
    encode_qutrit,
    equatorial_state,
    measure_equatorial,
    phase_for_bit,
    qubit_as_qutrit,
)

BB84 = "bb84"
QUTRIT = "qutrit"
PROTOCOLS = (BB84, QUTRIT)

_BASES = (MeasBasis.B0, MeasBasis.B1)


class _Vacuum:
    """Distinguished no-photon signal; detectable only through dark counts."""

    def __repr__(self):
        return "VACUUM"


VACUUM = _Vacuum()

Signal = Union[StateVec, _Vacuum]


@dataclass(frozen=True)
class AliceChoice:
    """Alice's random draws for one round and the phases they map to."""

    protocol: str
    bits: tuple[int, ...]
    bases: tuple[MeasBasis, ...]
    phases: tuple[float, ...]


@dataclass(frozen=True)
class BobChoice:
    """Bob's measurement settings; ``subspace`` is None for qubit rounds."""

    subspace: Optional[int]
    basis: MeasBasis


def _qutrit_preparation(r: int) -> tuple[AliceChoice, StateVec]:
    bit_a, bit_b = r & 1, (r >> 1) & 1
    basis_a, basis_b = _BASES[(r >> 2) & 1], _BASES[(r >> 3) & 1]
    phi_a = phase_for_bit(basis_a, bit_a)
    phi_b = phase_for_bit(basis_b, bit_b)
    choice = AliceChoice(QUTRIT, (bit_a, bit_b), (basis_a, basis_b), (phi_a, phi_b))
    return choice, encode_qutrit(PhasePair(phi_a, phi_b))


def _bb84_preparation(r: int) -> tuple[AliceChoice, StateVec]:
    bit, basis = r & 1, _BASES[(r >> 1) & 1]
    phi = phase_for_bit(basis, bit)
    return AliceChoice(BB84, (bit,), (basis,), (phi,)), equatorial_state(basis, bit)


# All possible preparations; choices and states are immutable, so the drawn
# round just picks a shared entry.
_QUTRIT_PREPARATIONS = tuple(_qutrit_preparation(r) for r in range(16))
_BB84_PREPARATIONS = tuple(_bb84_preparation(r) for r in range(4))


def alice_prepare(protocol: str, rng: np.random.Generator) -> tuple[AliceChoice, StateVec]:
    """Draw uniform bits and bases and emit the corresponding signal state."""
    if protocol == QUTRIT:
        return _QUTRIT_PREPARATIONS[int(rng.integers(16))]
    if protocol == BB84:
        return _BB84_PREPARATIONS[int(rng.integers(4))]
    raise ValueError(f"unknown protocol {protocol!r}")


def bob_receive_qutrit(
    signal: Signal, rng: np.random.Generator
) -> tuple[BobChoice, bool, Optional[int]]:
    """Bob's qutrit-round receiver: random subspace, Born-rule decode, measure.

    Accepts an encoded qutrit, a bare subspace qubit (an eavesdropper may
    forward one), or vacuum.  Returns his settings, whether the decode
    succeeded, and the measured bit on success.
    """
    r = int(rng.integers(4))
    choice = BobChoice(1 + (r & 1), _BASES[(r >> 1) & 1])
    if isinstance(signal, _Vacuum):
        return choice, False, None
    state = signal if signal.space is Space.QUTRIT else qubit_as_qutrit(signal)
    prob = state.weight_on((0, 1) if choice.subspace == 1 else (1, 2))
    if prob < 1e-12 or rng.random() >= prob:
        return choice, False, None
    decoded, _ = decode_qubit(state, choice.subspace)
    bit, _ = measure_equatorial(decoded, choice.basis, rng.random())
    return choice, True, bit


def bob_receive_bb84(
    signal: Signal, rng: np.random.Generator
) -> tuple[BobChoice, bool, Optional[int]]:
    """Bob's qubit-round receiver: measure in a random equatorial basis."""
    choice = BobChoice(None, _BASES[int(rng.integers(2))])
    if isinstance(signal, _Vacuum):
        return choice, False, None
    bit, _ = measure_equatorial(signal, choice.basis, rng.random())
    return choice, True, bit


@dataclass(frozen=True)
class RoundRecord:
    """Everything observable about one protocol round."""

    alice: AliceChoice
    photon_n: int
    eve: object  # EveLedger or None; kept loose to avoid a circular import
    bob: Optional[BobChoice]
    detected: bool
    decoded: bool
    outcome_bit: Optional[int]
    sifted: bool = False
    error: bool = False
    dark_only: bool = False

    def __post_init__(self):
        if self.sifted and not self.detected:
            raise ValueError("a sifted round must have been detected")
        if self.error and not self.sifted:
            raise ValueError("error is only defined for sifted rounds")


def sift(record: RoundRecord) -> RoundRecord:
    """Apply the public sifting rule and fill in the error flag.

    A round survives sifting when Bob decoded something and his basis matches
    Alice's basis for the qubit he announced; failed decodes are discarded.
    """
    kept = False
    err = False
    if record.detected and record.decoded and record.bob is not None:
        idx = record.bob.subspace - 1 if record.alice.protocol == QUTRIT else 0
        kept = record.bob.basis is record.alice.bases[idx]
        err = bool(kept and record.outcome_bit != record.alice.bits[idx])
    return RoundRecord(
        alice=record.alice,
        photon_n=record.photon_n,
        eve=record.eve,
        bob=record.bob,
        detected=record.detected,
        decoded=record.decoded,
        outcome_bit=record.outcome_bit,
        sifted=kept,
        error=err,
        dark_only=record.dark_only,
    )
