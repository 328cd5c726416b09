"""Qutrit-subspace quantum key distribution at desk scale.

Exact small-Hilbert-space quantum mechanics for the encoding and decoding,
analytic collective-attack secret-key rates for the qutrit scheme and its
qubit baseline, per-distance mean-photon-number optimization, and a seeded
Monte Carlo round simulator that checks the analytic probabilities.
"""

from .adversary import EveLedger, EveStrategy, attack_pns, attack_single_photon
from .mcharness import ChannelModel, McReport, run_experiment, simulate_round
from .optimize import CurvePoint, curve, optimize_mu, secure_distance
from .protocol import (
    BB84,
    QUTRIT,
    VACUUM,
    AliceChoice,
    BobChoice,
    RoundRecord,
    alice_prepare,
    bob_receive_bb84,
    bob_receive_qutrit,
    sift,
)
from .qcore import (
    MeasBasis,
    PhasePair,
    Projector,
    Space,
    StateVec,
    binary_entropy,
    decode_qubit,
    encode_qutrit,
    encode_via_projection,
    measure_equatorial,
)
from .rates import (
    RateBreakdown,
    SystemParams,
    key_rate,
    key_rate_bb84,
    key_rate_qutrit,
    poisson_mass,
    qber,
    raw_rates,
    transmittance,
    yields,
)

__version__ = "0.1.0"
