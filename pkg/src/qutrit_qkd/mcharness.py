"""Seeded Monte Carlo experiment runner.

Rounds are grouped into fixed-size blocks; every block draws from its own
generator spawned deterministically from the master seed, so a report depends
only on (configuration, seed) and never on how blocks were scheduled across
workers.  Blocks can therefore be farmed out to a process pool and merged in
index order.

Per-round draw order (one generator, consumed sequentially): Alice's choices,
photon number, Eve's moves (when her strategy applies to the pulse), channel
survival, the dark-count gate, Bob's settings and Born-rule draws, the
misalignment flip, and finally the splitting-attack replay.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import adversary
from .adversary import EveLedger, EveStrategy, attack_pns, attack_single_photon
from .protocol import (
    BB84,
    QUTRIT,
    VACUUM,
    RoundRecord,
    alice_prepare,
    bob_receive_bb84,
    bob_receive_qutrit,
    sift,
)
from .qcore import PhasePair
from .rates import SystemParams, qber, raw_rates, transmittance

BLOCK_ROUNDS = 4096


@dataclass(frozen=True)
class ChannelModel:
    """Loss and dark-count behaviour of the link plus Bob's apparatus."""

    gamma_q: float
    gamma_b: float
    eta: float
    p_d: float

    def __post_init__(self):
        for name in ("gamma_q", "gamma_b", "eta"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"invalid {name}: {v!r}")
        if not 0.0 <= self.p_d < 1.0:
            raise ValueError(f"invalid p_d: {self.p_d!r}")

    @property
    def survival(self) -> float:
        return self.gamma_q * self.gamma_b * self.eta

    @classmethod
    def from_params(cls, params: SystemParams) -> "ChannelModel":
        return cls(
            transmittance(params.alpha_db_per_km, params.length_km),
            params.gamma_b,
            params.eta,
            params.p_d,
        )


def sample_photon_number(mu: float, rng: np.random.Generator) -> int:
    """Photon count of one weak coherent pulse (Poisson with mean ``mu``)."""
    if mu < 0:
        raise ValueError(f"mean photon number must be non-negative, got {mu!r}")
    return int(rng.poisson(mu))


def apply_loss_and_detect(
    photon_n: int, channel: ChannelModel, rng: np.random.Generator
) -> tuple[int, bool, bool]:
    """Propagate ``photon_n`` photons and roll the detectors.

    Each photon independently survives with probability
    gamma_q*gamma_b*eta; when nothing arrives, the two-detector dark-count
    gate fires with probability 2*p_d, mirroring the analytic click rate
    r_sig + 2*p_d*(1 - r_sig).  Returns (survivors, click, dark_click).
    """
    p = channel.survival
    if photon_n == 0:
        survivors = 0
    elif p >= 1.0:
        survivors = photon_n
    else:
        survivors = int(rng.binomial(photon_n, p))
    dark = False
    if survivors == 0 and channel.p_d > 0.0:
        dark = bool(rng.random() < 2.0 * channel.p_d)
    return survivors, survivors > 0 or dark, dark


def simulate_round(
    protocol: str,
    strategy: EveStrategy,
    params: SystemParams,
    channel: ChannelModel,
    rng: np.random.Generator,
) -> RoundRecord:
    """Play one full round and return its sifted record."""
    alice, state = alice_prepare(protocol, rng)
    n = sample_photon_number(params.mu, rng)

    signal = state
    ledger: Optional[EveLedger] = None
    if n == 1 and strategy.kind in adversary.SINGLE_PHOTON_KINDS:
        signal, ledger = attack_single_photon(strategy, state, rng)
    elif n >= 2 and strategy.kind == adversary.PNS:
        ledger = EveLedger(attacked=True, stored_qutrit=state if protocol == QUTRIT else None)

    # A vacuum forward carries no photons; a splitting attack preserves the
    # click statistics (Eve tunes her forwarding against the observed rate),
    # so the original photon number is used for the survival roll.
    n_channel = 0 if signal is VACUUM else n
    _, click, dark = apply_loss_and_detect(n_channel, channel, rng)

    bob = None
    decoded = False
    outcome = None
    if click:
        if dark:
            # The dark click fires in one of the two signal detectors, so Bob
            # registers a (uniformly random) outcome for his drawn settings.
            if protocol == QUTRIT:
                bob, _, _ = bob_receive_qutrit(VACUUM, rng)
            else:
                bob, _, _ = bob_receive_bb84(VACUUM, rng)
            decoded = True
            outcome = int(rng.integers(2))
        else:
            if protocol == QUTRIT:
                bob, decoded, outcome = bob_receive_qutrit(signal, rng)
            else:
                bob, decoded, outcome = bob_receive_bb84(signal, rng)
            if decoded and params.q_opt > 0.0 and rng.random() < params.q_opt:
                outcome ^= 1

    record = RoundRecord(
        alice=alice,
        photon_n=n,
        eve=ledger,
        bob=bob,
        detected=click,
        decoded=decoded,
        outcome_bit=outcome,
        dark_only=dark,
    )
    record = sift(record)

    if (
        record.sifted
        and strategy.kind == adversary.PNS
        and ledger is not None
        and n >= 2
    ):
        announced_sub = record.bob.subspace
        learned = attack_pns(
            strategy,
            None if protocol == BB84 else PhasePair(*alice.phases),
            n,
            announced_sub,
            record.bob.basis,
            rng,
            protocol=protocol,
        )
        record = replace(
            record,
            eve=EveLedger(
                attacked=True,
                eve_subspace=announced_sub,
                eve_bit_known=learned,
                stored_qutrit=ledger.stored_qutrit,
            ),
        )
    return record


@dataclass
class _Tally:
    """Associative per-category counters; merging is order-insensitive."""

    rounds: int = 0
    detected: int = 0
    decoded: int = 0
    sifted: int = 0
    errors: int = 0
    by_category: dict = field(default_factory=dict)
    pns_multi_rounds: int = 0
    pns_sifted: int = 0
    pns_learned: int = 0

    def add_round(self, record: RoundRecord) -> None:
        self.rounds += 1
        if record.dark_only:
            category = "dark"
        elif record.eve is not None and record.eve.attacked:
            category = "attacked"
        else:
            category = "honest"
        cat = self.by_category.setdefault(
            category, {"detected": 0, "decoded": 0, "sifted": 0, "errors": 0}
        )
        if record.detected:
            self.detected += 1
            cat["detected"] += 1
        if record.decoded:
            self.decoded += 1
            cat["decoded"] += 1
        if record.sifted:
            self.sifted += 1
            cat["sifted"] += 1
        if record.error:
            self.errors += 1
            cat["errors"] += 1
        if record.eve is not None and record.eve.attacked and record.photon_n >= 2:
            self.pns_multi_rounds += 1
            if record.sifted:
                self.pns_sifted += 1
                if record.eve.eve_bit_known:
                    self.pns_learned += 1

    def merge(self, other: "_Tally") -> None:
        self.rounds += other.rounds
        self.detected += other.detected
        self.decoded += other.decoded
        self.sifted += other.sifted
        self.errors += other.errors
        self.pns_multi_rounds += other.pns_multi_rounds
        self.pns_sifted += other.pns_sifted
        self.pns_learned += other.pns_learned
        for name, cat in other.by_category.items():
            mine = self.by_category.setdefault(
                name, {"detected": 0, "decoded": 0, "sifted": 0, "errors": 0}
            )
            for k, v in cat.items():
                mine[k] += v


def _binomial_se(p: float, n: int) -> float:
    if n <= 0:
        return 0.0
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


@dataclass(frozen=True)
class McReport:
    """Aggregated counts and frequencies of one experiment."""

    config: dict
    rounds: int
    detected: int
    decoded: int
    sifted: int
    errors: int
    detected_rate: float
    detected_rate_se: float
    qber: float
    qber_se: float
    breakdown: dict
    pns: Optional[dict]

    def __post_init__(self):
        if not 0 <= self.errors <= self.sifted <= self.decoded <= self.detected <= self.rounds:
            raise ValueError("inconsistent counts in report")

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "rounds": self.rounds,
            "detected": self.detected,
            "decoded": self.decoded,
            "sifted": self.sifted,
            "errors": self.errors,
            "detected_rate": self.detected_rate,
            "detected_rate_se": self.detected_rate_se,
            "qber": self.qber,
            "qber_se": self.qber_se,
            "breakdown": self.breakdown,
            "pns": self.pns,
        }


def _run_block(task) -> _Tally:
    protocol, strategy, params, block_seed, block_rounds = task
    rng = np.random.default_rng(block_seed)
    channel = ChannelModel.from_params(params)
    tally = _Tally()
    for _ in range(block_rounds):
        tally.add_round(simulate_round(protocol, strategy, params, channel, rng))
    return tally


def run_experiment(
    protocol: str,
    strategy: EveStrategy,
    params: SystemParams,
    rounds: int,
    seed: int,
    workers: int = 1,
) -> McReport:
    """Run ``rounds`` independent rounds and aggregate them into a report.

    Deterministic for a given (configuration, seed) regardless of
    ``workers``: the block partition is fixed and each block owns a child
    generator spawned from the master seed.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if protocol not in (BB84, QUTRIT):
        raise ValueError(f"unknown protocol {protocol!r}")
    if strategy.kind == adversary.INTERCEPT_RESEND_BB84 and protocol != BB84:
        raise ValueError("intercept_resend_bb84 applies to the bb84 protocol")
    if strategy.kind in (adversary.QUTRIT_FORWARD, adversary.QUBIT_FORWARD) and protocol != QUTRIT:
        raise ValueError(f"{strategy.kind} applies to the qutrit protocol")
    if (
        strategy.kind in adversary.SINGLE_PHOTON_KINDS
        and strategy.epsilon1 != adversary.INTERCEPT_EPSILON1
    ):
        raise ValueError(
            "only the random-basis intercept realization (epsilon1 = 0.25) is simulated"
        )

    n_blocks = math.ceil(rounds / BLOCK_ROUNDS)
    block_sizes = [
        min(BLOCK_ROUNDS, rounds - i * BLOCK_ROUNDS) for i in range(n_blocks)
    ]
    seeds = np.random.SeedSequence(seed).spawn(n_blocks)
    tasks = [
        (protocol, strategy, params, seeds[i], block_sizes[i]) for i in range(n_blocks)
    ]

    total = _Tally()
    if workers == 1 or n_blocks == 1:
        for task in tasks:
            total.merge(_run_block(task))
    else:
        chunk = max(1, n_blocks // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for tally in pool.map(_run_block, tasks, chunksize=chunk):
                total.merge(tally)

    detected_rate = total.detected / rounds
    q = total.errors / total.sifted if total.sifted else 0.0
    breakdown = {}
    for name, cat in sorted(total.by_category.items()):
        cq = cat["errors"] / cat["sifted"] if cat["sifted"] else 0.0
        breakdown[name] = {
            **cat,
            "qber": cq,
            "qber_se": _binomial_se(cq, cat["sifted"]),
        }
    pns = None
    if strategy.kind == adversary.PNS:
        freq = total.pns_learned / total.pns_sifted if total.pns_sifted else 0.0
        pns = {
            "multi_photon_rounds": total.pns_multi_rounds,
            "sifted_replays": total.pns_sifted,
            "learned": total.pns_learned,
            "learned_frequency": freq,
        }
    config = {
        "protocol": protocol,
        "strategy": strategy.kind,
        "epsilon1": strategy.epsilon1,
        "rounds": rounds,
        "seed": seed,
        "params": {
            "alpha_db_per_km": params.alpha_db_per_km,
            "length_km": params.length_km,
            "gamma_b": params.gamma_b,
            "eta": params.eta,
            "p_d": params.p_d,
            "q_opt": params.q_opt,
            "mu": params.mu,
        },
    }
    return McReport(
        config=config,
        rounds=rounds,
        detected=total.detected,
        decoded=total.decoded,
        sifted=total.sifted,
        errors=total.errors,
        detected_rate=detected_rate,
        detected_rate_se=_binomial_se(detected_rate, rounds),
        qber=q,
        qber_se=_binomial_se(q, total.sifted),
        breakdown=breakdown,
        pns=pns,
    )


def analytic_expectations(params: SystemParams) -> dict:
    """Closed-form click rate and error rate for side-by-side comparison."""
    r_sig, r_raw = raw_rates(params)
    return {"r_sig": r_sig, "r_raw": r_raw, "q": qber(params)}
