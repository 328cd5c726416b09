"""Exact state-vector algebra for the small Hilbert spaces of the scheme.

A qutrit carries two phase-encoded qubits in its overlapping 2-dimensional
subspaces span{|0>,|1>} and span{|1>,|2>}.  This module provides the
preparation of such qutrits (directly, and via the projective encoding on the
12-dimensional joint space that serves as an independent cross-check), the
subspace decoding, and equatorial two-outcome measurements.

Everything is pure and immutable.  The only stochastic operation,
``measure_equatorial``, takes its uniform random sample as an explicit
argument, so all functions are safe to call concurrently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

# Constructor guard for state normalization (inputs may carry float noise).
NORM_ATOL = 1e-9
# Tolerance for algebraic identities of exactly-representable objects.
ALGEBRA_ATOL = 1e-12
# Below this post-projection weight a projection is treated as degenerate.
DEGENERATE_WEIGHT = 1e-12

#: The four phases Alice draws from; bit b in basis theta maps to theta + b*pi.
PHASE_SET = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)


class DegenerateProjectionError(ValueError):
    """Raised when a projection leaves numerically no state behind."""


class Space(Enum):
    """Which Hilbert space a state vector lives in."""

    QUBIT_A = "qubit_a"
    QUBIT_B = "qubit_b"
    QUTRIT = "qutrit"
    JOINT_AB = "joint_ab"
    JOINT_QUTRIT_AB = "joint_qutrit_ab"

    @property
    def dim(self) -> int:
        return _SPACE_DIM[self]


_SPACE_DIM = {
    Space.QUBIT_A: 2,
    Space.QUBIT_B: 2,
    Space.QUTRIT: 3,
    Space.JOINT_AB: 4,
    Space.JOINT_QUTRIT_AB: 12,
}

#: Kets spanned by each decoding subspace of the qutrit.
SUBSPACE_KETS = {1: (0, 1), 2: (1, 2)}


@dataclass(frozen=True, eq=False)
class StateVec:
    """Normalized complex amplitudes over explicitly labeled integer kets.

    ``basis_labels[i]`` names the ket that ``amplitudes[i]`` multiplies, so a
    qubit decoded from the second subspace keeps its (1, 2) kets and can be
    re-embedded in the qutrit space without bookkeeping elsewhere.
    """

    amplitudes: np.ndarray
    basis_labels: tuple[int, ...]
    space: Space

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size != self.space.dim:
            raise ValueError(
                f"{self.space.value} needs {self.space.dim} amplitudes, got shape {amps.shape}"
            )
        if len(self.basis_labels) != amps.size:
            raise ValueError("basis_labels must match the amplitude count")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized: sum|amp|^2 = {norm2!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))

    def overlap(self, other: "StateVec") -> complex:
        """<self|other> between states on the same labeled basis."""
        if self.basis_labels != other.basis_labels:
            raise ValueError("overlap requires identical basis labels")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def weight_on(self, kets: tuple[int, ...]) -> float:
        """Total probability carried by the given kets."""
        sel = [lbl in kets for lbl in self.basis_labels]
        return float(np.sum(np.abs(self.amplitudes[sel]) ** 2))


def states_equal_up_to_phase(a: StateVec, b: StateVec, atol: float = ALGEBRA_ATOL) -> bool:
    """State equality modulo a global phase: |<a|b>| = 1 within ``atol``."""
    return abs(abs(a.overlap(b)) - 1.0) <= atol


@dataclass(frozen=True, eq=False)
class Projector:
    """Hermitian idempotent matrix over a labeled basis."""

    matrix: np.ndarray
    basis_labels: tuple[int, ...]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(self.basis_labels):
            raise ValueError("projector matrix must be square and match its labels")
        if not np.allclose(m, m.conj().T, atol=ALGEBRA_ATOL, rtol=0.0):
            raise ValueError("projector is not Hermitian")
        if not np.allclose(m @ m, m, atol=ALGEBRA_ATOL, rtol=0.0):
            raise ValueError("projector is not idempotent")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))

    def expectation(self, state: StateVec) -> float:
        """<psi|P|psi>, real by Hermiticity."""
        if state.basis_labels != self.basis_labels:
            raise ValueError("projector and state are on different bases")
        v = state.amplitudes
        return float(np.real(np.vdot(v, self.matrix @ v)))


def _snap_phase(phi: float) -> float:
    for canonical in PHASE_SET:
        if abs(phi - canonical) <= 1e-9:
            return canonical
    raise ValueError(f"phase {phi!r} is not in the allowed set {{0, pi/2, pi, 3pi/2}}")


@dataclass(frozen=True)
class PhasePair:
    """Alice's phase choices (phi_a, phi_b), each restricted to PHASE_SET."""

    phi_a: float
    phi_b: float

    def __post_init__(self):
        object.__setattr__(self, "phi_a", _snap_phase(self.phi_a))
        object.__setattr__(self, "phi_b", _snap_phase(self.phi_b))


class MeasBasis(Enum):
    """The two mutually unbiased equatorial bases.

    B0 holds the states at equatorial angles {0, pi}, B1 those at
    {pi/2, 3pi/2}; bit b corresponds to angle theta + b*pi.
    """

    B0 = 0.0
    B1 = math.pi / 2

    @property
    def theta(self) -> float:
        return self.value


def phase_for_bit(basis: MeasBasis, bit: int) -> float:
    """Equatorial phase encoding ``bit`` in ``basis`` (member of PHASE_SET)."""
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    return _snap_phase(basis.theta + bit * math.pi)


@lru_cache(maxsize=None)
def equatorial_state(
    basis: MeasBasis,
    bit: int,
    labels: tuple[int, int] = (0, 1),
    space: Space = Space.QUBIT_A,
) -> StateVec:
    """(|lo> + e^{i(theta + bit*pi)}|hi>)/sqrt(2) on the given kets."""
    phase = cmath.exp(1j * (basis.theta + bit * math.pi))
    return StateVec(np.array([1.0, phase]) / _SQRT2, labels, space)


@lru_cache(maxsize=None)
def encode_qutrit(phases: PhasePair) -> StateVec:
    """Qutrit carrying both phase qubits: (|0> + e^{i phi_a}|1> + e^{i(phi_a+phi_b)}|2>)/sqrt(3)."""
    a = cmath.exp(1j * phases.phi_a)
    ab = cmath.exp(1j * (phases.phi_a + phases.phi_b))
    return StateVec(np.array([1.0, a, ab]) / _SQRT3, (0, 1, 2), Space.QUTRIT)


@lru_cache(maxsize=None)
def subspace_projector(subspace: int) -> Projector:
    """Projector onto span{|0>,|1>} (subspace 1) or span{|1>,|2>} (subspace 2)."""
    kets = SUBSPACE_KETS[subspace]
    m = np.zeros((3, 3), dtype=complex)
    for k in kets:
        m[k, k] = 1.0
    return Projector(m, (0, 1, 2))


@lru_cache(maxsize=None)
def encoding_projector() -> Projector:
    """Sum_i |i><i| x |i><i| on the 12-dimensional joint space.

    The joint index is q*4 + s for qutrit ket q and relabeled two-qubit ket s.
    """
    m = np.zeros((12, 12), dtype=complex)
    for i in range(3):
        idx = i * 4 + i
        m[idx, idx] = 1.0
    return Projector(m, tuple(range(12)))


def encode_via_projection(phases: PhasePair) -> StateVec:
    """Independent construction of the encoded qutrit via the joint projection.

    Builds |phi> x |psi_a>|psi_b| on the 12-dimensional space (the two-qubit
    factor relabeled ket-wise as |i>_a|j>_b -> ||3j - i|>), applies the
    encoding projector, then the shift |i> x |j> -> |i> x |j - i mod 4|, and
    returns the qutrit factor.  Exercises a completely different code path
    from :func:`encode_qutrit` so the two can cross-check each other.
    """
    amp_a = np.array([1.0, cmath.exp(1j * phases.phi_a)]) / _SQRT2
    amp_b = np.array([1.0, cmath.exp(1j * phases.phi_b)]) / _SQRT2

    # |i>_a |j>_b -> ||3j - i|>: (0,0)->0, (1,0)->1, (1,1)->2, (0,1)->3.
    joint4 = np.zeros(4, dtype=complex)
    for i in (0, 1):
        for j in (0, 1):
            joint4[abs(3 * j - i)] = amp_a[i] * amp_b[j]

    phi3 = np.full(3, 1.0 / _SQRT3, dtype=complex)
    joint12 = np.kron(phi3, joint4)

    projected = encoding_projector().matrix @ joint12
    weight = float(np.sum(np.abs(projected) ** 2))
    if weight < 1e-9:
        raise DegenerateProjectionError(
            f"encoding projection annihilated the state (weight {weight!r})"
        )
    projected /= math.sqrt(weight)

    # Shift unitary |i> x |j> -> |i> x |(j - i) mod 4>.
    shifted = np.zeros_like(projected)
    for i in range(3):
        for j in range(4):
            shifted[i * 4 + ((j - i) % 4)] = projected[i * 4 + j]

    # The result must factor as (qutrit) x |0>; anything else is a bug.
    grid = shifted.reshape(3, 4)
    residual = float(np.sum(np.abs(grid[:, 1:]) ** 2))
    if residual > ALGEBRA_ATOL:
        raise AssertionError(f"shifted state does not factor: residual {residual!r}")
    return StateVec(grid[:, 0], (0, 1, 2), Space.QUTRIT)


def decode_qubit(q: StateVec, subspace: int) -> tuple[StateVec, float]:
    """Project a qutrit onto one 2-dimensional subspace and renormalize.

    Returns the decoded qubit (keeping its qutrit ket labels) and the success
    probability <q|Pi_subspace|q>.  For any encoded qutrit the probability is
    exactly 2/3.

    Raises:
        DegenerateProjectionError: if the subspace weight is below 1e-12.
    """
    if q.space is not Space.QUTRIT:
        raise ValueError("decode_qubit expects a qutrit state")
    kets = SUBSPACE_KETS[subspace]
    sel = [q.basis_labels.index(k) for k in kets]
    sub_amps = q.amplitudes[sel]
    prob = float(np.sum(np.abs(sub_amps) ** 2))
    if prob < DEGENERATE_WEIGHT:
        raise DegenerateProjectionError(
            f"subspace {subspace} carries weight {prob!r}; nothing to decode"
        )
    space = Space.QUBIT_A if subspace == 1 else Space.QUBIT_B
    return StateVec(sub_amps / math.sqrt(prob), kets, space), prob


def qubit_as_qutrit(q: StateVec) -> StateVec:
    """Embed a bare subspace qubit back into the 3-dimensional space."""
    if q.space.dim != 2:
        raise ValueError("embedding expects a 2-dimensional state")
    amps = np.zeros(3, dtype=complex)
    for lbl, amp in zip(q.basis_labels, q.amplitudes):
        if lbl not in (0, 1, 2):
            raise ValueError(f"ket label {lbl} is outside the qutrit space")
        amps[lbl] = amp
    return StateVec(amps, (0, 1, 2), Space.QUTRIT)


def measure_equatorial(q: StateVec, basis: MeasBasis, rand: float) -> tuple[int, StateVec]:
    """Two-outcome Born-rule measurement in an equatorial basis.

    Outcome b has probability |<e_b|q>|^2 with |e_b> = (|lo> +
    e^{i(theta + b*pi)}|hi>)/sqrt(2); ``rand`` must be uniform on [0, 1).
    Returns the outcome bit and the post-measurement eigenstate.
    """
    if q.space.dim != 2:
        raise ValueError("equatorial measurement expects a 2-dimensional state")
    if not 0.0 <= rand < 1.0:
        raise ValueError("rand must lie in [0, 1)")
    a_lo, a_hi = q.amplitudes
    p0 = abs(a_lo + cmath.exp(-1j * basis.theta) * a_hi) ** 2 / 2.0
    bit = 0 if rand < p0 else 1
    post = equatorial_state(basis, bit, q.basis_labels, q.space)
    return bit, post


def binary_entropy(x: float) -> float:
    """Shannon entropy h(x) in bits, with h(0) = h(1) = 0 by continuity."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy domain is [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)
