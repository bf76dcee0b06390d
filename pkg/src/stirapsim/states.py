"""State-vector algebra for the four-level system and the exact SU(2) rotation.

The qubit lives on levels |1>, |2>; |3> is the auxiliary ground state and |4>
the excited state. ``rotate_analytic``/``predicted_final`` implement the exact
rotation the pulse parameters are supposed to realize and serve as the oracle
the simulated dynamics is checked against.

All types are immutable values; every function is pure.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

#: Qubit amplitudes must be normalized to this tolerance after construction.
QUBIT_NORM_TOL = 1e-12
#: Rotation axes must be unit vectors to this tolerance; worse is rejected.
AXIS_UNIT_TOL = 1e-9
#: Below this qubit-subspace population, projecting out a qubit is degenerate.
PROJECTION_FLOOR = 1e-12

# Pauli operators on span{|1>, |2>}, with |1> as spin-up.
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class QubitState:
    """Normalized amplitude pair (alpha, beta) on the qubit levels |1>, |2>."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        norm_sq = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm_sq - 1.0) > QUBIT_NORM_TOL:
            raise ValueError(
                f"qubit amplitudes not normalized: |alpha|^2+|beta|^2 = {norm_sq!r}"
            )

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "QubitState":
        """Build a state from arbitrary non-zero amplitudes, rescaling to unit norm."""
        norm = math.hypot(abs(alpha), abs(beta))
        if norm < PROJECTION_FLOOR:
            raise ValueError("cannot normalize a zero qubit amplitude pair")
        return cls(complex(alpha) / norm, complex(beta) / norm)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def overlap(self, other: "QubitState") -> complex:
        """Phase-sensitive inner product <self|other>."""
        return (
            self.alpha.conjugate() * other.alpha
            + self.beta.conjugate() * other.beta
        )


@dataclass(frozen=True)
class StateVector:
    """Four complex amplitudes ordered as <1|psi>, <2|psi>, <3|psi>, <4|psi>.

    Normalization is *monitored* during propagation (norm drift is the error
    signal), never silently restored, so construction does not enforce it.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.amplitudes, dtype=complex)
        if arr.shape != (4,):
            raise ValueError(f"state vector must have 4 amplitudes, got shape {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def populations(self) -> np.ndarray:
        """Level populations (P1, P2, P3, P4)."""
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class RotationSpec:
    """Laser-defined rotation: axis from (chi, eta), angle delta, all in radians.

    The axis is n = (sin 2chi cos eta, sin 2chi sin eta, cos 2chi); the bright
    state points along +n on the Bloch sphere, the dark state along -n.
    """

    chi: float
    eta: float
    delta: float

    def axis(self) -> np.ndarray:
        n = np.array(
            [
                math.sin(2 * self.chi) * math.cos(self.eta),
                math.sin(2 * self.chi) * math.sin(self.eta),
                math.cos(2 * self.chi),
            ]
        )
        # Unit by construction; guard against pathological inputs (nan/inf).
        if abs(np.linalg.norm(n) - 1.0) > QUBIT_NORM_TOL:
            raise ValueError(f"rotation axis is not unit for {self!r}")
        return n


def rotation_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    """SU(2) rotation matrix cos(angle/2) I - i sin(angle/2) (axis . sigma).

    Raises ValueError if ``axis`` deviates from unit norm by more than
    ``AXIS_UNIT_TOL``.
    """
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,):
        raise ValueError(f"axis must be a 3-vector, got shape {axis.shape}")
    if abs(np.linalg.norm(axis) - 1.0) > AXIS_UNIT_TOL:
        raise ValueError(f"axis is not unit-norm: |n| = {np.linalg.norm(axis)!r}")
    n_dot_sigma = axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z
    return math.cos(angle / 2) * np.eye(2, dtype=complex) - 1j * math.sin(
        angle / 2
    ) * n_dot_sigma


def rotate_analytic(q: QubitState, axis: np.ndarray, angle: float) -> QubitState:
    """Apply the exact rotation about ``axis`` through ``angle`` to ``q``.

    Returns the actual rotated amplitudes (global phase included, not
    quotiented out). The realized 2x2 matrix has unit determinant.
    """
    out = rotation_matrix(axis, angle) @ q.as_array()
    return QubitState(complex(out[0]), complex(out[1]))


def predicted_final(q: QubitState, spec: RotationSpec) -> QubitState:
    """Exact protocol outcome: e^{-i delta/2} R_n(delta) |q>, phase included.

    For delta = 0 this returns ``q`` unchanged, exactly.
    """
    if spec.delta == 0.0:
        return q
    phase = cmath.exp(-1j * spec.delta / 2)
    rotated = rotate_analytic(q, spec.axis(), spec.delta)
    return QubitState(phase * rotated.alpha, phase * rotated.beta)


def embed(q: QubitState) -> StateVector:
    """Place the qubit on levels |1>, |2> of the four-level system."""
    return StateVector(np.array([q.alpha, q.beta, 0.0, 0.0], dtype=complex))


def project_qubit(s: StateVector) -> tuple[QubitState, float]:
    """Renormalized qubit from components 1, 2 plus the leakage left behind.

    leakage = P3 + P4. Raises ValueError when both qubit components are below
    ``PROJECTION_FLOOR`` in magnitude (degenerate projection).
    """
    a1, a2, a3, a4 = (complex(x) for x in s.amplitudes)
    if abs(a1) < PROJECTION_FLOOR and abs(a2) < PROJECTION_FLOOR:
        raise ValueError("degenerate projection: no amplitude on the qubit subspace")
    leakage = abs(a3) ** 2 + abs(a4) ** 2
    return QubitState.normalized(a1, a2), leakage
