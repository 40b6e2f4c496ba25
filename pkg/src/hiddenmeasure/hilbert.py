"""Two- and four-dimensional complex Hilbert space oracle for spin-1/2.

Independent of :mod:`hiddenmeasure.core`: everything here is computed from
state vectors and projectors, never from the elastic model.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import UnitVector3

NORM_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class Spinor:
    a0: complex
    a1: complex

    def __post_init__(self):
        n2 = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(n2 - 1.0) > NORM_TOL:
            raise ValueError(f"spinor not normalized (|psi|^2 = {n2})")

    @classmethod
    def from_array(cls, v) -> Spinor:
        v = np.asarray(v, dtype=complex).reshape(2)
        v = v / np.linalg.norm(v)
        return cls(complex(v[0]), complex(v[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)

    def canonical(self) -> Spinor:
        """Same ray, with the first nonzero amplitude real and non-negative."""
        lead = self.a0 if abs(self.a0) > 1e-15 else self.a1
        phase = cmath.exp(-1j * cmath.phase(lead))
        return Spinor(self.a0 * phase, self.a1 * phase)


_KET4_LABELS = ("++", "+-", "-+", "--")


@dataclass(frozen=True)
class Ket4:
    """Two-spin state; amplitudes ordered (++, +-, -+, --) in the z basis."""

    amplitudes: tuple[complex, complex, complex, complex]

    def __post_init__(self):
        if len(self.amplitudes) != 4:
            raise ValueError("Ket4 needs four amplitudes")
        n2 = sum(abs(a) ** 2 for a in self.amplitudes)
        if abs(n2 - 1.0) > NORM_TOL:
            raise ValueError(f"Ket4 not normalized (|psi|^2 = {n2})")

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.amplitudes, dtype=complex)

    def amplitude(self, label: str) -> complex:
        return self.amplitudes[_KET4_LABELS.index(label)]

    def schmidt_coefficients(self) -> np.ndarray:
        return np.linalg.svd(self.vector.reshape(2, 2), compute_uv=False)

    def schmidt_rank(self, tol: float = 1e-12) -> int:
        return int(np.sum(self.schmidt_coefficients() > tol))

    def is_product(self, tol: float = 1e-12) -> bool:
        return self.schmidt_rank(tol) == 1


def product_state(s1: Spinor, s2: Spinor) -> Ket4:
    return Ket4(tuple(complex(a) for a in np.kron(s1.vector, s2.vector)))


def bloch_to_spinor(v: UnitVector3) -> Spinor:
    rho = math.hypot(v.x, v.y)
    polar = math.atan2(rho, v.z)  # acos(z) loses precision near the poles
    azimuth = math.atan2(v.y, v.x) if rho > 0.0 else 0.0
    return Spinor(complex(math.cos(polar / 2)), cmath.exp(1j * azimuth) * math.sin(polar / 2))


def spinor_to_bloch(s: Spinor) -> UnitVector3:
    cross = s.a0.conjugate() * s.a1
    return UnitVector3.of(
        2.0 * cross.real,
        2.0 * cross.imag,
        abs(s.a0) ** 2 - abs(s.a1) ** 2,
    )


def pauli_dot(n: UnitVector3) -> np.ndarray:
    return n.x * SIGMA_X + n.y * SIGMA_Y + n.z * SIGMA_Z


def projector(n: UnitVector3, sign: int = +1) -> np.ndarray:
    """Projector onto spin ``sign`` (+1/-1) along ``n``."""
    return 0.5 * (IDENTITY2 + sign * pauli_dot(n))


def born_transition(u: UnitVector3, v: UnitVector3) -> float:
    """|<psi_u|psi_v>|^2 for the spinors pointing along u and v."""
    amp = np.vdot(bloch_to_spinor(u).vector, bloch_to_spinor(v).vector)
    return float(abs(amp) ** 2)


def singlet_state() -> Ket4:
    r = 1.0 / math.sqrt(2.0)
    return Ket4((0j, complex(r), complex(-r), 0j))


def joint_spin_probabilities(a: UnitVector3, b: UnitVector3, state: Ket4 | None = None) -> np.ndarray:
    """2x2 table ``P[i, j]``; index 0 is spin up along the setting, 1 is down."""
    psi = (state or singlet_state()).vector
    table = np.empty((2, 2))
    for i, sa in enumerate((+1, -1)):
        for j, sb in enumerate((+1, -1)):
            op = np.kron(projector(a, sa), projector(b, sb))
            table[i, j] = np.vdot(psi, op @ psi).real
    return table


def correlation(a: UnitVector3, b: UnitVector3, state: Ket4 | None = None) -> float:
    t = joint_spin_probabilities(a, b, state)
    return float(t[0, 0] + t[1, 1] - t[0, 1] - t[1, 0])


def spin_rotation(axis: UnitVector3, angle: float) -> np.ndarray:
    """SU(2) element exp(-i angle/2 axis.sigma), written out entrywise."""
    c = math.cos(angle / 2)
    s = math.sin(angle / 2)
    nx, ny, nz = axis.x, axis.y, axis.z
    return np.array(
        [
            [complex(c, -s * nz), complex(-s * ny, -s * nx)],
            [complex(s * ny, -s * nx), complex(c, s * nz)],
        ]
    )


def apply(op: np.ndarray, s: Spinor) -> Spinor:
    return Spinor.from_array(op @ s.vector)
