"""Sphere geometry and hidden-measurement mechanics of the quantum machine.

A particle sits at a point ``v`` of the unit sphere.  The experiment ``e_u``
stretches an elastic between ``u`` and ``-u``; the particle drops orthogonally
onto it, the elastic breaks at an unknown point and the particle is dragged to
whichever end it stays attached to.

Elastic coordinate ``s`` runs over ``[-1, 1]`` with ``+1`` at ``u``.  The
particle lands at ``s = cos(theta)``.  With fluctuation ``epsilon`` the break
point is uniform on ``[-epsilon, epsilon]``; ``epsilon = 1`` gives the spin-1/2
statistics, ``epsilon = 0`` a deterministic classical apparatus.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12
PROB_TOL = 1e-12
_MIN_NORM = 1e-12


@dataclass(frozen=True)
class UnitVector3:
    """Point on the unit sphere.

    Direct construction validates the norm; use :meth:`of` (or
    :func:`unit_vector`) to normalize arbitrary input.
    """

    x: float
    y: float
    z: float

    def __post_init__(self):
        n2 = self.x * self.x + self.y * self.y + self.z * self.z
        if not math.isfinite(n2) or abs(n2 - 1.0) > UNIT_TOL:
            raise ValueError(f"not a unit vector: ({self.x}, {self.y}, {self.z})")

    @classmethod
    def of(cls, x: float, y: float, z: float) -> UnitVector3:
        n = math.sqrt(x * x + y * y + z * z)
        if not math.isfinite(n) or n < _MIN_NORM:
            raise ValueError(f"cannot normalize ({x}, {y}, {z})")
        return cls(x / n, y / n, z / n)

    @classmethod
    def from_array(cls, a) -> UnitVector3:
        a = np.asarray(a, dtype=float).reshape(3)
        return cls.of(float(a[0]), float(a[1]), float(a[2]))

    @classmethod
    def from_angles(cls, polar: float, azimuth: float = 0.0) -> UnitVector3:
        st = math.sin(polar)
        return cls.of(st * math.cos(azimuth), st * math.sin(azimuth), math.cos(polar))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: UnitVector3) -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def __neg__(self) -> UnitVector3:
        return UnitVector3(-self.x, -self.y, -self.z)

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z


def unit_vector(x: float, y: float, z: float) -> UnitVector3:
    return UnitVector3.of(x, y, z)


@dataclass(frozen=True)
class MachineState:
    direction: UnitVector3


@dataclass(frozen=True)
class EpsilonMeasurement:
    direction: UnitVector3
    epsilon: float = 1.0

    def __post_init__(self):
        if not isinstance(self.direction, UnitVector3):
            raise TypeError("direction must be a UnitVector3")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")


class Outcome(enum.Enum):
    O1 = 1  # particle ends at u
    O2 = 2  # particle ends at -u


@dataclass(frozen=True)
class OutcomeDistribution:
    p1: float
    p2: float

    def __post_init__(self):
        for p in (self.p1, self.p2):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability out of range: {p}")
        if abs(self.p1 + self.p2 - 1.0) > PROB_TOL:
            raise ValueError("probabilities do not sum to one")

    def __getitem__(self, outcome: Outcome) -> float:
        return self.p1 if outcome is Outcome.O1 else self.p2


@dataclass(frozen=True)
class BreakPoint:
    s: float

    def __post_init__(self):
        if not -1.0 <= self.s <= 1.0:
            raise ValueError(f"break point outside the elastic: {self.s}")


def cos_angle(u: UnitVector3, v: UnitVector3) -> float:
    """Clamped dot product, i.e. cos of :func:`angle_between`.

    Used in place of ``cos(arccos(.))`` so that orthogonal and antipodal
    inputs keep their exact values (0, -1) and ties stay ties.
    """
    return min(1.0, max(-1.0, u.dot(v)))


def angle_between(u: UnitVector3, v: UnitVector3) -> float:
    return math.acos(cos_angle(u, v))


def probability_o1(epsilon: float, c: float) -> float:
    """P(O1) for fluctuation ``epsilon`` and projection ``c = cos(theta)``."""
    if epsilon == 0.0:
        return 1.0 if c >= 0.0 else 0.0
    return min(1.0, max(0.0, (epsilon + c) / (2.0 * epsilon)))


def outcome_probabilities(m: EpsilonMeasurement, p: MachineState) -> OutcomeDistribution:
    p1 = probability_o1(m.epsilon, cos_angle(m.direction, p.direction))
    return OutcomeDistribution(p1, 1.0 - p1)


def break_coordinate(epsilon: float, unit_draw: float) -> float:
    # Kernels in _kernels.py use this exact expression; keep them in sync.
    return -epsilon + 2.0 * epsilon * unit_draw


def sample_break_point(m: EpsilonMeasurement, unit_draw: float) -> BreakPoint:
    return BreakPoint(break_coordinate(m.epsilon, unit_draw))


def resolve_outcome(m: EpsilonMeasurement, p: MachineState, b: BreakPoint) -> Outcome:
    """Outcome for a given break point.

    Breaking below the particle's projection leaves it on the piece ending at
    ``u``.  A break exactly at the projection counts as O1.
    """
    if abs(b.s) > m.epsilon:
        raise ValueError(f"break point {b.s} outside [-{m.epsilon}, {m.epsilon}]")
    c = cos_angle(m.direction, p.direction)
    return Outcome.O1 if b.s <= c else Outcome.O2


def collapse(m: EpsilonMeasurement, o: Outcome) -> MachineState:
    return MachineState(m.direction if o is Outcome.O1 else -m.direction)


def measure(m: EpsilonMeasurement, p: MachineState, unit_draw: float) -> tuple[Outcome, MachineState]:
    b = sample_break_point(m, unit_draw)
    o = resolve_outcome(m, p, b)
    return o, collapse(m, o)
