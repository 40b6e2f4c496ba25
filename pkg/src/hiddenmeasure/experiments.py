"""Interferometer experiments and the EPR/CHSH demonstration.

Beam splitters act on the two path modes as ``[[1, i], [i, 1]] / sqrt(2)``
(phase ``i`` on reflection).  Both mirrors add the same phase, which drops out.
Detector D1 sits on the recombining splitter's output port where the two arms
add in phase at zero path difference.  The neutron crystal's three lips are
treated as an equivalent two-path interferometer; beams lost at the middle lip
are renormalized away before detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hilbert
from .core import UnitVector3
from .probability_structure import (
    BellScenario,
    ConditionalScenario,
    Experiment,
    Facet,
    Joint,
    chsh_score,
    kolmogorov_embeddable,
    max_chsh,
)

BEAM_SPLITTER = np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)
D1_PORT, D2_PORT = 1, 0

ROTATION_AXIS = UnitVector3(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class InterferometerConfig:
    with_second_splitter: bool = True
    extra_phase: float = 0.0
    spin_rotation_angle: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.extra_phase) and math.isfinite(self.spin_rotation_angle)):
            raise ValueError("angles must be finite")


@dataclass(frozen=True)
class DetectorStats:
    p_d1: float
    p_d2: float

    def __post_init__(self):
        if abs(self.p_d1 + self.p_d2 - 1.0) > 1e-12:
            raise ValueError("detector probabilities do not sum to 1")


def _arms(extra_phase: float) -> np.ndarray:
    """Amplitudes on (north, south) after splitter A, mirrors and phase dial."""
    after_a = BEAM_SPLITTER @ np.array([1.0, 0.0])
    return after_a * np.array([1.0, np.exp(1j * extra_phase)])


def wheeler_mz(cfg: InterferometerConfig) -> DetectorStats:
    if cfg.spin_rotation_angle != 0.0:
        raise ValueError("wheeler_mz has no spin rotation; use rauch_interference")
    arms = _arms(cfg.extra_phase)
    if not cfg.with_second_splitter:
        # north beam runs to D1, south beam to D2
        p = np.abs(arms) ** 2
        return DetectorStats(float(p[0]), float(p[1]))
    out = np.abs(BEAM_SPLITTER @ arms) ** 2
    return DetectorStats(float(out[D1_PORT]), float(out[D2_PORT]))


def rauch_interference(chi: float, spin: hilbert.Spinor | None = None,
                       extra_phase: float = 0.0) -> DetectorStats:
    """Recombined two-path interferometer with the spin rotated by ``chi`` on the south arm.

    Detection probabilities are traced over spin, so the curve does not depend
    on the incoming spin state.
    """
    psi = (spin or hilbert.Spinor(1 + 0j, 0j)).vector
    arms = _arms(extra_phase)
    rot = hilbert.spin_rotation(ROTATION_AXIS, chi)
    # rows: path mode, columns: spin component
    field = np.stack([arms[0] * psi, arms[1] * (rot @ psi)])
    out = BEAM_SPLITTER @ field
    p = np.sum(np.abs(out) ** 2, axis=1)
    p /= p.sum()
    return DetectorStats(float(p[D1_PORT]), float(p[D2_PORT]))


@dataclass(frozen=True)
class EPRReport:
    correlations: tuple[float, float, float, float]
    s: float
    s_max: float
    embeddable: bool
    violated_facet: Facet | None


def _require_unit(v) -> UnitVector3:
    if isinstance(v, UnitVector3):
        return v
    a = np.asarray(v, dtype=float).reshape(3)
    if abs(np.linalg.norm(a) - 1.0) > 1e-9:
        raise ValueError(f"setting {tuple(a)} is not a unit vector")
    return UnitVector3.from_array(a)


def epr_chsh_demo(a, ap, b, bp) -> EPRReport:
    a, ap, b, bp = (_require_unit(v) for v in (a, ap, b, bp))
    bell = BellScenario.from_settings(a, ap, b, bp)
    lp = kolmogorov_embeddable(singlet_chsh_scenario(a, ap, b, bp))
    return EPRReport(bell.correlations, chsh_score(bell), max_chsh(bell), lp.feasible, lp.violated_facet)


def singlet_chsh_scenario(a, ap, b, bp) -> ConditionalScenario:
    """Four joint tables of the singlet at settings (a, a') x (b, b')."""
    settings = dict(zip(("a", "a'", "b", "b'"), (_require_unit(v) for v in (a, ap, b, bp))))
    joints = []
    for x, y in (("a", "b"), ("a", "b'"), ("a'", "b"), ("a'", "b'")):
        t = hilbert.joint_spin_probabilities(settings[x], settings[y])
        joints.append(Joint(x, y, tuple(float(v) for v in t.ravel())))
    return ConditionalScenario(tuple(Experiment(n) for n in settings), tuple(joints))
