import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from hiddenmeasure import hilbert
from hiddenmeasure.core import EpsilonMeasurement, MachineState, UnitVector3, outcome_probabilities
from oracles import pauli_expectations, singlet_table_closed_form

R = 1 / math.sqrt(2)
X = UnitVector3(1.0, 0.0, 0.0)
Y = UnitVector3(0.0, 1.0, 0.0)
Z = UnitVector3(0.0, 0.0, 1.0)

coords = st.floats(-1, 1, allow_nan=False)
vectors = st.tuples(coords, coords, coords).filter(lambda v: sum(c * c for c in v) > 1e-3).map(
    lambda v: UnitVector3.of(*v)
)
angles = st.floats(-20, 20, allow_nan=False)


def close_vec(u, v, tol):
    return max(abs(a - b) for a, b in zip(u, v)) <= tol


class TestBlochMap:
    def test_north_pole(self):
        s = hilbert.bloch_to_spinor(Z)
        assert (s.a0, s.a1) == (1, 0)

    def test_south_pole(self):
        s = hilbert.bloch_to_spinor(-Z)
        assert abs(s.a0) < 1e-16 and s.a1 == pytest.approx(1)

    def test_x_axis(self):
        s = hilbert.bloch_to_spinor(X)
        assert s.a0 == pytest.approx(R, abs=1e-15)
        assert s.a1 == pytest.approx(R, abs=1e-15)

    def test_inverse_poles(self):
        assert hilbert.spinor_to_bloch(hilbert.Spinor(1, 0)) == Z
        assert hilbert.spinor_to_bloch(hilbert.Spinor(0, 1)) == -Z

    def test_inverse_against_expectations(self):
        psi = ((1 + 1j) / 2, (1 - 1j) / 2)
        expected = pauli_expectations(psi)
        assert close_vec(expected, (0.0, -1.0, 0.0), 1e-15)
        assert close_vec(hilbert.spinor_to_bloch(hilbert.Spinor(*psi)), expected, 1e-12)

    @given(vectors)
    def test_round_trip(self, v):
        assert close_vec(hilbert.spinor_to_bloch(hilbert.bloch_to_spinor(v)), v, 1e-10)

    @given(vectors, st.floats(0, 2 * math.pi))
    def test_inverse_phase_invariant(self, v, phase):
        s = hilbert.bloch_to_spinor(v)
        shifted = hilbert.Spinor.from_array(np.exp(1j * phase) * s.vector)
        assert close_vec(hilbert.spinor_to_bloch(shifted), v, 1e-10)

    @given(vectors, st.floats(0, 2 * math.pi))
    def test_canonical_phase(self, v, phase):
        s = hilbert.Spinor.from_array(np.exp(1j * phase) * hilbert.bloch_to_spinor(v).vector).canonical()
        lead = s.a0 if abs(s.a0) > 1e-15 else s.a1
        assert lead.real >= 0 and abs(lead.imag) < 1e-12


class TestBorn:
    def test_same(self):
        assert hilbert.born_transition(X, X) == pytest.approx(1.0, abs=1e-15)

    def test_right_angle(self):
        assert hilbert.born_transition(Z, X) == pytest.approx(0.5, abs=1e-15)

    def test_opposite(self):
        assert hilbert.born_transition(Y, -Y) == pytest.approx(0.0, abs=1e-15)

    @given(vectors, vectors)
    def test_matches_machine(self, u, v):
        p = outcome_probabilities(EpsilonMeasurement(u, 1.0), MachineState(v)).p1
        assert abs(hilbert.born_transition(u, v) - p) <= 1e-10


class TestSinglet:
    def test_norm_and_amplitudes(self):
        s = hilbert.singlet_state()
        assert np.linalg.norm(s.vector) == pytest.approx(1.0, abs=1e-15)
        assert s.amplitude("++") == 0
        assert s.amplitude("+-") == pytest.approx(R)

    def test_schmidt_rank_two(self):
        sv = np.linalg.svd(hilbert.singlet_state().vector.reshape(2, 2), compute_uv=False)
        assert sv == pytest.approx([R, R])
        assert hilbert.singlet_state().schmidt_rank() == 2
        assert not hilbert.singlet_state().is_product()

    @given(vectors, vectors)
    def test_product_states_are_product(self, u, v):
        k = hilbert.product_state(hilbert.bloch_to_spinor(u), hilbert.bloch_to_spinor(v))
        assert k.is_product(1e-9)

    def test_equal_settings(self):
        t = hilbert.joint_spin_probabilities(X, X)
        assert t[0, 0] == pytest.approx(0, abs=1e-15)
        assert t[0, 1] == pytest.approx(0.5, abs=1e-15)

    def test_orthogonal_settings(self):
        assert hilbert.joint_spin_probabilities(X, Z) == pytest.approx(np.full((2, 2), 0.25), abs=1e-15)

    @given(vectors, vectors)
    def test_table_against_closed_form(self, a, b):
        t = hilbert.joint_spin_probabilities(a, b)
        assert np.max(np.abs(t - singlet_table_closed_form(a.as_array(), b.as_array()))) <= 1e-12

    @given(vectors, vectors)
    def test_swap_symmetry(self, a, b):
        assert np.allclose(hilbert.joint_spin_probabilities(a, b), hilbert.joint_spin_probabilities(b, a).T, atol=1e-14)

    @given(vectors, vectors, vectors)
    def test_no_signalling(self, a, b, b2):
        t1 = hilbert.joint_spin_probabilities(a, b)
        t2 = hilbert.joint_spin_probabilities(a, b2)
        assert t1.sum() == pytest.approx(1, abs=1e-12)
        assert t1.sum(axis=1) == pytest.approx([0.5, 0.5], abs=1e-10)
        assert t1.sum(axis=0) == pytest.approx([0.5, 0.5], abs=1e-10)
        assert t1.sum(axis=1) == pytest.approx(t2.sum(axis=1), abs=1e-10)

    @pytest.mark.parametrize("b, expected", [(X, -1.0), (Y, 0.0), (-X, 1.0)])
    def test_correlation_examples(self, b, expected):
        assert hilbert.correlation(X, b) == pytest.approx(expected, abs=1e-12)

    @given(vectors, vectors)
    def test_correlation_is_minus_dot(self, a, b):
        assert abs(hilbert.correlation(a, b) + a.dot(b)) <= 1e-10


class TestRotation:
    def test_zero_angle(self):
        assert np.array_equal(hilbert.spin_rotation(Z, 0.0), np.eye(2))

    def test_two_pi_is_minus_identity(self):
        assert np.allclose(hilbert.spin_rotation(Z, 2 * math.pi), -np.eye(2), atol=1e-15)

    def test_four_pi_is_identity(self):
        assert np.allclose(hilbert.spin_rotation(X, 4 * math.pi), np.eye(2), atol=1e-15)

    @given(vectors, angles)
    def test_matches_matrix_exponential(self, n, chi):
        expected = expm(-0.5j * chi * hilbert.pauli_dot(n))
        assert np.max(np.abs(hilbert.spin_rotation(n, chi) - expected)) <= 1e-10

    @given(vectors, angles)
    def test_unitary(self, n, chi):
        u = hilbert.spin_rotation(n, chi)
        assert np.max(np.abs(u @ u.conj().T - np.eye(2))) <= 1e-10
        assert np.linalg.det(u) == pytest.approx(1, abs=1e-10)

    @given(vectors, angles)
    def test_four_pi_periodic(self, n, chi):
        a = hilbert.spin_rotation(n, chi)
        b = hilbert.spin_rotation(n, chi + 4 * math.pi)
        assert np.max(np.abs(a - b)) <= 1e-10

    @given(vectors, angles, angles)
    def test_homomorphism_about_one_axis(self, n, a, b):
        lhs = hilbert.spin_rotation(n, a) @ hilbert.spin_rotation(n, b)
        assert np.max(np.abs(lhs - hilbert.spin_rotation(n, a + b))) <= 1e-10

    @given(vectors, vectors, st.floats(0, 2 * math.pi))
    def test_rotates_bloch_vector(self, n, v, chi):
        # SU(2) conjugation acts as the SO(3) rotation (Rodrigues formula)
        s = hilbert.apply(hilbert.spin_rotation(n, chi), hilbert.bloch_to_spinor(v))
        nn, vv = n.as_array(), v.as_array()
        rod = vv * math.cos(chi) + np.cross(nn, vv) * math.sin(chi) + nn * nn.dot(vv) * (1 - math.cos(chi))
        assert close_vec(hilbert.spinor_to_bloch(s), rod, 1e-9)
