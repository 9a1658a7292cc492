import numpy as np
import pytest

from contactsim import (
    ContactStateH,
    ContactStateL,
    DimensionMismatch,
    HamiltonianSpec,
    NonFiniteValue,
    SingularHessian,
    SystemSpec,
    finite_difference_partials,
    hamiltonian_from_lagrangian,
    hamiltonian_rhs,
    herglotz_rhs,
    lagrangian_energy,
    legendre_forward,
    legendre_inverse,
    natural_lagrangian_system,
)
from contactsim.core import evaluate_partials


def billiard_system(gamma=0.1, mass=1.0):
    return natural_lagrangian_system(n=2, mass=mass * np.eye(2), gamma=gamma)


def quartic_system(eps=0.1, n=2, analytic=True):
    """Hyper-regular non-quadratic Lagrangian L = |v|^2/2 + eps |v|^4 / 4."""
    def L(q, v, z):
        s = float(v @ v)
        return 0.5 * s + 0.25 * eps * s * s

    if not analytic:
        return SystemSpec(n=n, lagrangian=L)
    return SystemSpec(
        n=n,
        lagrangian=L,
        dL_dq=lambda q, v, z: np.zeros(n),
        dL_dv=lambda q, v, z: v * (1.0 + eps * float(v @ v)),
        dL_dz=lambda q, v, z: 0.0,
        d2L_dvdv=lambda q, v, z: (1.0 + eps * float(v @ v)) * np.eye(n)
        + 2.0 * eps * np.outer(v, v),
        d2L_dqdv=lambda q, v, z: np.zeros((n, n)),
        d2L_dzdv=lambda q, v, z: np.zeros(n),
    )


class TestStates:
    def test_rejects_non_finite(self):
        with pytest.raises(NonFiniteValue):
            ContactStateL(q=[np.nan, 0.0], qdot=[1.0, 0.0], z=0.0)
        with pytest.raises(NonFiniteValue):
            ContactStateH(q=[0.0], p=[1.0], z=np.inf)

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ContactStateL(q=[0.0, 0.0], qdot=[1.0], z=0.0)

    def test_arrays_are_immutable(self):
        s = ContactStateL(q=[0.0, 0.0], qdot=[1.0, 0.0], z=0.0)
        with pytest.raises(ValueError):
            s.q[0] = 3.0

    def test_vector_round_trip(self):
        s = ContactStateL(q=[0.5, -0.25], qdot=[1.0, 2.0], z=0.75, t=1.5)
        y = s.as_vector()
        back = ContactStateL.from_vector(y, 2, t=1.5)
        assert np.array_equal(back.q, s.q)
        assert np.array_equal(back.qdot, s.qdot)
        assert back.z == s.z and back.t == s.t


class TestEnergy:
    def test_billiard_value(self):
        # E = 1/2 (1 + 1) + 0.1 * 2 = 1.2
        sys = billiard_system(gamma=0.1)
        s = ContactStateL(q=[0.0, 0.0], qdot=[1.0, 1.0], z=2.0)
        assert lagrangian_energy(sys, s) == pytest.approx(1.2, abs=1e-14)

    def test_rest_state_is_potential_plus_action_term(self):
        gamma = 0.3
        sys = natural_lagrangian_system(
            n=2, mass=np.eye(2), gamma=gamma,
            potential=lambda q: float(q[0] ** 2 + 2.0 * q[1] ** 2),
            grad_potential=lambda q: np.array([2.0 * q[0], 4.0 * q[1]]))
        s = ContactStateL(q=[1.0, -1.0], qdot=[0.0, 0.0], z=0.5)
        expected = (1.0 + 2.0) + gamma * 0.5
        assert lagrangian_energy(sys, s) == pytest.approx(expected, abs=1e-13)

    def test_reference_initial_energy(self):
        sys = billiard_system(gamma=1e-4)
        s = ContactStateL(q=[0.5, 0.0], qdot=[1.0, 1.0], z=0.0)
        assert lagrangian_energy(sys, s) == pytest.approx(1.0, abs=1e-14)

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatch):
            lagrangian_energy(billiard_system(), ContactStateL(q=[0.0], qdot=[1.0], z=0.0))


class TestHerglotzRhs:
    def test_billiard_drag(self):
        sys = billiard_system(gamma=0.1)
        s = ContactStateL(q=[0.0, 0.0], qdot=[1.0, 0.0], z=0.0)
        qdot, qddot, zdot = herglotz_rhs(sys, s)
        assert np.allclose(qddot, [-0.1, 0.0], atol=1e-14)
        assert zdot == pytest.approx(0.5, abs=1e-14)

    def test_conservative_limit_has_no_force(self):
        sys = billiard_system(gamma=0.0)
        s = ContactStateL(q=[0.3, -0.2], qdot=[1.0, 2.0], z=5.0)
        _, qddot, _ = herglotz_rhs(sys, s)
        assert np.allclose(qddot, 0.0, atol=1e-14)

    def test_polar_chart_centripetal_terms(self):
        # L = (rdot^2 + r^2 thetadot^2)/2 with configuration-dependent mass;
        # partials come from the finite-difference fallback here.
        sys = natural_lagrangian_system(
            n=2, mass=lambda q: np.diag([1.0, q[0] ** 2]), gamma=0.0)
        s = ContactStateL(q=[0.5, 0.0], qdot=[0.0, 1.0], z=0.0)
        _, qddot, zdot = herglotz_rhs(sys, s)
        assert qddot[0] == pytest.approx(0.5, abs=1e-6)    # rddot = r thetadot^2
        assert qddot[1] == pytest.approx(0.0, abs=1e-6)    # thetaddot = -2 rdot thetadot / r
        assert zdot == pytest.approx(0.125, abs=1e-12)

    def test_polar_chart_with_drag(self):
        gamma = 0.2
        sys = natural_lagrangian_system(
            n=2, mass=lambda q: np.diag([1.0, q[0] ** 2]), gamma=gamma)
        s = ContactStateL(q=[0.8, 0.3], qdot=[0.4, 1.5], z=0.7)
        _, qddot, _ = herglotz_rhs(sys, s)
        r, rdot, thdot = 0.8, 0.4, 1.5
        assert qddot[0] == pytest.approx(r * thdot ** 2 - gamma * rdot, abs=1e-5)
        assert qddot[1] == pytest.approx(-2 * rdot * thdot / r - gamma * thdot, abs=1e-5)

    def test_sode_property_returns_stored_velocity(self):
        sys = billiard_system()
        s = ContactStateL(q=[0.1, 0.2], qdot=[0.3, -0.4], z=1.0)
        qdot, _, _ = herglotz_rhs(sys, s)
        assert np.array_equal(qdot, s.qdot)

    def test_singular_hessian_raises(self):
        sys = SystemSpec(n=2, lagrangian=lambda q, v, z: 0.5 * v[0] ** 2)
        s = ContactStateL(q=[0.0, 0.0], qdot=[1.0, 1.0], z=0.0)
        with pytest.raises(SingularHessian):
            herglotz_rhs(sys, s)


class TestHamiltonianRhs:
    def test_billiard_momentum_drag(self):
        hsys = hamiltonian_from_lagrangian(billiard_system(gamma=0.1))
        s = ContactStateH(q=[0.0, 0.0], p=[1.0, 0.0], z=0.0)
        qdot, pdot, zdot = hamiltonian_rhs(hsys, s)
        assert np.allclose(qdot, [1.0, 0.0], atol=1e-14)
        assert np.allclose(pdot, [-0.1, 0.0], atol=1e-14)
        assert zdot == pytest.approx(0.5, abs=1e-14)   # p . dH/dp - H = 1 - 0.5

    def test_conservative_limit(self):
        hsys = hamiltonian_from_lagrangian(billiard_system(gamma=0.0))
        s = ContactStateH(q=[0.2, 0.1], p=[0.6, -0.8], z=3.0)
        _, pdot, zdot = hamiltonian_rhs(hsys, s)
        assert np.allclose(pdot, 0.0, atol=1e-14)
        assert zdot == pytest.approx(0.5, abs=1e-14)   # zdot = |p|^2/2

    def test_rest_state_decay(self):
        gamma = 0.25
        hsys = hamiltonian_from_lagrangian(billiard_system(gamma=gamma))
        s = ContactStateH(q=[0.0, 0.0], p=[0.0, 0.0], z=2.0)
        qdot, pdot, zdot = hamiltonian_rhs(hsys, s)
        assert np.allclose(qdot, 0.0) and np.allclose(pdot, 0.0)
        assert zdot == pytest.approx(-gamma * 2.0, abs=1e-14)


class TestLegendre:
    def test_unit_mass_is_identity_on_velocities(self):
        sys = billiard_system(gamma=0.1)
        s = ContactStateL(q=[0.5, 0.0], qdot=[1.0, 1.0], z=0.0)
        sh = legendre_forward(sys, s)
        assert np.allclose(sh.p, [1.0, 1.0], atol=1e-15)
        assert np.array_equal(sh.q, s.q) and sh.z == s.z and sh.t == s.t

    def test_diagonal_mass(self):
        sys = natural_lagrangian_system(n=2, mass=np.diag([2.0, 3.0]), gamma=0.0)
        s = ContactStateL(q=[0.0, 0.0], qdot=[1.0, 1.0], z=0.0)
        assert np.allclose(legendre_forward(sys, s).p, [2.0, 3.0], atol=1e-15)
        sh = ContactStateH(q=[0.0, 0.0], p=[2.0, 3.0], z=0.0)
        assert np.allclose(legendre_inverse(sys, sh).qdot, [1.0, 1.0], atol=1e-15)

    def test_zero_velocity_maps_to_zero_momentum(self):
        sys = billiard_system()
        s = ContactStateL(q=[0.1, 0.2], qdot=[0.0, 0.0], z=1.0)
        assert np.allclose(legendre_forward(sys, s).p, 0.0, atol=1e-15)

    def test_unit_mass_inverse(self):
        sys = billiard_system()
        sh = ContactStateH(q=[0.0, 0.0], p=[1.0, -1.0], z=0.0)
        assert np.allclose(legendre_inverse(sys, sh).qdot, [1.0, -1.0], atol=1e-15)

    def test_round_trip_newton_path(self):
        # no natural-form data: exercises the Newton inversion
        sys = quartic_system(eps=0.1, n=3)
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(100):
            v = rng.uniform(-2.0, 2.0, size=3)
            s = ContactStateL(q=np.zeros(3), qdot=v, z=0.0)
            sh = legendre_forward(sys, s)
            back = legendre_inverse(sys, sh)
            again = legendre_forward(sys, back)
            worst = max(worst, float(np.max(np.abs(back.qdot - v))))
            worst = max(worst, float(np.max(np.abs(again.p - sh.p))))
        assert worst < 1e-12

    def test_round_trip_natural_path(self):
        sys = natural_lagrangian_system(n=2, mass=np.array([[2.0, 0.5], [0.5, 3.0]]),
                                        gamma=0.2)
        rng = np.random.default_rng(7)
        for _ in range(100):
            v = rng.uniform(-2.0, 2.0, size=2)
            s = ContactStateL(q=rng.uniform(-1, 1, 2), qdot=v, z=rng.uniform(-1, 1))
            back = legendre_inverse(sys, legendre_forward(sys, s))
            assert np.max(np.abs(back.qdot - v)) < 1e-12


class TestFiniteDifferences:
    def test_velocity_partial(self):
        sys = billiard_system(gamma=0.1)
        s = ContactStateL(q=[0.0, 0.0], qdot=[1.0, 0.0], z=0.0)
        fd = finite_difference_partials(sys, s)
        assert fd.dL_dv[0] == pytest.approx(1.0, abs=1e-8)

    def test_action_partial_is_minus_gamma(self):
        sys = billiard_system(gamma=0.1)
        s = ContactStateL(q=[0.0, 0.0], qdot=[1.0, 0.0], z=2.0)
        fd = finite_difference_partials(sys, s)
        assert fd.dL_dz == pytest.approx(-0.1, abs=1e-10)

    def test_hessian_of_quadratic_kinetic_energy(self):
        sys = billiard_system(gamma=0.0)
        s = ContactStateL(q=[0.0, 0.0], qdot=[0.7, -0.3], z=0.0)
        fd = finite_difference_partials(sys, s)
        assert np.max(np.abs(fd.W - np.eye(2))) < 1e-6

    def test_hessian_is_symmetric(self):
        sys = quartic_system(eps=0.3)
        s = ContactStateL(q=[0.0, 0.0], qdot=[1.1, -0.4], z=0.0)
        fd = finite_difference_partials(sys, s)
        assert np.array_equal(fd.W, fd.W.T)

    def test_agreement_with_analytic_partials(self):
        rng = np.random.default_rng(3)
        systems = [
            billiard_system(gamma=1e-4),
            billiard_system(gamma=0.5, mass=2.0),
            natural_lagrangian_system(
                n=2, mass=np.eye(2), gamma=0.3,
                potential=lambda q: float(np.sin(q[0]) + q[1] ** 2),
                grad_potential=lambda q: np.array([np.cos(q[0]), 2.0 * q[1]])),
        ]
        for sys in systems:
            for _ in range(10):
                s = ContactStateL(q=rng.uniform(-1, 1, 2),
                                  qdot=rng.uniform(-2, 2, 2),
                                  z=rng.uniform(-1, 1))
                an = evaluate_partials(sys, s)
                fd = finite_difference_partials(sys, s)
                for a, b in ((an.dL_dq, fd.dL_dq), (an.dL_dv, fd.dL_dv),
                             (an.W, fd.W), (an.d2L_dqdv, fd.d2L_dqdv),
                             (an.d2L_dzdv, fd.d2L_dzdv)):
                    scale = max(1.0, float(np.max(np.abs(a))))
                    assert np.max(np.abs(np.asarray(a) - np.asarray(b))) / scale < 1e-6
                assert abs(an.dL_dz - fd.dL_dz) < 1e-6


def _directional_derivative(f, y, d, eps=None):
    eps = eps or (np.finfo(float).eps ** (1 / 3)) / max(1.0, float(np.max(np.abs(d))))
    return (f(y + eps * d) - f(y - eps * d)) / (2 * eps)


class TestStructuralIdentities:
    def test_energy_dissipation_identity(self):
        # dE/dt along the flow equals (dL/dz) E
        rng = np.random.default_rng(11)
        for gamma in (0.0, 1e-4, 0.5):
            sys = billiard_system(gamma=gamma)
            for _ in range(20):
                s = ContactStateL(q=rng.uniform(-0.5, 0.5, 2),
                                  qdot=rng.uniform(-2, 2, 2),
                                  z=rng.uniform(-1, 1))
                qdot, qddot, zdot = herglotz_rhs(sys, s)
                d = np.concatenate([qdot, qddot, [zdot]])

                def energy_of(y):
                    return lagrangian_energy(
                        sys, ContactStateL(q=y[:2], qdot=y[2:4], z=y[4]))

                lhs = _directional_derivative(energy_of, s.as_vector(), d)
                E = lagrangian_energy(sys, s)
                dLdz = evaluate_partials(sys, s).dL_dz
                assert abs(lhs - dLdz * E) / max(1.0, abs(E)) < 1e-6

    def test_hamiltonian_identity(self):
        rng = np.random.default_rng(12)
        hsys = hamiltonian_from_lagrangian(billiard_system(gamma=0.3))
        for _ in range(20):
            s = ContactStateH(q=rng.uniform(-0.5, 0.5, 2),
                              p=rng.uniform(-2, 2, 2),
                              z=rng.uniform(-1, 1))
            qdot, pdot, zdot = hamiltonian_rhs(hsys, s)
            d = np.concatenate([qdot, pdot, [zdot]])

            def H_of(y):
                return hsys.value(y[:2], y[2:4], y[4])

            lhs = _directional_derivative(H_of, s.as_vector(), d)
            H = hsys.value(s.q, s.p, s.z)
            Hz = hsys.grad_z(s.q, s.p, s.z)
            assert abs(lhs + Hz * H) / max(1.0, abs(H)) < 1e-6

    def test_legendre_duality_of_vector_fields(self):
        # pushing the Lagrangian field through T Leg gives the Hamiltonian field
        rng = np.random.default_rng(13)
        sys = billiard_system(gamma=0.1)
        hsys = hamiltonian_from_lagrangian(sys)
        for _ in range(20):
            s = ContactStateL(q=rng.uniform(-0.5, 0.5, 2),
                              qdot=rng.uniform(-2, 2, 2),
                              z=rng.uniform(-1, 1))
            qdot, qddot, zdot = herglotz_rhs(sys, s)
            d = evaluate_partials(sys, s)
            pdot_pushed = d.d2L_dqdv @ qdot + d.W @ qddot + d.d2L_dzdv * zdot
            sh = legendre_forward(sys, s)
            qdot_h, pdot_h, zdot_h = hamiltonian_rhs(hsys, sh)
            assert np.max(np.abs(qdot_h - qdot)) < 1e-8
            assert np.max(np.abs(pdot_h - pdot_pushed)) < 1e-8
            assert abs(zdot_h - zdot) < 1e-8

    def test_natural_form_matches_assembled_lagrangian(self):
        rng = np.random.default_rng(14)
        sys = natural_lagrangian_system(
            n=2, mass=np.array([[2.0, 0.3], [0.3, 1.5]]), gamma=0.7,
            potential=lambda q: float(q[0] ** 4 + q[1] ** 2),
            grad_potential=lambda q: np.array([4.0 * q[0] ** 3, 2.0 * q[1]]))
        M = sys.natural.mass_matrix(np.zeros(2))
        for _ in range(20):
            q = rng.uniform(-1, 1, 2)
            v = rng.uniform(-2, 2, 2)
            z = rng.uniform(-1, 1)
            direct = 0.5 * v @ M @ v - (q[0] ** 4 + q[1] ** 2) - 0.7 * z
            assert sys.value(q, v, z) == pytest.approx(direct, rel=1e-15, abs=1e-15)


class TestHamiltonianFromGeneralLagrangian:
    def test_quartic_system_hamiltonian_is_energy(self):
        sys = quartic_system(eps=0.2)
        hsys = hamiltonian_from_lagrangian(sys)
        s = ContactStateL(q=[0.1, -0.2], qdot=[0.8, 0.5], z=0.0)
        sh = legendre_forward(sys, s)
        assert hsys.value(sh.q, sh.p, sh.z) == pytest.approx(
            lagrangian_energy(sys, s), rel=1e-10)

    def test_general_duality(self):
        sys = quartic_system(eps=0.2)
        hsys = hamiltonian_from_lagrangian(sys)
        s = ContactStateL(q=[0.1, -0.2], qdot=[0.8, 0.5], z=0.0)
        sh = legendre_forward(sys, s)
        qdot_h, _, zdot_h = hamiltonian_rhs(hsys, sh)
        qdot, _, zdot = herglotz_rhs(sys, s)
        assert np.max(np.abs(qdot_h - qdot)) < 1e-8
        assert abs(zdot_h - zdot) < 1e-8
