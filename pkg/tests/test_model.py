import math

import numpy as np
import pytest

from aclsim.linalg import eigvals_hermitian, hermiticity_defect
from aclsim.model import (
    ModelParams,
    build_operators,
    gibbs_state,
    make_rng,
    position_operator,
    position_wavefunction,
    sample_gue,
    system_hamiltonian,
    total_hamiltonian,
    truncated_annihilation,
    truncated_coherent_state,
)

from oracles import loop_kron


@pytest.fixture
def rng():
    return np.random.default_rng(77)


class TestTruncatedAnnihilation:
    def test_matrix_elements(self):
        a = truncated_annihilation(4)
        assert a[0, 1] == 1.0
        assert a[1, 2] == pytest.approx(math.sqrt(2), abs=0)
        assert a[2, 3] == pytest.approx(math.sqrt(3), abs=0)
        # only the first superdiagonal is populated
        mask = np.ones((4, 4), dtype=bool)
        mask[np.arange(3), np.arange(1, 4)] = False
        assert np.abs(a[mask]).max() == 0

    def test_annihilates_ground_state(self):
        a = truncated_annihilation(5)
        e0 = np.zeros(5)
        e0[0] = 1.0
        assert np.abs(a @ e0).max() == 0

    def test_commutator_three_levels(self):
        a = truncated_annihilation(3)
        comm = a @ a.conj().T - a.conj().T @ a
        np.testing.assert_allclose(comm, np.diag([1.0, 1.0, -2.0]), atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 8, 16])
    def test_commutator_defect_on_top_state(self, n):
        a = truncated_annihilation(n)
        comm = a @ a.conj().T - a.conj().T @ a
        top = np.zeros((n, n))
        top[n - 1, n - 1] = 1.0
        expected = np.eye(n) - n * top
        assert np.abs(comm - expected).max() <= 1e-12

    def test_too_small_dimension(self):
        with pytest.raises(ValueError):
            truncated_annihilation(1)


class TestPositionOperator:
    def test_two_level_matrix(self):
        q = position_operator(truncated_annihilation(2))
        np.testing.assert_allclose(q, [[0, 1 / math.sqrt(2)], [1 / math.sqrt(2), 0]],
                                   atol=1e-15)

    @pytest.mark.parametrize("n", [2, 5, 16])
    def test_traceless(self, n):
        q = position_operator(truncated_annihilation(n))
        assert abs(np.trace(q)) == 0

    def test_spectrum_is_gauss_hermite_nodes(self):
        # q is the Jacobi matrix of the Hermite weight: its eigenvalues are
        # the 16-point Gauss-Hermite nodes
        q = position_operator(truncated_annihilation(16))
        nodes, _ = np.polynomial.hermite.hermgauss(16)
        np.testing.assert_allclose(eigvals_hermitian(q), np.sort(nodes), atol=1e-10)


class TestSystemHamiltonian:
    def test_ground_energy(self):
        h = system_hamiltonian(truncated_annihilation(4), omega_s=1.0)
        assert h[0, 0] == 0.5

    def test_exact_spacing(self):
        omega = 1.0
        h = system_hamiltonian(truncated_annihilation(16), omega)
        diag = np.real(np.diag(h))
        assert (np.diff(diag) == omega).all()

    def test_top_level(self):
        h = system_hamiltonian(truncated_annihilation(16), omega_s=1.0)
        assert h[15, 15] == 15.5

    def test_matches_operator_formula(self):
        a = truncated_annihilation(6)
        omega = 0.9
        direct = omega * (a.conj().T @ a + 0.5 * np.eye(6))
        assert np.abs(system_hamiltonian(a, omega) - direct).max() <= 1e-12


class TestSampleGue:
    def test_exact_hermiticity(self, rng):
        assert hermiticity_defect(sample_gue(32, rng)) == 0

    def test_seed_reproducibility(self):
        a = sample_gue(16, make_rng(42))
        b = sample_gue(16, make_rng(42))
        assert (a == b).all()

    def test_different_draws_differ(self):
        r = make_rng(42)
        a = sample_gue(16, r)
        b = sample_gue(16, r)
        assert not np.allclose(a, b)

    def test_semicircle_support(self):
        # averaged over 20 seeds at n=512 the spectrum concentrates on
        # [-2, 2]; demand at least 95% of eigenvalues inside [-2.1, 2.1]
        n = 512
        inside = total = 0
        for seed in range(20):
            w = eigvals_hermitian(sample_gue(n, make_rng(seed)))
            inside += int(((w >= -2.1) & (w <= 2.1)).sum())
            total += n
        assert inside / total >= 0.95


class TestGibbsState:
    def test_infinite_temperature_limit(self, rng):
        h = sample_gue(24, rng)
        rho = gibbs_state(h, temp=1e9)
        assert np.abs(rho - np.eye(24) / 24).max() <= 1e-8

    def test_zero_temperature_ground_projector(self):
        h = np.diag([0.0, 1.0, 2.0]).astype(complex)
        rho = gibbs_state(h, temp=0.0)
        np.testing.assert_allclose(rho, np.diag([1.0, 0.0, 0.0]), atol=1e-12)

    def test_zero_temperature_degenerate_ground_space(self):
        h = np.diag([0.0, 0.0, 5.0]).astype(complex)
        rho = gibbs_state(h, temp=0.0)
        np.testing.assert_allclose(rho, np.diag([0.5, 0.5, 0.0]), atol=1e-12)

    def test_two_level_populations(self):
        h = np.diag([0.0, 1.0]).astype(complex)
        rho = gibbs_state(h, temp=1.0)
        z = 1.0 + math.exp(-1.0)
        np.testing.assert_allclose(np.diag(rho).real, [1.0 / z, math.exp(-1.0) / z],
                                   atol=1e-12)

    def test_commutes_with_hamiltonian(self, rng):
        h = sample_gue(16, rng)
        rho = gibbs_state(h, temp=0.7)
        assert np.abs(rho @ h - h @ rho).max() <= 1e-10

    def test_unit_trace_and_positivity(self, rng):
        rho = gibbs_state(sample_gue(12, rng), temp=0.05)
        assert abs(np.trace(rho) - 1) <= 1e-12
        assert eigvals_hermitian(rho)[0] >= -1e-12

    def test_negative_temperature_rejected(self, rng):
        with pytest.raises(ValueError):
            gibbs_state(sample_gue(4, rng), temp=-0.1)


class TestTotalHamiltonian:
    def test_exact_hermiticity(self, rng):
        params = ModelParams(n_sys=4, n_env=6)
        ops = build_operators(params)
        assert hermiticity_defect(ops.h_total) == 0

    def test_decoupled_commutes_with_system_blocks(self):
        params = ModelParams(n_sys=3, n_env=4, gamma=0.0)
        ops = build_operators(params)
        lifted = np.kron(ops.h_s, np.eye(4))
        assert np.abs(ops.h_total @ lifted - lifted @ ops.h_total).max() <= 1e-12

    def test_small_assembly_vs_expansion_oracle(self):
        a = truncated_annihilation(2)
        q = position_operator(a)
        h_s = system_hamiltonian(a, 1.0)
        h_e = np.diag([0.3, -0.3]).astype(complex)
        x_e = np.ones((2, 2), dtype=complex)
        gamma = 0.8
        got = total_hamiltonian(h_s, h_e, q, x_e, gamma)
        expected = (loop_kron(h_s, np.eye(2)) + loop_kron(np.eye(2), h_e)
                    + gamma * loop_kron(q, x_e))
        np.testing.assert_allclose(got, expected, atol=0)

    def test_dimension_mismatch(self):
        a = truncated_annihilation(3)
        with pytest.raises(ValueError):
            total_hamiltonian(system_hamiltonian(a, 1.0), np.eye(4, dtype=complex),
                              position_operator(truncated_annihilation(2)),
                              np.eye(4, dtype=complex), 0.5)


class TestTruncatedCoherentState:
    def test_zero_displacement_is_ground(self):
        state = truncated_coherent_state(0.0, 8)
        expected = np.zeros(8)
        expected[0] = 1.0
        assert np.abs(state.vector - expected).max() == 0
        assert state.deficit == 0

    def test_unit_norm(self):
        for alpha in (0.5, 1.0, 2.0):
            state = truncated_coherent_state(alpha, 16)
            assert abs(np.linalg.norm(state.vector) - 1.0) <= 1e-14

    def test_truncation_deficit_alpha_one(self):
        assert truncated_coherent_state(1.0, 16).deficit <= 1e-7

    def test_pair_overlap_near_analytic(self):
        plus = truncated_coherent_state(1.0, 16).vector
        minus = truncated_coherent_state(-1.0, 16).vector
        overlap = np.vdot(plus, minus).real
        assert abs(overlap - math.exp(-2.0)) <= 1e-7

    def test_complex_displacement_accepted(self):
        state = truncated_coherent_state(0.5 + 0.5j, 12)
        assert abs(np.linalg.norm(state.vector) - 1.0) <= 1e-14


class TestPositionWavefunction:
    def test_ground_state_gaussian(self):
        psi = np.zeros(6, dtype=complex)
        psi[0] = 1.0
        for q in (0.0, 1.0):
            dens = position_wavefunction(psi, np.array([q]))
            assert dens[0] == pytest.approx(math.exp(-q * q) / math.sqrt(math.pi), abs=1e-12)

    def test_trapezoid_normalization(self):
        state = truncated_coherent_state(1.0, 16).vector
        q = np.arange(-8.0, 8.0 + 1e-12, 0.01)
        dens = position_wavefunction(state, q)
        assert abs(np.trapezoid(dens, q) - 1.0) <= 1e-6

    def test_coherent_peak_position(self):
        state = truncated_coherent_state(1.0, 16).vector
        q = np.arange(-8.0, 8.0 + 1e-12, 0.01)
        dens = position_wavefunction(state, q)
        peak = q[np.argmax(dens)]
        assert abs(peak - math.sqrt(2.0)) <= 0.02

    def test_density_matrix_input_matches_pure(self):
        state = truncated_coherent_state(0.7, 10).vector
        q = np.linspace(-4, 4, 101)
        from_vec = position_wavefunction(state, q)
        from_dm = position_wavefunction(np.outer(state, state.conj()), q)
        np.testing.assert_allclose(from_vec, from_dm, atol=1e-12)

    def test_nonfinite_grid_rejected(self):
        with pytest.raises(ValueError):
            position_wavefunction(np.array([1.0, 0.0]), np.array([0.0, np.inf]))


class TestBuildOperators:
    def test_bitwise_determinism(self):
        p = ModelParams(n_sys=4, n_env=8, seed=321)
        ops1 = build_operators(p)
        ops2 = build_operators(p)
        for name in ("a_s", "q_s", "h_s", "h_e", "x_e", "h_total"):
            assert (getattr(ops1, name) == getattr(ops2, name)).all()

    def test_environment_independent_of_gamma_and_temp(self):
        base = ModelParams(n_sys=4, n_env=8, seed=5, gamma=0.32, temp=1.0)
        other = ModelParams(n_sys=4, n_env=8, seed=5, gamma=1.0, temp=0.01)
        assert (build_operators(base).h_e == build_operators(other).h_e).all()
        assert (build_operators(base).x_e == build_operators(other).x_e).all()

    def test_sampled_operators_hermitian(self):
        ops = build_operators(ModelParams(n_sys=2, n_env=16, seed=9))
        assert hermiticity_defect(ops.h_e) == 0
        assert hermiticity_defect(ops.x_e) == 0


class TestModelParams:
    @pytest.mark.parametrize("kwargs", [
        {"n_sys": 1}, {"n_env": 1}, {"gamma": -0.1}, {"temp": -1.0},
        {"dt": 0.0}, {"dt": -0.1}, {"t_max": 0.01},
    ])
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            ModelParams(**kwargs)

    def test_defaults_valid(self):
        p = ModelParams()
        assert p.n_sys == 16 and p.n_env == 64
        assert p.omega_s == 1.0 and p.alpha == 1.0
