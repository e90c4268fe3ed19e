import numpy as np
import pytest
from hypothesis import given, strategies as st

from gnqkz.bethe import (BetheSector, ChargeConfig, bethe_momentum, bethe_vector,
                         counting_function, ground_quantum_numbers, hole_quantum_numbers,
                         instantaneous_transport, log_bethe_defect, quantum_numbers_are_half_odd,
                         real_root_states, solve_log_bethe, spin_energy_density, state_energy,
                         transport_phase, vacancies, verify_bethe_eigenvector)
from gnqkz.errors import ConvergenceError, DomainError
from gnqkz.scattering import c_of_g
from gnqkz.spin import eigen_decompose, sz_values


def test_quantum_number_rules():
    assert quantum_numbers_are_half_odd(4, 2)
    assert not quantum_numbers_are_half_odd(4, 1)
    assert vacancies(4, 1) == [-1.0, 0.0, 1.0]
    assert vacancies(4, 2) == [-0.5, 0.5]
    assert ground_quantum_numbers(6, 3) == [-1.0, 0.0, 1.0]
    assert ground_quantum_numbers(2, 1) == [0.0]
    taken, holes = hole_quantum_numbers(6, (1, 2))
    assert taken == [-1.5, 1.5] and holes == [-0.5, 0.5]
    with pytest.raises(DomainError):
        vacancies(4, 3)
    with pytest.raises(DomainError):
        hole_quantum_numbers(6, (1,))


def test_sector_validation():
    with pytest.raises(DomainError):
        BetheSector.instantaneous(2, 2, (0.5,), 0.5)     # M = 1 needs integers
    with pytest.raises(DomainError):
        BetheSector.instantaneous(2, 2, (0.5, 0.5), 0.5)  # distinct
    with pytest.raises(DomainError):
        BetheSector(1, 1, (0.0,), (0.0,))
    s = BetheSector.instantaneous(1, 1, (0.0,), 0.5)
    assert np.isclose(s.theta, c_of_g(0.5) / 2)
    assert s.inhomogeneities == (s.theta, -s.theta)


def test_two_particle_root_is_zero():
    sol = solve_log_bethe(BetheSector.instantaneous(1, 1, (0.0,), 0.5))
    assert sol.converged and abs(sol.roots[0]) < 1e-14


@given(st.floats(0.05, 4.0), st.sampled_from([4, 6, 8, 12]))
def test_ground_state_solves_and_is_symmetric(theta, n):
    sector = BetheSector.from_theta(n // 2, n // 2, ground_quantum_numbers(n, n // 2), theta)
    sol = solve_log_bethe(sector)
    assert np.max(np.abs(log_bethe_defect(sector, sol.roots))) < 1e-10
    assert np.allclose(np.sort(sol.roots), -np.sort(sol.roots)[::-1], atol=1e-9)


def test_counting_function_reproduces_quantum_numbers():
    qn = hole_quantum_numbers(10, (0, 3))[0]
    sector = BetheSector.from_theta(5, 5, qn, 1.2)
    sol = solve_log_bethe(sector)
    assert np.allclose(counting_function(sector, sol.roots, sol.roots), qn, atol=1e-10)


def test_large_system_converges():
    # roots split into two clusters at +-theta; the density-based seed handles this
    sector = BetheSector.from_theta(64, 64, ground_quantum_numbers(128, 64), 3.0)
    sol = solve_log_bethe(sector)
    assert sol.converged and sol.restarts == 0


def test_solver_reports_nonconvergence():
    sector = BetheSector.from_theta(2, 2, (-0.5, 0.5), 1.0)
    with pytest.raises(ConvergenceError) as info:
        solve_log_bethe(sector, max_iter=1, tol=1e-30, max_restarts=0)
    assert info.value.residual is not None


def test_bethe_vector_sector_and_norm():
    sector = BetheSector.instantaneous(2, 2, (-0.5, 0.5), 0.5)
    sol = solve_log_bethe(sector)
    psi = bethe_vector(sector, sol.roots)
    assert np.allclose(psi[sz_values(4) != 0], 0)
    assert np.linalg.norm(psi) > 1e-6


def test_instantaneous_transport_products():
    # the product of all Z_j is a scalar multiple of the identity for N = 2
    z1 = instantaneous_transport(1, 1, 1, 0.4)
    z2 = instantaneous_transport(2, 1, 1, 0.4)
    assert np.allclose(z1 @ z2, z2 @ z1)
    with pytest.raises(DomainError):
        instantaneous_transport(3, 1, 1, 0.4)


@pytest.mark.parametrize("g", [0.2, 0.5, 0.9])
def test_every_real_state_is_an_eigenvector(g):
    states = list(real_root_states(2, 2, g))
    assert len(states) == 5
    for sector, sol in states:
        chk = verify_bethe_eigenvector(sector, sol.roots)
        assert chk.max_residual < 1e-8
        assert chk.ed_distance < 1e-8
        assert chk.variant_errors["single-particle"] < 1e-6


def test_printed_variants_are_rejected():
    sector, sol = [x for x in real_root_states(2, 2, 0.5) if x[0].M == 1][1]
    chk = verify_bethe_eigenvector(sector, sol.roots)
    assert chk.selected_variant == "single-particle"
    assert chk.variant_errors["printed"] > 0.1
    assert chk.variant_errors["unit-exponent"] > 0.1


def test_eigenvalue_formula_frozen():
    sector = BetheSector.instantaneous(1, 1, (0.0,), 0.5)
    sol = solve_log_bethe(sector)
    psi = bethe_vector(sector, sol.roots)
    z2 = instantaneous_transport(2, 1, 1, 0.5)
    mu = np.vdot(psi, z2 @ psi) / np.vdot(psi, psi)
    th = sector.theta
    expected = transport_phase(2, sector) * (th + 0.5j) / (th - 0.5j)   # root at 0, site at -theta
    assert np.isclose(mu, expected)
    assert np.isclose(bethe_momentum(sector, sol.roots, 2), (th + 0.5j) / (th - 0.5j))


def test_ed_spectrum_is_complete():
    pairs = eigen_decompose(instantaneous_transport(1, 2, 2, 0.5))
    assert len(pairs) == 16
    assert all(abs(abs(p.value) - 1) < 1e-12 for p in pairs)  # Z_j is unitary


def test_energy_functional():
    sector = BetheSector.from_theta(2, 2, (-0.5, 0.5), 2.0)
    sol = solve_log_bethe(sector)
    e = spin_energy_density(sector, np.array([0.0]))
    assert np.isclose(e[0], 4 * 2 * np.arctan(4.0))
    cfg = ChargeConfig((1, -1, 0, 2), 2.0, 4)
    assert np.isclose(state_energy(sector, sol.roots, cfg),
                      2 * np.pi * 2 / 2.0 + np.sum(spin_energy_density(sector, sol.roots)) / 2.0)
    with pytest.raises(DomainError):
        ChargeConfig((0, 0, 1, 2), 1.0, 4)
    with pytest.raises(DomainError):
        state_energy(sector, sol.roots, ChargeConfig((0, 0), 1.0, 2))
    with pytest.raises(DomainError):
        spin_energy_density(BetheSector(1, 1, (0.0,), (0.1, -0.1)), 0.0)
