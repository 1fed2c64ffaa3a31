import math

import numpy as np
import pytest

from crosscav import lindblad
from crosscav.analytic import Branch
from crosscav.lindblad import (DensityMatrix, FockOperator, PhysicalityError,
                               TruncationError, annihilation,
                               build_full_liouvillian, build_hp_liouvillian,
                               evolve, expectation_trajectory,
                               fitted_spin_decay_rate, observables_from_rho,
                               physicality_report, steady_state,
                               steady_state_auto)
from crosscav.model import PhysicalParams, build_effective_model,


def make_model(delta_c=-42.0, eta_sqn=1.0, n=100, omega_sqn=50.0, eps=0.0,
               dphi=0.0):
    sq = math.sqrt(n)
    p = PhysicalParams(kappa=1.62e6, g_c=5.02e3 / sq, n_emitters=n,
                       omega_n_minus_omega_c=50.0, delta_c=delta_c,
                       omega_rabi=omega_sqn / sq, epsilon_drive=eps,
                       phi1=dphi, eta=eta_sqn / sq)
    return build_effective_model(p, warn_bad_cavity=False)


def coherent_state(dim, beta):
    n = np.arange(dim)
    amps = np.exp(-0.5 * abs(beta) ** 2) * beta ** n / np.sqrt(
        [math.factorial(int(k)) for k in n])
    rho = np.outer(amps, amps.conj())
    return DensityMatrix(dim, rho / np.trace(rho).real)


# --- operators -------------------------------------------------------------


def test_annihilation_matrix_elements():
    b = annihilation(6)
    for m in range(5):
        assert b[m, m + 1] == pytest.approx(math.sqrt(m + 1))
    assert np.count_nonzero(b) == 5


def test_commutator_truncation_defect_exact():
    dim = 8
    b = annihilation(dim)
    comm = b @ b.conj().T - b.conj().T @ b
    expected = np.eye(dim)
    expected[-1, -1] = -(dim - 1)
    assert np.array_equal(comm, expected.astype(complex))
    assert FockOperator.annihilation(dim).dim == dim


# --- generator structure ----------------------------------------------------


@pytest.mark.parametrize("include_gamma0", [False, True])
def test_hp_generator_preserves_trace_and_hermiticity(include_gamma0):
    m = make_model()
    dim = 10
    liouv = build_hp_liouvillian(m, dim, include_gamma0)
    rng = np.random.default_rng(21)
    for _ in range(100):
        x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal(
            (dim, dim))
        rho = x + x.conj().T
        drho = (liouv @ rho.reshape(-1)).reshape(dim, dim)
        scale = max(float(np.max(np.abs(drho))), 1.0)
        assert abs(np.trace(drho)) <= 1e-12 * scale * dim
        assert float(np.max(np.abs(drho - drho.conj().T))) <= 1e-12 * scale


def test_full_generator_preserves_trace_and_hermiticity():
    p = PhysicalParams(kappa=1e4, g_c=10.0, n_emitters=2, eta=0.5,
                       delta_c=3.0, omega_n_minus_omega_c=0.0,
                       omega_rabi=1.0, epsilon_drive=2.0, phi1=0.3, phi2=0.7)
    liouv = build_full_liouvillian(p, n_spins=2, cavity_dim=4)
    dim = 4 * 4
    rng = np.random.default_rng(22)
    for _ in range(100):
        x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal(
            (dim, dim))
        rho = x + x.conj().T
        drho = (liouv @ rho.reshape(-1)).reshape(dim, dim)
        scale = max(float(np.max(np.abs(drho))), 1.0)
        assert abs(np.trace(drho)) <= 1e-12 * scale * dim
        assert float(np.max(np.abs(drho - drho.conj().T))) <= 1e-12 * scale


# --- steady states -----------------------------------------------------------


def test_pure_decay_steady_state_is_vacuum():
    from crosscav.model import EffectiveModel
    m = make_model()
    # strip the drives: pure decay generator
    m = EffectiveModel(**{**m.__dict__, "bar_omega": 0j, "tilde_omega": 0j,
                          "bar_delta": 0.0, "bar_delta_n": 0.0})
    liouv = build_hp_liouvillian(m, 8, include_gamma0=False)
    rho = steady_state(liouv)
    expected = np.zeros((8, 8), dtype=complex)
    expected[0, 0] = 1.0
    assert float(np.max(np.abs(rho.entries - expected))) < 1e-12


def test_linear_drive_reaches_coherent_state():
    from crosscav.model import EffectiveModel
    m = make_model(delta_c=-42.0)
    m = EffectiveModel(**{**m.__dict__, "tilde_omega": 0j, "bar_delta": 0.0})
    liouv = build_hp_liouvillian(m, 32, include_gamma0=False)
    rho = steady_state(liouv)
    beta = -1j * m.bar_omega / (0.5 * m.big_gamma + 1j * m.bar_delta_n)
    obs = observables_from_rho(rho)
    assert obs.amplitude == pytest.approx(beta, rel=1e-8)
    assert obs.mean_excitation == pytest.approx(abs(beta) ** 2, rel=1e-8)
    ref = coherent_state(32, beta)
    fidelity = float(np.trace(ref.entries @ rho.entries).real)
    assert fidelity > 1.0 - 1e-8
    assert obs.g2 == pytest.approx(1.0, abs=1e-6)


def test_steady_state_residual_and_validation():
    m = make_model()
    liouv = build_hp_liouvillian(m, 24, include_gamma0=False)
    rho = steady_state(liouv)
    resid = float(np.linalg.norm(liouv @ rho.entries.reshape(-1)))
    assert resid <= 1e-10 * float(np.linalg.norm(liouv))
    rho.validate()  # trace/hermiticity/positivity/truncation all pass
    rep = physicality_report(rho)
    assert rep["trace_error"] < 1e-12
    assert rep["min_eigenvalue"] > -1e-10


def test_steady_state_auto_escalates():
    m = make_model(delta_c=-42.0)  # mean excitation ~ 2.5 needs D > 16
    rho = steady_state_auto(m, include_gamma0=False, start_dim=8)
    assert rho.dim in (16, 32, 64)
    assert rho.boundary_occupation() < 1e-8


def test_truncation_error_carries_guidance():
    m = make_model(delta_c=-42.0)
    with pytest.raises(TruncationError, match="truncation"):
        steady_state_auto(m, include_gamma0=False, start_dim=4, max_dim=4)


def test_gamma0_steady_state_reported_not_assumed():
    # the 1/N correction dissipator is not of Lindblad form; its steady
    # state carries a small negative eigenvalue that must be surfaced
    m = make_model(delta_c=-42.0)
    rho = steady_state(build_hp_liouvillian(m, 32, True), validate=False)
    rep = physicality_report(rho)
    assert rep["trace_error"] < 1e-10
    assert rep["hermiticity_defect"] < 1e-10
    assert rep["boundary_occupation"] < 1e-8
    if rep["min_eigenvalue"] < -1e-8:
        with pytest.raises(PhysicalityError):
            rho.validate()


# --- time evolution ---------------------------------------------------------


def test_evolve_zero_generator_is_identity():
    dim = 6
    rho0 = coherent_state(dim, 0.4)
    out = evolve(np.zeros((dim * dim, dim * dim), dtype=complex), rho0,
                 t_final=1.0, dt=0.1)
    assert np.allclose(out.entries, rho0.entries, atol=1e-14)


def test_evolve_pure_decay_exponential():
    from crosscav.model import EffectiveModel
    m = make_model()
    m = EffectiveModel(**{**m.__dict__, "bar_omega": 0j, "tilde_omega": 0j,
                          "bar_delta": 0.0, "bar_delta_n": 0.0})
    dim = 6
    liouv = build_hp_liouvillian(m, dim, include_gamma0=False)
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[1, 1] = 1.0
    gam = m.big_gamma
    t_final = 2.0 / gam
    out = evolve(liouv, DensityMatrix(dim, rho0), t_final, dt=0.01 / gam)
    expected = math.exp(-gam * t_final)
    got = observables_from_rho(out).mean_excitation
    assert got == pytest.approx(expected, rel=1e-7)


def test_evolve_converges_to_steady_state():
    m = make_model(delta_c=-150.0)  # far detuned: small excitation, fast
    dim = 16
    liouv = build_hp_liouvillian(m, dim, include_gamma0=False)
    rho_ss = steady_state(liouv, validate=False)
    vac = np.zeros((dim, dim), dtype=complex)
    vac[0, 0] = 1.0
    out = evolve(liouv, DensityMatrix(dim, vac),
                 t_final=30.0 / m.big_gamma, dt=0.05 / m.big_gamma)
    dist = 0.5 * float(np.sum(np.abs(
        np.linalg.eigvalsh(out.entries - rho_ss.entries))))
    assert dist < 1e-6


def test_evolve_trace_drift_guard():
    dim = 4
    liouv = np.eye(dim * dim, dtype=complex)  # not trace preserving
    rho0 = coherent_state(dim, 0.1)
    with pytest.raises(RuntimeError, match="trace"):
        evolve(liouv, rho0, t_final=5.0, dt=0.5)


# --- observables -------------------------------------------------------------


def test_observables_vacuum():
    dim = 8
    vac = np.zeros((dim, dim), dtype=complex)
    vac[0, 0] = 1.0
    obs = observables_from_rho(DensityMatrix(dim, vac))
    assert obs.mean_excitation == 0.0
    assert obs.amplitude == 0.0
    assert obs.second_moment == 0.0
    assert math.isnan(obs.g2)
    assert obs.branch is Branch.NUMERIC


def test_observables_coherent_state():
    beta = 0.7 - 0.3j
    obs = observables_from_rho(coherent_state(24, beta))
    assert obs.amplitude == pytest.approx(beta, rel=1e-10)
    assert obs.mean_excitation == pytest.approx(abs(beta) ** 2, rel=1e-10)
    assert obs.g2 == pytest.approx(1.0, rel=1e-9)


def test_observables_fock_one():
    dim = 8
    rho = np.zeros((dim, dim), dtype=complex)
    rho[1, 1] = 1.0
    obs = observables_from_rho(DensityMatrix(dim, rho))
    assert obs.mean_excitation == pytest.approx(1.0)
    assert obs.g2 == pytest.approx(0.0, abs=1e-14)


# --- full spin+cavity model --------------------------------------------------


def test_full_model_driven_cavity_coherent():
    # spins decoupled: cavity settles into the displaced coherent state
    p = PhysicalParams(kappa=1e4, g_c=0.0, n_emitters=1, eta=0.0,
                       delta_c=2e3, omega_n_minus_omega_c=0.0,
                       omega_rabi=0.0, epsilon_drive=1e3, phi2=0.4)
    liouv = build_full_liouvillian(p, n_spins=1, cavity_dim=8)
    rho = steady_state(liouv, validate=False)
    from crosscav.model import displacement_alpha
    alpha = displacement_alpha(p)
    a_full = np.kron(np.eye(2, dtype=complex), annihilation(8))
    got = rho.expect(a_full)
    target = -alpha * np.exp(-1j * p.phi2)
    assert abs(got - target) < 1e-8
    assert abs(abs(got) - abs(alpha)) < 1e-8
    nbar = rho.expect(a_full.conj().T @ a_full).real
    n4 = rho.expect(a_full.conj().T @ a_full.conj().T @ a_full @ a_full).real
    assert n4 / nbar ** 2 == pytest.approx(1.0, abs=1e-6)  # Poissonian


def test_adiabatic_elimination_purcell_rate():
    p = PhysicalParams(kappa=1e4, g_c=10.0, n_emitters=1, eta=0.0,
                       delta_c=0.0, omega_n_minus_omega_c=0.0)
    from crosscav.model import single_emitter_rate
    fitted = fitted_spin_decay_rate(p)
    expected = single_emitter_rate(p)  # 1.04
    assert fitted == pytest.approx(expected, rel=0.05)


def test_decay_suppression_fitted_rate_near_zero():
    dc = 10.0 * math.sqrt(1e4)
    p = PhysicalParams(kappa=1e4, g_c=10.0, n_emitters=1, eta=1.0,
                       delta_c=dc, omega_n_minus_omega_c=-dc)
    fitted = fitted_spin_decay_rate(p, expected_rate=0.0)
    assert abs(fitted) < 0.02  # fit floor; gamma_s here is exactly 0


def test_full_model_steady_state_physical():
    p = PhysicalParams(kappa=1e4, g_c=10.0, n_emitters=2, eta=0.7,
                       delta_c=5.0, omega_n_minus_omega_c=0.0,
                       omega_rabi=0.5, epsilon_drive=3.0)
    liouv = build_full_liouvillian(p, n_spins=2, cavity_dim=4)
    rho = steady_state(liouv, validate=False)
    rep = physicality_report(rho)
    # the cross-correlated dissipator is completely positive for eta <= 1
    assert rep["trace_error"] < 1e-10
    assert rep["hermiticity_defect"] < 1e-10
    assert rep["min_eigenvalue"] > -1e-8


def test_expectation_trajectory_shapes():
    p = PhysicalParams(kappa=100.0, g_c=1.0, n_emitters=1, eta=0.0,
                       delta_c=0.0, omega_n_minus_omega_c=0.0)
    liouv = build_full_liouvillian(p, n_spins=1, cavity_dim=4)
    rho0 = lindblad.excited_spins_vacuum_state(1, 4)
    op = lindblad.collective_population_op(1, 4)
    times, values = expectation_trajectory(liouv, rho0, op, t_final=0.1,
                                           dt=1e-3, n_samples=20)
    assert len(times) == len(values)
    assert values[0].real == pytest.approx(1.0)
    assert values[-1].real < values[0].real
