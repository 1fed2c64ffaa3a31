"""Numerical master-equation solvers on truncated Fock spaces.

Two generators are provided: the bosonic effective model (with optional
1/N correction terms, which are not of standard Lindblad form and whose
steady state is checked for physicality a posteriori), and the full
spin+cavity model for one or two emitters used as an adiabatic-elimination
oracle.  Everything is dense; the target dimensions (Fock truncation
D <= 64, spin+cavity <= 16) make dense LU solves simple and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import Branch, Observables
from .model import EffectiveModel, PhysicalParams, collective_decay_rate


class SteadyStateError(RuntimeError):
    """Null-space solve failed or is ambiguous."""


class PhysicalityError(RuntimeError):
    """Steady state violates a density-matrix invariant."""


class TruncationError(RuntimeError):
    """Fock truncation too small for the requested drive."""


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on a D-level truncated Fock space."""

    dim: int
    entries: np.ndarray

    @classmethod
    def annihilation(cls, dim: int) -> "FockOperator":
        return cls(dim, annihilation(dim))


def annihilation(dim: int) -> np.ndarray:
    """b with b[m, m+1] = sqrt(m+1); [b, b+] = 1 up to the top level."""
    if dim < 2:
        raise ValueError("Fock dimension must be >= 2")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


@dataclass(frozen=True)
class DensityMatrix:
    dim: int
    entries: np.ndarray

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def boundary_occupation(self) -> float:
        return float(self.entries[-1, -1].real)

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(op @ self.entries))

    def validate(self, trace_tol: float = 1e-10, herm_tol: float = 1e-10,
                 eig_floor: float = -1e-8, boundary_tol: float = 1e-8,
                 check_boundary: bool = True) -> None:
        r = self.entries
        terr = abs(np.trace(r) - 1.0)
        if terr > trace_tol:
            raise PhysicalityError(f"trace deviates from 1 by {terr:.3e}")
        herr = float(np.max(np.abs(r - r.conj().T)))
        if herr > herm_tol:
            raise PhysicalityError(f"hermiticity defect {herr:.3e}")
        evals = np.linalg.eigvalsh(0.5 * (r + r.conj().T))
        if evals.min() < eig_floor:
            raise PhysicalityError(
                f"negative eigenvalue {evals.min():.3e} below {eig_floor:.1e}")
        if check_boundary:
            b = self.boundary_occupation()
            if b >= boundary_tol:
                raise TruncationError(
                    f"top Fock level holds population {b:.3e} >= "
                    f"{boundary_tol:.1e}; increase the truncation dimension")


def physicality_report(rho: DensityMatrix) -> dict:
    """Invariant metrics of a steady state, for a-posteriori checks.

    The 1/N correction dissipator is not of Lindblad form, so its steady
    states can carry small negative eigenvalues; callers are expected to
    inspect this report instead of assuming positivity.
    """
    r = rho.entries
    return {
        "trace_error": float(abs(np.trace(r) - 1.0)),
        "hermiticity_defect": float(np.max(np.abs(r - r.conj().T))),
        "min_eigenvalue": float(
            np.linalg.eigvalsh(0.5 * (r + r.conj().T)).min()),
        "boundary_occupation": rho.boundary_occupation(),
    }


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def _hamiltonian_part(h: np.ndarray) -> np.ndarray:
    """-i[H, rho] vectorized row-major: vec(A rho B) = (A kron B^T) vec."""
    eye = np.eye(h.shape[0], dtype=complex)
    return -1j * (_kron(h, eye) - _kron(eye, h.T))


def _dissipator(c: np.ndarray, rate: float = 1.0) -> np.ndarray:
    """rate * (c rho c+ - {c+ c, rho}/2)."""
    eye = np.eye(c.shape[0], dtype=complex)
    cd = c.conj().T
    cdc = cd @ c
    return rate * (_kron(c, cd.T)
                   - 0.5 * _kron(cdc, eye) - 0.5 * _kron(eye, cdc.T))


def build_hp_liouvillian(model: EffectiveModel, dim: int,
                         include_gamma0: bool = False) -> np.ndarray:
    """Generator of the bosonic effective master equation, vectorized.

    Coherent part: bar_delta_n b+b + bar_omega b+ + h.c. minus the
    nonlinear drive corrections and the Kerr term; damping at rate
    big_gamma.  With include_gamma0 the 1/N correction dissipator
    (Gamma0/2)(b+2b2 rho + rho b+2b2 - b rho b+2b - b+b2 rho b+)
    is added verbatim; it is not of diagonal Lindblad form.
    """
    if dim < 4:
        raise ValueError("Fock dimension must be >= 4 to resolve the drive")
    b = annihilation(dim)
    bd = b.conj().T
    nop = bd @ b
    om = model.bar_omega
    tom = model.tilde_omega
    h = model.bar_delta_n * nop + om * bd + np.conj(om) * b \
        - tom * (bd @ bd @ b) - np.conj(tom) * (bd @ b @ b) \
        - model.bar_delta * (bd @ bd @ b @ b)
    liouv = _hamiltonian_part(h) + _dissipator(b, model.big_gamma)
    if include_gamma0:
        eye = np.eye(dim, dtype=complex)
        k_op = bd @ bd @ b @ b
        b2b = bd @ bd @ b     # b+^2 b
        bb2 = bd @ b @ b      # b+ b^2
        liouv += 0.5 * model.gamma0 * (
            _kron(k_op, eye) + _kron(eye, k_op.T)
            - _kron(b, b2b.T) - _kron(bb2, bd.T))
    return liouv


def _spin_ops(n_spins: int):
    """Per-spin lowering operators and collective S-, S+, S_z."""
    if n_spins not in (1, 2):
        raise ValueError("full model supports 1 or 2 spins")
    sm = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |g><e|
    sz = np.diag([0.5, -0.5]).astype(complex)               # basis |e>, |g>
    eye2 = np.eye(2, dtype=complex)
    if n_spins == 1:
        lowers = [sm]
        s_z = sz
    else:
        lowers = [np.kron(sm, eye2), np.kron(eye2, sm)]
        s_z = np.kron(sz, eye2) + np.kron(eye2, sz)
    s_minus = sum(lowers)
    return lowers, s_minus, s_minus.conj().T, s_z


def build_full_liouvillian(params: PhysicalParams, n_spins: int,
                           cavity_dim: int) -> np.ndarray:
    """Spin+cavity generator with cross-correlated decay channels.

    Includes per-spin spontaneous decay gamma, cavity decay kappa, and the
    eta-weighted cross terms coupling the two channels:
        eta sqrt(kappa gamma) [a rho S+ + S- rho a+ - {S+ a + a+ S-, rho}/2].
    """
    if cavity_dim < 4:
        raise ValueError("cavity dimension must be >= 4")
    lowers, s_minus, s_plus, s_z = _spin_ops(n_spins)
    spin_dim = 2 ** n_spins
    eye_s = np.eye(spin_dim, dtype=complex)
    eye_c = np.eye(cavity_dim, dtype=complex)
    a = annihilation(cavity_dim)

    def lift_spin(op):
        return _kron(op, eye_c)

    def lift_cav(op):
        return _kron(eye_s, op)

    a_f = lift_cav(a)
    ad_f = a_f.conj().T
    sm_f = lift_spin(s_minus)
    sp_f = lift_spin(s_plus)

    h = params.delta_c * (ad_f @ a_f) + params.delta_n * lift_spin(s_z) \
        + params.omega_rabi * (sp_f * np.exp(-1j * params.phi1)
                               + sm_f * np.exp(1j * params.phi1)) \
        + params.epsilon_drive * (ad_f * np.exp(-1j * params.phi2)
                                  + a_f * np.exp(1j * params.phi2)) \
        + params.g_c * (sp_f @ a_f + ad_f @ sm_f)

    liouv = _hamiltonian_part(h)
    for low in lowers:
        liouv += _dissipator(lift_spin(low), params.gamma)
    liouv += _dissipator(a_f, params.kappa)

    xi = params.eta * math.sqrt(params.kappa * params.gamma)
    if xi != 0.0:
        dim = spin_dim * cavity_dim
        eye = np.eye(dim, dtype=complex)
        anti = sp_f @ a_f + ad_f @ sm_f
        liouv += xi * (_kron(a_f, sp_f.T) + _kron(sm_f, ad_f.T)
                       - 0.5 * _kron(anti, eye) - 0.5 * _kron(eye, anti.T))
    return liouv


def steady_state(liouv: np.ndarray, residual_tol: float = 1e-10,
                 validate: bool = True,
                 check_boundary: bool = True) -> DensityMatrix:
    """Trace-normalized null vector of the generator.

    Replaces one redundant row with the trace constraint and LU-solves;
    falls back to inverse iteration, and on failure reports the two
    smallest singular values (degenerate steady-state diagnosis).
    """
    d2 = liouv.shape[0]
    dim = int(round(math.sqrt(d2)))
    if dim * dim != d2:
        raise ValueError("Liouvillian is not a vectorized square operator")
    trace_row = np.zeros(d2, dtype=complex)
    trace_row[:: dim + 1] = 1.0
    lnorm = float(np.linalg.norm(liouv))

    def residual(vec):
        return float(np.linalg.norm(liouv @ vec))

    mat = liouv.copy()
    mat[0, :] = trace_row
    rhs = np.zeros(d2, dtype=complex)
    rhs[0] = 1.0
    vec = None
    try:
        cand = np.linalg.solve(mat, rhs)
        tr = cand[:: dim + 1].sum()
        if abs(tr) > 1e-300:
            cand = cand / tr
            if residual(cand) <= residual_tol * max(lnorm, 1.0):
                vec = cand
    except np.linalg.LinAlgError:
        pass

    if vec is None:
        # inverse iteration around zero with a small regularizing shift
        shift = 1e-12 * max(lnorm, 1.0)
        mat = liouv + shift * np.eye(d2, dtype=complex)
        rng = np.random.default_rng(7)
        cand = rng.standard_normal(d2) + 1j * rng.standard_normal(d2)
        cand /= np.linalg.norm(cand)
        try:
            for _ in range(50):
                cand = np.linalg.solve(mat, cand)
                cand /= np.linalg.norm(cand)
                if residual(cand) <= 0.1 * residual_tol * max(lnorm, 1.0):
                    break
        except np.linalg.LinAlgError:
            cand = None
        if cand is not None:
            tr = cand[:: dim + 1].sum()
            if abs(tr) > 1e-300:
                cand = cand / tr
                if residual(cand) <= residual_tol * max(lnorm, 1.0):
                    vec = cand

    if vec is None:
        svals = np.linalg.svd(liouv, compute_uv=False)
        raise SteadyStateError(
            "steady-state solve failed; two smallest singular values of the "
            f"generator: {svals[-1]:.3e}, {svals[-2]:.3e} (near-degenerate "
            "null space or ill-conditioned generator)")

    rho = vec.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    out = DensityMatrix(dim, rho)
    if validate:
        out.validate(check_boundary=check_boundary)
    return out


def steady_state_auto(model: EffectiveModel, include_gamma0: bool = False,
                      start_dim: int = 16, max_dim: int = 64,
                      boundary_tol: float = 1e-8,
                      validate: bool = True) -> DensityMatrix:
    """Escalate the Fock truncation D -> 2D until the top level is empty."""
    dim = start_dim
    last_err = None
    while dim <= max_dim:
        liouv = build_hp_liouvillian(model, dim, include_gamma0)
        try:
            rho = steady_state(liouv, validate=validate)
        except TruncationError as err:
            last_err = err
            dim *= 2
            continue
        if rho.boundary_occupation() < boundary_tol:
            return rho
        dim *= 2
    raise TruncationError(
        f"no adequate truncation up to D = {max_dim}; last failure: "
        f"{last_err}")


def converged_steady_observables(model: EffectiveModel,
                                 include_gamma0: bool = False,
                                 start_dim: int = 16, max_dim: int = 64,
                                 rel_change: float = 1e-3) -> Observables:
    """Observables at a dimension verified by doubling invariance.

    Escalates until doubling D changes both the mean excitation and g2 by
    less than rel_change; returns the values from the doubled dimension.
    """
    dim = start_dim
    prev = None
    while dim <= max_dim:
        rho = steady_state(build_hp_liouvillian(model, dim, include_gamma0),
                           validate=False)
        obs = observables_from_rho(rho)
        if prev is not None:
            ref = max(abs(prev.mean_excitation), abs(obs.mean_excitation),
                      1e-30)
            dmean = abs(prev.mean_excitation - obs.mean_excitation) / ref
            if math.isnan(prev.g2) and math.isnan(obs.g2):
                dg2 = 0.0
            elif math.isnan(prev.g2) or math.isnan(obs.g2):
                dg2 = math.inf
            else:
                dg2 = abs(prev.g2 - obs.g2) / max(abs(prev.g2), abs(obs.g2))
            if dmean < rel_change and dg2 < rel_change \
                    and rho.boundary_occupation() < 1e-8:
                return obs
        prev = obs
        dim *= 2
    raise TruncationError(
        f"observables not converged in Fock dimension up to D = {max_dim}")


def evolve(liouv: np.ndarray, rho0: DensityMatrix, t_final: float,
           dt: float, trace_tol: float = 1e-8) -> DensityMatrix:
    """Fixed-step 4th-order (classical RK4) integration of the generator."""
    vec = rho0.entries.reshape(-1).astype(complex)
    steps = max(1, int(math.ceil(t_final / dt)))
    h = t_final / steps
    for _ in range(steps):
        k1 = liouv @ vec
        k2 = liouv @ (vec + 0.5 * h * k1)
        k3 = liouv @ (vec + 0.5 * h * k2)
        k4 = liouv @ (vec + h * k3)
        vec = vec + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    dim = rho0.dim
    drift = abs(vec[:: dim + 1].sum() - 1.0)
    if drift > trace_tol:
        raise RuntimeError(
            f"trace drifted by {drift:.3e} > {trace_tol:.1e}; reduce dt "
            f"(used dt = {h:.3e})")
    return DensityMatrix(dim, vec.reshape(dim, dim))


def expectation_trajectory(liouv: np.ndarray, rho0: DensityMatrix,
                           op: np.ndarray, t_final: float, dt: float,
                           n_samples: int = 400):
    """(times, <op>(t)) sampled along an RK4 trajectory."""
    vec = rho0.entries.reshape(-1).astype(complex)
    steps = max(1, int(math.ceil(t_final / dt)))
    h = t_final / steps
    stride = max(1, steps // n_samples)
    op_vec = op.T.reshape(-1)  # tr(op rho) = op.T ravel . vec(rho)
    times = [0.0]
    values = [complex(op_vec @ vec)]
    for i in range(steps):
        k1 = liouv @ vec
        k2 = liouv @ (vec + 0.5 * h * k1)
        k3 = liouv @ (vec + 0.5 * h * k2)
        k4 = liouv @ (vec + h * k3)
        vec = vec + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (i + 1) % stride == 0 or i == steps - 1:
            times.append((i + 1) * h)
            values.append(complex(op_vec @ vec))
    return np.array(times), np.array(values)


def observables_from_rho(rho: DensityMatrix) -> Observables:
    """Moments tr(b+b rho), tr(b rho), tr(b+2 b2 rho) and g2."""
    b = annihilation(rho.dim)
    bd = b.conj().T
    mean = rho.expect(bd @ b).real
    amp = rho.expect(b)
    m2 = rho.expect(bd @ bd @ b @ b).real
    g2 = m2 / mean ** 2 if mean > 1e-14 else math.nan
    return Observables(
        mean_excitation=mean, amplitude=amp, second_moment=m2, g2=g2,
        branch=Branch.NUMERIC, terms_used=rho.dim, truncation_residual=rho.boundary_occupation())


def excited_spins_vacuum_state(n_spins: int, cavity_dim: int) -> DensityMatrix:
    """All spins excited, cavity in vacuum."""
    spin_dim = 2 ** n_spins
    rho_s = np.zeros((spin_dim, spin_dim), dtype=complex)
    rho_s[0, 0] = 1.0  # |e...e> is the first basis state
    rho_c = np.zeros((cavity_dim, cavity_dim), dtype=complex)
    rho_c[0, 0] = 1.0
    rho = np.kron(rho_s, rho_c)
    return DensityMatrix(spin_dim * cavity_dim, rho)


def collective_population_op(n_spins: int, cavity_dim: int) -> np.ndarray:
    """S+ S- lifted to the spin+cavity space."""
    _, s_minus, s_plus, _ = _spin_ops(n_spins)
    return np.kron(s_plus @ s_minus, np.eye(cavity_dim, dtype=complex))


def fit_decay_rate(times: np.ndarray, values: np.ndarray,
                   t_lo: float, t_hi: float) -> float:
    """Decay rate from a linear fit to log(values) on [t_lo, t_hi]."""
    mask = (times >= t_lo) & (times <= t_hi) & (values.real > 0)
    if mask.sum() < 4:
        raise ValueError("fit window contains fewer than 4 usable samples")
    slope = np.polyfit(times[mask], np.log(values[mask].real), 1)[0]
    return float(-slope)


def fitted_spin_decay_rate(params: PhysicalParams, n_spins: int = 1,
                           cavity_dim: int = 4,
                           t_final: float | None = None,
                           expected_rate: float | None = None) -> float:
    """Adiabatic-elimination oracle: exponential fit to <S+S->(t).

    Starts from all spins excited and the cavity empty, skips the cavity's
    non-Markovian transient (t < 2/kappa), and fits up to half a decay time
    of the expected rate (capped when the expected rate is ~0).
    """
    if expected_rate is None:
        expected_rate = params.gamma + collective_decay_rate(params)
    t_lo = 2.0 / params.kappa
    if expected_rate > 1e-6 * params.gamma:
        t_hi = 0.5 / expected_rate
    else:
        t_hi = 2.0 / params.gamma
    if t_final is None:
        t_final = t_hi
    dt = 0.1 / max(params.kappa, abs(params.delta_c), params.gamma,
                   params.g_c)
    liouv = build_full_liouvillian(params, n_spins, cavity_dim)
    rho0 = excited_spins_vacuum_state(n_spins, cavity_dim)
    op = collective_population_op(n_spins, cavity_dim)
    times, values = expectation_trajectory(liouv, rho0, op, t_final, dt)
    return fit_decay_rate(times, values, t_lo, t_hi)
