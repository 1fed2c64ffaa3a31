"""Physical parameters and closed-form quantities of the effective model.

All rates are expressed in units of the single-emitter spontaneous decay
rate gamma (gamma = 1 by convention); angles in radians.  The cavity mode is
assumed broadband and leaky, so it can be eliminated once
kappa > max(sqrt(N) g_c, N gamma), leaving an emitter-only master equation
whose coefficients are collected in EffectiveModel.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field, replace


class ModelError(ValueError):
    """Parameter combination outside the model's domain of validity."""


class BadCavityWarning(UserWarning):
    """kappa is not large enough for a clean cavity elimination."""


@dataclass(frozen=True)
class PhysicalParams:
    """Raw inputs, in units of gamma.

    delta_c is the detuning between cavity frequency and the field driving
    the cavity; omega_n_minus_omega_c fixes the emitter-cavity offset, so the
    emitter detuning is delta_n = omega_n_minus_omega_c + delta_c (both
    drives share one frequency).
    """

    gamma: float = 1.0
    kappa: float = 1.62e6
    g_c: float = 502.0
    n_emitters: int = 100
    omega_n_minus_omega_c: float = 50.0
    delta_c: float = 0.0
    omega_rabi: float = 0.0
    epsilon_drive: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ModelError(f"gamma must be positive, got {self.gamma}")
        if self.kappa <= 0:
            raise ModelError(f"kappa must be positive, got {self.kappa}")
        if int(self.n_emitters) != self.n_emitters or self.n_emitters < 1:
            raise ModelError(
                f"n_emitters must be a positive integer, got {self.n_emitters}")
        if not 0.0 <= self.eta <= 1.0:
            raise ModelError(f"eta must lie in [0, 1], got {self.eta}")

    @property
    def delta_phi(self) -> float:
        return self.phi1 - self.phi2

    @property
    def delta_n(self) -> float:
        return self.omega_n_minus_omega_c + self.delta_c

    def bad_cavity_ok(self) -> bool:
        n = self.n_emitters
        return self.kappa > max(math.sqrt(n) * self.g_c, n * self.gamma)

    def eta_admissible(self) -> bool:
        """Collective decay stays non-negative iff eta <= 1/sqrt(N)."""
        return self.eta * math.sqrt(self.n_emitters) <= 1.0 + 1e-12


def displacement_alpha(params: PhysicalParams) -> complex:
    """Coherent cavity displacement alpha = eps / (Delta_c - i kappa/2)."""
    return params.epsilon_drive / complex(params.delta_c, -0.5 * params.kappa)


def dipole_shift(params: PhysicalParams) -> float:
    """Per-emitter dipole-dipole shift delta_c induced by the lossy mode."""
    g, k, e = params.g_c, params.kappa, params.eta
    num = params.delta_c * (g * g - k * params.gamma * e * e / 4.0) \
        + e * g * k * math.sqrt(k * params.gamma) / 2.0
    den = (k / 2.0) ** 2 + params.delta_c ** 2
    return num / den


def collective_decay_rate(params: PhysicalParams) -> float:
    """Cavity-mediated contribution gamma_c to the collective decay rate."""
    g, k, e = params.g_c, params.kappa, params.eta
    num = k * (g * g - k * params.gamma * e * e / 4.0) \
        - 2.0 * e * g * params.delta_c * math.sqrt(k * params.gamma)
    den = (k / 2.0) ** 2 + params.delta_c ** 2
    return num / den


def single_emitter_rate(params: PhysicalParams) -> float:
    """Modified single-emitter decay rate gamma_s = gamma + gamma_c.

    Reduces to the Purcell enhancement at eta = 0 and to the perfect-square
    form (g_c sqrt(kappa) - Delta_c sqrt(gamma))^2 / ((kappa/2)^2 + Delta_c^2)
    at eta = 1, which vanishes at Delta_c = g_c sqrt(kappa/gamma).
    """
    return params.gamma + collective_decay_rate(params)


def effective_drive(params: PhysicalParams) -> complex:
    """Effective drive G = Omega - eps_bar seen by the emitters.

    eps_bar = eps (g_c_bar - i gamma_bar/2) / (Delta_c - i kappa/2), with the
    phase difference of the two drives attached to g_c_bar and gamma_bar.
    """
    phase = cmath.exp(1j * params.delta_phi)
    g_bar = params.g_c * phase
    gamma_bar = params.eta * math.sqrt(params.gamma * params.kappa) * phase
    eps_bar = params.epsilon_drive * (g_bar - 0.5j * gamma_bar) \
        / complex(params.delta_c, -0.5 * params.kappa)
    return params.omega_rabi - eps_bar


def effective_drive_sq(params: PhysicalParams) -> float:
    """|G|^2 via the expanded trigonometric form (independent route).

    Must agree with |effective_drive(params)|^2 to rounding; kept separate
    as a cross-check of the phase conventions.
    """
    om, ep, g = params.omega_rabi, params.epsilon_drive, params.g_c
    k, e, dc = params.kappa, params.eta, params.delta_c
    s = math.sqrt(params.gamma * params.kappa)
    dphi = params.delta_phi
    out = om * om + ep * ep * (g * g + e * e * params.gamma * k / 4.0) \
        / (dc * dc + k * k / 4.0)
    out += (2.0 * ep * om / (k * k + (2.0 * dc) ** 2)) * (
        2.0 * (k * g - e * dc * s) * math.sin(dphi)
        - (k * e * s + 4.0 * g * dc) * math.cos(dphi))
    return out


@dataclass(frozen=True)
class EffectiveModel:
    """Every derived coefficient of the emitter-only master equation.

    theta and bar_gamma_param are None when bar_delta == 0; that parameter
    point belongs to the Kerr-free (appendix) branch of the analytic solver,
    flagged by appendix_branch.
    """

    params: PhysicalParams
    delta_n: float
    alpha: complex
    delta_c_shift: float
    gamma_c: float
    gamma_s: float
    g_eff: complex
    g_eff_sq: float
    bar_delta: float
    big_gamma: float
    gamma0: float
    bar_delta_n: float
    bar_omega: complex
    tilde_omega: complex
    p_param: float
    theta: complex | None
    bar_gamma_param: complex | None
    appendix_branch: bool

    @property
    def n_emitters(self) -> int:
        return self.params.n_emitters


def build_effective_model(params: PhysicalParams,
                          warn_bad_cavity: bool = True) -> EffectiveModel:
    """Populate every EffectiveModel field consistently.

    Raises ModelError when eta > 1/sqrt(N): the collective decay rate
    Gamma = gamma + N gamma_c can then turn negative somewhere in the sweep
    and the bosonic solvers lose meaning.
    """
    if not params.eta_admissible():
        raise ModelError(
            f"eta = {params.eta} exceeds 1/sqrt(N) = "
            f"{1.0 / math.sqrt(params.n_emitters):.6g}; the collective decay "
            "rate Gamma = gamma + N*gamma_c is not guaranteed non-negative")
    if warn_bad_cavity and not params.bad_cavity_ok():
        warnings.warn(
            "kappa <= max(sqrt(N) g_c, N gamma): cavity elimination is not "
            "justified for these parameters", BadCavityWarning, stacklevel=2)

    n = params.n_emitters
    sqrt_n = math.sqrt(n)
    d_shift = dipole_shift(params)
    g_c_rate = collective_decay_rate(params)
    g = effective_drive(params)
    big_gamma = params.gamma + n * g_c_rate
    if big_gamma < 0:
        raise ModelError(
            f"negative collective decay Gamma = {big_gamma:.6g} at "
            f"delta_c = {params.delta_c:.6g}; requires eta <= 1/sqrt(N)")
    gamma0 = big_gamma / n
    big_gamma = gamma0 * n  # 1-ulp renormalization: gamma0 * N == Gamma holds
    bar_delta = -d_shift
    bar_delta_n = params.delta_n - n * d_shift
    bar_omega = sqrt_n * g
    tilde_omega = g / (2.0 * sqrt_n)

    if bar_delta == 0.0:
        p_param = math.inf if tilde_omega != 0 else 0.0
        theta = None
        bar_gamma = None
        appendix = True
    else:
        p_param = abs(tilde_omega) ** 2 / bar_delta ** 2
        bar_gamma = complex(big_gamma / 2.0,
                            bar_delta_n + 2.0 * bar_delta) / bar_delta
        theta = 1.0 + 2.0 * n - p_param + 1j * bar_gamma
        appendix = False

    return EffectiveModel(
        params=params,
        delta_n=params.delta_n,
        alpha=displacement_alpha(params),
        delta_c_shift=d_shift,
        gamma_c=g_c_rate,
        gamma_s=single_emitter_rate(params),
        g_eff=g,
        g_eff_sq=abs(g) ** 2,
        bar_delta=bar_delta,
        big_gamma=big_gamma,
        gamma0=gamma0,
        bar_delta_n=bar_delta_n,
        bar_omega=bar_omega,
        tilde_omega=tilde_omega,
        p_param=p_param,
        theta=theta,
        bar_gamma_param=bar_gamma,
        appendix_branch=appendix,
    )


def with_updates(params: PhysicalParams, **kwargs) -> PhysicalParams:
    """Functional update helper used by sweeps."""
    return replace(params, **kwargs)
