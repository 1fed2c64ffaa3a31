"""Closed-form steady-state observables of the effective bosonic model.

Three branches:

* MainSeries -- the exact generalized-P steady state for bar_delta != 0,
  summed as weights (2p)^n/n! |I_n|^2 with
  I_n = binom(Theta, 2N-n) 1F1(1+Theta, 1+Theta+n-2N; p).
* AppendixA -- the Kerr-free limit used when bar_delta is (numerically)
  negligible; the Kummer series above needs ~p terms and p = |W/bar_delta|^2
  diverges as bar_delta -> 0, so the solver hands over to this branch once
  p exceeds P_SWITCH.  See docs/appendix_a_moments.md for the moment
  formulas.
* LinearLimit -- the drive-saturation closed forms with g2 identically 1.
  Note these carry no dependence on the collective detuning; they are the
  reference against which nonlinearity (g2 != 1) is measured.

The sums are evaluated by the backend kernels (compiled when available).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from enum import Enum

from ._kernels import MAX_TERMS_1F1, TOL_1F1, appendix_moments, main_moments
from .logcomplex import LogComplex
from .model import EffectiveModel
from .specfun import GammaPoleError, Hyp1f1ConvergenceError, complex_binomial, kummer_1f1

# Hand-over point between the two series branches, in terms of
# p = |tilde_omega / bar_delta|^2.  The main-branch Kummer series needs of
# order p terms, so feasibility (term cap 1e5) bounds p from above; at
# p = 4e4 the neglected Kerr shift is already far below the 0.1% continuity
# requirement for every regime of interest.
P_SWITCH = 4.0e4

WEAK_EXCITATION_FRACTION = 0.1


class SeriesPoleError(RuntimeError):
    """1F1 pole in the main series at a specific summation index."""

    def __init__(self, n: int, message: str):
        self.n = n
        super().__init__(message)


class WeakExcitationWarning(UserWarning):
    """Mean excitation per emitter beyond the weak-excitation regime."""


class Branch(str, Enum):
    MAIN_SERIES = "main_series"
    APPENDIX_A = "appendix_a"
    LINEAR_LIMIT = "linear_limit"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class Observables:
    """Steady-state moments plus evaluation metadata."""

    mean_excitation: float
    amplitude: complex
    second_moment: float
    g2: float
    branch: Branch
    terms_used: int
    truncation_residual: float


def _g2_of(mean: float, m2: float) -> float:
    return m2 / (mean * mean) if mean > 1e-300 else math.nan


def _monitor_excitation(mean: float, n_emitters: int) -> None:
    if mean / n_emitters > WEAK_EXCITATION_FRACTION:
        warnings.warn(
            f"mean excitation per emitter {mean / n_emitters:.3g} exceeds "
            f"{WEAK_EXCITATION_FRACTION}; the bosonic weak-excitation "
            "expansion is strained", WeakExcitationWarning, stacklevel=3)


def series_in(model: EffectiveModel, n: int) -> LogComplex:
    """Series coefficient I_n = binom(Theta, 2N-n) 1F1(1+Theta, 1+Theta+n-2N; p)."""
    if model.appendix_branch:
        raise ValueError(
            "series_in is defined on the main branch only (bar_delta != 0)")
    two_n = 2 * model.n_emitters
    if not 0 <= n <= two_n:
        raise ValueError(f"n must lie in [0, {two_n}], got {n}")
    theta = model.theta
    try:
        f11 = kummer_1f1(1.0 + theta, 1.0 + theta + n - two_n, model.p_param)
    except (GammaPoleError, Hyp1f1ConvergenceError) as err:
        raise SeriesPoleError(
            n, f"I_n evaluation failed at n = {n}: {err}") from err
    return complex_binomial(theta, two_n - n) * f11


def steady_observables(model: EffectiveModel,
                       rtol: float = TOL_1F1,
                       max_terms: int = MAX_TERMS_1F1) -> Observables:
    """Main-branch moments; requires bar_delta != 0 and feasible p."""
    if model.appendix_branch:
        raise ValueError(
            "main series requires bar_delta != 0; use appendix_a_observables")
    if model.g_eff == 0:
        return Observables(0.0, 0.0 + 0.0j, 0.0, math.nan,
                           Branch.MAIN_SERIES, 1, 0.0)
    two_n = 2 * model.n_emitters
    status, err_n, logz, mean, m2, amp_re, amp_im, n_used, resid = \
        main_moments(model.theta, model.p_param, two_n, rtol, max_terms)
    if status == 2:
        raise SeriesPoleError(
            err_n, f"1F1 pole in I_n at n = {err_n}: second parameter "
            "1+Theta+n-2N hit a non-positive integer")
    if status == 1:
        raise RuntimeError(
            f"main series did not converge at n = {err_n} within "
            f"{max_terms} terms (p = {model.p_param:.6g}); the point "
            "belongs to the Kerr-free branch")
    if status != 0 or not math.isfinite(logz):
        raise RuntimeError(
            f"main-series normalization degenerate (status {status}, "
            f"log Z = {logz})")
    amp = (model.tilde_omega / model.bar_delta) * complex(amp_re, amp_im)
    _monitor_excitation(mean, model.n_emitters)
    return Observables(mean, amp, m2, _g2_of(mean, m2),
                       Branch.MAIN_SERIES, n_used, resid)


def appendix_a_observables(model: EffectiveModel,
                           rtol: float = TOL_1F1,
                           max_terms: int = MAX_TERMS_1F1) -> Observables:
    """Kerr-free branch moments (valid for negligible bar_delta)."""
    if model.g_eff == 0:
        # undriven: steady state is the vacuum
        return Observables(0.0, 0.0 + 0.0j, 0.0, math.nan,
                           Branch.APPENDIX_A, 1, 0.0)
    tom = model.tilde_omega
    f = tom.conjugate() / (2.0 * tom)
    gamma_t = complex(model.bar_delta_n, -0.5 * model.big_gamma) / tom
    two_n = 2 * model.n_emitters
    status, logz, mean, m2, amp_re, amp_im, n_used, resid = \
        appendix_moments(f, gamma_t, two_n, rtol, max_terms)
    if status != 0 or not math.isfinite(logz):
        raise RuntimeError(
            f"appendix-branch evaluation degenerate (status {status}, "
            f"log Z = {logz})")
    _monitor_excitation(mean, model.n_emitters)
    return Observables(mean, complex(amp_re, amp_im), m2,
                       _g2_of(mean, m2), Branch.APPENDIX_A, n_used, resid)


def linear_limit_observables(model: EffectiveModel) -> Observables:
    """Saturation closed forms with Poissonian statistics (g2 = 1).

    The amplitude has no closed form in this branch and is reported as nan.
    """
    n = model.n_emitters
    ng2 = n * model.g_eff_sq
    den = (0.5 * model.big_gamma) ** 2 + ng2
    mean = ng2 / den if den > 0 else 0.0
    m2 = mean * mean
    g2 = 1.0
    if model.g_eff == 0:
        g2 = math.nan
    return Observables(mean, complex(math.nan, math.nan), m2, g2,
                       Branch.LINEAR_LIMIT, 0, 0.0)


def select_branch(model: EffectiveModel, p_switch: float = P_SWITCH) -> Branch:
    """MainSeries when the series is evaluable, AppendixA otherwise."""
    if model.appendix_branch:
        return Branch.APPENDIX_A
    if model.p_param > p_switch:
        return Branch.APPENDIX_A
    return Branch.MAIN_SERIES


def observables_auto(model: EffectiveModel,
                     p_switch: float = P_SWITCH) -> Observables:
    """Automatic branch selection between the two series solutions."""
    if select_branch(model, p_switch) is Branch.APPENDIX_A:
        return appendix_a_observables(model)
    return steady_observables(model)
