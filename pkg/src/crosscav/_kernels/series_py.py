"""Pure-Python series kernels (fallback backend).

Hot loops of the analytic steady-state solver: the complex-parameter Kummer
series and the two moment accumulators.  Everything is scalar log-space
arithmetic; the compiled twin in _series_cy.pyx mirrors this file statement
by statement so that both backends agree to rounding.

Status codes shared by both backends:
    0  converged
    1  series hit the term cap without converging
    2  pole in the second Kummer parameter
    3  degenerate accumulation (all weights vanished)
"""

from __future__ import annotations

import cmath
import math

from scipy.special import loggamma as _cloggamma

TOL_1F1 = 1e-14
MAX_TERMS_1F1 = 100_000

_LN10_16 = 16.0 * math.log(10.0)
_WEIGHT_GUARD = 5  # consecutive negligible terms before stopping an n-sum


def _is_nonpos_int(x: complex) -> bool:
    return x.imag == 0.0 and x.real == math.floor(x.real) and x.real <= 0.0


def hyp1f1_log(a: complex, b: complex, z: complex,
               rtol: float = TOL_1F1, max_terms: int = MAX_TERMS_1F1):
    """Kummer series sum_k (a)_k/(b)_k z^k/k! accumulated in log space.

    Returns (log_magnitude, phase, terms_used, last_ratio, status).
    """
    a = complex(a)
    b = complex(b)
    z = complex(z)
    if _is_nonpos_int(b) and not (_is_nonpos_int(a) and a.real > b.real):
        return (0.0, 0.0, 0, math.inf, 2)

    scale = 0.0          # accumulator = acc * exp(scale)
    acc = 1.0 + 0.0j     # k = 0 term
    term = 1.0 + 0.0j
    ratio = math.inf
    consec = 0
    k = 0
    while k < max_terms:
        term *= (a + k) / (b + k) * z / (k + 1.0)
        k += 1
        if term == 0:
            ratio = 0.0
            consec = 3
            break
        acc += term
        am = abs(acc)
        tm = abs(term)
        ratio = math.inf if am == 0.0 else tm / am
        if ratio < rtol:
            consec += 1
            if consec >= 3:
                break
        else:
            consec = 0
        m = am if am > tm else tm
        if m > 1e120 or (0.0 < m < 1e-120):
            lm = math.log(m)
            scale += lm
            f = math.exp(-lm)
            acc *= f
            term *= f
    status = 0 if consec >= 3 else 1
    if acc == 0:
        return (-math.inf, 0.0, k, ratio, status)
    return (scale + math.log(abs(acc)), cmath.phase(acc), k, ratio, status)


def main_moments(theta: complex, p: float, two_n: int,
                 rtol: float = TOL_1F1, max_terms: int = MAX_TERMS_1F1):
    """Steady-state moment sums of the main-branch series solution.

    Accumulates, over n = 0..two_n with weights w_n = (2p)^n/n! |I_n|^2 and
    I_n = binom(theta, two_n - n) 1F1(1+theta, 1+theta+n-two_n; p):

        s0 = sum w_n          s1 = sum n w_n       s2 = sum n(n-1) w_n
        sb = sum (2p)^n/n! I_{n+1} conj(I_n)

    Returns (status, err_n, log_z, mean, m2, amp_re, amp_im, n_used, resid)
    where mean = s1/(2 s0), m2 = s2/(4 s0) and (amp_re, amp_im) = sb/s0;
    the caller multiplies the amplitude ratio by tilde_omega/bar_delta.
    """
    theta = complex(theta)
    two_n = int(two_n)
    # log binom(theta, M) at M = two_n, as a complex log (Re=log|.|, Im=arg)
    lb = (_cloggamma(theta + 1.0)
          - math.lgamma(two_n + 1.0)
          - _cloggamma(theta - two_n + 1.0))
    lp2 = math.log(2.0 * p) if p > 0.0 else -math.inf

    wref = 0.0
    started = False
    s0 = s1 = s2 = 0.0
    sb = 0.0 + 0.0j
    lnfact = 0.0        # log n!
    lnfact_prev = 0.0
    li_mag_prev = 0.0
    li_ph_prev = 0.0
    wmax = -math.inf
    below = 0
    resid = 0.0
    n_used = 0

    for n in range(two_n + 1):
        m_left = two_n - n
        if n > 0:
            den = theta - m_left
            if den == 0:
                return (2, n, 0.0, 0.0, 0.0, 0.0, 0.0, n, math.inf)
            lb += cmath.log((m_left + 1.0) / den)
            lnfact_prev = lnfact
            lnfact += math.log(n)
        lm1, ph1, _, _, st = hyp1f1_log(
            1.0 + theta, 1.0 + theta - m_left, p, rtol, max_terms)
        if st:
            return (st, n, 0.0, 0.0, 0.0, 0.0, 0.0, n, math.inf)
        li_mag = lb.real + lm1
        li_ph = lb.imag + ph1
        lw = 2.0 * li_mag if n == 0 else n * lp2 - lnfact + 2.0 * li_mag
        # p == 0: only the n = 0 weight survives, but the n = 0 amplitude
        # term (2p)^0 I_1 conj(I_0) still needs I_1, hence no early exit.
        if p == 0.0 and n > 1:
            break
        if not started and lw > -math.inf:
            wref = lw
            started = True
        if started and lw > wref + 40.0:
            f = math.exp(wref - lw)
            s0 *= f
            s1 *= f
            s2 *= f
            sb *= f
            wref = lw
        if started and lw > -math.inf:
            e = math.exp(lw - wref)
            s0 += e
            s1 += n * e
            s2 += n * (n - 1.0) * e
        if n > 0 and started:
            lwb = (0.0 if n == 1 else (n - 1.0) * lp2) - lnfact_prev \
                + li_mag + li_mag_prev
            if lwb > -math.inf:
                sb += math.exp(lwb - wref) * cmath.rect(1.0, li_ph - li_ph_prev)
        li_mag_prev = li_mag
        li_ph_prev = li_ph
        n_used = n + 1
        if lw > wmax:
            wmax = lw
        resid = math.exp(lw - wmax) if lw > -math.inf else 0.0
        if lw < wmax - _LN10_16:
            below += 1
            if below >= _WEIGHT_GUARD:
                break
        else:
            below = 0

    if s0 <= 0.0 or not math.isfinite(s0):
        return (3, -1, 0.0, 0.0, 0.0, 0.0, 0.0, n_used, math.inf)
    mean = s1 / (2.0 * s0)
    m2 = s2 / (4.0 * s0)
    amp = sb / s0
    return (0, -1, wref + math.log(s0), mean, m2, amp.real, amp.imag,
            n_used, resid)


def appendix_moments(f: complex, gamma_t: complex, two_n: int,
                     rtol: float = TOL_1F1, max_terms: int = MAX_TERMS_1F1):
    """Moment sums of the Kerr-free (small bar_delta) branch.

    The phase-space coefficients are residue sums
        J_n = s^M H_M(x) / M!,  M = two_n - n,
    with s = sqrt(-f), x = -gamma_t/(2 s) and H_M the Hermite polynomials,
    evaluated by the three-term recurrence in log scale (integer powers
    only, so the relative phases of consecutive J_n are unambiguous,
    unlike the equivalent closed form through the Tricomi function).
    Moments are the index-shifted ratios

        mean = sum_n u_n |J_{n+1}/J_n... (see below) / den
        den  = sum (2^n/n!) |J_n|^2
        mean num = sum (2^n/n!) |J_{n+1}|^2
        m2 num   = sum (2^n/n!) |J_{n+2}|^2
        amp num  = sum (2^n/n!) J_{n+1} conj(J_n)

    Returns (status, log_den, mean, m2, amp_re, amp_im, n_used, resid).
    """
    f = complex(f)
    gamma_t = complex(gamma_t)
    two_n = int(two_n)
    s = cmath.sqrt(-f)
    x = -gamma_t / (2.0 * s)
    ls = cmath.log(s)
    ln2 = math.log(2.0)

    # log-magnitude and phase of J_n for n = 0..two_n (index M = two_n - n)
    lj_mag = [0.0] * (two_n + 1)
    lj_ph = [0.0] * (two_n + 1)
    # Hermite recurrence H_{M+1} = 2x H_M - 2M H_{M-1}, carried as
    # c * exp(e) with |c| kept near 1.
    e_prev = 0.0
    c_prev = 0.0 + 0.0j       # H_{-1} placeholder
    e_cur = 0.0
    c_cur = 1.0 + 0.0j        # H_0 = 1
    lfact = 0.0               # log M!
    for m_idx in range(two_n + 1):
        n = two_n - m_idx
        if m_idx > 0:
            lfact += math.log(m_idx)
        if c_cur == 0:
            lj_mag[n] = -math.inf
            lj_ph[n] = 0.0
        else:
            lj_mag[n] = m_idx * ls.real + e_cur + math.log(abs(c_cur)) - lfact
            lj_ph[n] = m_idx * ls.imag + cmath.phase(c_cur)
        # advance recurrence to H_{M+1}
        if m_idx == 0:
            h_next = 2.0 * x * c_cur
            e_next = e_cur
        else:
            d = e_prev - e_cur
            h_next = 2.0 * x * c_cur - 2.0 * m_idx * c_prev * math.exp(d)
            e_next = e_cur
        e_prev, c_prev = e_cur, c_cur
        if h_next != 0:
            am = abs(h_next)
            e_next += math.log(am)
            h_next /= am
        e_cur, c_cur = e_next, h_next

    wref = 0.0
    started = False
    s_den = s_mean = s_m2 = 0.0
    s_amp = 0.0 + 0.0j
    lnfact = 0.0
    wmax = -math.inf
    below = 0
    resid = 0.0
    n_used = 0

    for n in range(two_n + 1):
        if n > 0:
            lnfact += math.log(n)
        lw_base = n * ln2 - lnfact
        lv = lw_base + 2.0 * lj_mag[n]
        if not started and lv > -math.inf:
            wref = lv
            started = True
        if started and lv > wref + 40.0:
            fac = math.exp(wref - lv)
            s_den *= fac
            s_mean *= fac
            s_m2 *= fac
            s_amp *= fac
            wref = lv
        if started:
            if lv > -math.inf:
                s_den += math.exp(lv - wref)
            if n + 1 <= two_n:
                lm = lw_base + 2.0 * lj_mag[n + 1]
                if lm > -math.inf:
                    s_mean += math.exp(lm - wref)
                la = lw_base + lj_mag[n + 1] + lj_mag[n]
                if la > -math.inf:
                    s_amp += math.exp(la - wref) * cmath.rect(
                        1.0, lj_ph[n + 1] - lj_ph[n])
            if n + 2 <= two_n:
                l2 = lw_base + 2.0 * lj_mag[n + 2]
                if l2 > -math.inf:
                    s_m2 += math.exp(l2 - wref)
        n_used = n + 1
        if lv > wmax:
            wmax = lv
        resid = math.exp(lv - wmax) if lv > -math.inf else 0.0
        if lv < wmax - _LN10_16:
            below += 1
            if below >= _WEIGHT_GUARD:
                break
        else:
            below = 0

    if s_den <= 0.0 or not math.isfinite(s_den):
        return (3, 0.0, 0.0, 0.0, 0.0, 0.0, n_used, math.inf)
    mean = s_mean / s_den
    m2 = s_m2 / s_den
    amp = s_amp / s_den
    return (0, wref + math.log(s_den), mean, m2, amp.real, amp.imag,
            n_used, resid)
