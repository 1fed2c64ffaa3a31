# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of series_py: log-space series kernels.

Mirrors crosscav._kernels.series_py statement by statement; both backends
must agree to rounding.  Keep the two files in sync.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, exp, floor, isfinite, lgamma, log, sin, sqrt

from scipy.special.cython_special cimport loggamma as _cloggamma

cnp.import_array()

cdef extern from "complex.h":
    double complex csqrt_c "csqrt"(double complex) nogil

cdef int WEIGHT_GUARD = 5
cdef double TOL_1F1_C = 1e-14
cdef int MAX_TERMS_1F1_C = 100000
cdef double LN10_16 = 36.841361487904734  # 16 ln 10
cdef double NEG_HUGE = -1e308

TOL_1F1 = TOL_1F1_C
MAX_TERMS_1F1 = MAX_TERMS_1F1_C


cdef inline double _cabs(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline double _cphase(double complex z) nogil:
    return atan2(z.imag, z.real)


cdef inline double complex _cexp_unit(double phi) nogil:
    cdef double complex out
    out.real = cos(phi)
    out.imag = sin(phi)
    return out


cdef inline bint _is_nonpos_int(double complex x) nogil:
    return x.imag == 0.0 and x.real == floor(x.real) and x.real <= 0.0


cdef int _hyp1f1_core(double complex a, double complex b, double complex z,
                      double rtol, int max_terms,
                      double *out_logmag, double *out_phase,
                      int *out_terms, double *out_ratio) nogil:
    cdef double scale = 0.0
    cdef double complex acc = 1.0
    cdef double complex term = 1.0
    cdef double ratio = 1e308
    cdef int consec = 0
    cdef int k = 0
    cdef double am, tm, m, lm, f
    if _is_nonpos_int(b) and not (_is_nonpos_int(a) and a.real > b.real):
        out_logmag[0] = 0.0
        out_phase[0] = 0.0
        out_terms[0] = 0
        out_ratio[0] = 1e308
        return 2
    while k < max_terms:
        term = term * ((a + k) / (b + k)) * (z / (k + 1.0))
        k += 1
        if term == 0:
            ratio = 0.0
            consec = 3
            break
        acc = acc + term
        am = _cabs(acc)
        tm = _cabs(term)
        ratio = 1e308 if am == 0.0 else tm / am
        if ratio < rtol:
            consec += 1
            if consec >= 3:
                break
        else:
            consec = 0
        m = am if am > tm else tm
        if m > 1e120 or (0.0 < m < 1e-120):
            lm = log(m)
            scale += lm
            f = exp(-lm)
            acc = acc * f
            term = term * f
    out_terms[0] = k
    out_ratio[0] = ratio
    if acc == 0:
        out_logmag[0] = NEG_HUGE
        out_phase[0] = 0.0
    else:
        out_logmag[0] = scale + log(_cabs(acc))
        out_phase[0] = _cphase(acc)
    return 0 if consec >= 3 else 1


def hyp1f1_log(a, b, z, double rtol=TOL_1F1_C, int max_terms=MAX_TERMS_1F1_C):
    """Kummer series in log space; see series_py.hyp1f1_log."""
    cdef double complex ca = a
    cdef double complex cb = b
    cdef double complex cz = z
    cdef double logmag = 0.0, phase = 0.0, ratio = 0.0
    cdef int terms = 0
    cdef int status = _hyp1f1_core(ca, cb, cz, rtol, max_terms,
                                   &logmag, &phase, &terms, &ratio)
    out_logmag = float("-inf") if logmag <= -1e307 else logmag
    out_ratio = float("inf") if ratio >= 1e307 else ratio
    return (out_logmag, phase, terms, out_ratio, status)


def main_moments(theta, double p, int two_n,
                 double rtol=TOL_1F1_C, int max_terms=MAX_TERMS_1F1_C):
    """Main-branch moment sums; see series_py.main_moments."""
    cdef double complex ctheta = theta
    cdef double complex lb = (_cloggamma(ctheta + 1.0)
                              - lgamma(two_n + 1.0)
                              - _cloggamma(ctheta - two_n + 1.0))
    cdef bint have_lp2 = p > 0.0
    cdef double lp2 = log(2.0 * p) if have_lp2 else NEG_HUGE

    cdef double wref = 0.0
    cdef bint started = False
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0
    cdef double complex sb = 0.0
    cdef double lnfact = 0.0
    cdef double lnfact_prev = 0.0
    cdef double li_mag_prev = 0.0
    cdef double li_ph_prev = 0.0
    cdef double wmax = NEG_HUGE
    cdef int below = 0
    cdef double resid = 0.0
    cdef int n_used = 0

    cdef int n, m_left, st, terms
    cdef double lm1 = 0.0, ph1 = 0.0, ratio = 0.0
    cdef double li_mag, li_ph, lw, e, fsc, lwb
    cdef double complex den
    cdef double mean, m2
    cdef double complex amp

    for n in range(two_n + 1):
        m_left = two_n - n
        if n > 0:
            den = ctheta - m_left
            if den == 0:
                return (2, n, 0.0, 0.0, 0.0, 0.0, 0.0, n, float("inf"))
            lb.real += log((m_left + 1.0) / _cabs(den))
            lb.imag -= _cphase(den)
            lnfact_prev = lnfact
            lnfact += log(n)
        st = _hyp1f1_core(1.0 + ctheta, 1.0 + ctheta - m_left, p,
                          rtol, max_terms, &lm1, &ph1, &terms, &ratio)
        if st:
            return (st, n, 0.0, 0.0, 0.0, 0.0, 0.0, n, float("inf"))
        li_mag = lb.real + lm1
        li_ph = lb.imag + ph1
        if n == 0:
            lw = 2.0 * li_mag
        elif have_lp2:
            lw = n * lp2 - lnfact + 2.0 * li_mag
        else:
            lw = NEG_HUGE
        if (not have_lp2) and n > 1:
            break
        if (not started) and lw > -1e307:
            wref = lw
            started = True
        if started and lw > wref + 40.0:
            fsc = exp(wref - lw)
            s0 *= fsc
            s1 *= fsc
            s2 *= fsc
            sb = sb * fsc
            wref = lw
        if started and lw > -1e307:
            e = exp(lw - wref)
            s0 += e
            s1 += n * e
            s2 += n * (n - 1.0) * e
        if n > 0 and started:
            if n == 1:
                lwb = -lnfact_prev + li_mag + li_mag_prev
            elif have_lp2:
                lwb = (n - 1.0) * lp2 - lnfact_prev + li_mag + li_mag_prev
            else:
                lwb = NEG_HUGE
            if lwb > -1e307:
                sb = sb + exp(lwb - wref) * _cexp_unit(li_ph - li_ph_prev)
        li_mag_prev = li_mag
        li_ph_prev = li_ph
        n_used = n + 1
        if lw > wmax:
            wmax = lw
        resid = exp(lw - wmax) if lw > -1e307 else 0.0
        if lw < wmax - LN10_16:
            below += 1
            if below >= WEIGHT_GUARD:
                break
        else:
            below = 0

    if s0 <= 0.0 or not isfinite(s0):
        return (3, -1, 0.0, 0.0, 0.0, 0.0, 0.0, n_used, float("inf"))
    mean = s1 / (2.0 * s0)
    m2 = s2 / (4.0 * s0)
    amp = sb / s0
    return (0, -1, wref + log(s0), mean, m2, amp.real, amp.imag,
            n_used, resid)


def appendix_moments(f, gamma_t, int two_n,
                     double rtol=TOL_1F1_C, int max_terms=MAX_TERMS_1F1_C):
    """Kerr-free-branch moment sums; see series_py.appendix_moments."""
    cdef double complex cf = f
    cdef double complex cgt = gamma_t
    cdef double complex s = csqrt_c(-cf)
    cdef double complex x = -cgt / (2.0 * s)
    cdef double ls_re = log(_cabs(s))
    cdef double ls_im = _cphase(s)
    cdef double ln2 = log(2.0)

    cdef cnp.ndarray[cnp.float64_t, ndim=1] lj_mag_arr = \
        np.zeros(two_n + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lj_ph_arr = \
        np.zeros(two_n + 1, dtype=np.float64)
    cdef double[:] lj_mag = lj_mag_arr
    cdef double[:] lj_ph = lj_ph_arr

    cdef double e_prev = 0.0
    cdef double complex c_prev = 0.0
    cdef double e_cur = 0.0
    cdef double complex c_cur = 1.0
    cdef double lfact = 0.0
    cdef int m_idx, n
    cdef double complex h_next
    cdef double e_next, am, d

    for m_idx in range(two_n + 1):
        n = two_n - m_idx
        if m_idx > 0:
            lfact += log(m_idx)
        if c_cur == 0:
            lj_mag[n] = NEG_HUGE
            lj_ph[n] = 0.0
        else:
            lj_mag[n] = m_idx * ls_re + e_cur + log(_cabs(c_cur)) - lfact
            lj_ph[n] = m_idx * ls_im + _cphase(c_cur)
        if m_idx == 0:
            h_next = 2.0 * x * c_cur
            e_next = e_cur
        else:
            d = e_prev - e_cur
            h_next = 2.0 * x * c_cur - 2.0 * m_idx * c_prev * exp(d)
            e_next = e_cur
        e_prev = e_cur
        c_prev = c_cur
        if h_next != 0:
            am = _cabs(h_next)
            e_next += log(am)
            h_next = h_next / am
        e_cur = e_next
        c_cur = h_next

    cdef double wref = 0.0
    cdef bint started = False
    cdef double s_den = 0.0, s_mean = 0.0, s_m2 = 0.0
    cdef double complex s_amp = 0.0
    cdef double lnfact = 0.0
    cdef double wmax = NEG_HUGE
    cdef int below = 0
    cdef double resid = 0.0
    cdef int n_used = 0
    cdef double lw_base, lv, fac, lm, la, l2
    cdef double mean, m2
    cdef double complex amp

    for n in range(two_n + 1):
        if n > 0:
            lnfact += log(n)
        lw_base = n * ln2 - lnfact
        lv = lw_base + 2.0 * lj_mag[n] if lj_mag[n] > -1e307 else NEG_HUGE
        if (not started) and lv > -1e307:
            wref = lv
            started = True
        if started and lv > wref + 40.0:
            fac = exp(wref - lv)
            s_den *= fac
            s_mean *= fac
            s_m2 *= fac
            s_amp = s_amp * fac
            wref = lv
        if started:
            if lv > -1e307:
                s_den += exp(lv - wref)
            if n + 1 <= two_n and lj_mag[n + 1] > -1e307:
                lm = lw_base + 2.0 * lj_mag[n + 1]
                s_mean += exp(lm - wref)
                if lj_mag[n] > -1e307:
                    la = lw_base + lj_mag[n + 1] + lj_mag[n]
                    s_amp = s_amp + exp(la - wref) * _cexp_unit(
                        lj_ph[n + 1] - lj_ph[n])
            if n + 2 <= two_n and lj_mag[n + 2] > -1e307:
                l2 = lw_base + 2.0 * lj_mag[n + 2]
                s_m2 += exp(l2 - wref)
        n_used = n + 1
        if lv > wmax:
            wmax = lv
        resid = exp(lv - wmax) if lv > -1e307 else 0.0
        if lv < wmax - LN10_16:
            below += 1
            if below >= WEIGHT_GUARD:
                break
        else:
            below = 0

    if s_den <= 0.0 or not isfinite(s_den):
        return (3, 0.0, 0.0, 0.0, 0.0, 0.0, n_used, float("inf"))
    mean = s_mean / s_den
    m2 = s_m2 / s_den
    amp = s_amp / s_den
    return (0, wref + log(s_den), mean, m2, amp.real, amp.imag,
            n_used, resid)
