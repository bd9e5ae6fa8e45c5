# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled integrator kernel.

Algorithmic twin of ``_kernels_py``: same tableau, same PI controller
constants, same event handling, same return convention.  Any change
here must be mirrored there; the backend-consistency tests compare the
two step for step.
"""

from libc.math cimport fabs, fmax, fmin, isfinite, sqrt, INFINITY, NAN

import numpy as np

BACKEND_NAME = "compiled"

TERM_HORIZON = 0
TERM_BLOWUP = 1
TERM_UNDERFLOW = 2

# Dormand-Prince 5(4) tableau (row-packed lower triangle) and the
# difference between 5th- and 4th-order weights.
cdef double _A[7][6]
cdef double _E[7]

_A[1][0] = 0.2
_A[2][0] = 3.0 / 40.0;        _A[2][1] = 9.0 / 40.0
_A[3][0] = 44.0 / 45.0;       _A[3][1] = -56.0 / 15.0;      _A[3][2] = 32.0 / 9.0
_A[4][0] = 19372.0 / 6561.0;  _A[4][1] = -25360.0 / 2187.0; _A[4][2] = 64448.0 / 6561.0
_A[4][3] = -212.0 / 729.0
_A[5][0] = 9017.0 / 3168.0;   _A[5][1] = -355.0 / 33.0;     _A[5][2] = 46732.0 / 5247.0
_A[5][3] = 49.0 / 176.0;      _A[5][4] = -5103.0 / 18656.0
_A[6][0] = 35.0 / 384.0;      _A[6][1] = 0.0;               _A[6][2] = 500.0 / 1113.0
_A[6][3] = 125.0 / 192.0;     _A[6][4] = -2187.0 / 6784.0;  _A[6][5] = 11.0 / 84.0

_E[0] = 71.0 / 57600.0
_E[1] = 0.0
_E[2] = -71.0 / 16695.0
_E[3] = 71.0 / 1920.0
_E[4] = -17253.0 / 339200.0
_E[5] = 22.0 / 525.0
_E[6] = -1.0 / 40.0

cdef double _SAFETY = 0.9
cdef double _BETA = 0.04
cdef double _EXPO1 = 0.2 - 0.75 * 0.04
cdef double _FAC_MIN = 0.2
cdef double _FAC_MAX = 10.0


cdef inline void _eval_rhs(int sys_id, double* y, double kappa, double n,
                           double c0, double* out) noexcept nogil:
    cdef double a, b, p, q, mu, nu, tr, tor, w, v, v3
    if sys_id == 0 or sys_id == 1:
        a = y[0]; b = y[1]
        out[0] = -a * a - kappa * b
        out[1] = a * (1.0 - b)
    elif sys_id == 2:
        p = y[0]; q = y[1]; mu = y[2]; nu = y[3]; tr = y[4]; tor = y[5]
        out[0] = -p * p - kappa * mu + 2.0 * tr * tor - tor * tor
        out[1] = -q * q - kappa * nu + tor * tor
        out[2] = p * (1.0 - mu)
        out[3] = q * (1.0 - nu)
        out[4] = -(p + q) * tr - (p - q) * tor
        out[5] = -2.0 * q * tor
    elif sys_id == 3:
        q = y[0]; nu = y[1]
        out[0] = -q * q - kappa * nu
        out[1] = q * (1.0 - n * nu)
    elif sys_id == 4:
        w = y[0]; v = y[1]
        if c0 == 0.0:
            out[0] = kappa * (1.0 - v)
        else:
            v3 = v * v * v
            out[0] = kappa * (1.0 - v) + c0 * c0 / v3 if v3 != 0.0 else INFINITY
        out[1] = w
    else:  # sys_id == 5
        q = y[0]; nu = y[1]; tor = y[2]
        out[0] = -q * q - kappa * nu + tor * tor
        out[1] = q * (1.0 - nu)
        out[2] = -2.0 * q * tor


cdef inline bint _all_finite(double* v, int d) noexcept nogil:
    cdef int i
    for i in range(d):
        if not isfinite(v[i]):
            return False
    return True


cdef double _fit_pole_time(double* ring_t, double* ring_u, int n_ring) noexcept nogil:
    """Zero of the least-squares line through (t, 1/max|y|); NAN if the
    magnitude is not growing or fewer than two points are usable."""
    cdef double tb = 0.0, ub = 0.0, sxx = 0.0, sxy = 0.0, dt
    cdef int i, m = 0
    for i in range(n_ring):
        if ring_u[i] > 0.0:
            tb += ring_t[i]
            ub += ring_u[i]
            m += 1
    if m < 2:
        return NAN
    tb /= m
    ub /= m
    for i in range(n_ring):
        if ring_u[i] > 0.0:
            dt = ring_t[i] - tb
            sxx += dt * dt
            sxy += dt * (ring_u[i] - ub)
    if sxx <= 0.0:
        return NAN
    cdef double slope = sxy / sxx
    if slope >= 0.0:
        return NAN
    return tb - ub / slope


def integrate_kernel(
    int sys_id,
    y0,
    double kappa,
    double n,
    double c0,
    double rel_tol,
    double abs_tol,
    double max_step,
    double min_step,
    double blowup_magnitude,
    double horizon,
    bint record,
):
    """Adaptive integration of system sys_id from t=0 to the horizon.

    Returns (times, states, term_code, t_est); see the pure-Python twin
    for the full contract.
    """
    cdef int d = len(y0)
    cdef double y[6]
    cdef double ystart[6]
    cdef double ytmp[6]
    cdef double k[7][6]
    cdef int i, j, m_stage
    cdef double t = 0.0
    cdef double h, err, err_acc, e, sc, fac11, fac, hnew, mmag
    cdef double facold = 1e-4
    cdef bint last_rejected = False
    cdef bint clipped, bad_stage
    cdef double ring_t[3]
    cdef double ring_u[3]
    cdef int n_ring = 0
    cdef double est

    if d > 6:
        raise ValueError("kernel supports systems of dimension <= 6")
    for i in range(d):
        y[i] = float(y0[i])
        ystart[i] = y[i]

    times = [0.0]
    states = [tuple(y0)]

    _eval_rhs(sys_id, y, kappa, n, c0, k[0])
    if not _all_finite(k[0], d):
        return np.array(times), np.array(states), TERM_BLOWUP, 0.0

    mmag = 0.0
    for i in range(d):
        mmag = fmax(mmag, fabs(y[i]))
    if mmag > blowup_magnitude:
        return np.array(times), np.array(states), TERM_BLOWUP, 0.0
    if mmag > 0.0:
        ring_t[0] = 0.0
        ring_u[0] = 1.0 / mmag
        n_ring = 1

    # Initial step size (Hairer's heuristic).
    cdef double d0 = 0.0, d1 = 0.0, d2 = 0.0, h0, h1, dm
    for i in range(d):
        sc = abs_tol + rel_tol * fabs(y[i])
        d0 += (y[i] / sc) * (y[i] / sc)
        d1 += (k[0][i] / sc) * (k[0][i] / sc)
    d0 = sqrt(d0 / d)
    d1 = sqrt(d1 / d)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = fmin(fmin(h0, max_step), horizon)
    for i in range(d):
        ytmp[i] = y[i] + h0 * k[0][i]
    _eval_rhs(sys_id, ytmp, kappa, n, c0, k[1])
    if _all_finite(k[1], d):
        for i in range(d):
            sc = abs_tol + rel_tol * fabs(y[i])
            e = (k[1][i] - k[0][i]) / sc
            d2 += e * e
        d2 = sqrt(d2 / d) / h0
    else:
        d2 = 1.0 / h0
    dm = fmax(d1, d2)
    h1 = fmax(1e-6, h0 * 1e-3) if dm <= 1e-15 else (0.01 / dm) ** 0.2
    h = fmin(fmin(100.0 * h0, h1), fmin(max_step, horizon))

    while True:
        clipped = h >= horizon - t
        if clipped:
            h = horizon - t
        if h < min_step and not clipped:
            if not record:
                del times[1:-1]
                del states[1:-1]
            return np.array(times), np.array(states), TERM_UNDERFLOW, NAN

        bad_stage = False
        for m_stage in range(1, 7):
            for j in range(d):
                e = 0.0
                for i in range(m_stage):
                    e += _A[m_stage][i] * k[i][j]
                ytmp[j] = y[j] + h * e
            _eval_rhs(sys_id, ytmp, kappa, n, c0, k[m_stage])
            if not _all_finite(k[m_stage], d):
                bad_stage = True
                break
        if not bad_stage and not _all_finite(ytmp, d):
            bad_stage = True

        if bad_stage:
            if 0.1 * h < min_step:
                est = _fit_pole_time(ring_t, ring_u, n_ring)
                if not isfinite(est):
                    est = t + h
                est = fmax(est, t)
                if not record:
                    del times[1:-1]
                    del states[1:-1]
                return np.array(times), np.array(states), TERM_BLOWUP, est
            h *= 0.1
            last_rejected = True
            continue

        err_acc = 0.0
        for j in range(d):
            e = 0.0
            for i in range(7):
                e += _E[i] * k[i][j]
            e *= h
            sc = abs_tol + rel_tol * fmax(fabs(y[j]), fabs(ytmp[j]))
            err_acc += (e / sc) * (e / sc)
        err = sqrt(err_acc / d)

        if err <= 1.0:
            t = horizon if clipped else t + h
            mmag = 0.0
            for j in range(d):
                y[j] = ytmp[j]
                k[0][j] = k[6][j]
                mmag = fmax(mmag, fabs(y[j]))
            row = tuple([ytmp[j] for j in range(d)])
            times.append(t)
            states.append(row)
            if not record and len(times) > 2:
                del times[1]
                del states[1]
            if mmag > 0.0:
                if n_ring == 3:
                    ring_t[0] = ring_t[1]; ring_t[1] = ring_t[2]
                    ring_u[0] = ring_u[1]; ring_u[1] = ring_u[2]
                    n_ring = 2
                ring_t[n_ring] = t
                ring_u[n_ring] = 1.0 / mmag
                n_ring += 1
            if mmag > blowup_magnitude:
                est = _fit_pole_time(ring_t, ring_u, n_ring)
                if not isfinite(est):
                    est = t
                est = fmax(est, t)
                return np.array(times), np.array(states), TERM_BLOWUP, est
            if clipped:
                return np.array(times), np.array(states), TERM_HORIZON, NAN

            fac11 = err ** _EXPO1
            fac = fac11 / facold ** _BETA
            fac = fmax(1.0 / _FAC_MAX, fmin(1.0 / _FAC_MIN, fac / _SAFETY))
            hnew = h / fac
            facold = fmax(err, 1e-4)
            if last_rejected:
                hnew = fmin(hnew, h)
            last_rejected = False
            h = fmin(hnew, max_step)
        else:
            fac11 = err ** _EXPO1
            hnew = h / fmin(1.0 / _FAC_MIN, fac11 / _SAFETY)
            last_rejected = True
            if hnew < min_step:
                est = _fit_pole_time(ring_t, ring_u, n_ring)
                if not isfinite(est):
                    est = t + h
                est = fmax(est, t)
                if not record:
                    del times[1:-1]
                    del states[1:-1]
                return np.array(times), np.array(states), TERM_BLOWUP, est
            h = hnew
