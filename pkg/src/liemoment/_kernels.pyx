# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels; same interface as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport isfinite

cnp.import_array()

BACKEND = "cython"


cdef void _eval(const double[:] coef, const cnp.int64_t[:] owner, const cnp.int64_t[:] fstart,
                const cnp.int64_t[:] fvar, const cnp.int64_t[:] fpow, const double[:] y,
                double[:] out) noexcept nogil:
    cdef Py_ssize_t t, f, p, n_terms = coef.shape[0]
    cdef double m
    for t in range(out.shape[0]):
        out[t] = 0.0
    for t in range(n_terms):
        m = coef[t]
        for f in range(fstart[t], fstart[t + 1]):
            for p in range(fpow[f]):
                m *= y[fvar[f]]
        out[owner[t]] += m


def _factors(expo):
    expo = np.asarray(expo, dtype=np.int64)
    fstart = np.zeros(expo.shape[0] + 1, dtype=np.int64)
    fvar, fpow = [], []
    for t in range(expo.shape[0]):
        nz = np.nonzero(expo[t])[0]
        fvar.extend(nz.tolist())
        fpow.extend(expo[t, nz].tolist())
        fstart[t + 1] = len(fvar)
    return fstart, np.asarray(fvar, dtype=np.int64), np.asarray(fpow, dtype=np.int64)


def eval_system(coef, owner, expo, y, n_out):
    fstart, fvar, fpow = _factors(expo)
    out = np.zeros(n_out)
    _eval(np.ascontiguousarray(coef, dtype=np.float64), np.ascontiguousarray(owner, dtype=np.int64),
          fstart, fvar, fpow, np.ascontiguousarray(y, dtype=np.float64), out)
    return out


def eval_batch(coef, owner, expo, Y, n_out):
    fstart, fvar, fpow = _factors(expo)
    cdef double[:, :] Yv = np.ascontiguousarray(Y, dtype=np.float64)
    res = np.zeros((Yv.shape[0], n_out))
    cdef double[:, :] rv = res
    cdef const double[:] cv = np.ascontiguousarray(coef, dtype=np.float64)
    cdef const cnp.int64_t[:] ov = np.ascontiguousarray(owner, dtype=np.int64)
    cdef const cnp.int64_t[:] sv = fstart
    cdef const cnp.int64_t[:] vv = fvar
    cdef const cnp.int64_t[:] pv = fpow
    cdef Py_ssize_t r
    with nogil:
        for r in range(Yv.shape[0]):
            _eval(cv, ov, sv, vv, pv, Yv[r], rv[r])
    return res


def rk4(coef, owner, expo, y0, double dt, Py_ssize_t nsteps):
    fstart, fvar, fpow = _factors(expo)
    cdef const double[:] cv = np.ascontiguousarray(coef, dtype=np.float64)
    cdef const cnp.int64_t[:] ov = np.ascontiguousarray(owner, dtype=np.int64)
    cdef const cnp.int64_t[:] sv = fstart
    cdef const cnp.int64_t[:] vv = fvar
    cdef const cnp.int64_t[:] pv = fpow
    cdef Py_ssize_t n = y0.shape[0], s, i
    states = np.empty((nsteps + 1, n))
    cdef double[:, :] st = states
    cdef double[:] y = np.array(y0, dtype=np.float64)
    cdef double[:] tmp = np.empty(n)
    cdef double[:] k1 = np.empty(n)
    cdef double[:] k2 = np.empty(n)
    cdef double[:] k3 = np.empty(n)
    cdef double[:] k4 = np.empty(n)
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    cdef bint ok
    for i in range(n):
        st[0, i] = y[i]
    with nogil:
        for s in range(nsteps):
            _eval(cv, ov, sv, vv, pv, y, k1)
            for i in range(n):
                tmp[i] = y[i] + half * k1[i]
            _eval(cv, ov, sv, vv, pv, tmp, k2)
            for i in range(n):
                tmp[i] = y[i] + half * k2[i]
            _eval(cv, ov, sv, vv, pv, tmp, k3)
            for i in range(n):
                tmp[i] = y[i] + dt * k3[i]
            _eval(cv, ov, sv, vv, pv, tmp, k4)
            ok = True
            for i in range(n):
                y[i] = y[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                if not isfinite(y[i]):
                    ok = False
            if not ok:
                with gil:
                    return states, s + 1
            for i in range(n):
                st[s + 1, i] = y[i]
    return states, nsteps + 1
