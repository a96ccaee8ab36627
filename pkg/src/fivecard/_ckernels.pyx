# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernel; same stream and counts as ``_kernels_py``."""
import numpy as np

from libc.stdint cimport uint64_t, int64_t


cdef inline uint64_t rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline double next_uniform(uint64_t* s) nogil:
    cdef uint64_t result = rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = rotl(s[3], 45)
    return <double>(result >> 11) * (1.0 / 9007199254740992.0)


cdef inline Py_ssize_t pick(const double[::1] cdf, double u) nogil:
    # first index whose cdf value is strictly above u
    cdef Py_ssize_t j = 0
    cdef Py_ssize_t n = cdf.shape[0]
    while j < n - 1 and cdf[j] <= u:
        j += 1
    return j


def sample_joint_counts(states, Py_ssize_t n_samples, prior_cdf, step_cdf, Py_ssize_t n_steps):
    cdef uint64_t[:, ::1] st = np.array(states, dtype=np.uint64, order="C")
    cdef const double[::1] pcdf = np.ascontiguousarray(prior_cdf, dtype=np.float64)
    cdef const double[::1] scdf = np.ascontiguousarray(step_cdf, dtype=np.float64)
    cdef Py_ssize_t n_lanes = st.shape[0]
    cdef Py_ssize_t m = pcdf.shape[0]
    out = np.zeros((m, 5), dtype=np.int64)
    cdef int64_t[:, ::1] counts = out
    cdef Py_ssize_t lane, k, per_lane, step, init
    cdef Py_ssize_t shift
    cdef uint64_t s[4]
    with nogil:
        for lane in range(n_lanes):
            per_lane = n_samples // n_lanes + (1 if lane < n_samples % n_lanes else 0)
            s[0] = st[lane, 0]
            s[1] = st[lane, 1]
            s[2] = st[lane, 2]
            s[3] = st[lane, 3]
            for k in range(per_lane):
                init = pick(pcdf, next_uniform(s))
                shift = 0
                for step in range(n_steps):
                    shift += pick(scdf, next_uniform(s))
                counts[init, shift % 5] += 1
    return out
