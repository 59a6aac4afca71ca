# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner-loop kernels for composite-state updates.

Signatures and layout conventions mirror ``cavityghz._kernels_py``; see that
module for the axis documentation.  These loops dominate the runtime of the
Monte Carlo shot sampler, where the per-call overhead of vectorized numpy
operations on small arrays adds up.
"""


def apply_two_level(double complex[::1] amps, Py_ssize_t pre, Py_ssize_t half,
                    double complex u00, double complex u01,
                    double complex u10, double complex u11):
    cdef Py_ssize_t p, j, base
    cdef double complex x, y
    for p in range(pre):
        base = 2 * half * p
        for j in range(half):
            x = amps[base + j]
            y = amps[base + half + j]
            amps[base + j] = u00 * x + u01 * y
            amps[base + half + j] = u10 * x + u11 * y


def apply_photon_phase(double complex[::1] amps, Py_ssize_t pre, Py_ssize_t mid,
                       Py_ssize_t dim, Py_ssize_t level,
                       double complex[::1] phases):
    cdef Py_ssize_t p, m, n, base
    for p in range(pre):
        for m in range(mid):
            base = ((2 * p + level) * mid + m) * dim
            for n in range(dim):
                amps[base + n] = amps[base + n] * phases[n]


def apply_jc_pair(double complex[::1] amps, Py_ssize_t pre, Py_ssize_t mid,
                  Py_ssize_t dim,
                  double complex[::1] uaa, double complex[::1] uab,
                  double complex[::1] uba, double complex[::1] ubb):
    cdef Py_ssize_t p, m, n, base_a, base_b
    cdef double complex x, y
    for p in range(pre):
        for m in range(mid):
            base_a = (2 * p * mid + m) * dim
            base_b = ((2 * p + 1) * mid + m) * dim
            for n in range(dim - 1):
                x = amps[base_a + n]
                y = amps[base_b + n + 1]
                amps[base_a + n] = uaa[n] * x + uab[n] * y
                amps[base_b + n + 1] = uba[n] * x + ubb[n] * y


def branch_probability(double complex[::1] amps, Py_ssize_t pre,
                       Py_ssize_t half, Py_ssize_t level):
    cdef Py_ssize_t p, j, base
    cdef double total = 0.0
    cdef double complex z
    for p in range(pre):
        base = (2 * p + level) * half
        for j in range(half):
            z = amps[base + j]
            total += z.real * z.real + z.imag * z.imag
    return total


def collapse_two_level(double complex[::1] amps, Py_ssize_t pre, Py_ssize_t half,
                       Py_ssize_t level, double scale):
    cdef Py_ssize_t p, j, base_keep, base_zero
    for p in range(pre):
        base_keep = (2 * p + level) * half
        base_zero = (2 * p + (1 - level)) * half
        for j in range(half):
            amps[base_keep + j] = amps[base_keep + j] * scale
            amps[base_zero + j] = 0.0
