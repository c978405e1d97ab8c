# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lattice classifier.

Codes: 0 outside, 1 strictly inside every halfspace, 2 on at least one face.
"""
import numpy as np

from libc.stdlib cimport malloc, free


def classify_range(const long long[:, ::1] normals, const long long[::1] num, const long long[::1] den,
                   const long long[::1] lo, const long long[::1] shape, long long start, long long stop):
    """Classify box points with row-major linear index in ``[start, stop)``.

    A halfspace ``u.x <= num/den`` is tested as ``den * (u.x) - num``.
    """
    cdef Py_ssize_t h = normals.shape[0]
    cdef Py_ssize_t n = normals.shape[1]
    cdef long long count = stop - start
    out = np.zeros(max(count, 0), dtype=np.uint8)
    if count <= 0:
        return out
    cdef unsigned char[::1] codes = out
    cdef long long *x = <long long *> malloc(n * sizeof(long long))
    # val[i] tracks den_i * (u_i . x) - num_i and is updated incrementally
    cdef long long *val = <long long *> malloc(h * sizeof(long long))
    if x == NULL or val == NULL:
        free(x)
        free(val)
        raise MemoryError()
    cdef long long rem, idx, v
    cdef Py_ssize_t i, j
    cdef int code
    try:
        with nogil:
            rem = start
            for j in range(n - 1, -1, -1):
                x[j] = rem % shape[j]
                rem = rem // shape[j]
            for i in range(h):
                v = 0
                for j in range(n):
                    v = v + normals[i, j] * (x[j] + lo[j])
                val[i] = den[i] * v - num[i]
            for idx in range(count):
                code = 1
                for i in range(h):
                    v = val[i]
                    if v > 0:
                        code = 0
                        break
                    if v == 0:
                        code = 2
                codes[idx] = code
                # odometer step
                j = n - 1
                while j >= 0:
                    if x[j] + 1 < shape[j]:
                        x[j] += 1
                        for i in range(h):
                            val[i] += den[i] * normals[i, j]
                        break
                    for i in range(h):
                        val[i] -= den[i] * normals[i, j] * x[j]
                    x[j] = 0
                    j -= 1
    finally:
        free(x)
        free(val)
    return out
