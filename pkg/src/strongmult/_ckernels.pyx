# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Call through :mod:`strongmult.kernels`, which falls back
to numpy when this extension is not built."""

from libc.stdint cimport int64_t
from libc.stdlib cimport calloc, free


def mul_sparse_mod(const int64_t[::1] acc, const int64_t[::1] offsets,
                   const int64_t[::1] coeffs, int64_t modulus, int64_t[::1] out):
    # offsets ascending, |coeffs| small so each partial sum stays below 2**62
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t nterms = offsets.shape[0]
    cdef Py_ssize_t i, k, e
    cdef int64_t c, s
    cdef int64_t *dst = &out[0]
    cdef const int64_t *src = &acc[0]
    if n == 0:
        return
    with nogil:
        for i in range(n):
            dst[i] = 0
        # one streaming multiply-add per sparse term, then a single reduction
        for k in range(nterms):
            e = offsets[k]
            if e >= n:
                break
            c = coeffs[k]
            for i in range(e, n):
                dst[i] += c * src[i - e]
        for i in range(n):
            s = dst[i] % modulus
            if s < 0:
                s += modulus
            dst[i] = s


cdef inline int64_t _addmod(int64_t a, int64_t b, int64_t p) nogil:
    a += b
    if a >= p:
        a -= p
    return a


def cubic_character_sums(const int64_t[::1] primes, int64_t c3, int64_t c2,
                         int64_t c1, int64_t c0, int64_t[::1] out):
    """out[j] = sum over x mod p of legendre(c3 x^3 + c2 x^2 + c1 x + c0, p), p = primes[j] odd."""
    cdef Py_ssize_t j, nprimes = primes.shape[0]
    cdef int64_t p, x, y, sq, step, s, f, d1, d2, d3, pmax = 0
    cdef signed char *chi
    for j in range(nprimes):
        if primes[j] > pmax:
            pmax = primes[j]
    chi = <signed char *> calloc(pmax + 1, 1)
    if chi == NULL:
        raise MemoryError()
    try:
        with nogil:
            for j in range(nprimes):
                p = primes[j]
                # quadratic character table: chi[0] = 0, +1 on squares, -1 otherwise
                chi[0] = 0
                for x in range(1, p):
                    chi[x] = -1
                # (y+1)^2 = y^2 + (2y + 1)
                sq = 0
                step = 1
                for y in range((p - 1) // 2):
                    sq = _addmod(sq, step, p)
                    chi[sq] = 1
                    step = _addmod(step, 2, p)
                # forward differences of the cubic, all kept in [0, p)
                f = ((c0 % p) + p) % p
                d1 = (((c3 + c2 + c1) % p) + p) % p
                d2 = (((6 * c3 + 2 * c2) % p) + p) % p
                d3 = (((6 * c3) % p) + p) % p
                s = 0
                for x in range(p):
                    s += chi[f]
                    f = _addmod(f, d1, p)
                    d1 = _addmod(d1, d2, p)
                    d2 = _addmod(d2, d3, p)
                out[j] = s
    finally:
        free(chi)
