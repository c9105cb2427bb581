# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stencil for the lattice part of H|psi>.

Ring topology: cell n couples a_n to a_{n +/- 1} (amplitude -J_AA), b_n to
a_n (-J_AB) and b_n to a_{n+1} (-J_AB e^{i phi} on the <b|H|a> side).  The
emitter rows stay in Python; only the O(N) photon stencil lives here.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def lattice_apply(const double complex[::1] ca, const double complex[::1] cb,
                  double complex[::1] oa, double complex[::1] ob,
                  double j_aa, double j_ab, double complex phase):
    """out_a/out_b += 0; overwritten with the photon-photon part of H psi.

    phase = e^{-i phi}: the amplitude multiplying cb[n-1] in the a_n row.
    Arrays must be contiguous complex128 of one common length.
    """
    cdef Py_ssize_t n, N = ca.shape[0]
    cdef Py_ssize_t prev, nxt
    cdef double complex cphase = phase.conjugate()
    for n in range(N):
        prev = n - 1 if n > 0 else N - 1
        nxt = n + 1 if n < N - 1 else 0
        oa[n] = -j_aa * (ca[prev] + ca[nxt]) - j_ab * (cb[n] + phase * cb[prev])
        ob[n] = -j_ab * (ca[n] + cphase * ca[nxt])
    return None
