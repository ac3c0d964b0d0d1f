# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel for applying one sparse operator site to a state block."""


def apply_site_sparse(const int[::1] ptr, const int[::1] jo, const int[::1] br,
                      const double complex[::1] val,
                      const double complex[::1] phi, double complex[::1] out,
                      Py_ssize_t BL, Py_ssize_t P, Py_ssize_t d, Py_ssize_t Q):
    """Accumulate ``out[br, p, jo, q] += val * phi[b, p, i, q]`` over nonzeros.

    Nonzeros are grouped by input pair ``(b, i)``: those of group
    ``b * d + i`` occupy ``ptr[b * d + i]`` up to ``ptr[b * d + i + 1]``.
    ``phi`` and ``out`` are flat C-ordered views of arrays with shapes
    (BL, P, d, Q) and (right bond, P, d, Q). The state is read once, in
    memory order.
    """
    cdef Py_ssize_t b, p, i, k, q, src, dst, start, stop
    cdef double complex v
    with nogil:
        for b in range(BL):
            for p in range(P):
                for i in range(d):
                    start = ptr[b * d + i]
                    stop = ptr[b * d + i + 1]
                    if start == stop:
                        continue
                    src = ((b * P + p) * d + i) * Q
                    for k in range(start, stop):
                        v = val[k]
                        dst = ((br[k] * P + p) * d + jo[k]) * Q
                        for q in range(Q):
                            out[dst + q] = out[dst + q] + v * phi[src + q]
