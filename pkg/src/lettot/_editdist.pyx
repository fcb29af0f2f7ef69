# cython: boundscheck=False, wraparound=False, language_level=3
"""Cython edit-distance kernel (two-row dynamic program over code points)."""

from cpython.mem cimport PyMem_Malloc, PyMem_Free


def levenshtein(str a, str b):
    """Classic Levenshtein distance with unit insert/delete/substitute costs."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if la < lb:
        a, b = b, a
        la, lb = lb, la

    cdef Py_ssize_t i, j
    cdef Py_ssize_t cost, above, left, diag, best
    cdef Py_UCS4 ca
    cdef Py_ssize_t *prev = <Py_ssize_t *> PyMem_Malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *cur = <Py_ssize_t *> PyMem_Malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *tmp
    if prev == NULL or cur == NULL:
        PyMem_Free(prev)
        PyMem_Free(cur)
        raise MemoryError()
    try:
        for j in range(lb + 1):
            prev[j] = j
        for i in range(1, la + 1):
            cur[0] = i
            ca = a[i - 1]
            for j in range(1, lb + 1):
                cost = 0 if ca == <Py_UCS4> b[j - 1] else 1
                diag = prev[j - 1] + cost
                above = prev[j] + 1
                left = cur[j - 1] + 1
                best = diag
                if above < best:
                    best = above
                if left < best:
                    best = left
                cur[j] = best
            tmp = prev
            prev = cur
            cur = tmp
        return prev[lb]
    finally:
        PyMem_Free(prev)
        PyMem_Free(cur)
