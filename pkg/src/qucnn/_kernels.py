"""Compiled in-place gate kernels over a flat complex128 amplitude array.

Indices follow the package convention (qubit q is bit q of the basis index).
All kernels release the GIL.
"""

from numba import njit


@njit(cache=True, nogil=True)
def apply_1q(psi, q, m):
    half = psi.size >> 1
    low = (1 << q) - 1
    bit = 1 << q
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    for i in range(half):
        i0 = ((i & ~low) << 1) | (i & low)
        i1 = i0 | bit
        a = psi[i0]
        b = psi[i1]
        psi[i0] = m00 * a + m01 * b
        psi[i1] = m10 * a + m11 * b


@njit(cache=True, nogil=True)
def apply_ry(psi, q, c, s):
    half = psi.size >> 1
    low = (1 << q) - 1
    bit = 1 << q
    for i in range(half):
        i0 = ((i & ~low) << 1) | (i & low)
        i1 = i0 | bit
        a = psi[i0]
        b = psi[i1]
        psi[i0] = c * a - s * b
        psi[i1] = s * a + c * b


@njit(cache=True, nogil=True)
def apply_diag(psi, q, d0, d1):
    bit = 1 << q
    for i in range(psi.size):
        if i & bit:
            psi[i] *= d1
        else:
            psi[i] *= d0


@njit(cache=True, nogil=True)
def apply_cnot(psi, c, t):
    cbit = 1 << c
    tbit = 1 << t
    for i in range(psi.size):
        if (i & cbit) and not (i & tbit):
            j = i | tbit
            tmp = psi[i]
            psi[i] = psi[j]
            psi[j] = tmp


@njit(cache=True, nogil=True)
def apply_cswap(psi, c, a, b):
    cbit = 1 << c
    abit = 1 << a
    bbit = 1 << b
    for i in range(psi.size):
        # visit each swapped pair once, from its (a=1, b=0) member
        if (i & cbit) and (i & abit) and not (i & bbit):
            j = (i & ~abit) | bbit
            tmp = psi[i]
            psi[i] = psi[j]
            psi[j] = tmp


@njit(cache=True, nogil=True)
def prob_zero(psi, q):
    bit = 1 << q
    total = 0.0
    for i in range(psi.size):
        if not (i & bit):
            v = psi[i]
            total += v.real * v.real + v.imag * v.imag
    return total

