# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels.

Draw-for-draw identical to leakmeter._pykernels: same PRNG (splitmix64),
same draw order per record, so both backends emit byte-identical traces for
equal configurations. Any change here must be mirrored in _pykernels.py.
"""

import numpy as np

ctypedef unsigned long long u64


cdef inline u64 _next_u64(u64* state):
    cdef u64 z
    state[0] = state[0] + <u64>0x9E3779B97F4A7C15ULL
    z = state[0]
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _unit(u64* state):
    return <double>(_next_u64(state) >> 11) * (1.0 / 9007199254740992.0)


cdef inline u64 _below(u64* state, u64 n):
    # threshold = (2**64 - n) % n; draws below it would bias x % n
    cdef u64 threshold = (<u64>0 - n) % n
    cdef u64 x
    while True:
        x = _next_u64(state)
        if x >= threshold:
            return x % n


def dc_kernel(k, bias, samples, seed):
    """See leakmeter._pykernels.dc_kernel; identical contract and stream."""
    cdef Py_ssize_t n = samples
    cdef int kk = k
    cdef double b = bias
    cdef u64 state = <u64>(seed & 0xFFFFFFFFFFFFFFFF)

    payer = np.empty(n, dtype=np.int64)
    ann = np.empty((n, kk), dtype=np.uint8)
    coins_buf = np.empty(kk, dtype=np.uint8)

    cdef long long[::1] pv = payer
    cdef unsigned char[:, ::1] av = ann
    cdef unsigned char[::1] coins = coins_buf
    cdef Py_ssize_t i
    cdef int j, p

    for i in range(n):
        p = <int>_below(&state, <u64>kk)
        for j in range(kk):
            coins[j] = 1 if _unit(&state) < b else 0
        for j in range(kk):
            av[i, j] = (1 if j == p else 0) ^ coins[j] ^ coins[(j + 1) % kk]
        pv[i] = p
    return payer, ann


def crowds_kernel(honest, corrupt, pf, samples, seed, max_attempts):
    """See leakmeter._pykernels.crowds_kernel; identical contract and stream."""
    cdef Py_ssize_t n = samples
    cdef long long nh = honest
    cdef long long m = honest + corrupt
    cdef double p_fwd = pf
    cdef u64 state = <u64>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef long long cap = max_attempts

    initiator = np.empty(n, dtype=np.int64)
    detected = np.empty(n, dtype=np.int64)
    cdef long long[::1] iv = initiator
    cdef long long[::1] dv = detected

    cdef Py_ssize_t accepted = 0
    cdef long long attempts = 0
    cdef long long s, hop, holder, nxt

    while accepted < n:
        attempts += 1
        if attempts > cap:
            raise RuntimeError(
                f"crowds simulation exceeded {max_attempts} attempts "
                f"for {samples} accepted runs"
            )
        s = <long long>_below(&state, <u64>nh)
        hop = <long long>_below(&state, <u64>m)
        if hop >= nh:
            iv[accepted] = s
            dv[accepted] = s
            accepted += 1
            continue
        holder = hop
        while True:
            if _unit(&state) < p_fwd:
                nxt = <long long>_below(&state, <u64>m)
                if nxt >= nh:
                    iv[accepted] = s
                    dv[accepted] = holder
                    accepted += 1
                    break
                holder = nxt
            else:
                break  # delivered without meeting a corrupt member: reject
    return initiator, detected
