# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gibbs sampling kernel.

Twin of _gibbs_py: identical arithmetic in identical order (no FMA; the
extension is built with -ffp-contract=off), so assignments match the
pure-Python backend bit for bit.
"""

import numpy as np

BACKEND = "cython"

cdef double _INV_2_53 = 1.0 / 9007199254740992.0


def sample_pass(
    double[:, ::1] s_tw,
    double[::1] s_t,
    double[:, ::1] new_tw,
    double[::1] new_t,
    double[:, ::1] n_dt,
    double[::1] alpha,
    double beta,
    double vbeta,
    int[::1] tokens_flat,
    int[::1] z_flat,
    long long[::1] tok_off,
    int[::1] uw_flat,
    long long[::1] uw_off,
    unsigned long long[::1] rng_states,
):
    """One Gibbs sweep over all documents against the (s_tw, s_t) snapshot."""
    cdef Py_ssize_t n_docs = n_dt.shape[0]
    cdef Py_ssize_t k = n_dt.shape[1]
    cdef Py_ssize_t d, i, t, j, u, n_uw, z, z_new
    cdef long long t0, t1, u0, u1
    cdef double total, r, cum
    cdef unsigned long long state, x
    cdef double[::1] p = np.empty(k, dtype=np.float64)
    cdef double[::1] local_t = np.empty(k, dtype=np.float64)
    cdef double[:, ::1] local_tw

    for d in range(n_docs):
        t0 = tok_off[d]
        t1 = tok_off[d + 1]
        if t0 == t1:
            continue
        u0 = uw_off[d]
        u1 = uw_off[d + 1]
        n_uw = u1 - u0
        local_tw = np.empty((k, n_uw), dtype=np.float64)
        for t in range(k):
            local_t[t] = s_t[t]
            for u in range(n_uw):
                local_tw[t, u] = s_tw[t, uw_flat[u0 + u]]
        state = rng_states[d]
        for i in range(t0, t1):
            j = tokens_flat[i]
            z = z_flat[i]
            n_dt[d, z] -= 1.0
            local_tw[z, j] -= 1.0
            local_t[z] -= 1.0
            total = 0.0
            for t in range(k):
                p[t] = (n_dt[d, t] + alpha[t]) * (local_tw[t, j] + beta) / (local_t[t] + vbeta)
                total += p[t]
            state = state + <unsigned long long>0x9E3779B97F4A7C15
            x = state
            x = (x ^ (x >> 30)) * <unsigned long long>0xBF58476D1CE4E5B9
            x = (x ^ (x >> 27)) * <unsigned long long>0x94D049BB133111EB
            x = x ^ (x >> 31)
            r = (<double>(x >> 11) * _INV_2_53) * total
            cum = 0.0
            z_new = k - 1
            for t in range(k):
                cum += p[t]
                if cum > r:
                    z_new = t
                    break
            n_dt[d, z_new] += 1.0
            local_tw[z_new, j] += 1.0
            local_t[z_new] += 1.0
            z_flat[i] = <int>z_new
        rng_states[d] = state
        for t in range(k):
            new_t[t] += local_t[t] - s_t[t]
            for u in range(n_uw):
                new_tw[t, uw_flat[u0 + u]] += local_tw[t, u] - s_tw[t, uw_flat[u0 + u]]
