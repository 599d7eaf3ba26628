"""Pure-Python twin of the compiled Gibbs sampling kernel.

Implements exactly the same arithmetic in the same order as _gibbs_cy, so
the two backends produce bitwise-identical topic assignments. Elementwise
numpy ops, a sequential cumsum, and an inline splitmix64 step mirror the C
loop one-to-one.
"""

import numpy as np

BACKEND = "python"

_MASK64 = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0


def sample_pass(
    s_tw,
    s_t,
    new_tw,
    new_t,
    n_dt,
    alpha,
    beta,
    vbeta,
    tokens_flat,
    z_flat,
    tok_off,
    uw_flat,
    uw_off,
    rng_states,
):
    """One Gibbs sweep over all documents against the (s_tw, s_t) snapshot.

    Each document sees the snapshot plus its own in-flight updates only;
    deltas are folded into (new_tw, new_t). z_flat, n_dt and rng_states are
    updated in place.
    """
    n_docs, k = n_dt.shape
    for d in range(n_docs):
        t0, t1 = tok_off[d], tok_off[d + 1]
        if t0 == t1:
            continue
        uw = uw_flat[uw_off[d] : uw_off[d + 1]]
        local_tw = s_tw[:, uw].copy()
        local_t = s_t.copy()
        nd = n_dt[d]
        state = int(rng_states[d])
        for i in range(t0, t1):
            j = tokens_flat[i]
            z = z_flat[i]
            nd[z] -= 1.0
            local_tw[z, j] -= 1.0
            local_t[z] -= 1.0
            p = (nd + alpha) * (local_tw[:, j] + beta) / (local_t + vbeta)
            c = np.cumsum(p)
            state = (state + 0x9E3779B97F4A7C15) & _MASK64
            x = state
            x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
            x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
            x = x ^ (x >> 31)
            r = ((x >> 11) * _INV_2_53) * c[k - 1]
            z_new = int(np.searchsorted(c, r, side="right"))
            if z_new >= k:
                z_new = k - 1
            nd[z_new] += 1.0
            local_tw[z_new, j] += 1.0
            local_t[z_new] += 1.0
            z_flat[i] = z_new
        rng_states[d] = state
        new_tw[:, uw] += local_tw - s_tw[:, uw]
        new_t += local_t - s_t
