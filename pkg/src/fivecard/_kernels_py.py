"""Numpy fallback for the sampling kernel; advances all lanes in lockstep."""
import numpy as np

_U53 = np.float64(1.0 / (1 << 53))


def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


def _next(s):
    """Advance the (4, m) uint64 state block in place; return m uniforms."""
    s0, s1, s2, s3 = s
    result = _rotl(s1 * np.uint64(5), 7) * np.uint64(9)
    t = s1 << np.uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s[3] = _rotl(s3, 45)
    return (result >> np.uint64(11)).astype(np.float64) * _U53


def sample_joint_counts(states, n_samples, prior_cdf, step_cdf, n_steps):
    """Counts of (initial index, total shift mod 5) over ``n_samples`` draws.

    Each sample takes one uniform for the initial arrangement and then
    ``n_steps`` uniforms for the shift increments, all from its own lane.
    """
    states = np.array(states, dtype=np.uint64)
    n_lanes = states.shape[0]
    prior_cdf = np.asarray(prior_cdf, dtype=np.float64)
    step_cdf = np.asarray(step_cdf, dtype=np.float64)
    m = prior_cdf.shape[0]
    counts = np.zeros(m * 5, dtype=np.int64)
    block = np.ascontiguousarray(states.T)  # (4, n_lanes)
    done = 0
    while done < n_samples:
        active = min(n_lanes, n_samples - done)
        s = block[:, :active].copy()
        initial = np.searchsorted(prior_cdf, _next(s), side="right")
        shift = np.zeros(active, dtype=np.int64)
        for _ in range(n_steps):
            shift += np.searchsorted(step_cdf, _next(s), side="right")
        shift %= 5
        block[:, :active] = s
        counts += np.bincount(initial * 5 + shift, minlength=m * 5)
        done += active
    return counts.reshape(m, 5)
