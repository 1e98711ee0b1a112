"""Counter-based random streams.

Every Monte Carlo draw is a pure function of ``(seed, stream, step)``, so
results do not depend on how walks are batched or which worker runs them.
The mixing function is the SplitMix64 finalizer applied twice, once to derive
a per-stream key and once per draw.
"""

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_STEP = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_SCALE = 1.0 / 9007199254740992.0  # 2**-53


def _mix(x):
    x = (x ^ (x >> _S30)) * _M1
    x = (x ^ (x >> _S27)) * _M2
    return x ^ (x >> _S31)


def stream_keys(seed, stream_ids):
    """Per-stream 64-bit keys for integer stream ids under ``seed``."""
    with np.errstate(over="ignore"):
        base = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + _GOLDEN)
        ids = np.asarray(stream_ids, dtype=np.uint64)
        return _mix(base ^ (ids * _GOLDEN + _GOLDEN))


def uniforms(keys, step):
    """One double in [0, 1) per key for draw number ``step``."""
    with np.errstate(over="ignore"):
        x = _mix(keys + np.uint64(step + 1) * _STEP)
    return (x >> _S11).astype(np.float64) * _SCALE


def derive_seed(seed, *indices):
    """Child seed for a sub-task, e.g. one grid point or one optimizer restart."""
    key = int(stream_keys(seed, [0])[0])
    for i in indices:
        key = int(stream_keys(key, [int(i) + 1])[0])
    return key
