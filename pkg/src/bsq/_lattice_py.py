"""Numpy fallback for the lattice classifier (same contract as the compiled one)."""
import numpy as np

_CHUNK = 1 << 18


def classify_range(normals, num, den, lo, shape, start, stop):
    normals = np.asarray(normals, dtype=np.int64)
    num = np.asarray(num, dtype=np.int64)
    den = np.asarray(den, dtype=np.int64)
    lo = np.asarray(lo, dtype=np.int64)
    shape = tuple(int(s) for s in shape)
    out = np.zeros(max(stop - start, 0), dtype=np.uint8)
    for a in range(start, stop, _CHUNK):
        b = min(stop, a + _CHUNK)
        coords = np.stack(np.unravel_index(np.arange(a, b, dtype=np.int64), shape)).astype(np.int64)
        coords += lo[:, None]
        slack = den[:, None] * (normals @ coords) - num[:, None]
        inside = (slack <= 0).all(axis=0)
        face = (slack == 0).any(axis=0)
        out[a - start : b - start] = np.where(inside, np.where(face, 2, 1), 0)
    return out
