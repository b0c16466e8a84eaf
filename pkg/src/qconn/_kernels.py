"""Hot loops over bitmask-encoded point sets.

Each kernel has a numba implementation and a pure-numpy fallback with the same
contract.  Set ``QCONN_DISABLE_NUMBA=1`` to force the fallback (numba is also
skipped when it cannot be imported).  Point sets are ``uint64`` bitmasks, so
spaces handled here have at most 64 points.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["USE_NUMBA", "component_labels", "clopen_masks", "has_nontrivial_clopen", "MAX_POINTS", "SCAN_MAX_POINTS"]

MAX_POINTS = 64
SCAN_MAX_POINTS = 24

_disabled = os.environ.get("QCONN_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    from numba import njit
except ImportError:  # pragma: no cover - depends on environment
    njit = None

USE_NUMBA = njit is not None


# --------------------------------------------------------------------------
# component labelling: balls[s, x] is the ball of x under scale s; (x, y) is a
# step when y is in ball[x] or x is in ball[y].  Labels are the least index of
# each component.


def _labels_numpy(balls: np.ndarray) -> np.ndarray:
    S, n = balls.shape
    idx = np.arange(n, dtype=np.uint64)
    inball = ((balls[:, :, None] >> idx[None, None, :]) & np.uint64(1)).astype(bool)
    reach = inball | inball.transpose(0, 2, 1)
    reach |= np.eye(n, dtype=bool)[None]
    # transitive closure by repeated squaring
    steps = 1
    while steps < n:
        nxt = np.einsum("sij,sjk->sik", reach.astype(np.uint8), reach.astype(np.uint8)) > 0
        if np.array_equal(nxt, reach):
            break
        reach = nxt
        steps *= 2
    return reach.argmax(axis=2).astype(np.int64)


def _labels_loop(balls):
    S, n = balls.shape
    out = np.empty((S, n), dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    for s in range(S):
        for i in range(n):
            parent[i] = i
        for x in range(n):
            bx = balls[s, x]
            for y in range(n):
                if ((bx >> np.uint64(y)) & np.uint64(1)) == 0:
                    continue
                rx = x
                while parent[rx] != rx:
                    parent[rx] = parent[parent[rx]]
                    rx = parent[rx]
                ry = y
                while parent[ry] != ry:
                    parent[ry] = parent[parent[ry]]
                    ry = parent[ry]
                if rx < ry:
                    parent[ry] = rx
                elif ry < rx:
                    parent[rx] = ry
        for i in range(n):
            r = i
            while parent[r] != r:
                r = parent[r]
            out[s, i] = r
    return out


# --------------------------------------------------------------------------
# clopen scan over all subsets: A is open when it contains the minimal
# neighbourhood of each of its points; clopen when its complement is open too.


def _clopen_numpy(nbhd: np.ndarray) -> np.ndarray:
    n = nbhd.shape[0]
    full = np.uint64((1 << n) - 1)
    A = np.arange(1 << n, dtype=np.uint64)
    C = full & ~A
    ok = np.ones(A.shape, dtype=bool)
    one = np.uint64(1)
    for x in range(n):
        bit = np.uint64(x)
        nb = nbhd[x]
        in_a = ((A >> bit) & one).astype(bool)
        ok &= np.where(in_a, (nb & ~A) == 0, (nb & ~C) == 0)
    return A[ok]


def _clopen_loop(nbhd):
    n = nbhd.shape[0]
    total = np.uint64(1) << np.uint64(n)
    full = total - np.uint64(1)
    buf = np.empty(64, dtype=np.uint64)
    count = 0
    a = np.uint64(0)
    while a < total:
        c = full & ~a
        good = True
        for x in range(n):
            nb = nbhd[x]
            if (a >> np.uint64(x)) & np.uint64(1):
                if nb & ~a:
                    good = False
                    break
            elif nb & ~c:
                good = False
                break
        if good:
            if count == buf.shape[0]:
                bigger = np.empty(buf.shape[0] * 2, dtype=np.uint64)
                bigger[:count] = buf[:count]
                buf = bigger
            buf[count] = a
            count += 1
        a += np.uint64(1)
    return buf[:count].copy()


def _nontrivial_loop(nbhd):
    n = nbhd.shape[0]
    total = np.uint64(1) << np.uint64(n)
    full = total - np.uint64(1)
    # only subsets containing point 0 need checking (complements pair up)
    a = np.uint64(1)
    while a < full:
        c = full & ~a
        good = True
        for x in range(n):
            nb = nbhd[x]
            if (a >> np.uint64(x)) & np.uint64(1):
                if nb & ~a:
                    good = False
                    break
            elif nb & ~c:
                good = False
                break
        if good:
            return True
        a += np.uint64(2)
    return False


if USE_NUMBA:
    _labels_fast = njit(cache=True)(_labels_loop)
    _clopen_fast = njit(cache=True)(_clopen_loop)
    _nontrivial_fast = njit(cache=True)(_nontrivial_loop)


def component_labels(balls, force_numpy: bool = False) -> np.ndarray:
    """Component labels for a batch of scales given as ball bitmasks ``[S, n]``."""
    balls = np.ascontiguousarray(balls, dtype=np.uint64)
    if balls.ndim == 1:
        balls = balls[None]
    if balls.shape[1] == 0 or balls.shape[0] == 0:
        return np.zeros(balls.shape, dtype=np.int64)
    if balls.shape[1] > MAX_POINTS:
        raise ValueError(f"at most {MAX_POINTS} points supported")
    if USE_NUMBA and not force_numpy:
        return _labels_fast(balls)
    chunk = 1 << 14
    return np.concatenate([_labels_numpy(balls[i : i + chunk]) for i in range(0, len(balls), chunk)])


def clopen_masks(nbhd, force_numpy: bool = False) -> np.ndarray:
    """All clopen subsets of the finite space with minimal neighbourhoods ``nbhd``."""
    nbhd = np.ascontiguousarray(nbhd, dtype=np.uint64)
    if nbhd.shape[0] > SCAN_MAX_POINTS:
        raise ValueError(f"subset scan limited to {SCAN_MAX_POINTS} points")
    if USE_NUMBA and not force_numpy:
        return _clopen_fast(nbhd)
    return _clopen_numpy(nbhd)


def has_nontrivial_clopen(nbhd, force_numpy: bool = False) -> bool:
    nbhd = np.ascontiguousarray(nbhd, dtype=np.uint64)
    n = nbhd.shape[0]
    if n <= 1:
        return False
    if n > SCAN_MAX_POINTS:
        raise ValueError(f"subset scan limited to {SCAN_MAX_POINTS} points")
    if USE_NUMBA and not force_numpy:
        return bool(_nontrivial_fast(nbhd))
    return len(_clopen_numpy(nbhd)) > 2
