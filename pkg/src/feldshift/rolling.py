"""Vectorised double polynomial hashing of fixed-length windows, with exact verification.

Hashes are taken modulo two 31-bit primes so every product fits in int64.  Hashes
only propose equalities; every claimed equality is then confirmed against the
symbols themselves, so the counts returned here are exact.
"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

P1, B1 = 2147483647, 1000003
P2, B2 = 2147483629, 916132829


def _powers(base: int, p: int, count: int) -> np.ndarray:
    out = np.empty(max(count, 1), dtype=np.int64)
    out[0] = 1
    filled = 1
    while filled < count:
        step = min(filled, count - filled)
        mult = pow(base, filled, p)
        out[filled:filled + step] = out[:step] * mult % p
        filled += step
    return out[:count]


def _hash_mod(s: np.ndarray, n: int, p: int, base: int) -> np.ndarray:
    N = len(s)
    pw = _powers(base, p, N)
    inv = _powers(pow(base, -1, p), p, N - n + 1)
    g = np.empty(N + 1, dtype=np.int64)
    g[0] = 0
    np.cumsum(s * pw % p, out=g[1:])
    g %= p
    h = (g[n:] - g[:-n]) % p
    return h * inv % p


def window_keys(arr: np.ndarray, n: int) -> np.ndarray:
    """One int64 key per window ``arr[i:i+n]``; equal windows get equal keys."""
    if n <= 0:
        raise ValueError("window length must be positive")
    if len(arr) < n:
        return np.empty(0, dtype=np.int64)
    s = arr.astype(np.int64) + 1
    return (_hash_mod(s, n, P1, B1) << 31) | _hash_mod(s, n, P2, B2)


def _verify_against(text: np.ndarray, pos: np.ndarray, src: np.ndarray,
                    ref_text: np.ndarray, n: int) -> bool:
    """Confirm ``text[pos[t]:pos[t]+n] == ref_text[src[t]:src[t]+n]`` for all t.

    Consecutive pairs that both advance by one only need their last symbols
    compared; the rest are compared in full.
    """
    if len(pos) == 0:
        return True
    need_full = np.ones(len(pos), dtype=bool)
    if len(pos) > 1:
        chain = (pos[1:] == pos[:-1] + 1) & (src[1:] == src[:-1] + 1)
        tail_ok = text[pos[1:] + n - 1] == ref_text[src[1:] + n - 1]
        need_full[1:] = ~(chain & tail_ok)
    tb = text.tobytes()
    rb = ref_text.tobytes()
    isz = text.itemsize
    for t in np.flatnonzero(need_full):
        a, b = int(pos[t]) * isz, int(src[t]) * isz
        if tb[a:a + n * isz] != rb[b:b + n * isz]:
            return False
    return True


def _exact_distinct(text: np.ndarray, n: int, starts: np.ndarray) -> np.ndarray:
    tb, isz = text.tobytes(), text.itemsize
    first: dict[bytes, int] = {}
    for s in starts.tolist():
        first.setdefault(tb[s * isz:(s + n) * isz], s)
    return np.array(sorted(first.values()), dtype=np.int64)


def distinct_windows(text: np.ndarray, n: int,
                     valid: Optional[np.ndarray] = None) -> np.ndarray:
    """Start positions of the first occurrence of each distinct length-``n`` window.

    ``valid`` (boolean, one entry per window start) restricts which starts count.
    """
    keys = window_keys(text, n)
    starts = np.arange(len(keys), dtype=np.int64)
    if valid is not None:
        starts = starts[valid[:len(keys)]]
        keys = keys[starts]
    if len(keys) == 0:
        return np.empty(0, dtype=np.int64)
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    reps = starts[first]
    rep_of = reps[inverse.ravel()]
    if not _verify_against(text, starts, rep_of, text, n):
        return _exact_distinct(text, n, starts)
    return np.sort(reps)


class WindowSet:
    """Exact membership for length-``n`` windows against a fixed family of words."""

    def __init__(self, words: Sequence[np.ndarray], n: int):
        self.n = n
        self.ref = np.concatenate([np.asarray(w) for w in words]) if words else np.empty(0, np.uint8)
        valid = np.zeros(max(len(self.ref) - n + 1, 0), dtype=bool)
        off = 0
        for w in words:
            if len(w) >= n:
                valid[off:off + len(w) - n + 1] = True
            off += len(w)
        reps = distinct_windows(self.ref, n, valid)
        keys = window_keys(self.ref, n)[reps]
        order = np.argsort(keys)
        self.keys = keys[order]
        self.reps = reps[order]

    def __len__(self) -> int:
        return len(self.reps)

    def members(self) -> list[bytes]:
        isz = self.ref.itemsize
        rb = self.ref.tobytes()
        return [rb[r * isz:(r + self.n) * isz] for r in self.reps.tolist()]

    def match(self, text: np.ndarray) -> np.ndarray:
        """Boolean array: window ``text[i:i+n]`` is a member."""
        keys = window_keys(text, self.n)
        if len(keys) == 0 or len(self.keys) == 0:
            return np.zeros(len(keys), dtype=bool)
        idx = np.searchsorted(self.keys, keys)
        idx[idx == len(self.keys)] = 0
        hit = self.keys[idx] == keys
        pos = np.flatnonzero(hit)
        src = self.reps[idx[pos]]
        if not _verify_against(text, pos, src, self.ref, self.n):
            # fall back to exact per-window comparison
            members = set(self.members())
            tb, isz, n = text.tobytes(), text.itemsize, self.n
            for p in pos.tolist():
                hit[p] = tb[p * isz:(p + n) * isz] in members
        return hit
