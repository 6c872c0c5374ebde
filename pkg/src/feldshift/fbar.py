"""The f-bar distance between finite words.

A match between ``x`` and ``y`` is an order preserving bijection between index
sets with equal symbols, i.e. a common subsequence, so the best match size is
``2 * LCS(x, y)`` and ``fbar = 1 - 2 LCS / (|x| + |y|)``.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import words
from .params import ParamSeq

__all__ = [
    "MatchResult", "fbar", "lcs_dp", "lcs_bitparallel", "lcs_exhaustive",
    "alignment", "fbar_words", "gerber_check", "GerberResult", "lb_test", "LBResult",
]

BITPAR_MAX_SYMBOLS = 64


def _as_array(x) -> np.ndarray:
    if isinstance(x, np.ndarray):
        return x
    if isinstance(x, (bytes, bytearray)):
        return np.frombuffer(bytes(x), dtype=np.uint8)
    if isinstance(x, str):
        return np.frombuffer(x.encode("utf-32-le"), dtype="<u4")
    return np.asarray(list(x), dtype=np.int64)


def lcs_dp(x, y) -> int:
    """Row-vectorised O(|x||y|) dynamic program.

    Row update: ``C[i][j] = max_{j' <= j} max(C[i-1][j'], C[i-1][j'-1] + [x_i == y_j'])``.
    """
    a, b = _as_array(x), _as_array(y)
    if len(a) < len(b):
        a, b = b, a
    if len(b) == 0:
        return 0
    prev = np.zeros(len(b) + 1, dtype=np.int64)
    cand = np.empty(len(b) + 1, dtype=np.int64)
    for s in a:
        match = (b == s)
        cand[0] = 0
        np.maximum(prev[1:], prev[:-1] + match, out=cand[1:])
        np.maximum.accumulate(cand, out=prev)
    return int(prev[-1])


def _masks(b: np.ndarray) -> dict:
    out = {}
    for s in np.unique(b):
        bits = np.packbits(b == s, bitorder="little")
        out[s.item()] = int.from_bytes(bits.tobytes(), "little")
    return out


def lcs_bitparallel(x, y) -> int:
    """Bit-vector LCS (Allison-Dix / Hyyro): one big-int word per row of the DP."""
    a, b = _as_array(x), _as_array(y)
    if len(b) == 0 or len(a) == 0:
        return 0
    masks = _masks(b)
    n = len(b)
    full = (1 << n) - 1
    v = full
    for s in a.tolist():
        m = masks.get(s)
        if m is None:
            continue
        u = v & m
        v = ((v + u) | (v - u)) & full
    return n - v.bit_count() if hasattr(v, "bit_count") else n - bin(v).count("1")


def lcs_exhaustive(x, y) -> int:
    """Largest k such that some k-subset of the shorter word is a subsequence of the other.

    Enumerates index subsets by decreasing size; exponential, for oracle use only.
    """
    a, b = list(x), list(y)
    if len(a) > len(b):
        a, b = b, a
    for k in range(len(a), 0, -1):
        for idx in itertools.combinations(range(len(a)), k):
            it = iter(b)
            if all(any(a[i] == c for c in it) for i in idx):
                return k
    return 0


def _last_row(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    prev = np.zeros(len(b) + 1, dtype=np.int64)
    cand = np.empty(len(b) + 1, dtype=np.int64)
    for s in a:
        cand[0] = 0
        np.maximum(prev[1:], prev[:-1] + (b == s), out=cand[1:])
        np.maximum.accumulate(cand, out=prev)
    return prev


def alignment(x, y) -> list[tuple[int, int]]:
    """One optimal match as sorted index pairs (Hirschberg, linear memory)."""
    a, b = _as_array(x), _as_array(y)
    pairs: list[tuple[int, int]] = []

    def rec(i0: int, i1: int, j0: int, j1: int):
        if i1 <= i0 or j1 <= j0:
            return
        if i1 - i0 == 1:
            hits = np.flatnonzero(b[j0:j1] == a[i0])
            if len(hits):
                pairs.append((i0, j0 + int(hits[0])))
            return
        mid = (i0 + i1) // 2
        left = _last_row(a[i0:mid], b[j0:j1])
        right = _last_row(a[mid:i1][::-1], b[j0:j1][::-1])[::-1]
        split = j0 + int(np.argmax(left + right))
        rec(i0, mid, j0, split)
        rec(mid, i1, split, j1)

    rec(0, len(a), 0, len(b))
    return pairs


@dataclass
class MatchResult:
    pi: int  # best match size, 2 * LCS
    m: int
    n: int
    pairs: Optional[list[tuple[int, int]]] = None

    @property
    def fbar_c(self) -> Fraction:
        return Fraction(self.pi, self.m + self.n)

    @property
    def fbar(self) -> Fraction:
        return 1 - self.fbar_c

    def to_dict(self) -> dict:
        from .report import rational
        out = {"pi": self.pi, "m": self.m, "n": self.n,
               "fbar_c": rational(self.fbar_c), "fbar": rational(self.fbar)}
        if self.pairs is not None:
            out["alignment"] = [list(p) for p in self.pairs]
        return out


def _choose_lcs(a: np.ndarray, b: np.ndarray, method: str) -> int:
    if method == "auto":
        small_alpha = len(np.union1d(np.unique(a), np.unique(b))) <= BITPAR_MAX_SYMBOLS
        method = "bitpar" if small_alpha and min(len(a), len(b)) > 16 else "dp"
    if method == "bitpar":
        # the shorter word goes into the bit vector
        return lcs_bitparallel(a, b) if len(a) >= len(b) else lcs_bitparallel(b, a)
    if method == "dp":
        return lcs_dp(a, b)
    if method == "exhaustive":
        return lcs_exhaustive(a.tolist(), b.tolist())
    raise ValueError(f"unknown method {method!r}")


def fbar(x, y, method: str = "auto", align: bool = False) -> MatchResult:
    """f-bar distance with the exact optimal match size."""
    a, b = _as_array(x), _as_array(y)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("fbar needs two nonempty words")
    lcs = _choose_lcs(a, b, method)
    pairs = alignment(a, b) if align else None
    if pairs is not None and len(pairs) != lcs:
        raise AssertionError("alignment disagrees with LCS length")
    return MatchResult(2 * lcs, len(a), len(b), pairs)


def _fbar_value(a: np.ndarray, b: np.ndarray, method: str = "auto") -> Fraction:
    """f-bar allowing empty words: 0 when both are empty, 1 when exactly one is."""
    if len(a) + len(b) == 0:
        return Fraction(0)
    if len(a) == 0 or len(b) == 0:
        return Fraction(1)
    return fbar(a, b, method).fbar


# ---------------------------------------------------------------------------
# words of the construction


@dataclass
class WordPairResult:
    left: tuple
    right: tuple
    match: MatchResult
    threshold: Optional[Fraction]
    asserted: bool  # threshold only binding when the growth conditions hold

    @property
    def meets_threshold(self) -> Optional[bool]:
        if self.threshold is None:
            return None
        return self.match.fbar >= self.threshold


def _word(params: ParamSeq, kind: str, k: int, index: int):
    if kind == "a":
        return words.build_feldman(params, k, index)
    if kind == "b":
        return words.build_extended(params, k, index)
    if kind == "c":
        return words.build_c(params, k)
    raise ValueError(f"kind must be a, b or c, got {kind!r}")


def fbar_words(params: ParamSeq, k: int, left: tuple, right: tuple,
               cap: int = words.DEFAULT_MATERIALIZE_CAP, method: str = "auto",
               growth_ok: Optional[bool] = None) -> WordPairResult:
    """f-bar between powers of construction words, e.g. ``left=("a", 1, 2)`` is a_{k,1}^2."""
    sides = []
    for kind, index, power in (left, right):
        w = _word(params, kind, k, index)
        need = w.length * power
        if need > cap:
            raise words.CapExceeded(need, cap)
        sides.append(words.materialize(words.Power(w, power) if power > 1 else w, cap))
    res = fbar(sides[0], sides[1], method)
    threshold = None
    if left[0] == right[0] and left[0] in "ab" and left[1] != right[1]:
        threshold = Fraction(7, 8) if left[0] == "a" else Fraction(5, 8)
    if growth_ok is None:
        growth_ok = False
    return WordPairResult(left, right, res, threshold, bool(growth_ok and threshold is not None))


# ---------------------------------------------------------------------------
# deletion lemma


@dataclass
class GerberResult:
    fbar_b: Fraction
    fbar_a: Fraction
    rho: Fraction
    deleted: int

    @property
    def slack(self) -> Fraction:
        return self.fbar_b - (self.fbar_a - 2 * self.rho)

    @property
    def passed(self) -> bool:
        return self.slack >= 0


def gerber_check(b1, b2, deletions: tuple[Iterable[int], Iterable[int]],
                 rho: Optional[Fraction] = None, method: str = "auto") -> GerberResult:
    """Check fbar(b1, b2) >= fbar(a1, a2) - 2 rho where a_i is b_i minus the deleted indices.

    ``rho`` defaults to the actual deleted fraction.
    """
    x, y = _as_array(b1), _as_array(b2)
    d1, d2 = set(deletions[0]), set(deletions[1])
    for d, w in ((d1, x), (d2, y)):
        if any(not 0 <= i < len(w) for i in d):
            raise IndexError("deletion index out of range")
    total = len(x) + len(y)
    deleted = len(d1) + len(d2)
    if rho is None:
        rho = Fraction(deleted, total)
    rho = Fraction(rho)
    if deleted > (rho * total).__floor__():
        raise ValueError(f"{deleted} deletions exceed floor(rho (n+m)) = {(rho * total).__floor__()}")
    keep1 = np.ones(len(x), dtype=bool)
    keep1[list(d1)] = False
    keep2 = np.ones(len(y), dtype=bool)
    keep2[list(d2)] = False
    fb = _fbar_value(x, y, method)
    fa = _fbar_value(x[keep1], y[keep2], method)
    return GerberResult(fb, fa, rho, deleted)


# ---------------------------------------------------------------------------
# loosely Bernoulli test


@dataclass
class LBResult:
    eps: Fraction
    max_fbar: Fraction
    witness: Optional[tuple[int, int]]
    pairs: int
    matrix: Optional[list[list[Fraction]]] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.max_fbar < self.eps


def lb_test(W: Sequence, eps: Fraction, method: str = "auto", jobs: int = 1,
            keep_matrix: bool = False) -> LBResult:
    """Max pairwise f-bar over ``W`` and whether it is below ``eps``."""
    arrs = [_as_array(w) for w in W]
    if not arrs:
        raise ValueError("empty word set")
    if len({len(a) for a in arrs}) != 1:
        raise ValueError("all words must have the same length")
    pairs = list(itertools.combinations(range(len(arrs)), 2))

    def one(p):
        i, j = p
        return fbar(arrs[i], arrs[j], method).fbar

    if jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(jobs) as ex:
            vals = list(ex.map(one, pairs))
    else:
        vals = [one(p) for p in pairs]
    best, witness = Fraction(0), None
    for p, v in zip(pairs, vals):
        if witness is None or v > best:
            best, witness = v, p
    matrix = None
    if keep_matrix:
        matrix = [[Fraction(0)] * len(arrs) for _ in arrs]
        for (i, j), v in zip(pairs, vals):
            matrix[i][j] = matrix[j][i] = v
    return LBResult(Fraction(eps), best, witness, len(pairs), matrix)
