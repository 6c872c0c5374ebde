"""Block complexity, double brackets, Birkhoff frequencies and counting verifiers.

Complexity scans work on the grammar directly: a word's length-``n`` windows are
exactly the windows of a small family of *fragments* (expansions of short
nodes plus the ``2(n-1)`` symbols around every internal boundary), so P(n) over
a prefix of length L_K costs time proportional to the DAG size times ``n``
rather than L_K.  Frequencies need per-position counts and therefore expand the
scanned word, subject to the scan cap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from . import words
from .automaton import distinct_factor_counts
from .params import ParamSeq
from .rolling import WindowSet, distinct_windows
from .words import CapExceeded, GrammarWord, Power, Concat

__all__ = [
    "DEFAULT_SCAN_CAP", "ComplexityEntry", "ComplexityReport", "DoubleBracket",
    "FrequencyReport", "window_fragments", "complexity_brute", "complexity_report",
    "complexity_sam", "complexity_materialized", "complexity_structural",
    "right_special", "in_double_bracket", "frequency", "interior_multiplicity",
    "asequal_gap", "structural_bound_for",
]

DEFAULT_SCAN_CAP = 1 << 25


# ---------------------------------------------------------------------------
# fragments


def window_fragments(w: GrammarWord, span: int, small: int = 4096,
                     cap: int = DEFAULT_SCAN_CAP) -> list[np.ndarray]:
    """Factors of ``w`` whose windows of every length <= ``span`` are exactly w's."""
    h = span - 1
    seen: set[int] = set()
    out: list[np.ndarray] = []
    total = 0

    def add(node: GrammarWord, start: int, length: int):
        nonlocal total
        total += length
        if total > cap:
            raise CapExceeded(total, cap, "fragment scan")
        out.append(words.extract(node, start, length))

    stack = [w]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if node.length <= max(small, 2 * h):
            add(node, 0, node.length)
        elif isinstance(node, Power):
            cl = node.child.length
            if cl < h:
                copies = -(-h // cl) + 1
                add(node, 0, min(node.length, cl * copies))
            else:
                stack.append(node.child)
                if h > 0:
                    add(node, cl - h, 2 * h)
        else:
            stack.extend(node.children)
            if h > 0:
                for b in node.offsets[1:-1]:
                    lo, hi = max(0, b - h), min(node.length, b + h)
                    add(node, lo, hi - lo)
    return out


def scan_estimate(params: ParamSeq, level: int, span: int) -> int:
    """Upper estimate of the fragment symbols needed to scan b_{level,1}, without building it."""
    h = max(span - 1, 1)
    total = 0
    for k in range(1, level + 1):
        nk = params[k - 1]
        # a- and b-words and c_k at level k, each a concatenation of n_{k-1} (+1) parts
        total += (2 * nk + 1) * (nk + 2) * (2 * h + 4096 // max(nk, 1))
    return total


@lru_cache(maxsize=64)
def _fragments_cached(params: ParamSeq, tower: str, level: int, span: int, cap: int):
    est = scan_estimate(params, level, span)
    if est > cap:
        raise CapExceeded(est, cap, "fragment scan")
    w = words.orbit_prefix(params, tower, level).word
    return tuple(window_fragments(w, span, cap=cap))


def _joined(frags: Sequence[np.ndarray], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate fragments; mark window starts that stay inside one fragment."""
    use = [f for f in frags if len(f) >= n]
    if not use:
        return np.empty(0, dtype=np.uint8), np.empty(0, dtype=bool)
    text = np.concatenate(use)
    valid = np.zeros(len(text), dtype=bool)
    off = 0
    for f in use:
        valid[off:off + len(f) - n + 1] = True
        off += len(f)
    return text, valid


def _distinct_reps(frags: Sequence[np.ndarray], n: int) -> tuple[np.ndarray, np.ndarray]:
    text, valid = _joined(frags, n)
    if len(text) == 0:
        return text, np.empty(0, dtype=np.int64)
    return text, distinct_windows(text, n, valid)


# ---------------------------------------------------------------------------
# complexity


def structural_bound_for(params: ParamSeq, n: int, max_k: int = 8) -> Optional[tuple[int, int]]:
    """(k, m_k (3 n_k + 6)) for the least k with m_k = L_k n_k^(2n_{k+1}+2) >= n."""
    for k in range(max_k + 1):
        nk, nk1 = params[k], params[k + 1]
        if (2 * nk1 + 2) * nk.bit_length() > 1 << 16:
            return None
        m = words.length_L(params, k) * nk ** (2 * nk1 + 2)
        if m >= n:
            return k, m * (3 * nk + 6)
    return None


@dataclass
class ComplexityEntry:
    n: int
    count: int
    level: int
    prefix_length: int
    stable: Optional[bool]  # count unchanged from level-1 to level
    previous_count: Optional[int]
    scanned_symbols: int
    method: str
    structural_bound: Optional[int] = None
    right_special: Optional[int] = None
    right_special_excess: Optional[int] = None

    @property
    def within_structural_bound(self) -> Optional[bool]:
        if self.structural_bound is None:
            return None
        return self.count <= self.structural_bound


@dataclass
class ComplexityReport:
    entries: list[ComplexityEntry]

    def __getitem__(self, n: int) -> ComplexityEntry:
        for e in self.entries:
            if e.n == n:
                return e
        raise KeyError(n)

    def entropy_proxy(self) -> list[tuple[int, float]]:
        return [(e.n, math.log(e.count) / e.n) for e in self.entries if e.count]


def _count_compressed(params: ParamSeq, n: int, level: int, cap: int) -> tuple[int, int]:
    frags = _fragments_cached(params, "B", level, n, cap)
    _, reps = _distinct_reps(frags, n)
    return len(reps), sum(len(f) for f in frags)


def complexity_materialized(params: ParamSeq, n: int, level: int,
                            cap: int = DEFAULT_SCAN_CAP) -> int:
    """Distinct n-windows of the expanded b_{level,1}; reference path for small levels."""
    w = words.orbit_prefix(params, "B", level).word
    if w.length > cap:
        raise CapExceeded(w.length, cap, "scan")
    text = words.materialize(w, cap)
    return len(distinct_windows(text, n))


def complexity_brute(params: ParamSeq, n: int, level: int, cap: int = DEFAULT_SCAN_CAP,
                     method: str = "compressed") -> ComplexityEntry:
    """P(n) over the first L_level symbols of b_{inf,1}, with a stability check vs level-1."""
    if n < 1:
        raise ValueError("window length must be >= 1")
    L = words.length_L(params, level)
    if method == "compressed":
        count, scanned = _count_compressed(params, n, level, cap)
        prev = _count_compressed(params, n, level - 1, cap)[0] if level >= 1 else None
    elif method == "materialized":
        count, scanned = complexity_materialized(params, n, level, cap), L
        prev = complexity_materialized(params, n, level - 1, cap) if level >= 1 else None
    else:
        raise ValueError(f"unknown method {method!r}")
    sb = structural_bound_for(params, n)
    return ComplexityEntry(
        n=n, count=count, level=level, prefix_length=L,
        stable=None if prev is None else prev == count, previous_count=prev,
        scanned_symbols=scanned, method=method,
        structural_bound=sb[1] if sb else None,
    )


def complexity_sam(params: ParamSeq, ns: Sequence[int], level: int,
                   cap: int = DEFAULT_SCAN_CAP) -> dict[int, int]:
    """Independent count of distinct n-windows via a suffix automaton over the fragments."""
    span = max(ns)
    frags = _fragments_cached(params, "B", level, span, cap)
    counts = distinct_factor_counts(frags, span)
    return {n: int(counts[n]) for n in ns}


@dataclass
class RightSpecial:
    n: int
    count: int  # words with >= 2 right extensions
    excess: int  # sum over words of (#extensions - 1)
    dead_ends: int  # n-windows with no extension inside the scan
    p_n: int
    p_n1: int

    @property
    def identity_holds(self) -> bool:
        return self.p_n1 - self.p_n == self.excess


def right_special(params: ParamSeq, n: int, level: int,
                  cap: int = DEFAULT_SCAN_CAP) -> RightSpecial:
    frags = _fragments_cached(params, "B", level, n + 1, cap)
    text, reps = _distinct_reps(frags, n + 1)
    isz = text.itemsize
    tb = text.tobytes()
    ext: dict[bytes, int] = {}
    for r in reps.tolist():
        key = tb[r * isz:(r + n) * isz]
        ext[key] = ext.get(key, 0) + 1
    p_n = len(_distinct_reps(frags, n)[1])
    count = sum(1 for v in ext.values() if v >= 2)
    excess = sum(v - 1 for v in ext.values())
    return RightSpecial(n, count, excess, p_n - len(ext), p_n, len(reps))


def complexity_report(params: ParamSeq, ns: Sequence[int], level: int,
                      cap: int = DEFAULT_SCAN_CAP, with_right_special: bool = True
                      ) -> ComplexityReport:
    entries = []
    for n in ns:
        e = complexity_brute(params, n, level, cap)
        if with_right_special:
            rs = right_special(params, n, level, cap)
            e.right_special, e.right_special_excess = rs.count, rs.excess
        entries.append(e)
    return ComplexityReport(entries)


def complexity_structural(params: ParamSeq, k: int) -> dict:
    """Itemised count of length-m words at m = L_k n_k^(2 n_{k+1} + 2)."""
    nk, nk1 = params[k], params[k + 1]
    L = words.length_L(params, k)
    m = L * nk ** (2 * nk1 + 2)
    items = {
        "b_within_repeated": L * nk,
        "b_across_repeats": m * nk,
        "b_towards_end": L,
        "c_within_repeated": L,
        "c_towards_end": nk * L,
        "across_two_blocks": 4 * m,
    }
    total = sum(items.values())
    bound = m * (3 * nk + 6)
    return {"k": k, "m": m, "items": items, "itemized_sum": total, "bound": bound,
            "holds": total <= bound and L <= m}


# ---------------------------------------------------------------------------
# double brackets and frequencies


def _array(x) -> np.ndarray:
    if isinstance(x, GrammarWord):
        return words.materialize(x)
    if isinstance(x, np.ndarray):
        return x
    if isinstance(x, (bytes, bytearray)):
        return np.frombuffer(bytes(x), dtype=np.uint8)
    if isinstance(x, str):
        return np.frombuffer(x.encode("utf-32-le"), dtype="<u4")
    return np.asarray(list(x), dtype=np.int64)


class DoubleBracket:
    """[[omega]] for one or several base words of a common length."""

    def __init__(self, *bases, name: str = ""):
        arrs = [_array(b) for b in bases]
        if not arrs:
            raise ValueError("need at least one base word")
        n = len(arrs[0])
        if any(len(a) != n for a in arrs):
            raise ValueError("base words must share one length")
        self.n = n
        self.name = name
        dtype = np.result_type(*arrs)
        self._set = WindowSet([np.concatenate([a, a]).astype(dtype) for a in arrs], n)

    def __len__(self) -> int:
        return len(self._set)

    def __contains__(self, w) -> bool:
        a = _array(w)
        if len(a) != self.n:
            return False
        return bool(self._set.match(a.astype(self._set.ref.dtype))[0])

    def match(self, text: np.ndarray) -> np.ndarray:
        return self._set.match(text.astype(self._set.ref.dtype, copy=False))


def in_double_bracket(omega, w) -> bool:
    a, b = _array(omega), _array(w)
    if len(a) != len(b):
        raise ValueError("length mismatch")
    if len(a) == 0:
        return True
    dt = np.result_type(a, b)
    hay = np.concatenate([a, a]).astype(dt).tobytes()
    needle = b.astype(dt).tobytes()
    isz = np.dtype(dt).itemsize
    i = hay.find(needle)
    while i >= 0:
        if i % isz == 0:
            return True
        i = hay.find(needle, i + 1)
    return False


@dataclass
class FrequencyReport:
    tower: str
    target: str
    scan_level: int
    N: int  # L_{scan_level}
    window: int
    count: int
    windows_scanned: int
    tail_discarded: int
    lower_bound: Optional[Fraction] = None

    @property
    def frequency(self) -> Fraction:
        return Fraction(self.count, self.N)


@lru_cache(maxsize=4)
def _scan_text(params: ParamSeq, tower: str, level: int, cap: int) -> np.ndarray:
    w = words.orbit_prefix(params, tower, level).word
    if w.length > cap:
        raise CapExceeded(w.length, cap, "scan")
    text = words.materialize(w, cap)
    text.flags.writeable = False
    return text


@lru_cache(maxsize=64)
def _scan_count(params: ParamSeq, tower: str, level: int, target: "DoubleBracket", cap: int) -> int:
    return count_in(target, _scan_text(params, tower, level, cap))


@lru_cache(maxsize=32)
def target_bf(params: ParamSeq, m: int) -> DoubleBracket:
    """[[B_m^F]]: the union of [[b_{m,i}]]."""
    tw = words.tower(params)
    return DoubleBracket(*tw.F(m), name=f"[[B_{m}^F]]")


@lru_cache(maxsize=32)
def target_c(params: ParamSeq, m: int) -> DoubleBracket:
    return DoubleBracket(words.tower(params).c(m), name=f"[[c_{m}]]")


@lru_cache(maxsize=32)
def target_b(params: ParamSeq, m: int, j: int) -> DoubleBracket:
    return DoubleBracket(words.tower(params).b(m, j), name=f"[[b_{m},{j}]]")


def count_in(target: DoubleBracket, text: np.ndarray) -> int:
    return int(np.count_nonzero(target.match(text)))


def frequency(params: ParamSeq, tower: str, target: DoubleBracket, k_scan: int,
              cap: int = DEFAULT_SCAN_CAP) -> FrequencyReport:
    """Fraction of positions i < L_{k_scan} whose window lies in ``target``."""
    tower = tower.upper()
    text = _scan_text(params, tower, k_scan, cap)
    n = target.n
    cnt = _scan_count(params, tower, k_scan, target, cap)
    return FrequencyReport(tower.upper(), target.name, k_scan, len(text), n, cnt,
                           max(len(text) - n + 1, 0), min(n - 1, len(text)))


def frequency_naive(target: DoubleBracket, text: np.ndarray) -> int:
    """Window-by-window membership; reference for :func:`frequency`."""
    members = set(target._set.members())
    tb, isz, n = text.tobytes(), text.itemsize, target.n
    return sum(tb[i * isz:(i + n) * isz] in members for i in range(len(text) - n + 1))


# ---------------------------------------------------------------------------
# interior and multiplicity counts


def _interior_formula(params: ParamSeq, m: int, tower: str) -> int:
    L0, L1 = words.length_L(params, m), words.length_L(params, m + 1)
    nm, nm1 = params[m], params[m + 1]
    if tower == "B":
        return L1 - L0 - L0 * nm ** (2 * nm1 + 3)
    return L1 - L0 * (nm + 1)


def _multiplicity_formula(params: ParamSeq, m: int, k: int, tower: str) -> int:
    out = 1
    for i in range(m + 2, k + 1):
        ratio = words.length_L(params, i) // words.length_L(params, i - 1)
        out *= ratio - (1 if tower == "B" else params[i - 1])
    return out


@dataclass
class InteriorReport:
    tower: str
    m: int
    k: int
    I_formula: int
    I_true: Optional[int]
    M_formula: int
    M_true: int
    L_k: int
    product_bound: Fraction  # I_formula * M_formula / L_k
    scanned_frequency: Optional[Fraction] = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        ok = self.M_formula <= self.M_true
        if self.tower == "C":
            ok = ok and self.M_formula == self.M_true
        if self.I_true is not None:
            ok = ok and self.I_formula <= self.I_true
        if self.scanned_frequency is not None:
            ok = ok and self.scanned_frequency >= self.product_bound
        return ok


def interior_multiplicity(params: ParamSeq, m: int, k: int, tower: str,
                          cap: int = DEFAULT_SCAN_CAP) -> InteriorReport:
    """I_m and M_m: formula lower bounds next to exact counts."""
    tower = tower.upper()
    if not m < k:
        raise ValueError("need m < k")
    tw = words.tower(params)
    Lk = tw.L(k)
    I_f = _interior_formula(params, m, tower)
    M_f = _multiplicity_formula(params, m, k, tower)
    notes = []
    if tower == "B":
        target = target_bf(params, m)
        blocks = tw.F(m + 1)
        top = tw.b(k, 1)
        M_t = sum(v for lab, v in words.block_counts(top, m + 1).items() if lab[0] == "b")
    else:
        target = target_c(params, m)
        blocks = [tw.c(m + 1)]
        top = tw.c(k)
        M_t = words.block_counts(top, m + 1).get(("c", m + 1, 0), 0)
    I_t: Optional[int] = None
    if all(b.length <= cap for b in blocks):
        I_t = min(count_in(target, words.materialize(b, cap)) for b in blocks)
    else:
        notes.append("interior scan skipped: cap exceeded")
    freq = None
    if Lk <= cap:
        freq = Fraction(_scan_count(params, tower, k, target, cap), Lk)
    else:
        notes.append("orbit scan skipped: cap exceeded")
    return InteriorReport(tower, m, k, I_f, I_t, M_f, M_t, Lk,
                          Fraction(max(I_f, 0) * M_f, Lk), freq, notes)


# ---------------------------------------------------------------------------
# approximate equality of [[b_{k,m}]] frequencies


@dataclass
class AsEqualReport:
    k: int
    m: int
    j: int
    scan_level: int
    N: int
    count_m: int
    count_j: int
    decomposition_bound: int  # crossing + interior terms of the counting argument
    bound: Fraction  # 2 / n_k

    @property
    def difference(self) -> int:
        return abs(self.count_m - self.count_j)

    @property
    def gap(self) -> Fraction:
        return Fraction(self.difference, self.N)

    @property
    def passed(self) -> bool:
        return self.difference <= self.decomposition_bound and self.gap <= self.bound


def asequal_gap(params: ParamSeq, k: int, m: int, j: int, k_scan: int,
                cap: int = DEFAULT_SCAN_CAP) -> AsEqualReport:
    tw = words.tower(params)
    nk = params[k]
    for idx in (m, j):
        if not 1 <= idx <= nk:
            raise IndexError(f"index {idx} out of range 1..{nk}")
    if k_scan < k + 1:
        raise ValueError("scan level must be at least k+1")
    text = _scan_text(params, "B", k_scan, cap)
    cm = _scan_count(params, "B", k_scan, target_b(params, k, m), cap)
    cj = _scan_count(params, "B", k_scan, target_b(params, k, j), cap)
    Lk = tw.L(k)
    nk1 = params[k + 1]
    blocks = words.block_counts(tw.b(k_scan, 1), k + 1)
    total_blocks = sum(blocks.values())
    interior = 0
    for (kind, _, i), cnt in blocks.items():
        per = Lk * nk * nk ** (2 * (nk1 - i + 1)) if kind == "b" else Lk * nk
        interior += cnt * per
    crossing = Lk * total_blocks
    return AsEqualReport(k, m, j, k_scan, len(text), cm, cj, crossing + interior,
                         Fraction(2, nk))


# ---------------------------------------------------------------------------
# loosely Bernoulli windows


def square_windows(w: GrammarWord, offsets: Sequence[int], cap: int = DEFAULT_SCAN_CAP
                   ) -> list[np.ndarray]:
    """Length-|w| windows of ww starting at the given offsets (0 <= offset <= |w|)."""
    if 2 * w.length > cap:
        raise CapExceeded(2 * w.length, cap, "scan")
    a = words.materialize(w, cap)
    ww = np.concatenate([a, a])
    return [ww[o:o + len(a)] for o in offsets]


def lb_bound(params: ParamSeq, k: int) -> Fraction:
    """L_{k-1}(n_{k-1} + 2) / L_k."""
    return Fraction(words.length_L(params, k - 1) * (params[k - 1] + 2), words.length_L(params, k))
