"""Grammar-compressed construction of the Feldman, extended Feldman and c-words.

Words are DAGs of three node kinds (:class:`Terminal`, :class:`Power`,
:class:`Concat`) with exact integer lengths.  Nothing is expanded unless asked for
through :func:`extract` or :func:`materialize`, both of which honour a cap.

Symbol ids: ``a_{0,i}`` is ``i - 1`` for ``1 <= i <= n_0`` and ``c_0`` is ``n_0``.
Expanded words are returned as numpy arrays (``uint8`` when the alphabet fits in a
byte, ``uint16`` otherwise).
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .params import ParamError, ParamSeq

__all__ = [
    "GrammarWord", "Terminal", "Power", "Concat", "Tower", "OrbitPrefix",
    "DEFAULT_MATERIALIZE_CAP", "CapExceeded",
    "build_feldman", "build_extended", "build_c", "length_L",
    "symbol_at", "extract", "materialize", "orbit_prefix", "min_gap",
    "block_counts", "symbol_names", "word_stats",
]

DEFAULT_MATERIALIZE_CAP = 10**8

# nodes shorter than this keep their expansion cached as bytes
_SMALL = 1 << 12


class CapExceeded(RuntimeError):
    def __init__(self, needed: int, cap: int, what: str = "materialization"):
        size = str(needed) if needed.bit_length() <= 64 else f"~2^{needed.bit_length() - 1}"
        super().__init__(f"{what} of {size} symbols exceeds cap {cap}")
        self.needed = needed
        self.cap = cap


class GrammarWord:
    """Base node.  Immutable once built; ``length`` is an exact int."""

    __slots__ = ("length", "depth", "max_symbol", "label", "_bytes")

    def __len__(self) -> int:  # only valid while the length fits a machine index
        return self.length

    @property
    def itemsize(self) -> int:
        return 1 if self.max_symbol < 256 else 2

    def _small_bytes(self) -> Optional[bytes]:
        if self.length > _SMALL:
            return None
        if self._bytes is None:
            out = bytearray()
            _emit(self, 0, self.length, out, self.itemsize, own_cache=False)
            self._bytes = bytes(out)
        return self._bytes

    def __repr__(self) -> str:
        tag = f" {self.label}" if self.label else ""
        return f"<{type(self).__name__}{tag} len={self.length}>"


class Terminal(GrammarWord):
    __slots__ = ("symbol",)

    def __init__(self, symbol: int, label=None):
        self.symbol = symbol
        self.length = 1
        self.depth = 0
        self.max_symbol = symbol
        self.label = label
        self._bytes = None


class Power(GrammarWord):
    __slots__ = ("child", "exponent")

    def __init__(self, child: GrammarWord, exponent: int, label=None):
        if exponent < 1:
            raise ValueError("exponent must be >= 1")
        self.child = child
        self.exponent = exponent
        self.length = child.length * exponent
        self.depth = child.depth + 1
        self.max_symbol = child.max_symbol
        self.label = label
        self._bytes = None


class Concat(GrammarWord):
    __slots__ = ("children", "offsets")

    def __init__(self, children: Sequence[GrammarWord], label=None):
        if not children:
            raise ValueError("empty concatenation")
        self.children = tuple(children)
        offs = [0]
        for c in self.children:
            offs.append(offs[-1] + c.length)
        # offsets[i] is where child i starts; offsets[-1] is the total length
        self.offsets = tuple(offs)
        self.length = offs[-1]
        self.depth = 1 + max(c.depth for c in self.children)
        self.max_symbol = max(c.max_symbol for c in self.children)
        self.label = label
        self._bytes = None


# ---------------------------------------------------------------------------
# construction


class Tower:
    """Builds and caches every word of the construction for one ``ParamSeq``."""

    def __init__(self, params: ParamSeq):
        self.params = params
        n0 = params[0]
        self.alphabet_size = n0 + 1
        self._a: dict[tuple[int, int], GrammarWord] = {}
        self._b: dict[tuple[int, int], GrammarWord] = {}
        self._c: dict[int, GrammarWord] = {}
        self._L: dict[int, int] = {0: 1}
        for i in range(1, n0 + 1):
            t = Terminal(i - 1, label=("a", 0, i))
            self._a[(0, i)] = t
            self._b[(0, i)] = Terminal(i - 1, label=("b", 0, i))
        self._c[0] = Terminal(n0, label=("c", 0, 0))

    def n(self, k: int) -> int:
        return self.params[k]

    def L(self, k: int) -> int:
        if k < 0:
            raise ParamError("level must be >= 0")
        top = max(self._L)
        for j in range(top, k):
            self._L[j + 1] = (1 + self.n(j) ** (4 * self.n(j + 1) + 3)) * self._L[j]
        return self._L[k]

    def _check(self, k: int, i: int):
        if k < 0:
            raise ParamError(f"level must be >= 0, got {k}")
        if not 1 <= i <= self.n(k):
            raise ParamError(f"index {i} out of range 1..{self.n(k)} at level {k}")

    def _block(self, parts: list[GrammarWord], k: int, i: int) -> GrammarWord:
        nk, nk1 = self.n(k), self.n(k + 1)
        inner = nk ** (2 * (i + nk1))
        outer = nk ** (2 * (nk1 - i + 1))
        body = Concat([Power(p, inner) for p in parts])
        return Power(body, outer)

    def a(self, k: int, i: int) -> GrammarWord:
        self._check(k, i)
        key = (k, i)
        if key not in self._a:
            prev = [self.a(k - 1, h) for h in range(1, self.n(k - 1) + 1)]
            w = self._block(prev, k - 1, i)
            w.label = ("a", k, i)
            self._a[key] = w
        return self._a[key]

    def b(self, k: int, i: int) -> GrammarWord:
        self._check(k, i)
        key = (k, i)
        if key not in self._b:
            prev = [self.b(k - 1, h) for h in range(1, self.n(k - 1) + 1)]
            w = Concat([self._block(prev, k - 1, i), self.c(k - 1)], label=("b", k, i))
            self._b[key] = w
        return self._b[key]

    def c(self, k: int) -> GrammarWord:
        if k < 0:
            raise ParamError(f"level must be >= 0, got {k}")
        if k not in self._c:
            nprev = self.n(k - 1)
            reps = self.L(k) // self.L(k - 1) - nprev
            tail = [self.b(k - 1, h) for h in range(1, nprev + 1)]
            self._c[k] = Concat([Power(self.c(k - 1), reps)] + tail, label=("c", k, 0))
        return self._c[k]

    def F(self, k: int) -> list[GrammarWord]:
        """The extended Feldman words b_{k,1..n_k}."""
        return [self.b(k, i) for i in range(1, self.n(k) + 1)]


@lru_cache(maxsize=32)
def _tower(params: ParamSeq) -> Tower:
    return Tower(params)


def tower(params: ParamSeq) -> Tower:
    return _tower(params)


def build_feldman(params: ParamSeq, k: int, i: int) -> GrammarWord:
    """The Feldman word a_{k,i}."""
    return _tower(params).a(k, i)


def build_extended(params: ParamSeq, k: int, i: int) -> GrammarWord:
    """The extended Feldman word b_{k,i}; b_{0,i} is the letter a_{0,i}."""
    return _tower(params).b(k, i)


def build_c(params: ParamSeq, k: int) -> GrammarWord:
    if k < 1:
        raise ParamError("c_0 is a symbol; build_c needs k >= 1")
    return _tower(params).c(k)


def length_L(params: ParamSeq, k: int) -> int:
    return _tower(params).L(k)


# ---------------------------------------------------------------------------
# access


def symbol_at(w: GrammarWord, pos: int) -> int:
    if not 0 <= pos < w.length:
        raise IndexError(f"position {pos} out of range for length {w.length}")
    node = w
    while True:
        if isinstance(node, Terminal):
            return node.symbol
        if isinstance(node, Power):
            pos %= node.child.length
            node = node.child
        else:
            j = bisect.bisect_right(node.offsets, pos) - 1
            pos -= node.offsets[j]
            node = node.children[j]


def _emit(node: GrammarWord, start: int, length: int, out: bytearray, itemsize: int,
          own_cache: bool = True) -> None:
    """Append ``node[start:start+length]`` to ``out``."""
    if length <= 0:
        return
    if own_cache and 1 < node.length <= _SMALL and node.itemsize == itemsize:
        cached = node._small_bytes()
        out += cached[start * itemsize:(start + length) * itemsize]
        return
    if isinstance(node, Terminal):
        out += node.symbol.to_bytes(itemsize, "little") * length
        return
    if isinstance(node, Power):
        child = node.child
        cl = child.length
        r = start % cl
        if r:
            take = min(cl - r, length)
            _emit(child, r, take, out, itemsize)
            length -= take
        if length <= 0:
            return
        full, rest = divmod(length, cl)
        if full:
            cb = child._small_bytes() if child.itemsize == itemsize else None
            if cb is not None:
                out += cb * full
            else:
                mark = len(out)
                _emit(child, 0, cl, out, itemsize)
                if full > 1:
                    piece = bytes(out[mark:])
                    out += piece * (full - 1)
        _emit(child, 0, rest, out, itemsize)
        return
    offs = node.offsets
    j = bisect.bisect_right(offs, start) - 1
    while length > 0:
        child = node.children[j]
        local = start - offs[j]
        take = min(child.length - local, length)
        _emit(child, local, take, out, itemsize)
        length -= take
        start += take
        j += 1


def extract(w: GrammarWord, start: int, length: int,
            cap: int = DEFAULT_MATERIALIZE_CAP) -> np.ndarray:
    """Symbols ``w[start:start+length]`` as a numpy array."""
    if length < 0 or start < 0 or start + length > w.length:
        raise IndexError(f"range [{start}, {start + length}) outside word of length {w.length}")
    if length > cap:
        raise CapExceeded(length, cap)
    out = bytearray()
    isz = w.itemsize
    _emit(w, start, length, out, isz)
    return np.frombuffer(bytes(out), dtype=np.uint8 if isz == 1 else "<u2")


def materialize(w: GrammarWord, cap: int = DEFAULT_MATERIALIZE_CAP) -> np.ndarray:
    return extract(w, 0, w.length, cap)


def symbol_names(params: ParamSeq) -> list[str]:
    n0 = params[0]
    return [f"a{i}" for i in range(1, n0 + 1)] + ["c0"]


def word_stats(w: GrammarWord) -> dict:
    seen: set[int] = set()
    stack = [w]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Power):
            stack.append(node.child)
        elif isinstance(node, Concat):
            stack.extend(node.children)
    return {"length": w.length, "nodes": len(seen), "depth": w.depth,
            "label": list(w.label) if w.label else None}


def block_counts(w: GrammarWord, level: int) -> dict[tuple, int]:
    """Multiplicity of each labelled level-``level`` block in the decomposition of ``w``."""
    memo: dict[int, dict] = {}

    def walk(node: GrammarWord) -> dict:
        key = id(node)
        if key in memo:
            return memo[key]
        if node.label is not None and node.label[1] == level and node.label[0] in "bc":
            res = {node.label: 1}
        elif isinstance(node, Terminal):
            raise ValueError(f"word does not decompose into level-{level} blocks")
        elif isinstance(node, Power):
            res = {k: v * node.exponent for k, v in walk(node.child).items()}
        else:
            res = {}
            for ch in node.children:
                for k, v in walk(ch).items():
                    res[k] = res.get(k, 0) + v
        memo[key] = res
        return res

    return walk(w)


# ---------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class OrbitPrefix:
    """Length-L_k prefix of b_{inf,1} (tower ``"B"``) or of the c-point (``"C"``)."""

    params: ParamSeq
    tower: str
    level: int
    word: GrammarWord

    def prefix(self, level: int) -> "OrbitPrefix":
        if level > self.level:
            raise ValueError("can only restrict to a lower level")
        return orbit_prefix(self.params, self.tower, level)

    @property
    def length(self) -> int:
        return self.word.length


def orbit_prefix(params: ParamSeq, tower: str, k: int) -> OrbitPrefix:
    t = tower.upper()
    tw = _tower(params)
    if t == "B":
        w = tw.b(k, 1)
    elif t == "C":
        w = tw.c(k)
    else:
        raise ValueError(f"tower must be 'B' or 'C', got {tower!r}")
    return OrbitPrefix(params, t, k, w)


def _occurrences(text: bytes, pat: bytes, itemsize: int) -> list[int]:
    out = []
    i = text.find(pat)
    while i >= 0:
        if i % itemsize == 0:
            out.append(i // itemsize)
        i = text.find(pat, i + 1)
    return out


@dataclass
class GapResult:
    occurrences: int
    max_gap: Optional[int]  # None: fewer than two occurrences
    least_level: Optional[int]
    bound: Optional[int]  # 2 L_{least_level + 1}

    @property
    def within_bound(self) -> Optional[bool]:
        if self.max_gap is None or self.bound is None:
            return None
        return self.max_gap <= self.bound


def min_gap(params: ParamSeq, u: Union[Sequence[int], np.ndarray], k_scan: int,
            cap: int = DEFAULT_MATERIALIZE_CAP) -> GapResult:
    """Largest distance between consecutive occurrences of ``u`` in b_{k_scan,1}."""
    tw = _tower(params)
    arr = np.asarray(u, dtype=np.uint8 if tw.alphabet_size <= 256 else "<u2")
    isz = arr.itemsize
    pat = arr.tobytes()
    text = materialize(tw.b(k_scan, 1), cap).tobytes()
    occ = _occurrences(text, pat, isz)
    if not occ:
        raise ValueError("pattern does not occur in the scanned word")
    least = None
    for lvl in range(k_scan + 1):
        w = tw.b(lvl, 1)
        if w.length >= len(arr) and _occurrences(materialize(w, cap).tobytes(), pat, isz):
            least = lvl
            break
    gap = max((b - a for a, b in zip(occ, occ[1:])), default=None)
    bound = 2 * tw.L(least + 1) if least is not None else None
    return GapResult(len(occ), gap, least, bound)


def lengths_ratio_ok(params: ParamSeq, k: int) -> bool:
    """L_k / L_{k+1} < 1/n_k, exactly."""
    return Fraction(length_L(params, k), length_L(params, k + 1)) < Fraction(1, params[k])
