"""Suffix automaton, used as an independent distinct-factor counter."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class SuffixAutomaton:
    def __init__(self, seq: Iterable[int]):
        self.length = [0]
        self.link = [-1]
        self.next: list[dict] = [{}]
        last = 0
        for ch in seq:
            cur = len(self.length)
            self.length.append(self.length[last] + 1)
            self.link.append(-1)
            self.next.append({})
            p = last
            while p != -1 and ch not in self.next[p]:
                self.next[p][ch] = cur
                p = self.link[p]
            if p == -1:
                self.link[cur] = 0
            else:
                q = self.next[p][ch]
                if self.length[p] + 1 == self.length[q]:
                    self.link[cur] = q
                else:
                    clone = len(self.length)
                    self.length.append(self.length[p] + 1)
                    self.link.append(self.link[q])
                    self.next.append(dict(self.next[q]))
                    while p != -1 and self.next[p].get(ch) == q:
                        self.next[p][ch] = clone
                        p = self.link[p]
                    self.link[q] = self.link[cur] = clone
            last = cur

    def __len__(self) -> int:
        return len(self.length)

    def distinct_by_length(self, max_len: int) -> np.ndarray:
        """``out[n]`` = number of distinct factors of length n, for n <= max_len."""
        diff = np.zeros(max_len + 2, dtype=np.int64)
        for v in range(1, len(self.length)):
            lo = self.length[self.link[v]] + 1
            hi = min(self.length[v], max_len)
            if lo <= hi:
                diff[lo] += 1
                diff[hi + 1] -= 1
        return np.cumsum(diff)[:max_len + 1]


def distinct_factor_counts(fragments: Sequence[np.ndarray], max_len: int) -> np.ndarray:
    """Distinct factors of each length over a family of words.

    The fragments are joined with pairwise distinct separator symbols; factors
    containing a separator are unique strings, so they are removed by counting
    window positions that cover a separator.
    """
    seq: list = []
    sep_pos: list[int] = []
    for i, f in enumerate(fragments):
        if i:
            sep_pos.append(len(seq))
            seq.append(("sep", i))
        seq.extend(np.asarray(f).tolist())
    sam = SuffixAutomaton(seq)
    total = sam.distinct_by_length(max_len)
    N = len(seq)
    covered = np.zeros(max_len + 1, dtype=np.int64)
    if sep_pos:
        is_sep = np.zeros(N, dtype=np.int64)
        is_sep[sep_pos] = 1
        csum = np.concatenate([[0], np.cumsum(is_sep)])
        for n in range(1, max_len + 1):
            if n > N:
                break
            covered[n] = int(np.count_nonzero(csum[n:] - csum[:-n]))
    return total - covered
