"""
Construction words as grammars
==============================

The level-k words have length L_k, which explodes: with n_k = 4^(k+4) the very
first level already has more than 256^4099 symbols.  Words are therefore kept as
a DAG of powers and concatenations, and only the pieces we look at get expanded.
"""
from feldshift import words
from feldshift.params import ParamSeq

###############################################################################
# Small parameters
# ----------------
# With n = (2, 2, ...) the level-1 words can be printed in run-length form.

small = ParamSeq.from_list([2, 2, 2])
tw = words.tower(small)
names = words.symbol_names(small)

for label, w in [("a_1,1", tw.a(1, 1)), ("a_1,2", tw.a(1, 2)), ("b_1,1", tw.b(1, 1)), ("c_1", tw.c(1))]:
    arr = words.materialize(w)
    runs, start = [], 0
    for i in range(1, len(arr) + 1):
        if i == len(arr) or arr[i] != arr[start]:
            runs.append(f"{names[arr[start]]}^{i - start}")
            start = i
    shown = " ".join(runs[:6]) + (" ..." if len(runs) > 6 else "")
    print(f"{label:6s} length {w.length:5d}: {shown}")

print("L_k for k = 0..4:", [words.length_L(small, k) for k in range(5)])

###############################################################################
# Random access
# -------------
# symbol_at walks down the DAG, so it costs depth * log(arity), not length.

c2 = tw.c(2)
print("five symbols of c_2 near its end:", words.extract(c2, c2.length - 2 * 2049 - 2, 5).tolist())
print("stats of b_2,1:", words.word_stats(tw.b(2, 1)))

###############################################################################
# The witness parameters
# ----------------------
# Here nothing can be expanded, but lengths are exact and any window can be read.

big = ParamSeq.from_rule("4^(k+4)", 6)
b = words.build_extended(big, 1, 1)
print("bits in L_1:", b.length.bit_length())
print("last three symbols of b_1,1:", words.extract(b, b.length - 3, 3).tolist(), "(256 is c_0)")
try:
    words.materialize(b)
except words.CapExceeded as e:
    print("materialize refuses:", e)

###############################################################################
# Syndetic occurrence
# -------------------
# Every word that occurs in b_2,1 comes back within 2 L_{j+1} symbols, where j is
# the first level at which it shows up.

for u in ([0], [2], words.materialize(tw.b(1, 2)).tolist()):
    g = words.min_gap(small, u, 2)
    print(f"pattern of length {len(u):4d}: {g.occurrences} hits, max gap {g.max_gap}, bound {g.bound}")
