"""
Block complexity of the subshift
================================

P(n) is the number of distinct length-n words in the language.  We read them
off b_{K,1}, which contains every word of the subshift once K is large enough;
a count that does not change from K-1 to K is reported as stable.
"""
import math

from feldshift import analysis
from feldshift.params import ParamSeq

ps = ParamSeq.from_list([2] * 8)
ns = [1, 2, 3, 4, 8, 16, 32, 64, 128, 256]

###############################################################################
# Counts by level
# ---------------
# The scan never expands b_{K,1}; it works on short fragments around every
# node boundary of the grammar.

for K in (2, 3, 4):
    print(f"K={K}:", [analysis.complexity_brute(ps, n, K).count for n in ns])

rep = analysis.complexity_report(ps, ns, 4)
print("\n  n    P(n)  stable  right-special  log P(n)/n")
for e in rep.entries:
    print(f"{e.n:4d} {e.count:6d}  {str(e.stable):6s}  {e.right_special:13d}  {math.log(e.count) / e.n:.4f}")

###############################################################################
# An independent count
# --------------------
# A suffix automaton over the same fragments gives the same numbers.

print("\nsuffix automaton:", analysis.complexity_sam(ps, ns, 4))

###############################################################################
# Right extensions
# ----------------
# P(n+1) - P(n) equals the total number of extra right extensions.

for n in (4, 16, 64):
    r = analysis.right_special(ps, n, 4)
    print(f"n={n}: P(n+1)-P(n) = {r.p_n1 - r.p_n}, sum(ext-1) = {r.excess}")

###############################################################################
# The linear bound at m = L_k n_k^(2 n_{k+1} + 2)

st = analysis.complexity_structural(ps, 0)
print("\nitemised count at m =", st["m"], ":", st["items"], "sum", st["itemized_sum"], "bound", st["bound"])
print("brute P(64) =", rep[64].count)
