"""
The f-bar distance between construction words
=============================================

f-bar(x, y) = 1 - 2 LCS(x, y) / (|x| + |y|).  The separation between distinct
level-k words is what keeps the invariant measures apart; here we compute it
exactly for the words we can afford and check the deletion lemma on them.
"""
from fractions import Fraction

from feldshift import fbar, params, words
from feldshift.params import ParamSeq

###############################################################################
# Level-one words
# ---------------
# a_1,1 and a_1,2 differ only in how the two letters are grouped.

for n in ([2, 2], [2, 3]):
    ps = ParamSeq.from_list(n)
    for r, s in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        res = fbar.fbar_words(ps, 1, ("a", 1, r), ("a", 2, s))
        print(f"n={n}  fbar(a_1,1^{r}, a_1,2^{s}) = {res.match.fbar}  (complement {res.match.fbar_c})")

###############################################################################
# Extended words and deletions
# ----------------------------
# b_1,i is a_1,i followed by c_0.  Deleting that one symbol on each side moves
# f-bar by at most twice the deleted fraction.

ps = ParamSeq.from_list([2, 2])
tw = words.tower(ps)
b1, b2 = words.materialize(tw.b(1, 1)), words.materialize(tw.b(1, 2))
g = fbar.gerber_check(b1, b2, ({len(b1) - 1}, {len(b2) - 1}))
print(f"fbar(b) = {g.fbar_b}, fbar(a) = {g.fbar_a}, rho = {g.rho}, slack = {g.slack}")

###############################################################################
# One optimal match
# -----------------
# Hirschberg recovery gives a concrete common subsequence.

pairs = fbar.alignment(b1[:40], b2[:40])
print("matched prefix pairs:", pairs[:8], "...", len(pairs), "pairs")

###############################################################################
# The Gamma sequence
# ------------------
# The thresholds 7/8 and 5/8 are only proved when the Gamma sequence stays below
# 1/8.  At n = (2, 2) the ratio n/(n-2) is undefined, so we look at the witness.

wit = ParamSeq.from_rule("4^(k+4)", 20)
gam = params.gamma(wit, 20).gamma
print("Gamma_1 =", gam[1], " Gamma_20 ~", float(gam[20]), " bounded:", max(gam) <= Fraction(1, 8))
