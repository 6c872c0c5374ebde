"""
Frequencies along the two towers
================================

The B tower follows b_{k,1} and the C tower follows c_k.  Counting how often a
window falls in a double bracket [[w]] (cyclic rotations of w) along these
prefixes is the finite stand-in for the measure of that set.
"""
from feldshift import analysis
from feldshift.params import ParamSeq

ps = ParamSeq.from_list([2, 2, 2])

###############################################################################
# Mass near the extended words vs near c

bf = analysis.frequency(ps, "B", analysis.target_bf(ps, 1), 2)
cc = analysis.frequency(ps, "C", analysis.target_c(ps, 1), 2)
print(f"B tower, [[B_1^F]]: {bf.count}/{bf.N} ~ {float(bf.frequency):.6f} (tail {bf.tail_discarded})")
print(f"C tower, [[c_1]]:   {cc.count}/{cc.N} ~ {float(cc.frequency):.6f}")
print("B tower, [[c_1]]:  ", float(analysis.frequency(ps, "B", analysis.target_c(ps, 1), 2).frequency))

###############################################################################
# Interior and multiplicity counts
# --------------------------------
# The formulas are lower bounds; the scans give the true values.

for tower in "BC":
    for m, k in [(0, 1), (0, 2), (1, 2)]:
        r = analysis.interior_multiplicity(ps, m, k, tower)
        print(f"{tower} m={m} k={k}: I {r.I_formula} <= {r.I_true}, M {r.M_formula} <= {r.M_true},"
              f" freq {float(r.scanned_frequency):.5f} >= {float(r.product_bound):.5f}")

###############################################################################
# Distinct extended words get almost the same mass

r = analysis.asequal_gap(ps, 1, 1, 2, 2)
print(f"\n|count(b_1,1) - count(b_1,2)| = {r.difference} over N = {r.N};"
      f" counting bound {r.decomposition_bound}, ratio bound {r.bound}")
