"""
Windows of c_k c_k are f-bar close
==================================

All length-L_k windows of c_k c_k are rotations of c_k, which is almost all c_{k-1}
blocks.  Their pairwise f-bar distance stays below L_{k-1}(n_{k-1}+2)/L_k.
"""
import random

from feldshift import analysis, fbar, words
from feldshift.params import ParamSeq

ps = ParamSeq.from_list([2, 2, 2])
c1 = words.build_c(ps, 1)
L = c1.length

rng = random.Random(1)
offsets = sorted({0} | set(rng.sample(range(1, L), 39)))
W = analysis.square_windows(c1, offsets)
bound = analysis.lb_bound(ps, 1)
res = fbar.lb_test(W, bound, jobs=4, keep_matrix=True)
print(f"{res.pairs} pairs, max fbar {res.max_fbar} (bound {bound}), witness offsets",
      [offsets[i] for i in res.witness])

# the extended words themselves are far apart, so they fail any small epsilon
tw = words.tower(ps)
far = fbar.lb_test([words.materialize(tw.b(1, 1)), words.materialize(tw.b(1, 2))], bound)
print("b_1,1 vs b_1,2:", far.max_fbar, "passes:", far.passed)
