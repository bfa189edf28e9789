"""Sliding-block codes, pushforwards, factor invariance, ergodic
decomposition, and conditioning on a factor.
"""

import numpy as np

import coverentropy as ce
from coverentropy import measures

gm = ce.golden_mean()
parry = ce.markov(gm, [[0.6180339887498949, 0.3819660112501051], [1, 0]])

# the 2-block recoding onto the 3-letter vertex shift is injective, so the
# image measure is Markov again
vertex = ce.sft([[1, 1, 0], [0, 0, 1], [1, 1, 0]])
phi = ce.FactorMap(gm, vertex, 2, (0, 1, 2))
nu = ce.pushforward(phi, parry)
print("pushforward pi:", np.round(nu.pi, 6))

U = ce.family_of_words(vertex, 1, [["0", "1"], ["1", "2"]], "cover")
beta = ce.cylinder_partition(vertex, 1)
rep = ce.factor_invariance_check(phi, parry, U, beta, n_max=6)
print("factor invariance:", rep.verdict, " max per-window gap:", rep.gap)

# a 2-to-1 letter merge is not injective; the pushforward is evaluated by
# exact preimage transport instead
merge = ce.FactorMap(gm, ce.full_shift(2), 2, (0, 1, 1))
nu2 = ce.pushforward(merge, parry)
print("\nmerged-code pushforward type:", type(nu2).__name__)
print("letter masses:", measures.weights_for(nu2, merge.codomain, 1))

# ergodic decomposition: two full 2-shifts glued side by side
blk = ce.sft([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]])
P = [[0.5, 0.5, 0, 0], [0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5], [0, 0, 0.5, 0.5]]
c1 = measures.InvariantMeasure(
    "markov", blk, pi=np.array([0.5, 0.5, 0.0, 0.0]), P=np.array(P, dtype=float)
)
c2 = measures.InvariantMeasure(
    "markov", blk, pi=np.array([0.0, 0.0, 0.5, 0.5]), P=np.array(P, dtype=float)
)
comps = [measures.ErgodicComponent(0.3, c1), measures.ErgodicComponent(0.7, c2)]
mixed = ce.mix(comps)
back = ce.ergodic_decompose(mixed)
print("\nmixture decomposes into weights:", [round(c.weight, 6) for c in back])

alpha = ce.cylinder_partition(blk, 1)
X = ce.trivial_partition(blk, 1)
rep = ce.ergodic_additivity_check(comps, alpha, X, n_max=8)
print("rate additivity over components:", rep.verdict,
      " mixture:", round(rep.lhs, 9), " weighted:", round(rep.rhs, 9))

# conditioning on the factor sigma-algebra, approximated by pullbacks of the
# codomain cylinder partitions at growing windows
mu = ce.markov(gm, [[0.7, 0.3], [1.0, 0.0]])
U3 = ce.family_of_words(
    gm, 3, [["000", "001"], ["001", "010", "100"], ["100", "101"]], "cover"
)
rep = ce.factor_conditioned_profile(mu, merge, U3, windows=(1, 2, 3), n_max=5)
print("\nfactor-conditioned values by window:",
      [round(v, 6) for v in rep.details["static_values"]])
