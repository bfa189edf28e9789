"""Symbolic systems and word counting.

Builds the full 2-shift, the golden-mean subshift (no "11"), and a finite
permutation, then compares word-count growth against the spectral radius of
the transition matrix.
"""

import math

import numpy as np

import coverentropy as ce

fs = ce.full_shift(2)
gm = ce.golden_mean()

print("full 2-shift, words of length 3:", ce.admissible_words(fs, 3))
print("golden mean, words of length 3: ", ce.admissible_words(gm, 3))
print("golden-mean word counts:",
      [len(ce.admissible_words(gm, n)) for n in range(1, 10)],
      "(Fibonacci)")

radius = max(abs(np.linalg.eigvals(np.array(gm.transition, dtype=float))))
print("\nlog spectral radius:", math.log(radius))
for n in (5, 10, 20):
    print(f"  (1/{n}) log #words  =", ce.word_count_growth(gm, n))

# the M-th iterate acts on non-overlapping M-blocks; block words biject
# with base words of M times the length
p2 = ce.power_system(gm, 2)
print("\n2-block power system alphabet:", ce.admissible_words(gm, 2))
print("power 2-words:", len(ce.admissible_words(p2, 2)),
      "= base 4-words:", len(ce.admissible_words(gm, 4)))

perm = ce.permutation([1, 2, 3, 0])
print("\n4-cycle squared:", ce.power_system(perm, 2).mapping, "(two 2-cycles)")
