"""Subadditive entropy rates and their certificates.

Every dynamical quantity is a limit of a_N / N for a subadditive sequence,
so each partial value is a certified upper bound.  Estimates carry the whole
sequence, a stabilization gap, and the increments a_N - a_{N-1}; for Markov
measures the increments hit the exact rate from N = 2.
"""

import math

import coverentropy as ce

LOG_GOLDEN = math.log((1 + math.sqrt(5)) / 2)

fs = ce.full_shift(2)
ber = ce.bernoulli(fs, [0.5, 0.5])
cyl_f = ce.cylinder_partition(fs, 1)
X_f = ce.trivial_partition(fs, 1)

est = ce.entropy_rate(ber, cyl_f, X_f, n_max=10)
print("full shift, Bernoulli(1/2):", est.running_inf, f"({est.exactness})")

gm = ce.golden_mean()
parry = ce.markov(gm, [[0.6180339887498949, 0.3819660112501051], [1, 0]])
cyl = ce.cylinder_partition(gm, 1)
X = ce.trivial_partition(gm, 1)

top = ce.covering_rate(cyl, X, n_max=15)
est = ce.entropy_rate(parry, cyl, X, n_max=8)
print("\ngolden mean (log golden ratio =", LOG_GOLDEN, ")")
print("  counting rate running inf :", top.running_inf)
print("  Parry rate running inf    :", est.running_inf)
print("  Parry increments          :", [round(v, 9) for v in est.increments[:4]])
print("  stabilization gap         :", est.stabilization_gap)

# an overlapping cover: the joined-cover rate needs the ordering search and
# reports per-window exactness
fs3 = ce.full_shift(3)
mu3 = ce.bernoulli(fs3, [1 / 3, 1 / 3, 1 / 3])
U = ce.family_of_words(fs3, 1, [["0", "1"], ["1", "2"]], "cover")
X3 = ce.trivial_partition(fs3, 1)
minus = ce.joined_cover_rate(mu3, U, X3, n_max=4)
print("\n3-shift overlap cover, joined-cover rate:")
for e in minus.entries:
    print(f"   N={e.N}  a_N={e.value:.6f}  a_N/N={e.per_step:.6f}  exact={e.exact}")
print("  certified running inf:", minus.certified_running_inf)

plus = ce.refining_partition_rate(mu3, U, X3, n_max=6, window=1)
print("  best finer-partition rate (window 1):", plus.value,
      f"over {plus.candidate_count} candidates")

# the power identity is exact per matched window
rep = ce.power_identity_check(parry, cyl, X, M=2, n_max=3)
print("\npower identity (M=2):", rep.verdict, " max gap:", rep.max_gap)
