"""The algebra of covers and partitions on a three-point space.

Shows refinement, joins, the ordered-difference partitions, the exhaustive
finer-partition enumeration with its budget refusal, and the cover distance.
"""

import coverentropy as ce
from coverentropy import families

sys3 = ce.permutation([0, 1, 2])  # points a=0, b=1, c=2
mu = ce.uniform_cycle_measure(sys3)

U = ce.family_of_points(sys3, [[0, 1], [1, 2]], "cover")          # {ab},{bc}
V = ce.family_of_points(sys3, [[0], [1, 2]], "partition")          # {a},{bc}
singles = ce.family_of_points(sys3, [[0], [1], [2]], "partition")

print("singles finer than U:", ce.finer(singles, U))
print("U finer than singles:", ce.finer(U, singles))

j = ce.join(U, V)
print("\nU v V elements:", [f for f in (j.elements)], "->",
      [[i for i in range(3) if m >> i & 1] for m in j.elements])
print("indexed intersections (pre-merge):",
      len(families.join_with_indices(U, singles)),
      "tuples vs", len(ce.join(U, singles)), "merged cells",
      "(joins are not literally the finer family)")

print("\nordered-difference partitions of U:")
for fam in ce.ext_partitions(U):
    print("  ", [[i for i in range(3) if m >> i & 1] for m in fam.elements])

enum = ce.ustar_enumerate(U)
print("finer-partition assignments:", enum.total)
for fam in enum:
    print("  ", [[i for i in range(3) if m >> i & 1] for m in fam.elements])

refused = ce.ustar_enumerate(U, budget=1)
print("with budget 1: refused =", refused.refused, "-- true count still",
      refused.total)

print("\ncover distance:")
print("  delta(U, U)        =", ce.family_delta(mu, U, U).value)
print("  delta(U, {a},{bc}) =", ce.family_delta(mu, U, V).value)
