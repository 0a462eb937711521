"""The counting side: SL(2,F_p), conjugacy classes, commutator fibers.

Two ways to count everything: a class-function fast path and a direct
pair-enumeration oracle.  They must agree; the oracle is the referee.
"""

from charvar import (CommutatorFiber, SL2Element, ZbarCase,
                     brute_force_count, centralizer_order, commutator,
                     commutator_fiber_distribution, count_commutator_fiber,
                     count_zbar, enumerate_sl2, rational_class_of)

p = 5

# SL(2,F_5) has 5^3 - 5 = 120 elements.
group = list(enumerate_sl2(p))
print(f"|SL(2,F_{p})| = {len(group)}")

# A commutator, the atom of everything here.
a = SL2Element(1, 1, 0, 1, p)
b = SL2Element(1, 0, 1, 1, p)
print(f"[{a.entries()}, {b.entries()}] = {commutator(a, b).entries()}")

# Rational conjugacy classes: p + 4 of them.  The trace-2 elements split
# into two classes told apart by a quadratic-residue invariant.
for m in (SL2Element.jplus(p), SL2Element(1, 2, 0, 1, p),
          SL2Element.diagonal(2, p)):
    label = rational_class_of(m)
    print(f"{m.entries()}: class {label.kind}"
          f"{'/' + str(label.detail) if label.detail is not None else ''}, "
          f"centralizer order {centralizer_order(m)}")

# The commutator-fiber distribution: #{(A,B): [A,B] = g} per class.
dist = commutator_fiber_distribution(p)
print(f"\nfiber counts per class at p={p}:")
for label, fib in sorted(dist.fibers.items(), key=lambda kv: str(kv[0])):
    print(f"  {label.kind:<11} detail={str(label.detail):<10} "
          f"fiber={fib:<6} orbit={dist.orbit_sizes[label]}")
print(f"total pairs = {dist.total_pairs()} = {len(group)}^2")

# Fast path vs oracle on a fiber and on a barred set.
target = SL2Element.diagonal(2, p)
fast = count_commutator_fiber(p, target)
brute = brute_force_count(p, CommutatorFiber(target))
print(f"\nfiber over diag(2,3): fast={fast}, brute={brute}")

case = ZbarCase("zbar22")
print(f"Zbar22 at p=5: fast={count_zbar(p, case)}, "
      f"brute={brute_force_count(p, case)}")
