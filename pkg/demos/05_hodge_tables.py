"""Recovering Hodge-number candidates from an E-polynomial and Betti data.

For the moduli space with two distinct diagonal holonomy classes the
E-polynomial is q^4+2q^3+6q^2+2q+1 and the ordinary Poincare polynomial
is 10t^4+2t^3+3t^2+1.  Duality for the smooth 4-fold turns the latter
into compactly supported Betti numbers; column sums, alternating row
sums, and the weight bound 2p <= k then pin the table of h_c^{k,p,p}
down to finitely many candidates.
"""

from charvar import (compact_betti_from_poincare, default_instance,
                     enumerate_tables, forced_entries)

e_coeffs, poincare, dim = default_instance()
betti = compact_betti_from_poincare(poincare, dim)
print(f"E-polynomial coefficients (e_0..e_{dim}): {e_coeffs}")
print(f"compact Betti numbers b_c^0..b_c^{2 * dim}: {betti.values}")

tables = enumerate_tables(e_coeffs, betti)
print(f"\n{len(tables)} candidate tables")

# what every candidate agrees on
forced = forced_entries(tables)
interesting = {kp: v for kp, v in forced.items() if v}
print(f"forced nonzero entries: "
      f"{ {f'h[{k}][{p}]': v for (k, p), v in sorted(interesting.items())} }")
print(f"plus {sum(1 for v in forced.values() if not v)} forced zeros "
      f"(including the whole k=7 column and h[8][p]=0 for p <= 3)")

# one candidate in full
print("\nfirst table (rows k = 0..8, columns p = 0..4):")
for k, row in enumerate(tables[0].h):
    print(f"  k={k}: {list(row)}")

# the free parameters: which k=6 cell among p=0,1,2 holds the extra unit,
# and how the two k=5 units distribute over p=0,1,2
patterns = sorted({(tuple(t[6, pp] for pp in range(3)),
                    tuple(t[5, pp] for pp in range(3))) for t in tables})
print(f"\n(k=6, k=5) row patterns over p=0..2: {len(patterns)} combinations "
      "= 3 choices x 6 compositions")

# dropping the weight bound loses the smoothness information
unbounded = enumerate_tables(e_coeffs, betti, weight_bound=False)
print(f"\nwithout the weight bound: {len(unbounded)} tables "
      f"(vs {len(tables)} with it)")
