"""Exact F_p cardinalities of the commutator-equation solution sets.

Two independent routes exist for every target and their agreement is a
test-suite contract:

* the fast path reduces everything to the commutator-fiber class function
  #{(A,B): [A,B] = g} = sum over A with A^{-1}g ~ A^{-1} of |C(A)|
  (the B's conjugating A^{-1} to A^{-1}g form a centralizer coset), and
  then evaluates trace predicates on forced third factors: in every
  barred set the C coordinate is determined, C = [A,B]^{-1} T, so the
  count is a sum of fiber values against a membership mask;
* the brute-force oracle enumerates pairs (A,B) directly with no class
  theory at all, guarded to small primes.

Fiber counts are constant on GL(2,F_p)-classes (conjugating both A and B
is a bijection), so barred-set counts depend only on the geometric class
of the target matrix T; in particular the lam <-> lam^{-1} and the
equal-regime normalisations below do not change any count.

The single-puncture reduction table identifies Z(W1, W4(lam)) with the
stratum of W4(-lam): fixing the first holonomy to -Id negates the
constraint on the second.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .sl2 import (ClassLabel, GeometricClass, GroupTable, SL2Element, W0, W1,
                  W2, W3, W4ANY, group_table, inverse_mod, is_square_mod,
                  rational_class_of, w4)

CACHE_FORMAT = "sl2-commutator-fiber-distribution"
CACHE_VERSION = 1

BRUTE_MAX_PAIR_PRIME = 13    # CommFiber / diagonal-commutator targets
BRUTE_MAX_TUPLE_PRIME = 7    # barred sets and full tuple sets


class OracleRangeError(ValueError):
    """Brute-force oracle requested above its hard runtime guard."""


# ---------------------------------------------------------------------------
# target specs


@dataclass(frozen=True)
class CommutatorFiber:
    """#{(A,B): [A,B] = target}."""
    target: SL2Element

    def describe(self) -> dict:
        return {"kind": "commutator-fiber",
                "target": list(self.target.entries())}


ZBAR_CASES = ("zbar22", "zbar23", "zbar24", "zbar34", "zbar44")
X_STRATA = ("X0", "X1", "X2", "X3", "X4")


@dataclass(frozen=True)
class ZbarCase:
    """Barred solution set; C is forced to [A,B]^{-1} T.

    zbar22: T = J+,            C in W2
    zbar23: T = -J+,           C in W2
    zbar24: T = diag(1/l1,l1), C in W2
    zbar34: T = diag(1/l1,l1), C in W3
    zbar44: T = diag(1/l2,l2), C in W4(l1); in the equal regime l2 is
            normalised to l1^{-1} so that T = diag(l1, l1^{-1}).
    """
    case: str
    lam1: int | None = None
    lam2: int | None = None

    def __post_init__(self):
        if self.case not in ZBAR_CASES:
            raise ValueError(f"unknown barred case {self.case!r}")
        needs = {"zbar22": 0, "zbar23": 0, "zbar24": 1, "zbar34": 1, "zbar44": 2}
        got = (self.lam1 is not None) + (self.lam2 is not None)
        if got != needs[self.case]:
            raise ValueError(f"{self.case} takes {needs[self.case]} parameter(s)")
        if self.lam2 is not None and self.lam1 is None:
            raise ValueError("lam2 given without lam1")

    def _lams(self, p: int) -> tuple[int | None, int | None]:
        l1 = l2 = None
        if self.lam1 is not None:
            l1 = self.lam1 % p
            if l1 in (0, 1, p - 1):
                raise ValueError(f"lam1 = {self.lam1} is 0 or ±1 mod {p}")
        if self.lam2 is not None:
            l2 = self.lam2 % p
            if l2 in (0, 1, p - 1):
                raise ValueError(f"lam2 = {self.lam2} is 0 or ±1 mod {p}")
        return l1, l2

    def regime(self, p: int) -> str | None:
        """zbar44 only: equal / special / generic."""
        if self.case != "zbar44":
            return None
        l1, l2 = self._lams(p)
        if l2 in (l1, inverse_mod(l1, p)):
            return "equal"
        if l2 == (-l1) % p:
            return "special"
        return "generic"

    def target_matrix(self, p: int) -> SL2Element:
        l1, l2 = self._lams(p)
        if self.case == "zbar22":
            return SL2Element.jplus(p)
        if self.case == "zbar23":
            return -SL2Element.jplus(p)
        if self.case in ("zbar24", "zbar34"):
            return SL2Element.diagonal(inverse_mod(l1, p), p)
        if self.regime(p) == "equal":
            l2 = inverse_mod(l1, p)
        return SL2Element.diagonal(inverse_mod(l2, p), p)

    def predicate_class(self, p: int) -> GeometricClass:
        if self.case in ("zbar22", "zbar23", "zbar24"):
            return W2
        if self.case == "zbar34":
            return W3
        l1, _ = self._lams(p)
        return w4(l1)

    def describe(self) -> dict:
        d: dict = {"kind": "zbar", "case": self.case}
        if self.lam1 is not None:
            d["lam1"] = self.lam1
        if self.lam2 is not None:
            d["lam2"] = self.lam2
        return d


@dataclass(frozen=True)
class ZFull:
    """#{(A,B,C1,C2): [A,B] C1 C2 = Id, Ci in class i}."""
    spec1: GeometricClass
    spec2: GeometricClass

    def describe(self) -> dict:
        return {"kind": "zfull", "class1": str(self.spec1), "class2": str(self.spec2)}


@dataclass(frozen=True)
class XStratum:
    """#{(A,B): [A,B] in the geometric class union named by tag}."""
    tag: str

    def __post_init__(self):
        if self.tag not in X_STRATA:
            raise ValueError(f"unknown stratum {self.tag!r}")

    def geometric_union(self) -> GeometricClass:
        return {"X0": W0, "X1": W1, "X2": W2, "X3": W3, "X4": W4ANY}[self.tag]

    def describe(self) -> dict:
        return {"kind": "x-stratum", "tag": self.tag}


@dataclass(frozen=True)
class DiagonalCommutatorFiber:
    """Matrices P mod the right diagonal torus with [P, diag(lam,1/lam)]
    of the forced shape for the trace pair (t1, t2).

    t1 defaults to the value forced by the trace relation
      mu (lam^2-1) t1 + (1 - mu^2 lam^2) t2 = (1-mu^2)(1+lam^2);
    passing an explicit inconsistent t1 yields an empty fiber.
    """
    lam: int
    mu: int
    t2: int
    t1: int | None = None

    def describe(self) -> dict:
        d: dict = {"kind": "diagonal-commutator-fiber",
                   "lam": self.lam, "mu": self.mu, "t2": self.t2}
        if self.t1 is not None:
            d["t1"] = self.t1
        return d


TargetSpec = CommutatorFiber | ZbarCase | ZFull | XStratum | DiagonalCommutatorFiber


# ---------------------------------------------------------------------------
# count records and the per-prime class distribution


@dataclass
class CountRecord:
    p: int
    target: TargetSpec
    count: int
    method: str          # "fast" | "brute"
    ms: float


@dataclass
class ClassDistribution:
    """Per-representative commutator fiber counts for every rational class."""
    p: int
    fibers: dict[ClassLabel, int]
    orbit_sizes: dict[ClassLabel, int]
    centralizers: dict[ClassLabel, int]
    representatives: dict[ClassLabel, SL2Element]

    def total_pairs(self) -> int:
        return sum(self.orbit_sizes[k] * self.fibers[k] for k in self.fibers)

    def n_classes(self) -> int:
        return len(self.fibers)

    def check_consistency(self) -> None:
        n = self.p ** 3 - self.p
        if self.total_pairs() != n * n:
            raise ArithmeticError(
                f"fiber totals {self.total_pairs()} != |G|^2 = {n*n} at p={self.p}")
        if self.n_classes() != self.p + 4:
            raise ArithmeticError(
                f"{self.n_classes()} classes realised at p={self.p}, expected {self.p+4}")


def _chunk_ranges(n: int, pieces: int) -> list[tuple[int, int]]:
    pieces = max(1, min(pieces, n))
    step = (n + pieces - 1) // pieces
    return [(i, min(i + step, n)) for i in range(0, n, step)]


def _parallel_sum(worker, n: int, threads: int) -> int:
    """Deterministic partitioned sum: disjoint ranges, combined by +."""
    ranges = _chunk_ranges(n, threads * 4 if threads > 1 else 1)
    if threads <= 1:
        return sum(worker(a, b) for a, b in ranges)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(lambda r: worker(*r), ranges))


def _fiber_of_entries(table: GroupTable, g: tuple[int, int, int, int],
                      threads: int = 1) -> int:
    """Fast fiber over one element: sum of |C(A)| over A with A^{-1}g ~ A^{-1}."""
    gv = np.array(g, dtype=np.int64)

    def worker(a: int, b: int) -> int:
        M = table.mat_mul(table.inverses[a:b], gv)
        hit = table.label_codes(M) == table.codes_inv[a:b]
        return int(table.centralizers[a:b][hit].sum())

    return _parallel_sum(worker, table.n, threads)


_dist_memo: dict[int, ClassDistribution] = {}


def commutator_fiber_distribution(p: int, cache: "DistributionCache | None" = None,
                                  threads: int = 1) -> ClassDistribution:
    """Fiber count per rational class, memoised per prime.

    With a DistributionCache the result is persisted and reused across
    processes; the in-memory memo short-circuits repeated calls either way.
    """
    if p in _dist_memo:
        dist = _dist_memo[p]
        if cache is not None and not os.path.exists(cache.path_for(p)):
            cache.store(dist)
        return dist
    if cache is not None:
        loaded = cache.load(p)
        if loaded is not None:
            _dist_memo[p] = loaded
            return loaded
    table = group_table(p)
    codes, first_rows = table.realized_codes()
    fibers: dict[ClassLabel, int] = {}
    orbits: dict[ClassLabel, int] = {}
    cents: dict[ClassLabel, int] = {}
    reps: dict[ClassLabel, SL2Element] = {}
    for code, row in zip(codes.tolist(), first_rows.tolist()):
        label = table.label_of_code(code)
        rep = table.element(row)
        cent = table.centralizer_of_code(code)
        fibers[label] = _fiber_of_entries(table, rep.entries(), threads)
        orbits[label] = table.n // cent
        cents[label] = cent
        reps[label] = rep
    dist = ClassDistribution(p, fibers, orbits, cents, reps)
    dist.check_consistency()
    _dist_memo[p] = dist
    if cache is not None:
        cache.store(dist)
    return dist


def _fiber_lut(table: GroupTable, dist: ClassDistribution) -> np.ndarray:
    """code -> per-element fiber count, dense over the code range."""
    lut = np.zeros(6 + 2 * table.p, dtype=np.int64)
    for label, fib in dist.fibers.items():
        code = _code_of_label(table, label)
        lut[code] = fib
    return lut


def _code_of_label(table: GroupTable, label: ClassLabel) -> int:
    from . import sl2
    if label.kind == sl2.CENTRAL_PLUS:
        return 0
    if label.kind == sl2.CENTRAL_MINUS:
        return 1
    if label.kind in (sl2.UNIPOTENT_PLUS, sl2.UNIPOTENT_MINUS):
        return sl2._UNIPOTENT_CODE[(label.kind, label.detail)]
    base = 6 if label.kind == sl2.SPLIT else 6 + table.p
    return base + int(label.detail)


# ---------------------------------------------------------------------------
# fast-path counts


def count_commutator_fiber(p: int, target: SL2Element, threads: int = 1) -> int:
    if target.p != p:
        raise ValueError(f"target lives mod {target.p}, not {p}")
    dist = commutator_fiber_distribution(p, threads=threads)
    return dist.fibers[rational_class_of(target)]


def _membership_mask(table: GroupTable, M: np.ndarray,
                     spec: GeometricClass) -> np.ndarray:
    p = table.p
    t = (M[..., 0] + M[..., 3]) % p
    if spec.kind == "W4any":
        return (t != 2) & (t != p - 2)
    if spec.kind in ("W0", "W1"):
        target = spec.representative(p).entries()
        return (M == np.array(target, dtype=np.int64)).all(axis=-1)
    central = (M[..., 1] == 0) & (M[..., 2] == 0) & (M[..., 0] == M[..., 3])
    tm = spec.trace_mod(p)
    if spec.kind in ("W2", "W3"):
        return (t == tm) & ~central
    return t == tm


def count_zbar(p: int, case: ZbarCase, threads: int = 1) -> int:
    """Sum of fiber(eta) over eta with eta^{-1} T in the constraining class."""
    if p < 5:
        raise ValueError("barred-set counts need p >= 5")
    T = case.target_matrix(p)
    pred = case.predicate_class(p)
    table = group_table(p)
    dist = commutator_fiber_distribution(p, threads=threads)
    lut = _fiber_lut(table, dist)
    Tv = np.array(T.entries(), dtype=np.int64)
    C = table.mat_mul(table.inverses, Tv)
    mask = _membership_mask(table, C, pred)
    return int(lut[table.codes][mask].sum())


def count_z_full(p: int, spec1: GeometricClass, spec2: GeometricClass,
                 threads: int = 1) -> int:
    """Class-by-class: sum |K| fiber(rep_K) #{C1 in class1: C1^{-1} rep_K^{-1} in class2}."""
    table = group_table(p)
    if spec1.kind == "W4":
        spec1.lam_mod(p)
    if spec2.kind == "W4":
        spec2.lam_mod(p)
    dist = commutator_fiber_distribution(p, threads=threads)
    members1_inv = table.mat_inv(table.elements[table.geometric_mask(spec1)])
    total = 0
    for label, fib in dist.fibers.items():
        if fib == 0:
            continue
        rep_inv = np.array(dist.representatives[label].inverse().entries(),
                           dtype=np.int64)
        M = table.mat_mul(members1_inv, rep_inv)
        npair = int(_membership_mask(table, M, spec2).sum())
        total += dist.orbit_sizes[label] * fib * npair
    return total


def count_x_stratum(p: int, name: str, threads: int = 1) -> int:
    """F_p points of the commutator preimage of a geometric class union."""
    from . import sl2
    if name not in X_STRATA:
        raise ValueError(f"unknown stratum {name!r}")
    dist = commutator_fiber_distribution(p, threads=threads)
    kinds = {"X0": (sl2.CENTRAL_PLUS,), "X1": (sl2.CENTRAL_MINUS,),
             "X2": (sl2.UNIPOTENT_PLUS,), "X3": (sl2.UNIPOTENT_MINUS,),
             "X4": (sl2.SPLIT, sl2.NONSPLIT)}[name]
    return sum(dist.orbit_sizes[lab] * dist.fibers[lab]
               for lab in dist.fibers if lab.kind in kinds)


def count_diagonal_commutator_fiber(p: int, lam: int, mu: int, t2: int,
                                    t1: int | None = None) -> int:
    """Direct enumeration of P in SL(2,F_p) mod the right diagonal torus with
    [P, diag(lam, 1/lam)] = [[d mu, -b/mu], [-c mu, a/mu]] for the (a,d)
    recovered from the trace pair; bc = ad - 1 is then automatic.
    """
    lam %= p
    mu %= p
    t2 %= p
    if lam in (0, 1, p - 1):
        raise ValueError(f"lam = {lam} must avoid {{0, ±1}} mod {p}")
    if mu in (0, 1, p - 1):
        raise ValueError(f"mu = {mu} must avoid {{0, ±1}} mod {p}: the trace "
                         "pair does not determine the diagonal of [A,B] there")
    l2 = lam * lam % p
    if t1 is None:
        # mu(lam^2-1) t1 + (1 - mu^2 lam^2) t2 = (1-mu^2)(1+lam^2)
        rhs = ((1 - mu * mu) * (1 + l2) - (1 - mu * mu % p * l2) * t2) % p
        t1 = rhs * inverse_mod(mu * (l2 - 1) % p, p) % p
    t1 %= p
    den = inverse_mod((mu - inverse_mod(mu, p)) % p, p)
    a = (mu * t1 - t2) * den % p
    d = (t2 - inverse_mod(mu, p) * t1) * den % p
    table = group_table(p)
    E = table.elements
    x, y, z, w = E[:, 0], E[:, 1], E[:, 2], E[:, 3]
    l2i = inverse_mod(l2, p)
    pd11 = (x * w - l2i * y * z) % p
    pd22 = (x * w - l2 * y * z) % p
    matches = int(((pd11 == d * mu % p) & (pd22 == a * inverse_mod(mu, p) % p)).sum())
    if matches % (p - 1):
        raise ArithmeticError(f"fiber size {matches} not divisible by the "
                              f"torus order {p-1} at p={p}")
    return matches // (p - 1)


def fast_count(p: int, spec: TargetSpec, threads: int = 1) -> int:
    if isinstance(spec, CommutatorFiber):
        return count_commutator_fiber(p, spec.target, threads)
    if isinstance(spec, ZbarCase):
        return count_zbar(p, spec, threads)
    if isinstance(spec, ZFull):
        return count_z_full(p, spec.spec1, spec.spec2, threads)
    if isinstance(spec, XStratum):
        return count_x_stratum(p, spec.tag, threads)
    if isinstance(spec, DiagonalCommutatorFiber):
        return count_diagonal_commutator_fiber(p, spec.lam, spec.mu, spec.t2, spec.t1)
    raise TypeError(f"unknown target spec {spec!r}")


def timed_count(p: int, spec: TargetSpec, method: str = "fast",
                threads: int = 1) -> CountRecord:
    t0 = time.perf_counter()
    if method == "fast":
        count = fast_count(p, spec, threads)
    elif method == "brute":
        count = brute_force_count(p, spec, threads)
    else:
        raise ValueError(f"unknown method {method!r}")
    ms = (time.perf_counter() - t0) * 1000.0
    return CountRecord(p, spec, count, method, ms)


# ---------------------------------------------------------------------------
# brute-force oracle: direct enumeration, no class theory


def _commutator_row(table: GroupTable, i: int) -> np.ndarray:
    """[A_i, B] for every B, one vectorised row of the pair enumeration."""
    n = table.n
    A = np.broadcast_to(table.elements[i], (n, 4))
    Ai = np.broadcast_to(table.inverses[i], (n, 4))
    return table.mat_mul(table.mat_mul(A, table.elements),
                         table.mat_mul(Ai, table.inverses))


def brute_force_count(p: int, spec: TargetSpec, threads: int = 1) -> int:
    """Ground-truth count by direct nested enumeration.

    Hard runtime guards: p <= 13 for pair-domain targets and p <= 7 for
    barred/full-tuple targets; violations raise OracleRangeError.
    """
    if isinstance(spec, CommutatorFiber):
        if p > BRUTE_MAX_PAIR_PRIME:
            raise OracleRangeError(
                f"oracle out of range: commutator fibers are guarded to "
                f"p <= {BRUTE_MAX_PAIR_PRIME}, got {p}")
        if spec.target.p != p:
            raise ValueError("target modulus mismatch")
        table = group_table(p)
        tv = np.array(spec.target.entries(), dtype=np.int64)

        def worker(a: int, b: int) -> int:
            return sum(int((_commutator_row(table, i) == tv).all(axis=1).sum())
                       for i in range(a, b))

        return _parallel_sum(worker, table.n, threads)

    if isinstance(spec, ZbarCase):
        if p > BRUTE_MAX_TUPLE_PRIME:
            raise OracleRangeError(
                f"oracle out of range: barred sets are guarded to "
                f"p <= {BRUTE_MAX_TUPLE_PRIME}, got {p}")
        if p < 5:
            raise ValueError("barred-set counts need p >= 5")
        table = group_table(p)
        T = np.array(spec.target_matrix(p).entries(), dtype=np.int64)
        pred = spec.predicate_class(p)

        def worker(a: int, b: int) -> int:
            total = 0
            for i in range(a, b):
                C = table.mat_mul(table.mat_inv(_commutator_row(table, i)), T)
                total += int(_membership_mask(table, C, pred).sum())
            return total

        return _parallel_sum(worker, table.n, threads)

    if isinstance(spec, ZFull):
        if p > BRUTE_MAX_TUPLE_PRIME:
            raise OracleRangeError(
                f"oracle out of range: full tuple sets are guarded to "
                f"p <= {BRUTE_MAX_TUPLE_PRIME}, got {p}")
        table = group_table(p)
        members1_inv = table.mat_inv(
            table.elements[table.geometric_mask(spec.spec1)])

        def worker(a: int, b: int) -> int:
            total = 0
            for i in range(a, b):
                etas_inv = table.mat_inv(_commutator_row(table, i))
                # C2 = C1^{-1} eta^{-1} for every (C1, B) pair at once
                M = table.mat_mul(members1_inv[:, None, :], etas_inv[None, :, :])
                total += int(_membership_mask(table, M, spec.spec2).sum())
            return total

        return _parallel_sum(worker, table.n, threads)

    if isinstance(spec, XStratum):
        if p > BRUTE_MAX_PAIR_PRIME:
            raise OracleRangeError(
                f"oracle out of range: strata are guarded to "
                f"p <= {BRUTE_MAX_PAIR_PRIME}, got {p}")
        table = group_table(p)
        union = spec.geometric_union()

        def worker(a: int, b: int) -> int:
            return sum(
                int(_membership_mask(table, _commutator_row(table, i), union).sum())
                for i in range(a, b))

        return _parallel_sum(worker, table.n, threads)

    if isinstance(spec, DiagonalCommutatorFiber):
        if p > BRUTE_MAX_PAIR_PRIME:
            raise OracleRangeError(
                f"oracle out of range: guarded to p <= {BRUTE_MAX_PAIR_PRIME}")
        return _brute_diagonal_commutator_fiber(p, spec)

    raise TypeError(f"unknown target spec {spec!r}")


def _brute_diagonal_commutator_fiber(p: int, spec: DiagonalCommutatorFiber) -> int:
    """Four nested scalar loops over P entries; independent of GroupTable."""
    lam, mu, t2 = spec.lam % p, spec.mu % p, spec.t2 % p
    if lam in (0, 1, p - 1) or mu in (0, 1, p - 1):
        raise ValueError("lam and mu must avoid {0, ±1} mod p")
    l2 = lam * lam % p
    t1 = spec.t1
    if t1 is None:
        rhs = ((1 - mu * mu) * (1 + l2) - (1 - mu * mu % p * l2) * t2) % p
        t1 = rhs * inverse_mod(mu * (l2 - 1) % p, p) % p
    t1 %= p
    den = inverse_mod((mu - inverse_mod(mu, p)) % p, p)
    a = (mu * t1 - t2) * den % p
    d = (t2 - inverse_mod(mu, p) * t1) * den % p
    want11 = d * mu % p
    want22 = a * inverse_mod(mu, p) % p
    l2i = inverse_mod(l2, p)
    matches = 0
    for x in range(p):
        for y in range(p):
            for z in range(p):
                for w in range(p):
                    if (x * w - y * z) % p != 1:
                        continue
                    if (x * w - l2i * y * z) % p != want11:
                        continue
                    if (x * w - l2 * y * z) % p != want22:
                        continue
                    matches += 1
    if matches % (p - 1):
        raise ArithmeticError("fiber size not divisible by torus order")
    return matches // (p - 1)


def brute_commutator_tally(p: int, threads: int = 1) -> dict[tuple, int]:
    """Value -> pair count over the full pair enumeration; guard p <= 13."""
    if p > BRUTE_MAX_PAIR_PRIME:
        raise OracleRangeError(
            f"oracle out of range: tally guarded to p <= {BRUTE_MAX_PAIR_PRIME}")
    table = group_table(p)
    n = table.n
    enc_chunks = []
    for i in range(n):
        comm = _commutator_row(table, i)
        enc_chunks.append(((comm[:, 0] * p + comm[:, 1]) * p
                           + comm[:, 2]) * p + comm[:, 3])
    vals, counts = np.unique(np.concatenate(enc_chunks), return_counts=True)
    out = {}
    for e, c in zip(vals.tolist(), counts.tolist()):
        m22 = e % p; e //= p
        m21 = e % p; e //= p
        m12 = e % p; e //= p
        out[(e, m12, m21, m22)] = c
    return out


# ---------------------------------------------------------------------------
# monodromy probe


@dataclass
class MonodromyReport:
    """Union of split-diagonal fibers vs the two reference evaluations.

    The union of all X-bar_{4,lam} over F_p is the set of pairs whose
    commutator is a regular diagonal matrix; the probe always reports it
    next to the q=p values of the two degree-4 reference polynomials so
    that any divergence is visible rather than asserted away.
    """
    p: int
    per_lambda: dict[int, int]
    union_count: int
    xbar4_reference_value: int
    xbar4_quotient_reference_value: int
    lambda_classes: dict[str, list[int]]

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "per_lambda": {str(k): v for k, v in self.per_lambda.items()},
            "union_count": self.union_count,
            "xbar4_reference_value": self.xbar4_reference_value,
            "xbar4_quotient_reference_value": self.xbar4_quotient_reference_value,
            "lambda_classes": self.lambda_classes,
        }


def monodromy_probe(p: int, threads: int = 1) -> MonodromyReport:
    if p < 5:
        raise ValueError("probe needs p >= 5")
    from .strata import building_blocks
    blocks = building_blocks()
    per_lambda = {}
    classes: dict[str, list[int]] = {"square": [], "nonsquare": []}
    for lam in range(2, p - 1):
        per_lambda[lam] = count_commutator_fiber(
            p, SL2Element.diagonal(lam, p), threads)
        classes["square" if is_square_mod(lam, p) else "nonsquare"].append(lam)
    return MonodromyReport(
        p=p,
        per_lambda=per_lambda,
        union_count=sum(per_lambda.values()),
        xbar4_reference_value=blocks.xbar4.evaluate(p),
        xbar4_quotient_reference_value=blocks.xbar4_quotient.evaluate(p),
        lambda_classes=classes,
    )


# ---------------------------------------------------------------------------
# persistent distribution cache


class DistributionCache:
    """One JSON record per prime, written atomically (temp file + rename)."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def path_for(self, p: int) -> str:
        return os.path.join(self.directory, f"fibdist-p{p}-v{CACHE_VERSION}.json")

    def store(self, dist: ClassDistribution) -> str:
        payload = {
            "format": CACHE_FORMAT,
            "version": CACHE_VERSION,
            "p": dist.p,
            "classes": [
                {"kind": lab.kind,
                 "detail": lab.detail,
                 "fiber": dist.fibers[lab],
                 "orbit": dist.orbit_sizes[lab],
                 "centralizer": dist.centralizers[lab],
                 "representative": list(dist.representatives[lab].entries())}
                for lab in sorted(dist.fibers, key=str)
            ],
        }
        path = self.path_for(dist.p)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(payload, fh, indent=1)
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        return path

    def load(self, p: int) -> ClassDistribution | None:
        path = self.path_for(p)
        if not os.path.exists(path):
            return None
        with open(path) as fh:
            payload = json.load(fh)
        if payload.get("format") != CACHE_FORMAT or payload.get("version") != CACHE_VERSION:
            return None
        if payload.get("p") != p:
            return None
        fibers, orbits, cents, reps = {}, {}, {}, {}
        for row in payload["classes"]:
            label = ClassLabel(row["kind"], row["detail"])
            fibers[label] = row["fiber"]
            orbits[label] = row["orbit"]
            cents[label] = row["centralizer"]
            a, b, c, d = row["representative"]
            reps[label] = SL2Element(a, b, c, d, p)
        dist = ClassDistribution(p, fibers, orbits, cents, reps)
        dist.check_consistency()
        return dist


def clear_memo() -> None:
    """Drop in-process distribution memoisation (tests use this)."""
    _dist_memo.clear()
