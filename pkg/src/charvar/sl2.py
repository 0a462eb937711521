"""Prime-field arithmetic, SL(2,F_p) enumeration, and conjugacy classes.

Two class notions coexist and must not be conflated:

* *rational* classes: orbits under SL(2,F_p)-conjugation.  There are p+4
  of them: two central, four unipotent-type (trace ±2 split by a
  quadratic-residue invariant), and one regular class per trace t ≠ ±2
  (split when t²−4 is a nonzero square mod p, nonsplit otherwise).
* *geometric* classes W0..W4: the closure-level classes determined by
  trace/identity tests alone.  |W2| = |W3| = p²−1 and |W4(λ)| = p²+p
  exactly, which is why geometric membership is what the counting engine
  uses; each unipotent geometric class is the union of two rational ones.

The square-class invariant of a trace-±2 non-central M is the Legendre
class of det(v, Nv) where N = M ∓ Id is nilpotent and v is any vector
outside ker N; changing v scales the determinant by a square, and
SL(2)-conjugation preserves it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np

MAX_ENUM_PRIME = 101

CENTRAL_PLUS = "central+"
CENTRAL_MINUS = "central-"
UNIPOTENT_PLUS = "unipotent+"
UNIPOTENT_MINUS = "unipotent-"
SPLIT = "split"
NONSPLIT = "nonsplit"

SQUARE = "square"
NONSQUARE = "nonsquare"


def is_odd_prime(n: int) -> bool:
    if n < 3 or n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _check_prime(p: int, max_prime: int = MAX_ENUM_PRIME) -> None:
    if not is_odd_prime(p):
        raise ValueError(f"p = {p} is not an odd prime >= 3")
    if p > max_prime:
        raise ValueError(f"p = {p} exceeds the enumeration bound {max_prime}")


def inverse_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


def is_square_mod(a: int, p: int) -> bool:
    """Nonzero quadratic residue test; 0 is counted as a square."""
    a %= p
    return a == 0 or pow(a, (p - 1) // 2, p) == 1


class FieldElement:
    """Residue in F_p, p an odd prime."""

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        if not is_odd_prime(modulus):
            raise ValueError(f"modulus {modulus} is not an odd prime")
        self.modulus = modulus
        self.value = int(value) % modulus

    def _lift(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other
        return FieldElement(other, self.modulus)

    def __add__(self, other):
        other = self._lift(other)
        return FieldElement(self.value + other.value, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        other = self._lift(other)
        return FieldElement(self.value * other.value, self.modulus)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return FieldElement(inverse_mod(self.value, self.modulus), self.modulus)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.modulus
        return (isinstance(other, FieldElement)
                and self.modulus == other.modulus and self.value == other.value)

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __repr__(self):
        return f"FieldElement({self.value} mod {self.modulus})"


class SL2Element:
    """Determinant-1 2x2 matrix over F_p, entries stored as reduced ints."""

    __slots__ = ("m11", "m12", "m21", "m22", "p")

    def __init__(self, m11: int, m12: int, m21: int, m22: int, p: int):
        if not is_odd_prime(p):
            raise ValueError(f"modulus {p} is not an odd prime")
        self.p = p
        self.m11 = m11 % p
        self.m12 = m12 % p
        self.m21 = m21 % p
        self.m22 = m22 % p
        if (self.m11 * self.m22 - self.m12 * self.m21) % p != 1:
            raise ValueError(f"determinant != 1 mod {p}: "
                             f"[[{m11},{m12}],[{m21},{m22}]]")

    @classmethod
    def identity(cls, p: int) -> "SL2Element":
        return cls(1, 0, 0, 1, p)

    @classmethod
    def minus_identity(cls, p: int) -> "SL2Element":
        return cls(-1, 0, 0, -1, p)

    @classmethod
    def jplus(cls, p: int) -> "SL2Element":
        return cls(1, 1, 0, 1, p)

    @classmethod
    def jminus(cls, p: int) -> "SL2Element":
        return cls(-1, 1, 0, -1, p)

    @classmethod
    def diagonal(cls, lam: int, p: int) -> "SL2Element":
        return cls(lam, 0, 0, inverse_mod(lam, p), p)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.m11, self.m12, self.m21, self.m22)

    def trace(self) -> int:
        return (self.m11 + self.m22) % self.p

    def __mul__(self, other: "SL2Element") -> "SL2Element":
        if self.p != other.p:
            raise ValueError("mixed moduli")
        p = self.p
        return SL2Element(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22, p)

    def inverse(self) -> "SL2Element":
        # adjugate; determinant is 1
        return SL2Element(self.m22, -self.m12, -self.m21, self.m11, self.p)

    def __neg__(self) -> "SL2Element":
        return SL2Element(-self.m11, -self.m12, -self.m21, -self.m22, self.p)

    def conjugated_by(self, g: "SL2Element") -> "SL2Element":
        return g * self * g.inverse()

    def is_identity(self) -> bool:
        return self.entries() == (1, 0, 0, 1)

    def is_minus_identity(self) -> bool:
        p = self.p
        return self.entries() == (p - 1, 0, 0, p - 1)

    def __eq__(self, other):
        return (isinstance(other, SL2Element)
                and self.p == other.p and self.entries() == other.entries())

    def __hash__(self):
        return hash((self.entries(), self.p))

    def __repr__(self):
        return f"SL2Element([[{self.m11},{self.m12}],[{self.m21},{self.m22}]] mod {self.p})"


def enumerate_sl2(p: int, max_prime: int = MAX_ENUM_PRIME) -> Iterator[SL2Element]:
    """All of SL(2,F_p) exactly once, row-major over (m11,m12,m21).

    m22 is solved when m11 != 0; the m11 = 0 branch forces m21 = -m12^{-1}
    and leaves m22 free.  Length is p^3 - p.
    """
    _check_prime(p, max_prime)
    for a in range(p):
        if a:
            ainv = inverse_mod(a, p)
            for b in range(p):
                for c in range(p):
                    yield SL2Element(a, b, c, (1 + b * c) * ainv, p)
        else:
            for b in range(1, p):
                c = (-inverse_mod(b, p)) % p
                for d in range(p):
                    yield SL2Element(0, b, c, d, p)


def commutator(a: SL2Element, b: SL2Element) -> SL2Element:
    """[a,b] = a b a^{-1} b^{-1}."""
    if a.p != b.p:
        raise ValueError("mixed moduli")
    return a * b * a.inverse() * b.inverse()


class ClassLabel(NamedTuple):
    """SL(2,F_p)-conjugacy class descriptor.

    detail is the square-class flag for unipotent kinds, the trace for
    regular kinds, and None for central elements.
    """
    kind: str
    detail: object = None


def rational_class_of(m: SL2Element) -> ClassLabel:
    p = m.p
    t = m.trace()
    if m.is_identity():
        return ClassLabel(CENTRAL_PLUS)
    if m.is_minus_identity():
        return ClassLabel(CENTRAL_MINUS)
    if t == 2 or t == p - 2:
        kind = UNIPOTENT_PLUS if t == 2 else UNIPOTENT_MINUS
        # N = M -+ Id is nilpotent nonzero; det(v, Nv) with v = e1 is n21,
        # falling back to v = e2 (giving -n12) when e1 lies in ker N.
        n21 = m.m21
        val = n21 if n21 else (-m.m12) % p
        return ClassLabel(kind, SQUARE if is_square_mod(val, p) else NONSQUARE)
    if is_square_mod(t * t - 4, p):
        return ClassLabel(SPLIT, t)
    return ClassLabel(NONSPLIT, t)


def centralizer_order(m: SL2Element) -> int:
    p = m.p
    kind = rational_class_of(m).kind
    if kind in (CENTRAL_PLUS, CENTRAL_MINUS):
        return p ** 3 - p
    if kind in (UNIPOTENT_PLUS, UNIPOTENT_MINUS):
        return 2 * p
    return p - 1 if kind == SPLIT else p + 1


def orbit_size(m: SL2Element) -> int:
    p = m.p
    return (p ** 3 - p) // centralizer_order(m)


# ---------------------------------------------------------------------------
# geometric classes


@dataclass(frozen=True)
class GeometricClass:
    """Closure-level class spec: W0, W1, W2, W3, W4 (with lam), or W4any.

    Membership is decided by trace/identity tests only; W4(lam) and
    W4(lam^{-1}) describe the same point set.
    """
    kind: str
    lam: int | None = None

    def __post_init__(self):
        if self.kind not in ("W0", "W1", "W2", "W3", "W4", "W4any"):
            raise ValueError(f"unknown geometric class kind {self.kind!r}")
        if self.kind == "W4" and self.lam is None:
            raise ValueError("W4 requires an eigenvalue parameter")
        if self.kind != "W4" and self.lam is not None:
            raise ValueError(f"{self.kind} takes no parameter")

    def lam_mod(self, p: int) -> int:
        lam = self.lam % p
        if lam in (0, 1, p - 1):
            raise ValueError(f"lambda = {self.lam} is 0 or ±1 mod {p}")
        return lam

    def trace_mod(self, p: int) -> int | None:
        """Required trace of members, None for W4any (trace != ±2)."""
        if self.kind in ("W0", "W2"):
            return 2
        if self.kind in ("W1", "W3"):
            return p - 2
        if self.kind == "W4":
            lam = self.lam_mod(p)
            return (lam + inverse_mod(lam, p)) % p
        return None

    def contains(self, m: SL2Element) -> bool:
        t = m.trace()
        if self.kind == "W0":
            return m.is_identity()
        if self.kind == "W1":
            return m.is_minus_identity()
        if self.kind == "W2":
            return t == 2 and not m.is_identity()
        if self.kind == "W3":
            return t == m.p - 2 and not m.is_minus_identity()
        if self.kind == "W4":
            return t == self.trace_mod(m.p)
        return t not in (2, m.p - 2)

    def size(self, p: int) -> int:
        if self.kind in ("W0", "W1"):
            return 1
        if self.kind in ("W2", "W3"):
            return p * p - 1
        if self.kind == "W4":
            self.lam_mod(p)
            return p * p + p
        return p ** 3 - 2 * p ** 2 - p

    def representative(self, p: int) -> SL2Element:
        if self.kind == "W0":
            return SL2Element.identity(p)
        if self.kind == "W1":
            return SL2Element.minus_identity(p)
        if self.kind == "W2":
            return SL2Element.jplus(p)
        if self.kind == "W3":
            return SL2Element.jminus(p)
        if self.kind == "W4":
            return SL2Element.diagonal(self.lam_mod(p), p)
        raise ValueError("W4any has no distinguished representative")

    def __str__(self):
        if self.kind == "W4":
            return f"W4({self.lam})"
        return self.kind


W0 = GeometricClass("W0")
W1 = GeometricClass("W1")
W2 = GeometricClass("W2")
W3 = GeometricClass("W3")
W4ANY = GeometricClass("W4any")


def w4(lam: int) -> GeometricClass:
    return GeometricClass("W4", lam)


def geometric_members(p: int, spec: GeometricClass,
                      max_prime: int = MAX_ENUM_PRIME) -> list[SL2Element]:
    """Elements of the geometric class over F_p, in enumeration order."""
    _check_prime(p, max_prime)
    if spec.kind == "W4":
        spec.lam_mod(p)  # rejects lam in {0, ±1}
    return [m for m in enumerate_sl2(p, max_prime) if spec.contains(m)]


def admissible_lambdas(p: int) -> list[int]:
    """lam in F_p with lam not in {0, ±1}, one per inverse pair."""
    out = []
    for lam in range(2, p - 1):
        if inverse_mod(lam, p) >= lam:
            out.append(lam)
    return out


# ---------------------------------------------------------------------------
# vectorized per-prime tables

# label codes: 0 C+, 1 C-, 2/3 U+ sq/nonsq, 4/5 U- sq/nonsq,
# 6+t split trace t, 6+p+t nonsplit trace t.
_UNIPOTENT_CODE = {(UNIPOTENT_PLUS, SQUARE): 2, (UNIPOTENT_PLUS, NONSQUARE): 3,
                   (UNIPOTENT_MINUS, SQUARE): 4, (UNIPOTENT_MINUS, NONSQUARE): 5}


class GroupTable:
    """SL(2,F_p) as numpy arrays with per-element class data.

    Rows follow enumerate_sl2 order.  All arrays are int64; entries stay
    below p^2 before reduction, far from overflow.
    """

    def __init__(self, p: int, max_prime: int = MAX_ENUM_PRIME):
        _check_prime(p, max_prime)
        self.p = p
        self.elements = np.array([m.entries() for m in enumerate_sl2(p, max_prime)],
                                 dtype=np.int64)
        self.n = len(self.elements)
        self.inverses = self.mat_inv(self.elements)
        sq = np.zeros(p, dtype=bool)
        sq[(np.arange(1, p, dtype=np.int64) ** 2) % p] = True
        self.square_table = sq  # nonzero squares mod p
        self.codes = self.label_codes(self.elements)
        self.codes_inv = self.label_codes(self.inverses)
        cent = np.empty(self.n, dtype=np.int64)
        cent[self.codes <= 1] = self.n
        cent[(self.codes >= 2) & (self.codes <= 5)] = 2 * p
        cent[(self.codes >= 6) & (self.codes < 6 + p)] = p - 1
        cent[self.codes >= 6 + p] = p + 1
        self.centralizers = cent

    # -- raw matrix ops on (*, 4) arrays ------------------------------------

    def mat_mul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        p = self.p
        a, b, c, d = A[..., 0], A[..., 1], A[..., 2], A[..., 3]
        e, f, g, h = B[..., 0], B[..., 1], B[..., 2], B[..., 3]
        return np.stack([(a * e + b * g) % p, (a * f + b * h) % p,
                         (c * e + d * g) % p, (c * f + d * h) % p], axis=-1)

    def mat_inv(self, A: np.ndarray) -> np.ndarray:
        p = self.p
        return np.stack([A[..., 3], (-A[..., 1]) % p,
                         (-A[..., 2]) % p, A[..., 0]], axis=-1)

    def label_codes(self, M: np.ndarray) -> np.ndarray:
        p = self.p
        m11, m12, m21, m22 = M[..., 0], M[..., 1], M[..., 2], M[..., 3]
        t = (m11 + m22) % p
        disc_square = self.square_table[(t * t - 4) % p]
        codes = np.where(disc_square, 6 + t, 6 + p + t)
        plus = t == 2
        minus = t == p - 2
        detail = np.where(m21 != 0, m21, (-m12) % p)
        detail_square = self.square_table[detail]
        codes = np.where(plus, np.where(detail_square, 2, 3), codes)
        codes = np.where(minus, np.where(detail_square, 4, 5), codes)
        off_diag_zero = (m12 == 0) & (m21 == 0)
        codes = np.where(plus & off_diag_zero & (m11 == 1), 0, codes)
        codes = np.where(minus & off_diag_zero & (m11 == p - 1), 1, codes)
        return codes

    # -- code/label conversion ----------------------------------------------

    def label_of_code(self, code: int) -> ClassLabel:
        p = self.p
        if code == 0:
            return ClassLabel(CENTRAL_PLUS)
        if code == 1:
            return ClassLabel(CENTRAL_MINUS)
        if 2 <= code <= 5:
            for (kind, detail), c in _UNIPOTENT_CODE.items():
                if c == code:
                    return ClassLabel(kind, detail)
        if code < 6 + p:
            return ClassLabel(SPLIT, code - 6)
        return ClassLabel(NONSPLIT, code - 6 - p)

    def centralizer_of_code(self, code: int) -> int:
        p = self.p
        if code <= 1:
            return self.n
        if code <= 5:
            return 2 * p
        return p - 1 if code < 6 + p else p + 1

    def element(self, row: int) -> SL2Element:
        a, b, c, d = self.elements[row].tolist()
        return SL2Element(a, b, c, d, self.p)

    def realized_codes(self) -> tuple[np.ndarray, np.ndarray]:
        """(codes, first-row indices), sorted by code; length p + 4."""
        return np.unique(self.codes, return_index=True)

    def geometric_mask(self, spec: GeometricClass) -> np.ndarray:
        p = self.p
        E = self.elements
        t = (E[:, 0] + E[:, 3]) % p
        if spec.kind == "W4any":
            return (t != 2) & (t != p - 2)
        if spec.kind in ("W0", "W1"):
            target = spec.representative(p).entries()
            return (E == np.array(target, dtype=np.int64)).all(axis=1)
        central = (E[:, 1] == 0) & (E[:, 2] == 0) & (E[:, 0] == E[:, 3])
        tm = spec.trace_mod(p)
        if spec.kind in ("W2", "W3"):
            return (t == tm) & ~central
        return t == tm


@lru_cache(maxsize=None)
def group_table(p: int) -> GroupTable:
    return GroupTable(p)
