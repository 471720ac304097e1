"""Root data, Weyl group and weight combinatorics for C_n, B_n and osp(1|2n).

All weights live in one integer-friendly coordinate system.  C-side weights
(sp_2n and osp(1|2n)) use a basis ``e_i`` with ``(e_i|e_j) = delta_ij / 2``;
B-side weights (so_2n+1) use an orthonormal basis.  With this choice the
rescaling ``lambda -> sqrt(2) lambda`` between the two sides is the identity on
coordinates and only changes the convention tag.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Iterator, Sequence

WEYL_RANK_CAP = 8


class Convention(enum.Enum):
    C_SIDE = "C"
    B_SIDE = "B"


class RootType(enum.Enum):
    B = "B"
    C = "C"
    OSP = "OSP"


class Regularity(enum.Enum):
    REGULAR = "regular"
    SINGULAR = "singular"


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Weight:
    """An exact weight in epsilon-coordinates with a form convention tag."""

    coords: tuple[Fraction, ...]
    convention: Convention = Convention.C_SIDE

    def __init__(self, coords: Iterable, convention: Convention = Convention.C_SIDE):
        object.__setattr__(self, "coords", tuple(_frac(c) for c in coords))
        object.__setattr__(self, "convention", convention)

    @property
    def n(self) -> int:
        return len(self.coords)

    def _check(self, other: "Weight") -> None:
        if self.convention is not other.convention:
            raise ValueError("weights carry different form conventions")
        if self.n != other.n:
            raise ValueError("weights have different ranks")

    def __add__(self, other: "Weight") -> "Weight":
        self._check(other)
        return Weight((a + b for a, b in zip(self.coords, other.coords)), self.convention)

    def __sub__(self, other: "Weight") -> "Weight":
        self._check(other)
        return Weight((a - b for a, b in zip(self.coords, other.coords)), self.convention)

    def __neg__(self) -> "Weight":
        return Weight((-a for a in self.coords), self.convention)

    def __mul__(self, scalar) -> "Weight":
        s = _frac(scalar)
        return Weight((s * a for a in self.coords), self.convention)

    __rmul__ = __mul__

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def is_half_integral(self) -> bool:
        """True for spinor-type weights: every coordinate in Z + 1/2."""
        return all(c.denominator == 2 for c in self.coords)

    def int_coords(self) -> tuple[int, ...]:
        if not self.is_integral():
            raise ValueError(f"weight {self} is not integral")
        return tuple(int(c) for c in self.coords)

    def flip(self) -> "Weight":
        """Same coordinates, other side (the sqrt(2) rescaling)."""
        other = Convention.B_SIDE if self.convention is Convention.C_SIDE else Convention.C_SIDE
        return Weight(self.coords, other)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"

    @classmethod
    def zero(cls, n: int, convention: Convention = Convention.C_SIDE) -> "Weight":
        return cls([0] * n, convention)

    @classmethod
    def unit(cls, n: int, i: int, convention: Convention = Convention.C_SIDE) -> "Weight":
        """The basis vector e_{i+1} (0-based index ``i``)."""
        c = [0] * n
        c[i] = 1
        return cls(c, convention)


def bilinear(x: Weight, y: Weight) -> Fraction:
    """Normalized invariant form: half the dot product on the C side, the dot product on the B side."""
    x._check(y)
    dot = sum((a * b for a, b in zip(x.coords, y.coords)), Fraction(0))
    return dot / 2 if x.convention is Convention.C_SIDE else dot


def norm2(x: Weight) -> Fraction:
    return bilinear(x, x)


def _convention(rtype: RootType) -> Convention:
    return Convention.B_SIDE if rtype is RootType.B else Convention.C_SIDE


def _check_rank(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"rank must be a positive integer, got {n!r}")


def simple_roots(rtype: RootType, n: int) -> list[Weight]:
    _check_rank(n)
    conv = _convention(rtype)
    roots = []
    for i in range(n - 1):
        c = [0] * n
        c[i], c[i + 1] = 1, -1
        roots.append(Weight(c, conv))
    last = [0] * n
    last[n - 1] = 2 if rtype is RootType.C else 1
    roots.append(Weight(last, conv))
    return roots


@lru_cache(maxsize=None)
def positive_roots(rtype: RootType, n: int) -> tuple[Weight, ...]:
    """Positive roots.  For OSP only the even ones (those of sp_2n); see :func:`odd_positive_roots`."""
    _check_rank(n)
    conv = _convention(rtype)
    roots = []
    for i in range(n):
        for j in range(i + 1, n):
            for s in (-1, 1):
                c = [0] * n
                c[i], c[j] = 1, s
                roots.append(Weight(c, conv))
    for i in range(n):
        c = [0] * n
        c[i] = 1 if rtype is RootType.B else 2
        roots.append(Weight(c, conv))
    return tuple(roots)


def odd_positive_roots(n: int) -> tuple[Weight, ...]:
    """Odd positive roots e_i of osp(1|2n)."""
    _check_rank(n)
    return tuple(Weight.unit(n, i) for i in range(n))


def coroot(alpha: Weight) -> Weight:
    return alpha * (2 / norm2(alpha))


@dataclass(frozen=True)
class RhoVectors:
    rho_sp: Weight
    rho_osp: Weight
    rho_odd: Weight
    rho_check: Weight


def rho_vectors(n: int) -> RhoVectors:
    _check_rank(n)
    rho_sp = Weight([n - i for i in range(n)])
    rho_odd = Weight([Fraction(1, 2)] * n)
    rho_check = Weight([2 * (n - i) - 1 for i in range(n)])
    rho_osp = rho_sp - rho_odd
    if rho_osp != rho_check * Fraction(1, 2):
        raise AssertionError("rho_osp != rho_check / 2")
    return RhoVectors(rho_sp, rho_osp, rho_odd, rho_check)


def rho_b(n: int) -> Weight:
    """Weyl vector of so_2n+1 (B side)."""
    _check_rank(n)
    return Weight([Fraction(2 * (n - i) - 1, 2) for i in range(n)], Convention.B_SIDE)


def dual_coxeter(rtype: RootType, n: int) -> Fraction:
    _check_rank(n)
    if rtype is RootType.C:
        return Fraction(n + 1)
    if rtype is RootType.B:
        return Fraction(2 * n - 1)
    return Fraction(2 * n + 1, 2)


def coxeter(rtype: RootType, n: int) -> int:
    _check_rank(n)
    return 2 * n


# ---------------------------------------------------------------------------
# Weyl group of type B_n / C_n: signed permutations.


@dataclass(frozen=True)
class WeylElement:
    """Signed permutation ``w(e_i) = signs[i] * e_{perm[i]}`` (0-based)."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.perm)

    @property
    def length(self) -> int:
        return _length(self.perm, self.signs)

    @property
    def det(self) -> int:
        return -1 if self.length % 2 else 1

    @classmethod
    def identity(cls, n: int) -> "WeylElement":
        return cls(tuple(range(n)), (1,) * n)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        """Composition: ``(self * other)(x) = self(other(x))``."""
        if self.n != other.n:
            raise ValueError("rank mismatch")
        perm = tuple(self.perm[other.perm[i]] for i in range(self.n))
        signs = tuple(other.signs[i] * self.signs[other.perm[i]] for i in range(self.n))
        return WeylElement(perm, signs)

    def inverse(self) -> "WeylElement":
        perm = [0] * self.n
        signs = [0] * self.n
        for i, (p, s) in enumerate(zip(self.perm, self.signs)):
            perm[p] = i
            signs[p] = s
        return WeylElement(tuple(perm), tuple(signs))

    def apply(self, coords: Sequence) -> tuple:
        """Act on a raw coordinate tuple."""
        out = [0] * self.n
        for i, (p, s) in enumerate(zip(self.perm, self.signs)):
            out[p] = s * coords[i]
        return tuple(out)


@lru_cache(maxsize=65536)
def _length(perm: tuple[int, ...], signs: tuple[int, ...]) -> int:
    # number of positive roots e_i -+ e_j (i<j) and e_i sent to negative roots
    n = len(perm)
    image = [0] * n
    for i, (p, s) in enumerate(zip(perm, signs)):
        image[i] = (p, s)
    count = 0
    for i in range(n):
        if image[i][1] < 0:
            count += 1
    for i in range(n):
        pi, si = image[i]
        for j in range(i + 1, n):
            pj, sj = image[j]
            for t in (-1, 1):
                # w(e_i + t e_j) = si e_pi + t sj e_pj; positive iff the
                # leading (smallest-index) coefficient is positive
                if pi < pj:
                    lead = si
                else:
                    lead = t * sj
                if lead < 0:
                    count += 1
    return count


def weyl_order(n: int) -> int:
    return 2**n * factorial(n)


def weyl_elements(n: int, cap: int = WEYL_RANK_CAP) -> Iterator[WeylElement]:
    """All signed permutations of rank ``n``, lazily."""
    _check_rank(n)
    if n > cap:
        raise ValueError(f"rank {n} exceeds the Weyl enumeration cap {cap}")
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            yield WeylElement(perm, signs)


@lru_cache(maxsize=None)
def weyl_group(n: int) -> tuple[WeylElement, ...]:
    """Materialized Weyl group with lengths warmed, for repeated alternating sums."""
    elems = tuple(weyl_elements(n))
    for w in elems:
        w.length
    return elems


def act(w: WeylElement, lam: Weight) -> Weight:
    if w.n != lam.n:
        raise ValueError("rank mismatch")
    return Weight(w.apply(lam.coords), lam.convention)


def dot_act(w: WeylElement, lam: Weight, rho: Weight) -> Weight:
    return act(w, lam + rho) - rho


def classify(lam: Weight) -> Regularity:
    """Regular iff the weight pairs nontrivially with every root of C_n (equivalently B_n)."""
    absval = [abs(c) for c in lam.coords]
    if 0 in absval or len(set(absval)) < len(absval):
        return Regularity.SINGULAR
    return Regularity.REGULAR


def is_dominant(lam: Weight) -> bool:
    c = lam.coords
    return all(c[i] >= c[i + 1] for i in range(len(c) - 1)) and c[-1] >= 0


def dominant_rep(lam: Weight) -> tuple[WeylElement, Weight]:
    """Return ``(w, lam_plus)`` with ``lam_plus`` dominant and ``act(w, lam_plus) == lam``.

    For singular weights ``w`` is the minimal-length choice, ties broken by
    the lexicographic order of ``(perm, signs)``.
    """
    n = lam.n
    order = sorted(range(n), key=lambda i: (-abs(lam.coords[i]), i))
    plus = Weight([abs(lam.coords[i]) for i in order], lam.convention)
    # positions sharing an absolute value may be permuted freely, and zero
    # coordinates may carry either sign
    groups: list[list[int]] = []
    for i in range(n):
        if groups and plus.coords[groups[-1][0]] == plus.coords[i]:
            groups[-1].append(i)
        else:
            groups.append([i])
    best = None
    for choice in itertools.product(*(itertools.permutations(g) for g in groups)):
        slot = [0] * n
        for g, targets in zip(groups, choice):
            for src, t in zip(g, targets):
                slot[src] = order[t]
        zero_positions = [i for i in range(n) if plus.coords[i] == 0]
        for zsigns in itertools.product((1, -1), repeat=len(zero_positions)):
            signs = [0] * n
            for i in range(n):
                target = lam.coords[slot[i]]
                signs[i] = 1 if target >= 0 else -1
            for i, s in zip(zero_positions, zsigns):
                signs[i] = s
            w = WeylElement(tuple(slot), tuple(signs))
            key = (w.length, w.perm, tuple(-s for s in w.signs))
            if best is None or key < best[0]:
                best = (key, w)
    w = best[1]
    assert act(w, plus) == lam
    return w, plus


def weyl_dimension(rtype: RootType, lam: Weight) -> int:
    """Weyl dimension formula for sp_2n (C, OSP even part) or so_2n+1 (B)."""
    n = lam.n
    if rtype is RootType.B:
        rho = rho_b(n)
        lam = lam if lam.convention is Convention.B_SIDE else lam.flip()
    else:
        rho = rho_vectors(n).rho_sp
    num = Fraction(1)
    for alpha in positive_roots(RootType.B if rtype is RootType.B else RootType.C, n):
        num *= bilinear(lam + rho, alpha) / bilinear(rho, alpha)
    assert num.denominator == 1
    return int(num)


def dominant_weights_in_box(n: int, bound: int) -> Iterator[tuple[int, ...]]:
    """Integer dominant C-side coordinates with first coordinate at most ``bound``."""

    def rec(prefix: list[int], cap: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for c in range(cap, -1, -1):
            yield from rec(prefix + [c], c)

    yield from rec([], bound)
