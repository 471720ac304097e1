"""Truncated formal characters of affine sp_2n and osp(1|2n).

A :class:`FormalCharacter` is a finite sparse map ``(weight, grade) -> int``
standing for ``sum c * e^weight * q^(grade + q_offset)``.  Two truncations
bound what is stored:

* ``trunc``: grades above it are dropped;
* ``depth``: the principal depth ``2h*g - (rho_check . nu)`` of every stored
  monomial is at most this value (``None`` means nothing was dropped on
  that account).

Every monomial in a factor of the affine denominator has strictly positive
principal depth, so both truncations are ideals of the series ring and all
products below are exact within them.
"""
from __future__ import annotations

import enum
import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import _dense
from .rootdata import (
    RootType,
    Weight,
    bilinear,
    is_dominant,
    odd_positive_roots,
    positive_roots,
    rho_vectors,
    weyl_group,
)

# Monomials are packed into a single Python int:
#   key = depth << DEPTH_SHIFT | grade << GRADE_SHIFT | sum (nu_i + OFF) << (FIELD * i)
# Depth sits in the top field so it may be negative; Python's arithmetic
# shift then still extracts it correctly.
FIELD = 24
OFF = 1 << (FIELD - 1)
MASK = (1 << FIELD) - 1


class AlgebraType(enum.Enum):
    SP = "SP"
    OSP = "OSP"


@dataclass(frozen=True)
class _Codec:
    n: int

    @property
    def grade_shift(self) -> int:
        return FIELD * self.n

    @property
    def depth_shift(self) -> int:
        return FIELD * (self.n + 1)

    @property
    def offsets(self) -> int:
        return sum(OFF << (FIELD * i) for i in range(self.n))

    def depth_of(self, coords: Sequence[int], grade: int) -> int:
        h2 = 4 * self.n
        rc = _rho_check(self.n)
        return h2 * grade - sum(r * c for r, c in zip(rc, coords))

    def delta(self, coords: Sequence[int], grade: int) -> int:
        """Additive increment for multiplying by ``e^coords q^grade``."""
        d = self.depth_of(coords, grade)
        key = (d << self.depth_shift) + (grade << self.grade_shift)
        for i, c in enumerate(coords):
            key += c << (FIELD * i)
        return key

    def encode(self, coords: Sequence[int], grade: int) -> int:
        return self.delta(coords, grade) + self.offsets

    def decode(self, key: int) -> tuple[tuple[int, ...], int]:
        coords = tuple(((key >> (FIELD * i)) & MASK) - OFF for i in range(self.n))
        grade = (key >> self.grade_shift) & MASK
        return coords, grade

    def depth(self, key: int) -> int:
        return key >> self.depth_shift

    def grade(self, key: int) -> int:
        return (key >> self.grade_shift) & MASK


@lru_cache(maxsize=None)
def _codec(n: int) -> _Codec:
    return _Codec(n)


@lru_cache(maxsize=None)
def _rho_check(n: int) -> tuple[int, ...]:
    return tuple(int(c) for c in rho_vectors(n).rho_check.coords)


def principal_depth(coords: Sequence[int], grade: int) -> int:
    return _codec(len(coords)).depth_of(coords, grade)


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_frac(s: str) -> Fraction:
    return Fraction(s)


class FormalCharacter:
    """Sparse truncated series in ``e^nu`` (integral nu) and ``q``."""

    __slots__ = ("n", "_t", "q_offset", "trunc", "depth")

    def __init__(self, n: int, terms=None, q_offset=0, trunc: int = 0, depth: int | None = None):
        self.n = n
        self.q_offset = Fraction(q_offset)
        self.trunc = int(trunc)
        self.depth = depth
        self._t: dict[int, int] = {}
        if terms:
            codec = _codec(n)
            for (coords, grade), c in terms.items():
                if c and grade <= trunc:
                    coords = tuple(int(x) for x in coords)
                    if depth is not None and codec.depth_of(coords, grade) > depth:
                        continue
                    key = codec.encode(coords, grade)
                    self._t[key] = self._t.get(key, 0) + c
            self._prune()

    @classmethod
    def _raw(cls, n, table, q_offset, trunc, depth) -> "FormalCharacter":
        out = cls.__new__(cls)
        out.n = n
        out._t = table
        out.q_offset = Fraction(q_offset)
        out.trunc = trunc
        out.depth = depth
        return out

    def _prune(self) -> None:
        self._t = {k: v for k, v in self._t.items() if v}

    def copy(self) -> "FormalCharacter":
        return FormalCharacter._raw(self.n, dict(self._t), self.q_offset, self.trunc, self.depth)

    # -- inspection --------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[tuple[int, ...], int], int]:
        codec = _codec(self.n)
        return {codec.decode(k): v for k, v in self._t.items()}

    def __len__(self) -> int:
        return len(self._t)

    def coefficient(self, coords: Sequence[int], grade: int) -> int:
        coords = tuple(int(c) for c in coords)
        if grade > self.trunc:
            raise ValueError(f"grade {grade} beyond truncation {self.trunc}")
        key = _codec(self.n).encode(coords, grade)
        if self.depth is not None and _codec(self.n).depth(key) > self.depth:
            raise ValueError("monomial lies beyond the depth truncation")
        return self._t.get(key, 0)

    def grade_slice(self, grade: int) -> dict[tuple[int, ...], int]:
        codec = _codec(self.n)
        out = {}
        for k, v in self._t.items():
            coords, g = codec.decode(k)
            if g == grade:
                out[coords] = v
        return out

    def floor(self) -> int | None:
        """Smallest principal depth present, ``None`` when empty."""
        if not self._t:
            return None
        codec = _codec(self.n)
        return min(codec.depth(k) for k in self._t)

    def _floor_bound(self) -> float:
        f = self.floor()
        if f is not None:
            return f
        return float("inf") if self.depth is None else self.depth + 1

    def is_nonnegative(self) -> bool:
        return all(v > 0 for v in self._t.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalCharacter):
            return NotImplemented
        return (
            self.n == other.n
            and self._t == other._t
            and self.q_offset == other.q_offset
            and self.trunc == other.trunc
            and self.depth == other.depth
        )

    def __repr__(self) -> str:
        return (
            f"FormalCharacter(n={self.n}, terms={len(self._t)}, q_offset={self.q_offset}, "
            f"trunc={self.trunc}, depth={self.depth})"
        )

    # -- truncation --------------------------------------------------------
    def truncated(self, trunc: int | None = None, depth: int | None = None) -> "FormalCharacter":
        trunc = self.trunc if trunc is None else min(trunc, self.trunc)
        if depth is None:
            depth = self.depth
        elif self.depth is not None:
            depth = min(depth, self.depth)
        codec = _codec(self.n)
        table = {
            k: v
            for k, v in self._t.items()
            if codec.grade(k) <= trunc and (depth is None or codec.depth(k) <= depth)
        }
        return FormalCharacter._raw(self.n, table, self.q_offset, trunc, depth)

    def difference_report(self, other: "FormalCharacter"):
        """First differing ``(coords, grade, lhs, rhs)`` in canonical order, or ``None``."""
        codec = _codec(self.n)
        keys = set(self._t) | set(other._t)
        bad = [k for k in keys if self._t.get(k, 0) != other._t.get(k, 0)]
        if not bad:
            return None
        decoded = sorted((codec.decode(k)[1], codec.decode(k)[0], k) for k in bad)
        g, coords, k = decoded[0]
        return {"coords": list(coords), "grade": g, "lhs": self._t.get(k, 0), "rhs": other._t.get(k, 0)}

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "FormalCharacter") -> None:
        if self.n != other.n:
            raise ValueError("rank mismatch")

    def _combine(self, other: "FormalCharacter", sign: int) -> "FormalCharacter":
        self._check(other)
        if self.q_offset != other.q_offset:
            raise ValueError("cannot add series with different q offsets")
        trunc = min(self.trunc, other.trunc)
        depths = [d for d in (self.depth, other.depth) if d is not None]
        depth = min(depths) if depths else None
        a = self.truncated(trunc, depth)._t
        b = other.truncated(trunc, depth)._t
        table = dict(a)
        for k, v in b.items():
            table[k] = table.get(k, 0) + sign * v
        out = FormalCharacter._raw(self.n, table, self.q_offset, trunc, depth)
        out._prune()
        return out

    def __add__(self, other: "FormalCharacter") -> "FormalCharacter":
        return self._combine(other, 1)

    def __sub__(self, other: "FormalCharacter") -> "FormalCharacter":
        return self._combine(other, -1)

    def __neg__(self) -> "FormalCharacter":
        return self.scale(-1)

    def scale(self, c: int) -> "FormalCharacter":
        table = {k: c * v for k, v in self._t.items()} if c else {}
        return FormalCharacter._raw(self.n, table, self.q_offset, self.trunc, self.depth)

    def __mul__(self, other: "FormalCharacter") -> "FormalCharacter":
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        fa, fb = self._floor_bound(), other._floor_bound()
        bounds = []
        if self.depth is not None:
            bounds.append(self.depth + fb)
        if other.depth is not None:
            bounds.append(other.depth + fa)
        bounds = [b for b in bounds if b != float("inf")]
        depth = int(min(bounds)) if bounds else None
        codec = _codec(self.n)
        gs, ds, off = codec.grade_shift, codec.depth_shift, codec.offsets
        right = sorted(other._t.items(), key=lambda kv: kv[0] >> ds)
        table: dict[int, int] = defaultdict(int)
        for ka, va in self._t.items():
            da = ka >> ds
            ga = (ka >> gs) & MASK
            for kb, vb in right:
                if depth is not None and da + (kb >> ds) > depth:
                    break
                if ga + ((kb >> gs) & MASK) > trunc:
                    continue
                table[ka + kb - off] += va * vb
        out = FormalCharacter._raw(self.n, dict(table), self.q_offset + other.q_offset, trunc, depth)
        out._prune()
        return out

    def shift(self, coords: Sequence[int], grade: int = 0) -> "FormalCharacter":
        """Multiply by the monomial ``e^coords q^grade``."""
        codec = _codec(self.n)
        step = codec.delta(coords, grade)
        dd = codec.depth_of(coords, grade)
        table = {k + step: v for k, v in self._t.items() if codec.grade(k) + grade <= self.trunc}
        depth = None if self.depth is None else self.depth + dd
        return FormalCharacter._raw(self.n, table, self.q_offset, self.trunc, depth)

    def with_offset(self, q_offset) -> "FormalCharacter":
        return FormalCharacter._raw(self.n, dict(self._t), Fraction(q_offset), self.trunc, self.depth)

    def mul_binomial(self, coords: Sequence[int], grade: int, sign: int) -> "FormalCharacter":
        """Multiply by ``1 + sign * e^coords q^grade`` (in place on a copy)."""
        codec = _codec(self.n)
        step = codec.delta(coords, grade)
        dd = codec.depth_of(coords, grade)
        table = dict(self._t)
        limit_d = self.depth
        for k, v in self._t.items():
            if codec.grade(k) + grade > self.trunc:
                continue
            if limit_d is not None and (k >> codec.depth_shift) + dd > limit_d:
                continue
            k2 = k + step
            table[k2] = table.get(k2, 0) + sign * v
        out = FormalCharacter._raw(self.n, table, self.q_offset, self.trunc, self.depth)
        out._prune()
        return out

    def div_binomial(self, coords: Sequence[int], grade: int, prune: bool = True, sign: int = -1) -> "FormalCharacter":
        """Multiply by the geometric series ``1 / (1 + sign * e^coords q^grade)``.

        Requires a positive-depth monomial and a finite depth bound.  Packed
        keys on one chain ``k, k + x, k + 2x, ...`` share ``k mod x``, so each
        chain is swept once with a running prefix sum.
        """
        codec = _codec(self.n)
        dd = codec.depth_of(coords, grade)
        if dd <= 0:
            raise ValueError("geometric factor needs a positive-depth monomial")
        if self.depth is None:
            raise ValueError("geometric factor needs a finite depth bound")
        step = codec.delta(coords, grade)
        ds, gs = codec.depth_shift, codec.grade_shift
        chains: dict[int, int] = {}
        for k in self._t:
            c = k % step
            p = k // step
            if c not in chains or p < chains[c]:
                chains[c] = p
        table = dict(self._t)
        get = table.get
        for c, p in chains.items():
            k = p * step + c
            room = (self.depth - (k >> ds)) // dd
            if grade:
                room = min(room, (self.trunc - ((k >> gs) & MASK)) // grade)
            acc = 0
            for _ in range(room + 1):
                acc = get(k, 0) - sign * acc
                if acc or k in table:
                    table[k] = acc
                k += step
        out = FormalCharacter._raw(self.n, table, self.q_offset, self.trunc, self.depth)
        if prune:
            out._prune()
        return out

    # -- serialization -----------------------------------------------------
    def to_json_obj(self) -> dict:
        terms = sorted((list(c) + [g, v]) for (c, g), v in self.terms.items())
        return {
            "n": self.n,
            "q_offset": _frac_str(self.q_offset),
            "trunc": self.trunc,
            "depth": self.depth,
            "terms": terms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "FormalCharacter":
        n = obj["n"]
        terms = {(tuple(t[:n]), t[n]): t[n + 1] for t in obj["terms"]}
        return cls(n, terms, _parse_frac(obj["q_offset"]), obj["trunc"], obj["depth"])

    @classmethod
    def from_json(cls, text: str) -> "FormalCharacter":
        return cls.from_json_obj(json.loads(text))

    @classmethod
    def monomial(cls, coords: Sequence[int], grade: int = 0, trunc: int = 0, coeff: int = 1) -> "FormalCharacter":
        return cls(len(coords), {(tuple(coords), grade): coeff}, 0, trunc, None)


# ---------------------------------------------------------------------------
# Denominators


@dataclass(frozen=True)
class Factor:
    """``(1 + sign * e^coords q^grade)^power`` with power in {+1, -1}."""

    coords: tuple[int, ...]
    grade: int
    sign: int
    power: int


def _int_coords(w: Weight) -> tuple[int, ...]:
    return w.int_coords()


@lru_cache(maxsize=None)
def denominator_factors(atype: AlgebraType, n: int, trunc: int) -> tuple[Factor, ...]:
    """Factors of the affine denominator with grade at most ``trunc`` (power +1)."""
    out: list[Factor] = []
    zero = (0,) * n
    for j in range(1, trunc + 1):
        for _ in range(n):
            out.append(Factor(zero, j, -1, 1))
    for alpha in positive_roots(RootType.C, n):
        a = _int_coords(alpha)
        neg = tuple(-x for x in a)
        for j in range(1, trunc + 1):
            out.append(Factor(a, j, -1, 1))
        for j in range(0, trunc + 1):
            out.append(Factor(neg, j, -1, 1))
    if atype is AlgebraType.OSP:
        # fermionic factors sit in the denominator with power -1
        for alpha in odd_positive_roots(n):
            a = _int_coords(alpha)
            neg = tuple(-x for x in a)
            for j in range(1, trunc + 1):
                out.append(Factor(a, j, 1, -1))
            for j in range(0, trunc + 1):
                out.append(Factor(neg, j, 1, -1))
    return tuple(out)


def apply_factors(series: FormalCharacter, factors: Iterable[Factor], invert: bool) -> FormalCharacter:
    """Multiply by the product of ``factors`` (or its inverse when ``invert``)."""
    codec = _codec(series.n)
    out = series
    # geometric series first would be wasted work on terms later cancelled;
    # order: finite factors, then geometric ones by increasing depth
    items = sorted(factors, key=lambda f: (f.power * (-1 if invert else 1) < 0, codec.depth_of(f.coords, f.grade)))
    # multiplying by positive-depth factors never lowers the minimal depth
    floor = series._floor_bound()
    for f in items:
        power = -f.power if invert else f.power
        if f.grade > out.trunc:
            continue
        if out.depth is not None and codec.depth_of(f.coords, f.grade) > out.depth - floor:
            continue
        if power == 1:
            out = out.mul_binomial(f.coords, f.grade, f.sign)
        else:
            out = out.div_binomial(f.coords, f.grade, prune=False, sign=f.sign)
    out._prune()
    return out


def default_depth(n: int, trunc: int) -> int:
    return 4 * n * (trunc + 1)


_RINV_CACHE: dict[tuple[AlgebraType, int, int], FormalCharacter] = {}


def denominator_inverse(atype: AlgebraType, n: int, trunc: int, depth: int | None = None) -> FormalCharacter:
    """Expansion of the inverse affine denominator.

    The result is exact on every monomial of grade at most ``trunc`` and
    principal depth at most ``depth`` (default ``4n(trunc+1)``).
    """
    if trunc < 0:
        raise ValueError("trunc must be nonnegative")
    if depth is None:
        depth = default_depth(n, trunc)
    key = (atype, n, trunc)
    cached = _RINV_CACHE.get(key)
    if cached is not None and cached.depth >= depth:
        return cached if cached.depth == depth else cached.truncated(depth=depth)
    result = expand_factors(n, trunc, depth, [(f, True) for f in denominator_factors(atype, n, trunc)])
    _RINV_CACHE[key] = result
    return result


def denominator(atype: AlgebraType, n: int, trunc: int, depth: int | None = None) -> FormalCharacter:
    """The affine denominator itself, truncated at ``trunc`` (and ``depth`` if given)."""
    if depth is None:
        one = FormalCharacter._raw(n, {_codec(n).encode((0,) * n, 0): 1}, 0, trunc, None)
        return apply_factors(one, denominator_factors(atype, n, trunc), invert=False)
    return expand_factors(n, trunc, depth, [(f, False) for f in denominator_factors(atype, n, trunc)])


def expand_factors(n: int, trunc: int, depth: int, factors: Sequence[tuple[Factor, bool]]) -> FormalCharacter:
    """Product of ``factor`` (or its inverse when flagged) starting from 1.

    Uses dense int64 arrays over the affine root cone and falls back to the
    exact sparse engine when coefficients approach the int64 range.
    """
    codec = _codec(n)
    steps = []
    for f, invert in factors:
        if f.grade > trunc or codec.depth_of(f.coords, f.grade) > depth:
            continue
        steps.append((f.coords, f.grade, f.sign, -f.power if invert else f.power))
    try:
        table = _dense.cone_product(n, trunc, depth, _rho_check(n), steps)
        return FormalCharacter(n, table, 0, trunc, depth)
    except _dense.Overflow:
        pass
    out = FormalCharacter._raw(n, {codec.encode((0,) * n, 0): 1}, 0, trunc, depth)
    for coords, grade, sign, power in steps:
        if power == 1:
            out = out.mul_binomial(coords, grade, sign)
        else:
            out = out.div_binomial(coords, grade, prune=False, sign=sign)
    out._prune()
    return out


def clear_cache() -> None:
    _RINV_CACHE.clear()


# ---------------------------------------------------------------------------
# Theta sum and the super-denominator identity


def theta_exponent(coords: Sequence[int]) -> int:
    return sum(c * (c + 1) // 2 for c in coords)


def theta_sum(n: int, trunc: int) -> FormalCharacter:
    """Sum of ``e^lam q^{(lam|lam+2 rho_odd)}`` over all integral lam with exponent <= trunc."""
    values = [m for m in range(-trunc - 2, trunc + 2) if m * (m + 1) // 2 <= trunc]
    terms: dict = {}

    def rec(prefix: list[int], budget: int) -> None:
        if len(prefix) == n:
            terms[(tuple(prefix), trunc - budget)] = 1
            return
        for m in values:
            e = m * (m + 1) // 2
            if e <= budget:
                rec(prefix + [m], budget - e)

    rec([], trunc)
    return FormalCharacter(n, terms, 0, trunc, None)


@dataclass
class Report:
    identity: str
    params: dict
    trunc: int
    status: str
    first_mismatch: dict | None = None
    detail: dict | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_json_obj(self) -> dict:
        obj = {"identity": self.identity, "params": self.params, "trunc": self.trunc, "status": self.status}
        if self.first_mismatch is not None:
            obj["first_mismatch"] = self.first_mismatch
        if self.detail:
            obj["detail"] = self.detail
        return obj


TRUNC_CAP = 24


def verify_triple_product(n: int, trunc: int, cap: int = TRUNC_CAP) -> Report:
    """Check ``R_osp^-1 * R_sp * prod (1-q^j)^n == theta`` on the full theta support."""
    if trunc > cap:
        raise ValueError(f"trunc {trunc} exceeds cap {cap}")
    theta = theta_sum(n, trunc)
    codec = _codec(n)
    depth = max(codec.depth(k) for k in theta._t)
    zero = (0,) * n
    factors = [(f, True) for f in denominator_factors(AlgebraType.OSP, n, trunc)]
    factors += [(f, False) for f in denominator_factors(AlgebraType.SP, n, trunc)]
    factors += [(Factor(zero, j, -1, 1), False) for j in range(1, trunc + 1) for _ in range(n)]
    lhs = expand_factors(n, trunc, depth, factors)
    rhs = theta.truncated(depth=depth)
    mismatch = lhs.truncated(depth=depth).difference_report(rhs)
    return Report(
        "triple-product",
        {"n": n},
        trunc,
        "ok" if mismatch is None else "mismatch",
        mismatch,
        {"depth": depth, "terms": len(rhs)},
    )


def verify_triple_product_univariate(trunc: int) -> Report:
    """Classical check at ``e^{e_1} -> 1``: prod (1-q^j)(1+q^j)(1+q^{j-1}) = sum q^{m(m+1)/2}."""
    lhs = [0] * (trunc + 1)
    lhs[0] = 1

    def mul(poly, j, sign):
        out = list(poly)
        for i in range(trunc - j, -1, -1):
            out[i + j] += sign * poly[i]
        return out

    lhs = [2 * c for c in lhs]
    for j in range(1, trunc + 1):
        lhs = mul(lhs, j, -1)
        lhs = mul(lhs, j, 1)
        lhs = mul(lhs, j, 1)
    rhs = [0] * (trunc + 1)
    for m in range(-trunc - 2, trunc + 2):
        e = m * (m + 1) // 2
        if e <= trunc:
            rhs[e] += 1
    mismatch = None
    for g in range(trunc + 1):
        if lhs[g] != rhs[g]:
            mismatch = {"grade": g, "lhs": lhs[g], "rhs": rhs[g]}
            break
    return Report("triple-product-univariate", {}, trunc, "ok" if mismatch is None else "mismatch", mismatch)


# ---------------------------------------------------------------------------
# Verma and Weyl modules


def verma_character(atype: AlgebraType, lam: Weight, trunc: int, depth: int | None = None) -> FormalCharacter:
    """``e^lam / R``; ``depth`` is relative to lam (default ``4n(trunc+1)``)."""
    coords = lam.int_coords()
    n = len(coords)
    rel = default_depth(n, trunc) if depth is None else depth
    return denominator_inverse(atype, n, trunc, rel).shift(coords)


def _rho_for(atype: AlgebraType, n: int) -> Weight:
    rv = rho_vectors(n)
    return rv.rho_osp if atype is AlgebraType.OSP else rv.rho_sp


def weyl_module_depth(n: int, mu_coords: Sequence[int], trunc: int) -> int:
    """Principal depth bound covering every weight of a Weyl module up to ``trunc``.

    Weights at grade g satisfy ``|nu|_1 <= |mu|_1 + 2g`` (each negative mode adds
    a root of 1-norm at most 2), hence depth <= 4n*g + rho_check_1 * |nu|_1.
    """
    r1 = 2 * n - 1
    l1 = sum(abs(c) for c in mu_coords)
    return (4 * n + 2 * r1) * trunc + r1 * l1


def weyl_module_character(atype: AlgebraType, mu: Weight, trunc: int) -> FormalCharacter:
    """Alternating Weyl sum of Verma characters; complete at every grade <= trunc."""
    if not mu.is_integral() or not is_dominant(mu):
        raise ValueError(f"{mu} is not a dominant integral weight")
    n = mu.n
    rho = _rho_for(atype, n)
    coords = mu.int_coords()
    depth = weyl_module_depth(n, coords, trunc)
    codec = _codec(n)
    shifts: list[tuple[int, tuple[int, ...]]] = []
    for w in weyl_group(n):
        lam = Weight(w.apply((mu + rho).coords)) - rho
        shifts.append((w.det, lam.int_coords()))
    rel_needed = [depth - codec.depth_of(c, 0) for _, c in shifts]
    rel_max = max(rel_needed)
    if rel_max < 0:
        raise AssertionError("depth bound excludes the highest weight")
    rinv = denominator_inverse(atype, n, trunc, rel_max)
    table: dict[int, int] = defaultdict(int)
    for (sign, c), rel in zip(shifts, rel_needed):
        if rel < 0:
            continue
        step = codec.delta(c, 0)
        ds = codec.depth_shift
        for k, v in rinv._t.items():
            if (k >> ds) <= rel:
                table[k + step] += sign * v
    out = FormalCharacter._raw(n, dict(table), 0, trunc, None)
    out._prune()
    return out


# ---------------------------------------------------------------------------
# Univariate q-series with rational exponents


class QSeries:
    """Finite map ``exponent (Fraction) -> int``, exact for exponents <= ``trunc``."""

    __slots__ = ("terms", "trunc")

    def __init__(self, terms: Mapping | None = None, trunc=0):
        self.trunc = Fraction(trunc)
        self.terms: dict[Fraction, int] = {}
        for e, c in (terms or {}).items():
            e = Fraction(e)
            if c and e <= self.trunc:
                self.terms[e] = self.terms.get(e, 0) + c
        self.terms = {e: c for e, c in self.terms.items() if c}

    def __repr__(self) -> str:
        body = " + ".join(f"{c}q^{e}" for e, c in sorted(self.terms.items())[:8])
        return f"QSeries({body}{' + ...' if len(self.terms) > 8 else ''}; trunc={self.trunc})"

    def coefficient(self, e) -> int:
        e = Fraction(e)
        if e > self.trunc:
            raise ValueError(f"exponent {e} beyond truncation {self.trunc}")
        return self.terms.get(e, 0)

    def valuation(self) -> Fraction | None:
        return min(self.terms) if self.terms else None

    def truncated(self, trunc) -> "QSeries":
        return QSeries(self.terms, min(Fraction(trunc), self.trunc))

    def _combine(self, other: "QSeries", sign: int) -> "QSeries":
        t = min(self.trunc, other.trunc)
        out = {e: c for e, c in self.terms.items() if e <= t}
        for e, c in other.terms.items():
            if e <= t:
                out[e] = out.get(e, 0) + sign * c
        return QSeries(out, t)

    def __add__(self, other: "QSeries") -> "QSeries":
        return self._combine(other, 1)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self._combine(other, -1)

    def scale(self, c: int) -> "QSeries":
        return QSeries({e: c * v for e, v in self.terms.items()}, self.trunc)

    def shift(self, e) -> "QSeries":
        e = Fraction(e)
        return QSeries({x + e: v for x, v in self.terms.items()}, self.trunc + e)

    def __mul__(self, other: "QSeries") -> "QSeries":
        va, vb = self.valuation(), other.valuation()
        if va is None or vb is None:
            bounds = [self.trunc + (vb if vb is not None else other.trunc + 1)]
            return QSeries({}, min(self.trunc, other.trunc) if va is None and vb is None else bounds[0])
        t = min(self.trunc + vb, other.trunc + va)
        out: dict[Fraction, int] = defaultdict(int)
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                if ea + eb <= t:
                    out[ea + eb] += ca * cb
        return QSeries(out, t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.terms == other.terms

    def agrees_with(self, other: "QSeries"):
        """First exponent where the two series differ within their common range, else ``None``."""
        t = min(self.trunc, other.trunc)
        keys = sorted({e for e in self.terms if e <= t} | {e for e in other.terms if e <= t})
        for e in keys:
            if self.terms.get(e, 0) != other.terms.get(e, 0):
                return {"exponent": _frac_str(e), "lhs": self.terms.get(e, 0), "rhs": other.terms.get(e, 0)}
        return None

    def is_nonnegative(self) -> bool:
        return all(c > 0 for c in self.terms.values())

    def to_json_obj(self) -> dict:
        return {
            "trunc": _frac_str(self.trunc),
            "terms": [[_frac_str(e), c] for e, c in sorted(self.terms.items())],
        }


@lru_cache(maxsize=None)
def colored_partitions(n: int, trunc: int) -> tuple[int, ...]:
    """Coefficients of ``prod_j (1 - q^j)^{-n}`` up to ``q^trunc``."""
    coeffs = [0] * (trunc + 1)
    coeffs[0] = 1
    for j in range(1, trunc + 1):
        for _ in range(n):
            for i in range(j, trunc + 1):
                coeffs[i] += coeffs[i - j]
    return tuple(coeffs)


def eta_inverse(n: int, start, trunc) -> QSeries:
    """``q^start / prod (1-q^j)^n`` exact for exponents <= ``trunc`` (absolute)."""
    start, trunc = Fraction(start), Fraction(trunc)
    if start > trunc:
        return QSeries({}, trunc)
    span = int((trunc - start) // 1)
    coeffs = colored_partitions(n, span)
    return QSeries({start + i: c for i, c in enumerate(coeffs)}, trunc)


def ds_specialize(ch, prefactor, n: int, trunc) -> QSeries:
    """Principal specialization ``e^nu -> q^{-(nu|rho_check)}`` of ``R * ch``.

    ``ch`` is either a complete :class:`FormalCharacter` or a mapping from
    weights (coordinate tuples, possibly rational) to integer coefficients.
    The result is multiplied by ``q^prefactor / prod (1-q^j)^n`` and is exact for
    exponents up to ``prefactor + offset + trunc``.
    """
    prefactor = Fraction(prefactor)
    rc = rho_vectors(n).rho_check
    monos: dict[Fraction, int] = defaultdict(int)
    if isinstance(ch, FormalCharacter):
        if ch.depth is not None:
            raise ValueError("principal specialization needs a weight-complete input")
        base = ch.q_offset
        for (coords, g), c in ch.terms.items():
            e = g - bilinear(Weight(coords), rc)
            monos[e] += c
    else:
        base = Fraction(0)
        for coords, c in ch.items():
            e = -bilinear(Weight(coords), rc)
            monos[e] += c
    limit = prefactor + base + Fraction(trunc)
    out = QSeries({}, limit)
    for e, c in sorted(monos.items()):
        if c:
            out = out + eta_inverse(n, prefactor + base + e, limit).scale(c)
    return out
