"""Finite tensor products, Kac-Walton folding and the fusion rings built from them.

Labels are coordinate tuples: integers for C-side weights, Fractions for
B-side weights (which may be spinors).  W-algebra labels are pairs of C-side
tuples.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .admissible import AdmissibleLevel, InvalidLevel, Kind, WeightSet, enumerate_weights
from .charseries import AlgebraType, weyl_module_character
from .rootdata import (
    Convention,
    Regularity,
    RootType,
    Weight,
    act,
    bilinear,
    classify,
    dominant_rep,
    is_dominant,
    positive_roots,
    rho_b,
    rho_vectors,
    weyl_dimension,
    weyl_group,
)

CACHE_VERSION = 1
CACHE_ENV = "OSPCHAR_CACHE_DIR"

class LabelError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Finite characters


def _conv(rtype: RootType) -> Convention:
    return Convention.B_SIDE if rtype is RootType.B else Convention.C_SIDE


def _rho(rtype: RootType, n: int) -> Weight:
    return rho_b(n) if rtype is RootType.B else rho_vectors(n).rho_sp


def _in_root_cone(rtype: RootType, d: Sequence[Fraction]) -> bool:
    """Whether ``d`` is a nonnegative integer combination of simple roots."""
    partial = Fraction(0)
    for i, x in enumerate(d):
        partial += x
        coeff = partial if (i < len(d) - 1 or rtype is RootType.B) else partial / 2
        if coeff < 0 or coeff.denominator != 1:
            return False
    return True


@lru_cache(maxsize=None)
def _dominant_below(rtype: RootType, lam: tuple) -> tuple[tuple, ...]:
    n = len(lam)
    lam = tuple(Fraction(c) for c in lam)
    start = lam[-1] - int(lam[-1])
    out = []

    def rec(prefix, top):
        if len(prefix) == n:
            d = [a - b for a, b in zip(lam, prefix)]
            if _in_root_cone(rtype, d):
                out.append(tuple(prefix))
            return
        v = top
        while v >= start:
            rec(prefix + [v], v)
            v -= 1

    rec([], lam[0])
    return tuple(out)


@lru_cache(maxsize=None)
def freudenthal(rtype: RootType, lam: tuple) -> dict[tuple, int]:
    """Weight multiplicities of the simple module with dominant highest weight ``lam``.

    Works for B (including spinor weights) and C, over exact rationals.
    """
    n = len(lam)
    conv = _conv(rtype)
    lamw = Weight(lam, conv)
    if not is_dominant(lamw):
        raise ValueError(f"{lamw} is not dominant")
    rho = _rho(rtype, n)
    pos = [a for a in positive_roots(rtype, n)]
    top = bilinear(lamw + rho, lamw + rho)
    dominant = sorted(_dominant_below(rtype, tuple(lamw.coords)), key=lambda c: -sum(c))
    mult: dict[tuple, int] = {}

    def m_of(coords: tuple) -> int:
        _, plus = dominant_rep(Weight(coords, conv))
        return mult.get(plus.coords, 0)

    lam_norm = bilinear(lamw, lamw)
    for mu in dominant:
        if mu == lamw.coords:
            mult[mu] = 1
            continue
        muw = Weight(mu, conv)
        acc = Fraction(0)
        for alpha in pos:
            k = 1
            while True:
                nu = muw + alpha * k
                if bilinear(nu, nu) > lam_norm:
                    break
                m = m_of(nu.coords)
                if m:
                    acc += m * bilinear(nu, alpha)
                k += 1
        denom = top - bilinear(muw + rho, muw + rho)
        val = 2 * acc / denom
        if val.denominator != 1:
            raise AssertionError("non-integral Freudenthal multiplicity")
        if val:
            mult[mu] = int(val)
    full: dict[tuple, int] = {}
    for mu, m in mult.items():
        for w in weyl_group(n):
            full[act(w, Weight(mu, conv)).coords] = m
    return full


def finite_character(lam: Sequence[int]) -> dict[tuple[int, ...], int]:
    """Character of the simple sp_2n module, read off the grade-0 slice of its Weyl module."""
    ch = weyl_module_character(AlgebraType.SP, Weight(lam), 0)
    return ch.grade_slice(0)


def _char_product(a: Mapping, b: Mapping) -> dict:
    out: dict = defaultdict(int)
    for x, ca in a.items():
        for y, cb in b.items():
            out[tuple(i + j for i, j in zip(x, y))] += ca * cb
    return out


def tensor_decompose(lam: Sequence[int], nu: Sequence[int], n: int | None = None) -> dict[tuple[int, ...], int]:
    """Multiplicities in ``E_lam (x) E_nu`` for sp_2n by stripping highest weights."""
    lam, nu = tuple(int(c) for c in lam), tuple(int(c) for c in nu)
    if n is not None and (len(lam) != n or len(nu) != n):
        raise ValueError("rank mismatch")
    for w in (lam, nu):
        if not is_dominant(Weight(w)):
            raise ValueError(f"{w} is not dominant")
    remaining = {k: v for k, v in _char_product(finite_character(lam), finite_character(nu)).items() if v}
    out: dict[tuple[int, ...], int] = {}
    while remaining:
        # a maximal weight in lexicographic order is dominant and highest
        top = max(remaining)
        m = remaining[top]
        if m < 0 or not is_dominant(Weight(top)):
            raise AssertionError("stripping produced an invalid residue")
        out[top] = m
        for k, v in finite_character(top).items():
            r = remaining.get(k, 0) - m * v
            if r:
                remaining[k] = r
            else:
                remaining.pop(k, None)
    return dict(sorted(out.items()))


def tensor_decompose_klimyk(rtype: RootType, lam: Sequence, nu: Sequence) -> dict[tuple, int]:
    """Brauer-Klimyk decomposition from Freudenthal multiplicities (B or C)."""
    conv = _conv(rtype)
    lam = tuple(Fraction(c) for c in lam)
    nu = Weight(nu, conv)
    rho = _rho(rtype, len(lam))
    out: dict[tuple, int] = defaultdict(int)
    for eta, m in freudenthal(rtype, lam).items():
        x = nu + Weight(eta, conv) + rho
        if classify(x) is Regularity.SINGULAR:
            continue
        w, plus = dominant_rep(x)
        out[(plus - rho).coords] += w.det * m
    return {k: v for k, v in sorted(out.items()) if v}


def dimension(rtype: RootType, lam: Sequence) -> int:
    return weyl_dimension(rtype, Weight(lam, _conv(rtype)))


# ---------------------------------------------------------------------------
# Kac-Walton folding


def fold(x: Sequence[Fraction], period) -> tuple[int, tuple] | None:
    """Bring ``x`` into the fundamental alcove of signed permutations and translations by ``period``.

    Walls sit at ``x_i = 0, period/2`` (mod period) and ``|x_i| = |x_j|``.
    Returns ``(sign, alcove point)`` or ``None`` on a wall.
    """
    period = Fraction(period)
    half = period / 2
    reduced = []
    flips = 0
    for c in x:
        r = Fraction(c) % period
        if r > half:
            r -= period
        if r == 0 or r == half:
            return None
        if r < 0:
            flips += 1
            r = -r
        reduced.append(r)
    if len(set(reduced)) < len(reduced):
        return None
    order = sorted(range(len(reduced)), key=lambda i: -reduced[i])
    inversions = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
    sign = -1 if (flips + inversions) % 2 else 1
    return sign, tuple(reduced[i] for i in order)


def _fold_decomposition(decomp: Mapping[tuple, int], rho: Sequence, period) -> dict[tuple, int]:
    out: dict[tuple, int] = defaultdict(int)
    for phi, m in decomp.items():
        res = fold([Fraction(a) + b for a, b in zip(phi, rho)], period)
        if res is None:
            continue
        sign, x = res
        out[tuple(_normalize(a - b) for a, b in zip(x, rho))] += sign * m
    clean = {k: v for k, v in sorted(out.items()) if v}
    if any(v < 0 for v in clean.values()):
        raise AssertionError("negative fusion coefficient after folding")
    return clean


def _normalize(c: Fraction):
    return int(c) if c.denominator == 1 else c


def affine_labels(level: int, n: int) -> list[tuple[int, ...]]:
    """Integrable sp_2n labels at a positive integer level: ``c_1 <= level``."""
    return [tuple(int(c) for c in w.coords) for w in enumerate_weights(WeightSet.P_C, level + n + 1, 1, n)]


def affine_fusion(lam: Sequence[int], nu: Sequence[int], level: int, n: int) -> dict[tuple[int, ...], int]:
    """Fusion coefficients of sp_2n at positive integer ``level``."""
    if level < 0:
        raise ValueError("level must be a nonnegative integer")
    lam, nu = tuple(int(c) for c in lam), tuple(int(c) for c in nu)
    alphabet = set(affine_labels(level, n))
    for x in (lam, nu):
        if x not in alphabet:
            raise LabelError(f"{x} is not an integrable label at level {level}")
    rho = [int(c) for c in rho_vectors(n).rho_sp.coords]
    # reflection in (x|theta) = level + h_dual sends x_1 to 2m - x_1
    return _fold_decomposition(tensor_decompose(lam, nu, n), rho, 2 * (level + n + 1))


# ---------------------------------------------------------------------------
# Fusion tables


def _label_json(label):
    if isinstance(label, tuple) and label and isinstance(label[0], tuple):
        return [_label_json(x) for x in label]
    return [str(c) for c in label]


def _label_from_json(obj):
    if obj and isinstance(obj[0], list):
        return tuple(_label_from_json(x) for x in obj)
    return tuple(_normalize(Fraction(c)) for c in obj)


@dataclass
class FusionTable:
    alphabet: list
    constants: dict
    meta: dict = field(default_factory=dict)

    def product(self, a, b) -> dict:
        return self.constants.get((a, b), {})

    @property
    def unit(self):
        return self.meta.get("unit", self.alphabet[0])

    def check_axioms(self) -> dict:
        """Unit, commutativity, nonnegativity, closure and associativity; returns failures."""
        failures: dict = {}
        alpha = self.alphabet
        aset = set(alpha)
        u = self.unit
        for b in alpha:
            if self.product(u, b) != {b: 1}:
                failures.setdefault("unit", (u, b, self.product(u, b)))
        for a, b in itertools.combinations_with_replacement(alpha, 2):
            if self.product(a, b) != self.product(b, a):
                failures.setdefault("commutativity", (a, b))
            for c, m in self.product(a, b).items():
                if m < 0:
                    failures.setdefault("nonnegativity", (a, b, c, m))
                if c not in aset:
                    failures.setdefault("closure", (a, b, c))
        for a, b, c in itertools.product(alpha, repeat=3):
            left: dict = defaultdict(int)
            for x, m in self.product(a, b).items():
                for y, m2 in self.product(x, c).items():
                    left[y] += m * m2
            right: dict = defaultdict(int)
            for x, m in self.product(b, c).items():
                for y, m2 in self.product(a, x).items():
                    right[y] += m * m2
            if {k: v for k, v in left.items() if v} != {k: v for k, v in right.items() if v}:
                failures.setdefault("associativity", (a, b, c))
                break
        return failures

    def check_charge_symmetry(self) -> tuple | None:
        """``N(a,b)^c == N(a,c)^b``; valid since every label here is self-dual."""
        for (a, b), prod in self.constants.items():
            for c in self.alphabet:
                if prod.get(c, 0) != self.product(a, c).get(b, 0):
                    return (a, b, c)
        return None

    def to_json_obj(self) -> dict:
        triples = []
        for (a, b), prod in sorted(self.constants.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
            for c, m in sorted(prod.items(), key=lambda kv: str(kv[0])):
                triples.append([_label_json(a), _label_json(b), _label_json(c), m])
        return {
            "version": CACHE_VERSION,
            "meta": {k: v for k, v in self.meta.items() if k != "unit"},
            "alphabet": [_label_json(a) for a in self.alphabet],
            "constants": triples,
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "FusionTable":
        alphabet = [_label_from_json(a) for a in obj["alphabet"]]
        constants: dict = defaultdict(dict)
        for a, b, c, m in obj["constants"]:
            constants[(_label_from_json(a), _label_from_json(b))][_label_from_json(c)] = m
        for a in alphabet:
            for b in alphabet:
                constants.setdefault((a, b), {})
        return cls(alphabet, dict(constants), dict(obj.get("meta", {})))

    def content_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json_obj(), sort_keys=True).encode()).hexdigest()

    def to_csv_rows(self) -> list[list[str]]:
        rows = [["a", "b", "c", "multiplicity"]]
        for a, b, c, m in self.to_json_obj()["constants"]:
            rows.append([json.dumps(a), json.dumps(b), json.dumps(c), str(m)])
        return rows


def _build(alphabet: list, rule: Callable, meta: dict, workers: int = 1) -> FusionTable:
    pairs = list(itertools.combinations_with_replacement(alphabet, 2))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(rule, [a for a, _ in pairs], [b for _, b in pairs]))
    else:
        results = [rule(a, b) for a, b in pairs]
    constants = {}
    for (a, b), prod in zip(pairs, results):
        constants[(a, b)] = prod
        constants[(b, a)] = prod
    return FusionTable(alphabet, constants, meta)


class _AffineRule:
    def __init__(self, level: int, n: int):
        self.level, self.n = level, n

    def __call__(self, a, b):
        return affine_fusion(a, b, self.level, self.n)


def affine_fusion_table(level: int, n: int, workers: int = 1) -> FusionTable:
    alphabet = affine_labels(level, n)
    meta = {"kind": "affine", "type": "C", "n": n, "level": level, "unit": (0,) * n}
    return _build(alphabet, _AffineRule(level, n), meta, workers)


# ---------------------------------------------------------------------------
# W-algebra fusion


def _w_level(p: int, q: int, n: int) -> AdmissibleLevel:
    level = AdmissibleLevel(RootType.C, n, p, q)
    if level.kind is not Kind.PRINCIPAL or not level.nondegenerate:
        raise InvalidLevel(f"k = -{n + 1} + {p}/{q} is not principal non-degenerate admissible")
    if level.coboundary:
        raise InvalidLevel(f"k = -{n + 1} + {p}/{q} is of coboundary type; the label set degenerates there")
    return level


def w_labels(p: int, q: int, n: int) -> tuple[list, list]:
    left = [tuple(int(c) for c in w.coords) for w in enumerate_weights(WeightSet.P_C, p, 1, n)]
    right = [tuple(int(c) for c in w.coords) for w in enumerate_weights(WeightSet.P_CHECK, p, q, n)]
    return left, right


RIGHT_RULES = ("dual", "literal")


def dual_fusion(c: Sequence[int], d: Sequence[int], q: int, n: int) -> dict[tuple[int, ...], int]:
    """Right-factor fusion on coweight labels, computed on the Langlands-dual side.

    A label ``c`` (integer C-side coords, all of one parity) is the B-side weight
    ``c / 2``.  Its so_2n+1 tensor products are folded with ``x = mu + rho_B`` into
    the alcove ``2 x_1 < q``, which is exactly the coweight label set at ``q``.
    """
    mu = tuple(Fraction(int(x), 2) for x in c)
    nu = tuple(Fraction(int(x), 2) for x in d)
    decomp = tensor_decompose_klimyk(RootType.B, mu, nu)
    folded = _fold_decomposition(decomp, rho_b(n).coords, q)
    return {tuple(int(2 * Fraction(x)) for x in k): m for k, m in folded.items()}


def w_fusion(a, b, p: int, q: int, n: int, rule: str = "dual") -> dict:
    """Fusion of W-algebra labels ``(lam, lam')`` as a product of two factor rings.

    The left factor is sp_2n fusion at level ``p - h``.  For the right factor,
    ``rule="literal"`` takes sp_2n fusion at level ``q - h`` and discards summands
    off the coweight set; ``rule="dual"`` (default) uses :func:`dual_fusion`.
    The two agree for n = 1; for n >= 2 only the dual rule is associative.
    """
    if rule not in RIGHT_RULES:
        raise ValueError(f"unknown right-factor rule {rule!r}")
    _w_level(p, q, n)
    left, right = w_labels(p, q, n)
    (lam, lam2), (nu, nu2) = a, b
    for x in (lam, nu):
        if x not in left:
            raise LabelError(f"{x} is not a left label")
    for x in (lam2, nu2):
        if x not in right:
            raise LabelError(f"{x} is not a right label")
    rset = set(right)
    first = affine_fusion(lam, nu, p - (n + 1), n)
    if rule == "literal":
        second = affine_fusion(lam2, nu2, q - (n + 1), n)
    else:
        second = dual_fusion(lam2, nu2, q, n)
    out = {}
    for phi, m in first.items():
        for phi2, m2 in second.items():
            if phi2 in rset:
                out[(phi, phi2)] = m * m2
    return dict(sorted(out.items()))


class _WRule:
    def __init__(self, p, q, n, rule):
        self.p, self.q, self.n, self.rule = p, q, n, rule

    def __call__(self, a, b):
        return w_fusion(a, b, self.p, self.q, self.n, self.rule)


def w_fusion_table(p: int, q: int, n: int, workers: int = 1, rule: str = "dual") -> FusionTable:
    _w_level(p, q, n)
    left, right = w_labels(p, q, n)
    alphabet = [(x, y) for x in left for y in right]
    zero = (0,) * n
    meta = {"kind": "w", "type": "C", "n": n, "p": p, "q": q, "rule": rule, "unit": (zero, zero)}
    return _build(alphabet, _WRule(p, q, n, rule), meta, workers)


def left_subtable(table: FusionTable) -> dict:
    """Structure constants among labels ``(lam, 0)``, keyed by the left weights."""
    zero = (0,) * table.meta["n"]
    out = {}
    for (a, b), prod in table.constants.items():
        if a[1] == zero and b[1] == zero:
            out[(a[0], b[0])] = {c[0]: m for c, m in prod.items() if c[1] == zero}
    return out


# ---------------------------------------------------------------------------
# osp(1|2n) fusion


def osp_level_data(u: int, v: int, n: int) -> dict:
    """Parameters of the right-factor alphabet for ``k = -h + u/v``."""
    q = 2 * u - v
    ell = AdmissibleLevel(RootType.C, n, u, q)
    if not ell.admissible or not ell.nondegenerate:
        raise InvalidLevel("dual level is not non-degenerate admissible")
    if ell.kind is Kind.PRINCIPAL:
        bp, bq = q, 2 * u
    else:
        bp, bq = q // 2, u
    return {"p": u, "q": q, "kind": ell.kind.value, "bp": bp, "bq": bq}


def osp_labels(u: int, v: int, n: int, integral_only: bool = True) -> list[tuple]:
    d = osp_level_data(u, v, n)
    which = WeightSet.P_B_Q if integral_only else WeightSet.P_B
    return [tuple(_normalize(c) for c in w.coords) for w in enumerate_weights(which, d["bp"], d["bq"], n)]


def osp_fusion(mu: Sequence, nu: Sequence, u: int, v: int, n: int, allow_ramond: bool = False, rule: str = "dual") -> dict:
    """Fusion of osp(1|2n) labels through the right factor of the W-algebra ring.

    ``mu`` maps to the label ``(0, 2 mu)``; the product is restricted to labels
    ``(0, c)`` and mapped back with ``c / 2``.
    """
    d = osp_level_data(u, v, n)
    if d["kind"] != "principal":
        raise InvalidLevel("osp fusion needs a principal dual level (q = 2u - v odd)")
    labels = set(osp_labels(u, v, n, integral_only=not allow_ramond))
    mu = tuple(_normalize(Fraction(c)) for c in mu)
    nu = tuple(_normalize(Fraction(c)) for c in nu)
    for x in (mu, nu):
        if x not in labels:
            raise LabelError(f"{x} is not in the label set")
    zero = (0,) * n
    to_c = lambda m: tuple(int(2 * Fraction(c)) for c in m)
    prod = w_fusion((zero, to_c(mu)), (zero, to_c(nu)), d["p"], d["q"], n, rule)
    out = {}
    for (phi, phi2), m in prod.items():
        if phi == zero:
            out[tuple(_normalize(Fraction(c, 2)) for c in phi2)] = m
    return out


def osp_fusion_literal(mu: Sequence, nu: Sequence, u: int, v: int, n: int) -> dict:
    return osp_fusion(mu, nu, u, v, n, allow_ramond=True, rule="literal")


class _OspRule:
    def __init__(self, u, v, n, allow_ramond):
        self.u, self.v, self.n, self.allow = u, v, n, allow_ramond

    def __call__(self, a, b):
        return osp_fusion(a, b, self.u, self.v, self.n, self.allow)


def osp_fusion_table(u: int, v: int, n: int, include_ramond: bool = False, workers: int = 1) -> FusionTable:
    alphabet = osp_labels(u, v, n, integral_only=not include_ramond)
    meta = {"kind": "osp", "n": n, "u": u, "v": v, "ramond": include_ramond, "unit": (0,) * n}
    return _build(alphabet, _OspRule(u, v, n, include_ramond), meta, workers)


def is_integral_label(label: Sequence) -> bool:
    return all(Fraction(c).denominator == 1 for c in label)


def check_q_grading(table: FusionTable) -> tuple | None:
    """Integral x integral and spinor x spinor land in integral labels; mixed products in spinors."""
    for (a, b), prod in table.constants.items():
        expected = is_integral_label(a) == is_integral_label(b)
        for c in prod:
            if is_integral_label(c) != expected:
                return (a, b, c)
    return None


# ---------------------------------------------------------------------------
# Cache


def cache_dir(directory: str | os.PathLike | None = None) -> Path:
    if directory is not None:
        return Path(directory)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "ospchar"


def _cache_path(key: Mapping, directory=None) -> Path:
    name = "-".join(f"{k}{key[k]}" for k in sorted(key))
    return cache_dir(directory) / f"fusion-{name}.json"


def load_cached(key: Mapping, directory=None) -> FusionTable | None:
    """Cached table for ``key``; stale versions and hash mismatches count as misses."""
    path = _cache_path(key, directory)
    try:
        obj = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if obj.get("version") != CACHE_VERSION:
        return None
    try:
        table = FusionTable.from_json_obj(obj["table"])
    except (KeyError, TypeError, ValueError):
        return None
    if table.content_hash() != obj.get("hash"):
        return None
    table.meta.setdefault("unit", _unit(table))
    return table


def store_cached(key: Mapping, table: FusionTable, directory=None) -> Path:
    path = _cache_path(key, directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"version": CACHE_VERSION, "key": dict(key), "hash": table.content_hash(), "table": table.to_json_obj()}
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload, sort_keys=True))
    tmp.replace(path)
    return path


def cached_table(key: Mapping, build: Callable[[], FusionTable], use_cache: bool = True, directory=None) -> FusionTable:
    if use_cache:
        hit = load_cached(key, directory)
        if hit is not None:
            return hit
    table = build()
    if use_cache:
        store_cached(key, table, directory)
    return table


def _unit(table: FusionTable):
    zero = (0,) * table.meta["n"]
    return (zero, zero) if table.meta.get("kind") == "w" else zero
