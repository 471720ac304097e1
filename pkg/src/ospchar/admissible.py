"""Admissible levels, admissible weight sets and the decomposition tables built from them.

C-side weights are integer coordinate tuples ``c`` (so ``(c|e_1) = c_1/2`` and
``(c|theta) = c_1``).  B-side weights are orthonormal coordinates ``mu``,
integral or all half-integral.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .charseries import Report
from .rootdata import Convention, RootType, Weight, bilinear, coxeter, dual_coxeter

R_CHECK = 2


class Kind(enum.Enum):
    PRINCIPAL = "principal"
    COPRINCIPAL = "coprincipal"
    NOT_ADMISSIBLE = "not-admissible"


class WeightSet(enum.Enum):
    P_C = "PC"
    P_B = "PB"
    P_B_Q = "PBQ"
    P_CHECK = "PCHECK"


class InvalidLevel(ValueError):
    pass


def langlands_dual_hdual(rtype: RootType, n: int) -> int:
    other = RootType.B if rtype is RootType.C else RootType.C
    return int(dual_coxeter(other, n))


@dataclass(frozen=True)
class AdmissibleLevel:
    """``k + h_dual = p/q`` for type B or C."""

    rtype: RootType
    n: int
    p: int
    q: int
    kind: Kind = field(init=False)
    nondegenerate: bool = field(init=False)
    coboundary: bool = field(init=False)

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise InvalidLevel("p and q must be positive")
        hd = dual_coxeter(self.rtype, self.n)
        h = coxeter(self.rtype, self.n)
        if gcd(self.p, self.q) != 1:
            kind = Kind.NOT_ADMISSIBLE
        elif gcd(self.q, R_CHECK) == 1:
            kind = Kind.PRINCIPAL if self.p >= hd else Kind.NOT_ADMISSIBLE
        else:
            kind = Kind.COPRINCIPAL if self.p >= h else Kind.NOT_ADMISSIBLE
        if kind is Kind.PRINCIPAL:
            nondeg = self.q >= h
            cob = self.q == h
        elif kind is Kind.COPRINCIPAL:
            nondeg = self.q >= R_CHECK * hd
            cob = self.q == R_CHECK * langlands_dual_hdual(self.rtype, self.n)
        else:
            nondeg = cob = False
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "nondegenerate", nondeg)
        object.__setattr__(self, "coboundary", cob and nondeg)

    @property
    def k(self) -> Fraction:
        return Fraction(self.p, self.q) - dual_coxeter(self.rtype, self.n)

    @property
    def admissible(self) -> bool:
        return self.kind is not Kind.NOT_ADMISSIBLE


def _partitions(n: int, cap: int, step: int = 1, start: int = 0):
    """Weakly decreasing tuples of length n, entries in start + step*Z_{>=0}, first entry <= cap."""

    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        v = top
        while v >= start:
            yield from rec(prefix + [v], v)
            v -= step

    if cap < start:
        return
    top = start + ((cap - start) // step) * step
    yield from rec([], top)


def _second(c) -> Fraction:
    return c[1] if len(c) > 1 else 0


def _c_set(p: int, q: int, n: int) -> list[tuple[int, ...]]:
    level = AdmissibleLevel(RootType.C, n, p, q)
    if not level.admissible:
        raise InvalidLevel(f"(p, q) = ({p}, {q}) is not admissible for C_{n}")
    out = []
    bound = p - n - 1 if level.kind is Kind.PRINCIPAL else p - 2 * n
    for c in _partitions(n, max(bound, -1)):
        if level.kind is Kind.PRINCIPAL and c[0] <= bound:
            out.append(c)
        elif level.kind is Kind.COPRINCIPAL and c[0] + _second(c) <= bound:
            out.append(c)
    return out


def _b_set(p: int, q: int, n: int, integral_only: bool) -> list[tuple[Fraction, ...]]:
    level = AdmissibleLevel(RootType.B, n, p, q)
    if not level.admissible:
        raise InvalidLevel(f"(p, q) = ({p}, {q}) is not admissible for B_{n}")
    classes = [Fraction(0)] if integral_only else [Fraction(0), Fraction(1, 2)]
    out = []
    for start in classes:
        # theta = e1 + e2 (principal), theta_s^vee = 2 e1 (coprincipal)
        cap = Fraction(p) if level.kind is Kind.PRINCIPAL else Fraction(p, 2)
        for mu in _partitions(n, cap, Fraction(1), start):
            if level.kind is Kind.PRINCIPAL:
                ok = mu[0] + _second(mu) <= p - dual_coxeter(RootType.B, n)
            else:
                ok = 2 * mu[0] <= p - coxeter(RootType.B, n)
            if ok:
                out.append(mu)
    return out


def _check_set(q: int, n: int) -> list[tuple[int, ...]]:
    """Dominant C coweights (all coordinates of one parity) with ``c_1 <= q - h``."""
    bound = q - coxeter(RootType.C, n)
    out = []
    for parity in (0, 1):
        out.extend(_partitions(n, bound, 2, parity))
    return out


def enumerate_weights(which: WeightSet, p: int, q: int, n: int) -> list[Weight]:
    """Sorted admissible weights of the requested kind.

    ``P_CHECK`` is the coweight set attached to ``(q, 2p)``; its defining bound
    uses only ``q`` (``p`` is validated for the level but not otherwise used).
    """
    if n < 1:
        raise ValueError("rank must be positive")
    if which is WeightSet.P_C:
        coords = _c_set(p, q, n)
        conv = Convention.C_SIDE
    elif which is WeightSet.P_B:
        coords = _b_set(p, q, n, integral_only=False)
        conv = Convention.B_SIDE
    elif which is WeightSet.P_B_Q:
        coords = _b_set(p, q, n, integral_only=True)
        conv = Convention.B_SIDE
    else:
        if AdmissibleLevel(RootType.C, n, p, q).kind is not Kind.PRINCIPAL:
            raise InvalidLevel("the coweight set is defined for principal (p, q)")
        coords = _check_set(q, n)
        conv = Convention.C_SIDE
    return sorted((Weight(c, conv) for c in set(coords)), key=lambda w: w.coords)


def satisfies_definition(which: WeightSet, w: Weight, p: int, q: int) -> bool:
    """Independent re-check of membership through the bilinear form."""
    n = w.n
    conv = w.convention
    e = [Weight.unit(n, i, conv) for i in range(n)]
    if conv is Convention.C_SIDE:
        simple_coroots = [(e[i] - e[i + 1]) * 2 for i in range(n - 1)] + [e[n - 1] * 2]
    else:
        simple_coroots = [e[i] - e[i + 1] for i in range(n - 1)] + [e[n - 1] * 2]
    pairings = [bilinear(w, a) for a in simple_coroots]
    if which is WeightSet.P_CHECK:
        # coweights pair integrally with roots e_i - e_{i+1} and 2 e_n
        roots = [e[i] - e[i + 1] for i in range(n - 1)] + [e[n - 1] * 2]
        pr = [bilinear(w, a) for a in roots]
        return all(x.denominator == 1 and x >= 0 for x in pr) and bilinear(w, e[0] * 2) <= q - 2 * n
    if not all(x.denominator == 1 and x >= 0 for x in pairings):
        return False
    if conv is Convention.C_SIDE:
        theta = e[0] * 2
        theta_s = (e[0] + e[1]) * 2 if n > 1 else e[0] * 2
        level = AdmissibleLevel(RootType.C, n, p, q)
        if level.kind is Kind.PRINCIPAL:
            return bilinear(w, theta) <= p - (n + 1)
        return (bilinear(w, theta_s) if n > 1 else bilinear(w, e[0] * 2)) <= p - 2 * n
    theta = e[0] + e[1] if n > 1 else e[0]
    level = AdmissibleLevel(RootType.B, n, p, q)
    if which is WeightSet.P_B_Q and not w.is_integral():
        return False
    if level.kind is Kind.PRINCIPAL:
        return bilinear(w, theta) <= p - (2 * n - 1)
    return bilinear(w, e[0] * 2) <= p - 2 * n


def _coords(ws) -> set:
    return {tuple(w.coords) for w in ws}


def transport_b_to_check(mu: Weight) -> Weight:
    """Langlands transport of a B weight to a C coweight: ``c = 2 mu``."""
    return Weight([2 * c for c in mu.coords], Convention.C_SIDE)


def verify_bijections(n: int, p: int, q_values=None) -> Report:
    """Coordinate-level checks of the B/C identifications and the coweight inclusion chain."""
    results = {}
    failure = None
    hd = n + 1
    if p >= hd:
        lhs = _coords(enumerate_weights(WeightSet.P_C, p, 1, n))
        rhs = _coords(enumerate_weights(WeightSet.P_B_Q, 2 * p - 1, 2 * p, n))
        results["v=1"] = lhs == rhs
        if lhs != rhs and failure is None:
            failure = {"check": "v=1", "only_C": sorted(map(str, lhs - rhs)), "only_B": sorted(map(str, rhs - lhs))}
    if p % 2 == 1 and p >= 2 * n:
        lhs = _coords(enumerate_weights(WeightSet.P_C, p, 2, n))
        rhs = _coords(enumerate_weights(WeightSet.P_B_Q, p - 1, p, n))
        results["v=2"] = lhs == rhs
        if lhs != rhs and failure is None:
            failure = {"check": "v=2", "only_C": sorted(map(str, lhs - rhs)), "only_B": sorted(map(str, rhs - lhs))}
    if q_values is None:
        q_values = [q for q in range(2 * n, 2 * n + 8) if q % 2 == 1 and gcd(p, q) == 1]
    for q in q_values:
        if AdmissibleLevel(RootType.C, n, p, q).kind is not Kind.PRINCIPAL or q < coxeter(RootType.C, n):
            continue
        check = _coords(enumerate_weights(WeightSet.P_CHECK, p, q, n))
        middle = {c for c in _partitions(n, q - 2 * n)}
        top = _coords(enumerate_weights(WeightSet.P_C, q, 1, n))
        transported = {tuple(transport_b_to_check(w).coords) for w in enumerate_weights(WeightSet.P_B, q, 2 * p, n)}
        ok = check <= middle <= top and transported == check
        results[f"chain q={q}"] = ok
        if not ok and failure is None:
            failure = {"check": f"chain q={q}"}
    status = "ok" if all(results.values()) else "mismatch"
    return Report("bijections", {"n": n, "p": p}, 0, status, failure, {k: v for k, v in results.items()})


# ---------------------------------------------------------------------------
# Decomposition tables


def _fmt(w) -> list[str]:
    return [str(c) for c in (w.coords if isinstance(w, Weight) else w)]


def decomposition_table(n: int, u: int, v: int) -> dict:
    """Labels of the coset decomposition of osp(1|2n) at ``k = -h + u/v``."""
    klevel = AdmissibleLevel(RootType.C, n, u, v)
    if not klevel.admissible:
        raise InvalidLevel(f"k = -{n + 1} + {u}/{v} is not admissible for C_{n}")
    q = 2 * u - v
    if q <= 0:
        raise InvalidLevel("2u - v must be positive")
    ell_level = AdmissibleLevel(RootType.C, n, u, q)
    if not ell_level.admissible or not ell_level.nondegenerate:
        raise InvalidLevel(f"dual level -{n + 1} + {u}/{q} is not non-degenerate admissible")
    if ell_level.kind is Kind.PRINCIPAL:
        bp, bq = q, R_CHECK * u
    else:
        if q % R_CHECK:
            raise InvalidLevel("coprincipal parameters need q divisible by r_check")
        bp, bq = q // R_CHECK, u
    pc = enumerate_weights(WeightSet.P_C, u, v, n)
    pb = enumerate_weights(WeightSet.P_B, bp, bq, n)
    pbq = enumerate_weights(WeightSet.P_B_Q, bp, bq, n)
    ramond = [w for w in pb if not w.is_integral()]
    mechanism = "bijection" if v in (1, 2) else "fusion-generation"
    rows = []
    for sector, labels in (("ordinary", pbq), ("ramond", ramond)):
        for mu in labels:
            rows.append(
                {
                    "mu": _fmt(mu),
                    "sector": sector,
                    "summands": [[_fmt(lam), [_fmt(lam), _fmt(mu)]] for lam in pc],
                }
            )
    return {
        "n": n,
        "u": u,
        "v": v,
        "k": str(klevel.k),
        "ell": str(ell_level.k),
        "ell_kind": ell_level.kind.value,
        "ell_coboundary": ell_level.coboundary,
        "P_C": [_fmt(w) for w in pc],
        "P_B": [_fmt(w) for w in pb],
        "P_B_Q": [_fmt(w) for w in pbq],
        "ramond": [_fmt(w) for w in ramond],
        "P_B_params": [bp, bq],
        "mechanism": mechanism,
        "rows": rows,
    }
