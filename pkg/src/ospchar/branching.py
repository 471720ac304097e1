"""Branching of osp(1|2n) Weyl modules into sp_2n Weyl modules, and the dual W-algebra side."""
from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .charseries import (
    AlgebraType,
    FormalCharacter,
    QSeries,
    Report,
    _codec,
    colored_partitions,
    ds_specialize,
    eta_inverse,
    theta_exponent,
    weyl_module_character,
)
from .rootdata import (
    RootType,
    Weight,
    WeylElement,
    bilinear,
    classify,
    dominant_weights_in_box,
    dot_act,
    dual_coxeter,
    is_dominant,
    Regularity,
    rho_vectors,
    weyl_group,
)


class CriticalLevel(ValueError):
    pass


@dataclass(frozen=True)
class LevelParam:
    """Level ``k`` of sp_2n / osp(1|2n) and the dual W-algebra level ``ell``."""

    k: Fraction
    n: int

    def __init__(self, k, n: int):
        object.__setattr__(self, "k", Fraction(k))
        object.__setattr__(self, "n", n)

    @property
    def h_sp(self) -> Fraction:
        return dual_coxeter(RootType.C, self.n)

    @property
    def h_osp(self) -> Fraction:
        return dual_coxeter(RootType.OSP, self.n)

    @property
    def bad(self) -> bool:
        return self.k + self.h_sp == 0 or self.k + self.h_osp == 0

    @property
    def ell(self) -> Fraction:
        if self.bad:
            raise CriticalLevel(f"no dual level for k = {self.k}")
        return -(self.n + 1) + (self.k + self.n + 1) / (2 * self.k + 2 * self.n + 1)

    def ell_from_duality(self) -> Fraction:
        """Solve ``1/(k+h) + 1/(ell+h) = 2`` for ``ell``."""
        if self.bad:
            raise CriticalLevel(f"no dual level for k = {self.k}")
        inv = 2 - 1 / (self.k + self.h_sp)
        return 1 / inv - self.h_sp

    def check(self) -> bool:
        ell = self.ell
        return ell == self.ell_from_duality() and 1 / (self.k + self.h_sp) + 1 / (ell + self.h_sp) == 2

    def t_level_relation(self) -> str:
        """The t-level relation, kept as metadata only."""
        return "2t + 2n + 1 = (k + 2n)/(k + 2n - 1)"


def _rho(atype: AlgebraType, n: int) -> Weight:
    rv = rho_vectors(n)
    return rv.rho_osp if atype is AlgebraType.OSP else rv.rho_sp


def _hdual(atype: AlgebraType, n: int) -> Fraction:
    return dual_coxeter(RootType.OSP if atype is AlgebraType.OSP else RootType.C, n)


def conformal_weight(atype: AlgebraType, mu: Weight, k) -> Fraction:
    """``(mu | mu + 2 rho) / (2 (k + h_dual))``."""
    k = Fraction(k)
    denom = k + _hdual(atype, mu.n)
    if denom == 0:
        raise CriticalLevel(f"k = {k} is critical")
    return bilinear(mu, mu + 2 * _rho(atype, mu.n)) / (2 * denom)


# ---------------------------------------------------------------------------
# Branching coefficients


def b_exponent(lam: Weight, mu: Weight) -> int:
    """Leading exponent ``(lam-mu | lam-mu + 2 rho_odd)``, an integer."""
    return theta_exponent((lam - mu).int_coords())


def b_coefficient(lam: Weight, mu: Weight, trunc: int) -> QSeries:
    """``q^{(nu|nu+2 rho_odd)} / prod (1-q^j)^n`` with ``nu = lam - mu``."""
    return eta_inverse(lam.n, b_exponent(lam, mu), trunc)


def _dot_orbit(lam: Weight) -> Iterator[tuple[int, Weight]]:
    rho = rho_vectors(lam.n).rho_sp
    for w in weyl_group(lam.n):
        yield w.det, dot_act(w, lam, rho)


def branching_function(lam: Weight, mu: Weight, trunc: int) -> QSeries:
    """``sum_w det(w) B^{w.lam}_mu`` (lam may be any integral weight)."""
    n = lam.n
    part = colored_partitions(n, trunc)
    coeffs = [0] * (trunc + 1)
    for sign, x in _dot_orbit(lam):
        e = b_exponent(x, mu)
        for i in range(trunc - e + 1):
            coeffs[e + i] += sign * part[i]
    return QSeries({g: c for g, c in enumerate(coeffs)}, trunc)


def min_branching_exponent(lam: Weight, mu: Weight) -> int:
    return min(b_exponent(x, mu) for _, x in _dot_orbit(lam))


def contributing_weights(n: int, mu: Weight, trunc: int) -> list[Weight]:
    """Dominant ``lam`` whose branching function can reach grade ``trunc``.

    Some coordinate of ``w(lam + rho)`` is ``+-(lam_1 + n)``, so for
    ``nu = w.lam - mu`` some ``|nu_j| >= lam_1 - mu_1`` and the exponent is at
    least ``(lam_1 - mu_1)(lam_1 - mu_1 - 1)/2``.  Hence the scan bound
    ``lam_1 <= trunc + mu_1 + 2n`` below is never binding: the outermost
    shell is checked to contribute nothing.
    """
    mu1 = int(mu.coords[0])
    bound = trunc + mu1 + 2 * n
    out = []
    shell_hits = 0
    for coords in dominant_weights_in_box(n, bound):
        lam = Weight(coords)
        if min_branching_exponent(lam, mu) <= trunc:
            out.append(lam)
            if coords[0] == bound:
                shell_hits += 1
    if shell_hits:
        raise AssertionError("enumeration bound is binding")
    return sorted(out, key=lambda w: w.coords)


def _times_qseries(ch: FormalCharacter, series: QSeries, trunc: int) -> FormalCharacter:
    codec = _codec(ch.n)
    gs = codec.grade_shift
    table: dict[int, int] = defaultdict(int)
    items = [(int(e), c) for e, c in series.terms.items()]
    for k, v in ch._t.items():
        g = codec.grade(k)
        for e, c in items:
            if g + e <= trunc:
                table[k + (e << gs) + (codec.depth_of((0,) * ch.n, e) << codec.depth_shift)] += v * c
    out = FormalCharacter._raw(ch.n, dict(table), ch.q_offset, trunc, None)
    out._prune()
    return out


def _branching_rhs_term(args) -> FormalCharacter:
    lam_coords, mu_coords, trunc = args
    lam, mu = Weight(lam_coords), Weight(mu_coords)
    ch = weyl_module_character(AlgebraType.SP, lam, trunc)
    return _times_qseries(ch, branching_function(lam, mu, trunc), trunc)


def verify_branching_identity(n: int, mu: Weight, trunc: int, workers: int = 1) -> Report:
    """Compare the osp Weyl module with the sum of sp Weyl modules times branching functions."""
    if not is_dominant(mu) or not mu.is_integral():
        raise ValueError(f"{mu} is not dominant integral")
    lhs = weyl_module_character(AlgebraType.OSP, mu, trunc)
    lams = contributing_weights(n, mu, trunc)
    tasks = [(lam.int_coords(), mu.int_coords(), trunc) for lam in lams]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_branching_rhs_term, tasks))
    else:
        parts = [_branching_rhs_term(t) for t in tasks]
    rhs = FormalCharacter(n, {}, 0, trunc, None)
    for part in parts:
        rhs = rhs + part
    mismatch = lhs.difference_report(rhs)
    return Report(
        "branching",
        {"n": n, "mu": [str(c) for c in mu.coords]},
        trunc,
        "ok" if mismatch is None else "mismatch",
        mismatch,
        {"lambdas": [[int(c) for c in lam.coords] for lam in lams], "terms": len(lhs)},
    )


def singular_shift_candidates(n: int, bound: int) -> list[Weight]:
    """Integral ``lam`` with ``|lam_i| <= bound`` and ``lam + rho_sp`` dominant singular."""
    rho = rho_vectors(n).rho_sp
    out = []
    for c in dominant_weights_in_box(n, bound + n):
        x = Weight(c)
        if classify(x) is Regularity.SINGULAR:
            lam = x - rho
            if all(abs(v) <= bound for v in lam.coords):
                out.append(lam)
    return out


def verify_singular_vanishing(n: int, lam_bound: int, mu_bound: int, trunc: int) -> Report:
    """Branching functions vanish when ``lam + rho_sp`` is singular."""
    checked = 0
    for lam in singular_shift_candidates(n, lam_bound):
        for mu_coords in dominant_weights_in_box(n, mu_bound):
            mu = Weight(mu_coords)
            series = branching_function(lam, mu, trunc)
            checked += 1
            if series.terms:
                e = min(series.terms)
                return Report(
                    "singular-vanishing",
                    {"n": n},
                    trunc,
                    "mismatch",
                    {"lambda": [str(c) for c in lam.coords], "mu": list(mu_coords), "exponent": str(e), "coeff": series.terms[e]},
                )
    return Report("singular-vanishing", {"n": n, "lam_bound": lam_bound, "mu_bound": mu_bound}, trunc, "ok", None, {"pairs": checked})


# ---------------------------------------------------------------------------
# Dual W-algebra side


def delta_exponent(lam: Weight, mu: Weight, w: WeylElement, k) -> Fraction:
    """``m^osp_k(mu) - m^sp_k(lam) + (w.lam - mu | w.lam - mu + 2 rho_odd)``."""
    rv = rho_vectors(lam.n)
    x = dot_act(w, lam, rv.rho_sp) - mu
    return conformal_weight(AlgebraType.OSP, mu, k) - conformal_weight(AlgebraType.SP, lam, k) + bilinear(x, x + 2 * rv.rho_odd)


def _dual_weight(lam: Weight, mu: Weight, w: WeylElement, level: LevelParam) -> Weight:
    rv = rho_vectors(lam.n)
    return dot_act(w, lam, rv.rho_sp) - mu * (2 * (level.ell + level.h_sp))


def delta_via_dual_level(lam: Weight, mu: Weight, w: WeylElement, k) -> Fraction:
    """``m^sp_ell(x) - (x | rho_check)`` with ``x = w.lam - 2(ell + h) mu``."""
    level = LevelParam(k, lam.n)
    x = _dual_weight(lam, mu, w, level)
    return conformal_weight(AlgebraType.SP, x, level.ell) - bilinear(x, rho_vectors(lam.n).rho_check)


def verify_delta_lemma(lam: Weight, mu: Weight, w: WeylElement, k) -> Report:
    level = LevelParam(k, lam.n)
    if 2 * level.k + 2 * lam.n + 1 == 0:
        raise CriticalLevel("pole of the level duality")
    lhs = delta_exponent(lam, mu, w, k)
    rhs = delta_via_dual_level(lam, mu, w, k)
    params = {
        "lambda": [str(c) for c in lam.coords],
        "mu": [str(c) for c in mu.coords],
        "w": {"perm": list(w.perm), "signs": list(w.signs)},
        "k": str(level.k),
    }
    mismatch = None if lhs == rhs else {"lhs": str(lhs), "rhs": str(rhs)}
    return Report("delta-lemma", params, 0, "ok" if mismatch is None else "mismatch", mismatch)


def random_level(rng: random.Random, n: int, max_den: int = 7) -> Fraction:
    while True:
        k = Fraction(rng.randint(-40, 40), rng.randint(1, max_den))
        level = LevelParam(k, n)
        if not level.bad and level.ell + level.h_sp != 0:
            return k


def verify_delta_lemma_random(n: int, cases: int, seed: int, coord_bound: int = 5) -> Report:
    rng = random.Random(seed)
    group = weyl_group(n)
    for i in range(cases):
        lam = Weight([rng.randint(-coord_bound, coord_bound) for _ in range(n)])
        mu = Weight([rng.randint(-coord_bound, coord_bound) for _ in range(n)])
        w = rng.choice(group)
        k = random_level(rng, n)
        rep = verify_delta_lemma(lam, mu, w, k)
        if not rep.ok:
            rep.detail = {"case": i}
            return rep
    return Report("delta-lemma", {"n": n, "cases": cases, "seed": seed}, 0, "ok")


def base_offset(lam: Weight, mu: Weight, k) -> Fraction:
    return conformal_weight(AlgebraType.OSP, mu, k) - conformal_weight(AlgebraType.SP, lam, k)


@dataclass(frozen=True)
class WModuleCharacter:
    via_conformal_weight: QSeries
    via_delta: QSeries
    offset: Fraction


def w_module_character(lam: Weight, mu: Weight, k, trunc: int) -> WModuleCharacter:
    """Normalized character of the W-algebra module labelled by ``lam - 2(ell+h) mu``.

    Computed twice: by principal specialization of ``sum det(w) e^{x_w}`` with the
    dual-level conformal weight, and directly from the Delta exponents.  Both are
    exact up to ``offset + trunc``.
    """
    level = LevelParam(k, lam.n)
    n = lam.n
    offset = base_offset(lam, mu, k)
    limit = offset + trunc
    path_a = QSeries({}, limit)
    path_b = QSeries({}, limit)
    for w in weyl_group(n):
        x = _dual_weight(lam, mu, w, level)
        m = conformal_weight(AlgebraType.SP, x, level.ell)
        spec = ds_specialize({x.coords: w.det}, m, n, limit - m)
        path_a = path_a + spec.truncated(limit)
        path_b = path_b + eta_inverse(n, delta_exponent(lam, mu, w, k), limit).scale(w.det)
    return WModuleCharacter(path_a, path_b, offset)


def verify_main_theorem(lam: Weight, mu: Weight, k, trunc: int) -> Report:
    """Both W-module paths agree and match the shifted branching function."""
    res = w_module_character(lam, mu, k, trunc)
    params = {"lambda": [str(c) for c in lam.coords], "mu": [str(c) for c in mu.coords], "k": str(Fraction(k))}
    mismatch = res.via_conformal_weight.agrees_with(res.via_delta)
    if mismatch is None:
        shifted = branching_function(lam, mu, trunc).shift(res.offset)
        mismatch = res.via_delta.agrees_with(shifted)
        if mismatch is not None:
            mismatch["against"] = "branching"
    else:
        mismatch["against"] = "delta"
    return Report("main-theorem", params, trunc, "ok" if mismatch is None else "mismatch", mismatch, {"offset": str(res.offset)})


def verify_main_theorem_random(n: int, cases: int, seed: int, trunc: int, bound: int = 3) -> Report:
    """:func:`verify_main_theorem` on seeded random dominant ``lam, mu`` and levels."""
    rng = random.Random(seed)
    weights = list(dominant_weights_in_box(n, bound))
    for i in range(cases):
        lam = Weight(rng.choice(weights))
        mu = Weight(rng.choice(weights))
        k = random_level(rng, n)
        rep = verify_main_theorem(lam, mu, k, trunc)
        if not rep.ok:
            rep.detail = dict(rep.detail or {}, case=i)
            return rep
    return Report("main-theorem", {"n": n, "cases": cases, "seed": seed}, trunc, "ok")
