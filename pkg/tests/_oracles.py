"""Brute-force references that share no code with the package."""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import permutations, product


def rank1_generators(osp: bool, max_grade: int) -> list[tuple[int, int, bool]]:
    """Negative modes of affine sp_2 (and osp(1|2)) as ``(coord, grade, fermionic)``.

    Coordinates are in units of e_1; the even root is 2 e_1.
    """
    gens = [(-2, 0, False)]
    for j in range(1, max_grade + 1):
        gens += [(2, j, False), (0, j, False), (-2, j, False)]
    if osp:
        gens.append((-1, 0, True))
        for j in range(1, max_grade + 1):
            gens += [(1, j, True), (-1, j, True)]
    return gens


def rank1_depth(coord: int, grade: int) -> int:
    # 4n*grade - rho_check * coord with n = 1, rho_check = 1
    return 4 * grade - coord


def pbw_rank1(lam: int, osp: bool, max_grade: int, max_depth: int) -> Counter:
    """Count PBW monomials of the rank-1 Verma module by weight and grade."""
    gens = rank1_generators(osp, max_grade)
    out: Counter = Counter()

    def rec(i: int, coord: int, grade: int, depth: int) -> None:
        if i == len(gens):
            out[((lam + coord,), grade)] += 1
            return
        c, g, ferm = gens[i]
        d = rank1_depth(c, g)
        mult = 0
        while True:
            if grade + mult * g > max_grade or depth + mult * d > max_depth:
                break
            rec(i + 1, coord + mult * c, grade + mult * g, depth + mult * d)
            mult += 1
            if ferm and mult > 1:
                break

    rec(0, 0, 0, 0)
    return out


def signed_permutations(n: int):
    for perm in permutations(range(n)):
        for signs in product((1, -1), repeat=n):
            yield perm, signs


def perm_sign(perm) -> int:
    s = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s = -s
    return s


def weyl_character_c(lam, n: int) -> Counter:
    """Finite sp_2n character from the Weyl character formula, by brute division.

    Numerator and denominator are alternating sums over signed permutations;
    the quotient is obtained by repeated leading-term elimination.
    """
    rho = [n - i for i in range(n)]

    def alt(x):
        out = Counter()
        for perm, signs in signed_permutations(n):
            w = tuple(signs[i] * x[perm[i]] for i in range(n))
            out[w] += perm_sign(perm) * (1 if signs.count(-1) % 2 == 0 else -1)
        return {k: v for k, v in out.items() if v}

    num = alt([a + b for a, b in zip(lam, rho)])
    den = alt(rho)
    lead_d = max(den)
    quot: Counter = Counter()
    while num:
        lead = max(num)
        c = Fraction(num[lead], den[lead_d])
        assert c.denominator == 1
        shift = tuple(a - b for a, b in zip(lead, lead_d))
        quot[shift] += int(c)
        for k, v in den.items():
            key = tuple(a + b for a, b in zip(k, shift))
            r = num.get(key, 0) - int(c) * v
            if r:
                num[key] = r
            else:
                num.pop(key, None)
    return Counter({k: v for k, v in quot.items() if v})
