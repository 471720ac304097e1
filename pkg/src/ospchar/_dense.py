"""Dense int64 evaluation of products of denominator factors.

Every factor monomial ``e^nu q^g`` of an affine denominator lies in the cone
spanned by the negative affine simple roots of osp(1|2n):
``(2e_1, q)``, ``-(e_i - e_{i+1})`` and ``-e_n``.  Writing a monomial as
``sum a_i`` of those generators, its principal depth is
``2(a_0 + ... + a_{n-1}) + a_n``.  So with depth at most ``D`` and grade at
most ``T`` the coordinates live in a small explicit box, which is what the
arrays here cover.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np



class Overflow(ArithmeticError):
    pass


def cone_box(n: int, trunc: int, depth: int) -> list[tuple[int, int]]:
    """Inclusive coordinate ranges covering the cone up to the given grade and depth."""
    half = depth // 2
    top = 2 * min(trunc, half)
    if n == 1:
        return [(-depth, top)]
    box = [(-half, top)]
    box += [(-half, half)] * (n - 2)
    box.append((-depth, half))
    return box


def _depth_grid(n: int, trunc: int, box, rho_check: Sequence[int]) -> np.ndarray:
    grids = np.meshgrid(
        np.arange(trunc + 1),
        *[np.arange(lo, hi + 1) for lo, hi in box],
        indexing="ij",
    )
    depth = 4 * n * grids[0]
    for r, g in zip(rho_check, grids[1:]):
        depth = depth - r * g
    return depth


def _pair(shift: int, size: int, index: int | None = None):
    """Slices ``(dst, src)`` along one axis for ``dst = src + shift``."""
    if index is not None:
        return index, index - shift
    if shift >= 0:
        return slice(shift, size), slice(0, size - shift)
    return slice(0, size + shift), slice(-shift, size)


def _shifted_add(arr: np.ndarray, src_arr: np.ndarray, shift: Sequence[int], coeff: int, axis=None, index=None) -> None:
    dst_sl, src_sl = [], []
    for ax, (s, size) in enumerate(zip(shift, arr.shape)):
        if abs(s) >= size:
            return
        d, r = _pair(s, size, index if ax == axis else None)
        if ax == axis and not (0 <= r < size):
            return
        dst_sl.append(d)
        src_sl.append(r)
    if coeff == 1:
        arr[tuple(dst_sl)] += src_arr[tuple(src_sl)]
    else:
        arr[tuple(dst_sl)] += coeff * src_arr[tuple(src_sl)]


def cone_product(
    n: int,
    trunc: int,
    depth: int,
    rho_check: Sequence[int],
    factors: Iterable[tuple[tuple[int, ...], int, int, int]],
) -> dict[tuple[tuple[int, ...], int], int]:
    """Expand ``prod (1 + sign * e^coords q^grade)^power`` from the unit series.

    ``power`` is +1 or -1.  Raises
    :class:`Overflow` if any coefficient approaches the int64 range, in which
    case the caller should use exact Python integers instead.
    """
    box = cone_box(n, trunc, depth)
    shape = (trunc + 1,) + tuple(hi - lo + 1 for lo, hi in box)
    arr = np.zeros(shape, dtype=np.int64)
    origin = (0,) + tuple(-lo for lo, _ in box)
    arr[origin] = 1
    # a sweep sums at most max(shape) values, so this bound rules out wraparound
    guard = (1 << 62) // (max(shape) + 1)
    keep = (_depth_grid(n, trunc, box, rho_check) <= depth).astype(np.int64)
    for coords, grade, sign, power in factors:
        shift = (grade,) + tuple(coords)
        # sweep one axis slice by slice; the grade axis gives the fewest slices
        axis = 0 if grade else next(i for i, s in enumerate(shift) if s)
        s = shift[axis]
        size = shape[axis]
        forward = range(size) if s > 0 else range(size - 1, -1, -1)
        if power == 1:
            # read sources before they are overwritten
            for idx in reversed(forward):
                _shifted_add(arr, arr, shift, sign, axis=axis, index=idx)
        else:
            # sources are final before they are added forward
            for idx in forward:
                _shifted_add(arr, arr, shift, -sign, axis=axis, index=idx)
        arr *= keep
        if arr.max(initial=0) >= guard or arr.min(initial=0) <= -guard:
            raise Overflow("coefficient growth exceeds the int64 guard")
    out = {}
    for pos in zip(*np.nonzero(arr)):
        g = int(pos[0])
        coords = tuple(int(p) + lo for p, (lo, _) in zip(pos[1:], box))
        out[(coords, g)] = int(arr[pos])
    return out
