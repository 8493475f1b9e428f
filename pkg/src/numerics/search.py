"""Grid scans, compass pattern search and bisection brackets.

scipy's optimizers and root finders return a point; the verifiers need the
certificate around it (final step size, local Lipschitz estimate, sign-change
bracket), so these small routines keep that bookkeeping.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from runtime.errors import BracketError

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """map() with optional threads; results keep input order."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


@dataclass(frozen=True)
class SearchResult:
    x: tuple[float, ...]
    value: float
    step: tuple[float, ...]
    evaluations: int
    history: tuple[float, ...] = field(default=(), repr=False)


def grid_maximum(func: Callable[[tuple[float, ...]], float],
                 axes: Sequence[np.ndarray],
                 threads: int = 1) -> tuple[tuple[float, ...], float, np.ndarray]:
    """Evaluate on the tensor grid; ties go to the first point in C order."""
    mesh = np.meshgrid(*axes, indexing="ij")
    points = list(zip(*(m.ravel() for m in mesh)))
    values = np.array(map_ordered(lambda p: func(tuple(float(c) for c in p)), points, threads))
    values = values.reshape(mesh[0].shape)
    index = np.unravel_index(int(np.argmax(values)), values.shape)
    best = tuple(float(axes[i][index[i]]) for i in range(len(axes)))
    return best, float(values[index]), values


def pattern_search(func: Callable[[tuple[float, ...]], float],
                   x0: Sequence[float],
                   bounds: Sequence[tuple[float, float]],
                   step: Sequence[float],
                   rounds: int = 3,
                   shrink: float = 0.5) -> SearchResult:
    """Compass search maximizing ``func`` inside ``bounds``.

    Each round moves along the coordinate directions until no move improves, then
    multiplies the step by ``shrink``.
    """
    x = np.array(x0, dtype=float)
    steps = np.array(step, dtype=float)
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    best = func(tuple(x))
    evaluations = 1
    history = [best]
    for _ in range(rounds):
        improved = True
        moves = 0
        while improved and moves < 200:
            improved = False
            for i in range(x.size):
                for sign in (-1.0, 1.0):
                    trial = x.copy()
                    trial[i] = min(max(trial[i] + sign * steps[i], lo[i]), hi[i])
                    if trial[i] == x[i]:
                        continue
                    value = func(tuple(trial))
                    evaluations += 1
                    if value > best:
                        x, best = trial, value
                        improved = True
                        history.append(best)
            moves += 1
        steps = steps * shrink
    return SearchResult(tuple(float(c) for c in x), float(best),
                        tuple(float(s) for s in steps), evaluations, tuple(history))


def lipschitz_estimate(func: Callable[[tuple[float, ...]], float],
                       x: Sequence[float],
                       step: Sequence[float],
                       bounds: Sequence[tuple[float, float]]) -> float:
    """Largest finite-difference slope around ``x`` (per unit of each coordinate)."""
    base = func(tuple(x))
    slope = 0.0
    for i, h in enumerate(step):
        if h <= 0:
            continue
        for sign in (-1.0, 1.0):
            trial = list(x)
            trial[i] = min(max(trial[i] + sign * h, bounds[i][0]), bounds[i][1])
            delta = abs(trial[i] - x[i])
            if delta == 0:
                continue
            slope = max(slope, abs(func(tuple(trial)) - base) / delta)
    return slope


def grid_slack(cell: Sequence[float], lipschitz: float) -> float:
    """Half the cell diameter times a local Lipschitz bound."""
    return 0.5 * math.sqrt(sum(c * c for c in cell)) * lipschitz


@dataclass(frozen=True)
class ZeroBracket:
    lo: float
    hi: float
    root: float
    residual: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


def bisect_bracket(func: Callable[[float], float], lo: float, hi: float,
                   width: float = 1e-12, max_iter: int = 400) -> ZeroBracket:
    """Bisection keeping a sign-change bracket until it is narrower than ``width``."""
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return ZeroBracket(lo, lo, lo, 0.0)
    if f_hi == 0.0:
        return ZeroBracket(hi, hi, hi, 0.0)
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}")
    for _ in range(max_iter):
        if hi - lo <= width:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = func(mid)
        if f_mid == 0.0:
            return ZeroBracket(mid, mid, mid, 0.0)
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    root = lo - f_lo * (hi - lo) / (f_hi - f_lo)
    root = min(max(root, lo), hi)
    return ZeroBracket(lo, hi, root, abs(func(root)))
