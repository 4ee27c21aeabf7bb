"""Adaptive Simpson quadrature over piecewise-smooth integrands."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import InvalidParameter, QuadratureFailure

__all__ = ["QuadResult", "adaptive_simpson"]


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int


def _panels(a: float, b: float, breakpoints: Iterable[float]) -> list[tuple[float, float]]:
    cuts = sorted({a, b, *(x for x in breakpoints if a < x < b)})
    return list(zip(cuts[:-1], cuts[1:]))


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-10,
    max_evals: int = 1_000_000,
    min_splits: int = 16,
    max_depth: int = 60,
) -> QuadResult:
    """Integrate ``f`` over ``[a, b]``, never straddling a breakpoint.

    Each panel between breakpoints is first cut into ``min_splits`` pieces so
    oscillations are not mistaken for convergence. Intervals are bisected
    until the Simpson difference meets ``max(abs_tol, rel_tol * |I|)``
    shared in proportion to width. Running past ``max_evals`` function calls
    or ``max_depth`` bisections raises :class:`QuadratureFailure`.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise InvalidParameter(f"need finite a < b, got [{a}, {b}]")
    if min_splits < 1:
        raise InvalidParameter("min_splits must be at least 1")

    evals = 0

    def call(x: float) -> float:
        nonlocal evals
        evals += 1
        if evals > max_evals:
            raise QuadratureFailure(f"evaluation budget of {max_evals} exhausted on [{a}, {b}]")
        return f(x)

    # coarse pass: Simpson pieces and a magnitude estimate for the relative target
    pieces = []
    for lo, hi in _panels(a, b, breakpoints):
        h = (hi - lo) / min_splits
        for i in range(min_splits):
            x0 = lo + i * h
            x2 = hi if i == min_splits - 1 else x0 + h
            xm = 0.5 * (x0 + x2)
            f0, fm, f2 = call(x0), call(xm), call(x2)
            pieces.append((x0, x2, f0, fm, f2, (x2 - x0) / 6.0 * (f0 + 4.0 * fm + f2), 0))
    rough = sum(abs(p[5]) for p in pieces)
    target = max(abs_tol, rel_tol * rough)
    width = b - a

    total = 0.0
    err = 0.0
    stack = pieces[::-1]
    while stack:
        x0, x2, f0, fm, f2, whole, depth = stack.pop()
        xm = 0.5 * (x0 + x2)
        fl, fr = call(0.5 * (x0 + xm)), call(0.5 * (xm + x2))
        left = (xm - x0) / 6.0 * (f0 + 4.0 * fl + fm)
        right = (x2 - xm) / 6.0 * (fm + 4.0 * fr + f2)
        delta = left + right - whole
        tol = target * (x2 - x0) / width
        if abs(delta) <= 15.0 * tol:
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
            continue
        if depth >= max_depth:
            raise QuadratureFailure(f"bisection depth {max_depth} reached near x={xm}")
        stack.append((xm, x2, fm, fr, f2, right, depth + 1))
        stack.append((x0, xm, f0, fl, fm, left, depth + 1))
    return QuadResult(total, err, evals)
