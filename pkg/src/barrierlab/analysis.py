"""
Observables built on scattering solutions: incident current, dwell times,
resonance energies and unit restoration.

The dwell time of a unit-amplitude stationary state in ``[x1, x2]`` is

    tau = (1 / j_in) * integral_{x1}^{x2} |psi|**2 dx,     j_in = sqrt(2 E / m),

with the same incident current used for every sub-interval, including those
between barriers: the net current is constant in x, and the interval's
particle count is referred to the flux injected from the left.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BarrierLabError, InvalidParameter, ZeroEnergy
from .multibarrier import GlobalSolution, solve, transmission_sweep
from .potentials import CompositePotential
from .quadrature import adaptive_simpson
from .units import UnitSystem, restore_units, unit_system

__all__ = [
    "DwellReport",
    "Resonance",
    "TRIVIALLY_TRANSPARENT",
    "incoming_current",
    "dwell_time",
    "find_resonances",
    "refine_peaks",
    "restore_units",
    "unit_system",
    "UnitSystem",
]

RESONANCE_THRESHOLD = 1e-6
RESONANCE_XTOL = 1e-13


class Transparency(enum.Enum):
    TRIVIALLY_TRANSPARENT = "trivially transparent"

    def __repr__(self) -> str:
        return "TRIVIALLY_TRANSPARENT"


# Returned by find_resonances when the potential is free everywhere: every
# energy transmits perfectly, so there is nothing to locate.
TRIVIALLY_TRANSPARENT = Transparency.TRIVIALLY_TRANSPARENT


def incoming_current(energy: float, units: UnitSystem) -> float:
    """``sqrt(2 E / m)``, the current carried by a unit-amplitude incident wave."""
    if not energy > 0:
        raise ZeroEnergy(f"incident current needs E > 0, got {energy!r}")
    return math.sqrt(2.0 * energy / units.mass)


@dataclass(frozen=True)
class DwellReport:
    interval: tuple[float, float]
    j_in: float
    integral: float
    tau: float
    units: UnitSystem
    quad_error: float = 0.0

    def to_dict(self) -> dict:
        u = self.units
        return {
            "interval": list(self.interval),
            "j_in": self.j_in,
            "integral": self.integral,
            "tau": self.tau,
            "units": {
                "interval": u.length_unit.name,
                "j_in": f"{u.length_unit.name}/{u.time_unit.name}",
                "integral": u.length_unit.name,
                "tau": u.time_unit.name,
            },
            "unit_system": u.to_dict(),
        }


def dwell_time(
    sol: GlobalSolution,
    x1: float,
    x2: float,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-10,
    max_evals: int = 1_000_000,
) -> DwellReport:
    """Dwell time of the stationary state ``sol`` in ``[x1, x2]``.

    Interfaces of the potential inside the interval become panel boundaries
    for the quadrature.
    """
    if not x1 < x2:
        raise InvalidParameter(f"dwell interval needs x1 < x2, got [{x1}, {x2}]")
    j_in = incoming_current(sol.energy, sol.units)
    q = adaptive_simpson(
        sol.density, x1, x2, breakpoints=sol.potential.interfaces,
        abs_tol=abs_tol, rel_tol=rel_tol, max_evals=max_evals,
    )
    return DwellReport((x1, x2), j_in, q.value, q.value / j_in, sol.units, q.error)


@dataclass(frozen=True)
class Resonance:
    energy: float
    big_t: float


def _maxima(t: np.ndarray) -> list[int]:
    n = len(t)
    out = []
    for i in range(n):
        if not math.isfinite(t[i]):
            continue
        left = t[i - 1] if i > 0 else -math.inf
        right = t[i + 1] if i < n - 1 else -math.inf
        left = left if math.isfinite(left) else -math.inf
        right = right if math.isfinite(right) else -math.inf
        if t[i] >= left and t[i] >= right:
            out.append(i)
    return out


def refine_peaks(p: CompositePotential, grid, t, xtol: float = RESONANCE_XTOL) -> list[Resonance]:
    """Refine every local maximum of sampled ``T`` by bounded Brent maximisation.

    Each maximum is searched for between its two neighbouring grid points;
    the grid value itself is kept if the search does no better.
    """
    grid = np.asarray(grid, dtype=float)
    t = np.asarray(t, dtype=float)
    last = len(grid) - 1

    def neg_t(e: float) -> float:
        try:
            return -solve(p, e).big_t
        except BarrierLabError:
            return 0.0

    out = []
    for i in _maxima(t):
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, last)]
        res = minimize_scalar(neg_t, bounds=(lo, hi), method="bounded", options={"xatol": xtol})
        e_star, t_star = float(res.x), -float(res.fun)
        if t[i] >= t_star:
            e_star, t_star = float(grid[i]), float(t[i])
        out.append(Resonance(e_star, t_star))
    return out


def find_resonances(
    p: CompositePotential,
    e_lo: float,
    e_hi: float,
    units: UnitSystem | None = None,
    grid_n: int = 200,
    threshold: float = RESONANCE_THRESHOLD,
    xtol: float = RESONANCE_XTOL,
    detailed: bool = False,
    workers: int | None = None,
):
    """Energies in ``[e_lo, e_hi]`` where the transmission reaches 1.

    ``T`` is sampled on a uniform grid; every local maximum is refined by
    :func:`refine_peaks` and kept if
    ``1 - T < threshold``. Returns a sorted list of energies (or of
    :class:`Resonance` with ``detailed=True``), or ``TRIVIALLY_TRANSPARENT``
    for a potential that is free everywhere.

    A resonance whose Lorentzian tail is buried under the background at the
    nearest grid point can be missed; refine the grid for very narrow states.
    """
    if not 0 < e_lo < e_hi:
        raise InvalidParameter(f"need 0 < e_lo < e_hi, got {e_lo}, {e_hi}")
    if grid_n < 2:
        raise InvalidParameter("grid_n must be at least 2")
    if units is not None and units != p.units:
        p = p.converted(units)
    if p.is_free:
        return TRIVIALLY_TRANSPARENT

    grid = np.linspace(e_lo, e_hi, grid_n)
    sweep = transmission_sweep(p, list(grid), workers=workers)
    t = np.array([s.big_t for s in sweep])
    found: list[Resonance] = []
    for peak in refine_peaks(p, grid, t, xtol):
        if 1.0 - peak.big_t < threshold and not any(abs(r.energy - peak.energy) <= 10 * xtol for r in found):
            found.append(peak)
    found.sort(key=lambda r: r.energy)
    return found if detailed else [r.energy for r in found]
