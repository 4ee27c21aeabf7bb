"""
Scattering through a chain of barriers by matching at every interface.

Region ``j`` carries ``psi_j = c1 f1 + c2 f2`` with a two-function basis
suited to its shape. The outer regions are fixed to ``exp(ikx) + r exp(-ikx)``
on the left and ``t exp(ikx)`` on the right, so with ``n`` regions the
unknowns are ``r``, two coefficients per interior region and ``t``:
``2 (n - 1)`` of them, matched by continuity of ``psi`` and ``psi'`` at the
``n - 1`` interfaces.

Interior plane waves are referred to their region's left endpoint and the
barrier bases to the barrier centre, so basis values stay moderate. Columns
are scaled to unit max-norm before elimination.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .basis import BasisPair
from .errors import BarrierLabError, InvalidParameter, SingularSystem
from .landau import landau_basis_at, landau_scattering, sech_basis_at
from .parabolic import basis_at as parabolic_basis_at
from .potentials import CompositePotential, PotentialSegment, ensure_valid
from .units import UnitSystem, wavenumber

__all__ = [
    "RegionBasis",
    "GlobalSolution",
    "SweepPoint",
    "InterfaceCheck",
    "region_bases",
    "solve",
    "probability_density",
    "transmission_sweep",
    "interface_residuals",
    "sweep_workers",
]

COND_LIMIT = 1e13


@dataclass(frozen=True)
class RegionBasis:
    index: int
    kind: str
    segment: PotentialSegment
    evaluator: Callable[[float, bool], BasisPair] = field(repr=False)

    def at(self, x: float, derivatives: bool = True) -> BasisPair:
        """Basis values at ``x``; derivative fields may be zero if not requested."""
        return self.evaluator(x, derivatives)


def _plane_waves(k: float, origin: float) -> Callable[[float, bool], BasisPair]:
    def ev(x: float, derivatives: bool = True) -> BasisPair:
        e = cmath.exp(1j * k * (x - origin))
        return BasisPair(e, 1j * k * e, 1.0 / e, -1j * k / e)

    return ev


def region_bases(p: CompositePotential, energy: float, units: UnitSystem | None = None) -> list[RegionBasis]:
    units = units or p.units
    k = wavenumber(energy, units)
    out = []
    last = len(p.segments) - 1
    for i, seg in enumerate(p.segments):
        kind = seg.kind
        if kind == "free":
            origin = 0.0 if i in (0, last) else seg.lo
            ev = _plane_waves(k, origin)
        elif kind == "parabolic":
            shape = seg.shape
            ev = lambda x, d=True, s=shape: parabolic_basis_at(s, energy, units, x, derivatives=d).as_pair()
        elif kind == "sech":
            shape = seg.shape
            ev = lambda x, d=True, s=shape: sech_basis_at(s, energy, units, x)
        else:
            shape = seg.shape
            ev = lambda x, d=True, s=shape: landau_basis_at(s, energy, units, x)
        out.append(RegionBasis(i, kind, seg, ev))
    return out


@dataclass
class GlobalSolution:
    """Amplitudes and per-region coefficients for one energy.

    ``coeffs[j]`` is the coefficient pair of region ``j``; the outer entries
    are ``(1, r)`` and ``(t, 0)``. ``residual`` is the max-norm mismatch of
    the matching system relative to its right-hand side.
    """

    r: complex
    t: complex
    coeffs: list[tuple[complex, complex]]
    big_r: float
    big_t: float
    residual: float
    condition: float
    potential: CompositePotential
    energy: float
    units: UnitSystem
    k: float
    bases: list[RegionBasis] = field(repr=False, default_factory=list)

    @property
    def interior_coeffs(self) -> list[tuple[complex, complex]]:
        return self.coeffs[1:-1]

    def psi(self, x: float, region: int | None = None) -> tuple[complex, complex]:
        """``(psi, dpsi/dx)`` at ``x``, from ``region`` if given."""
        j = self.potential.segment_index(x) if region is None else region
        c1, c2 = self.coeffs[j]
        return self.bases[j].at(x).combine(c1, c2)

    def value(self, x: float) -> complex:
        """``psi(x)`` alone, skipping derivative evaluation where possible."""
        j = self.potential.segment_index(x)
        c1, c2 = self.coeffs[j]
        b = self.bases[j].at(x, derivatives=False)
        return c1 * b.f1 + c2 * b.f2

    def density(self, x: float) -> float:
        v = self.value(x)
        return v.real * v.real + v.imag * v.imag

    def current(self, x: float, region: int | None = None) -> float:
        """Probability current ``(hbar/m) Im(conj(psi) psi')``."""
        v, d = self.psi(x, region)
        return self.units.hbar / self.units.mass * (v.conjugate() * d).imag


def _solve_dense(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting."""
    a = np.array(m, dtype=complex)
    x = np.array(b, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n) or x.shape != (n,):
        raise InvalidParameter("matrix must be square and match the right-hand side")
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0:
            raise SingularSystem("zero pivot in elimination", condition=math.inf)
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            x[[col, piv]] = x[[piv, col]]
        f = a[col + 1 :, col] / a[col, col]
        a[col + 1 :, col:] -= np.outer(f, a[col, col:])
        x[col + 1 :] -= f * x[col]
    for row in range(n - 1, -1, -1):
        x[row] = (x[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x


def _assemble(bases: list[RegionBasis], interfaces: Sequence[float]):
    n = len(bases)
    size = 2 * (n - 1)
    m = np.zeros((size, size), dtype=complex)
    rhs = np.zeros(size, dtype=complex)
    # column layout: r | (c1, c2) per interior region | t
    for i, x in enumerate(interfaces):
        left = bases[i].at(x)
        right = bases[i + 1].at(x)
        rows = (2 * i, 2 * i + 1)
        if i == 0:
            m[rows[0], 0] = left.f2
            m[rows[1], 0] = left.df2
            rhs[rows[0]] = -left.f1
            rhs[rows[1]] = -left.df1
        else:
            c = 1 + 2 * (i - 1)
            m[rows[0], c : c + 2] = (left.f1, left.f2)
            m[rows[1], c : c + 2] = (left.df1, left.df2)
        if i + 1 == n - 1:
            m[rows[0], size - 1] = -right.f1
            m[rows[1], size - 1] = -right.df1
        else:
            c = 1 + 2 * i
            m[rows[0], c : c + 2] = (-right.f1, -right.f2)
            m[rows[1], c : c + 2] = (-right.df1, -right.df2)
    return m, rhs


def _landau_solution(p: CompositePotential, energy: float, units: UnitSystem) -> GlobalSolution:
    shape = p.segments[0].shape
    sc = landau_scattering(shape, energy, units)
    bases = region_bases(p, energy, units)
    return GlobalSolution(
        r=sc.r, t=sc.t, coeffs=[(sc.normalization, 0j)], big_r=sc.big_r, big_t=sc.big_t,
        residual=0.0, condition=1.0, potential=p, energy=energy, units=units, k=sc.k, bases=bases,
    )


def solve(p: CompositePotential, energy: float, units: UnitSystem | None = None) -> GlobalSolution:
    """Unit-incidence scattering solution for a validated composite.

    ``energy`` is in ``units`` (default: the potential's own units); the
    potential is converted if the two differ.
    """
    if units is not None and units != p.units:
        p = p.converted(units)
    units = p.units
    ensure_valid(p)
    k = wavenumber(energy, units)
    if p.is_landau:
        return _landau_solution(p, energy, units)
    bases = region_bases(p, energy, units)
    if len(bases) == 1:
        return GlobalSolution(
            r=0j, t=1 + 0j, coeffs=[(1 + 0j, 0j)], big_r=0.0, big_t=1.0, residual=0.0,
            condition=1.0, potential=p, energy=energy, units=units, k=k, bases=bases,
        )

    m, rhs = _assemble(bases, p.interfaces)
    col_scale = np.max(np.abs(m), axis=0)
    col_scale[col_scale == 0] = 1.0
    scaled = m / col_scale
    row_scale = np.max(np.abs(scaled), axis=1)
    row_scale[row_scale == 0] = 1.0
    scaled /= row_scale[:, None]
    cond = float(np.linalg.cond(scaled))
    if not cond < COND_LIMIT:
        raise SingularSystem(
            f"matching system is numerically singular at E={energy}",
            condition=cond,
            diagnostics={"energy": energy, "size": m.shape[0]},
        )
    y = _solve_dense(scaled, rhs / row_scale)
    sol = y / col_scale
    residual = float(np.max(np.abs(m @ sol - rhs)) / np.max(np.abs(rhs)))

    r, t = complex(sol[0]), complex(sol[-1])
    coeffs = [(1 + 0j, r)]
    coeffs += [(complex(sol[c]), complex(sol[c + 1])) for c in range(1, len(sol) - 1, 2)]
    coeffs.append((t, 0j))
    return GlobalSolution(
        r=r, t=t, coeffs=coeffs, big_r=abs(r) ** 2, big_t=abs(t) ** 2,
        residual=residual, condition=cond, potential=p, energy=energy, units=units, k=k, bases=bases,
    )


def probability_density(sol: GlobalSolution, x: float) -> float:
    """``|psi(x)|**2`` for a unit-amplitude incident wave."""
    return sol.density(x)


@dataclass(frozen=True)
class SweepPoint:
    energy: float
    big_t: float
    big_r: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def sweep_workers(default: int = 1) -> int:
    raw = os.environ.get("BARRIERLAB_THREADS")
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        raise InvalidParameter(f"BARRIERLAB_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def transmission_sweep(
    p: CompositePotential,
    energies: Sequence[float],
    units: UnitSystem | None = None,
    workers: int | None = None,
) -> list[SweepPoint]:
    """``(E, T, R)`` at each energy, in input order.

    A failing energy yields a point with NaN coefficients and the error text;
    the rest of the sweep carries on. ``workers`` defaults to
    ``BARRIERLAB_THREADS`` (1 if unset).
    """
    if units is not None and units != p.units:
        p = p.converted(units)
    ensure_valid(p)

    def one(e: float) -> SweepPoint:
        try:
            s = solve(p, e)
        except BarrierLabError as exc:
            return SweepPoint(e, math.nan, math.nan, f"{type(exc).__name__}: {exc}")
        return SweepPoint(e, s.big_t, s.big_r)

    workers = sweep_workers() if workers is None else max(1, workers)
    if workers == 1:
        return [one(e) for e in energies]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, energies))


@dataclass(frozen=True)
class InterfaceCheck:
    x: float
    c0: float
    c1: float
    c2: float
    c2_tol: float
    step: float = 0.0

    @property
    def ok(self) -> bool:
        return self.c0 <= 1e-9 and self.c1 <= 1e-9 and self.c2 <= self.c2_tol


# Relative accuracy assumed for a basis evaluation. The series lose a few
# digits to cancellation, so this sits well above machine epsilon.
EVAL_NOISE = 1e-12


def interface_residuals(sol: GlobalSolution, step: float | None = None) -> list[InterfaceCheck]:
    """Continuity of ``psi``, ``psi'`` and ``psi''`` at every interface.

    ``c0``/``c1`` compare the two one-sided bases at the interface, relative
    to ``max(|psi|, |psi'|/k)``. ``c2`` compares a centred second difference of
    the assembled solution with ``(2m/hbar**2)(U - E) psi``. Its tolerance is
    ten times the sum of the O(h) error from the jump in ``U'``, the O(h**2)
    truncation and the amplified evaluation noise ``4 delta / h**2``. Unless
    ``step`` is given, h balances the first and last of these, capped at a
    quarter of the narrower neighbouring segment.
    """
    p, u = sol.potential, sol.units
    kf = u.kinetic_factor
    out = []
    for i, x in enumerate(p.interfaces):
        left = sol.psi(x, i)
        right = sol.psi(x, i + 1)
        scale = max(abs(left[0]), abs(left[1]) / sol.k, 1e-300)
        c0 = abs(left[0] - right[0]) / scale
        c1 = abs(left[1] - right[1]) / sol.k / scale

        seg_l, seg_r = p.segments[i], p.segments[i + 1]
        u_here = seg_r.value(x, u)
        jump = kf * abs(_slope(seg_l, x, u) - _slope(seg_r, x, u)) * scale
        smooth = (kf * (abs(u_here) + sol.energy)) ** 2 * scale
        noise = EVAL_NOISE * scale
        h = step
        if h is None:
            widths = [w for w in (seg_l.hi - seg_l.lo, seg_r.hi - seg_r.lo) if math.isfinite(w) and w > 0]
            cap = 0.25 * (min(widths) if widths else 1.0 / sol.k)
            h = (24.0 * noise / jump) ** (1.0 / 3.0) if jump > 0 else (4.0 * noise / smooth) ** 0.25
            h = min(h, cap)
        vals = [sol.value(x + d) for d in (-h, 0.0, h)]
        second = (vals[0] - 2.0 * vals[1] + vals[2]) / (h * h)
        exact = kf * (u_here - sol.energy) * left[0]
        tol = 10.0 * (h * jump / 6.0 + h * h * smooth + 4.0 * noise / (h * h))
        out.append(InterfaceCheck(x, c0, c1, abs(second - exact), tol, h))
    return out


def _slope(seg: PotentialSegment, x: float, u: UnitSystem) -> float:
    return 0.0 if seg.kind == "free" else seg.shape.slope(x, u)
