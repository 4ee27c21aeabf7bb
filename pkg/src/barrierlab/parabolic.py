"""
Exact scattering off a single parabolic barrier of finite support.

Inside ``[gamma - alpha, gamma + alpha]`` the stationary equation is

    psi'' + [beta**2 (x - gamma)**2 - (beta**2 alpha**2 - k**2)] psi = 0,

with ``k = sqrt(2 m E)/hbar`` and ``beta = sqrt(2 m U0)/(hbar alpha)``. Its
even/odd solutions about ``gamma`` are

    psi_e = exp(-i beta y**2 / 2) M((1 + i k**2/beta - i alpha**2 beta)/4, 1/2, i beta y**2)
    psi_o = sqrt(2 beta) y exp(-i beta y**2 / 2) M((3 + i k**2/beta - i alpha**2 beta)/4, 3/2, i beta y**2)

where ``y = x - gamma``. They are real (the imaginary parts cancel to
rounding), normalised so that ``psi_e(gamma) = 1`` and
``psi_o'(gamma) = sqrt(2 beta)``.

Reflection and transmission follow from the logarithmic derivatives
``L_e = alpha psi_e'/psi_e`` and ``L_o = alpha psi_o'/psi_o`` at the right
edge of the support.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisPair
from .errors import DegenerateBoundary, OutOfSupport
from .potentials import ParabolicShape
from .specfun import DEFAULT_CONTROL, SeriesControl, kummer_m, weber_even, weber_odd
from .units import ATOMIC, UnitSystem, wavenumber

__all__ = [
    "ParabolicBasisPoint",
    "SingleBarrierScattering",
    "kummer_parameters",
    "weber_parameter",
    "basis_at",
    "basis_real",
    "scattering_single",
    "scattering_single_direct",
    "wavefunction_single",
]

# Relative size below which psi(alpha) counts as a zero of the boundary value.
DEGENERATE_TOL = 1e-12
SUPPORT_SLACK = 1e-12


@dataclass(frozen=True)
class ParabolicBasisPoint:
    psi_e: complex
    dpsi_e: complex
    psi_o: complex
    dpsi_o: complex

    @property
    def wronskian(self) -> complex:
        return self.psi_e * self.dpsi_o - self.dpsi_e * self.psi_o

    @property
    def max_imag(self) -> float:
        return max(abs(v.imag) for v in (self.psi_e, self.dpsi_e, self.psi_o, self.dpsi_o))

    def as_pair(self) -> BasisPair:
        return BasisPair(self.psi_e, self.dpsi_e, self.psi_o, self.dpsi_o)


@dataclass(frozen=True)
class SingleBarrierScattering:
    r: complex
    t: complex
    a_coef: complex
    b_coef: complex
    big_r: float
    big_t: float
    l_e: float
    l_o: float
    shape: ParabolicShape
    energy: float
    k: float
    units: UnitSystem
    imag_residue: float = 0.0
    method: str = "log-derivative"


def kummer_parameters(shape: ParabolicShape, energy: float, units: UnitSystem = ATOMIC):
    """``(a_even, a_odd, beta, k)`` for the Kummer representation of the basis."""
    k = wavenumber(energy, units)
    beta = shape.beta(units)
    core = 1j * k * k / beta - 1j * shape.alpha**2 * beta
    return (1.0 + core) / 4.0, (3.0 + core) / 4.0, beta, k


def weber_parameter(shape: ParabolicShape, energy: float, units: UnitSystem = ATOMIC) -> float:
    """``a = (beta**2 alpha**2 - k**2) / (2 beta)`` of the reduced equation ``w'' + (z**2/4 - a) w = 0``."""
    k = wavenumber(energy, units)
    beta = shape.beta(units)
    return (beta * beta * shape.alpha**2 - k * k) / (2.0 * beta)


def _check_support(shape: ParabolicShape, x: float) -> float:
    y = x - shape.gamma
    if abs(y) > shape.alpha * (1.0 + SUPPORT_SLACK):
        raise OutOfSupport(f"x={x} outside parabolic support [{shape.gamma - shape.alpha}, {shape.gamma + shape.alpha}]")
    return y


def basis_at(
    shape: ParabolicShape,
    energy: float,
    units: UnitSystem = ATOMIC,
    x: float = 0.0,
    ctl: SeriesControl = DEFAULT_CONTROL,
    derivatives: bool = True,
) -> ParabolicBasisPoint:
    """Even/odd basis about ``gamma`` and their x-derivatives at ``x``.

    Derivatives use ``dM/dz = (a/b) M(a+1, b+1, z)``; pass
    ``derivatives=False`` to skip them (the derivative fields are then zero).
    """
    y = _check_support(shape, x)
    a_e, a_o, beta, _ = kummer_parameters(shape, energy, units)
    y2 = y * y
    z = 1j * beta * y2
    phase = cmath.exp(-0.5j * beta * y2)
    root = math.sqrt(2.0 * beta)

    m_e = kummer_m(a_e, 0.5, z, ctl)
    m_o = kummer_m(a_o, 1.5, z, ctl)
    psi_e = phase * m_e
    psi_o = root * y * phase * m_o
    if not derivatives:
        return ParabolicBasisPoint(psi_e, 0j, psi_o, 0j)

    dm_e = 2.0 * a_e * kummer_m(a_e + 1, 1.5, z, ctl)
    dm_o = a_o / 1.5 * kummer_m(a_o + 1, 2.5, z, ctl)
    # d/dx [exp(-i b y^2/2) M(i b y^2)] = i b y exp(..) (2 M' - M)
    dpsi_e = 1j * beta * y * phase * (2.0 * dm_e - m_e)
    dpsi_o = root * phase * (m_o + 1j * beta * y2 * (2.0 * dm_o - m_o))
    return ParabolicBasisPoint(psi_e, dpsi_e, psi_o, dpsi_o)


def basis_real(
    shape: ParabolicShape, energy: float, units: UnitSystem = ATOMIC, x: float = 0.0,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> tuple[float, float]:
    """``(psi_e, psi_o)`` at ``x`` from the real even/odd power series."""
    y = _check_support(shape, x)
    beta = shape.beta(units)
    a = weber_parameter(shape, energy, units)
    z = math.sqrt(2.0 * beta) * y
    return weber_even(a, z, ctl), weber_odd(a, z, ctl)


def scattering_single_direct(
    shape: ParabolicShape, energy: float, units: UnitSystem = ATOMIC, ctl: SeriesControl = DEFAULT_CONTROL
) -> SingleBarrierScattering:
    """Solve the four C1 matching equations at both support edges directly."""
    k = wavenumber(energy, units)
    lo, hi = shape.support(units)
    left = basis_at(shape, energy, units, lo, ctl)
    right = basis_at(shape, energy, units, hi, ctl)
    el, er = cmath.exp(1j * k * lo), cmath.exp(1j * k * hi)
    # unknowns: r, A, B, t
    m = np.array(
        [
            [1.0 / el, -left.psi_e, -left.psi_o, 0.0],
            [-1j * k / el, -left.dpsi_e, -left.dpsi_o, 0.0],
            [0.0, right.psi_e, right.psi_o, -er],
            [0.0, right.dpsi_e, right.dpsi_o, -1j * k * er],
        ],
        dtype=complex,
    )
    rhs = np.array([-el, -1j * k * el, 0.0, 0.0], dtype=complex)
    r, a, b, t = np.linalg.solve(m, rhs)
    return SingleBarrierScattering(
        r=complex(r), t=complex(t), a_coef=complex(a), b_coef=complex(b),
        big_r=abs(r) ** 2, big_t=abs(t) ** 2, l_e=math.nan, l_o=math.nan,
        shape=shape, energy=energy, k=k, units=units, method="direct",
    )


def scattering_single(
    shape: ParabolicShape,
    energy: float,
    units: UnitSystem = ATOMIC,
    ctl: SeriesControl = DEFAULT_CONTROL,
    fallback: bool = True,
) -> SingleBarrierScattering:
    """Reflection/transmission amplitudes from the edge logarithmic derivatives.

    If ``psi_e`` or ``psi_o`` vanishes at the edge the logarithmic derivative
    is undefined; with ``fallback=True`` the direct four-equation solve is used
    instead (``l_e``/``l_o`` are then ``inf``), otherwise
    :class:`DegenerateBoundary` is raised.
    """
    k = wavenumber(energy, units)
    alpha = shape.alpha
    edge = basis_at(shape, energy, units, shape.gamma + alpha, ctl)

    for name, val, der in (("psi_e", edge.psi_e, edge.dpsi_e), ("psi_o", edge.psi_o, edge.dpsi_o)):
        if abs(val) <= DEGENERATE_TOL * max(abs(val), abs(alpha * der)):
            if not fallback:
                raise DegenerateBoundary(f"{name} vanishes at the support edge (E={energy})")
            direct = scattering_single_direct(shape, energy, units, ctl)
            return SingleBarrierScattering(
                **{**direct.__dict__, "l_e": math.inf, "l_o": math.inf, "method": "direct-fallback"}
            )

    le_c = alpha * edge.dpsi_e / edge.psi_e
    lo_c = alpha * edge.dpsi_o / edge.psi_o
    residue = max(abs(le_c.imag), abs(lo_c.imag))
    le, lo = le_c.real, lo_c.real

    ka = k * alpha
    ratio_e = (le + 1j * ka) / (le - 1j * ka)
    ratio_o = (lo + 1j * ka) / (lo - 1j * ka)
    back = cmath.exp(-2j * ka)
    r0 = -0.5 * back * (ratio_e + ratio_o)
    t0 = -0.5 * back * (ratio_e - ratio_o)

    ea = cmath.exp(1j * ka)
    a0 = ((t0 + r0) * ea + 1.0 / ea) / (2.0 * edge.psi_e.real)
    b0 = ((t0 - r0) * ea - 1.0 / ea) / (2.0 * edge.psi_o.real)

    ka2 = ka * ka
    denom = (le * le + ka2) * (lo * lo + ka2)
    big_r = (le * lo + ka2) ** 2 / denom
    big_t = ka2 * (le - lo) ** 2 / denom

    # Translating the barrier by gamma multiplies r by exp(2ik gamma) and the
    # interior coefficients by exp(ik gamma); t is unchanged.
    shift = cmath.exp(1j * k * shape.gamma)
    return SingleBarrierScattering(
        r=r0 * shift * shift, t=t0, a_coef=a0 * shift, b_coef=b0 * shift,
        big_r=big_r, big_t=big_t, l_e=le, l_o=lo,
        shape=shape, energy=energy, k=k, units=units, imag_residue=residue,
    )


def wavefunction_single(
    shape: ParabolicShape,
    energy: float,
    units: UnitSystem,
    solution: SingleBarrierScattering,
    x: float,
    ctl: SeriesControl = DEFAULT_CONTROL,
    derivative: bool = False,
):
    """Assembled three-region wavefunction (and optionally its derivative) at ``x``."""
    k = solution.k
    lo, hi = shape.support(units)
    if x < lo:
        e = cmath.exp(1j * k * x)
        psi, dpsi = e + solution.r / e, 1j * k * (e - solution.r / e)
    elif x > hi:
        e = cmath.exp(1j * k * x)
        psi, dpsi = solution.t * e, 1j * k * solution.t * e
    else:
        p = basis_at(shape, energy, units, x, ctl, derivatives=derivative)
        psi = solution.a_coef * p.psi_e + solution.b_coef * p.psi_o
        dpsi = solution.a_coef * p.dpsi_e + solution.b_coef * p.dpsi_o
    return (psi, dpsi) if derivative else psi
