"""
Sech-squared barriers through associated Legendre functions.

With ``xi = tanh(a (x - gamma))`` (``a = alpha_inv``) the stationary equation
for ``U0 sech**2`` becomes the associated Legendre equation with

    nu (nu + 1) = -2 m U0 / (hbar**2 a**2),    mu = i k_eff / a,

where ``k_eff = k`` for the full-line barrier and
``k_eff = sqrt(k**2 + beta**2)`` for the shifted compact one.

``P^mu_nu`` is evaluated through one of two hypergeometric representations
so that the series argument never exceeds 1/2:

* ``xi >= 0``: ``P = ((1+xi)/(1-xi))**(mu/2) F(-nu, nu+1; 1-mu; (1-xi)/2) / Gamma(1-mu)``
* ``xi < 0``: the analytic continuation in ``(1+xi)/2``.

Internally everything is parametrised by ``s = atanh(xi)`` so that
``((1+xi)/(1-xi))**(mu/2) = exp(mu s)`` exactly and points far out on the
tails (where ``xi`` rounds to +-1) remain representable.

Sign convention: ``mu = +i k / a``. With this choice ``P^mu_nu`` is the
solution that is purely transmitted on the right; the opposite sign swaps the
roles of ``P^mu_nu`` and ``P^-mu_nu``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .basis import BasisPair
from .errors import (
    GammaPole,
    InvalidParameter,
    OutOfSupport,
    PoleError,
    RepresentationBreakdown,
    WronskianCollapse,
)
from .potentials import SechShape
from .specfun import (
    DEFAULT_CONTROL,
    GAUSS_MAX_ABS_Z,
    SeriesControl,
    gauss_f,
    gauss_f_deriv,
    log_gamma,
)
from .units import ATOMIC, UnitSystem, wavenumber

__all__ = [
    "LegendreParams",
    "LandauScattering",
    "legendre_nu",
    "landau_regime_parameter",
    "legendre_p",
    "legendre_p_deriv",
    "legendre_p_s",
    "landau_scattering",
    "transmission_closed_form",
    "sech_basis_at",
    "landau_basis_at",
]


@dataclass(frozen=True)
class LegendreParams:
    mu: complex
    nu: complex
    xi: float


@dataclass(frozen=True)
class LandauScattering:
    r: complex
    t: complex
    big_r: float
    big_t: float
    normalization: complex
    big_t_closed: float
    regime: str
    mu: complex
    nu: complex
    k: float


def landau_regime_parameter(u0: float, alpha_inv: float, units: UnitSystem = ATOMIC) -> float:
    """``8 m U0 / (hbar**2 a**2)``; ``nu`` is real below 1 and complex above."""
    return 4.0 * units.kinetic_factor * u0 / (alpha_inv * alpha_inv)


def legendre_nu(u0: float, alpha_inv: float, units: UnitSystem = ATOMIC) -> complex:
    """Degree ``nu = (-1 + sqrt(1 - q)) / 2`` with the principal square root.

    For ``q > 1`` this is ``-1/2 + (i/2) sqrt(q - 1)``.
    """
    q = landau_regime_parameter(u0, alpha_inv, units)
    if q <= 1.0:
        return complex(0.5 * (-1.0 + math.sqrt(1.0 - q)), 0.0)
    return complex(-0.5, 0.5 * math.sqrt(q - 1.0))


def _lg(z: complex) -> complex:
    try:
        return log_gamma(z)
    except PoleError as exc:
        raise GammaPole(str(exc)) from exc


def _log_rgamma_or_none(z: complex) -> complex | None:
    """``-log Gamma(z)``, or None where ``1/Gamma`` vanishes."""
    try:
        return -log_gamma(z)
    except PoleError:
        return None


def _sech2_of_s(s: float) -> float:
    e = math.exp(-2.0 * abs(s))
    return 4.0 * e / (1.0 + e) ** 2


def legendre_p_s(
    mu: complex,
    nu: complex,
    s: float,
    ctl: SeriesControl = DEFAULT_CONTROL,
    representation: str = "auto",
) -> tuple[complex, complex]:
    """``P^mu_nu(tanh s)`` and its derivative with respect to ``s``.

    ``representation`` is ``"auto"`` (choose by the sign of ``s``),
    ``"lp1"`` or ``"lp2"``.
    """
    mu, nu = complex(mu), complex(nu)
    if representation == "auto":
        representation = "lp1" if s >= 0 else "lp2"
    sech2 = _sech2_of_s(s)
    # (1 - xi)/2 and (1 + xi)/2 without cancellation
    lower = 1.0 / (1.0 + math.exp(2.0 * s)) if s > -350 else 1.0
    upper = 1.0 / (1.0 + math.exp(-2.0 * s)) if s < 350 else 1.0
    a, b = -nu, nu + 1.0

    if representation == "lp1":
        if lower > GAUSS_MAX_ABS_Z:
            raise RepresentationBreakdown(f"first representation needs (1-xi)/2 <= {GAUSS_MAX_ABS_Z}")
        inv_g = _log_rgamma_or_none(1.0 - mu)
        if inv_g is None:
            return 0j, 0j
        pre = cmath.exp(mu * s + inv_g)
        f = gauss_f(a, b, 1.0 - mu, lower, ctl)
        df = gauss_f_deriv(a, b, 1.0 - mu, lower, ctl)
        return pre * f, pre * (mu * f - 0.5 * sech2 * df)

    if representation != "lp2":
        raise InvalidParameter(f"unknown representation {representation!r}")
    if upper > GAUSS_MAX_ABS_Z:
        raise RepresentationBreakdown(f"second representation needs (1+xi)/2 <= {GAUSS_MAX_ABS_Z}")
    if mu.imag == 0.0 and mu.real == math.floor(mu.real):
        raise RepresentationBreakdown("continuation formula needs non-integer order")

    val = 0j
    der = 0j
    inv1 = _log_rgamma_or_none(1.0 + nu - mu)
    inv2 = _log_rgamma_or_none(-nu - mu)
    if inv1 is not None and inv2 is not None:
        c1 = cmath.exp(_lg(-mu) + inv1 + inv2 + mu * s)
        f1 = gauss_f(a, b, 1.0 + mu, upper, ctl)
        df1 = gauss_f_deriv(a, b, 1.0 + mu, upper, ctl)
        val += c1 * f1
        der += c1 * (mu * f1 + 0.5 * sech2 * df1)
    c2 = cmath.sin(math.pi * nu) / math.pi * cmath.exp(_lg(mu) - mu * s)
    f2 = gauss_f(a, b, 1.0 - mu, upper, ctl)
    df2 = gauss_f_deriv(a, b, 1.0 - mu, upper, ctl)
    val -= c2 * f2
    der -= c2 * (-mu * f2 + 0.5 * sech2 * df2)
    return val, der


def legendre_p(p: LegendreParams, ctl: SeriesControl = DEFAULT_CONTROL, representation: str = "auto") -> complex:
    """Ferrers function ``P^mu_nu(xi)`` on ``-1 < xi < 1``."""
    if not -1.0 < p.xi < 1.0:
        raise InvalidParameter(f"xi must lie in (-1, 1), got {p.xi!r}")
    return legendre_p_s(p.mu, p.nu, math.atanh(p.xi), ctl, representation)[0]


def legendre_p_deriv(p: LegendreParams, ctl: SeriesControl = DEFAULT_CONTROL, representation: str = "auto") -> complex:
    """``d P^mu_nu / d xi``."""
    if not -1.0 < p.xi < 1.0:
        raise InvalidParameter(f"xi must lie in (-1, 1), got {p.xi!r}")
    _, d_ds = legendre_p_s(p.mu, p.nu, math.atanh(p.xi), ctl, representation)
    return d_ds / (1.0 - p.xi * p.xi)


def _log_cosh(x: float) -> float:
    x = abs(x)
    return x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)


def transmission_closed_form(k: float, u0: float, alpha_inv: float, units: UnitSystem = ATOMIC) -> float:
    """``2 sinh**2(pi k/a) / (c + cosh(2 pi k/a))`` with ``c = cos`` or ``cosh`` by regime.

    Evaluated as ``(C - 1)/(C + c)``, ``C = cosh(2 pi k / a)``, rescaled to
    avoid overflow.
    """
    q = landau_regime_parameter(u0, alpha_inv, units)
    big = 2.0 * math.pi * k / alpha_inv
    if q <= 1.0:
        c = math.cos(math.pi * math.sqrt(1.0 - q))
        if big < 700:
            cc = math.cosh(big)
            return (cc - 1.0) / (cc + c)
        return 1.0 - (1.0 + c) * math.exp(-_log_cosh(big)) / (1.0 + c * math.exp(-_log_cosh(big)))
    log_c = _log_cosh(math.pi * math.sqrt(q - 1.0))
    log_big = _log_cosh(big)
    inv_big = math.exp(-log_big)
    return (1.0 - inv_big) / (1.0 + math.exp(log_c - log_big))


def landau_scattering(
    shape: SechShape,
    energy: float,
    units: UnitSystem = ATOMIC,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> LandauScattering:
    """Closed-form ``r`` and ``t`` for the full-line barrier ``U0 sech**2(a (x - gamma))``.

    Gamma products are summed in log space and exponentiated once.
    ``big_t_closed`` is the independent cos/cosh expression for ``T``.
    """
    if shape.is_compact:
        raise InvalidParameter("landau_scattering needs beta_shift == 0; use the multibarrier solver")
    k = wavenumber(energy, units)
    a = shape.alpha_inv
    kappa = k / a
    mu = 1j * kappa
    nu = legendre_nu(shape.u0, a, units)

    common = _lg(-nu - mu) + _lg(1.0 + nu - mu)
    t = cmath.exp(common - _lg(1.0 - mu) - _lg(-mu))
    norm = cmath.exp(common - _lg(-mu))
    r = -cmath.exp(common + _lg(mu) - _lg(-mu)) * cmath.sin(math.pi * nu) / math.pi

    shift = cmath.exp(1j * k * shape.gamma)
    r *= shift * shift
    norm *= shift

    q = landau_regime_parameter(shape.u0, a, units)
    return LandauScattering(
        r=r, t=t, big_r=abs(r) ** 2, big_t=abs(t) ** 2, normalization=norm,
        big_t_closed=transmission_closed_form(k, shape.u0, a, units),
        regime="real-nu" if q < 1.0 else "complex-nu",
        mu=mu, nu=nu, k=k,
    )


def _pair(mu: complex, nu: complex, s: float, a: float, ctl: SeriesControl) -> BasisPair:
    f1, d1 = legendre_p_s(mu, nu, s, ctl)
    f2, d2 = legendre_p_s(-mu, nu, s, ctl)
    return BasisPair(f1, a * d1, f2, a * d2)


def sech_basis_at(
    shape: SechShape,
    energy: float,
    units: UnitSystem = ATOMIC,
    x: float = 0.0,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> BasisPair:
    """``(P^mu_nu, P^-mu_nu)`` at ``x`` for the compact shifted barrier, with x-derivatives.

    ``mu = i sqrt(k**2 + beta**2) / a``; ``dxi/dx = a (1 - xi**2)``.
    """
    if not shape.is_compact:
        raise InvalidParameter("sech_basis_at is for compact barriers; use landau_basis_at")
    lo, hi = shape.support(units)
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if not lo - slack <= x <= hi + slack:
        raise OutOfSupport(f"x={x} outside compact sech support [{lo}, {hi}]")
    k = wavenumber(energy, units)
    a = shape.alpha_inv
    mu = 1j * math.sqrt(k * k + shape.beta_shift**2) / a
    if mu == 0:
        raise WronskianCollapse("order mu = 0 makes P^mu and P^-mu coincide")
    nu = legendre_nu(shape.u0, a, units)
    return _pair(mu, nu, a * (x - shape.gamma), a, ctl)


def landau_basis_at(
    shape: SechShape,
    energy: float,
    units: UnitSystem = ATOMIC,
    x: float = 0.0,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> BasisPair:
    """``(P^mu_nu, P^-mu_nu)`` with ``mu = i k / a`` on the whole line."""
    k = wavenumber(energy, units)
    a = shape.alpha_inv
    nu = legendre_nu(shape.u0, a, units)
    return _pair(1j * k / a, nu, a * (x - shape.gamma), a, ctl)
