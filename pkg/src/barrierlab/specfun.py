"""
Complex special functions used by the closed-form barrier solutions.

Everything here is a plain power series summed in double precision:

* Kummer's confluent hypergeometric function ``M(a, b, z)``
* Gauss' hypergeometric function ``F(a, b; c; z)`` on ``|z| <= 0.95``
* the principal branch of ``log Gamma(z)``
* the real even/odd solutions ``w_e(a, z)``, ``w_o(a, z)`` of
  ``w'' + (z**2/4 - a) w = 0`` built from their three-term coefficient
  recursions.

Truncation rule (all series): stop once two consecutive terms are both below
``rel_tol * |partial sum|`` *and* the series has passed its largest term, so the
remaining tail is geometrically dominated by the last term.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import InvalidParameter, NonConvergence, PoleError

__all__ = [
    "SeriesControl",
    "DEFAULT_CONTROL",
    "GAUSS_MAX_ABS_Z",
    "KUMMER_MAX_ABS_Z",
    "MAX_CANCELLATION",
    "kummer_m",
    "kummer_m_deriv",
    "gauss_f",
    "gauss_f_deriv",
    "log_gamma",
    "gamma",
    "rgamma",
    "weber_even",
    "weber_odd",
    "real_power_ratio",
]


@dataclass(frozen=True)
class SeriesControl:
    """Truncation controls for the power series in this module."""

    rel_tol: float = 1e-14
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise InvalidParameter(f"rel_tol must be positive, got {self.rel_tol!r}")
        if self.max_terms < 1:
            raise InvalidParameter(f"max_terms must be >= 1, got {self.max_terms!r}")


DEFAULT_CONTROL = SeriesControl()

# Hypergeometric series are refused outside this disc. Callers pick the
# representation (see landau.legendre_p) that keeps |z| <= 1/2.
GAUSS_MAX_ABS_Z = 0.95

# Guard against float overflow in the Kummer partial sums.
KUMMER_MAX_ABS_Z = 700.0

# Largest tolerated ratio max|term| / |sum|. Beyond this more than 8 digits
# are lost to cancellation and the sum is reported as non-convergent. The
# Kummer guard measures against max(|sum|, 1) so that a sum sitting near one
# of its zeros keeps its absolute accuracy instead of failing.
MAX_CANCELLATION = 1e8


def _is_nonpositive_integer(z: complex) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _check_finite(value: complex, what: str) -> complex:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise NonConvergence(f"{what} produced a non-finite value {value!r}")
    return value


def kummer_m(a: complex, b: complex, z: complex, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Kummer's function ``M(a, b, z) = sum (a)_n / (b)_n z**n / n!``.

    Raises
    ------
    InvalidParameter
        If ``b`` is a non-positive integer or ``|z|`` exceeds ``KUMMER_MAX_ABS_Z``.
    NonConvergence
        If ``ctl.max_terms`` is reached first, or cancellation exceeds
        ``MAX_CANCELLATION``.
    """
    a, b, z = complex(a), complex(b), complex(z)
    if _is_nonpositive_integer(b):
        raise InvalidParameter(f"M(a, b, z) undefined for non-positive integer b={b!r}")
    if abs(z) > KUMMER_MAX_ABS_Z:
        raise InvalidParameter(f"|z|={abs(z):.3g} exceeds the Kummer series budget {KUMMER_MAX_ABS_Z}")

    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    biggest = 1.0
    small_run = 0
    for n in range(ctl.max_terms):
        factor = (a + n) * z / ((b + n) * (n + 1))
        term = term * factor
        total += term
        mag = abs(term)
        if mag > biggest:
            biggest = mag
        if term == 0:
            # (a)_n hit zero: polynomial case, exact.
            return _check_finite(total, "kummer_m")
        if mag <= ctl.rel_tol * abs(total):
            small_run += 1
        else:
            small_run = 0
        if small_run >= 2 and abs(factor) < 0.5:
            if biggest > MAX_CANCELLATION * max(abs(total), 1.0):
                raise NonConvergence(
                    f"kummer_m lost {math.log10(biggest / max(abs(total), 1.0)):.1f} digits to cancellation"
                )
            return _check_finite(total, "kummer_m")
    raise NonConvergence(f"kummer_m did not converge in {ctl.max_terms} terms (a={a}, b={b}, z={z})")


def kummer_m_deriv(a: complex, b: complex, z: complex, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """``dM/dz = (a/b) M(a+1, b+1, z)``, differentiated term by term."""
    a, b = complex(a), complex(b)
    if a == 0:
        return 0.0j
    return a / b * kummer_m(a + 1, b + 1, z, ctl)


def gauss_f(
    a: complex, b: complex, c: complex, z: complex, ctl: SeriesControl = DEFAULT_CONTROL
) -> complex:
    """Gauss hypergeometric series ``F(a, b; c; z)`` for ``|z| <= GAUSS_MAX_ABS_Z``."""
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if _is_nonpositive_integer(c):
        raise InvalidParameter(f"F(a, b; c; z) undefined for non-positive integer c={c!r}")
    if abs(z) > GAUSS_MAX_ABS_Z:
        raise NonConvergence(
            f"|z|={abs(z):.4g} outside the convergence margin {GAUSS_MAX_ABS_Z}; "
            "use a representation with a smaller argument"
        )

    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    biggest = 1.0
    small_run = 0
    for n in range(ctl.max_terms):
        factor = (a + n) * (b + n) * z / ((c + n) * (n + 1))
        term = term * factor
        total += term
        mag = abs(term)
        biggest = max(biggest, mag)
        if term == 0:
            return _check_finite(total, "gauss_f")
        if mag <= ctl.rel_tol * abs(total):
            small_run += 1
        else:
            small_run = 0
        if small_run >= 2 and abs(factor) < 1.0:
            # Geometric tail bound: |rest| <= |term| * q / (1 - q) with q -> |z|.
            q = max(abs(factor), abs(z))
            if mag * q / (1.0 - q) <= ctl.rel_tol * abs(total) or q < 0.5:
                if biggest > MAX_CANCELLATION * abs(total):
                    raise NonConvergence(
                        f"gauss_f lost {math.log10(biggest / abs(total)):.1f} digits to cancellation"
                    )
                return _check_finite(total, "gauss_f")
    raise NonConvergence(f"gauss_f did not converge in {ctl.max_terms} terms (z={z})")


def gauss_f_deriv(
    a: complex, b: complex, c: complex, z: complex, ctl: SeriesControl = DEFAULT_CONTROL
) -> complex:
    """``dF/dz = (a b / c) F(a+1, b+1; c+1; z)``."""
    a, b, c = complex(a), complex(b), complex(c)
    if a == 0 or b == 0:
        return 0.0j
    return a * b / c * gauss_f(a + 1, b + 1, c + 1, z, ctl)


# Stirling coefficients B_{2n} / (2n (2n - 1)), n = 1..8.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_STIRLING_MIN_RE = 10.0

# Measured against mpmath (50 digits), max |error| / max(1, |lnGamma|)
# over 3000 random points per region:
#   region                                  error
#   0.5 <= |z| <= 10, any arg               6.5e-15
#   10 <= Re z <= 1e3, |Im z| <= 1e3        4.1e-16
#   -50 < Re z < 0, 0.1 <= |Im z| <= 50     1.3e-15


def log_gamma(z: complex) -> complex:
    """Principal branch of ``log Gamma(z)``.

    For ``Re z >= 10`` the Stirling series with eight Bernoulli terms is used
    directly. Smaller arguments are shifted up with
    ``log Gamma(z) = log Gamma(z + n) - sum_j log(z + j)``; every ``log(z + j)``
    has its cut on the negative real axis, so the result is the principal
    branch on the plane slit along ``(-inf, 0]``. On the cut itself the value
    is the limit from above.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"log_gamma has a pole at z={z.real:g}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidParameter(f"log_gamma argument must be finite, got {z!r}")

    shift = 0.0j
    w = z
    while w.real < _STIRLING_MIN_RE:
        shift += cmath.log(w)
        w += 1.0

    inv = 1.0 / w
    inv2 = inv * inv
    series = 0.0j
    power = inv
    for coeff in _STIRLING:
        series += coeff * power
        power *= inv2
    return (w - 0.5) * cmath.log(w) - w + _HALF_LOG_2PI + series - shift


def gamma(z: complex) -> complex:
    """``Gamma(z)`` as ``exp(log_gamma(z))``."""
    return cmath.exp(log_gamma(z))


def rgamma(z: complex) -> complex:
    """Reciprocal Gamma; zero at the poles instead of raising."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        return 0.0j
    return cmath.exp(-log_gamma(z))


def _weber_sum(a: float, z2: float, first: float, denom, ctl: SeriesControl) -> float:
    """Sum ``e_0 + e_1 + ...`` for ``e_{n+2} = a e_{n+1} z2 / d(n) - e_n z2**2 / (4 d(n))``."""
    z4 = z2 * z2
    prev, cur = 1.0, first
    total = prev + cur
    small_run = 0
    for n in range(ctl.max_terms):
        d = denom(n)
        nxt = a * cur * z2 / d - prev * z4 / (4.0 * d)
        total += nxt
        prev, cur = cur, nxt
        if abs(nxt) <= ctl.rel_tol * abs(total) and abs(prev) <= ctl.rel_tol * abs(total):
            small_run += 1
        else:
            small_run = 0
        # Past the growth phase of the recursion the terms shrink monotonically.
        if small_run >= 1 and (abs(a) * z2 + z4) / d < 0.5:
            if not math.isfinite(total):
                raise NonConvergence("weber series overflowed")
            return total
    raise NonConvergence(f"weber series did not converge in {ctl.max_terms} terms")


def weber_even(a: float, z: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Even solution ``w_e(a, z)`` with ``w_e(a, 0) = 1``, ``w_e'(a, 0) = 0``.

    Terms ``alpha_n z**(2n) / (2n)!`` are generated from the scaled form of
    ``alpha_{n+2} = a alpha_{n+1} - (n+1)(2n+1) alpha_n / 2``.
    """
    a = float(a)
    z2 = float(z) * float(z)
    if z2 == 0.0:
        return 1.0
    return _weber_sum(a, z2, a * z2 / 2.0, lambda n: (2 * n + 3) * (2 * n + 4), ctl)


def weber_odd(a: float, z: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Odd solution ``w_o(a, z)`` with ``w_o(a, 0) = 0``, ``w_o'(a, 0) = 1``.

    Evaluated as ``z`` times an even series so that ``w_o(a, -z) == -w_o(a, z)``
    holds bit for bit.
    """
    a = float(a)
    z = float(z)
    z2 = z * z
    if z2 == 0.0:
        return 0.0 * z
    return z * _weber_sum(a, z2, a * z2 / 6.0, lambda n: (2 * n + 4) * (2 * n + 5), ctl)


def real_power_ratio(xi: float, exponent: complex) -> complex:
    """``((1 + xi) / (1 - xi)) ** exponent`` for real ``xi`` in (-1, 1).

    Computed as ``exp(exponent * (log1p(xi) - log1p(-xi)))`` with real logs, so
    no complex branch choice is involved.
    """
    if not -1.0 < xi < 1.0:
        raise InvalidParameter(f"xi must lie in (-1, 1), got {xi!r}")
    return cmath.exp(complex(exponent) * (math.log1p(xi) - math.log1p(-xi)))
