"""
Brute-force referee: fixed-step RK4 integration of the stationary equation.

Nothing here uses a special function. The equation

    psi'' = (2m/hbar**2) (U(x) - E) psi

is linear, so one RK4 step is a 2x2 real matrix acting on ``(psi, psi')``.
Starting from the purely transmitted wave ``exp(ikx)`` at the right edge of
the domain, the step matrices are multiplied right to left (a pairwise
product tree, vectorised with numpy) and the state at the left edge is split
into incident and reflected waves.

Steps never straddle a breakpoint: the domain is cut at every segment
boundary (and at every sample of a sampled potential unless
``align_samples=False``), each panel gets a whole number of equal steps and
the potential in a panel is evaluated from that panel's own formula.
Step halving with Richardson extrapolation continues until successive
estimates of ``r`` and ``t`` agree to ``rel_tol`` relative to ``max(|r|, |t|)``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .errors import InvalidParameter, NonConvergence, StiffnessWarning
from .potentials import CompositePotential, ParabolicShape, SechShape
from .units import UnitSystem, wavenumber

__all__ = [
    "IntegratorConfig",
    "SampledPotential",
    "OracleResult",
    "load_sampled_csv",
    "integrate_scattering",
    "integrate_fixed",
    "convergence_order",
]

MAX_HALVINGS = 16
MAX_STEPS = 1 << 24
CHUNK = 1 << 15


@dataclass(frozen=True)
class IntegratorConfig:
    """``step`` is the initial step (None picks one); ``landau_radius`` is in units of ``1/alpha_inv``."""

    step: float | None = None
    rel_tol: float = 1e-9
    domain_pad: float = 0.0
    landau_radius: float = 20.0
    max_halvings: int = MAX_HALVINGS

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise InvalidParameter("step must be positive")
        if not self.rel_tol > 0:
            raise InvalidParameter("rel_tol must be positive")
        if not self.domain_pad >= 0:
            raise InvalidParameter("domain_pad must be non-negative")
        if not self.landau_radius > 0:
            raise InvalidParameter("landau_radius must be positive")


@dataclass(frozen=True)
class SampledPotential:
    """Linear interpolation through ``(x, U)`` samples; zero outside the samples.

    A repeated abscissa encodes a jump. With ``align_samples=False`` the
    integrator treats the whole sampled range as a single panel.
    """

    xs: tuple[float, ...]
    us: tuple[float, ...]
    units: UnitSystem | None = None
    align_samples: bool = True

    def __post_init__(self):
        xs, us = tuple(map(float, self.xs)), tuple(map(float, self.us))
        if len(xs) != len(us) or len(xs) < 2:
            raise InvalidParameter("need at least two (x, U) samples of equal length")
        if any(b < a for a, b in zip(xs, xs[1:])):
            raise InvalidParameter("sample abscissae must be non-decreasing")
        if not all(map(math.isfinite, xs + us)):
            raise InvalidParameter("samples must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "us", us)
        if self.units is None:
            from .units import ATOMIC

            object.__setattr__(self, "units", ATOMIC)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.xs[0]) & (x <= self.xs[-1])
        return np.where(inside, np.interp(x, self.xs, self.us), 0.0)


Potential = Union[CompositePotential, SampledPotential]


def load_sampled_csv(path: str | Path, units: UnitSystem | None = None, align_samples: bool = True) -> SampledPotential:
    """Read ``x,U`` rows (an optional non-numeric header line is skipped)."""
    xs, us = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                x, u = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not xs:
                    continue
                raise InvalidParameter(f"malformed sample row {row!r} in {path}") from None
            xs.append(x)
            us.append(u)
    return SampledPotential(tuple(xs), tuple(us), units, align_samples)


@dataclass(frozen=True)
class OracleResult:
    r: complex
    t: complex
    big_r: float
    big_t: float
    step: float
    steps: int
    halvings: int
    error_estimate: float


def _vector_shape(shape, units: UnitSystem) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(shape, ParabolicShape):
        return lambda x: shape.u0 * (1.0 - ((x - shape.gamma) / shape.alpha) ** 2)
    if isinstance(shape, SechShape):
        shift = shape.shift_energy(units)

        def sech(x):
            e = np.exp(-2.0 * np.abs(shape.alpha_inv * (x - shape.gamma)))
            return shape.u0 * 4.0 * e / (1.0 + e) ** 2 - shift

        return sech
    return lambda x: np.zeros_like(x)


def _domain_panels(pot: Potential, cfg: IntegratorConfig):
    """``(x_left, x_right, [(lo, hi, U_vectorised), ...], narrowest_feature)``."""
    pad = cfg.domain_pad
    if isinstance(pot, SampledPotential):
        xs = pot.xs
        lo, hi = xs[0] - pad, xs[-1] + pad
        panels = [(lo, xs[0], lambda x: np.zeros_like(x))] if pad > 0 else []
        if pot.align_samples:
            for a, b, ua, ub in zip(xs, xs[1:], pot.us, pot.us[1:]):
                if b > a:
                    panels.append((a, b, lambda x, a=a, b=b, ua=ua, ub=ub: ua + (ub - ua) * (x - a) / (b - a)))
        else:
            panels.append((xs[0], xs[-1], pot))
        if pad > 0:
            panels.append((xs[-1], hi, lambda x: np.zeros_like(x)))
        return lo, hi, panels, xs[-1] - xs[0]

    units = pot.units
    if pot.is_landau:
        shape = pot.segments[0].shape
        radius = cfg.landau_radius / shape.alpha_inv
        a, b = shape.gamma - radius, shape.gamma + radius
        f = _vector_shape(shape, units)
        panels = [(a, b, f)]
        if pad > 0:
            zero = lambda x: np.zeros_like(x)
            panels = [(a - pad, a, zero)] + panels + [(b, b + pad, zero)]
        return a - pad, b + pad, panels, 1.0 / shape.alpha_inv

    if pot.is_free:
        width = max(pad, 1.0 / wavenumber(1.0, units))
        return -width, width, [(-width, width, lambda x: np.zeros_like(x))], 2 * width
    a, b = pot.support()
    lo, hi = a - pad, b + pad
    panels = []
    if pad > 0:
        panels.append((lo, a, lambda x: np.zeros_like(x)))
    narrow = math.inf
    for seg in pot.segments:
        s, e = max(seg.lo, a), min(seg.hi, b)
        if e <= s:
            continue
        panels.append((s, e, _vector_shape(seg.shape, units)))
        if seg.kind != "free":
            narrow = min(narrow, e - s)
    if pad > 0:
        panels.append((b, hi, lambda x: np.zeros_like(x)))
    return lo, hi, panels, narrow


def _step_matrices(h: float, q0, qm, q1) -> np.ndarray:
    """RK4 propagators for ``y' = [[0, 1], [q, 0]] y`` over one step ``h``."""
    n = len(q0)

    def amat(q):
        a = np.zeros((n, 2, 2))
        a[:, 0, 1] = 1.0
        a[:, 1, 0] = q
        return a

    eye = np.broadcast_to(np.eye(2), (n, 2, 2))
    a0, am, a1 = amat(q0), amat(qm), amat(q1)
    k1 = a0
    k2 = am @ (eye + 0.5 * h * k1)
    k3 = am @ (eye + 0.5 * h * k2)
    k4 = a1 @ (eye + h * k3)
    return eye + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _product(mats: np.ndarray) -> np.ndarray:
    """``mats[-1] @ ... @ mats[0]`` (``mats[0]`` acts first) by pairwise reduction."""
    while len(mats) > 1:
        if len(mats) % 2:
            mats = np.concatenate([mats, np.eye(2)[None]], axis=0)
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


def _panel_counts(panels, h: float) -> list[int]:
    return [max(1, math.ceil((b - a) / h - 1e-9)) for a, b, _ in panels]


def integrate_fixed(pot: Potential, energy: float, h: float, cfg: IntegratorConfig = IntegratorConfig()):
    """``(r, t, steps)`` from one pass with nominal step ``h`` (no extrapolation)."""
    units = pot.units
    k = wavenumber(energy, units)
    kf = units.kinetic_factor
    x_l, x_r, panels, _ = _domain_panels(pot, cfg)
    counts = _panel_counts(panels, h)
    total = sum(counts)
    if total > MAX_STEPS:
        warnings.warn(f"step {h:g} needs {total} steps on [{x_l}, {x_r}]", StiffnessWarning, stacklevel=2)
        raise NonConvergence(f"oracle step budget of {MAX_STEPS} exceeded")

    # propagate right to left: reverse panels, negative steps, bounded chunks
    prop = np.eye(2)
    for (a, b, u), n in zip(reversed(panels), reversed(counts)):
        step = -(b - a) / n
        for start in range(0, n, CHUNK):
            idx = np.arange(start, min(start + CHUNK, n))
            x0 = b + step * idx
            x1 = b + step * (idx + 1)
            if idx[-1] == n - 1:
                x1[-1] = a
            q0 = kf * (u(x0) - energy)
            qm = kf * (u(0.5 * (x0 + x1)) - energy)
            q1 = kf * (u(x1) - energy)
            prop = _product(_step_matrices(step, q0, qm, q1)) @ prop

    er = np.exp(1j * k * x_r)
    y = prop @ np.array([er, 1j * k * er])
    el = np.exp(1j * k * x_l)
    incident = 0.5 * (y[0] + y[1] / (1j * k)) / el
    reflected = 0.5 * (y[0] - y[1] / (1j * k)) * el
    return complex(reflected / incident), complex(1.0 / incident), total


def _initial_step(pot: Potential, energy: float, cfg: IntegratorConfig) -> float:
    if cfg.step is not None:
        return cfg.step
    units = pot.units
    x_l, x_r, panels, narrow = _domain_panels(pot, cfg)
    vals = np.concatenate([u(np.linspace(a, b, 65)) for a, b, u in panels])
    k_max = math.sqrt(units.kinetic_factor * max(energy, float(np.max(np.abs(vals - energy)))))
    # resolve the narrowest feature and keep k_max * h well inside RK4 stability
    return min(narrow / 200.0, 0.2 / k_max, (x_r - x_l) / 50.0)


def integrate_scattering(
    pot: Potential,
    energy: float,
    units: UnitSystem | None = None,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> OracleResult:
    """``r``, ``t``, ``R``, ``T`` by RK4 with step halving and Richardson extrapolation.

    ``units`` (if given) must match the potential's; energy is in those units.
    Raises :class:`NonConvergence` if ``cfg.max_halvings`` halvings do not
    reach ``cfg.rel_tol``.
    """
    if units is not None and units != pot.units:
        if isinstance(pot, CompositePotential):
            pot = pot.converted(units)
        else:
            raise InvalidParameter("sampled potentials are not converted between unit systems")
    h = _initial_step(pot, energy, cfg)
    r0, t0, _ = integrate_fixed(pot, energy, h, cfg)
    for halving in range(1, cfg.max_halvings + 1):
        h *= 0.5
        r1, t1, steps = integrate_fixed(pot, energy, h, cfg)
        dr, dt = abs(r1 - r0), abs(t1 - t0)
        # measured against the larger amplitude (>= 1/sqrt(2) by unitarity) so a
        # vanishing r at resonance or a tiny tunnelling t cannot stall convergence
        if max(dr, dt) <= cfg.rel_tol * max(abs(r1), abs(t1)):
            r = (16.0 * r1 - r0) / 15.0
            t = (16.0 * t1 - t0) / 15.0
            return OracleResult(r, t, abs(r) ** 2, abs(t) ** 2, h, steps, halving, max(dr, dt) / 15.0)
        r0, t0 = r1, t1
    raise NonConvergence(
        f"oracle did not reach rel_tol={cfg.rel_tol} after {cfg.max_halvings} halvings (E={energy})"
    )


def convergence_order(
    pot: Potential,
    energy: float,
    units: UnitSystem | None = None,
    step: float | None = None,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> float:
    """Observed order ``log2(|t_h - t_h/2| / |t_h/2 - t_h/4|)`` from three fixed-step runs."""
    if units is not None and units != pot.units and isinstance(pot, CompositePotential):
        pot = pot.converted(units)
    h = step if step is not None else _initial_step(pot, energy, cfg)
    runs = [integrate_fixed(pot, energy, h / 2**i, cfg) for i in range(3)]
    v = [np.array([r, t]) for r, t, _ in runs]
    d1 = float(np.max(np.abs(v[0] - v[1])))
    d2 = float(np.max(np.abs(v[1] - v[2])))
    if d2 == 0.0:
        return math.inf
    return math.log2(d1 / d2)
