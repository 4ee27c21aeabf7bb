"""
Piecewise potentials built from compactly supported barriers.

A :class:`CompositePotential` is an ordered tuple of :class:`PotentialSegment`
objects that tile the real line. Barrier shapes are

* :class:`ParabolicShape` -- ``U0 (1 - (x - gamma)**2 / alpha**2)`` on
  ``[gamma - alpha, gamma + alpha]``;
* :class:`SechShape` -- ``U0 / cosh(a (x - gamma))**2 - hbar**2 beta**2 / (2 m)``
  cut off where it turns negative (``beta_shift > 0``), or the full-line
  Landau-Lifshitz barrier when ``beta_shift == 0``.

Segment lookup is closed on the left and open on the right. Two barriers may
share an endpoint directly; no zero-width free region is inserted.
"""

from __future__ import annotations

import bisect
import json
import math
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

import jsonschema
from scipy.optimize import brentq

from .errors import InvalidComposite, InvalidParameter
from .units import ATOMIC, UnitSystem, convert, unit_system

__all__ = [
    "Free",
    "FREE",
    "ParabolicShape",
    "SechShape",
    "Shape",
    "PotentialSegment",
    "CompositePotential",
    "Violation",
    "evaluate",
    "turning_points",
    "validate",
    "ensure_valid",
    "load_potential",
    "potential_from_dict",
    "potential_to_dict",
    "dump_potential",
    "POTENTIAL_SCHEMA",
]

CONTINUITY_TOL = 1e-12


def sech2(t: float) -> float:
    """``1 / cosh(t)**2`` without overflow for large ``|t|``."""
    e = math.exp(-2.0 * abs(t))
    return 4.0 * e / (1.0 + e) ** 2


@dataclass(frozen=True)
class Free:
    """Zero potential."""

    def value(self, x: float, units: UnitSystem = ATOMIC) -> float:
        return 0.0

    def peak(self, units: UnitSystem = ATOMIC) -> float:
        return 0.0


FREE = Free()


@dataclass(frozen=True)
class ParabolicShape:
    """Inverted parabola of half-width ``alpha`` and height ``u0`` centred at ``gamma``."""

    alpha: float
    u0: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.u0 > 0):
            raise InvalidParameter(f"parabolic barrier needs alpha > 0 and u0 > 0, got {self}")

    def support(self, units: UnitSystem = ATOMIC) -> tuple[float, float]:
        return (self.gamma - self.alpha, self.gamma + self.alpha)

    def value(self, x: float, units: UnitSystem = ATOMIC) -> float:
        y = (x - self.gamma) / self.alpha
        return self.u0 * (1.0 - y * y)

    def slope(self, x: float, units: UnitSystem = ATOMIC) -> float:
        return -2.0 * self.u0 * (x - self.gamma) / (self.alpha * self.alpha)

    def peak(self, units: UnitSystem = ATOMIC) -> float:
        return self.u0

    def beta(self, units: UnitSystem = ATOMIC) -> float:
        """``sqrt(2 m U0) / (hbar alpha)``."""
        return math.sqrt(units.kinetic_factor * self.u0) / self.alpha

    def scale(self) -> float:
        return self.alpha

    def shifted(self, gamma: float) -> "ParabolicShape":
        return replace(self, gamma=gamma)


@dataclass(frozen=True)
class SechShape:
    """``U0 sech**2(alpha_inv (x - gamma))`` lowered by ``hbar**2 beta_shift**2 / 2m``.

    ``alpha_inv`` is an inverse length. With ``beta_shift == 0`` this is the
    full-line Landau-Lifshitz barrier.
    """

    alpha_inv: float
    u0: float
    beta_shift: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not (self.alpha_inv > 0 and self.u0 > 0):
            raise InvalidParameter(f"sech barrier needs alpha_inv > 0 and u0 > 0, got {self}")
        if self.beta_shift < 0:
            raise InvalidParameter("beta_shift must be non-negative")

    @property
    def is_compact(self) -> bool:
        return self.beta_shift > 0

    def shift_energy(self, units: UnitSystem = ATOMIC) -> float:
        return self.beta_shift**2 / units.kinetic_factor

    def half_width(self, units: UnitSystem = ATOMIC) -> float:
        """Distance from ``gamma`` to each zero of the shifted potential."""
        if not self.is_compact:
            return math.inf
        ratio = math.sqrt(units.kinetic_factor * self.u0) / self.beta_shift
        if ratio <= 1.0:
            raise InvalidParameter(
                "compact sech barrier needs beta_shift < sqrt(2 m u0)/hbar so the potential has zeros"
            )
        return math.acosh(ratio) / self.alpha_inv

    def support(self, units: UnitSystem = ATOMIC) -> tuple[float, float]:
        h = self.half_width(units)
        return (self.gamma - h, self.gamma + h)

    def value(self, x: float, units: UnitSystem = ATOMIC) -> float:
        return self.u0 * sech2(self.alpha_inv * (x - self.gamma)) - self.shift_energy(units)

    def slope(self, x: float, units: UnitSystem = ATOMIC) -> float:
        t = self.alpha_inv * (x - self.gamma)
        return -2.0 * self.alpha_inv * self.u0 * sech2(t) * math.tanh(t)

    def peak(self, units: UnitSystem = ATOMIC) -> float:
        return self.u0 - self.shift_energy(units)

    def scale(self) -> float:
        return 1.0 / self.alpha_inv

    def shifted(self, gamma: float) -> "SechShape":
        return replace(self, gamma=gamma)


Shape = Union[Free, ParabolicShape, SechShape]


def shape_kind(shape: Shape) -> str:
    if isinstance(shape, Free):
        return "free"
    if isinstance(shape, ParabolicShape):
        return "parabolic"
    return "sech" if shape.is_compact else "landau"


@dataclass(frozen=True)
class PotentialSegment:
    interval: tuple[float, float]
    shape: Shape = FREE

    @property
    def lo(self) -> float:
        return self.interval[0]

    @property
    def hi(self) -> float:
        return self.interval[1]

    @property
    def kind(self) -> str:
        return shape_kind(self.shape)

    def value(self, x: float, units: UnitSystem = ATOMIC) -> float:
        return self.shape.value(x, units)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    location: float | None = None
    magnitude: float | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class CompositePotential:
    segments: tuple[PotentialSegment, ...]
    units: UnitSystem = field(default=ATOMIC)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def from_barriers(cls, barriers: Iterable[Shape], units: UnitSystem = ATOMIC) -> "CompositePotential":
        """Place barriers on their natural supports, left to right, padding with free space."""
        barriers = list(barriers)
        placed = [PotentialSegment(b.support(units), b) for b in barriers]
        return cls.from_segments(placed, units)

    @classmethod
    def from_segments(cls, segments: Iterable[PotentialSegment], units: UnitSystem = ATOMIC):
        """Fill gaps and both ends with free space; segments keep their given order.

        Overlapping segments are kept as given so that :func:`validate` can
        report them.
        """
        segs = list(segments)
        if len(segs) == 1 and segs[0].kind == "landau":
            return cls((PotentialSegment((-math.inf, math.inf), segs[0].shape),), units)
        out: list[PotentialSegment] = []
        cursor = -math.inf
        for seg in segs:
            if seg.lo > cursor:
                if out and out[-1].kind == "free":
                    out[-1] = PotentialSegment((out[-1].lo, seg.lo), FREE)
                elif seg.kind == "free":
                    seg = PotentialSegment((cursor, seg.hi), FREE)
                else:
                    out.append(PotentialSegment((cursor, seg.lo), FREE))
            out.append(seg)
            cursor = seg.hi
        if cursor < math.inf:
            if out and out[-1].kind == "free":
                out[-1] = PotentialSegment((out[-1].lo, math.inf), FREE)
            else:
                out.append(PotentialSegment((cursor, math.inf), FREE))
        return cls(tuple(out), units)

    @classmethod
    def free(cls, units: UnitSystem = ATOMIC) -> "CompositePotential":
        return cls((PotentialSegment((-math.inf, math.inf), FREE),), units)

    @property
    def barriers(self) -> list[Shape]:
        return [s.shape for s in self.segments if s.kind != "free"]

    @property
    def interfaces(self) -> list[float]:
        return [s.hi for s in self.segments[:-1]]

    @property
    def is_landau(self) -> bool:
        return len(self.segments) == 1 and self.segments[0].kind == "landau"

    @property
    def is_free(self) -> bool:
        return all(s.kind == "free" for s in self.segments)

    def support(self) -> tuple[float, float]:
        """Smallest interval outside of which the potential vanishes."""
        inner = [s for s in self.segments if s.kind != "free"]
        if not inner:
            return (0.0, 0.0)
        return (inner[0].lo, inner[-1].hi)

    def peak(self) -> float:
        return max((s.shape.peak(self.units) for s in self.segments), default=0.0)

    def segment_index(self, x: float) -> int:
        lows = [s.lo for s in self.segments]
        i = bisect.bisect_right(lows, x) - 1
        return min(max(i, 0), len(self.segments) - 1)

    def segment_at(self, x: float) -> PotentialSegment:
        return self.segments[self.segment_index(x)]

    def __call__(self, x: float) -> float:
        return evaluate(self, x)

    def mirrored(self) -> "CompositePotential":
        """The potential ``U(-x)``."""
        segs = []
        for s in reversed(self.segments):
            shape = s.shape if s.kind == "free" else s.shape.shifted(-s.shape.gamma)
            segs.append(PotentialSegment((-s.hi, -s.lo), shape))
        return CompositePotential(tuple(segs), self.units)

    def converted(self, target: UnitSystem) -> "CompositePotential":
        """Same physical potential expressed in another unit system."""
        src = self.units

        def length(v):
            return v if math.isinf(v) else convert(v, "length", src, target)

        segs = []
        for s in self.segments:
            shape = s.shape
            if isinstance(shape, ParabolicShape):
                shape = ParabolicShape(
                    length(shape.alpha), convert(shape.u0, "energy", src, target), length(shape.gamma)
                )
            elif isinstance(shape, SechShape):
                shape = SechShape(
                    convert(shape.alpha_inv, "inverse_length", src, target),
                    convert(shape.u0, "energy", src, target),
                    convert(shape.beta_shift, "inverse_length", src, target),
                    length(shape.gamma),
                )
            segs.append(PotentialSegment((length(s.lo), length(s.hi)), shape))
        return CompositePotential(tuple(segs), target)


def evaluate(p: CompositePotential, x: float) -> float:
    """Potential energy at ``x`` from the active segment (zero on free segments)."""
    return p.segment_at(x).value(x, p.units)


def _dedupe(roots: list[float], scale: float) -> list[float]:
    roots = sorted(roots)
    out: list[float] = []
    for r in roots:
        if out and abs(r - out[-1]) <= 1e-12 * max(1.0, scale):
            continue
        out.append(r)
    return out


def _sech_roots(shape: SechShape, lo: float, hi: float, energy: float, units: UnitSystem) -> list[float]:
    def f(x):
        return shape.value(x, units) - energy

    top = f(shape.gamma)
    if top < 0:
        return []
    if top == 0:
        return [shape.gamma]
    roots = []
    width = shape.scale()
    for direction, end in ((-1.0, lo), (1.0, hi)):
        if math.isinf(end):
            reach = width
            while f(shape.gamma + direction * reach) >= 0:
                reach *= 2.0
            end = shape.gamma + direction * reach
        if f(end) > 0:
            continue
        a, b = sorted((shape.gamma, end))
        roots.append(brentq(f, a, b, xtol=1e-15 * max(1.0, abs(a), abs(b)), rtol=4 * sys.float_info.epsilon, maxiter=200))
    return roots


def turning_points(p: CompositePotential, energy: float, units: UnitSystem | None = None) -> list[float]:
    """All real solutions of ``U(x) = E``, ascending.

    Returns an empty list when ``E`` exceeds every barrier peak.
    """
    if energy <= 0:
        raise InvalidParameter(f"turning points need E > 0, got {energy!r}")
    units = units or p.units
    roots: list[float] = []
    for seg in p.segments:
        shape = seg.shape
        if isinstance(shape, ParabolicShape):
            if energy > shape.u0:
                continue
            d = shape.alpha * math.sqrt(1.0 - energy / shape.u0)
            roots.extend(x for x in (shape.gamma - d, shape.gamma + d) if seg.lo <= x <= seg.hi)
        elif isinstance(shape, SechShape):
            roots.extend(_sech_roots(shape, seg.lo, seg.hi, energy, units))
    span = max((abs(r) for r in roots), default=1.0)
    return _dedupe(roots, span)


def _shape_violations(seg: PotentialSegment, units: UnitSystem) -> list[Violation]:
    out = []
    if not seg.lo < seg.hi:
        out.append(Violation("degenerate_interval", f"interval {seg.interval} is empty", seg.lo))
    if isinstance(seg.shape, SechShape) and seg.shape.is_compact:
        if units.kinetic_factor * seg.shape.u0 <= seg.shape.beta_shift**2:
            out.append(
                Violation(
                    "invalid_shape",
                    "compact sech barrier needs beta_shift < sqrt(2 m u0)/hbar",
                    seg.shape.gamma,
                )
            )
    return out


def validate(p: CompositePotential) -> list[Violation]:
    """Check that ``p`` tiles the line continuously. An empty list means valid."""
    segs = p.segments
    units = p.units
    if not segs:
        return [Violation("empty", "composite has no segments")]
    out: list[Violation] = []
    for s in segs:
        out.extend(_shape_violations(s, units))
    if any(v.kind == "invalid_shape" for v in out):
        return out

    landau = [i for i, s in enumerate(segs) if s.kind == "landau"]
    if landau:
        if len(segs) != 1:
            out.append(
                Violation("landau_not_alone", "a full-line sech barrier must be the only segment", None)
            )
        elif segs[0].interval != (-math.inf, math.inf):
            out.append(Violation("unbounded", "full-line sech barrier must span the whole line"))
        return out

    if segs[0].lo != -math.inf:
        out.append(Violation("unbounded", "first segment must extend to -inf", segs[0].lo))
    if segs[-1].hi != math.inf:
        out.append(Violation("unbounded", "last segment must extend to +inf", segs[-1].hi))
    if segs[0].kind != "free":
        out.append(Violation("outer_not_free", "leftmost segment must be free", segs[0].lo))
    if segs[-1].kind != "free":
        out.append(Violation("outer_not_free", "rightmost segment must be free", segs[-1].hi))

    tol_u = CONTINUITY_TOL * max(p.peak(), 1e-300)
    for left, right in zip(segs, segs[1:]):
        x = left.hi
        pos_tol = 1e-12 * max(1.0, abs(x)) if math.isfinite(x) else 0.0
        if left.hi > right.lo + pos_tol:
            out.append(
                Violation("overlap", f"segments overlap on [{right.lo}, {left.hi}]", right.lo, left.hi - right.lo)
            )
            continue
        if left.hi < right.lo - pos_tol:
            out.append(Violation("gap", f"gap between {left.hi} and {right.lo}", left.hi, right.lo - left.hi))
            continue
        if not math.isfinite(x):
            continue
        jump = abs(left.value(x, units) - right.value(right.lo, units))
        if jump > tol_u:
            out.append(Violation("discontinuity", f"potential jumps by {jump:.3g} at x={x}", x, jump))

    for s in segs:
        if s.kind in ("parabolic", "sech") and math.isfinite(s.lo) and math.isfinite(s.hi):
            lowest = min(s.value(s.lo, units), s.value(s.hi, units))
            if lowest < -tol_u:
                out.append(
                    Violation("negative", f"barrier dips to {lowest:.3g} inside its interval", s.lo, -lowest)
                )
    return out


def ensure_valid(p: CompositePotential) -> None:
    problems = validate(p)
    if problems:
        raise InvalidComposite("; ".join(v.message for v in problems), problems)


# --------------------------------------------------------------------------- JSON

POTENTIAL_SCHEMA = json.loads(
    resources.files("barrierlab").joinpath("schemas/potential.schema.json").read_text(encoding="utf-8")
)


def _interval(doc: dict) -> tuple[float, float] | None:
    if "interval" not in doc:
        return None
    lo, hi = doc["interval"]
    return (-math.inf if lo is None else float(lo), math.inf if hi is None else float(hi))


def potential_from_dict(doc: dict) -> CompositePotential:
    """Build a composite from the JSON document form (schema-checked)."""
    try:
        jsonschema.validate(doc, POTENTIAL_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InvalidParameter(f"potential document rejected: {exc.message}") from exc
    units = unit_system(doc.get("unit_system", "atomic"), doc.get("constants", "rounded"))
    segments = []
    for item in doc["segments"]:
        kind = item["shape"]
        if kind == "free":
            shape: Shape = FREE
        elif kind == "parabolic":
            shape = ParabolicShape(item["alpha"], item["u0"], item.get("gamma", 0.0))
        elif kind == "sech":
            shape = SechShape(item["alpha_inv"], item["u0"], item["beta_shift"], item.get("gamma", 0.0))
        else:
            shape = SechShape(item["alpha_inv"], item["u0"], 0.0, item.get("gamma", 0.0))
        interval = _interval(item)
        if interval is None:
            if kind == "free":
                raise InvalidParameter("free segments need an explicit interval")
            interval = shape.support(units)
        segments.append(PotentialSegment(interval, shape))
    return CompositePotential.from_segments(segments, units)


def load_potential(path: str | Path) -> CompositePotential:
    with open(path, encoding="utf-8") as fh:
        return potential_from_dict(json.load(fh))


def potential_to_dict(p: CompositePotential) -> dict:
    """Inverse of :func:`potential_from_dict`; outer free regions are left implicit."""

    def bound(v):
        return None if math.isinf(v) else v

    items = []
    segs = list(p.segments)
    for i, s in enumerate(segs):
        kind = s.kind
        if kind == "free":
            if i in (0, len(segs) - 1):
                continue
            items.append({"shape": "free", "interval": [bound(s.lo), bound(s.hi)]})
            continue
        sh = s.shape
        if kind == "parabolic":
            item = {"shape": kind, "alpha": sh.alpha, "u0": sh.u0, "gamma": sh.gamma}
        elif kind == "sech":
            item = {"shape": kind, "alpha_inv": sh.alpha_inv, "u0": sh.u0, "beta_shift": sh.beta_shift, "gamma": sh.gamma}
        else:
            item = {"shape": kind, "alpha_inv": sh.alpha_inv, "u0": sh.u0, "gamma": sh.gamma}
        if kind != "landau" and s.interval != sh.support(p.units):
            item["interval"] = [bound(s.lo), bound(s.hi)]
        items.append(item)
    return {"unit_system": p.units.name, "constants": p.units.constants, "segments": items}


def dump_potential(p: CompositePotential, path: str | Path) -> None:
    Path(path).write_text(json.dumps(potential_to_dict(p), indent=2) + "\n", encoding="utf-8")
