"""
Unit systems and conversions.

Formulas throughout the package are written with explicit ``hbar`` and
``mass`` taken from a :class:`UnitSystem`, so the same code runs in atomic
units (``hbar = m = 1``), SI, or an eV/angstrom/fs system. Each unit system
records the SI size of its energy, length and time units; ``hbar`` and
``mass`` are expressed in the system's own units.

Two constant sets are available. ``"rounded"`` (the default) uses the rounded values
``hbar = 1e-34 J s``, ``m_e = 1e-30 kg``, ``1 bohr = 0.5 angstrom`` and
``1 hartree = 24 eV`` so that ``3 eV -> 0.125 hartree`` and
``10 angstrom -> 20 bohr`` exactly. ``"codata"`` uses CODATA 2018 values.
In both sets the hartree is derived as ``hbar**2 / (m_e a0**2)`` so that the
atomic and SI systems are mutually consistent to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import InvalidParameter, ZeroEnergy

__all__ = [
    "Unit",
    "UnitSystem",
    "CONSTANTS",
    "ATOMIC",
    "unit_system",
    "UNIT_SYSTEM_NAMES",
    "convert",
    "restore_units",
    "wavenumber",
    "parabolic_beta",
    "QUANTITY_DIMENSIONS",
    "PARAMETER_QUANTITIES",
]

# SI values: hbar [J s], electron mass [kg], bohr [m], electronvolt [J].
CONSTANTS: dict[str, dict[str, float]] = {
    "rounded": {
        "hbar": 1e-34,
        "m_e": 1e-30,
        "bohr": 0.5e-10,
        "eV": 1e-34**2 / (1e-30 * 0.5e-10**2) / 24.0,
    },
    "codata": {
        "hbar": 1.054571817e-34,
        "m_e": 9.1093837015e-31,
        "bohr": 5.29177210903e-11,
        "eV": 1.602176634e-19,
    },
}

# Exponents of (energy, length, time) for each physical quantity.
QUANTITY_DIMENSIONS: dict[str, tuple[int, int, int]] = {
    "dimensionless": (0, 0, 0),
    "energy": (1, 0, 0),
    "length": (0, 1, 0),
    "time": (0, 0, 1),
    "inverse_length": (0, -1, 0),
    "velocity": (0, 1, -1),
    "action": (1, 0, 1),
    "mass": (1, -2, 2),
}

# Default quantity for parameter names used across the package.
PARAMETER_QUANTITIES: dict[str, str] = {
    "u0": "energy",
    "energy": "energy",
    "e": "energy",
    "e_min": "energy",
    "e_max": "energy",
    "alpha": "length",
    "gamma": "length",
    "x": "length",
    "x1": "length",
    "x2": "length",
    "alpha_inv": "inverse_length",
    "beta_shift": "inverse_length",
    "k": "inverse_length",
    "beta": "inverse_length",
    "tau": "time",
    "j_in": "velocity",
    "hbar": "action",
    "mass": "mass",
}


@dataclass(frozen=True)
class Unit:
    name: str
    si_scale: float

    def __post_init__(self):
        if not self.si_scale > 0:
            raise InvalidParameter(f"unit {self.name!r} needs a positive SI scale")


@dataclass(frozen=True)
class UnitSystem:
    """``hbar`` and ``mass`` in the system's own units plus the unit sizes."""

    name: str
    hbar: float
    mass: float
    energy_unit: Unit
    length_unit: Unit
    time_unit: Unit
    constants: str = field(default="rounded")

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise InvalidParameter("hbar and mass must be positive")

    @property
    def kinetic_factor(self) -> float:
        """``2 m / hbar**2``: converts an energy into a squared wavenumber."""
        return 2.0 * self.mass / (self.hbar * self.hbar)

    def si_scale(self, quantity: str) -> float:
        try:
            pe, pl, pt = QUANTITY_DIMENSIONS[quantity]
        except KeyError:
            raise InvalidParameter(f"unknown quantity {quantity!r}") from None
        return (
            self.energy_unit.si_scale**pe
            * self.length_unit.si_scale**pl
            * self.time_unit.si_scale**pt
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "constants": self.constants,
            "hbar": self.hbar,
            "mass": self.mass,
            "energy_unit": self.energy_unit.name,
            "length_unit": self.length_unit.name,
            "time_unit": self.time_unit.name,
        }


def _atomic(constants: str) -> UnitSystem:
    c = CONSTANTS[constants]
    hartree = c["hbar"] ** 2 / (c["m_e"] * c["bohr"] ** 2)
    return UnitSystem(
        name="atomic",
        hbar=1.0,
        mass=1.0,
        energy_unit=Unit("hartree", hartree),
        length_unit=Unit("bohr", c["bohr"]),
        time_unit=Unit("aut", c["hbar"] / hartree),
        constants=constants,
    )


def _si(constants: str) -> UnitSystem:
    c = CONSTANTS[constants]
    return UnitSystem(
        name="si",
        hbar=c["hbar"],
        mass=c["m_e"],
        energy_unit=Unit("J", 1.0),
        length_unit=Unit("m", 1.0),
        time_unit=Unit("s", 1.0),
        constants=constants,
    )


def _ev_angstrom(constants: str) -> UnitSystem:
    c = CONSTANTS[constants]
    ev, ang, fs = c["eV"], 1e-10, 1e-15
    return UnitSystem(
        name="ev_angstrom",
        hbar=c["hbar"] / (ev * fs),
        mass=c["m_e"] * ang**2 / (ev * fs**2),
        energy_unit=Unit("eV", ev),
        length_unit=Unit("angstrom", ang),
        time_unit=Unit("fs", fs),
        constants=constants,
    )


def _natural(constants: str) -> UnitSystem:
    # hbar = m = 1 with unnamed reference scales; SI sizes borrowed from atomic.
    a = _atomic(constants)
    return UnitSystem(
        name="natural",
        hbar=1.0,
        mass=1.0,
        energy_unit=Unit("energy", a.energy_unit.si_scale),
        length_unit=Unit("length", a.length_unit.si_scale),
        time_unit=Unit("time", a.time_unit.si_scale),
        constants=constants,
    )


_BUILDERS = {
    "atomic": _atomic,
    "hartree": _atomic,
    "au": _atomic,
    "si": _si,
    "ev_angstrom": _ev_angstrom,
    "ev": _ev_angstrom,
    "natural": _natural,
}

UNIT_SYSTEM_NAMES = tuple(sorted(_BUILDERS))


def unit_system(name: str = "atomic", constants: str = "rounded") -> UnitSystem:
    """Look up a preset unit system by name (``hartree`` and ``au`` alias ``atomic``)."""
    try:
        builder = _BUILDERS[name.lower()]
    except KeyError:
        raise InvalidParameter(
            f"unknown unit system {name!r}; choose from {', '.join(UNIT_SYSTEM_NAMES)}"
        ) from None
    if constants not in CONSTANTS:
        raise InvalidParameter(f"unknown constant set {constants!r}")
    return builder(constants)


ATOMIC = unit_system("atomic")


def convert(value: float, quantity: str, source: UnitSystem, target: UnitSystem) -> float:
    """Rescale ``value`` of the given quantity from ``source`` units to ``target`` units."""
    return value * source.si_scale(quantity) / target.si_scale(quantity)


def restore_units(
    params: Mapping[str, float],
    target: UnitSystem,
    source: UnitSystem = ATOMIC,
    quantities: Mapping[str, str] | None = None,
) -> dict[str, float]:
    """Convert a mapping of named parameters between unit systems.

    Parameter names are mapped to physical quantities through
    ``PARAMETER_QUANTITIES`` unless overridden by ``quantities``. Unknown
    names raise :class:`InvalidParameter` rather than passing through
    silently.
    """
    lookup = dict(PARAMETER_QUANTITIES)
    if quantities:
        lookup.update(quantities)
    out = {}
    for key, value in params.items():
        quantity = lookup.get(key.lower()) if key not in lookup else lookup[key]
        if quantity is None:
            raise InvalidParameter(f"no quantity known for parameter {key!r}")
        out[key] = convert(value, quantity, source, target)
    return out


def wavenumber(energy: float, units: UnitSystem = ATOMIC) -> float:
    """``k = sqrt(2 m E) / hbar``."""
    if energy <= 0:
        raise ZeroEnergy(f"wavenumber requires E > 0, got {energy!r}")
    return math.sqrt(units.kinetic_factor * energy)


def parabolic_beta(alpha: float, u0: float, units: UnitSystem = ATOMIC) -> float:
    """``beta = sqrt(2 m U0) / (hbar alpha)`` for a parabolic barrier."""
    return math.sqrt(units.kinetic_factor * u0) / alpha
