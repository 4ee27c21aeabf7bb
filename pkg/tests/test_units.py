import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from barrierlab.errors import InvalidParameter, ZeroEnergy
from barrierlab.units import (
    ATOMIC,
    UNIT_SYSTEM_NAMES,
    convert,
    parabolic_beta,
    restore_units,
    unit_system,
    wavenumber,
)

SI = unit_system("si")
EV = unit_system("ev_angstrom")


def test_atomic_preset():
    assert ATOMIC.hbar == 1.0 and ATOMIC.mass == 1.0
    assert ATOMIC.kinetic_factor == 2.0


def test_rounded_constants():
    assert convert(3.0, "energy", EV, ATOMIC) == pytest.approx(0.125, rel=1e-14)
    assert convert(10.0, "length", EV, ATOMIC) == pytest.approx(20.0, rel=1e-14)


def test_codata_constants():
    ev = unit_system("ev", "codata")
    au = unit_system("atomic", "codata")
    assert convert(1.0, "energy", au, ev) == pytest.approx(27.211386, rel=1e-7)
    assert convert(1.0, "length", au, ev) == pytest.approx(0.529177210903, rel=1e-12)


def test_identity():
    params = {"u0": 0.125, "alpha": 10.0, "energy": 0.02}
    assert restore_units(params, ATOMIC) == params


@given(st.floats(1e-6, 1e6), st.sampled_from(["energy", "length", "time", "velocity", "inverse_length"]))
def test_round_trip(value, quantity):
    there = convert(value, quantity, ATOMIC, SI)
    back = convert(there, quantity, SI, ATOMIC)
    assert back == pytest.approx(value, rel=1e-12)


def test_restore_round_trip_and_unknown_names():
    params = {"u0": 0.125, "alpha": 10.0, "gamma": -10.0, "tau": 11.5}
    si = restore_units(params, SI)
    assert restore_units(si, ATOMIC, source=SI) == pytest.approx(params, rel=1e-12)
    with pytest.raises(InvalidParameter):
        restore_units({"mystery": 1.0}, SI)
    assert restore_units({"mystery": 1.0}, SI, quantities={"mystery": "dimensionless"}) == {"mystery": 1.0}


def test_substitutions_are_unit_independent():
    # k * alpha and beta * alpha**2 are dimensionless and must not depend on units
    u0, alpha, e = 0.125, 10.0, 0.02
    for target in (SI, EV):
        v = restore_units({"u0": u0, "alpha": alpha, "energy": e}, target)
        assert wavenumber(v["energy"], target) * v["alpha"] == pytest.approx(wavenumber(e) * alpha, rel=1e-12)
        assert parabolic_beta(v["alpha"], v["u0"], target) * v["alpha"] ** 2 == pytest.approx(
            parabolic_beta(alpha, u0) * alpha**2, rel=1e-12
        )


def test_hartree_consistency():
    # hartree = hbar**2 / (m a0**2) holds in SI for both constant sets
    for constants in ("rounded", "codata"):
        au, si = unit_system("atomic", constants), unit_system("si", constants)
        lhs = au.energy_unit.si_scale
        rhs = si.hbar**2 / (si.mass * au.length_unit.si_scale**2)
        assert lhs == pytest.approx(rhs, rel=1e-14)


def test_presets_and_errors():
    for name in UNIT_SYSTEM_NAMES:
        u = unit_system(name)
        assert u.hbar > 0 and u.mass > 0
    assert unit_system("hartree") == ATOMIC
    with pytest.raises(InvalidParameter):
        unit_system("furlong")
    with pytest.raises(InvalidParameter):
        unit_system("atomic", "made-up")
    with pytest.raises(InvalidParameter):
        ATOMIC.si_scale("colour")
    with pytest.raises(ZeroEnergy):
        wavenumber(0.0)


def test_dimensionless_velocity():
    # sqrt(2E/m) in SI equals the atomic value times the atomic velocity unit
    e = 0.02
    v_au = math.sqrt(2 * e / ATOMIC.mass)
    e_si = convert(e, "energy", ATOMIC, SI)
    v_si = math.sqrt(2 * e_si / SI.mass)
    assert convert(v_au, "velocity", ATOMIC, SI) == pytest.approx(v_si, rel=1e-12)
