import json
import math
from importlib import resources

import jsonschema
import numpy as np
import pytest

from barrierlab.analysis import (
    TRIVIALLY_TRANSPARENT,
    dwell_time,
    find_resonances,
    incoming_current,
    refine_peaks,
)
from barrierlab.errors import InvalidParameter, ZeroEnergy
from barrierlab.multibarrier import solve
from barrierlab.potentials import CompositePotential, ParabolicShape, turning_points
from barrierlab.units import ATOMIC, unit_system

from conftest import RESONANCE

# turning-point dwell times of the double parabola, in atomic time units
DWELL_OFF = (11.5, 2.13e-5, 1.40e-5)
DWELL_ON = (2.40e4, 1.25e5, 2.40e4)


def dwell_triplet(p, e):
    sol = solve(p, e)
    a, b, c, d = turning_points(p, e)
    return [dwell_time(sol, lo, hi).tau for lo, hi in ((a, b), (b, c), (c, d))]


def test_incoming_current():
    assert incoming_current(0.02, ATOMIC) == pytest.approx(0.2, rel=1e-14)
    assert incoming_current(RESONANCE, ATOMIC) == pytest.approx(0.35, abs=5e-3)
    with pytest.raises(ZeroEnergy):
        incoming_current(0.0, ATOMIC)


@pytest.mark.parametrize("e,expected", [(0.02, DWELL_OFF), (RESONANCE, DWELL_ON)])
def test_dwell_table(double_parabola, e, expected):
    for got, want in zip(dwell_triplet(double_parabola, e), expected):
        assert got == pytest.approx(want, rel=0.01)


def test_resonance_dwell_symmetry(double_parabola):
    for e in find_resonances(double_parabola, 0.01, 0.12):
        left, _, right = dwell_triplet(double_parabola, e)
        assert left == pytest.approx(right, rel=0.01)


def test_free_particle():
    sol = solve(CompositePotential.free(), 0.18)
    r = dwell_time(sol, 0.0, 7.5)
    assert r.tau == pytest.approx(7.5 / math.sqrt(0.36), rel=1e-12)
    assert r.tau == r.integral / r.j_in


def test_additive_and_monotone(mixed_pair):
    sol = solve(mixed_pair, 0.3)
    cuts = [-6.0, -4.2, -1.0, 0.5, 2.5, 4.4, 6.0]
    parts = [dwell_time(sol, a, b).tau for a, b in zip(cuts, cuts[1:])]
    whole = dwell_time(sol, cuts[0], cuts[-1]).tau
    assert sum(parts) == pytest.approx(whole, rel=1e-9)
    inner = dwell_time(sol, -1.0, 2.5).tau
    assert 0 <= inner <= dwell_time(sol, -4.2, 2.5).tau <= whole


def test_dwell_errors(double_parabola):
    sol = solve(double_parabola, 0.02)
    with pytest.raises(InvalidParameter):
        dwell_time(sol, 1.0, 1.0)


class TestResonances:
    def test_double_parabola(self, double_parabola):
        found = find_resonances(double_parabola, 0.01, 0.12)
        assert any(abs(e - RESONANCE) <= 1e-6 for e in found)
        detailed = find_resonances(double_parabola, 0.01, 0.12, detailed=True)
        assert all(1 - r.big_t < 1e-6 for r in detailed)

    def test_single_barrier_none(self):
        p = CompositePotential.from_barriers([ParabolicShape(10.0, 0.125)])
        assert find_resonances(p, 0.01, 0.12) == []

    def test_free_sentinel(self):
        assert find_resonances(CompositePotential.free(), 0.01, 0.12) is TRIVIALLY_TRANSPARENT

    def test_other_units(self, double_parabola):
        ev = unit_system("ev_angstrom")
        found = find_resonances(double_parabola, 0.24, 2.88, units=ev)
        assert found == pytest.approx([RESONANCE * 24.0], abs=1e-5)

    def test_refinement_keeps_grid_best(self, double_parabola):
        grid = np.array([0.0611, RESONANCE, 0.0612])
        t = np.array([solve(double_parabola, e).big_t for e in grid])
        (peak,) = refine_peaks(double_parabola, grid, t)
        assert peak.big_t >= t[1]

    @pytest.mark.parametrize("lo,hi,n", [(0.0, 0.1, 10), (0.2, 0.1, 10), (0.01, 0.1, 1)])
    def test_bad_arguments(self, double_parabola, lo, hi, n):
        with pytest.raises(InvalidParameter):
            find_resonances(double_parabola, lo, hi, grid_n=n)


def test_report_schema(double_parabola):
    sol = solve(double_parabola, 0.02)
    doc = dwell_time(sol, -19.0, -1.0).to_dict()
    schema = json.loads(resources.files("barrierlab").joinpath("schemas/dwell_report.schema.json").read_text())
    jsonschema.validate(doc, schema)
    assert doc["unit_system"]["name"] == "atomic"
    assert doc["units"]["tau"]
