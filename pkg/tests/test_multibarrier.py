import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barrierlab import multibarrier
from barrierlab.errors import InvalidComposite, SingularSystem
from barrierlab.multibarrier import (
    _solve_dense,
    interface_residuals,
    probability_density,
    region_bases,
    solve,
    transmission_sweep,
)
from barrierlab.oracle import integrate_scattering
from barrierlab.parabolic import scattering_single
from barrierlab.potentials import CompositePotential, ParabolicShape, SechShape, turning_points
from barrierlab.units import unit_system

from conftest import RESONANCE


def test_free():
    sol = solve(CompositePotential.free(), 0.3)
    assert sol.r == 0 and sol.t == 1 and sol.big_t == 1.0


@pytest.mark.parametrize("e", [0.05, 0.3, 0.9, 2.5])
def test_single_barrier_matches_closed_form(e):
    shape = ParabolicShape(1.5, 1.0, 0.7)
    sol = solve(CompositePotential.from_barriers([shape]), e)
    ref = scattering_single(shape, e)
    assert abs(sol.r - ref.r) <= 1e-10
    assert abs(sol.t - ref.t) <= 1e-10
    (a, b), = sol.interior_coeffs
    assert abs(a - ref.a_coef) <= 1e-9 and abs(b - ref.b_coef) <= 1e-9


def test_resonance(double_parabola):
    sol = solve(double_parabola, RESONANCE)
    assert 1 - sol.big_t <= 1e-6
    assert sol.big_r + sol.big_t == pytest.approx(1.0, abs=1e-9)


class TestDensity:
    def test_far_right_is_transmission(self, double_parabola):
        sol = solve(double_parabola, 0.02)
        for x in (20.0 + 1e-9, 35.0, 400.0):
            assert probability_density(sol, x) == pytest.approx(sol.big_t, rel=1e-12)

    def test_continuous(self, mixed_pair):
        sol = solve(mixed_pair, 0.3)
        for x in mixed_pair.interfaces:
            left = abs(sol.psi(x, mixed_pair.segment_index(x) - 1)[0]) ** 2
            right = abs(sol.psi(x, mixed_pair.segment_index(x))[0]) ** 2
            assert left == pytest.approx(right, rel=1e-9)

    def test_resonant_enhancement(self, double_parabola):
        off, on = solve(double_parabola, 0.02), solve(double_parabola, RESONANCE)
        xs = np.linspace(-20, 20, 801)
        assert max(map(on.density, xs)) > 1e3 * max(map(off.density, xs))


class TestSweep:
    def test_contains_resonance(self, double_parabola):
        grid = [0.05, RESONANCE, 0.08]
        pts = transmission_sweep(double_parabola, grid)
        assert [p.energy for p in pts] == grid
        assert pts[1].big_t >= 1 - 1e-6

    def test_free(self):
        pts = transmission_sweep(CompositePotential.free(), [0.1, 1.0, 10.0])
        assert all(p.big_t == 1.0 for p in pts)

    def test_failures_are_recorded(self, double_parabola):
        pts = transmission_sweep(double_parabola, [0.02, -1.0, 0.03])
        assert pts[0].ok and pts[2].ok
        assert not pts[1].ok and math.isnan(pts[1].big_t) and "ZeroEnergy" in pts[1].error

    @pytest.mark.parametrize("e", [0.08, 0.2, 0.45, 0.7, 1.1])
    def test_mixed_pair_against_oracle(self, mixed_pair, e):
        exact = solve(mixed_pair, e)
        num = integrate_scattering(mixed_pair, e)
        assert abs(exact.big_t - num.big_t) <= 1e-6

    def test_threads_deterministic(self, double_parabola, monkeypatch):
        grid = list(np.linspace(0.01, 0.12, 64))
        serial = transmission_sweep(double_parabola, grid, workers=1)
        parallel = transmission_sweep(double_parabola, grid, workers=8)
        assert serial == parallel
        monkeypatch.setenv("BARRIERLAB_THREADS", "4")
        assert multibarrier.sweep_workers() == 4
        assert transmission_sweep(double_parabola, grid) == serial


random_pairs = st.tuples(
    st.floats(0.5, 6.0), st.floats(0.05, 1.0), st.floats(0.0, 3.0),
    st.floats(0.3, 2.0), st.floats(0.3, 2.0), st.floats(0.05, 0.9),
)


def build(a1, u1, gap, a_inv, u2, frac):
    beta = frac * math.sqrt(2 * u2)
    sech = SechShape(a_inv, u2, beta, 0.0)
    h = sech.half_width()
    return CompositePotential.from_barriers([ParabolicShape(a1, u1, -a1), SechShape(a_inv, u2, beta, gap + h)])


@settings(max_examples=30, deadline=None)
@given(random_pairs, st.floats(0.05, 1.5))
def test_conservation_reciprocity_residual(params, ratio):
    p = build(*params)
    e = ratio * max(b.u0 for b in p.barriers)
    sol = solve(p, e)
    assert sol.big_r + sol.big_t == pytest.approx(1.0, abs=1e-9)
    assert sol.residual <= 1e-10
    j = sol.k * sol.big_t
    for i, seg in enumerate(p.segments):
        lo = seg.lo if math.isfinite(seg.lo) else seg.hi - 1.0
        hi = seg.hi if math.isfinite(seg.hi) else seg.lo + 1.0
        for x in (lo, 0.5 * (lo + hi), hi):
            assert sol.current(x, i) == pytest.approx(j, rel=1e-9, abs=1e-12 * sol.k)
    mirrored = solve(p.mirrored(), e)
    assert mirrored.big_t == pytest.approx(sol.big_t, rel=1e-9, abs=1e-14)


@pytest.mark.parametrize("e", [0.02, RESONANCE, 0.1])
def test_interface_smoothness(double_parabola, mixed_pair, e):
    for p in (double_parabola, mixed_pair):
        for check in interface_residuals(solve(p, e)):
            assert check.ok, check


def test_region_wronskians_constant(mixed_pair):
    for rb in region_bases(mixed_pair, 0.3):
        seg = rb.segment
        lo = seg.lo if math.isfinite(seg.lo) else seg.hi - 5
        hi = seg.hi if math.isfinite(seg.hi) else seg.lo + 5
        ws = [rb.at(x).wronskian for x in np.linspace(lo, hi, 7)]
        assert abs(ws[0]) > 0
        assert max(abs(w - ws[0]) for w in ws) <= 1e-9 * abs(ws[0])


def test_units_do_not_change_coefficients(double_parabola):
    ev = unit_system("ev_angstrom")
    a = solve(double_parabola, 0.05)
    b = solve(double_parabola, 0.05 * 24.0, ev)
    assert b.big_t == pytest.approx(a.big_t, rel=1e-12)
    assert b.big_r == pytest.approx(a.big_r, rel=1e-12)


def test_dense_solver_matches_numpy():
    rng = np.random.default_rng(7)
    for n in (1, 2, 6, 10):
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        b = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert np.allclose(_solve_dense(m, b), np.linalg.solve(m, b), rtol=1e-12, atol=1e-12)
    with pytest.raises(SingularSystem):
        _solve_dense(np.zeros((2, 2)), np.ones(2))


def test_singular_system_reports_condition(double_parabola, monkeypatch):
    monkeypatch.setattr(multibarrier, "COND_LIMIT", 1.0)
    with pytest.raises(SingularSystem) as info:
        solve(double_parabola, 0.02)
    assert info.value.condition > 1.0
    assert info.value.diagnostics["energy"] == 0.02


def test_invalid_composite():
    p = CompositePotential.from_barriers([ParabolicShape(10, 0.125, -5), ParabolicShape(10, 0.125, 5)])
    with pytest.raises(InvalidComposite):
        solve(p, 0.05)


def test_turning_points_bracket_barriers(double_parabola):
    a, b, c, d = turning_points(double_parabola, RESONANCE)
    assert (a, b) == pytest.approx((-17.14695, -2.85305), abs=1e-5)
    assert (c, d) == pytest.approx((2.85305, 17.14695), abs=1e-5)


def test_interface_check_detects_broken_matching(double_parabola):
    from dataclasses import replace

    sol = solve(double_parabola, 0.05)
    coeffs = list(sol.coeffs)
    a, b = coeffs[1]
    coeffs[1] = (a * (1 + 1e-6), b)
    broken = replace(sol, coeffs=coeffs)
    checks = interface_residuals(broken)
    assert not all(c.ok for c in checks)
    assert any(c.c2 > c.c2_tol for c in checks)
