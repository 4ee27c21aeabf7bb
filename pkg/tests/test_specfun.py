import cmath
import math
import random

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barrierlab.errors import InvalidParameter, NonConvergence, PoleError
from barrierlab.specfun import (
    SeriesControl,
    gamma,
    gauss_f,
    gauss_f_deriv,
    kummer_m,
    kummer_m_deriv,
    log_gamma,
    real_power_ratio,
    rgamma,
    weber_even,
    weber_odd,
)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


class TestKummer:
    @pytest.mark.parametrize("a,b", [(0.3, 0.5), (1 + 2j, 1.5), (-2.5j, 3.0)])
    def test_zero_argument(self, a, b):
        assert kummer_m(a, b, 0) == 1

    def test_exponential(self):
        assert kummer_m(1, 1, 1) == pytest.approx(math.e, rel=1e-15)

    def test_against_mpmath(self):
        rng = random.Random(7)
        for _ in range(200):
            a = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            b = rng.choice([0.5, 1.5, 2.5, complex(1.2, 0.4)])
            z = cmath.rect(rng.uniform(0, 6), rng.uniform(-math.pi, math.pi))
            ref = complex(mp.hyp1f1(a, b, z))
            assert abs(kummer_m(a, b, z) - ref) <= 1e-11 * max(1.0, abs(ref))

    def test_barrier_parameters(self):
        # alpha = 0.5, U0 = 1, k = 1, x = 0.25; reference from mpmath at 30 digits
        alpha, u0, k, x = 0.5, 1.0, 1.0, 0.25
        beta = math.sqrt(2 * u0) / alpha
        a = (1 + 1j * k * k / beta - 1j * alpha * alpha * beta) / 4
        m = kummer_m(a, 0.5, 1j * beta * x * x)
        assert rel(m, 1.0247562633320781 + 0.090813128645609273j) < 1e-14
        psi = cmath.exp(-0.5j * beta * x * x) * m
        weber_a = (beta * beta * alpha * alpha - k * k) / (2 * beta)
        w = weber_even(weber_a, math.sqrt(2 * beta) * x)
        assert abs(psi.imag) < 1e-14
        assert psi.real == pytest.approx(w, rel=1e-14)
        assert w == pytest.approx(1.0287722894658115, rel=1e-14)

    def test_derivative_identity(self):
        a, b, z = 0.3 + 0.7j, 0.5, 2.0j
        h = 1e-5
        fd = (kummer_m(a, b, z + h) - kummer_m(a, b, z - h)) / (2 * h)
        assert abs(kummer_m_deriv(a, b, z) - fd) < 1e-9

    def test_polynomial_case(self):
        # (a)_n vanishes for a = -2: M(-2, b, z) = 1 - 2z/b + z^2/(b(b+1))
        b, z = 1.5, 0.7
        assert kummer_m(-2, b, z) == pytest.approx(1 - 2 * z / b + z * z / (b * (b + 1)), rel=1e-15)

    def test_forbidden_b(self):
        with pytest.raises(InvalidParameter):
            kummer_m(1, -2, 0.5)

    def test_term_budget(self):
        with pytest.raises(NonConvergence):
            kummer_m(1, 1, 5, SeriesControl(max_terms=3))

    def test_cancellation_guard(self):
        with pytest.raises(NonConvergence):
            kummer_m(1, 1, -40)

    @pytest.mark.parametrize("rel_tol,max_terms", [(0, 10), (-1e-3, 10), (1e-14, 0)])
    def test_control_validation(self, rel_tol, max_terms):
        with pytest.raises(InvalidParameter):
            SeriesControl(rel_tol, max_terms)


class TestGauss:
    def test_zero_argument(self):
        assert gauss_f(0.2 + 1j, -0.7, 1 - 0.3j, 0) == 1

    def test_binomial(self):
        assert gauss_f(2, 0.77, 0.77, 0.3) == pytest.approx(1 / 0.49, rel=1e-14)

    def test_legendre_argument(self):
        # -nu, nu + 1, 1 - mu at U0 = 1, alpha = 1, k = 1, xi = 0.5 (mpmath reference)
        nu = complex(-0.5, 0.5 * math.sqrt(7.0))
        val = gauss_f(-nu, nu + 1, 1 - 1j, 0.25)
        assert rel(val, 1.2736862297180051 + 0.34595881449832163j) < 1e-14

    def test_legendre_argument_from_ode(self):
        # F(z) solves z(1-z)F'' + [c - (a+b+1)z]F' - abF = 0; integrate it from z=0
        # with F(0)=1, F'(0)=ab/c as an independent check of the series.
        from scipy.integrate import solve_ivp

        nu = complex(-0.5, 0.5 * math.sqrt(7.0))
        a, b, c = -nu, nu + 1, 1 - 1j
        z0 = 1e-6
        f0 = 1 + a * b / c * z0
        d0 = a * b / c * (1 + (a + 1) * (b + 1) / (c + 1) * z0)

        def rhs(z, y):
            f = y[0] + 1j * y[1]
            d = y[2] + 1j * y[3]
            dd = ((a + b + 1) * z * d - c * d + a * b * f) / (z * (1 - z))
            return [d.real, d.imag, dd.real, dd.imag]

        sol = solve_ivp(rhs, (z0, 0.25), [f0.real, f0.imag, d0.real, d0.imag], rtol=1e-12, atol=1e-14)
        ode = complex(sol.y[0, -1], sol.y[1, -1])
        assert abs(gauss_f(a, b, c, 0.25) - ode) < 1e-9

    def test_against_mpmath(self):
        rng = random.Random(11)
        for _ in range(200):
            a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            b = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            c = complex(rng.uniform(0.2, 3), rng.uniform(-2, 2))
            z = cmath.rect(rng.uniform(0, 0.6), rng.uniform(-math.pi, math.pi))
            ref = complex(mp.hyp2f1(a, b, c, z))
            assert abs(gauss_f(a, b, c, z) - ref) <= 1e-12 * max(1.0, abs(ref))

    def test_tolerance_refinement(self):
        args = (0.4 - 1j, 0.6 + 1j, 1 - 0.8j, 0.45)
        coarse = gauss_f(*args, SeriesControl(rel_tol=1e-10))
        fine = gauss_f(*args, SeriesControl(rel_tol=1e-11))
        assert abs(coarse - fine) <= 10 * 1e-10 * abs(fine)

    def test_derivative(self):
        a, b, c, z = 0.3, -0.2 + 1j, 1 - 1j, 0.3
        h = 1e-6
        fd = (gauss_f(a, b, c, z + h) - gauss_f(a, b, c, z - h)) / (2 * h)
        assert abs(gauss_f_deriv(a, b, c, z) - fd) < 1e-8

    def test_refuses_outside_margin(self):
        with pytest.raises(NonConvergence):
            gauss_f(0.5, 0.5, 1.5, 0.96)

    def test_forbidden_c(self):
        with pytest.raises(InvalidParameter):
            gauss_f(1, 1, 0, 0.1)


class TestLogGamma:
    def test_one(self):
        assert abs(log_gamma(1)) < 1e-15

    def test_half(self):
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-15)

    def test_reflection(self):
        rng = random.Random(3)
        for _ in range(100):
            z = cmath.rect(rng.uniform(0.5, 10), rng.uniform(-math.pi, math.pi))
            if abs(z.imag) < 1e-3:
                continue
            lhs = cmath.exp(log_gamma(z) + log_gamma(1 - z))
            rhs = math.pi / cmath.sin(math.pi * z)
            assert abs(lhs - rhs) <= 1e-12 * abs(rhs)

    def test_principal_branch(self):
        rng = random.Random(5)
        for _ in range(300):
            z = complex(rng.uniform(-30, 60), rng.uniform(-60, 60))
            ref = complex(mp.loggamma(z))
            assert abs(log_gamma(z) - ref) <= 1e-12 * max(1.0, abs(ref))

    @pytest.mark.parametrize("z", [0, -1, -7])
    def test_poles(self, z):
        with pytest.raises(PoleError):
            log_gamma(z)

    def test_gamma_and_reciprocal(self):
        assert gamma(5) == pytest.approx(24, rel=1e-14)
        assert rgamma(-3) == 0
        assert rgamma(0.5) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


class TestWeber:
    @given(st.floats(-20, 20))
    def test_initial_values(self, a):
        assert weber_even(a, 0.0) == 1.0
        assert weber_odd(a, 0.0) == 0.0

    @given(st.floats(-5, 5), st.floats(0, 6))
    @settings(max_examples=200)
    def test_parity_exact(self, a, z):
        assert weber_even(a, -z) == weber_even(a, z)
        assert weber_odd(a, -z) == -weber_odd(a, z)

    def test_parity_example(self):
        assert weber_even(0.7, -1.3) == weber_even(0.7, 1.3)
        assert weber_odd(0.7, -1.3) == -weber_odd(0.7, 1.3)

    def test_matches_complex_path(self):
        a, z = 1.2, 0.9
        complex_e = cmath.exp(-0.25j * z * z) * kummer_m(0.25 - 0.5j * a, 0.5, 0.5j * z * z)
        assert abs(complex_e.imag) <= 1e-13
        assert abs(complex_e.real - weber_even(a, z)) <= 10 * 1e-14 * abs(complex_e)

    @given(st.floats(-4, 4), st.floats(-4, 4))
    @settings(max_examples=100, deadline=None)
    def test_dual_path(self, a, z):
        phase = cmath.exp(-0.25j * z * z)
        e = phase * kummer_m(0.25 - 0.5j * a, 0.5, 0.5j * z * z)
        o = z * phase * kummer_m(0.75 - 0.5j * a, 1.5, 0.5j * z * z)
        we, wo = weber_even(a, z), weber_odd(a, z)
        scale_e, scale_o = max(1.0, abs(we)), max(1.0, abs(wo))
        assert abs(e.imag) <= 1e-10 * scale_e and abs(e.real - we) <= 1e-10 * scale_e
        assert abs(o.imag) <= 1e-10 * scale_o and abs(o.real - wo) <= 1e-10 * scale_o

    @pytest.mark.parametrize("fn", [weber_even, weber_odd])
    def test_ode_residual(self, fn):
        # centred difference error ~ h^2/12 w'''' plus roundoff ~ 4 eps |w| / h^2
        a, h = 0.8, 1e-3
        for z in [i * 0.25 - 2.4 for i in range(20)]:
            w = fn(a, z)
            second = (fn(a, z + h) - 2 * w + fn(a, z - h)) / (h * h)
            residual = second + (z * z / 4 - a) * w
            assert abs(residual) <= 1e-6 * max(1.0, abs(w))


def test_real_power_ratio():
    xi, mu = 0.3, 0.4 + 1.1j
    direct = ((1 + xi) / (1 - xi)) ** mu
    assert abs(real_power_ratio(xi, mu) - direct) < 1e-15
    with pytest.raises(InvalidParameter):
        real_power_ratio(1.0, 1)
