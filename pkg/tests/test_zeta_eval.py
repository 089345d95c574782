import math

import mpmath
import numpy as np
import pytest

from zetalab.core.errors import DomainError, PoleError
from zetalab.models.zeta import ComplexPoint
from zetalab.services.zeta_eval import (
    default_cutoff,
    euler_product_partial,
    functional_equation_residual,
    gamma_fn,
    hardy_z,
    hurwitz_formula_residual,
    hurwitz_zeta,
    locate_zero,
    periodic_zeta,
    zeta_em,
    zeta_grid,
    zeta_prime_em,
    zeta_reflected,
)

ZETA_2 = math.pi ** 2 / 6
SAMPLE_POINTS = [2.0, 0.5 + 14j, 0.3 + 2j, 3 - 7j, 1.0001, 0.5 + 100j, 1 + 1j]
# zeta' ~ -1/(s-1)^2 near the pole, so absolute tolerances exclude it
DERIVATIVE_POINTS = [2.0, 0.5 + 14j, 0.3 + 2j, 3 - 7j, 0.5 + 100j, 1 + 1j]


def mp_zeta(s: complex, derivative: int = 0, a: float = 1.0) -> complex:
    with mpmath.workdps(30):
        return complex(mpmath.zeta(mpmath.mpc(s.real, s.imag), a, derivative))


class TestZetaEM:
    def test_basel(self):
        """Should reproduce zeta(2) = pi^2/6"""
        result = zeta_em(2.0)
        assert abs(result.value - ZETA_2) <= 1e-12
        assert result.err_bound <= 1e-12
        assert result.warning is None

    @pytest.mark.parametrize("s", SAMPLE_POINTS)
    def test_against_mpmath(self, s):
        """Should agree with an independent high-precision evaluation"""
        result = zeta_em(s)
        assert abs(result.value - mp_zeta(s)) <= 1e-9
        assert result.err_bound >= 0

    @pytest.mark.parametrize("s", DERIVATIVE_POINTS)
    def test_derivative_against_mpmath(self, s):
        """Should give zeta'(s)"""
        assert abs(zeta_prime_em(s).value - mp_zeta(s, derivative=1)) <= 1e-8

    def test_accepts_complex_point(self):
        """Should accept ComplexPoint and bare numbers alike"""
        assert zeta_em(ComplexPoint(sigma=0.5, t=14.0)).value == zeta_em(0.5 + 14j).value

    def test_small_cutoff_with_auto_extra_terms(self):
        """Should stay accurate when the cutoff is tiny by summing interval integrals"""
        result = zeta_em(2.0, n_cutoff=2)
        assert result.extra_terms > 0
        assert abs(result.value - ZETA_2) <= 1e-10

    def test_small_cutoff_derivative(self):
        """Should differentiate the interval integrals correctly"""
        result = zeta_prime_em(0.5 + 3j, n_cutoff=3)
        assert result.extra_terms > 0
        assert abs(result.value - mp_zeta(0.5 + 3j, derivative=1)) <= 1e-8

    def test_flags_accuracy_shortfall(self):
        """Should attach a warning when err_bound exceeds the tolerance"""
        result = zeta_em(2.0, n_cutoff=2, extra_terms=0, tol=1e-30)
        assert result.warning is not None
        assert result.err_bound > 1e-30

    def test_error_bound_decreases_with_cutoff(self):
        """Should not report a larger bound when the cutoff doubles"""
        s = 0.5 + 20j
        coarse = zeta_em(s, n_cutoff=10, extra_terms=0)
        fine = zeta_em(s, n_cutoff=20, extra_terms=0)
        assert fine.err_bound <= coarse.err_bound

    @pytest.mark.parametrize("s", SAMPLE_POINTS)
    def test_error_within_bound(self, s):
        """Should never be further from the true value than err_bound"""
        result = zeta_em(s)
        assert abs(result.value - mp_zeta(s)) <= result.err_bound
        assert result.err_bound == pytest.approx(result.truncation_bound + result.rounding_bound)

    @pytest.mark.parametrize("n_cutoff", [10, 30, 200])
    @pytest.mark.parametrize("s", [2.0, 0.5 + 14j, 0.3 + 2j, 3 - 7j, 0.5 + 100j])
    def test_doubling_cutoff(self, s, n_cutoff):
        """Should move by at most err_bound and never widen the truncation bound when N doubles"""
        coarse = zeta_em(s, n_cutoff=n_cutoff)
        fine = zeta_em(s, n_cutoff=2 * n_cutoff)
        assert coarse.n_cutoff + coarse.extra_terms <= fine.n_cutoff + fine.extra_terms
        assert fine.truncation_bound <= coarse.truncation_bound
        assert abs(fine.value - coarse.value) <= coarse.err_bound

    def test_crude_tail_bound(self):
        """Should report the first-order tail bound alongside the sharp one"""
        result = zeta_em(2.0)
        assert result.crude_tail_bound == pytest.approx(2.0 * 30 ** -2 / 2.0)
        assert result.crude_tail_bound >= result.err_bound

    def test_default_cutoff(self):
        """Should use max(30, ceil(2|t|))"""
        assert default_cutoff(0.0) == 30
        assert default_cutoff(-100.2) == 201

    @pytest.mark.parametrize("s", [1.0, 0.0, -1 + 2j])
    def test_domain(self, s):
        """Should reject the pole and sigma <= 0"""
        with pytest.raises(DomainError):
            zeta_em(s)


class TestHurwitz:
    @pytest.mark.parametrize("s", [2.0, 0.5 + 3j, 1.5 - 10j])
    def test_against_mpmath(self, s):
        """Should agree with zeta(s, a)"""
        assert abs(hurwitz_zeta(s, 0.3).value - mp_zeta(s, a=0.3)) <= 1e-9

    def test_a_equal_one_is_riemann(self):
        """Should reduce to zeta(s) at a = 1"""
        assert abs(hurwitz_zeta(0.5 + 14j, 1.0).value - zeta_em(0.5 + 14j).value) <= 1e-10

    def test_domain(self):
        """Should reject a outside (0, 1]"""
        with pytest.raises(DomainError):
            hurwitz_zeta(2.0, 0.0)
        with pytest.raises(DomainError):
            hurwitz_zeta(2.0, 1.5)

    def test_formula_residual(self):
        """Should balance both sides of Hurwitz's formula on sigma = 1"""
        diagnostic = hurwitz_formula_residual(0.3, 1.2 + 2j, n_terms=200_000)
        assert not diagnostic.diverged
        assert diagnostic.residual <= 1e-4
        assert len(diagnostic.eps) == 4
        assert diagnostic.eps[0] == pytest.approx(0.2)


class TestPeriodicZeta:
    def test_integer_shift_is_zeta(self):
        """Should reduce to zeta(s) for integer x within its tail bound"""
        result = periodic_zeta(0.0, 2.0, n_terms=100_000)
        assert abs(result.value - ZETA_2) <= result.err_bound

    def test_half_shift_is_alternating(self):
        """Should give -eta(2) = -pi^2/12 at x = 1/2, and be 1-periodic in x"""
        half = periodic_zeta(0.5, 2.0, n_terms=100_000)
        assert abs(half.value + ZETA_2 / 2) <= 1e-4
        assert abs(periodic_zeta(1.5, 2.0, n_terms=100_000).value - half.value) <= 1e-12

    def test_domain(self):
        """Should require sigma > 1"""
        with pytest.raises(DomainError):
            periodic_zeta(0.3, 1.0)


class TestGamma:
    def test_real_values(self):
        """Should match factorials and half-integer values"""
        assert gamma_fn(5.0).real == pytest.approx(24.0, rel=1e-12)
        assert gamma_fn(0.5).real == pytest.approx(math.sqrt(math.pi), rel=1e-12)
        assert gamma_fn(-0.5).real == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-12)

    @pytest.mark.parametrize("s", [1 + 2j, 0.2 - 3j, -2.5 + 1j, 10 + 10j])
    def test_complex_values(self, s):
        """Should agree with mpmath across the plane"""
        expected = complex(mpmath.gamma(mpmath.mpc(s.real, s.imag)))
        assert abs(gamma_fn(s) - expected) <= 1e-10 * abs(expected)

    @pytest.mark.parametrize("s", [0.0, -1.0, -3.0])
    def test_poles(self, s):
        """Should raise PoleError at nonpositive integers"""
        with pytest.raises(PoleError):
            gamma_fn(s)


class TestFunctionalEquation:
    @pytest.mark.parametrize("s", [0.5 + 5j, 0.25 + 1j, 0.8 - 20j])
    def test_residual_small(self, s):
        """Should satisfy the functional equation inside the strip"""
        assert functional_equation_residual(s) <= 1e-9

    def test_domain(self):
        """Should only run for 0 < sigma < 1"""
        with pytest.raises(DomainError):
            functional_equation_residual(1.5)

    def test_reflected_values(self):
        """Should continue zeta to sigma <= 0"""
        assert zeta_reflected(-1.0).value.real == pytest.approx(-1.0 / 12.0, abs=1e-12)
        assert abs(zeta_reflected(-2.0).value) <= 1e-12
        assert zeta_reflected(0.0).value == complex(-0.5)

    def test_reflected_against_mpmath(self):
        """Should agree with mpmath off the real axis"""
        s = -1.5 + 4j
        assert abs(zeta_reflected(s).value - mp_zeta(s)) <= 1e-9 * max(1.0, abs(mp_zeta(s)))

    def test_reflected_domain(self):
        """Should refuse sigma > 0"""
        with pytest.raises(DomainError):
            zeta_reflected(0.5)


class TestCriticalLine:
    def test_first_zero(self):
        """Should locate the first zero at t ~ 14.134725"""
        assert locate_zero(14.0, 14.3) == pytest.approx(14.134725141734693, abs=1e-6)

    def test_no_sign_change(self):
        """Should raise DomainError when Z keeps its sign"""
        with pytest.raises(DomainError):
            locate_zero(15.0, 16.0)

    def test_hardy_z_domain(self):
        """Should require t >= 10"""
        with pytest.raises(DomainError):
            hardy_z(5.0)


class TestZetaGrid:
    def test_matches_pointwise(self):
        """Should agree with single-point evaluation"""
        t = np.array([0.5, 3.0, 14.0, 100.0, 700.0])
        values, derivs, bounds = zeta_grid(0.7, t)
        for i, ti in enumerate(t):
            assert abs(values[i] - zeta_em(0.7 + 1j * ti).value) <= 1e-10
            assert abs(derivs[i] - zeta_prime_em(0.7 + 1j * ti).value) <= 1e-8
        assert np.all(bounds >= 0)

    def test_broadcasts_sigma(self):
        """Should accept a sigma array shaped like t"""
        sigma = np.array([[1.5, 2.0], [0.6, 3.0]])
        t = np.array([[1.0, 2.0], [30.0, 0.0]])
        values, _, _ = zeta_grid(sigma, t)
        assert values.shape == (2, 2)
        assert abs(values[1, 1] - mp_zeta(3.0)) <= 1e-10

    def test_threads_do_not_change_results(self):
        """Should give bitwise identical values on one thread or several"""
        t = np.linspace(-1000.0, 1000.0, 801)
        single = zeta_grid(1.0, t + 0.5, threads=1)
        pooled = zeta_grid(1.0, t + 0.5, threads=4)
        for a, b in zip(single, pooled):
            assert np.array_equal(a, b)

    def test_no_zeros_right_of_one(self):
        """Should stay clear of zero on 1.1 <= sigma <= 3, |t| <= 50, beyond its error bound"""
        sigma, t = np.meshgrid(np.linspace(1.1, 3.0, 12), np.linspace(-50.0, 50.0, 201))
        values, _, bounds = zeta_grid(sigma, t)
        # |zeta(s)| >= zeta(2 sigma) / zeta(sigma) > 0.14 there
        assert np.min(np.abs(values) - bounds) > 0.1

    def test_rejects_pole(self):
        """Should raise DomainError when s = 1 is on the grid"""
        with pytest.raises(DomainError):
            zeta_grid(1.0, np.array([0.0, 1.0]))


class TestEulerProduct:
    def test_converges_to_zeta(self, small_table):
        """Should approach zeta(2) as more primes are included"""
        coarse = abs(euler_product_partial(2.0, 1000, small_table) - ZETA_2)
        fine = abs(euler_product_partial(2.0, 10_000, small_table) - ZETA_2)
        assert fine < coarse
        assert fine <= 1e-4 * ZETA_2

    def test_domain(self, small_table):
        """Should require sigma > 1"""
        with pytest.raises(DomainError):
            euler_product_partial(1.0, 100, small_table)
