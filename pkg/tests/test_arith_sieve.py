import math

import numpy as np
import pytest

from zetalab.core.config import RunConfig, activate_settings
from zetalab.core.errors import CapacityError, DomainError, RangeError
from zetalab.services.arith_sieve import (
    abel_identity_check,
    build_table,
    chebyshev_psi,
    chebyshev_theta,
    chebyshev_values,
    prime_pi,
    psi1,
    psi_integral,
    psi_via_theta,
    table_frame,
    tauberian_inequality_check,
    tauberian_lower_check,
    tauberian_sandwich,
)


class TestBuildTable:
    def test_mangoldt_values(self, small_table):
        """Should give log p on prime powers and zero elsewhere"""
        assert small_table.mangoldt[1] == 0.0
        assert small_table.mangoldt[6] == 0.0
        assert small_table.mangoldt[8] == pytest.approx(math.log(2))
        assert small_table.mangoldt[9] == pytest.approx(math.log(3))
        assert small_table.mangoldt[9973] == pytest.approx(math.log(9973))

    def test_mobius_values(self, small_table):
        """Should match the Moebius function on small arguments"""
        expected = {1: 1, 2: -1, 4: 0, 6: 1, 12: 0, 30: -1, 210: 1}
        for n, mu in expected.items():
            assert small_table.mobius[n] == mu

    def test_liouville_values(self, small_table):
        """Should give (-1)^Omega(n)"""
        expected = {1: 1, 2: -1, 4: 1, 8: -1, 12: -1, 36: 1}
        for n, lam in expected.items():
            assert small_table.liouville[n] == lam

    def test_tables_are_read_only(self, small_table):
        """Should refuse writes into the shared arrays"""
        with pytest.raises(ValueError):
            small_table.mangoldt[2] = 0.0

    def test_smallest_table(self):
        """Should handle n_max = 1"""
        table = build_table(1)
        assert table.limit == 1
        assert chebyshev_psi(table, 1) == 0.0

    def test_rejects_nonpositive_limit(self):
        """Should raise DomainError for n_max < 1"""
        with pytest.raises(DomainError):
            build_table(0)

    def test_respects_memory_budget(self):
        """Should raise CapacityError beyond MAX_SIEVE_LIMIT"""
        activate_settings(RunConfig(MAX_SIEVE_LIMIT=100))
        with pytest.raises(CapacityError):
            build_table(1000)


class TestChebyshev:
    def test_small_values(self, small_table):
        """Should reproduce psi, theta and pi at x = 10"""
        assert chebyshev_psi(small_table, 10) == pytest.approx(math.log(2520))
        assert chebyshev_theta(small_table, 10) == pytest.approx(math.log(210))
        assert prime_pi(small_table, 10) == 4
        assert prime_pi(small_table, 100) == 25
        assert prime_pi(small_table, 10_000) == 1229

    def test_noninteger_argument(self, small_table):
        """Should use the floor of x"""
        assert chebyshev_psi(small_table, 10.9) == chebyshev_psi(small_table, 10)

    def test_psi_via_theta(self, small_table):
        """Should agree with the direct prefix sum"""
        for x in (2, 10, 100, 1000, 9999.5):
            assert psi_via_theta(small_table, x) == pytest.approx(chebyshev_psi(small_table, x), abs=1e-9)

    def test_psi1_small(self, small_table):
        """Should weight each Lambda(n) by (x - n)"""
        expected = 16 * math.log(2) + 8 * math.log(3) + 5 * math.log(5) + 3 * math.log(7)
        assert psi1(small_table, 10) == pytest.approx(expected)

    def test_psi1_is_integral_of_psi(self, small_table):
        """Should equal int_1^x psi(u) du"""
        for x in (10, 57.3, 1000, 9876.25):
            assert psi1(small_table, x) == pytest.approx(psi_integral(small_table, x), rel=1e-12)

    def test_chebyshev_values_bundle(self, small_table):
        """Should bundle all summatory functions at one x"""
        values = chebyshev_values(small_table, 100)
        assert values.pi == 25
        assert values.psi == chebyshev_psi(small_table, 100)

    def test_out_of_range(self, small_table):
        """Should raise RangeError beyond the table or below zero"""
        with pytest.raises(RangeError):
            chebyshev_psi(small_table, 10_001)
        with pytest.raises(RangeError):
            psi1(small_table, -1)


class TestAbelIdentity:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_identity_holds(self, small_table, k):
        """Should match the Abel summation identity up to rounding"""
        for x in (10, 123.5, 1000):
            assert abel_identity_check(small_table, x, k) <= 1e-9 * x ** (k + 1)

    def test_rejects_other_powers(self, small_table):
        """Should raise DomainError for k outside 1..3"""
        with pytest.raises(DomainError):
            abel_identity_check(small_table, 100, 4)


class TestTauberian:
    def test_upper_inequality(self, medium_table):
        """Should hold for a range of x and beta"""
        for x in (10, 100, 1000, 20_000):
            for beta in (1.01, 1.1, 2.0):
                assert tauberian_inequality_check(medium_table, x, beta)

    def test_lower_inequality(self, medium_table):
        """Should hold for a range of x and alpha"""
        for x in (10, 100, 1000, 50_000):
            for alpha in (0.5, 0.9, 0.99):
                assert tauberian_lower_check(medium_table, x, alpha)

    def test_sandwich_brackets_psi(self, medium_table):
        """Should bracket psi(x)/x between the two differences"""
        for x in (100, 1000, 10_000):
            bounds = tauberian_sandwich(medium_table, x, 1.1)
            assert bounds.lower <= bounds.psi_over_x <= bounds.upper

    def test_beta_domain(self, small_table):
        """Should reject beta <= 1 and beta*x beyond the table"""
        with pytest.raises(DomainError):
            tauberian_inequality_check(small_table, 100, 1.0)
        with pytest.raises(RangeError):
            tauberian_inequality_check(small_table, 6000, 2.0)


class TestTableFrame:
    def test_columns(self, small_table):
        """Should expose one row per n"""
        frame = table_frame(small_table)
        assert list(frame.columns) == ["n", "mangoldt", "mobius", "liouville", "is_prime"]
        assert len(frame) == 10_000
        assert int(frame["is_prime"].sum()) == 1229
        assert np.array_equal(frame["n"].to_numpy()[:3], [1, 2, 3])
