"""
Unit tests for the zone boundaries and the phase-space classification.
"""

import math

import numpy as np
import pytest

from gecl.domain.reports import Verdict
from gecl.domain.zone import Zone
from gecl.services.zone_service import BoundaryNotFoundError, ZoneService, boundary


class TestBoundary:
    """Tests for the scalar boundary solver."""

    def test_solves_linear_scale(self):
        # scale(t) = 1 + t, so (1 + t)·ξ = N at t = N/ξ − 1
        t = boundary(lambda t: math.log1p(t), xi=0.5, N=10.0)
        assert t == pytest.approx(19.0, rel=1e-12)

    def test_none_when_reached_at_zero(self):
        assert boundary(lambda t: math.log1p(t), xi=20.0, N=10.0) is None

    def test_unreachable_boundary_raises(self):
        with pytest.raises(BoundaryNotFoundError):
            boundary(lambda t: 0.0, xi=1.0, N=10.0, t_max=1e3)

    @pytest.mark.parametrize("xi, N", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
    def test_rejects_non_positive_arguments(self, xi, N):
        with pytest.raises(ValueError):
            boundary(lambda t: t, xi=xi, N=N)


class TestZoneService:
    """Tests for ZoneService on the polynomial coefficient."""

    def test_boundary_residuals(self, polynomial_coef):
        zones = ZoneService(polynomial_coef)
        b = zones.boundaries(0.5)
        residuals = zones.residuals(b)
        assert abs(residuals['t1_residual']) < 1e-10
        assert abs(residuals['t2_residual']) < 1e-10

    def test_t2_closed_form(self, polynomial_coef):
        # Θ = (1 + t)², N = 10: (1 + t⁽²⁾)² ξ = 10
        zones = ZoneService(polynomial_coef)
        xi = 0.1
        assert zones.t2(xi) == pytest.approx(math.sqrt(10.0 / xi) - 1.0, rel=1e-12)

    def test_ordering(self, polynomial_coef):
        zones = ZoneService(polynomial_coef)
        for xi in np.logspace(-3, 1, 9):
            b = zones.boundaries(xi)
            assert b.t1_or_zero <= b.t2_or_zero

    def test_classification(self, polynomial_coef):
        zones = ZoneService(polynomial_coef)
        xi = 0.1
        b = zones.boundaries(xi)
        assert zones.classify(0.0, xi).zone == Zone.PSEUDO_DIFFERENTIAL
        assert zones.classify(b.t1, xi).zone == Zone.PSEUDO_DIFFERENTIAL
        assert zones.classify(0.5 * (b.t1 + b.t2), xi).zone == Zone.INTERMEDIATE
        assert zones.classify(b.t2, xi).zone == Zone.HYPERBOLIC
        assert zones.classify(10.0 * b.t2, xi).zone == Zone.HYPERBOLIC

    def test_large_frequency_is_hyperbolic_from_start(self, polynomial_coef):
        zones = ZoneService(polynomial_coef)
        b = zones.boundaries(100.0)
        assert b.t1 is None and b.t2 is None
        assert not b.has_gap
        assert zones.classify(0.0, 100.0).zone == Zone.HYPERBOLIC

    def test_check_geometry_passes(self, polynomial_coef):
        report = ZoneService(polynomial_coef).check_geometry(np.logspace(-2, 1, 12))
        assert report.status == Verdict.PASS
        assert report.metrics['ordered'] and report.metrics['monotone']
        assert len(report.rows) == 12

    def test_zone_constant_override(self, polynomial_coef):
        wide = ZoneService(polynomial_coef, N=100.0)
        narrow = ZoneService(polynomial_coef)
        assert wide.t2(0.1) > narrow.t2(0.1)

    def test_constant_family_zones(self, constant_coef):
        # Λ = Θ = 1 + t: the intermediate zone collapses
        b = ZoneService(constant_coef).boundaries(0.5)
        assert b.t1 == pytest.approx(19.0)
        assert b.t2 == pytest.approx(19.0)

    def test_pseudo_differential_boundary_closed_forms(self, polynomial_coef, constant_coef):
        # Λ = 1 + ((1+t)³ − 1)/3 = 10 at ξ = 1 gives (1+t)³ = 28
        assert ZoneService(polynomial_coef).t1(1.0) == pytest.approx(28.0 ** (1.0 / 3.0) - 1.0, abs=1e-9)
        # Λ = 1 + t, N = 2, ξ = 1/2
        assert ZoneService(constant_coef, N=2.0).t1(0.5) == pytest.approx(3.0, abs=1e-9)
