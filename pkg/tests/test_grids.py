import numpy as np
import pytest

from spectral_potential_lab import (
    DomainError,
    IntervalGrid,
    PolarGrid,
    RadialGrid,
    ball_indicator,
    band_indicator,
    integrate,
)
from spectral_potential_lab.grids import boundary_circle_integral


def test_interval_nodes_and_measure():
    g = IntervalGrid(-1.0, 1.0, 99)
    assert g.measure == pytest.approx(2.0)
    assert g.nodes[0] == pytest.approx(-1.0 + g.h)
    assert g.nodes[-1] == pytest.approx(1.0 - g.h)
    # interior nodes only: total weight is (b - a) * n / (n + 1)
    assert integrate(g, np.ones(g.size)) == pytest.approx(2.0 * g.n / (g.n + 1), rel=1e-12)


def test_radial_weights_sum_to_disk_area():
    g = RadialGrid(1.0, 300)
    assert integrate(g, np.ones(g.size)) == pytest.approx(np.pi, rel=1e-2)


def test_polar_layout_and_weights():
    g = PolarGrid(1.0, 128, 32)
    assert g.size == 128 * 32
    # angular index fastest: first ring occupies the first ntheta slots
    assert np.allclose(g.radii[: g.ntheta], g.r[0])
    assert integrate(g, np.ones(g.size)) == pytest.approx(np.pi, rel=2e-2)


def test_polar_requires_even_ntheta():
    with pytest.raises(DomainError):
        PolarGrid(1.0, 16, 31)


def test_ball_indicator_mass_is_exact_area():
    for g in (RadialGrid(1.0, 200), PolarGrid(1.0, 40, 48)):
        chi = ball_indicator(g, 0.5)
        assert integrate(g, chi) == pytest.approx(np.pi * 0.25, rel=1e-3)
        assert np.all((chi >= 0) & (chi <= 1))


def test_interval_ball_indicator_is_centered_band():
    g = IntervalGrid(-1.0, 1.0, 401)
    chi = ball_indicator(g, 0.3)
    assert integrate(g, chi) == pytest.approx(0.6, abs=2 * g.h)
    assert chi[np.abs(g.nodes) > 0.3 + g.h].max() == 0.0


def test_band_indicator_fractional_cells():
    g = RadialGrid(1.0, 100)
    band = band_indicator(g, 0.25, 0.75)
    assert integrate(g, band) == pytest.approx(np.pi * (0.75**2 - 0.25**2), rel=1e-3)
    frac = band[(band > 0) & (band < 1)]
    assert frac.size <= 2  # at most one partial cell per band edge


def test_boundary_circle_integral_polar():
    g = PolarGrid(1.0, 32, 64)
    vals = np.cos(g.theta) ** 2
    got = boundary_circle_integral(g, 0.5, vals)
    assert got == pytest.approx(np.pi * 0.5, rel=1e-10)
