import json
import math

import numpy as np
import pytest

from devband import (BandParams, NonPositive, SingularDensity, ZeroWidth,
                     analytic_helix, assemble, max_diameter, max_width,
                     narrow_limit_bound, piecewise_surface_energy,
                     sadowsky_density, sadowsky_energy, sample_midline)

SQRT3 = math.sqrt(3.0)


# --- density ----------------------------------------------------------------


def test_density_on_helix_invariants_is_inverse_r_squared():
    for r in (0.15, 0.3, 0.7, 2.0):
        K = 3.0 / (4.0 * r)
        W = SQRT3 / (4.0 * r)
        assert sadowsky_density(K, W) == pytest.approx(1.0 / r ** 2,
                                                       rel=1e-10)


def test_density_limits_and_singularity():
    assert sadowsky_density(0.0, 0.0) == 0.0
    assert sadowsky_density(1.0, 0.0) == 1.0
    with pytest.raises(SingularDensity):
        sadowsky_density(0.0, 1.0)
    # regularization removes the singularity
    assert sadowsky_density(0.0, 1.0, eps=1.0) == pytest.approx(1.0)


def test_density_rejects_negative_inputs():
    with pytest.raises(NonPositive):
        sadowsky_density(-1.0, 0.0)
    with pytest.raises(NonPositive):
        sadowsky_density(1.0, 0.0, eps=-1.0)


def test_line_energy_of_analytic_helix():
    r = 0.4
    h = analytic_helix(r, wrap=math.pi, n=2000)
    rep = sadowsky_energy(h)
    exact = h.total_length / r ** 2
    assert rep.value == pytest.approx(exact, rel=1e-10)
    assert rep.convention == "principal"


# --- narrow-limit bound -----------------------------------------------------


def test_narrow_limit_bound_values():
    assert narrow_limit_bound(3.0) == pytest.approx(49.348022005446786,
                                                    abs=1e-12)
    assert narrow_limit_bound(1.0) == pytest.approx(148.0440660163404,
                                                    abs=1e-10)
    with pytest.raises(NonPositive):
        narrow_limit_bound(0.0)


def test_sampled_narrow_limit_energy_matches_bound(narrow_curve):
    rep = sadowsky_energy(narrow_curve)
    bound = narrow_limit_bound(3.0)
    assert abs(rep.value - bound) < 0.01 * bound


def test_narrow_limit_scales_inversely_with_length():
    for l in (1.0, 2.0, 5.0):
        band = assemble(BandParams(l=l, d=max_diameter(l), b=0.0, n=600))
        rep = sadowsky_energy(sample_midline(band, 1200))
        assert abs(rep.value - narrow_limit_bound(l)) \
            < 0.01 * narrow_limit_bound(l)


# --- surface energy ---------------------------------------------------------


def test_surface_energy_worked_example(band600):
    rep = piecewise_surface_energy(band600, "principal")
    assert rep.value == pytest.approx(12.0920, abs=5e-5)
    assert piecewise_surface_energy(band600, "mean").value \
        == pytest.approx(rep.value / 4.0, rel=1e-14)


def test_surface_line_consistency_across_widths():
    for b in (0.01, 0.05, max_width(3.0, 0.3) / 2.0):
        band = assemble(BandParams(l=3.0, d=0.3, b=b, n=600))
        curve = sample_midline(band, 600)
        ep = piecewise_surface_energy(band, "principal").value
        line = sadowsky_energy(curve).value
        # surface / (2b) equals the line energy up to sampling error
        assert ep / (2.0 * b) == pytest.approx(line, rel=1e-2)


def test_surface_energy_zero_width_raises(narrow_band):
    with pytest.raises(ZeroWidth):
        piecewise_surface_energy(narrow_band, "principal")


def test_surface_energy_bad_convention(band600):
    with pytest.raises(ValueError):
        piecewise_surface_energy(band600, "gaussian")


def test_energy_report_json_fields(band600):
    rep = piecewise_surface_energy(band600, "principal")
    j = json.loads(rep.to_json())
    assert set(j) == {"value", "convention", "bound", "eps", "breakdown"}
    assert j["bound"] == pytest.approx(narrow_limit_bound(3.0))
    assert len(j["breakdown"]) == 6
    assert sum(j["breakdown"]) == pytest.approx(j["value"])
    # planar pieces contribute nothing
    assert j["breakdown"][1] == 0.0 and j["breakdown"][3] == 0.0 \
        and j["breakdown"][5] == 0.0


def test_line_energy_breakdown_straight_samples_zero(curve600):
    rep = sadowsky_energy(curve600)
    contrib = np.asarray(rep.breakdown)
    straight = (curve600.K == 0.0)
    assert straight.any()
    assert np.all(contrib[straight] == 0.0)
