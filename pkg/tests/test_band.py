import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from devband import (BandParams, BadSampleCount, HelicalArc, NonPositive,
                     PlanarRun, assemble, flatten, max_diameter, max_width,
                     sample_midline, segment_lengths, validate)

SQRT3 = math.sqrt(3.0)


# --- closed forms -----------------------------------------------------------


def test_max_diameter_closed_form():
    assert max_diameter(3.0) == pytest.approx(2.0 * 3.0 / (3.0 * SQRT3 * math.pi),
                                              rel=1e-15)
    assert max_diameter(3.0) == pytest.approx(0.36755259694786135, abs=1e-15)


def test_max_width_closed_form():
    assert max_width(3.0, 0.3) == pytest.approx(
        3.0 / (2.0 * SQRT3) - 3.0 * math.pi * 0.3 / 4.0, rel=1e-15)
    assert max_width(3.0, 0.3) == pytest.approx(0.15916705672673526, abs=1e-15)


def test_max_width_vanishes_at_max_diameter():
    l = 3.0
    assert abs(max_width(l, max_diameter(l))) < 1e-12


def test_segment_lengths_worked_example():
    seg = segment_lengths(3.0, 0.3)
    assert seg.AB == pytest.approx(2.0 * math.pi * 0.3 / SQRT3, rel=1e-15)
    assert seg.CD == pytest.approx(math.pi * 0.3 / SQRT3, rel=1e-15)
    assert seg.EF == seg.CD
    assert seg.BC == pytest.approx(1.0 - SQRT3 * math.pi * 0.3 / 2.0, rel=1e-14)
    assert seg.FA == seg.BC
    assert seg.DE == pytest.approx(1.0 - math.pi * 0.3 / SQRT3, rel=1e-14)
    assert seg.total == pytest.approx(3.0, abs=1e-14)


@given(l=st.floats(0.5, 50.0), frac=st.floats(0.05, 0.999))
@settings(max_examples=50, deadline=None)
def test_segment_identities_random(l, frac):
    d = frac * max_diameter(l)
    seg = segment_lengths(l, d)
    assert abs(seg.total - l) <= 1e-12 * l
    # the large arc projects to half the rod circumference horizontally
    assert abs(seg.AB * math.cos(math.radians(30.0)) - math.pi * d) <= 1e-12 * l
    assert abs(seg.AB * math.cos(math.radians(60.0)) - 0.5 * seg.AB) <= 1e-12 * l


# --- validation -------------------------------------------------------------


def test_validate_feasible():
    rep = validate(BandParams(l=3.0, d=0.3, b=0.1, n=600))
    assert rep.feasible
    assert rep.margins["diameter"] == pytest.approx(
        max_diameter(3.0) - 0.3, rel=1e-14)
    assert rep.margins["width"] == pytest.approx(
        max_width(3.0, 0.3) - 0.1, rel=1e-14)


def test_validate_rejects_large_diameter():
    rep = validate(BandParams(l=3.0, d=0.5, b=0.0, n=600))
    assert not rep.feasible
    assert any(f == "diameter" for f, _, _ in rep.violations)
    assert rep.margins["diameter"] == pytest.approx(max_diameter(3.0) - 0.5,
                                                    rel=1e-14)


def test_validate_rejects_large_width():
    bmax = max_width(3.0, 0.3)
    rep = validate(BandParams(l=3.0, d=0.3, b=bmax + 1e-6, n=600))
    assert not rep.feasible
    assert any(f == "width" for f, _, _ in rep.violations)


def test_validate_rejects_nonpositive_and_bad_n():
    assert not validate(BandParams(l=-1.0, d=0.3, b=0.0, n=600)).feasible
    assert not validate(BandParams(l=3.0, d=0.0, b=0.0, n=600)).feasible
    assert not validate(BandParams(l=3.0, d=0.3, b=0.0, n=100)).feasible


# --- assembly ---------------------------------------------------------------


def test_assemble_junction_coordinates():
    band = assemble(BandParams(l=3.0, d=0.3, b=0.1, n=600))
    expected = [0.0, 1.08827962, 1.2720699, 1.81620971, 2.2720699, 2.81620971]
    assert np.allclose(band.junctions, expected, atol=1e-7)


def test_assemble_alternates_arc_and_run():
    band = assemble(BandParams(l=3.0, d=0.3, b=0.1, n=600))
    kinds = [type(seg) for seg in band.segments]
    assert kinds == [HelicalArc, PlanarRun, HelicalArc, PlanarRun,
                     HelicalArc, PlanarRun]


def test_assemble_rod_radii():
    band = assemble(BandParams(l=3.0, d=0.3, b=0.1, n=600))
    arcs = [seg for seg in band.segments if isinstance(seg, HelicalArc)]
    assert arcs[0].radius == pytest.approx(0.3, rel=1e-15)
    assert arcs[1].radius == pytest.approx(0.15, rel=1e-15)
    assert arcs[2].radius == pytest.approx(0.15, rel=1e-15)


def test_midline_closes_c1():
    band = assemble(BandParams(l=3.0, d=0.3, b=0.1, n=600))
    l = band.params.l
    assert np.linalg.norm(band.point_at(0.0) - band.point_at(l - 1e-12)) < 1e-9
    for s in band.junctions:
        tm = band.tangent_at((s - 1e-9) % l)
        tp = band.tangent_at((s + 1e-9) % l)
        assert np.linalg.norm(tm - tp) < 1e-6


def test_tangent_is_unit_everywhere():
    band = assemble(BandParams(l=3.0, d=0.3, b=0.1, n=600))
    for s in np.linspace(0.0, 3.0, 97, endpoint=False):
        assert np.linalg.norm(band.tangent_at(s)) == pytest.approx(1.0,
                                                                   abs=1e-12)


# --- sampling ---------------------------------------------------------------


def test_sample_midline_basic(band600, curve600):
    assert curve600.n == 600
    assert curve600.closed
    assert curve600.total_length == pytest.approx(3.0, rel=1e-12)
    el = np.linalg.norm(np.roll(curve600.points, -1, axis=0) - curve600.points,
                        axis=1)
    assert el.max() < 3.0 * 2.0 / 600  # no sampling gaps


def test_sample_midline_kw_match_pieces(band600, curve600):
    # each sample carries the exact piecewise K (1/r helix vs 0 planar)
    for arc in (seg for seg in band600.segments if isinstance(seg, HelicalArc)):
        assert arc.curvature == pytest.approx(3.0 / (4.0 * arc.radius))
        assert abs(arc.torsion) == pytest.approx(SQRT3 / (4.0 * arc.radius))
    mid = len(curve600.points) // 12  # well inside the large arc
    assert curve600.K[mid] == pytest.approx(3.0 / (4.0 * 0.3), rel=1e-3)


def test_sample_midline_rejects_bad_counts(band600):
    with pytest.raises(BadSampleCount):
        sample_midline(band600, 10)
    with pytest.raises(BadSampleCount):
        sample_midline(band600, 100)


# --- flattening -------------------------------------------------------------


def test_flatten_marks_equal_junctions(band600):
    layout = flatten(band600)
    assert layout.length == 3.0
    assert layout.width == pytest.approx(0.2)
    assert np.allclose(layout.junction_marks, band600.junctions, atol=0.0)


def test_flatten_preserves_segment_lengths(band600):
    layout = flatten(band600)
    bounds = np.concatenate([layout.junction_marks, [layout.length]])
    spans = np.diff(bounds)
    assert np.allclose(spans, band600.lengths.as_tuple(), atol=1e-9)


def test_flatten_generators_at_sixty_degrees(band600):
    layout = flatten(band600)
    assert layout.generator_lines
    assert all(g.angle == 60.0 for g in layout.generator_lines)
    bounds = np.concatenate([band600.junctions, [3.0]])
    helical = [(bounds[k], bounds[k + 1])
               for k, seg in enumerate(band600.segments)
               if isinstance(seg, HelicalArc)]
    for g in layout.generator_lines:
        assert any(a - 1e-12 <= g.foot <= b + 1e-12 for a, b in helical)


def test_narrow_limit_marks(narrow_band):
    # at d = d_max the planar runs vanish: marks at {0, 4/9 l, ...} with
    # B = C and l = 3 giving {0, 4/3, 4/3, 2, 7/3, 3}
    marks = narrow_band.junctions
    assert np.allclose(marks, [0.0, 4.0 / 3.0, 4.0 / 3.0, 2.0, 7.0 / 3.0,
                               3.0], atol=1e-12)


def test_nonpositive_raises():
    with pytest.raises(NonPositive):
        max_diameter(0.0)
    with pytest.raises(NonPositive):
        max_width(3.0, -0.1)
    from devband import InfeasibleDiameter
    with pytest.raises(InfeasibleDiameter):
        max_width(3.0, 0.5)
