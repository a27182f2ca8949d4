import math

import numpy as np
import pytest

from devband import (discrete_geometry, export_csv, export_obj, export_svg,
                     flatten, gaussian_check, load_obj, rectifying_strip,
                     ruling_directions, width_feasibility)
from conftest import circle_points

SQRT3 = math.sqrt(3.0)


# --- ruling directions ------------------------------------------------------


def test_rulings_meet_tangent_at_sixty_degrees(narrow_curve):
    g, interp, seam = ruling_directions(narrow_curve)
    assert seam
    assert np.allclose(np.linalg.norm(g, axis=1), 1.0, atol=1e-12)
    cosang = np.abs(np.einsum("ij,ij->i", g, narrow_curve.tangents))
    helical = ~interp
    # on the cylinders the generator meets the midline at 60 degrees
    assert np.allclose(np.degrees(np.arccos(cosang[helical])), 60.0,
                       atol=1e-3)


def test_rulings_sign_continuous(curve600):
    g, _, _ = ruling_directions(curve600)
    dots = np.einsum("ij,ij->i", g, np.roll(g, -1, axis=0))
    # at most one reversal, and only across the seam
    assert int(np.count_nonzero(dots < 0.0)) % 2 == 1


def test_circle_rulings_are_binormal():
    c = discrete_geometry(circle_points(n=120))
    g, interp, seam = ruling_directions(c)
    assert not seam
    assert not interp.any()
    assert np.allclose(np.abs(g[:, 2]), 1.0, atol=1e-10)


# --- meshing ----------------------------------------------------------------


def test_mesh_shape_and_seam(curve600):
    strip, mesh = rectifying_strip(curve600, 0.1, m=8)
    assert strip.seam_reversed
    assert mesh.vertices.shape == (600 * 8, 3)
    assert mesh.quads.shape == (600 * 7, 4)


def test_zero_width_mesh_is_polyline(curve600):
    _, mesh = rectifying_strip(curve600, 0.0)
    assert len(mesh.quads) == 0
    assert np.array_equal(mesh.vertices, curve600.points)


def test_mesh_orientation_reverses_exactly_once(curve600):
    # the seam quads connect mirrored width positions: vertex 0 of the last
    # ring joins width position m-1 of the first ring
    m = 8
    _, mesh = rectifying_strip(curve600, 0.1, m=m)
    seam_quads = mesh.quads[-(m - 1):]
    assert seam_quads[0][1] == m - 1
    non_seam = mesh.quads[:-(m - 1)]
    assert np.all(non_seam[:, 1] == non_seam[:, 0] + m)


def test_developability_defect_tiny(curve600):
    _, mesh = rectifying_strip(curve600, 0.1, m=8)
    assert gaussian_check(mesh) < 1e-6  # exact-arithmetic value is zero


def test_gaussian_check_detects_curved_mesh():
    # a quad grid on a unit sphere patch has defect/area ~ 1/R^2, not 0
    R = 2.0
    u = np.linspace(0.3, 1.2, 24)
    v = np.linspace(0.3, 1.2, 24)
    U, V = np.meshgrid(u, v, indexing="ij")
    P = np.stack([R * np.sin(U) * np.cos(V), R * np.sin(U) * np.sin(V),
                  R * np.cos(U)], axis=-1).reshape(-1, 3)
    quads = []
    for i in range(23):
        for j in range(23):
            a = i * 24 + j
            quads.append([a, a + 24, a + 25, a + 1])
    from devband import QuadMesh
    mesh = QuadMesh(vertices=P, quads=np.array(quads))
    assert gaussian_check(mesh) == pytest.approx(1.0 / R ** 2, rel=0.05)


# --- width feasibility ------------------------------------------------------


def test_width_feasibility_on_constructed_band(narrow_curve):
    strip, _ = rectifying_strip(narrow_curve, 1e-3, m=2)
    wf = width_feasibility(strip)
    # rulings first cross at the piecewise bound for the critical diameter
    # family evaluated at d = 0.3 geometry; here (d = d_max) the planar runs
    # vanish and the first crossing is set by the junction fans
    assert 0.0 < wf < 1.0


def test_width_feasibility_matches_piecewise_bound(curve600):
    strip, _ = rectifying_strip(curve600, 0.1, m=2)
    wf = width_feasibility(strip)
    assert wf == pytest.approx(0.15916705672673526, abs=2e-4)


def test_width_feasibility_circle_is_infinite():
    c = discrete_geometry(circle_points(n=120))
    strip, _ = rectifying_strip(c, 0.1, m=2)
    assert math.isinf(width_feasibility(strip))


# --- exporters --------------------------------------------------------------


def test_obj_round_trip(tmp_path, curve600):
    _, mesh = rectifying_strip(curve600, 0.1, m=4)
    path = tmp_path / "band.obj"
    export_obj(mesh, path)
    back = load_obj(path)
    assert np.array_equal(back.vertices, mesh.vertices)
    assert np.array_equal(back.quads, mesh.quads)
    export_obj(back, tmp_path / "band2.obj")
    assert (tmp_path / "band.obj").read_bytes() \
        == (tmp_path / "band2.obj").read_bytes()


def test_csv_export(tmp_path, curve600):
    path = tmp_path / "midline.csv"
    export_csv(curve600, path)
    text = path.read_text()
    assert text.splitlines()[0] == "s,x,y,z,K,W"
    assert len(text.splitlines()) == 601


def test_svg_export(tmp_path, band600):
    layout = flatten(band600)
    path = tmp_path / "flat.svg"
    export_svg(layout, path)
    text = path.read_text()
    assert text.startswith('<?xml version="1.0"')
    assert "<svg" in text and 'version="1.1"' in text and "mm" in text
    assert text.count("<line") >= 6 + len(layout.generator_lines)
    for label in "ABCDEF":
        assert f">{label}</text>" in text
