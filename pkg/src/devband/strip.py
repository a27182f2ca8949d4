"""Developable strip around a framed midline: rulings, meshing, diagnostics,
and file export (OBJ quads, SVG development, CSV samples)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .band import FlatLayout
from .curves import FramedCurve, _raw_rulings
from .errors import UndefinedRuling

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class RuledStrip:
    midline: FramedCurve
    half_width: float
    rulings: np.ndarray        # unit generator directions, sign-continuous
    interpolated: np.ndarray   # True where the ruling was filled in
    seam_reversed: bool        # ruling orientation flips across the seam


@dataclass(frozen=True)
class QuadMesh:
    vertices: np.ndarray
    quads: np.ndarray          # (Q, 4) vertex indices

    @property
    def angle_defects(self) -> np.ndarray:
        return _angle_defects(self)[0]


def ruling_directions(curve: FramedCurve):
    """Sign-continuous unit rulings along the Darboux direction W*T + K*B.

    Runs where the direction is undefined (straight spans) are filled by
    aiming at the intersection point of the flanking ruling lines when those
    lines (nearly) meet — which reproduces the generator fan of a planar
    piece — and by spherical interpolation otherwise.  Returns (rulings,
    interpolated mask, seam_reversed).
    """
    if not curve.closed:
        raise ValueError("ruling reconstruction expects a closed curve")
    g, defined = _raw_rulings(curve)
    n = curve.n
    if not defined.any():
        raise UndefinedRuling("no sample admits a ruling direction")
    g = g.copy()
    interp = ~defined

    if interp.any():
        _fill_undefined_runs(curve.points, g, defined, curve.total_length)

    # orient consecutive rulings consistently; an odd number of raw sign
    # flips around the cycle is the one-sided (Moebius) signature
    dots = np.einsum("ij,ij->i", g[:-1], g[1:])
    flip = np.cumprod(np.where(dots < 0.0, -1.0, 1.0))
    g[1:] *= flip[:, None]
    seam_reversed = bool(np.dot(g[-1], g[0]) < 0.0)
    return g, interp, seam_reversed


def _fill_undefined_runs(points, g, defined, total_length):
    n = len(points)
    didx = np.flatnonzero(defined)
    uidx = np.flatnonzero(~defined)
    # group undefined samples into cyclic runs
    runs = []
    visited = np.zeros(n, bool)
    for i in uidx:
        if visited[i]:
            continue
        j = i
        while not defined[(j - 1) % n]:
            j = (j - 1) % n
        run = []
        k = j
        while not defined[k]:
            run.append(k)
            visited[k] = True
            k = (k + 1) % n
        runs.append((run, (j - 1) % n, k))
    for run, ia, ib in runs:
        # anchor lines at the transition points (midway between the last
        # defined and first undefined sample); the boundary samples carry
        # first-order frame error, so take the direction from two samples
        # deeper into the defined stretch when available
        ja = (ia - 2) % n if defined[(ia - 1) % n] and defined[(ia - 2) % n] else ia
        jb = (ib + 2) % n if defined[(ib + 1) % n] and defined[(ib + 2) % n] else ib
        ga = g[ja] if np.dot(g[ja], g[ia]) >= 0 else -g[ja]
        gb = g[jb] if np.dot(g[jb], g[ib]) >= 0 else -g[jb]
        gb = gb if np.dot(ga, gb) >= 0 else -gb
        pa = 0.5 * (points[ia] + points[run[0]])
        pb = 0.5 * (points[ib] + points[run[-1]])
        apex = _line_intersection(pa, ga, pb, gb)
        frac = (np.arange(1, len(run) + 1)) / (len(run) + 1)
        ref = _slerp(ga, gb, frac)
        if apex is not None:
            for idx, i in enumerate(run):
                v = apex - points[i]
                nv = np.linalg.norm(v)
                if nv < 1e-12 * total_length:
                    g[i] = ref[idx]
                    continue
                v = v / nv
                g[i] = v if np.dot(v, ref[idx]) >= 0 else -v
        else:
            for idx, i in enumerate(run):
                g[i] = ref[idx]


def _line_intersection(pa, ga, pb, gb):
    """Near-intersection point of two lines, or None if parallel or clearly
    skew (closest-approach gap not small against the approach distances)."""
    w = pb - pa
    bdot = float(np.dot(ga, gb))
    denom = 1.0 - bdot * bdot
    if denom < 1e-12:
        return None
    d1 = float(np.dot(w, ga))
    d2 = float(np.dot(w, gb))
    t = (d1 - bdot * d2) / denom
    s = (bdot * d1 - d2) / denom
    c1 = pa + t * ga
    c2 = pb + s * gb
    if np.linalg.norm(c1 - c2) > 1e-3 * (abs(t) + abs(s)):
        return None
    return 0.5 * (c1 + c2)


def _slerp(a, b, frac):
    dot = np.clip(np.dot(a, b), -1.0, 1.0)
    ang = math.acos(dot)
    if ang < 1e-12:
        return np.broadcast_to(a, (len(frac), 3)).copy()
    sa = np.sin((1.0 - frac) * ang) / math.sin(ang)
    sb = np.sin(frac * ang) / math.sin(ang)
    return sa[:, None] * a + sb[:, None] * b


def rectifying_strip(curve: FramedCurve, b: float, m: int = 8):
    """Build the ruled strip of half-width b around the midline.

    Returns (RuledStrip, QuadMesh).  The mesh spans [-b, +b] along each
    ruling with m vertices across; when the ruling field reverses across the
    seam the seam quads connect mirrored width positions, producing a
    one-sided mesh.  With b = 0 the mesh degenerates to the midline polyline
    (no quads).
    """
    if m < 2:
        raise ValueError(f"need at least 2 samples across the width, got {m}")
    if b < 0:
        raise ValueError(f"half-width must be non-negative, got {b}")
    g, interp, seam_reversed = ruling_directions(curve)
    strip = RuledStrip(midline=curve, half_width=b, rulings=g,
                       interpolated=interp, seam_reversed=seam_reversed)
    n = curve.n
    if b == 0.0:
        mesh = QuadMesh(vertices=curve.points.copy(),
                        quads=np.empty((0, 4), dtype=np.int64))
        return strip, mesh
    v = np.linspace(-b, b, m)
    verts = (curve.points[:, None, :] + v[None, :, None] * g[:, None, :])
    verts = verts.reshape(n * m, 3)
    quads = []
    for i in range(n):
        i2 = (i + 1) % n
        for j in range(m - 1):
            if i2 == 0 and seam_reversed:
                quads.append([i * m + j, (m - 1 - j),
                              (m - 1 - j) - 1, i * m + j + 1])
            else:
                quads.append([i * m + j, i2 * m + j,
                              i2 * m + j + 1, i * m + j + 1])
    return strip, QuadMesh(vertices=verts, quads=np.asarray(quads, np.int64))


# ---------------------------------------------------------------------------
# diagnostics


def _angle_defects(mesh: QuadMesh):
    """Per-vertex angle defect 2*pi - sum of incident corner angles, corner
    areas (a quarter of each incident quad), and an interior-vertex mask."""
    nv = len(mesh.vertices)
    quads = mesh.quads
    angle_sum = np.zeros(nv)
    area = np.zeros(nv)
    incident = np.zeros(nv, dtype=np.int64)
    V = mesh.vertices
    for c in range(4):
        a = quads[:, c]
        p = quads[:, (c - 1) % 4]
        q = quads[:, (c + 1) % 4]
        u = V[p] - V[a]
        w = V[q] - V[a]
        cr = np.linalg.norm(np.cross(u, w), axis=1)
        dt = np.einsum("ij,ij->i", u, w)
        np.add.at(angle_sum, a, np.arctan2(cr, dt))
        np.add.at(incident, a, 1)
    # quad area via its two triangles, distributed equally to the corners
    d1 = V[quads[:, 2]] - V[quads[:, 0]]
    a1 = 0.5 * np.linalg.norm(np.cross(V[quads[:, 1]] - V[quads[:, 0]], d1), axis=1)
    a2 = 0.5 * np.linalg.norm(np.cross(d1, V[quads[:, 3]] - V[quads[:, 0]]), axis=1)
    qa = (a1 + a2) / 4.0
    for c in range(4):
        np.add.at(area, quads[:, c], qa)
    # boundary vertices: touch an edge used by only one quad
    edges = np.concatenate([
        np.sort(np.stack([quads[:, c], quads[:, (c + 1) % 4]], axis=1), axis=1)
        for c in range(4)])
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    boundary = np.zeros(nv, bool)
    boundary[uniq[counts == 1].ravel()] = True
    interior = (incident > 0) & ~boundary
    defect = 2.0 * np.pi - angle_sum
    return defect, area, interior


def gaussian_check(mesh: QuadMesh) -> float:
    """Max |angle defect| / vertex area over interior vertices; a discrete
    proxy for the Gaussian curvature of the mesh (0 for developables)."""
    if len(mesh.quads) == 0:
        return 0.0
    defect, area, interior = _angle_defects(mesh)
    if not interior.any():
        return 0.0
    return float(np.max(np.abs(defect[interior]) / area[interior]))


def width_feasibility(strip: RuledStrip) -> float:
    """Half-width at which adjacent ruling lines first cross (inf if no
    adjacent pair does).  The strip is geometrically valid below this value.

    Parallel pairs never cross; pairs whose lines are skew (closest-approach
    gap not negligible against the approach distances — frame noise on
    near-parallel generators) do not cross either and are skipped."""
    g = strip.rulings
    p = strip.midline.points
    g2 = np.roll(g, -1, axis=0)
    w = np.roll(p, -1, axis=0) - p
    bdot = np.einsum("ij,ij->i", g, g2)
    denom = 1.0 - bdot * bdot
    ok = denom > 1e-12
    if not ok.any():
        return math.inf
    d1 = np.einsum("ij,ij->i", w, g)
    d2 = np.einsum("ij,ij->i", w, g2)
    dn = np.where(ok, denom, 1.0)
    t = (d1 - bdot * d2) / dn
    s = (bdot * d1 - d2) / dn
    c1 = p + t[:, None] * g
    c2 = np.roll(p, -1, axis=0) + s[:, None] * g2
    gap = np.linalg.norm(c1 - c2, axis=1)
    val = np.minimum(np.abs(t), np.abs(s))
    crossing = ok & (gap <= 1e-6 * val)
    if not crossing.any():
        return math.inf
    return float(np.min(val[crossing]))


# ---------------------------------------------------------------------------
# exporters


def export_obj(mesh: QuadMesh, path) -> None:
    lines = []
    for vx, vy, vz in mesh.vertices:
        lines.append("v %.17g %.17g %.17g" % (vx, vy, vz))
    for q in mesh.quads:
        lines.append("f %d %d %d %d" % (q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_obj(path) -> QuadMesh:
    verts = []
    quads = []
    with open(path) as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                quads.append([int(x) - 1 for x in parts[1:5]])
    return QuadMesh(vertices=np.array(verts, dtype=float),
                    quads=np.array(quads, dtype=np.int64).reshape(-1, 4))


def export_csv(curve: FramedCurve, path) -> None:
    with open(path, "w") as f:
        f.write(curve.to_csv())


def export_svg(layout: FlatLayout, path, margin: float = 5.0) -> None:
    """Flat development as SVG (mm units): the l x 2b rectangle, junction
    ticks labelled A-F, and the 60-degree generator lines of the helical
    spans."""
    l = layout.length
    b = layout.width / 2.0
    hb = max(b, 0.02 * l)       # drawing half-height for zero-width bands
    W = l + 2 * margin
    H = 2 * hb + 2 * margin

    def X(x):
        return x + margin

    def Y(y):
        return hb + margin - y   # flip so +y is up

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{W:.6f}mm" height="{H:.6f}mm" '
        f'viewBox="0 0 {W:.6f} {H:.6f}">')
    out.append(
        f'<rect x="{X(0):.6f}" y="{Y(b):.6f}" width="{l:.6f}" '
        f'height="{max(layout.width, 1e-6):.6f}" fill="none" '
        f'stroke="black" stroke-width="0.2"/>')
    cot60 = 1.0 / math.tan(math.radians(60.0))
    for gl in layout.generator_lines:
        dx = gl.sense * b * cot60
        out.append(
            f'<line x1="{X(gl.foot - dx):.6f}" y1="{Y(-b):.6f}" '
            f'x2="{X(gl.foot + dx):.6f}" y2="{Y(b):.6f}" '
            f'stroke="gray" stroke-width="0.1"/>')
    labels = "ABCDEF"
    for k, s in enumerate(layout.junction_marks):
        out.append(
            f'<line x1="{X(s):.6f}" y1="{Y(-hb):.6f}" '
            f'x2="{X(s):.6f}" y2="{Y(hb):.6f}" '
            f'stroke="black" stroke-width="0.15" stroke-dasharray="0.5,0.5"/>')
        out.append(
            f'<text x="{X(s):.6f}" y="{Y(hb) - 0.8:.6f}" '
            f'font-size="2.5" text-anchor="middle">{labels[k]}</text>')
    out.append('</svg>')
    with open(path, "w") as f:
        f.write("\n".join(out) + "\n")
