"""Closed-form construction of the three-cylinder developable Moebius band.

The band is threaded around three parallel-axis cylindrical rods of radii
(d, d/2, d/2) so that its midline consists of three straight runs lying in
the horizontal planes z = 0, d, 2d and three helical arcs that climb or
descend between those planes while wrapping half-way around a rod.  Every
helical arc meets the rod generators at 60 degrees, which fixes all lengths
in closed form.  The projections of the three straight runs onto z = 0 lie
on the edges of an equilateral triangle of side L = l/3.

Coordinate convention: drawing plane z = 0, triangle corner P at the origin,
edge PQ along +x.  Traversal order is A-B (helix at P, climbing 0 -> 2d),
B-C (planar, z = 2d), C-D (helix at R, descending 2d -> d), D-E (planar,
z = d), E-F (helix at Q, descending d -> 0), F-A (planar, z = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import FramedCurve, discrete_geometry
from .errors import (
    BadSampleCount,
    DegenerateDiameter,
    InfeasibleDiameter,
    InfeasibleWidth,
    NonPositive,
)

SQRT3 = math.sqrt(3.0)
_Z = np.array([0.0, 0.0, 1.0])


# ---------------------------------------------------------------------------
# parameters and closed-form lengths


@dataclass(frozen=True)
class BandParams:
    """Input parameters: midline length l, small-rod diameter d, half-width b,
    midline sample count n (>= 12, divisible by 6)."""

    l: float
    d: float
    b: float = 0.0
    n: int = 600


@dataclass(frozen=True)
class SegmentLengths:
    """Arc lengths of the six midline pieces and their plane projections."""

    AB: float
    BC: float
    CD: float
    DE: float
    EF: float
    FA: float
    Ap_Bp: float
    Cp_Dp: float
    Ep_Fp: float
    L: float

    def as_tuple(self):
        return (self.AB, self.BC, self.CD, self.DE, self.EF, self.FA)

    @property
    def total(self) -> float:
        return sum(self.as_tuple())


def max_diameter(l: float) -> float:
    """Largest feasible rod diameter for midline length l: 2l/(3*sqrt(3)*pi)."""
    if l <= 0:
        raise NonPositive(f"midline length must be positive, got {l}")
    return 2.0 * l / (3.0 * SQRT3 * math.pi)


def max_width(l: float, d: float) -> float:
    """Largest half-width b for (l, d): l/(2*sqrt(3)) - 3*pi*d/4.

    Equals (BC/2)*tan(60 deg); non-negative on the feasible set and zero
    exactly at d = max_diameter(l).
    """
    if l <= 0:
        raise NonPositive(f"midline length must be positive, got {l}")
    if d < 0:
        raise NonPositive(f"rod diameter must be non-negative, got {d}")
    if 3.0 * SQRT3 * math.pi * d > 2.0 * l:
        raise InfeasibleDiameter(
            f"d = {d:.7g} exceeds max diameter {max_diameter(l):.7g} for l = {l:.7g}"
        )
    return l / (2.0 * SQRT3) - 3.0 * math.pi * d / 4.0


def segment_lengths(l: float, d: float) -> SegmentLengths:
    """Closed-form arc lengths of the six midline pieces.

    The helical arc on the big rod (radius d) has length AB = 2*pi*d/sqrt(3);
    the arcs on the small rods have half that.  Projected chords are the arc
    lengths times cos(60 deg).  The straight pieces take up the rest of the
    triangle edges.
    """
    if l <= 0 or d <= 0:
        raise NonPositive(f"need l > 0 and d > 0, got l = {l}, d = {d}")
    if 3.0 * SQRT3 * math.pi * d > 2.0 * l:
        raise InfeasibleDiameter(
            f"d = {d:.7g} exceeds max diameter {max_diameter(l):.7g} for l = {l:.7g}"
        )
    L = l / 3.0
    ab = 2.0 * math.pi * d / SQRT3
    cd = math.pi * d / SQRT3
    bc = L - SQRT3 * math.pi * d / 2.0
    de = L - math.pi * d / SQRT3
    # clamp closed forms that are exactly zero at d = d_max against roundoff
    bc = max(bc, 0.0)
    de = max(de, 0.0)
    return SegmentLengths(
        AB=ab, BC=bc, CD=cd, DE=de, EF=cd, FA=bc,
        Ap_Bp=ab / 2.0, Cp_Dp=cd / 2.0, Ep_Fp=cd / 2.0, L=L,
    )


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    feasible: bool
    violations: list
    margins: dict


def validate(params: BandParams) -> ValidationReport:
    """Report-style feasibility check; never raises."""
    violations = []
    margins = {}
    if params.l <= 0:
        violations.append(("length", "l must be positive", -params.l))
    if params.d <= 0:
        violations.append(("diameter", "d must be positive", -params.d))
    if params.b < 0:
        violations.append(("width", "b must be non-negative", -params.b))
    if params.n < 12 or params.n % 6 != 0:
        violations.append(("samples", "n must be >= 12 and divisible by 6", 0.0))
    if params.l > 0 and params.d > 0:
        dmax = max_diameter(params.l)
        margins["diameter"] = dmax - params.d
        if params.d > dmax:
            violations.append(
                ("diameter",
                 f"d = {params.d:.7g} exceeds max diameter {dmax:.7g}",
                 params.d - dmax)
            )
        else:
            bmax = max_width(params.l, params.d)
            margins["width"] = bmax - params.b
            if params.b > bmax:
                violations.append(
                    ("width",
                     f"b = {params.b:.7g} exceeds max half-width {bmax:.7g}",
                     params.b - bmax)
                )
    return ValidationReport(feasible=not violations, violations=violations,
                            margins=margins)


# ---------------------------------------------------------------------------
# 3D assembly


@dataclass(frozen=True)
class RodSpec:
    """A cylindrical rod with horizontal axis parallel to the drawing plane."""

    radius: float
    axis_point: np.ndarray
    axis_dir: np.ndarray
    height_interval: tuple


@dataclass(frozen=True)
class HelicalArc:
    """Half-wrap helical midline piece on one rod, meeting generators at 60 deg.

    Parametrised by the wrap angle psi in [0, pi].  The arc starts on the
    tangent plane at height z_entry and climbs (ascending) or descends to the
    other tangent plane; the axial advance per unit wrap is r/sqrt(3).
    """

    rod_index: int
    radius: float
    axis_point: np.ndarray   # axis point above/below the entry point
    axis_dir: np.ndarray     # unit, horizontal (the external bisector)
    m_hat: np.ndarray        # horizontal unit normal fixing the wrap side
    ascending: bool
    length: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "length", 2.0 * math.pi * self.radius / SQRT3)

    @property
    def curvature(self) -> float:
        return 3.0 / (4.0 * self.radius)

    @property
    def torsion(self) -> float:
        return (1.0 if self.ascending else -1.0) * SQRT3 / (4.0 * self.radius)

    def point(self, frac):
        """Position at arc-length fraction frac in [0, 1] (scalar or array)."""
        psi = np.asarray(frac, dtype=float) * math.pi
        sgn = 1.0 if self.ascending else -1.0
        r = self.radius
        psi = psi[..., None] if psi.ndim else psi
        radial = -sgn * np.cos(psi) * _Z + np.sin(psi) * self.m_hat
        return self.axis_point + (r / SQRT3) * psi * self.axis_dir + r * radial

    def tangent(self, frac):
        psi = np.asarray(frac, dtype=float) * math.pi
        sgn = 1.0 if self.ascending else -1.0
        psi = psi[..., None] if psi.ndim else psi
        t = (self.axis_dir / SQRT3
             + sgn * np.sin(psi) * _Z + np.cos(psi) * self.m_hat)
        return t / np.linalg.norm(t, axis=-1, keepdims=True)


@dataclass(frozen=True)
class PlanarRun:
    """Straight midline piece lying in a horizontal tangent plane."""

    start: np.ndarray
    end: np.ndarray
    z_level: float
    length: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "length",
                           float(np.linalg.norm(self.end - self.start)))

    @property
    def curvature(self) -> float:
        return 0.0

    @property
    def torsion(self) -> float:
        return 0.0

    def point(self, frac):
        frac = np.asarray(frac, dtype=float)
        frac = frac[..., None] if frac.ndim else frac
        return self.start + frac * (self.end - self.start)

    def tangent(self, frac):
        t = (self.end - self.start) / self.length
        frac = np.asarray(frac, dtype=float)
        if frac.ndim:
            return np.broadcast_to(t, frac.shape + (3,)).copy()
        return t


@dataclass(frozen=True)
class PiecewiseBand:
    params: BandParams
    lengths: SegmentLengths
    rods: list
    segments: list     # 6 pieces, alternating HelicalArc / PlanarRun, A first
    junctions: np.ndarray  # arc coordinates of A, B, C, D, E, F

    def point_at(self, s):
        """Midline position at arc coordinate s (wrapped into [0, l))."""
        seg, frac = self._locate(s)
        return seg.point(frac)

    def tangent_at(self, s):
        seg, frac = self._locate(s)
        return seg.tangent(frac)

    def _locate(self, s):
        l = self.params.l
        s = float(s) % l
        bounds = np.concatenate([self.junctions, [l]])
        for k, seg in enumerate(self.segments):
            if bounds[k] <= s < bounds[k + 1] and seg.length > 0:
                return seg, (s - bounds[k]) / seg.length
        # s at a zero-length boundary: fall back to the last nonzero piece
        for k in reversed(range(6)):
            if self.segments[k].length > 0 and s >= bounds[k]:
                return self.segments[k], min(
                    1.0, (s - bounds[k]) / self.segments[k].length)
        raise ValueError(f"could not locate arc coordinate {s}")


def assemble(params: BandParams) -> PiecewiseBand:
    """Place the three rods and build the six-piece midline.

    Plane levels are {0, d, 2d}: the big rod (radius d) spans [0, 2d] and
    carries the climbing arc A-B at triangle corner P; the small rods
    (radius d/2) span [d, 2d] at corner R and [0, d] at corner Q and carry
    the descending arcs C-D and E-F.  Each rod axis lies along the external
    bisector of its corner, which is what makes the helix tangents match the
    adjacent straight runs (the projected turn at each corner is 120 deg).
    """
    l, d, b = params.l, params.d, params.b
    if d == 0:
        raise DegenerateDiameter("d = 0: the construction requires wrapping")
    report = validate(params)
    if not report.feasible:
        names = {v[0] for v in report.violations}
        if "diameter" in names:
            raise InfeasibleDiameter(report.violations[0][1])
        if "width" in names:
            raise InfeasibleWidth(next(v[1] for v in report.violations
                                       if v[0] == "width"))
        raise NonPositive("; ".join(v[1] for v in report.violations))

    lengths = segment_lengths(l, d)
    L = lengths.L
    P = np.array([0.0, 0.0, 0.0])
    Q = np.array([L, 0.0, 0.0])
    R = np.array([L / 2.0, SQRT3 * L / 2.0, 0.0])

    corner_data = [
        # (corner, prev corner, next corner, radius, entry plane z, ascending)
        (P, Q, R, d, 0.0, True),
        (R, P, Q, d / 2.0, 2.0 * d, False),
        (Q, R, P, d / 2.0, d, False),
    ]
    heights = [(0.0, 2.0 * d), (d, 2.0 * d), (0.0, d)]

    rods = []
    arcs = []
    for k, (X, Xprev, Xnext, r, z_in, up) in enumerate(corner_data):
        e_in = _unit(X - Xprev)
        e_out = _unit(Xnext - X)
        u_hat = e_in + e_out                      # unit: edges are 120 deg apart
        m_hat = (e_in - 0.5 * u_hat) * 2.0 / SQRT3
        chord = math.pi * r / SQRT3               # axial advance of the half-wrap
        entry = X - chord * e_in + np.array([0.0, 0.0, z_in])
        sgn = 1.0 if up else -1.0
        axis_point = entry + sgn * r * _Z
        rods.append(RodSpec(radius=r, axis_point=axis_point, axis_dir=u_hat,
                            height_interval=heights[k]))
        arcs.append(HelicalArc(rod_index=k, radius=r, axis_point=axis_point,
                               axis_dir=u_hat, m_hat=m_hat, ascending=up))

    planars = []
    for k in range(3):
        start = arcs[k].point(1.0)
        end = arcs[(k + 1) % 3].point(0.0)
        planars.append(PlanarRun(start=start, end=end, z_level=float(start[2])))

    segments = [arcs[0], planars[0], arcs[1], planars[1], arcs[2], planars[2]]
    seg_lens = np.array([seg.length for seg in segments])
    junctions = np.concatenate([[0.0], np.cumsum(seg_lens)[:-1]])
    return PiecewiseBand(params=params, lengths=lengths, rods=rods,
                         segments=segments, junctions=junctions)


def _unit(v):
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# midline sampling


def sample_midline(band: PiecewiseBand, n: int | None = None) -> FramedCurve:
    """Sample the midline at n approximately uniform arc positions.

    Samples sit at the midpoints of per-piece arc cells so that the curvature
    discontinuities at the junctions fall exactly on cell boundaries; each
    piece keeps one-sided estimates near its ends (estimates whose stencil
    would straddle a junction are replaced by the nearest clean in-piece
    value, or by the piece's exact constants when it is too short).
    """
    if n is None:
        n = band.params.n
    if n < 12 or n % 6 != 0:
        raise BadSampleCount(f"n must be >= 12 and divisible by 6, got {n}")

    seg_lens = np.array([seg.length for seg in band.segments])
    counts = _allocate(seg_lens, n)

    pts = []
    tans = []
    svals = []
    ds = []
    seg_of = []
    s0 = 0.0
    for k, (seg, nk) in enumerate(zip(band.segments, counts)):
        if nk == 0:
            s0 += seg.length
            continue
        frac = (np.arange(nk) + 0.5) / nk
        pts.append(seg.point(frac))
        tans.append(seg.tangent(frac))
        svals.append(s0 + frac * seg.length)
        ds.append(np.full(nk, seg.length / nk))
        seg_of.append(np.full(nk, k))
        s0 += seg.length
    points = np.vstack(pts)
    tangents = np.vstack(tans)
    s = np.concatenate(svals)
    ds = np.concatenate(ds)
    seg_of = np.concatenate(seg_of)

    est = discrete_geometry(points, closed=True)
    K = est.K.copy()
    W = est.W.copy()
    for k, seg in enumerate(band.segments):
        idx = np.flatnonzero(seg_of == k)
        if idx.size == 0:
            continue
        # K stencil spans one neighbour, W spans two (forward-biased)
        if idx.size >= 3:
            K[idx[0]] = K[idx[1]]
            K[idx[-1]] = K[idx[-2]]
        else:
            K[idx] = seg.curvature
        if idx.size >= 5:
            W[idx[0]] = W[idx[1]]
            W[idx[-2]] = W[idx[-3]]
            W[idx[-1]] = W[idx[-3]]
        else:
            W[idx] = seg.torsion

    return FramedCurve(s=s, points=points, tangents=tangents, K=K, W=W,
                       ds=ds, closed=True)


def _allocate(lengths: np.ndarray, n: int) -> np.ndarray:
    """Largest-remainder allocation of n samples proportional to lengths."""
    total = lengths.sum()
    raw = n * lengths / total
    counts = np.floor(raw).astype(int)
    counts[lengths == 0] = 0
    rest = n - counts.sum()
    order = np.argsort(-(raw - counts), kind="stable")
    for i in range(rest):
        counts[order[i % len(order)]] += 1
    counts[lengths == 0] = 0
    short = n - counts.sum()
    if short:  # only if zero-length pieces stole remainder slots
        counts[np.argmax(lengths)] += short
    return counts


# ---------------------------------------------------------------------------
# flat development


@dataclass(frozen=True)
class GeneratorLine:
    """A cylinder generator marked on the flat development."""

    foot: float     # arc position of the generator's midline crossing
    angle: float    # degrees to the midline, always 60
    sense: int      # +1 / -1: which way the line tilts


@dataclass(frozen=True)
class FlatLayout:
    length: float
    width: float          # full width 2b
    junction_marks: np.ndarray
    generator_lines: list


def flatten(band: PiecewiseBand, generators_per_arc: int = 12) -> FlatLayout:
    """Develop the band into its flat rectangle (an exact isometry).

    Junction marks sit at the cumulative arc coordinates; generators of the
    cylindrical pieces appear as straight lines at 60 degrees to the midline,
    only within the helical spans.
    """
    l = band.params.l
    marks = band.junctions.copy()
    gens = []
    bounds = np.concatenate([band.junctions, [l]])
    for k, seg in enumerate(band.segments):
        if not isinstance(seg, HelicalArc):
            continue
        sense = 1 if seg.torsion >= 0 else -1
        feet = np.linspace(bounds[k], bounds[k + 1], generators_per_arc)
        for foot in feet:
            gens.append(GeneratorLine(foot=float(foot), angle=60.0, sense=sense))
    return FlatLayout(length=l, width=2.0 * band.params.b,
                      junction_marks=marks, generator_lines=gens)
