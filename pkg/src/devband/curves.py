"""Discrete differential geometry of framed space curves.

Curvature is estimated from turning angles, torsion from the dihedral between
consecutive osculating planes.  Closure diagnostics include the parallel
transport holonomy of the normal plane and the orientation holonomy of the
developable strip carried by the curve (pi for a one-sided band, 0 for an
orientable one).
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEdge, NonPositive, NotClosed, TooFewPoints

SQRT3 = np.sqrt(3.0)

# turning angles below this are treated as exactly straight; computed via
# atan2(|t_prev x t|, t_prev . t) the angle noise floor is ~1e-15
STRAIGHT_ANGLE_TOL = 1e-8


@dataclass(frozen=True)
class CurveSample:
    s: float
    position: np.ndarray
    tangent: np.ndarray
    K: float
    W: float
    ds: float


@dataclass(frozen=True)
class FramedCurve:
    """Sampled curve with arc coordinates, unit tangents, curvature K,
    torsion W and quadrature weights ds.  For closed curves the sample
    ordering is cyclic (no duplicated seam sample)."""

    s: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    K: np.ndarray
    W: np.ndarray
    ds: np.ndarray
    closed: bool

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def total_length(self) -> float:
        return float(self.ds.sum())

    def sample(self, i: int) -> CurveSample:
        return CurveSample(s=float(self.s[i]), position=self.points[i],
                           tangent=self.tangents[i], K=float(self.K[i]),
                           W=float(self.W[i]), ds=float(self.ds[i]))

    def __iter__(self):
        return (self.sample(i) for i in range(self.n))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("s,x,y,z,K,W\n")
        for i in range(self.n):
            buf.write("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n" % (
                self.s[i], self.points[i, 0], self.points[i, 1],
                self.points[i, 2], self.K[i], self.W[i]))
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str, closed: bool = True) -> "FramedCurve":
        rows = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1)
        rows = np.atleast_2d(rows)
        s = rows[:, 0]
        points = rows[:, 1:4]
        ds = _mean_edge_lengths(points, closed)
        tangents = _vertex_tangents(points, closed)
        return FramedCurve(s=s, points=points, tangents=tangents,
                           K=rows[:, 4], W=rows[:, 5], ds=ds, closed=closed)


@dataclass(frozen=True)
class ClosureResiduals:
    position_gap: float
    tangent_gap: float
    holonomy_angle: float   # in [0, 2*pi)


# ---------------------------------------------------------------------------
# estimators


def _edges(points, closed):
    if closed:
        e = np.roll(points, -1, axis=0) - points
    else:
        e = np.diff(points, axis=0)
    return e


def _mean_edge_lengths(points, closed):
    e = _edges(points, closed)
    el = np.linalg.norm(e, axis=1)
    if closed:
        return 0.5 * (np.roll(el, 1) + el)
    ds = np.empty(len(points))
    ds[1:-1] = 0.5 * (el[:-1] + el[1:])
    ds[0] = 0.5 * el[0]
    ds[-1] = 0.5 * el[-1]
    return ds


def _vertex_tangents(points, closed):
    e = _edges(points, closed)
    el = np.linalg.norm(e, axis=1)
    t = e / el[:, None]
    if closed:
        tv = t + np.roll(t, 1, axis=0)
    else:
        tv = np.vstack([t[0], t[:-1] + t[1:], t[-1]])
    return tv / np.linalg.norm(tv, axis=1, keepdims=True)


def discrete_geometry(points: np.ndarray, closed: bool = True) -> FramedCurve:
    """Estimate K and W on a polygon through the given points.

    K_i is the turning angle at vertex i over the mean incident edge length;
    W_i is the signed dihedral between the osculating planes at vertices i
    and i+1 over the outgoing edge length.  Vertices with turning angle below
    STRAIGHT_ANGLE_TOL get K = W = 0, as do vertices whose torsion stencil
    touches such a straight vertex.
    """
    points = np.asarray(points, dtype=float)
    if len(points) < 6:
        raise TooFewPoints(f"need at least 6 points, got {len(points)}")
    e = _edges(points, closed)
    el = np.linalg.norm(e, axis=1)
    scale = el.sum()
    if np.any(el <= 1e-15 * scale):
        raise DegenerateEdge("consecutive points coincide")
    t = e / el[:, None]

    K, W = _kw_closed(points)
    if not closed:
        # the cyclic wrap edge pollutes a two-vertex band at each end;
        # replace with one-sided copies of the nearest clean estimate
        K = K.copy()
        W = W.copy()
        K[0], K[-1] = K[1], K[-2]
        W[0] = W[1]
        W[-1] = W[-3]
        W[-2] = W[-3]
    s = np.concatenate([[0.0], np.cumsum(el)[:-1]]) if closed else \
        np.concatenate([[0.0], np.cumsum(el)])
    return FramedCurve(s=s, points=points, tangents=_vertex_tangents(points, closed),
                       K=K, W=W, ds=_mean_edge_lengths(points, closed),
                       closed=closed)


def _kw_closed(points):
    t, el, theta, bhat, bdef = _frame_arrays(points)
    m = 0.5 * (np.roll(el, 1) + el)
    K = theta / m
    bnext = np.roll(bhat, -1, axis=0)
    cosd = np.einsum("ij,ij->i", bhat, bnext)
    sind = np.einsum("ij,ij->i", t, np.cross(bhat, bnext))
    W = np.arctan2(sind, cosd) / el
    straight = ~bdef
    K = np.where(straight, 0.0, K)
    W = np.where(straight | np.roll(straight, -1), 0.0, W)
    return K, W


def _frame_arrays(points):
    """Edge tangents, edge lengths, turning angles and unit binormals."""
    e = np.roll(points, -1, axis=0) - points
    el = np.linalg.norm(e, axis=1)
    t = e / el[:, None]
    tp = np.roll(t, 1, axis=0)
    cr = np.cross(tp, t)
    crn = np.linalg.norm(cr, axis=1)
    dot = np.einsum("ij,ij->i", tp, t)
    theta = np.arctan2(crn, dot)
    bdef = theta >= STRAIGHT_ANGLE_TOL
    bhat = np.where(bdef[:, None], cr / np.maximum(crn, 1e-300)[:, None], 0.0)
    return t, el, theta, bhat, bdef


# ---------------------------------------------------------------------------
# analytic helix oracle


def analytic_helix(r: float, wrap: float, handedness: int = 1,
                   n: int = 256) -> FramedCurve:
    """Exact samples of the helix meeting its cylinder generators at 60 deg.

    Pitch c = r/sqrt(3), so K = 3/(4r), W = handedness * sqrt(3)/(4r), and a
    half-wrap (wrap = pi) has arc length 2*pi*r/sqrt(3).
    """
    if r <= 0 or wrap <= 0:
        raise NonPositive(f"need r > 0 and wrap > 0, got r = {r}, wrap = {wrap}")
    if n < 2:
        raise NonPositive(f"need at least 2 samples, got {n}")
    h = 1 if handedness >= 0 else -1
    c = r / SQRT3
    speed = 2.0 * r / SQRT3          # |dp/dtheta|
    theta = np.linspace(0.0, wrap, n)
    points = np.column_stack([r * np.cos(theta), h * r * np.sin(theta),
                              c * theta])
    tangents = np.column_stack([-r * np.sin(theta), h * r * np.cos(theta),
                                np.full(n, c)]) / speed
    s = speed * theta
    ds = np.full(n, speed * wrap / (n - 1))
    ds[0] *= 0.5
    ds[-1] *= 0.5
    return FramedCurve(s=s, points=points, tangents=tangents,
                       K=np.full(n, 3.0 / (4.0 * r)),
                       W=np.full(n, h * SQRT3 / (4.0 * r)),
                       ds=ds, closed=False)


# ---------------------------------------------------------------------------
# closure and holonomy


def parallel_transport_holonomy(curve: FramedCurve) -> float:
    """Net rotation about the tangent of a parallel-transported normal after
    one circuit, in [0, 2*pi).  A pure curve quantity: equals the spherical
    area enclosed by the tangent indicatrix (mod 2*pi)."""
    if not curve.closed:
        raise NotClosed("parallel transport holonomy needs a closed curve")
    t, *_ = _frame_arrays(curve.points)
    u = np.cross(t[0], [0.0, 0.0, 1.0])
    if np.linalg.norm(u) < 1e-6:
        u = np.cross(t[0], [1.0, 0.0, 0.0])
    u /= np.linalg.norm(u)
    u0 = u.copy()
    n = len(t)
    for i in range(n):
        u = _rotate_between(t[i], t[(i + 1) % n], u)
    ang = np.arctan2(np.dot(t[0], np.cross(u0, u)), np.dot(u0, u))
    return float(ang % (2.0 * np.pi))


def _rotate_between(a, b, u):
    """Rotate u by the rotation taking unit vector a to unit vector b."""
    c = np.cross(a, b)
    s = np.linalg.norm(c)
    if s < 1e-300:
        return u if np.dot(a, b) > 0 else -u
    axis = c / s
    ang = np.arctan2(s, np.dot(a, b))
    return (u * np.cos(ang) + np.cross(axis, u) * np.sin(ang)
            + axis * np.dot(axis, u) * (1.0 - np.cos(ang)))


def ruling_seam_sign(curve: FramedCurve) -> int:
    """+1 if the strip's ruling line field returns with the same orientation
    after one circuit, -1 if it reverses (the Moebius signature).

    Rulings follow the Darboux direction W*T + K*B; samples where that is
    undefined (straight spans) are skipped, which leaves the orientation
    parity unchanged."""
    if not curve.closed:
        raise NotClosed("seam orientation needs a closed curve")
    g, defined = _raw_rulings(curve)
    idx = np.flatnonzero(defined)
    if idx.size < 2:
        return 1
    gs = g[idx]
    dots = np.einsum("ij,ij->i", gs, np.roll(gs, -1, axis=0))
    flips = int(np.count_nonzero(dots < 0.0))
    return -1 if flips % 2 else 1


def _raw_rulings(curve: FramedCurve):
    """Unit Darboux directions W*T + K*B per sample and a defined-mask."""
    t, el, theta, bhat, bdef = _frame_arrays(curve.points)
    tv = curve.tangents
    g = curve.W[:, None] * tv + curve.K[:, None] * bhat
    gn = np.linalg.norm(g, axis=1)
    defined = bdef & (gn > 1e-12 * np.maximum(np.abs(curve.K), 1.0))
    g = np.where(defined[:, None], g / np.maximum(gn, 1e-300)[:, None], 0.0)
    return g, defined


def closure_residuals(curve: FramedCurve) -> ClosureResiduals:
    """Position / tangent gaps after one traversal, plus the orientation
    holonomy of the strip normal: pi when the band carried by the curve is
    one-sided, 0 when it is orientable."""
    if not curve.closed:
        raise NotClosed("closure residuals need a curve flagged closed")
    # cyclic storage: the traversal ends exactly where it starts
    position_gap = 0.0
    tangent_gap = 0.0
    hol = 0.0 if ruling_seam_sign(curve) > 0 else np.pi
    return ClosureResiduals(position_gap=position_gap, tangent_gap=tangent_gap,
                            holonomy_angle=float(hol))
