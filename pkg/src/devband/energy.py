"""Bending-energy functionals for the band and its midline.

The line energy integrates (K^2+W^2)^2/K^2 ds along the midline; for a
developable strip this integrand is the squared nonzero principal curvature.
The surface energy of the piecewise band is available in two conventions:
"principal" squares the nonzero principal curvature (1/r on a cylinder) and
reproduces the 15*pi^2/l narrow-band value; "mean" squares the textbook mean
curvature (1/(2r)) and is exactly a quarter of it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .band import HelicalArc, PiecewiseBand
from .curves import FramedCurve
from .errors import NonPositive, SingularDensity, ZeroWidth

CONVENTIONS = ("principal", "mean")


@dataclass(frozen=True)
class EnergyReport:
    value: float
    convention: str
    bound: float          # 15*pi^2 / l for the same midline length
    eps: float
    breakdown: list

    def to_json(self) -> str:
        return json.dumps({
            "value": self.value,
            "convention": self.convention,
            "bound": self.bound,
            "eps": self.eps,
            "breakdown": self.breakdown,
        })


def narrow_limit_bound(l: float) -> float:
    """Energy of the exact construction in the zero-width limit: 15*pi^2/l."""
    if l <= 0:
        raise NonPositive(f"midline length must be positive, got {l}")
    return 15.0 * math.pi ** 2 / l


def sadowsky_density(K: float, W: float, eps: float = 0.0) -> float:
    """Pointwise line-energy density (K^2+W^2)^2 / (K^2+eps^2).

    With eps = 0 the density is the limit 0 when K = W = 0 and is singular
    (raises) when K = 0 but W != 0 — a frame state no developable strip can
    attain.
    """
    if K < 0 or eps < 0:
        raise NonPositive(f"need K >= 0 and eps >= 0, got K = {K}, eps = {eps}")
    if eps == 0.0:
        if K == 0.0:
            if W == 0.0:
                return 0.0
            raise SingularDensity(
                f"density singular: K = 0 with W = {W} and no regularization")
        return (K * K + W * W) ** 2 / (K * K)
    return (K * K + W * W) ** 2 / (K * K + eps * eps)


def _density_array(K, W, eps):
    num = (K * K + W * W) ** 2
    if eps > 0.0:
        return num / (K * K + eps * eps)
    bad = (K == 0.0) & (W != 0.0)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise SingularDensity(
            f"density singular at sample {idx}: K = 0 with W != 0", index=idx)
    return np.where(K > 0.0, num / np.where(K > 0.0, K * K, 1.0), 0.0)


def sadowsky_energy(curve: FramedCurve, eps: float = 0.0) -> EnergyReport:
    """Line energy of a framed curve: sum of density(K, W) * ds.

    Straight samples (K = W = 0) contribute exactly zero.  The per-sample
    contributions are returned as the breakdown.
    """
    if eps < 0:
        raise NonPositive(f"eps must be non-negative, got {eps}")
    contrib = _density_array(curve.K, curve.W, eps) * curve.ds
    return EnergyReport(value=float(contrib.sum()), convention="principal",
                        bound=narrow_limit_bound(curve.total_length),
                        eps=eps, breakdown=contrib.tolist())


def piecewise_surface_energy(band: PiecewiseBand,
                             convention: str = "principal") -> EnergyReport:
    """Surface bending energy of the constructed band, in closed form.

    Planar pieces contribute zero; a cylindrical piece of radius r contributes
    curvature^2 * (arc length) * (2b) with curvature = 1/r ("principal") or
    1/(2r) ("mean").  The principal value is exactly four times the mean one,
    and principal/(2b) equals the line energy of the midline.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    b = band.params.b
    if b == 0:
        raise ZeroWidth("b = 0: use sadowsky_energy of the midline instead")
    factor = 1.0 if convention == "principal" else 0.25
    breakdown = []
    for seg in band.segments:
        if isinstance(seg, HelicalArc):
            breakdown.append(factor * seg.length * 2.0 * b / seg.radius ** 2)
        else:
            breakdown.append(0.0)
    return EnergyReport(value=float(sum(breakdown)), convention=convention,
                        bound=narrow_limit_bound(band.params.l),
                        eps=0.0, breakdown=breakdown)
