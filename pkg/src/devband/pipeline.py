"""Orchestration shared by the CLI and the HTTP service.

Each pipeline returns a plain-dict report (JSON-serializable, schema in
report_schema.json) plus the in-memory artifacts the caller may want to
export.  Every number in a report is a pure function of the echoed
parameters, so reports are reproducible byte-for-byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .band import (BandParams, HelicalArc, assemble, flatten, max_diameter,
                   max_width, sample_midline, segment_lengths, validate)
from .curves import FramedCurve, closure_residuals, discrete_geometry
from .energy import (CONVENTIONS, narrow_limit_bound, piecewise_surface_energy,
                     sadowsky_energy)
from .errors import InfeasibleDiameter, InfeasibleWidth, NonPositive
from .optim import (OptimizerConfig, minimize, objective, trace_to_csv,
                    TRACE_HEADER)
from .strip import gaussian_check, rectifying_strip, width_feasibility


@dataclass(frozen=True)
class ConstructArtifacts:
    band: object
    curve: FramedCurve
    mesh: object
    layout: object


@dataclass(frozen=True)
class OptimizeArtifacts:
    curve: FramedCurve | None
    mesh: object
    trace_csv: str


def _check_feasible(params: BandParams) -> dict:
    """Validate and raise a typed error on infeasibility (messages name the
    violated inequality with its limit value)."""
    report = validate(params)
    val = {
        "feasible": report.feasible,
        "violations": [
            {"field": f, "message": m, "amount": a}
            for f, m, a in report.violations
        ],
        "margins": {k: float(v) for k, v in report.margins.items()},
    }
    if not report.feasible:
        field, message, _ = report.violations[0]
        if field == "diameter" and params.d > 0:
            raise InfeasibleDiameter(message)
        if field == "width" and params.b >= 0:
            raise InfeasibleWidth(message)
        raise NonPositive(message)
    return val


def line_energy_closed(band) -> float:
    """Closed-form line energy of the piecewise midline: each helical piece
    contributes (arc length)/r^2, planar pieces contribute zero."""
    return float(sum(seg.length / seg.radius ** 2
                     for seg in band.segments if isinstance(seg, HelicalArc)))


def _params_dict(params: BandParams, convention: str, **extra) -> dict:
    out = {"l": params.l, "d": params.d, "b": params.b, "n": params.n,
           "convention": convention}
    out.update(extra)
    return out


def _energies(band, curve, convention: str) -> dict:
    e_line = sadowsky_energy(curve)
    out = {
        "line": e_line.value,
        "line_closed_form": line_energy_closed(band),
        "surface_principal": None,
        "surface_mean": None,
    }
    if band.params.b > 0:
        out["surface_principal"] = piecewise_surface_energy(
            band, "principal").value
        out["surface_mean"] = piecewise_surface_energy(band, "mean").value
    return out


def _residuals(curve) -> dict:
    res = closure_residuals(curve)
    return {"position_gap": res.position_gap, "tangent_gap": res.tangent_gap,
            "holonomy_angle": res.holonomy_angle}


def run_construct(params: BandParams, convention: str = "principal",
                  m: int = 8):
    """Validate, assemble, sample, mesh and flatten; returns (report, artifacts).

    Raises a typed feasibility error when the parameters violate the diameter
    or width bound.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    val = _check_feasible(params)
    band = assemble(params)
    curve = sample_midline(band, params.n)
    _, mesh = rectifying_strip(curve, params.b, m=m)
    layout = flatten(band)
    bound = narrow_limit_bound(params.l)
    energies = _energies(band, curve, convention)
    report = {
        "command": "construct",
        "params": _params_dict(params, convention),
        "validation": val,
        "limits": {"d_max": max_diameter(params.l),
                   "b_max": max_width(params.l, params.d)},
        "segment_lengths": dict(zip(("AB", "BC", "CD", "DE", "EF", "FA"),
                                    band.lengths.as_tuple())),
        "junctions": [float(s) for s in band.junctions],
        "energies": energies,
        "bound": {"value": bound,
                  "ratio": energies["line_closed_form"] / bound},
        "residuals": _residuals(curve),
        "outputs": [],
    }
    return report, ConstructArtifacts(band=band, curve=curve, mesh=mesh,
                                      layout=layout)


def run_verify(params: BandParams, convention: str = "principal"):
    """Assertion suite over the exact construction; returns (report, checks).

    Checks: closed-form segment identities, feasibility margins, C1 tangent
    continuity at the junctions, developability of the reconstructed mesh,
    and energy identities against the narrow-limit value 15*pi^2/l.
    """
    val = _check_feasible(params)
    band = assemble(params)
    curve = sample_midline(band, params.n)
    bound = narrow_limit_bound(params.l)
    e_closed = line_energy_closed(band)
    e_sampled = sadowsky_energy(curve).value
    l, d, b = params.l, params.d, params.b
    seg = segment_lengths(l, d)
    checks = []

    def check(name, value, tol):
        checks.append({"name": name, "value": float(value),
                       "tolerance": float(tol),
                       "passed": bool(value <= tol)})

    check("segment_sum", abs(seg.total - l), 1e-12 * l)
    # projections of the large helical piece: axial component AB*cos60,
    # horizontal component AB*cos30 = pi*d (half the rod circumference)
    check("projection_horizontal", abs(seg.AB * math.cos(math.radians(30.0))
                                       - math.pi * d), 1e-12 * l)
    check("projection_axial", abs(seg.AB * math.cos(math.radians(60.0))
                                  - 0.5 * seg.AB), 1e-12 * l)
    check("feasibility_margin", -min(val["margins"].values()), 0.0)
    delta = 1e-9 * l
    c1 = 0.0
    for s in band.junctions:
        tm = band.tangent_at((s - delta) % l)
        tp = band.tangent_at((s + delta) % l)
        c1 = max(c1, float(np.linalg.norm(tm - tp)))
    check("c1_junctions", c1, 1e-6)
    b_mesh = b if b > 0 else 0.01 * l
    _, mesh = rectifying_strip(curve, b_mesh, m=8)
    check("developability_defect", gaussian_check(mesh), 1e-3 / d ** 2)
    check("sampled_energy_vs_closed_form",
          abs(e_sampled - e_closed), 0.01 * e_closed)
    check("energy_at_least_narrow_limit", bound - e_closed, 1e-9 * bound)
    if b > 0:
        ep = piecewise_surface_energy(band, "principal").value
        em = piecewise_surface_energy(band, "mean").value
        check("surface_line_consistency",
              abs(ep / (2.0 * b) - e_closed), 1e-10 * e_closed)
        check("mean_is_quarter_of_principal", abs(ep - 4.0 * em), 1e-12 * ep)
    report = {
        "command": "verify",
        "params": _params_dict(params, convention),
        "validation": val,
        "limits": {"d_max": max_diameter(l), "b_max": max_width(l, d)},
        "energies": _energies(band, curve, convention),
        "bound": {"value": bound, "ratio": e_closed / bound},
        "residuals": _residuals(curve),
        "checks": checks,
        "outputs": [],
    }
    return report, checks


def run_optimize(l: float, n: int, iters: int, eps: float | None = None,
                 seed: int = 0, strip_samples: int = 8):
    """Minimize the narrow-band line energy from the exact construction at
    the critical diameter; returns (report, artifacts).

    iters = 0 evaluates the initial objective only (trace is just a header).
    """
    if l <= 0:
        raise NonPositive(f"l must be positive, got {l}")
    if iters < 0:
        raise ValueError(f"iters must be >= 0, got {iters}")
    params = BandParams(l=l, d=max_diameter(l), b=0.0, n=n)
    band = assemble(params)
    curve0 = sample_midline(band, n)
    bound = narrow_limit_bound(l)
    base = {
        "command": "optimize",
        "params": {"l": l, "d": params.d, "b": 0.0, "n": n, "iters": iters,
                   "eps": eps, "seed": seed, "convention": "principal"},
        "limits": {"d_max": params.d, "b_max": 0.0},
        "bound": {"value": bound},
        "outputs": [],
    }
    if iters == 0:
        config = OptimizerConfig(max_iters=1, eps=eps, seed=seed)
        obj = objective(curve0.points, config)
        base["optimization"] = {
            "iterations": 0, "converged": False,
            "initial_energy": obj.sadowsky_term,
            "final_energy": obj.sadowsky_term,
            "bound_ratio": obj.sadowsky_term / bound,
        }
        base["residuals"] = _residuals(curve0)
        return base, OptimizeArtifacts(curve=None, mesh=None,
                                       trace_csv=TRACE_HEADER + "\n")
    config = OptimizerConfig(max_iters=iters, eps=eps, seed=seed)
    result = minimize(curve0.points, config)
    trace = result.energy_trace
    final_energy = trace[-1].sadowsky_term
    strip, _ = rectifying_strip(result.curve, 1e-3 * l, m=2)
    wf = width_feasibility(strip)
    b_strip = min(0.05 * l, 0.45 * wf) if math.isfinite(wf) else 0.05 * l
    _, mesh = rectifying_strip(result.curve, b_strip, m=strip_samples)
    base["optimization"] = {
        "iterations": trace[-1].iter, "converged": result.converged,
        "initial_energy": trace[0].sadowsky_term,
        "final_energy": final_energy,
        "bound_ratio": final_energy / bound,
        "width_feasible": wf if math.isfinite(wf) else None,
        "strip_half_width": b_strip,
    }
    base["residuals"] = {
        "position_gap": result.final_residuals.position_gap,
        "tangent_gap": result.final_residuals.tangent_gap,
        "holonomy_angle": result.final_residuals.holonomy_angle,
    }
    return base, OptimizeArtifacts(curve=result.curve, mesh=mesh,
                                   trace_csv=trace_to_csv(trace))
