"""devband: developable Moebius band in exact closed form, discrete framed
curves, bending energies, narrow-band energy minimization, strip
reconstruction, and exporters."""

import os as _os

# cap internal (BLAS/OpenMP) parallelism before numpy is first imported
_threads = _os.environ.get("DEVBAND_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                 "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

from .band import (BandParams, FlatLayout, GeneratorLine, HelicalArc,
                   PiecewiseBand, PlanarRun, RodSpec, SegmentLengths,
                   ValidationReport, assemble, flatten, max_diameter,
                   max_width, sample_midline, segment_lengths, validate)
from .curves import (ClosureResiduals, CurveSample, FramedCurve,
                     analytic_helix, closure_residuals, discrete_geometry,
                     parallel_transport_holonomy, ruling_seam_sign)
from .energy import (CONVENTIONS, EnergyReport, narrow_limit_bound,
                     piecewise_surface_energy, sadowsky_density,
                     sadowsky_energy)
from .errors import (BadSampleCount, DegenerateDiameter, DegenerateEdge,
                     DevbandError, InfeasibleDiameter, InfeasibleWidth,
                     LineSearchFailed, LostTopology, NonPositive, NotClosed,
                     SingularDensity, TooFewPoints, UndefinedRuling,
                     ZeroWidth)
from .optim import (OptimizationResult, OptimizerConfig, gradient, minimize,
                    objective, project_uniform_edges, trace_to_csv)
from .strip import (QuadMesh, RuledStrip, export_csv, export_obj, export_svg,
                    gaussian_check, load_obj, rectifying_strip,
                    ruling_directions, width_feasibility)

__all__ = [
    "BandParams", "FlatLayout", "GeneratorLine", "HelicalArc",
    "PiecewiseBand", "PlanarRun", "RodSpec", "SegmentLengths",
    "ValidationReport", "assemble", "flatten", "max_diameter", "max_width",
    "sample_midline", "segment_lengths", "validate",
    "ClosureResiduals", "CurveSample", "FramedCurve", "analytic_helix",
    "closure_residuals", "discrete_geometry", "parallel_transport_holonomy",
    "ruling_seam_sign",
    "CONVENTIONS", "EnergyReport", "narrow_limit_bound",
    "piecewise_surface_energy", "sadowsky_density", "sadowsky_energy",
    "BadSampleCount", "DegenerateDiameter", "DegenerateEdge", "DevbandError",
    "InfeasibleDiameter", "InfeasibleWidth", "LineSearchFailed",
    "LostTopology", "NonPositive", "NotClosed", "SingularDensity",
    "TooFewPoints", "UndefinedRuling", "ZeroWidth",
    "OptimizationResult", "OptimizerConfig", "gradient", "minimize",
    "objective", "project_uniform_edges", "trace_to_csv",
    "QuadMesh", "RuledStrip", "export_csv", "export_obj", "export_svg",
    "gaussian_check", "load_obj", "rectifying_strip", "ruling_directions",
    "width_feasibility",
    "__version__",
]
