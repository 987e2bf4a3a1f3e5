"""Exact computations in the spatial Semple tower: prolongations, RVT codes and orbits."""

from .critical import (Arrangement, RVTWord, arrangements_along, enumerate_classes,
                       rvt_code, rvt_code_point)
from .curves import format_curve, parse_curve
from .errors import SempleError
from .jets import MapJet, MultiSeries, TruncSeries
from .prolong import canonical_chart, prolong_diffeo
from .symmetry import (OrbitCount, OrbitVerdict, equivalent, fiber_orbit_partition,
                       isotropy_algebra, isotropy_sample, orbit_count)
from .tower import CurveJet, TowerPoint, project, prolong_curve

__version__ = "0.1.0"

__all__ = [
    "Arrangement", "CurveJet", "MapJet", "MultiSeries", "OrbitCount", "OrbitVerdict",
    "RVTWord", "SempleError", "TowerPoint", "TruncSeries", "arrangements_along",
    "canonical_chart", "enumerate_classes", "equivalent", "fiber_orbit_partition",
    "format_curve", "isotropy_algebra", "isotropy_sample", "orbit_count", "parse_curve",
    "project", "prolong_curve", "prolong_diffeo", "rvt_code", "rvt_code_point",
]
