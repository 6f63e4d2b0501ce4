"""Saddle-focus return maps: iteration, symbolic dynamics, stability and bifurcation curves."""

__version__ = "0.1.0"

from .analysis import (OrbitDiagnosis, SeedRule, cobweb, detect_period, find_fixed_point, lyapunov,
                       newton_periodic, orbit_diagram)
from .curves import (Curve, CurveLabel, CurveSet, belyakov_explicit, belyakov_implicit, extract_zero_contours,
                     find_secondary, gamma_g, gamma_p)
from .errors import (DegenerateParameterError, DomainError, EmptyResultError, EmptySequenceError,
                     NonFiniteError, SaddleFocusError)
from .mapcore import (Branch, MapParams, Status, Trajectory, Variant, derivative, invariant_bound, iterate,
                      step, step_from_origin)
from .sweep import AxisSpec, FieldKind, FieldSpec, SweepGrid, field_eval, run_sweep
from .symbolic import SymbolSequence, embed, encode, lempel_ziv, normalized_lz, truncate_one_sided
