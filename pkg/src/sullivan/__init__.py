"""Exact rational homotopy computations on commutative differential graded algebras."""

from __future__ import annotations

from .algebra import CDGA, AlgebraError, AlgebraMap, Derivation, FreeCGA, Generator, check_differential
from .cohomology import (CohomologyEngine, FiniteGradedAlgebra, cohomology, induced_map, is_exact, presentation,
                         quotient_algebra)
from .dsl import AlgebraDocument, DocumentError, from_json, load, load_file, parse, to_json
from .formality import (FormalUpTo, NonFormal, decide, decide_formality, map_formality_certificate,
                        module_derivation_replay, negative_derivations, tncz_analyze)
from .models import (BigradedModel, FilteredModel, ModelError, bigraded_model, filtered_from_bigrading,
                     filtered_model, minimal_model)
from .relative import FibrationModel, RelativeModel

__version__ = "0.1.0"

__all__ = [
    "AlgebraDocument", "AlgebraError", "AlgebraMap", "BigradedModel", "CDGA", "CohomologyEngine", "Derivation",
    "DocumentError", "FibrationModel", "FilteredModel", "FiniteGradedAlgebra", "FormalUpTo", "FreeCGA",
    "Generator", "ModelError", "NonFormal", "RelativeModel", "bigraded_model", "check_differential", "cohomology",
    "decide", "decide_formality", "filtered_from_bigrading", "filtered_model", "from_json", "induced_map",
    "is_exact", "load", "load_file", "map_formality_certificate", "minimal_model", "module_derivation_replay",
    "negative_derivations", "parse", "presentation", "quotient_algebra", "tncz_analyze", "to_json",
]
