"""Numerical laboratory for quantum reference frames on truncated Hilbert spaces."""

__version__ = "0.1.0"

from .errors import (EmptySelection, ParseError, QuadratureError, QuadratureWarning,
                     RelaframeError, SequenceError, ShapeError, StateError,
                     TruncationError, ValidationError)
from .hilbert import (Operator, SpaceShape, State, Vector, coherent_state, expectation,
                      partial_trace_reference, tensor, trace_distance)
from .symmetry import NumberOperator, composite_number, phase_shift, tau, tau_star, twirl
from .povm import (ArcPartition, NumberPhasePair, PhasePOVM, canonical_phase,
                   covariance_defect, cyclic_angle_pvm, measure_of_state, norm1_diagnostic)
from .relativise import (RelativisationContext, SuperOperator, choi_cp_check, gamma_restrict,
                         gamma_yen, invariance_check, star_hom_defect, yen, yen_star,
                         yen_star_product)
from .coherence import (CoherenceReport, LocalisationSequence, absolute_vs_relative,
                        derelativised_state_limit, homodyne_compare,
                        mutual_coherence_witness, relational_state)
