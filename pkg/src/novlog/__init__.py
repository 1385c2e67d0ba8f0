"""novlog: exact arithmetic over twisted Laurent series rings.

Tools for computing with the completed group rings attached to a group
G with a surjection onto Z: twisted power/Laurent series with rational
group-algebra coefficients, logarithms of Witt vectors, trace
logarithms of invertible matrices, torsion of based acyclic complexes,
and closed-orbit counting series for labeled digraph models, together
with the cross-checks tying those quantities to each other.
"""

from .errors import (
    BadLabelLevel,
    NonAbelianGroup,
    NonUnitLeading,
    NoUnitPivot,
    NotAcyclicOrNoPivot,
    NotInKernel,
    NotUnipotentModT,
    NovlogError,
    ParseError,
    PositiveValuationRequired,
    PrecisionExhausted,
    SingularConstantTerm,
    TruncationMismatch,
    UnsupportedGroup,
    ValidationError,
)
from .dynamics import (
    DegreeModel,
    LabeledOrbitModel,
    MainTheoremReport,
    ModelEdge,
    TauMatrix,
    ZetaSeries,
    abelian_zeta,
    build_tau,
    eta_direct,
    eta_from_traces,
    main_theorem_check,
    power_trace,
    zeta_det,
    zeta_from_counts,
)
from .groups import ConjClass, GroupElement, TwistedGroup
from .k1 import (
    SeriesMatrix,
    class_log,
    constant_inverse,
    gauss_reduce,
    laurent_class_log,
    matrix_log_trace,
)
from .series import AlgebraElement, TruncatedSeries
from .torsion import (
    BasedComplex,
    TorsionClass,
    chain_contraction,
    mapping_cone,
    torsion,
    torsion_of_map,
)
from .wittlog import (
    ClassSeries,
    bch_defect,
    commutator_factorize,
    commutator_product,
    project_to_classes,
    series_exp,
    series_log,
    witt_log,
)

__version__ = "0.1.0"
