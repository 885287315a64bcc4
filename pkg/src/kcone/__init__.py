from .errors import (
    KConeError,
    DegenerateInputError,
    PreconditionError,
    ValidityError,
    BlowdownImpossible,
    SearchExhaustedError,
    RankError,
    NoProgressionError,
    IdentityViolation,
    AssemblyError,
    IntegrityError,
)
from .exactnum import QuadNumber, Mat3Z, delzant_witness, is_delzant_pair
from .cone import GoodCone, ValidityReport, validate, face_invariants, can_blowdown_to_orbit
from .reeb import ReebVector, rank_of, is_admissible, isotropy_profile, choose_transverse_circle
from .surgery import (
    cut,
    blowdown_delete,
    replace_range,
    find_blowdown_normal,
    plan_blowdown_sequence,
    replay,
    solve_local_blowup,
)
from .euler import verify_global_identity
from .graph import IsotropyGraph, extract_graph, canonical_form, isomorphic, assemble_fiber_sum
from .construct import Family, example_family, obstructed_family, close_chain
from .document import Document


__all__ = [
    "KConeError",
    "DegenerateInputError",
    "PreconditionError",
    "ValidityError",
    "BlowdownImpossible",
    "SearchExhaustedError",
    "RankError",
    "NoProgressionError",
    "IdentityViolation",
    "AssemblyError",
    "IntegrityError",
    "QuadNumber",
    "Mat3Z",
    "delzant_witness",
    "is_delzant_pair",
    "GoodCone",
    "ValidityReport",
    "validate",
    "face_invariants",
    "can_blowdown_to_orbit",
    "ReebVector",
    "rank_of",
    "is_admissible",
    "isotropy_profile",
    "choose_transverse_circle",
    "cut",
    "blowdown_delete",
    "replace_range",
    "find_blowdown_normal",
    "plan_blowdown_sequence",
    "replay",
    "solve_local_blowup",
    "verify_global_identity",
    "IsotropyGraph",
    "extract_graph",
    "canonical_form",
    "isomorphic",
    "assemble_fiber_sum",
    "Family",
    "example_family",
    "obstructed_family",
    "close_chain",
    "Document",
]
