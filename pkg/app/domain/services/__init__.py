from app.domain.services.channel import simulate_statistics, squash_statistics, verify_squashed
from app.domain.services.detectors import renormalize
from app.domain.services.evm import EVMProblem, compile_problem
from app.domain.services.fockspace import enumerate_basis
from app.domain.services.idealops import OperatorDictionary, build_dictionary
from app.domain.services.photon_bounds import bound_table, photon_tail_bounds
from app.domain.services.povm import PovmSet, build_povm, verify_povm_relations
from app.domain.services.verdicts import FeasibilityVerdict, verify

__all__ = [
    "EVMProblem",
    "FeasibilityVerdict",
    "OperatorDictionary",
    "PovmSet",
    "bound_table",
    "build_dictionary",
    "build_povm",
    "compile_problem",
    "enumerate_basis",
    "photon_tail_bounds",
    "renormalize",
    "simulate_statistics",
    "squash_statistics",
    "verify",
    "verify_povm_relations",
    "verify_squashed",
]
