from app.application.use_cases.base import UseCase, VerifierUseCase
from app.application.use_cases.compute_bounds import ComputeBoundsUseCase
from app.application.use_cases.dump_povm import DumpPovmUseCase
from app.application.use_cases.run_experiment import RunExperimentUseCase
from app.application.use_cases.scan_eta_min import ScanEtaMinUseCase
from app.application.use_cases.simulate_statistics import SimulateStatisticsUseCase
from app.application.use_cases.squash_compare import SquashCompareUseCase
from app.application.use_cases.verify_entanglement import VerifyEntanglementUseCase

__all__ = [
    "ComputeBoundsUseCase",
    "DumpPovmUseCase",
    "RunExperimentUseCase",
    "ScanEtaMinUseCase",
    "SimulateStatisticsUseCase",
    "SquashCompareUseCase",
    "UseCase",
    "VerifierUseCase",
    "VerifyEntanglementUseCase",
]
