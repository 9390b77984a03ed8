from app.application.dto.dto import (
    BoundRowDTO,
    BoundsInputDTO,
    BoundsTableDTO,
    ChannelDTO,
    ConstraintRowDTO,
    CurveDTO,
    CurvePointDTO,
    ExperimentDTO,
    ExperimentInputDTO,
    GridDTO,
    GridPointDTO,
    ModelDTO,
    PipelineDTO,
    PovmDumpDTO,
    PovmDumpInputDTO,
    ScanInputDTO,
    SimulateInputDTO,
    SquashCompareInputDTO,
    StatisticsDTO,
    VerdictDTO,
    VerifyInputDTO,
)

__all__ = [
    "BoundRowDTO",
    "BoundsInputDTO",
    "BoundsTableDTO",
    "ChannelDTO",
    "ConstraintRowDTO",
    "CurveDTO",
    "CurvePointDTO",
    "ExperimentDTO",
    "ExperimentInputDTO",
    "GridDTO",
    "GridPointDTO",
    "ModelDTO",
    "PipelineDTO",
    "PovmDumpDTO",
    "PovmDumpInputDTO",
    "ScanInputDTO",
    "SimulateInputDTO",
    "SquashCompareInputDTO",
    "StatisticsDTO",
    "VerdictDTO",
    "VerifyInputDTO",
]
