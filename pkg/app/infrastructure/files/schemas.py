from __future__ import annotations

from pathlib import Path
from typing import Annotated, Literal, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

Probability = Annotated[float, Field(ge=0.0, le=1.0)]


class ModelFile(BaseModel):
    """Detector-model config: an efficiency table or the scalar ``eta`` shortcut."""

    model_config = ConfigDict(extra="forbid")

    scheme: Literal["active", "passive"]
    spatial_modes: int = Field(default=1, ge=1)
    efficiencies: list[list[Probability]] | None = None
    eta: Probability | None = None
    label: str = ""

    @model_validator(mode="after")
    def _one_source(self) -> Self:
        if (self.efficiencies is None) == (self.eta is None):
            raise ValueError("give exactly one of 'efficiencies' and 'eta'")
        if self.efficiencies is not None and len(self.efficiencies) != self.spatial_modes:
            raise ValueError(
                f"{len(self.efficiencies)} efficiency rows for {self.spatial_modes} spatial modes"
            )
        return self


class ChannelFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    omega: Probability = 0.0
    loss: Probability = 0.0
    multi_photon: Probability = 0.0
    # ``null`` is an infinite resend.
    n_resend: Annotated[int, Field(ge=1)] | None = None


class PipelineFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cutoff: int | None = Field(default=None, ge=2)
    max_ideal_grade: int | None = Field(default=None, ge=-1)
    renormalize: bool = True
    extended_pair_set: bool = False


class ExperimentEntry(BaseModel):
    """One experiment of a batch spec."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    kind: Literal[
        "bounds-table", "eta-min-curve", "tradeoff-curve", "squash-compare", "verify-single"
    ]
    model: ModelFile | None = None
    model_file: Path | None = None
    channel: ChannelFile = ChannelFile()
    omegas: list[Probability] = []
    multi_photons: list[Probability] = []
    etas: list[Probability] = []
    eta_range: tuple[Probability, Probability] = (0.0, 1.0)
    max_grade: int = Field(default=8, ge=3)
    baseline: Literal["squash", "measurement-only"] = "squash"
    pipeline: PipelineFile = PipelineFile()
    out: Path | None = None

    @model_validator(mode="after")
    def _grids(self) -> Self:
        if (self.model is None) == (self.model_file is None):
            raise ValueError("give exactly one of 'model' and 'model_file'")
        if self.eta_range[0] >= self.eta_range[1]:
            raise ValueError(f"empty eta range {self.eta_range}")
        needed: dict[str, tuple[str, ...]] = {
            "eta-min-curve": ("omegas",),
            "tradeoff-curve": ("etas",),
            "squash-compare": ("omegas", "multi_photons"),
        }
        for grid in needed.get(self.kind, ()):
            if not getattr(self, grid):
                raise ValueError(f"{self.kind} needs a non-empty '{grid}' grid")
        return self


class ExperimentFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    experiments: list[ExperimentEntry] = Field(min_length=1)
