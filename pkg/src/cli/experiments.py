"""Parameter records of the CLI commands.

A command's parameters come from ``--config`` JSON and flags, and are
validated into one of these models before anything runs.
"""

from __future__ import annotations

from typing import Annotated, Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

from src.pde.radial_heat import RadialGrid
from src.simulation.models import ExperimentGeometry, InitialDatum, PathGrid, PotentialSpec

Dim = Annotated[int, Field(ge=1, le=4096)]
Alpha = Annotated[float, Field(gt=0.0, lt=2.0)]
Point = Union[float, tuple[float, ...]]


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ZerosParams(_Params):
    mu: Annotated[float, Field(gt=-1.0, description="Bessel order")]
    count: Annotated[int, Field(ge=1, le=100_000)] = 20


class ConfineParams(_Params):
    N: Dim
    rho: list[Annotated[float, Field(ge=0.0, lt=1.0)]] = [0.0]
    T: list[Annotated[float, Field(gt=0.0)]] = [0.5]
    mc_paths: Annotated[int | None, Field(ge=100, description="Also run the random-walk oracle")] = None
    mc_steps: Annotated[int, Field(ge=1)] = 200


LawName = Literal["subordinator", "hitting_time", "local_time", "last_zero", "meander", "relativistic_clock", "cauchy", "stable_endpoint"]


class LawSampleParams(_Params):
    law: LawName
    n: Annotated[int, Field(ge=1, le=10_000_000)] = 1000
    alpha: Alpha = 1.0
    t: Annotated[float, Field(gt=0.0)] = 1.0
    a: Annotated[float, Field(gt=0.0, description="Passage level")] = 1.0
    x: float = 0.0
    m: Annotated[float, Field(gt=0.0, description="Relativistic mass")] = 1.0
    N: Dim = 1


class CheckParams(_Params):
    names: list[str] = []
    n_draws: Annotated[int, Field(ge=1000)] = 1_000_000


class ConstantsParams(_Params):
    dims: list[Dim] = list(range(3, 21))
    alpha: list[Alpha] = [0.5, 1.0, 1.5]

    @field_validator("dims")
    @classmethod
    def _non_empty(cls, value: list[int]) -> list[int]:
        if not value:
            raise ValueError("dims must not be empty")
        return value


class _PathRun(_Params):
    N: Dim
    t: Annotated[float, Field(gt=0.0)]
    x: Point = 0.0
    potential: PotentialSpec
    initial: InitialDatum = InitialDatum()
    grid: PathGrid


class FullspaceRun(_PathRun):
    setting: Literal["fullspace"]


class StableRun(_PathRun):
    setting: Literal["stable"]
    alpha: Alpha


class HalfspaceRun(_PathRun):
    setting: Literal["halfspace"]


class BesselRun(_Params):
    setting: Literal["bessel"]
    N: Annotated[int, Field(ge=3, le=4096)]
    c: Annotated[float, Field(ge=0.0)]
    cap: Annotated[float, Field(gt=0.0)]
    t: Annotated[float, Field(gt=0.0)]
    r0: Annotated[float, Field(gt=0.0)]
    initial: InitialDatum = InitialDatum()
    grid: PathGrid


class ConfinementRun(_Params):
    setting: Literal["confinement"]
    N: Dim
    rho: Annotated[float, Field(ge=0.0, lt=1.0)] = 0.0
    T: Annotated[float, Field(gt=0.0)]
    n_paths: Annotated[int, Field(ge=100)] = 100_000
    n_steps: Annotated[int, Field(ge=1)] = 200


class EventRateRun(_Params):
    setting: Literal["event_rate"]
    N: Dim
    t: Annotated[float, Field(gt=0.0)] = 1.0
    x: Point = 0.0
    geometry: ExperimentGeometry = ExperimentGeometry()
    n_list: list[Annotated[int, Field(ge=1)]] = list(range(2, 9))
    c: Annotated[float | None, Field(ge=0.0, description="Report the n^2 coefficient of the lower bound at this strength")] = None


class BoundaryRun(_Params):
    setting: Literal["boundary"]
    nu: Annotated[float, Field(ge=0.0)]
    t: Annotated[float, Field(gt=0.0)]
    x_N: float = 0.0
    geometry: ExperimentGeometry = ExperimentGeometry()


FkRunParams = Annotated[
    Union[FullspaceRun, StableRun, HalfspaceRun, BesselRun, ConfinementRun, EventRateRun, BoundaryRun],
    Field(discriminator="setting"),
]
FK_RUN = TypeAdapter(FkRunParams)


class PdeCompare(_Params):
    x: Point = 1.0
    paths: PathGrid


class PdeSolveParams(_Params):
    N: Annotated[int, Field(ge=2, le=4096)]
    potential: PotentialSpec
    initial: InitialDatum = InitialDatum()
    t: Annotated[float, Field(gt=0.0)]
    grid: RadialGrid = RadialGrid()
    compare: PdeCompare | None = None


class SweepParams(_Params):
    setting: Literal["fullspace", "stable", "halfspace"]
    N: Dim
    c_list: Annotated[list[Annotated[float, Field(ge=0.0)]], Field(min_length=1)]
    m_list: Annotated[list[Annotated[float, Field(gt=0.0)]], Field(min_length=2)]
    t: Annotated[float, Field(gt=0.0)]
    x: Point = 0.0
    grid: PathGrid
    alpha: Alpha | None = None
    beta: Annotated[float | None, Field(ge=0.0)] = None
    initial: InitialDatum | None = None
    plateau_cutoff: Annotated[float | None, Field(gt=1.0)] = None

    @model_validator(mode="after")
    def _stable_needs_alpha(self) -> "SweepParams":
        if self.setting == "stable" and self.alpha is None:
            raise ValueError("stable sweeps need alpha")
        if any(b <= a for a, b in zip(self.m_list, self.m_list[1:])):
            raise ValueError("m_list must increase strictly")
        return self


Command = Literal["zeros", "confine", "law sample", "law check", "appendix check", "constants", "fk run", "pde solve", "sweep"]

PARAMS: dict[str, Any] = {
    "zeros": TypeAdapter(ZerosParams),
    "confine": TypeAdapter(ConfineParams),
    "law sample": TypeAdapter(LawSampleParams),
    "law check": TypeAdapter(CheckParams),
    "appendix check": TypeAdapter(CheckParams),
    "constants": TypeAdapter(ConstantsParams),
    "fk run": FK_RUN,
    "pde solve": TypeAdapter(PdeSolveParams),
    "sweep": TypeAdapter(SweepParams),
}


class ExperimentConfig(_Params):
    """One invocation: the command, its raw parameters and the run-wide options."""

    command: Command
    params: dict[str, Any] = {}
    seed: Annotated[int, Field(ge=0, lt=2**64)]
    out: str | None = None
    format: Literal["json", "csv"] | None = None
