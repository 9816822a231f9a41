"""Pydantic request/response models shared by the HTTP service and the CLI.

Field profiles mirror the JSON config documents, e.g.

    {"kind": "step", "omega0": 1.0, "omega1": 4.0, "t_jump": 0.0}

Complex coherent-state parameters travel as [re, im] pairs.  Every
response carries a :class:`RunManifest`; re-running a manifest (same
seed) reproduces the numerical payload bit-identically, so wall time is
reported next to the manifest, never inside it.
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field, model_validator

from . import __version__
from .envelope import FieldProfile, profile_from_config

SCHEMA_VERSION = 1


class ConstantFieldConfig(BaseModel):
    kind: Literal["constant"]
    omega0: float = Field(gt=0)


class StepFieldConfig(BaseModel):
    kind: Literal["step"]
    omega0: float = Field(gt=0)
    omega1: float = Field(gt=0)
    t_jump: float = 0.0


class SmoothRampFieldConfig(BaseModel):
    kind: Literal["smooth-ramp"]
    omega0: float = Field(gt=0)
    omega1: float = Field(gt=0)
    t_center: float = 0.0
    width: float = Field(default=1.0, gt=0)


class TabulatedFieldConfig(BaseModel):
    kind: Literal["tabulated"]
    samples: list[tuple[float, float]]
    order: int = 3


FieldConfig = Annotated[
    Union[ConstantFieldConfig, StepFieldConfig, SmoothRampFieldConfig,
          TabulatedFieldConfig],
    Field(discriminator="kind"),
]


def to_profile(config: FieldConfig) -> FieldProfile:
    return profile_from_config(config.model_dump())


class StateSpec(BaseModel):
    kind: Literal["fock", "coherent"]
    n1: int | None = Field(default=None, ge=0)
    n2: int | None = Field(default=None, ge=0)
    alpha: tuple[float, float] | None = None
    beta: tuple[float, float] | None = None

    @model_validator(mode="after")
    def _complete(self):
        if self.kind == "fock" and (self.n1 is None or self.n2 is None):
            raise ValueError("fock state needs n1 and n2")
        if self.kind == "coherent" and (self.alpha is None or self.beta is None):
            raise ValueError("coherent state needs alpha and beta")
        return self

    def label(self):
        from . import states
        if self.kind == "fock":
            return states.Fock(self.n1, self.n2)
        return states.Coherent(complex(*self.alpha), complex(*self.beta))


class RunManifest(BaseModel):
    """Deterministic run descriptor embedded in every output."""

    command: str
    schema_version: int = SCHEMA_VERSION
    tool_version: str = __version__
    profile_hash: str | None = None
    seed: int | None = None
    params: dict


# ---------------------------------------------------------------------------
# Tomogram grids


class TomogramRequest(BaseModel):
    state: StateSpec
    field: FieldConfig
    time: float | None = None          # evolve varying fields to this instant
    mu: tuple[float, float] = (0.0, 0.0)
    nu: tuple[float, float] = (1.0, 1.0)
    grid_n: int = Field(default=64, ge=4, le=512)
    x_max: float | None = Field(default=None, gt=0)
    envelope_tol: float = Field(default=1e-12, gt=0)

    @model_validator(mode="after")
    def _frames(self):
        for m, n in zip(self.mu, self.nu):
            if m == 0.0 and n == 0.0:
                raise ValueError("(mu_j, nu_j) must not be (0, 0)")
        return self


class TomogramResponse(BaseModel):
    manifest: RunManifest
    columns: list[str]
    rows: list[list[float]]
    normalization_sum: float
    wall_time_s: float


# ---------------------------------------------------------------------------
# Transitions


class TransitionRequest(BaseModel):
    profile: FieldConfig
    n_max: int = Field(default=1, ge=0, le=6)
    routes: list[Literal["overlap", "jacobi", "tomographic"]] = \
        ["overlap", "jacobi"]
    samples: int = Field(default=1_000_000, ge=1000)
    strata: int = Field(default=2500, ge=1)
    seed: int = 0
    consistency_tol: float = Field(default=1e-6, gt=0)
    envelope_tol: float = Field(default=1e-12, gt=0)


class TransitionRecord(BaseModel):
    initial: tuple[int, int]
    final: tuple[int, int]
    route: str
    value: float
    stderr: float
    samples: int
    profile_hash: str


class RowSum(BaseModel):
    initial: tuple[int, int]
    total: float
    tail_bound: float


class TransitionResponse(BaseModel):
    manifest: RunManifest
    records: list[TransitionRecord]
    row_sums: list[RowSum]
    reflection: float
    consistent: bool
    max_route_disagreement: float
    wall_time_s: float


# ---------------------------------------------------------------------------
# Reflection sweeps


class ReflectionRequest(BaseModel):
    kind: Literal["step", "smooth-ramp"] = "step"
    omega0: float = Field(default=1.0, gt=0)
    omega1_values: list[float] = [1.0, 2.0, 4.0]
    width_values: list[float] | None = None   # sweep widths instead
    omega1: float = 4.0                       # fixed omega1 for width sweeps
    width: float = Field(default=1.0, gt=0)
    routes: list[Literal["envelope", "tomographic"]] = ["envelope"]
    samples: int = Field(default=200_000, ge=1000)
    strata: int = Field(default=400, ge=1)
    seed: int = 0
    envelope_tol: float = Field(default=1e-12, gt=0)


class ReflectionRow(BaseModel):
    parameter: str
    value: float
    r_envelope: float | None = None
    r_tomographic: float | None = None
    stderr: float | None = None


class ReflectionResponse(BaseModel):
    manifest: RunManifest
    rows: list[ReflectionRow]
    wall_time_s: float


# ---------------------------------------------------------------------------
# Validation suite


class ValidateRequest(BaseModel):
    fast: bool = True
    seed: int = 0


class CheckResult(BaseModel):
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


class ValidateResponse(BaseModel):
    manifest: RunManifest
    checks: list[CheckResult]
    passed: bool
    wall_time_s: float
