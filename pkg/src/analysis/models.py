"""Records produced by spectrum post-processing.

Spectra are kept as sorted lists of finite ``mpc`` eigenvalues with a
pydantic metadata block; convergence rows pair an (N, P) configuration with
its Hausdorff distance to a reference spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.chebtau import FlowProfile
from src.precision import MPComplex, MPReal, machine_epsilon


class SpectrumMeta(BaseModel):
    """Provenance of a computed spectrum (the ``meta`` block of a spectrum file)."""

    flow: str = Field(..., description="poiseuille, couette or godunov")
    re: str | None = Field(default=None, description="Exact Reynolds number")
    a: str | None = Field(default=None, description="Exact wavenumber")
    method: str | None = Field(default=None, description="d2, d4, or None for plain matrices")
    N: int = Field(..., ge=0)
    P: int = Field(..., ge=2)
    infinite_count: int = Field(default=0, ge=0)
    wall_time_s: float = Field(default=0.0, ge=0)
    notes: list[str] = Field(default_factory=list)
    qz: dict[str, Any] | None = Field(default=None, description="QZConfig used for the solve")

    def identity(self) -> tuple[str, str | None, str | None, str | None, int, int]:
        """The problem fields that determine the eigenvalues (timing and notes excluded)."""
        return (self.flow, self.re, self.a, self.method, self.N, self.P)


def _order_key(z: Any) -> tuple[Any, Any]:
    return (z.real, z.imag)


@dataclass
class SpectrumSet:
    """Finite eigenvalues sorted by (real, imag), plus metadata."""

    eigenvalues: list[MPComplex]
    meta: SpectrumMeta

    def __post_init__(self) -> None:
        self.eigenvalues = sorted(self.eigenvalues, key=_order_key)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def __iter__(self) -> Any:
        return iter(self.eigenvalues)

    def with_eigenvalues(self, values: list[MPComplex]) -> SpectrumSet:
        return SpectrumSet(values, self.meta.model_copy(deep=True))


class Region(BaseModel):
    """Closed rectangle in the complex plane."""

    model_config = ConfigDict(frozen=True)

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    @model_validator(mode="after")
    def _ordered(self) -> Region:
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise ValueError("region bounds must satisfy min <= max")
        return self

    @classmethod
    def for_flow(cls, flow: FlowProfile | str) -> Region:
        """The comparison rectangle of a flow: imag in [−1, 0], real in [0, 1] or [−1, 1]."""
        re_min, re_max, im_min, im_max = FlowProfile.of(flow).region_bounds
        return cls(
            re_min=float(re_min), re_max=float(re_max), im_min=float(im_min), im_max=float(im_max)
        )

    def contains(self, z: Any) -> bool:
        return bool(
            self.re_min <= z.real <= self.re_max and self.im_min <= z.imag <= self.im_max
        )


class ConvergenceRecord(BaseModel):
    """Hausdorff distance of one (N, P) spectrum to the reference run.

    ``d_H`` is ``None`` when the record is flagged (solver failure or empty
    comparison set); ``reason`` then says why.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    N: int = Field(..., ge=0)
    P: int = Field(..., ge=2)
    d_H: Any = None
    reference: SpectrumMeta
    flagged: bool = False
    reason: str | None = None
    wall_time_s: float = 0.0

    @field_validator("d_H")
    @classmethod
    def _non_negative(cls, v: Any) -> Any:
        if v is not None and v < 0:
            raise ValueError("d_H must be non-negative")
        return v

    @property
    def eps_P(self) -> MPReal:
        return machine_epsilon(self.P)

    @property
    def key(self) -> tuple[int, int]:
        return (self.N, self.P)
