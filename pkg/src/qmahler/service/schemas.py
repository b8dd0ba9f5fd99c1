"""Pydantic request/response models: the wire format of the service and the
record format printed by the CLI's JSON mode."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

FieldSpec = Union[int, Literal["Q", "q"]]


class ConfigOptions(BaseModel):
    precision_bits: int = Field(default=128, ge=64, le=4096)
    tie_tolerance: float = Field(default=1e-12, gt=0)


class ValueOut(BaseModel):
    """A log-scale value: exact descriptor when available plus a certified enclosure."""

    exact_form: Optional[str] = None
    decimal: str
    interval_lo: str
    interval_hi: str


# -- field info --------------------------------------------------------------


class FieldInfoRequest(ConfigOptions):
    field: FieldSpec


class UnitGroupOut(BaseModel):
    torsion_order: int
    rank: int
    fundamental_unit: Optional[str] = None
    roots_of_unity: list[str]


class BalanceOut(BaseModel):
    balanced: bool
    criterion_holds: bool
    witness: Optional[str] = None
    detail: dict = Field(default_factory=dict)


class ClassInfoOut(BaseModel):
    minkowski_bound: str
    class_number_one: bool
    class_number: Optional[int] = None
    nonprincipal_witness: Optional[str] = None


class FieldInfoResponse(BaseModel):
    field: str
    d: Optional[int] = None
    discriminant: int
    signature: tuple[int, int]
    ring: str
    unit_group: UnitGroupOut
    balance: BalanceOut
    class_info: ClassInfoOut


# -- element height / measure -------------------------------------------------


class ElementRequest(ConfigOptions):
    field: FieldSpec
    expr: str


class HeightResponse(BaseModel):
    field: str
    element: str
    value: ValueOut


class MeasureResponse(BaseModel):
    base_field: str
    element: str
    element_field: str
    relative_degree: int
    value: ValueOut


# -- ideals -------------------------------------------------------------------


class IdealFactorRequest(ConfigOptions):
    field: FieldSpec
    ideal: str


class PrimePowerOut(BaseModel):
    prime: str
    residue_norm: int
    split_type: str
    exponent: int


class IdealFactorResponse(BaseModel):
    field: str
    ideal: str
    norm: int
    factors: list[PrimePowerOut]


class IdealRefineRequest(ConfigOptions):
    field: FieldSpec
    ideal: str
    parts: list[str]


class IdealRefineResponse(BaseModel):
    field: str
    ideal: str
    parts: list[str]
    refined: list[str]
    refined_norms: list[int]
    product_equals_ideal: bool
    containments: list[bool]


# -- replacement ----------------------------------------------------------------


class ReplaceRequest(ConfigOptions):
    field: FieldSpec
    alpha: str
    factors: list[str]


class HeightCertificateOut(BaseModel):
    index: int
    height: ValueOut
    bound: ValueOut
    holds: bool
    exact: bool


class CertificateCheckOut(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class ReplaceResponse(BaseModel):
    field: str
    alpha: str
    gamma0: str
    gammas: list[str]
    certificates: list[HeightCertificateOut]
    numerator_ideals: list[str]
    denominator_ideals: list[str]
    certified: bool
    checks: list[CertificateCheckOut]


class PowerReplaceRequest(ConfigOptions):
    model_config = ConfigDict(populate_by_name=True)

    field: FieldSpec
    lam: int = Field(alias="lambda", ge=1)
    alpha: str
    factors: list[str]


class PowerReplaceResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    field: str
    lam: int = Field(alias="lambda", serialization_alias="lambda")
    alpha: str
    gamma0_lambda: str
    gamma_lambda_values: list[str]
    certificates: list[HeightCertificateOut]
    certified: bool
    checks: list[CertificateCheckOut]


# -- t-metric -------------------------------------------------------------------


class TMetricRequest(ConfigOptions):
    field: FieldSpec
    alpha: str
    ts: list[str] = Field(alias="t")

    model_config = ConfigDict(populate_by_name=True)


class TMetricEntry(BaseModel):
    t: str
    value: ValueOut
    factors: list[str]
    parts: list[str]
    unit_exponents: Optional[list[int]] = None
    unit_factor: Optional[str] = None
    certificate: dict


class TMetricResponse(BaseModel):
    field: str
    alpha: str
    results: list[TMetricEntry]


# -- verify ---------------------------------------------------------------------


class VerifyRequest(BaseModel):
    suite: str
    seed: int = 0
    instances: Optional[int] = None


class VerifyResponse(BaseModel):
    suite: str
    passed: bool
    checked: int
    failures: list[str]
    elapsed_seconds: float


class ErrorDetail(BaseModel):
    type: str
    message: str


class ErrorResponse(BaseModel):
    error: ErrorDetail
