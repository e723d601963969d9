from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.algebra import Element
from ..core.errors import ConfigError, DimensionMismatchError, InvalidInputError, NCTorusError
from ..core.phases import FloatTheta, IrrationalBasis, ThetaData, UnitPhase, to_fraction
from ..core.weights import LatticeNorm, Weight, WeightKind
from ..core import weights as wt
from ..engines.spectral import MAX_TRUNCATION_ROWS

DEFAULT_CONFIG = Path("config.json")

RationalPair = Tuple[int, int]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class VarthetaEntry(_Model):
    """One strictly lower entry vartheta_{kj}; either exact or a float `value`."""

    k: int
    j: int
    r0: Optional[RationalPair] = None
    irr: Dict[int, RationalPair] = Field(default_factory=dict)
    value: Optional[float] = None

    @model_validator(mode="after")
    def _exact_or_float(self) -> "VarthetaEntry":
        if self.value is not None and (self.r0 is not None or self.irr):
            raise ValueError("give either r0/irr or a float value, not both")
        for pair in ([self.r0] if self.r0 else []) + list(self.irr.values()):
            if pair[1] == 0:
                raise ValueError("zero denominator")
        return self


class ThetaConfig(_Model):
    n: int = Field(ge=1)
    alphas: List[float] = Field(default_factory=list)
    vartheta: List[VarthetaEntry] = Field(default_factory=list)

    @property
    def float_mode(self) -> bool:
        return any(e.value is not None for e in self.vartheta)

    def build(self) -> Union[ThetaData, FloatTheta]:
        if self.float_mode:
            values = []
            for e in self.vartheta:
                if e.value is not None:
                    angle = e.value
                else:
                    angle = float(to_fraction(list(e.r0 or (0, 1))))
                    for t, c in e.irr.items():
                        if t >= len(self.alphas):
                            raise InvalidInputError(f"alpha_{t} missing from alphas")
                        angle += float(to_fraction(list(c))) * self.alphas[t]
                values.append(((e.k, e.j), angle))
            out = FloatTheta(self.n, tuple(values))
            for (k, j), _ in out.values:
                if not 1 <= j < k <= self.n:
                    raise InvalidInputError(f"vartheta entry ({k},{j}) is not strictly lower triangular")
            return out
        entries = {}
        for e in self.vartheta:
            if (e.k, e.j) in entries:
                raise InvalidInputError(f"duplicate vartheta entry ({e.k},{e.j})")
            irr = {t: list(c) for t, c in e.irr.items()}
            entries[(e.k, e.j)] = UnitPhase.of(list(e.r0 or (0, 1)), irr)
        return ThetaData.build(self.n, entries, IrrationalBasis(tuple(self.alphas)))


class TableEntry(_Model):
    x: List[int]
    value: float


class WeightConfig(_Model):
    kind: WeightKind = WeightKind.CONSTANT
    s: float = 0.0
    a: float = 0.0
    b: float = 0.0
    norm: LatticeNorm = LatticeNorm.L2
    factors: List["WeightConfig"] = Field(default_factory=list)
    table: List[TableEntry] = Field(default_factory=list)
    fallback: Optional["WeightConfig"] = None

    def build(self) -> Weight:
        kind = self.kind
        if kind is WeightKind.CONSTANT:
            return wt.constant_one()
        if kind is WeightKind.POLYNOMIAL:
            return wt.polynomial(self.s, self.norm)
        if kind is WeightKind.SUBEXPONENTIAL:
            return wt.subexponential(self.a, self.b, self.norm)
        if kind is WeightKind.EXPONENTIAL:
            return wt.exponential(self.a, self.norm)
        if kind is WeightKind.PRODUCT:
            return wt.product(*(f.build() for f in self.factors))
        table = {}
        for entry in self.table:
            key = tuple(entry.x)
            if key in table:
                raise InvalidInputError(f"duplicate custom weight entry at {key}")
            table[key] = entry.value
        return wt.custom(table, self.fallback.build() if self.fallback else None)


WeightConfig.model_rebuild()


class Tolerances(_Model):
    inversion_tol: float = Field(default=1e-10, gt=0)
    opnorm_tol: float = Field(default=1e-9, gt=0)
    max_terms: int = Field(default=200, ge=1)
    truncation_n: int = Field(default=6, ge=1)
    quad_points: int = Field(default=64, ge=1)
    max_rows: int = Field(default=MAX_TRUNCATION_ROWS, ge=1, le=MAX_TRUNCATION_ROWS)


class SuiteSizes(_Model):
    cocycle: int = Field(default=2000, ge=1)
    algebra: int = Field(default=100, ge=1)
    weights: int = Field(default=2000, ge=1)
    extension: int = Field(default=100, ge=1)


class RunConfig(_Model):
    theta: ThetaConfig
    weight: WeightConfig = Field(default_factory=WeightConfig)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    suites: SuiteSizes = Field(default_factory=SuiteSizes)
    seed: int = 0
    heuristic_box: int = Field(default=6, ge=1)

    @model_validator(mode="after")
    def _truncation_fits(self) -> "RunConfig":
        rows = (2 * self.tolerances.truncation_n + 1) ** self.theta.n
        if rows > self.tolerances.max_rows:
            raise ValueError(
                f"truncation N={self.tolerances.truncation_n} needs {rows} rows, cap is {self.tolerances.max_rows}"
            )
        return self


class ElementEntry(_Model):
    x: List[int]
    re: float = 0.0
    im: float = 0.0


def _read_json(path: Union[str, Path]) -> Any:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"file not found: {p}")
    try:
        return orjson.loads(p.read_bytes())
    except orjson.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON: {exc}") from exc


def config_from_dict(data: Mapping[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config(path: Union[str, Path] = DEFAULT_CONFIG) -> RunConfig:
    """Load and validate a run config.

    Raises:
        FileNotFoundError: if the file is missing
        ConfigError: if the JSON or its schema is invalid
    """
    return config_from_dict(_read_json(path))


def build_theta(config: RunConfig) -> Union[ThetaData, FloatTheta]:
    try:
        return config.theta.build()
    except NCTorusError as exc:
        raise ConfigError(f"invalid theta: {exc}") from exc


def build_weight(config: RunConfig) -> Weight:
    try:
        return config.weight.build()
    except NCTorusError as exc:
        raise ConfigError(f"invalid weight: {exc}") from exc


def element_from_list(theta: ThetaData, data: Any) -> Element:
    if not isinstance(data, list):
        raise ConfigError("element file must hold a JSON array")
    coeffs: Dict[Tuple[int, ...], complex] = {}
    for raw in data:
        try:
            entry = ElementEntry.model_validate(raw)
        except ValidationError as exc:
            raise ConfigError(f"invalid element entry {raw!r}: {exc}") from exc
        key = tuple(entry.x)
        if len(key) != theta.n:
            raise DimensionMismatchError(f"element point {key} has dimension {len(key)}, expected {theta.n}")
        if key in coeffs:
            raise ConfigError(f"duplicate element entry at {key}")
        coeffs[key] = complex(entry.re, entry.im)
    return Element(theta, coeffs)


def load_element(path: Union[str, Path], theta: ThetaData) -> Element:
    return element_from_list(theta, _read_json(path))


def element_to_list(f: Element) -> List[Dict[str, Any]]:
    return [{"x": list(x), "re": c.real, "im": c.imag} for x, c in f.coeffs.items()]

