from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError

Point = Tuple[int, ...]

# Relative slack allowed in the sampled axiom checks.
AXIOM_SLACK = 1e-12


class WeightKind(str, Enum):
    CONSTANT = "constant-one"
    POLYNOMIAL = "polynomial"
    SUBEXPONENTIAL = "subexponential"
    EXPONENTIAL = "exponential"
    PRODUCT = "product"
    CUSTOM = "custom"


class LatticeNorm(str, Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"


_ORD = {LatticeNorm.L1: 1, LatticeNorm.L2: 2, LatticeNorm.LINF: np.inf}


def lattice_norm(x: Sequence[int], norm: LatticeNorm = LatticeNorm.L2) -> float:
    if len(x) == 0:
        return 0.0
    return float(np.linalg.norm(np.asarray(x, dtype=float), ord=_ORD[LatticeNorm(norm)]))


@dataclass(frozen=True)
class Weight:
    """Submultiplicative symmetric weight on Z^n, described by its family.

    - polynomial: (1 + |x|)^s, s >= 0
    - subexponential: exp(a |x|^b), a > 0, 0 < b < 1
    - exponential: exp(a |x|), a > 0
    - product: pointwise product of `factors`
    - custom: finite `table` with `fallback` elsewhere (constant one if absent)
    """

    kind: WeightKind = WeightKind.CONSTANT
    s: float = 0.0
    a: float = 0.0
    b: float = 0.0
    norm: LatticeNorm = LatticeNorm.L2
    factors: Tuple["Weight", ...] = ()
    table: Tuple[Tuple[Point, float], ...] = ()
    fallback: Optional["Weight"] = None
    _lookup: Dict[Point, float] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        kind = WeightKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "norm", LatticeNorm(self.norm))
        if kind is WeightKind.POLYNOMIAL and self.s < 0:
            raise InvalidInputError("polynomial weight needs s >= 0")
        if kind is WeightKind.SUBEXPONENTIAL and not (self.a > 0 and 0 < self.b < 1):
            raise InvalidInputError("subexponential weight needs a > 0 and 0 < b < 1")
        if kind is WeightKind.EXPONENTIAL and self.a <= 0:
            raise InvalidInputError("exponential weight needs a > 0")
        if kind is WeightKind.PRODUCT and not self.factors:
            raise InvalidInputError("product weight needs at least one factor")
        if kind is WeightKind.CUSTOM:
            for x, value in self.table:
                if not value > 0:
                    raise InvalidInputError(f"custom weight value at {x} must be positive")
            object.__setattr__(self, "_lookup", {tuple(x): float(v) for x, v in self.table})

    @property
    def name(self) -> str:
        kind = self.kind
        if kind is WeightKind.CONSTANT:
            return "constant-one"
        if kind is WeightKind.POLYNOMIAL:
            return f"polynomial(s={self.s:g},{self.norm.value})"
        if kind is WeightKind.SUBEXPONENTIAL:
            return f"subexponential(a={self.a:g},b={self.b:g},{self.norm.value})"
        if kind is WeightKind.EXPONENTIAL:
            return f"exponential(a={self.a:g},{self.norm.value})"
        if kind is WeightKind.PRODUCT:
            return "product(" + ",".join(f.name for f in self.factors) + ")"
        return f"custom({len(self.table)} entries)"


def constant_one() -> Weight:
    return Weight(WeightKind.CONSTANT)


def polynomial(s: float, norm: LatticeNorm = LatticeNorm.L2) -> Weight:
    return Weight(WeightKind.POLYNOMIAL, s=float(s), norm=norm)


def subexponential(a: float, b: float, norm: LatticeNorm = LatticeNorm.L2) -> Weight:
    return Weight(WeightKind.SUBEXPONENTIAL, a=float(a), b=float(b), norm=norm)


def exponential(a: float, norm: LatticeNorm = LatticeNorm.L2) -> Weight:
    return Weight(WeightKind.EXPONENTIAL, a=float(a), norm=norm)


def product(*factors: Weight) -> Weight:
    return Weight(WeightKind.PRODUCT, factors=tuple(factors))


def custom(table: Dict[Point, float], fallback: Optional[Weight] = None) -> Weight:
    return Weight(
        WeightKind.CUSTOM,
        table=tuple(sorted((tuple(x), float(v)) for x, v in table.items())),
        fallback=fallback,
    )


def evaluate(v: Weight, x: Sequence[int]) -> float:
    kind = v.kind
    if kind is WeightKind.CONSTANT:
        return 1.0
    if kind is WeightKind.PRODUCT:
        out = 1.0
        for factor in v.factors:
            out *= evaluate(factor, x)
        return out
    if kind is WeightKind.CUSTOM:
        key = tuple(int(c) for c in x)
        if key in v._lookup:
            return v._lookup[key]
        return evaluate(v.fallback, x) if v.fallback is not None else 1.0
    t = lattice_norm(x, v.norm)
    if kind is WeightKind.POLYNOMIAL:
        return float((1.0 + t) ** v.s)
    if kind is WeightKind.SUBEXPONENTIAL:
        return float(np.exp(v.a * t**v.b))
    return float(np.exp(v.a * t))


def log_evaluate(v: Weight, x: Sequence[int]) -> float:
    kind = v.kind
    if kind is WeightKind.CONSTANT:
        return 0.0
    if kind is WeightKind.PRODUCT:
        return float(sum(log_evaluate(f, x) for f in v.factors))
    if kind is WeightKind.CUSTOM:
        return float(np.log(evaluate(v, x)))
    t = lattice_norm(x, v.norm)
    if kind is WeightKind.POLYNOMIAL:
        return float(v.s * np.log1p(t))
    if kind is WeightKind.SUBEXPONENTIAL:
        return float(v.a * t**v.b)
    return float(v.a * t)


def _log_profile(v: Weight, x: Sequence[int], ns: np.ndarray) -> np.ndarray:
    # log v(n x) for every n in ns; |n x| = n |x| for the built-in norms
    kind = v.kind
    if kind is WeightKind.CONSTANT:
        return np.zeros(ns.shape)
    if kind is WeightKind.PRODUCT:
        return np.sum([_log_profile(f, x, ns) for f in v.factors], axis=0)
    if kind is WeightKind.CUSTOM:
        return np.array([log_evaluate(v, [int(n) * c for c in x]) for n in ns])
    t = ns * lattice_norm(x, v.norm)
    if kind is WeightKind.POLYNOMIAL:
        return v.s * np.log1p(t)
    if kind is WeightKind.SUBEXPONENTIAL:
        return v.a * t**v.b
    return v.a * t


@dataclass(frozen=True)
class GRSVerdict:
    holds: Optional[bool]
    limit: Optional[float]
    reason: str


@dataclass
class GRSProfile:
    weight: str
    x: Point
    sequence: List[float]
    verdict: GRSVerdict


def grs_verdict(v: Weight, x: Sequence[int]) -> GRSVerdict:
    """Analytic value of lim v(nx)^{1/n} for the family of `v`."""
    kind = v.kind
    if kind in (WeightKind.CONSTANT, WeightKind.POLYNOMIAL, WeightKind.SUBEXPONENTIAL):
        return GRSVerdict(True, 1.0, f"{kind.value} weights grow subexponentially")
    if kind is WeightKind.EXPONENTIAL:
        limit = float(np.exp(v.a * lattice_norm(x, v.norm)))
        return GRSVerdict(False, limit, "exponential weight: v(nx)^(1/n) = exp(a|x|)")
    if kind is WeightKind.CUSTOM:
        return GRSVerdict(None, None, "custom weight: no analytic verdict")
    parts = [grs_verdict(f, x) for f in v.factors]
    if any(p.holds is None for p in parts):
        return GRSVerdict(None, None, "product with a custom factor: no analytic verdict")
    limit = float(np.prod([p.limit for p in parts]))
    if all(p.holds for p in parts):
        return GRSVerdict(True, limit, "product of GRS weights")
    return GRSVerdict(False, limit, "product with an exponential factor")


def grs_profile(v: Weight, x: Sequence[int], n_max: int) -> GRSProfile:
    if not any(x):
        raise InvalidInputError("GRS profile needs x != 0")
    if n_max < 1:
        raise InvalidInputError("n_max must be at least 1")
    ns = np.arange(1, n_max + 1, dtype=float)
    sequence = np.exp(_log_profile(v, x, ns) / ns)
    return GRSProfile(v.name, tuple(int(c) for c in x), sequence.tolist(), grs_verdict(v, x))


@dataclass(frozen=True)
class AxiomViolation:
    kind: str  # "submultiplicative" | "symmetric" | "unit"
    x: Point
    y: Optional[Point]
    lhs: float
    rhs: float


@dataclass
class AxiomReport:
    weight: str
    trials: int
    box: int
    n: int
    violations: List[AxiomViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_pair(v: Weight, x: Point, y: Point, out: List[AxiomViolation]) -> None:
    s = tuple(a + b for a, b in zip(x, y))
    lhs, rhs = evaluate(v, s), evaluate(v, x) * evaluate(v, y)
    if lhs > rhs * (1.0 + AXIOM_SLACK):
        out.append(AxiomViolation("submultiplicative", x, y, lhs, rhs))


def _check_symmetry(v: Weight, x: Point, out: List[AxiomViolation]) -> None:
    pos, neg = evaluate(v, x), evaluate(v, tuple(-c for c in x))
    if abs(pos - neg) > AXIOM_SLACK * max(pos, neg):
        out.append(AxiomViolation("symmetric", x, None, pos, neg))


def check_axioms(
    v: Weight,
    trials: int,
    box: int,
    *,
    n: Optional[int] = None,
    seed: int = 0,
) -> AxiomReport:
    """Sample x, y in [-box, box]^n and test v(x+y) <= v(x)v(y), v(-x) = v(x).

    Custom tables are also checked on every decomposition and pairwise sum
    of their keys, so a bad table entry is reported even when sampling
    misses it.
    """
    if trials < 1:
        raise InvalidInputError("trials must be at least 1")
    if n is None:
        n = len(v.table[0][0]) if v.table else 2
    report = AxiomReport(v.name, trials, box, n)
    zero = (0,) * n
    if evaluate(v, zero) < 1.0 - AXIOM_SLACK:
        report.violations.append(AxiomViolation("unit", zero, None, evaluate(v, zero), 1.0))

    rng = np.random.default_rng(seed)
    xs = rng.integers(-box, box + 1, size=(trials, n))
    ys = rng.integers(-box, box + 1, size=(trials, n))
    for xr, yr in zip(xs, ys):
        x, y = tuple(int(c) for c in xr), tuple(int(c) for c in yr)
        _check_pair(v, x, y, report.violations)
        _check_symmetry(v, x, report.violations)

    keys = [tuple(k) for k, _ in _custom_tables(v)]
    for key in keys:
        _check_symmetry(v, key, report.violations)
        for other in keys + [zero]:
            _check_pair(v, other, tuple(a - b for a, b in zip(key, other)), report.violations)
            _check_pair(v, key, other, report.violations)
    return report


def _custom_tables(v: Weight) -> List[Tuple[Point, float]]:
    if v.kind is WeightKind.CUSTOM:
        return list(v.table) + (_custom_tables(v.fallback) if v.fallback else [])
    if v.kind is WeightKind.PRODUCT:
        return [row for f in v.factors for row in _custom_tables(f)]
    return []
