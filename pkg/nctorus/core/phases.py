from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError, PhaseOverflowError

# Lattice points of Z^n are plain integer tuples.
Point = Tuple[int, ...]

# Checked 128-bit signed range for every numerator and denominator.
INT_LIMIT = 1 << 127

RationalLike = Union[Fraction, int, str, Sequence[int]]

INDEPENDENCE_ASSUMPTION = (
    "{1, alpha_1, ..., alpha_T} is assumed linearly independent over Q; "
    "exact verdicts are conditional on this assumption"
)


def _checked(value: int) -> int:
    if -INT_LIMIT < value < INT_LIMIT:
        return value
    raise PhaseOverflowError(f"integer {value} outside the checked 128-bit range")


def _checked_fraction(value: Fraction) -> Fraction:
    _checked(value.numerator)
    _checked(value.denominator)
    return value


def to_fraction(value: RationalLike) -> Fraction:
    """Accept a Fraction, an int, a "p/q" string or a `[num, den]` pair."""
    if isinstance(value, Fraction):
        return _checked_fraction(value)
    if isinstance(value, bool):
        raise InvalidInputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(_checked(value))
    if isinstance(value, str):
        return _checked_fraction(Fraction(value))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        num, den = value
        if isinstance(num, bool) or isinstance(den, bool):
            raise InvalidInputError(f"not a rational pair: {value!r}")
        if not isinstance(num, int) or not isinstance(den, int):
            raise InvalidInputError(f"rational pair must hold integers: {value!r}")
        if den == 0:
            raise InvalidInputError("zero denominator")
        return _checked_fraction(Fraction(_checked(num), _checked(den)))
    raise InvalidInputError(f"not a rational: {value!r}")


@dataclass(frozen=True)
class UnitPhase:
    """A point e^{2 pi i angle} of the circle with an exact angle.

    The angle is r0 + sum_t irr[t] * alpha_t. Only the rational part r0 is
    reduced mod 1; irrational coefficients are kept as they are.
    Build instances through `UnitPhase.of` so the invariants hold.
    """

    r0: Fraction = Fraction(0)
    irr: Tuple[Tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        if not (0 <= self.r0 < 1):
            raise InvalidInputError(f"rational part {self.r0} not reduced to [0,1)")
        for t, c in self.irr:
            if c == 0:
                raise InvalidInputError(f"zero coefficient stored for alpha_{t}")

    @classmethod
    def of(
        cls,
        r0: RationalLike = 0,
        irr: Optional[Mapping[int, RationalLike]] = None,
    ) -> "UnitPhase":
        rational = to_fraction(r0) % 1
        parts: Dict[int, Fraction] = {}
        for t, c in (irr or {}).items():
            t = int(t)
            if t < 0:
                raise InvalidInputError(f"negative basis index {t}")
            coeff = to_fraction(c)
            if coeff != 0:
                parts[t] = coeff
        return cls(rational, tuple(sorted(parts.items())))

    @property
    def irr_map(self) -> Dict[int, Fraction]:
        return dict(self.irr)

    def is_one(self) -> bool:
        return self.r0 == 0 and not self.irr

    def conj(self) -> "UnitPhase":
        return phase_pow(self, -1)

    def __mul__(self, other: "UnitPhase") -> "UnitPhase":
        if not isinstance(other, UnitPhase):
            return NotImplemented
        return phase_mul(self, other)

    def __pow__(self, k: int) -> "UnitPhase":
        return phase_pow(self, k)


ONE = UnitPhase()


def phase_mul(a: UnitPhase, b: UnitPhase) -> UnitPhase:
    """Group law of the circle: add the angles."""
    r0 = _checked_fraction(a.r0 + b.r0) % 1
    parts = dict(a.irr)
    for t, c in b.irr:
        parts[t] = _checked_fraction(parts.get(t, Fraction(0)) + c)
    return UnitPhase(r0, tuple(sorted((t, c) for t, c in parts.items() if c != 0)))


def phase_pow(a: UnitPhase, k: int) -> UnitPhase:
    k = int(k)
    if k == 0:
        return ONE
    r0 = Fraction(_checked(a.r0.numerator * k), a.r0.denominator) % 1
    irr = tuple((t, Fraction(_checked(c.numerator * k), c.denominator)) for t, c in a.irr)
    return UnitPhase(r0, irr)


def phase_product(phases: Iterable[UnitPhase]) -> UnitPhase:
    out = ONE
    for p in phases:
        out = phase_mul(out, p)
    return out


@dataclass(frozen=True)
class IrrationalBasis:
    """Decimal approximations of alpha_1..alpha_T, used only for rendering."""

    values: Tuple[float, ...] = ()
    assumption: str = INDEPENDENCE_ASSUMPTION

    def __post_init__(self):
        for v in self.values:
            if not np.isfinite(v):
                raise InvalidInputError(f"basis value {v!r} is not finite")

    def __len__(self) -> int:
        return len(self.values)


def to_complex(a: UnitPhase, basis: IrrationalBasis) -> complex:
    angle = float(a.r0)
    for t, c in a.irr:
        if t >= len(basis.values):
            raise InvalidInputError(f"alpha_{t} missing from the irrational basis")
        angle += float(c) * basis.values[t]
    return complex(np.exp(2j * np.pi * (angle % 1.0)))


@dataclass(frozen=True)
class _Component:
    # Integer form of one Q-component of the angle matrix: entries num/den.
    den: int
    nums: Tuple[Tuple[int, int, int], ...]  # (k, j, numerator), k > j


@dataclass(frozen=True)
class ThetaData:
    """Dimension, strictly-lower angle entries vartheta_{kj} (k > j) and basis.

    Upper entries are vartheta_{jk} = -vartheta_{kj} and the diagonal is 0,
    which encodes the hermitean commutation matrix theta.
    """

    n: int
    vartheta: Tuple[Tuple[Tuple[int, int], UnitPhase], ...] = ()
    basis: IrrationalBasis = IrrationalBasis()

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("dimension n must be positive")
        seen = set()
        for (k, j), phase in self.vartheta:
            if not (1 <= j < k <= self.n):
                raise InvalidInputError(
                    f"vartheta entry ({k},{j}) is not strictly lower triangular for n={self.n}"
                )
            if (k, j) in seen:
                raise InvalidInputError(f"duplicate vartheta entry ({k},{j})")
            seen.add((k, j))
            for t, _ in phase.irr:
                if t >= len(self.basis):
                    raise InvalidInputError(
                        f"entry ({k},{j}) uses alpha_{t} but the basis has {len(self.basis)} values"
                    )

    @classmethod
    def build(
        cls,
        n: int,
        entries: Optional[Mapping[Tuple[int, int], UnitPhase]] = None,
        basis: Optional[IrrationalBasis] = None,
    ) -> "ThetaData":
        kept = sorted(
            ((int(k), int(j)), p) for (k, j), p in (entries or {}).items() if not p.is_one()
        )
        return cls(int(n), tuple(kept), basis or IrrationalBasis())

    @cached_property
    def _entries(self) -> Dict[Tuple[int, int], UnitPhase]:
        return dict(self.vartheta)

    def angle(self, k: int, j: int) -> UnitPhase:
        """Stored lower entry vartheta_{kj} (identity when omitted)."""
        return self._entries.get((k, j), ONE)

    @property
    def is_rational(self) -> bool:
        return all(not p.irr for _, p in self.vartheta)

    @cached_property
    def components(self) -> Tuple[Optional[int], ...]:
        used = sorted({t for _, p in self.vartheta for t, _ in p.irr})
        return (None, *used)

    @cached_property
    def _integer_form(self) -> Dict[Optional[int], _Component]:
        forms: Dict[Optional[int], _Component] = {}
        for comp in self.components:
            values = []
            for (k, j), p in self.vartheta:
                c = p.r0 if comp is None else p.irr_map.get(comp, Fraction(0))
                if c != 0:
                    values.append((k, j, c))
            den = _checked(math.lcm(*(c.denominator for _, _, c in values)))
            nums = tuple((k, j, _checked(c.numerator * (den // c.denominator))) for k, j, c in values)
            forms[comp] = _Component(den=den, nums=nums)
        return forms

    def denominators_lcm(self) -> int:
        """lcm of every denominator appearing in vartheta (rational and irrational parts)."""
        return math.lcm(*(form.den for form in self._integer_form.values()))


def check_dims(theta: ThetaData, *points: Sequence[int]) -> None:
    for p in points:
        if len(p) != theta.n:
            raise DimensionMismatchError(
                f"lattice point {tuple(p)} has dimension {len(p)}, expected {theta.n}"
            )


def sigma(theta: ThetaData, l: Sequence[int], m: Sequence[int]) -> UnitPhase:
    """Cocycle sigma(l, m) with angle sum_{j<k} vartheta_{kj} l_k m_j."""
    check_dims(theta, l, m)
    r0 = Fraction(0)
    irr: Dict[int, Fraction] = {}
    for comp, form in theta._integer_form.items():
        total = 0
        for k, j, num in form.nums:
            lk, mj = l[k - 1], m[j - 1]
            if lk and mj:
                total = _checked(total + _checked(num * _checked(lk * mj)))
        if comp is None:
            r0 = Fraction(total % form.den, form.den)
        elif total:
            irr[comp] = Fraction(total, form.den)
    return UnitPhase(r0, tuple(sorted(irr.items())))


def sigma_value(theta: ThetaData, l: Sequence[int], m: Sequence[int]) -> complex:
    return to_complex(sigma(theta, l, m), theta.basis)


def theta_entry(theta: ThetaData, j: int, k: int) -> UnitPhase:
    """Full hermitean matrix entry theta_{jk} as an exact phase."""
    if not (1 <= j <= theta.n and 1 <= k <= theta.n):
        raise InvalidInputError(f"generator indices ({j},{k}) out of range 1..{theta.n}")
    if j == k:
        return ONE
    if j > k:
        return theta.angle(j, k)
    return theta.angle(k, j).conj()


def unit_vector(n: int, j: int) -> Point:
    if not (1 <= j <= n):
        raise InvalidInputError(f"generator index {j} out of range 1..{n}")
    return tuple(1 if i == j - 1 else 0 for i in range(n))


def commutation_check(theta: ThetaData, j: int, k: int) -> bool:
    """U_j U_k = theta_{jk} U_k U_j at the level of exact phases."""
    ej, ek = unit_vector(theta.n, j), unit_vector(theta.n, k)
    lhs = sigma(theta, ej, ek)
    rhs = phase_mul(theta_entry(theta, j, k), sigma(theta, ek, ej))
    return lhs == rhs


def central_angle(theta: ThetaData, m: Sequence[int], k: int) -> UnitPhase:
    """Angle of prod_j theta_{jk}^{m_j}; m is central iff this is 1 for all k."""
    check_dims(theta, m)
    return phase_product(
        phase_pow(theta_entry(theta, j, k), m[j - 1]) for j in range(1, theta.n + 1) if m[j - 1]
    )


def add_points(a: Sequence[int], b: Sequence[int]) -> Point:
    return tuple(x + y for x, y in zip(a, b))


def sub_points(a: Sequence[int], b: Sequence[int]) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def neg_point(a: Sequence[int]) -> Point:
    return tuple(-x for x in a)


def scale_point(k: int, a: Sequence[int]) -> Point:
    return tuple(k * x for x in a)


@dataclass(frozen=True)
class FloatTheta:
    """Angle matrix known only in floating point; degeneracy is undecidable here."""

    n: int
    values: Tuple[Tuple[Tuple[int, int], float], ...] = ()

    def matrix(self) -> np.ndarray:
        # full skew matrix M[j-1, k-1] = vartheta_{jk}
        out = np.zeros((self.n, self.n))
        for (k, j), v in self.values:
            out[k - 1, j - 1] = v
            out[j - 1, k - 1] = -v
        return out


def to_float_theta(theta: ThetaData) -> FloatTheta:
    values: List[Tuple[Tuple[int, int], float]] = []
    for (k, j), p in theta.vartheta:
        angle = float(p.r0) + sum(float(c) * theta.basis.values[t] for t, c in p.irr)
        values.append(((k, j), angle))
    return FloatTheta(theta.n, tuple(values))
