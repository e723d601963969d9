from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError
from .phases import (
    ONE,
    Point,
    ThetaData,
    UnitPhase,
    add_points,
    check_dims,
    neg_point,
    phase_mul,
    sigma,
    sigma_value,
    to_complex,
)
from .weights import Weight, evaluate, log_evaluate

Terms = Union[Mapping[Sequence[int], complex], Iterable[Tuple[Sequence[int], complex]]]


@dataclass(frozen=True, eq=False)
class Element:
    """Finitely supported function Z^n -> C inside l^1_v(Z^n, theta).

    Coefficients live in a read-only mapping with keys in lexicographic
    order; exact zeros are never stored.
    """

    theta: ThetaData
    coeffs: Mapping[Point, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[Point, complex] = {}
        for x in sorted(tuple(int(c) for c in key) for key in self.coeffs):
            check_dims(self.theta, x)
            value = complex(self.coeffs[x])
            if value != 0:
                clean[x] = value
        object.__setattr__(self, "coeffs", MappingProxyType(clean))

    def __getitem__(self, x: Sequence[int]) -> complex:
        return self.coeffs.get(tuple(x), 0j)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.theta == other.theta and dict(self.coeffs) == dict(other.coeffs)

    __hash__ = None  # type: ignore[assignment]

    @property
    def support(self) -> List[Point]:
        return list(self.coeffs)

    def __add__(self, other: "Element") -> "Element":
        return add(self, other)

    def __sub__(self, other: "Element") -> "Element":
        return sub(self, other)

    def __rmul__(self, c: complex) -> "Element":
        return scale(self, c)


def element(theta: ThetaData, terms: Terms) -> Element:
    """Build an element, summing repeated keys."""
    items = terms.items() if isinstance(terms, Mapping) else terms
    acc: Dict[Point, complex] = {}
    for x, value in items:
        key = tuple(int(c) for c in x)
        acc[key] = acc.get(key, 0j) + complex(value)
    return Element(theta, acc)


def zero(theta: ThetaData) -> Element:
    return Element(theta, {})


def delta(theta: ThetaData, y: Sequence[int]) -> Element:
    check_dims(theta, y)
    return Element(theta, {tuple(y): 1.0 + 0j})


def unit(theta: ThetaData) -> Element:
    return delta(theta, (0,) * theta.n)


def _same_algebra(f: Element, g: Element) -> None:
    if f.theta.n != g.theta.n:
        raise DimensionMismatchError(f"dimensions differ: {f.theta.n} vs {g.theta.n}")
    if f.theta != g.theta:
        raise InvalidInputError("elements belong to different twisted algebras")


def twisted_convolve(f: Element, g: Element) -> Element:
    """(f # g)(x) = sum_y f(y) g(x-y) sigma(y, x-y).

    Loops over supp f x supp g in key order, so every output coefficient
    is accumulated in a fixed order.
    """
    _same_algebra(f, g)
    theta = f.theta
    out: Dict[Point, complex] = {}
    for y, fy in f.coeffs.items():
        for z, gz in g.coeffs.items():
            x = add_points(y, z)
            out[x] = out.get(x, 0j) + fy * gz * sigma_value(theta, y, z)
    return Element(theta, out)


def involution(f: Element) -> Element:
    """f*(x) = conj(sigma(x, -x)) conj(f(-x))."""
    theta = f.theta
    out: Dict[Point, complex] = {}
    for y, fy in f.coeffs.items():
        x = neg_point(y)
        out[x] = (sigma_value(theta, x, y) * fy).conjugate()
    return Element(theta, out)


def power(f: Element, k: int) -> Element:
    if k < 0:
        raise InvalidInputError("power exponent must be non-negative")
    result = unit(f.theta)
    base = f
    while k:
        if k & 1:
            result = twisted_convolve(result, base)
        k >>= 1
        if k:
            base = twisted_convolve(base, base)
    return result


def add(f: Element, g: Element) -> Element:
    _same_algebra(f, g)
    out = dict(f.coeffs)
    for x, v in g.coeffs.items():
        out[x] = out.get(x, 0j) + v
    return Element(f.theta, out)


def scale(f: Element, c: complex) -> Element:
    return Element(f.theta, {x: c * v for x, v in f.coeffs.items()})


def sub(f: Element, g: Element) -> Element:
    return add(f, scale(g, -1.0))


def commutator(f: Element, g: Element) -> Element:
    return sub(twisted_convolve(f, g), twisted_convolve(g, f))


def prune(f: Element, eps: float) -> Element:
    """Drop coefficients with modulus <= eps (experiment hygiene only)."""
    return Element(f.theta, {x: v for x, v in f.coeffs.items() if abs(v) > eps})


def l1_norm(f: Element) -> float:
    return float(sum(abs(v) for v in f.coeffs.values()))


def weighted_norm(f: Element, v: Weight) -> float:
    return float(sum(abs(c) * evaluate(v, x) for x, c in f.coeffs.items()))


def support_radius(f: Element) -> int:
    return max((max(abs(c) for c in x) for x in f.coeffs), default=0)


def max_abs_diff(f: Element, g: Element) -> float:
    _same_algebra(f, g)
    keys = set(f.coeffs) | set(g.coeffs)
    return max((abs(f[x] - g[x]) for x in keys), default=0.0)


# Exact Dirac monomials c * delta_y with |c| = 1.


@dataclass(frozen=True)
class Monomial:
    point: Point
    phase: UnitPhase = ONE


def monomial_mul(theta: ThetaData, a: Monomial, b: Monomial) -> Monomial:
    """delta_y # delta_z = sigma(y, z) delta_{y+z}, with exact phases."""
    phase = phase_mul(phase_mul(a.phase, b.phase), sigma(theta, a.point, b.point))
    return Monomial(add_points(a.point, b.point), phase)


def monomial_star(theta: ThetaData, a: Monomial) -> Monomial:
    y = a.point
    ny = neg_point(y)
    return Monomial(ny, phase_mul(a.phase, sigma(theta, ny, y)).conj())


def monomial_pow(theta: ThetaData, a: Monomial, k: int) -> Monomial:
    if k < 0:
        raise InvalidInputError("power exponent must be non-negative")
    out = Monomial((0,) * theta.n)
    for _ in range(k):
        out = monomial_mul(theta, out, a)
    return out


def monomial_element(theta: ThetaData, a: Monomial) -> Element:
    return Element(theta, {a.point: to_complex(a.phase, theta.basis)})


def log_weighted_norm(f: Element, v: Weight) -> float:
    """log ||f||_{l1_v}, stable when v(x) overflows a double."""
    if not f.coeffs:
        return float("-inf")
    logs = [np.log(abs(c)) + log_evaluate(v, x) for x, c in f.coeffs.items()]
    return float(np.logaddexp.reduce(logs))
