"""Functions on the central extension G = Z^n x T of the circle by Z^n.

G is never materialised with numeric circle coordinates. A function on G
is stored through its circle-Fourier components F(x, xi) = sum_k F_k(x) xi^k,
so the integral over the circle in the group convolution collapses to
matching frequencies and stays exact up to phase rendering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from .algebra import Element
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
    phase_pow,
    sigma,
    sigma_value,
    sub_points,
    to_complex,
)
from .weights import GRSVerdict, Weight, constant_one, evaluate, grs_verdict

Key = Tuple[Point, int]


@dataclass(frozen=True, eq=False)
class GFunction:
    theta: ThetaData
    comps: Mapping[Key, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[Key, complex] = {}
        for x, k in sorted((tuple(int(c) for c in x), int(k)) for x, k in self.comps):
            check_dims(self.theta, x)
            value = complex(self.comps[(x, k)])
            if value != 0:
                clean[(x, k)] = value
        object.__setattr__(self, "comps", MappingProxyType(clean))

    def __getitem__(self, key: Key) -> complex:
        return self.comps.get(key, 0j)

    @property
    def frequencies(self) -> Set[int]:
        return {k for _, k in self.comps}

    def component(self, k: int) -> Dict[Point, complex]:
        return {x: v for (x, j), v in self.comps.items() if j == k}

    def evaluate(self, x: Sequence[int], xi: complex) -> complex:
        x = tuple(x)
        return complex(sum(v * xi**k for (y, k), v in self.comps.items() if y == x))


def _same_group(F: GFunction, H: GFunction) -> None:
    if F.theta.n != H.theta.n:
        raise DimensionMismatchError(f"dimensions differ: {F.theta.n} vs {H.theta.n}")
    if F.theta != H.theta:
        raise InvalidInputError("functions live on different extensions")


def circ(f: Element) -> GFunction:
    """f -> f°, f°(x, xi) = f(x) conj(xi): the single frequency k = -1."""
    return GFunction(f.theta, {(x, -1): v for x, v in f.coeffs.items()})


def g_convolve(F: GFunction, H: GFunction) -> GFunction:
    """Group convolution, frequency by frequency.

    (F * H)_k(x) = sum_y F_k(y) H_k(x-y) conj(sigma(y, x-y))^k, which at
    k = -1 is the twisted convolution weight sigma(y, x-y).
    """
    _same_group(F, H)
    theta = F.theta
    out: Dict[Key, complex] = {}
    for k in sorted(F.frequencies & H.frequencies):
        fk, hk = F.component(k), H.component(k)
        for y, a in fk.items():
            for z, b in hk.items():
                twist = to_complex(phase_pow(sigma(theta, y, z), -k), theta.basis)
                key = (add_points(y, z), k)
                out[key] = out.get(key, 0j) + a * b * twist
    return GFunction(theta, out)


def g_involution(F: GFunction) -> GFunction:
    """(F*)_k(x) = conj(F_k(-x)) sigma(x, -x)^k."""
    theta = F.theta
    out: Dict[Key, complex] = {}
    for (y, k), v in F.comps.items():
        x = neg_point(y)
        out[(x, k)] = v.conjugate() * to_complex(phase_pow(sigma(theta, x, y), k), theta.basis)
    return GFunction(theta, out)


@dataclass(frozen=True)
class ExtendedWeight:
    """omega(x, xi) = v(x)."""

    base: Weight

    def evaluate(self, x: Sequence[int], xi: Optional[complex] = None) -> float:
        return evaluate(self.base, x)

    def grs_verdict(self, x: Sequence[int]) -> GRSVerdict:
        return grs_verdict(self.base, x)


def extend_weight(v: Weight) -> ExtendedWeight:
    return ExtendedWeight(v)


def weighted_g_norm(F: GFunction, omega: ExtendedWeight, quad_points: int = 64) -> float:
    freqs = F.frequencies
    if not freqs:
        return 0.0
    kmax = max(abs(k) for k in freqs)
    if quad_points < 2 * kmax + 1:
        raise InvalidInputError(
            f"{quad_points} quadrature points cannot resolve frequency {kmax}"
        )
    if len(freqs) == 1:
        return float(sum(abs(v) * omega.evaluate(x) for (x, _), v in F.comps.items()))
    # trapezoid rule on the circle = mean over equispaced points
    xi = np.exp(2j * np.pi * np.arange(quad_points) / quad_points)
    total = 0.0
    for x in sorted({x for x, _ in F.comps}):
        values = sum(v * xi**k for (y, k), v in F.comps.items() if y == x)
        total += float(np.mean(np.abs(values))) * omega.evaluate(x)
    return total


def g_norm(F: GFunction, quad_points: int = 64) -> float:
    """L^1(G) norm under the Haar measure sum_x int_T d xi."""
    return weighted_g_norm(F, extend_weight(constant_one()), quad_points)


def max_abs_diff_g(F: GFunction, H: GFunction) -> float:
    keys = set(F.comps) | set(H.comps)
    return max((abs(F[key] - H[key]) for key in keys), default=0.0)


def g_convolve_by_quadrature(F: GFunction, H: GFunction, quad_points: int = 64) -> GFunction:
    """Reference convolution: evaluate the defining integral with the group law.

    (F * H)(x, xi) = sum_y int_T F(y, eta) H((y, eta)^{-1}(x, xi)) d eta,
    sampled at `quad_points` circle points and read back by FFT.
    """
    _same_group(F, H)
    theta = F.theta
    q = quad_points
    kmax = max((abs(k) for k in F.frequencies | H.frequencies), default=0)
    if q < 4 * kmax + 1:
        raise InvalidInputError(f"{q} quadrature points cannot resolve frequency {kmax}")
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    ys = sorted({y for y, _ in F.comps})
    zs = sorted({z for z, _ in H.comps})
    targets = sorted({add_points(y, z) for y in ys for z in zs})
    out: Dict[Key, complex] = {}
    for x in targets:
        samples = np.zeros(q, dtype=complex)
        for y in ys:
            if sub_points(x, y) not in zs:
                continue
            # (y, eta)^{-1} (x, xi) = (x - y, sigma(-y, x) conj(sigma(y, -y)) conj(eta) xi)
            twist = sigma_value(theta, neg_point(y), x) * sigma_value(theta, y, neg_point(y)).conjugate()
            for a, xi in enumerate(roots):
                inner = np.array(
                    [F.evaluate(y, eta) * H.evaluate(sub_points(x, y), twist * eta.conjugate() * xi) for eta in roots]
                )
                samples[a] += inner.mean()
        coeffs = np.fft.fft(samples) / q
        for k in range(-2 * kmax, 2 * kmax + 1):
            # samples[a] = sum_k c_k roots[a]^k, so fft index k mod q holds q c_k
            out[(x, k)] = complex(coeffs[k % q])
    return GFunction(theta, out)


# Group law of G at the level of exact phases.


@dataclass(frozen=True)
class GroupPoint:
    x: Point
    xi: UnitPhase = ONE


def g_identity(n: int) -> GroupPoint:
    return GroupPoint((0,) * n, ONE)


def g_mul(theta: ThetaData, a: GroupPoint, b: GroupPoint) -> GroupPoint:
    """(x, xi)(y, eta) = (x + y, sigma(x, y) xi eta)."""
    return GroupPoint(add_points(a.x, b.x), phase_mul(phase_mul(sigma(theta, a.x, b.x), a.xi), b.xi))


def g_inverse(theta: ThetaData, a: GroupPoint) -> GroupPoint:
    """(x, xi)^{-1} = (-x, conj(sigma(x, -x) xi))."""
    return GroupPoint(neg_point(a.x), phase_mul(sigma(theta, a.x, neg_point(a.x)), a.xi).conj())
