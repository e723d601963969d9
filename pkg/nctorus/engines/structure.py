"""Centrality, cocycle degeneracy, centralizers and the averaging operators J_m.

Degeneracy is decided exactly: writing vartheta_{jk} = a_{jk} + sum_t b^t_{jk} alpha_t,
a lattice point m is central iff sum_j m_j b^t_{jk} = 0 for every t and k and
sum_j m_j a_{jk} is an integer for every k. The first condition cuts out an
integer kernel lattice L; any nonzero w in L scaled by the denominators of
A w is central, so the cocycle is degenerate iff L != {0}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..core.algebra import (
    Element,
    Monomial,
    commutator,
    delta,
    involution,
    l1_norm,
    monomial_mul,
    monomial_star,
    scale,
    sub,
    twisted_convolve,
)
from ..core.errors import FloatModeError, InvalidInputError
from ..core.phases import (
    INDEPENDENCE_ASSUMPTION,
    FloatTheta,
    Point,
    ThetaData,
    UnitPhase,
    central_angle,
    check_dims,
    neg_point,
    phase_pow,
    sigma_value,
    to_complex,
    to_float_theta,
    unit_vector,
)
from .lattice import integer_kernel, primitive

logger = logging.getLogger(__name__)

# Largest grid the brute-force search will materialise.
MAX_SEARCH_POINTS = 5_000_000
FLOAT_INTEGRALITY_TOL = 1e-9


@dataclass
class DegeneracyVerdict:
    status: str  # "degenerate" | "nondegenerate" | "undecidable-in-float"
    degenerate: Optional[bool]
    witness: Optional[Point]
    method: str
    self_check: Optional[bool] = None
    kernel_rank: Optional[int] = None
    # rank of the real angle matrix; below n does not imply degenerate
    linear_rank: Optional[int] = None
    search_box: Optional[int] = None
    assumption: str = INDEPENDENCE_ASSUMPTION


@dataclass
class SimplicityVerdict:
    simple: Optional[bool]
    degeneracy: DegeneracyVerdict
    weight_independent: bool = True
    note: str = (
        "simplicity of l1_v(Z^n, theta) does not depend on the weight v; "
        "it holds iff the cocycle is nondegenerate"
    )


@dataclass(frozen=True)
class CentralizerMembership:
    member: bool
    beta: UnitPhase


def _exact(theta: Union[ThetaData, FloatTheta]) -> ThetaData:
    if isinstance(theta, FloatTheta):
        raise FloatModeError("exact operation requested on a floating-point theta")
    return theta


def is_central(theta: ThetaData, m: Sequence[int]) -> bool:
    """prod_j theta_{jk}^{m_j} = 1 for every k, decided on exact angles."""
    theta = _exact(theta)
    check_dims(theta, m)
    return all(central_angle(theta, m, k).is_one() for k in range(1, theta.n + 1))


def angle_matrices(theta: ThetaData) -> Dict[Optional[int], List[List[Fraction]]]:
    """Rational matrices A (key None) and B^t with M[k][j] = component of vartheta_{jk}."""
    n = theta.n
    out: Dict[Optional[int], List[List[Fraction]]] = {}
    for comp in theta.components:
        mat = [[Fraction(0)] * n for _ in range(n)]
        for (k, j), p in theta.vartheta:
            c = p.r0 if comp is None else p.irr_map.get(comp, Fraction(0))
            # vartheta_{kj} sits at row j, column k; vartheta_{jk} = -vartheta_{kj}
            mat[j - 1][k - 1] = c
            mat[k - 1][j - 1] = -c
        out[comp] = mat
    return out


def degeneracy(
    theta: Union[ThetaData, FloatTheta], *, heuristic_box: int = 6
) -> DegeneracyVerdict:
    if isinstance(theta, FloatTheta):
        return float_degeneracy_heuristic(theta, heuristic_box)
    n = theta.n
    mats = angle_matrices(theta)
    rows = [row for comp, mat in mats.items() if comp is not None for row in mat]
    kernel = integer_kernel(rows, n)
    linear_rank = int(np.linalg.matrix_rank(to_float_theta(theta).matrix()))
    logger.debug("irrational constraint rank %d of %d, linear rank %d", kernel.rank, n, linear_rank)
    if kernel.trivial:
        return DegeneracyVerdict(
            status="nondegenerate",
            degenerate=False,
            witness=None,
            method="integer kernel of the irrational parts is trivial",
            kernel_rank=0,
            linear_rank=linear_rank,
        )
    basis = [primitive(w) for w in kernel.basis]
    w = min(basis, key=lambda v: (max(abs(c) for c in v), [-abs(c) for c in v]))
    a = mats[None]
    aw = [sum((a[k][j] * w[j] for j in range(n)), Fraction(0)) for k in range(n)]
    q = math.lcm(*(c.denominator for c in aw))
    witness = tuple(q * c for c in w)
    ok = is_central(theta, witness)
    if not ok:
        logger.error("lattice witness %s failed the centrality self-check", witness)
    return DegeneracyVerdict(
        status="degenerate",
        degenerate=True,
        witness=witness,
        method=f"integer kernel of rank {len(basis)}; witness = {q} * {tuple(w)}",
        self_check=ok,
        kernel_rank=len(basis),
        linear_rank=linear_rank,
    )


def _grid(n: int, box: int) -> np.ndarray:
    size = (2 * box + 1) ** n
    if size > MAX_SEARCH_POINTS:
        raise InvalidInputError(f"search box {box} in dimension {n} has {size} points")
    return np.indices((2 * box + 1,) * n).reshape(n, -1).T - box


def brute_force_central(theta: ThetaData, box: int) -> Optional[Point]:
    """First nonzero central m with |m|_inf <= box in lexicographic order, if any."""
    theta = _exact(theta)
    n = theta.n
    grid = _grid(n, box)
    grid = grid[np.any(grid != 0, axis=1)]
    den = theta.denominators_lcm()
    mask = np.ones(len(grid), dtype=bool)
    for comp, mat in angle_matrices(theta).items():
        ints = np.array([[int(c * den) for c in row] for row in mat], dtype=np.int64)
        # values[:, k] = den * sum_j M[k][j] m_j
        values = grid @ ints.T
        if comp is None:
            mask &= np.all(values % den == 0, axis=1)
        else:
            mask &= np.all(values == 0, axis=1)
    hits = grid[mask]
    return tuple(int(c) for c in hits[0]) if len(hits) else None


def float_degeneracy_heuristic(theta: FloatTheta, box: int) -> DegeneracyVerdict:
    grid = _grid(theta.n, box)
    grid = grid[np.any(grid != 0, axis=1)]
    values = grid @ theta.matrix()
    mask = np.all(np.abs(values - np.round(values)) < FLOAT_INTEGRALITY_TOL, axis=1)
    hits = grid[mask]
    candidate = tuple(int(c) for c in hits[0]) if len(hits) else None
    logger.warning("floating-point theta: degeneracy is undecidable, searched box %d", box)
    return DegeneracyVerdict(
        status="undecidable-in-float",
        degenerate=None,
        witness=candidate,
        method=(
            f"heuristic box search |m|_inf <= {box} with integrality tolerance "
            f"{FLOAT_INTEGRALITY_TOL:g}; a float angle cannot certify nondegeneracy"
        ),
        search_box=box,
        linear_rank=int(np.linalg.matrix_rank(theta.matrix())),
    )


def simplicity(theta: Union[ThetaData, FloatTheta], *, heuristic_box: int = 6) -> SimplicityVerdict:
    verdict = degeneracy(theta, heuristic_box=heuristic_box)
    simple = None if verdict.degenerate is None else not verdict.degenerate
    return SimplicityVerdict(simple=simple, degeneracy=verdict)


def _generator(theta: ThetaData, j: int) -> Point:
    if not (1 <= j <= theta.n):
        raise InvalidInputError(f"generator index {j} out of range 1..{theta.n}")
    return unit_vector(theta.n, j)


def centralizer_membership(theta: ThetaData, x: Sequence[int], j: int) -> CentralizerMembership:
    """delta_{e_j}* # delta_x # delta_{e_j} = beta_x delta_x, read off exactly."""
    theta = _exact(theta)
    check_dims(theta, x)
    e = Monomial(_generator(theta, j))
    conj = monomial_mul(theta, monomial_mul(theta, monomial_star(theta, e), Monomial(tuple(x))), e)
    if conj.point != tuple(x):
        raise InvalidInputError(f"conjugation moved {tuple(x)} to {conj.point}")
    return CentralizerMembership(member=conj.phase.is_one(), beta=conj.phase)


def _mean_of_powers(theta: ThetaData, beta: UnitPhase, m: int) -> complex:
    # (1/m) sum_{k=1}^m beta^k
    if beta.is_one():
        return 1.0 + 0j
    b = to_complex(beta, theta.basis)
    bm = to_complex(phase_pow(beta, m), theta.basis)
    return b * (1 - bm) / (m * (1 - b))


def average_J(f: Element, j: int, m: int) -> Element:
    if m < 1:
        raise InvalidInputError("averaging length m must be positive")
    theta = f.theta
    out = {}
    for x, alpha in f.coeffs.items():
        beta = centralizer_membership(theta, x, j).beta
        out[x] = alpha * _mean_of_powers(theta, beta, m)
    return Element(theta, out)


def average_J_direct(f: Element, j: int, m: int) -> Element:
    """J_m(f) by its definition, (1/m) sum_k (delta_{e_j}*)^k # f # delta_{e_j}^k."""
    theta = f.theta
    d = delta(theta, _generator(theta, j))
    d_star = involution(d)
    total = Element(theta, {})
    left, right = d_star, d
    for _ in range(m):
        total = total + twisted_convolve(twisted_convolve(left, f), right)
        left, right = twisted_convolve(left, d_star), twisted_convolve(right, d)
    return scale(total, 1.0 / m)


def project_centralizer(f: Element, j: int) -> Element:
    """f chi_{C_j}: keep the coefficients on the centralizer of delta_{e_j}."""
    return Element(
        f.theta,
        {x: v for x, v in f.coeffs.items() if centralizer_membership(f.theta, x, j).member},
    )


def project_all(f: Element) -> Element:
    for j in range(1, f.theta.n + 1):
        f = project_centralizer(f, j)
    return f


def averaging_bound(f: Element, j: int, m: int) -> float:
    """2 ||f||_1 max_{x not in C_j} 1 / (m |1 - beta_x|)."""
    worst = 0.0
    for x in f.coeffs:
        member = centralizer_membership(f.theta, x, j)
        if not member.member:
            gap = abs(1 - to_complex(member.beta, f.theta.basis))
            worst = max(worst, 1.0 / (m * gap))
    return 2.0 * l1_norm(f) * worst


@dataclass
class AveragingProfile:
    j: int
    m_values: List[int]
    distances: List[float]
    bounds: List[float]
    loglog_slope: Optional[float]
    rate_constant: Optional[float]


def averaging_profile(f: Element, j: int, m_values: Sequence[int]) -> AveragingProfile:
    """||J_m(f) - f chi_{C_j}||_1 per m together with a fitted C/m rate."""
    target = project_centralizer(f, j)
    dists = [l1_norm(sub(average_J(f, j, m), target)) for m in m_values]
    bounds = [averaging_bound(f, j, m) for m in m_values]
    pos = [(m, d) for m, d in zip(m_values, dists) if d > 0]
    slope = constant = None
    if len(pos) >= 2:
        logs = np.log(np.array(pos, dtype=float))
        slope = float(np.polyfit(logs[:, 0], logs[:, 1], 1)[0])
        constant = float(np.mean([m * d for m, d in pos]))
    return AveragingProfile(j, list(m_values), dists, bounds, slope, constant)


@dataclass
class CentralElementCheck:
    m: Point
    commutes_with_generators: bool
    commutator_norm: float


def central_element_check(theta: ThetaData, m: Sequence[int], f: Element) -> CentralElementCheck:
    """Exhibit delta_m as a central element: exact against generators, numeric against f."""
    theta = _exact(theta)
    check_dims(theta, m)
    gens = all(
        monomial_mul(theta, Monomial(tuple(m)), Monomial(unit_vector(theta.n, j))).phase
        == monomial_mul(theta, Monomial(unit_vector(theta.n, j)), Monomial(tuple(m))).phase
        for j in range(1, theta.n + 1)
    )
    comm = l1_norm(commutator(delta(theta, m), f))
    return CentralElementCheck(tuple(m), gens, comm)


@dataclass
class IdealCollapse:
    collapsed: bool
    recovered: Dict[Point, complex] = field(default_factory=dict)
    max_error: float = 0.0


def ideal_collapse(f: Element) -> IdealCollapse:
    """Project delta_{-x} # f onto every centralizer for each x in supp f.

    For a nondegenerate cocycle each projection is sigma(-x, x) f(x) delta_0,
    so any nonzero element of a two-sided ideal puts delta_0 in the ideal.
    """
    theta = f.theta
    zero = (0,) * theta.n
    collapsed = True
    recovered: Dict[Point, complex] = {}
    err = 0.0
    for x, value in f.coeffs.items():
        nx = neg_point(x)
        projected = project_all(twisted_convolve(delta(theta, nx), f))
        if set(projected.coeffs) - {zero}:
            collapsed = False
        got = projected[zero] / sigma_value(theta, nx, x)
        recovered[x] = got
        err = max(err, abs(got - value))
    return IdealCollapse(collapsed, recovered, err)

