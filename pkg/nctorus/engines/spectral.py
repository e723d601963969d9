"""Regular representation, truncated norms and Neumann inversion.

lambda(f) acts on l^2(Z^n) by g -> f # g. Everything here works on the
compression of lambda(f) to the box [-N, N]^n, so C*-side numbers are
brackets: the compression gives a lower bound and ||f||_1 the upper one.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.algebra import (
    Element,
    delta,
    l1_norm,
    log_weighted_norm,
    scale,
    sub,
    twisted_convolve,
    unit,
    weighted_norm,
)
from ..core.errors import (
    ConvergenceError,
    InsufficientSupportError,
    InvalidInputError,
    NotDiagonallyDominantError,
    SingularTruncationError,
    TruncationTooLargeError,
)
from ..core.phases import Point, ThetaData, add_points, sigma_value
from ..core.weights import GRSProfile, LatticeNorm, Weight, grs_profile, lattice_norm, log_evaluate

logger = logging.getLogger(__name__)

MAX_TRUNCATION_ROWS = 2**18
MAX_POWER_ITERATIONS = 10_000

# Divergence flag: partial sums still growing, at a non-shrinking rate,
# over this many consecutive blocks of BLOCK_SIZE terms.
BLOCK_SIZE = 10
GROWING_BLOCKS = 10

MIN_FIT_SUPPORT = 8
FIT_TIE_TOL = 1e-9
DEGENERATE_SPREAD = 1e-12


@dataclass
class TruncatedOperator:
    radius: int
    points: List[Point]
    matrix: np.ndarray
    source: Element

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix @ vector


def box_points(n: int, radius: int) -> List[Point]:
    """Lattice points of [-radius, radius]^n in lexicographic order."""
    return list(itertools.product(range(-radius, radius + 1), repeat=n))


def build_truncation(f: Element, N: int, *, max_rows: int = MAX_TRUNCATION_ROWS) -> TruncatedOperator:
    """Matrix of lambda(f) compressed to [-N, N]^n.

    Entry (x, z) is f(x - z) sigma(x - z, z), the coefficient of
    delta_x in f # delta_z.
    """
    if N <= 0:
        raise InvalidInputError("truncation radius N must be positive")
    n = f.theta.n
    rows = (2 * N + 1) ** n
    if rows > max_rows:
        raise TruncationTooLargeError(f"(2N+1)^n = {rows} rows exceeds the cap {max_rows}")
    points = box_points(n, N)
    index = {x: i for i, x in enumerate(points)}
    matrix = np.zeros((rows, rows), dtype=complex)
    for col, z in enumerate(points):
        for y, c in f.coeffs.items():
            row = index.get(add_points(y, z))
            if row is not None:
                matrix[row, col] += c * sigma_value(f.theta, y, z)
    return TruncatedOperator(N, points, matrix, f)


@dataclass
class NormBracket:
    estimate: float
    l1_upper: float
    iterations: int
    radius: int


def opnorm_estimate(
    T: TruncatedOperator,
    tol: float,
    *,
    max_iter: int = MAX_POWER_ITERATIONS,
    seed: int = 0,
) -> NormBracket:
    """Largest singular value of T by power iteration on T^H T.

    The Rayleigh value sqrt(<x, T^H T x>) = ||T x|| for unit x, so every
    iterate is a lower bound for ||lambda(f)||.
    """
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    upper = l1_norm(T.source)
    A = T.matrix
    if not A.any():
        return NormBracket(0.0, upper, 0, T.radius)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    previous = 0.0
    estimate = 0.0
    for it in range(1, max_iter + 1):
        y = T.apply(x)
        estimate = float(np.linalg.norm(y))
        z = A.conj().T @ y
        size = np.linalg.norm(z)
        if size == 0.0:
            # start vector fell into the kernel
            x = rng.standard_normal(A.shape[1]) + 0j
            x /= np.linalg.norm(x)
            continue
        x = z / size
        if it > 1 and abs(estimate - previous) <= tol * estimate:
            logger.debug("power iteration converged after %d steps: %.12g", it, estimate)
            return NormBracket(estimate, upper, it, T.radius)
        previous = estimate
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps", last_iterate=estimate
    )


@dataclass
class SpectralRadiusProfile:
    weight: str
    x: Point
    sequence: List[float]
    closed_form: List[float]
    max_deviation: float
    max_phase_error: float
    grs: GRSProfile


def spectral_radius_l1v(
    v: Weight, x: Sequence[int], n_max: int, theta: Optional[ThetaData] = None
) -> SpectralRadiusProfile:
    """||delta_x^k||_{l1_v}^{1/k} for k = 1..n_max next to v(kx)^{1/k}.

    Powers are built by repeated twisted products, so the sequence also
    checks that |c_k| = 1 in delta_x^k = c_k delta_{kx}. Norms are taken in
    log space.
    """
    x = tuple(int(c) for c in x)
    if not any(x):
        raise InvalidInputError("spectral radius profile needs x != 0")
    if n_max < 1:
        raise InvalidInputError("n_max must be at least 1")
    if theta is None:
        theta = ThetaData.build(len(x), {})
    dx = delta(theta, x)
    term = dx
    sequence: List[float] = []
    closed: List[float] = []
    phase_error = 0.0
    for k in range(1, n_max + 1):
        kx = tuple(k * c for c in x)
        sequence.append(float(np.exp(log_weighted_norm(term, v) / k)))
        closed.append(float(np.exp(log_evaluate(v, kx) / k)))
        phase_error = max(phase_error, abs(abs(term[kx]) - 1.0))
        term = twisted_convolve(term, dx)
    deviation = max(abs(a - b) / b for a, b in zip(sequence, closed))
    return SpectralRadiusProfile(
        weight=v.name,
        x=x,
        sequence=sequence,
        closed_form=closed,
        max_deviation=deviation,
        max_phase_error=phase_error,
        grs=grs_profile(v, x, n_max),
    )


@dataclass
class DecayFit:
    model: str  # "polynomial" | "subexponential" | "exponential" | "none"
    params: Dict[str, float]
    residual: float
    degenerate: bool = False
    support: int = 0
    candidates: Dict[str, Dict[str, float]] = field(default_factory=dict)


def _lstsq(feature: np.ndarray, target: np.ndarray) -> Tuple[float, float, float]:
    # target ~ c - rate * feature; returns (c, rate, rms residual)
    design = np.column_stack([np.ones_like(feature), -feature])
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    rms = float(np.sqrt(np.mean((design @ coef - target) ** 2)))
    return float(coef[0]), float(coef[1]), rms


def _fit_subexponential(r: np.ndarray, target: np.ndarray) -> Tuple[float, float, float, float]:
    best = (np.inf, 0.0, 0.0, 0.0)

    def scan(grid: np.ndarray) -> None:
        nonlocal best
        for b in grid:
            c, a, rms = _lstsq(r**b, target)
            if rms < best[0]:
                best = (rms, c, a, float(b))

    scan(np.linspace(0.01, 0.99, 99))
    scan(np.clip(np.linspace(best[3] - 0.01, best[3] + 0.01, 201), 0.001, 0.99))
    rms, c, a, b = best
    return c, a, b, rms


def decay_fit(f: Element, *, norm: LatticeNorm = LatticeNorm.L2) -> DecayFit:
    """Fit log|f(x)| against -s log(1+|x|), -a|x|^b and -a|x|.

    Each model carries a free intercept. Residuals within FIT_TIE_TOL of
    the best are resolved in the order polynomial, exponential,
    subexponential.
    """
    if len(f) < MIN_FIT_SUPPORT:
        raise InsufficientSupportError(
            f"decay fit needs at least {MIN_FIT_SUPPORT} support points, got {len(f)}"
        )
    r = np.array([lattice_norm(x, norm) for x in f.support])
    target = np.log(np.abs(np.array([f[x] for x in f.support])))
    if not np.all(np.isfinite(target)):
        raise InsufficientSupportError("decay fit needs finite nonzero coefficients")
    if np.ptp(target) < DEGENERATE_SPREAD:
        return DecayFit("none", {}, 0.0, degenerate=True, support=len(f))

    c, s, poly_rms = _lstsq(np.log1p(r), target)
    candidates = {"polynomial": {"s": s, "intercept": c, "residual": poly_rms}}
    c, a, exp_rms = _lstsq(r, target)
    candidates["exponential"] = {"a": a, "intercept": c, "residual": exp_rms}
    c, a, b, sub_rms = _fit_subexponential(r, target)
    candidates["subexponential"] = {"a": a, "b": b, "intercept": c, "residual": sub_rms}

    best = min(row["residual"] for row in candidates.values())
    for model in ("polynomial", "exponential", "subexponential"):
        if candidates[model]["residual"] <= best + FIT_TIE_TOL:
            break
    params = {k: v for k, v in candidates[model].items() if k != "residual"}
    return DecayFit(model, params, candidates[model]["residual"], support=len(f), candidates=candidates)


def smooth_class(fit: Optional[DecayFit], n: int) -> Tuple[str, ...]:
    """Membership labels for a decay fit; None means finitely supported."""
    if fit is None:
        return ("finite-support", "ultra-smooth", "smooth", "l1")
    if fit.degenerate:
        return ("no-decay",)
    if fit.model in ("exponential", "subexponential"):
        if fit.params.get("a", 0.0) > 0:
            return ("ultra-smooth", "smooth", "l1")
        return ("no-decay",)
    # (1+|x|)^{-s} is summable on Z^n iff s > n
    if fit.params["s"] > n:
        return ("l1",)
    return ("not-l1",)


@dataclass
class InversionReport:
    inverse: Element
    residual_l1: float
    residual_estimate: float
    terms_used: int
    stop_reason: str  # "converged" | "max-terms" | "overflow"
    converged: bool
    diverged: bool
    weighted_diverged: bool
    weighted_norms: Dict[str, float]
    term_weighted_norms: List[float]
    partial_weighted_norms: List[float]
    partial_l1_norms: List[float]
    decay_fit: Optional[DecayFit]
    smooth_class: Tuple[str, ...]


def _growing(values: Sequence[float]) -> bool:
    """True if the block-end values grow, at a non-shrinking rate, over
    GROWING_BLOCKS consecutive blocks. Non-finite values count as growth."""
    if not all(math.isfinite(value) for value in values):
        return True
    ends = list(values[::BLOCK_SIZE])
    steps = np.diff(ends)
    run = 0
    for prev, cur in zip(np.concatenate([[0.0], steps[:-1]]), steps):
        run = run + 1 if cur > 0 and cur >= prev else 0
        if run >= GROWING_BLOCKS:
            return True
    return False


def neumann_invert(f: Element, tol: float, max_terms: int, v: Weight) -> InversionReport:
    """Invert f = c delta_0 - h by g = c^{-1} sum_k (h/c)^k.

    With p_K = (h/c)^{K+1}, f # g_K = delta_0 - p_K, so ||p_K||_1 is the
    running residual. The series stops when that residual is <= tol and
    the last weighted term is negligible against the weighted partial sum,
    or at max_terms. A run whose terms leave the float range stops before
    the offending term is added and is reported as diverged.
    """
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    if max_terms < 1:
        raise InvalidInputError("max_terms must be at least 1")
    theta = f.theta
    origin = (0,) * theta.n
    c = f[origin]
    if c == 0:
        raise NotDiagonallyDominantError("f(0) = 0: the Neumann series does not apply")
    one = unit(theta)
    ratio = sub(one, scale(f, 1.0 / c))  # h / c

    power = one
    partial = scale(one, 0.0)
    residual = l1_norm(ratio)
    term_weighted: List[float] = []
    partial_weighted: List[float] = []
    partial_l1: List[float] = []
    converged = False
    stop_reason = "max-terms"
    terms_used = 0
    for k in range(max_terms):
        term = scale(power, 1.0 / c)
        candidate = partial + term
        if not math.isfinite(l1_norm(candidate)):
            stop_reason = "overflow"
            break
        partial = candidate
        terms_used = k + 1
        term_weighted.append(weighted_norm(term, v))
        partial_weighted.append(weighted_norm(partial, v))
        partial_l1.append(l1_norm(partial))
        power = twisted_convolve(power, ratio)
        residual = l1_norm(power)
        if not math.isfinite(residual):
            stop_reason = "overflow"
            break
        if residual <= tol:
            converged = True
            if not power.coeffs or term_weighted[-1] <= tol * partial_weighted[-1]:
                stop_reason = "converged"
                break

    if stop_reason == "overflow":
        residual = math.inf
        logger.warning("Neumann terms overflowed after %d terms; series stopped", terms_used)
    diverged = stop_reason == "overflow" or (not converged and _growing(partial_l1))
    weighted_diverged = _growing(partial_weighted)
    if weighted_diverged:
        logger.info("weighted partial sums under %s keep growing after %d terms", v.name, terms_used)
    if diverged:
        logger.info("l1 partial sums keep growing after %d terms", terms_used)

    actual = l1_norm(sub(twisted_convolve(f, partial), one))
    if not math.isfinite(actual):
        actual = math.inf
    try:
        fit: Optional[DecayFit] = decay_fit(partial)
    except InsufficientSupportError:
        fit = None
    return InversionReport(
        inverse=partial,
        residual_l1=actual,
        residual_estimate=residual,
        terms_used=terms_used,
        stop_reason=stop_reason,
        converged=converged,
        diverged=diverged,
        weighted_diverged=weighted_diverged,
        weighted_norms={"l1": l1_norm(partial), v.name: weighted_norm(partial, v)},
        term_weighted_norms=term_weighted,
        partial_weighted_norms=partial_weighted,
        partial_l1_norms=partial_l1,
        decay_fit=fit,
        smooth_class=smooth_class(fit, theta.n),
    )


@dataclass
class CStarInverseEstimate:
    s_min: float
    inverse_norm: float
    radius: int
    caveat: str = (
        "compressions of lambda(f) can underestimate invertibility thresholds; "
        "trusted for c delta_0 - delta_x with |c| > 1"
    )


def cstar_inverse_norm(
    f: Element, N: int, *, max_rows: int = MAX_TRUNCATION_ROWS, rcond: float = 1e-12
) -> CStarInverseEstimate:
    T = build_truncation(f, N, max_rows=max_rows)
    s = np.linalg.svd(T.matrix, compute_uv=False)
    s_min = float(s[-1])
    if s_min == 0.0 or s_min <= rcond * float(s[0]):
        raise SingularTruncationError(f"truncation at N={N} is numerically singular (s_min={s_min:.3g})")
    return CStarInverseEstimate(s_min, 1.0 / s_min, N)
