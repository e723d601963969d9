from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from .algebra import (
    Element,
    delta,
    involution,
    l1_norm,
    max_abs_diff,
    twisted_convolve,
    unit,
    weighted_norm,
)
from .extension import (
    GroupPoint,
    circ,
    g_convolve,
    g_convolve_by_quadrature,
    g_identity,
    g_inverse,
    g_involution,
    g_mul,
    g_norm,
    max_abs_diff_g,
)
from .phases import (
    FloatTheta,
    IrrationalBasis,
    Point,
    ThetaData,
    UnitPhase,
    add_points,
    neg_point,
    phase_mul,
    phase_pow,
    sigma,
    sub_points,
)
from .weights import Weight, check_axioms

HOMOMORPHISM_TOL = 1e-12
INVOLUTION_TOL = 1e-14
UNITARY_TOL = 1e-15
QUADRATURE_TOL = 1e-9

# Trials of the extension suite that also run the O(q^2) quadrature reference.
QUADRATURE_TRIALS = 3

# Sampling boxes for the randomized suites.
COCYCLE_BOX = 10
ELEMENT_BOX = 3
ELEMENT_SUPPORT = 6
WEIGHT_BOX = 10

Check = Tuple[str, bool, Callable[[], str]]  # (identity, pass, lazy detail)


@dataclass
class SuiteResult:
    name: str
    trials: int
    failed: int = 0
    skipped: bool = False
    counterexample: Optional[Tuple[str, str]] = None  # (identity, detail)

    @property
    def passed(self) -> int:
        return 0 if self.skipped else self.trials - self.failed

    def add_trial(self, checks: List[Check]) -> None:
        bad = [(name, detail) for name, ok, detail in checks if not ok]
        if bad:
            self.failed += 1
            if self.counterexample is None:
                name, detail = bad[0]
                self.counterexample = (name, detail())


@dataclass
class ValidationReport:
    ok: bool
    suites: List[SuiteResult] = field(default_factory=list)


def random_point(rng: np.random.Generator, n: int, box: int) -> Point:
    return tuple(int(c) for c in rng.integers(-box, box + 1, size=n))


def random_element(
    theta: ThetaData,
    rng: np.random.Generator,
    support: int = ELEMENT_SUPPORT,
    box: int = ELEMENT_BOX,
) -> Element:
    size = int(rng.integers(1, support + 1))
    coeffs: Dict[Point, complex] = {}
    for _ in range(size):
        coeffs[random_point(rng, theta.n, box)] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return Element(theta, coeffs)


def random_phase(theta: ThetaData, rng: np.random.Generator) -> UnitPhase:
    irr = {t: Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) for t in range(len(theta.basis))}
    return UnitPhase.of(Fraction(int(rng.integers(0, 12)), 12), irr)


def random_theta(
    rng: np.random.Generator,
    n: int,
    *,
    max_den: int = 6,
    irrational: int = 2,
    irrational_prob: float = 0.5,
) -> ThetaData:
    """Random exact theta: rational parts with denominators <= max_den,
    plus small rational multiples of up to `irrational` basis values."""
    basis = IrrationalBasis(tuple(float(np.sqrt(p)) for p in (2, 3, 5, 7)[:irrational]))
    entries: Dict[Tuple[int, int], UnitPhase] = {}
    for k in range(2, n + 1):
        for j in range(1, k):
            den = int(rng.integers(1, max_den + 1))
            irr: Dict[int, Fraction] = {}
            for t in range(irrational):
                if rng.random() < irrational_prob:
                    irr[t] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
            entries[(k, j)] = UnitPhase.of(Fraction(int(rng.integers(0, den)), den), irr)
    return ThetaData.build(n, entries, basis)


def cocycle_suite(theta: ThetaData, trials: int, rng: np.random.Generator) -> SuiteResult:
    """Exact phase identities: the cocycle law, the sign rules, the rewrite
    sigma(y,-y) conj(sigma(-y,x)) = sigma(y, x-y) and additivity of powers."""
    result = SuiteResult("cocycle", trials)
    n = theta.n
    for _ in range(trials):
        l, m, p = (random_point(rng, n, COCYCLE_BOX) for _ in range(3))
        s = sigma(theta, l, m)
        j, k = (int(c) for c in rng.integers(-20, 21, size=2))
        cocycle = phase_mul(s, sigma(theta, add_points(l, m), p)) == phase_mul(
            sigma(theta, l, add_points(m, p)), sigma(theta, m, p)
        )
        signs = sigma(theta, neg_point(l), m) == s.conj() == sigma(theta, l, neg_point(m))
        rewrite = phase_mul(sigma(theta, m, neg_point(m)), sigma(theta, neg_point(m), l).conj())
        result.add_trial(
            [
                ("cocycle", cocycle, lambda: f"l={l} m={m} p={p}"),
                ("sign", signs, lambda: f"l={l} m={m}"),
                ("sigma-rewrite", rewrite == sigma(theta, m, sub_points(l, m)), lambda: f"x={l} y={m}"),
                (
                    "power-additivity",
                    phase_pow(s, j + k) == phase_mul(phase_pow(s, j), phase_pow(s, k)),
                    lambda: f"phase={s} j={j} k={k}",
                ),
            ]
        )
    return result


def algebra_suite(
    theta: ThetaData, weight: Weight, trials: int, rng: np.random.Generator
) -> SuiteResult:
    result = SuiteResult("algebra", trials)
    one = unit(theta)
    for _ in range(trials):
        f, g, h = (random_element(theta, rng) for _ in range(3))
        fg = twisted_convolve(f, g)
        err = max_abs_diff(twisted_convolve(fg, h), twisted_convolve(f, twisted_convolve(g, h)))
        err_star = max_abs_diff(involution(fg), twisted_convolve(involution(g), involution(f)))
        y = random_point(rng, theta.n, COCYCLE_BOX)
        dy = delta(theta, y)
        err_u = max(
            max_abs_diff(twisted_convolve(dy, involution(dy)), one),
            max_abs_diff(twisted_convolve(involution(dy), dy), one),
        )
        lhs = weighted_norm(fg, weight)
        rhs = weighted_norm(f, weight) * weighted_norm(g, weight)
        result.add_trial(
            [
                ("associativity", err <= HOMOMORPHISM_TOL, lambda: f"error {err:.3e}"),
                ("star-antimultiplicative", err_star <= HOMOMORPHISM_TOL, lambda: f"error {err_star:.3e}"),
                ("unitarity", err_u <= UNITARY_TOL, lambda: f"y={y} error {err_u:.3e}"),
                (
                    "weighted-submultiplicative",
                    lhs <= rhs * (1.0 + HOMOMORPHISM_TOL),
                    lambda: f"{lhs:.6g} > {rhs:.6g} under {weight.name}",
                ),
            ]
        )
    return result


def weights_suite(weight: Weight, n: int, trials: int, seed: int) -> SuiteResult:
    report = check_axioms(weight, trials, WEIGHT_BOX, n=n, seed=seed)
    result = SuiteResult("weights", trials)
    if report.violations:
        v = report.violations[0]
        result.failed = min(len(report.violations), trials)
        result.counterexample = (v.kind, f"x={v.x} y={v.y} lhs={v.lhs:.6g} rhs={v.rhs:.6g}")
    return result


def extension_suite(
    theta: ThetaData, trials: int, rng: np.random.Generator, quad_points: int = 64
) -> SuiteResult:
    """Isometric *-homomorphism f -> f° and the group axioms of G.

    The first QUADRATURE_TRIALS trials also compare the Fourier-side product
    with the defining integral sampled at `quad_points` circle points.
    """
    result = SuiteResult("extension", trials)
    e = g_identity(theta.n)
    for trial in range(trials):
        f, g = random_element(theta, rng), random_element(theta, rng)
        cf = circ(f)
        norm_f, norm_cf = l1_norm(f), g_norm(cf)
        err = max_abs_diff_g(circ(twisted_convolve(f, g)), g_convolve(cf, circ(g)))
        err_star = max_abs_diff_g(circ(involution(f)), g_involution(cf))

        a, b, c = (
            GroupPoint(random_point(rng, theta.n, COCYCLE_BOX), random_phase(theta, rng)) for _ in range(3)
        )
        a_inv = g_inverse(theta, a)
        checks: List[Check] = [
            ("isometry", norm_f == norm_cf, lambda: f"{norm_cf!r} != {norm_f!r}"),
            ("homomorphism", err <= HOMOMORPHISM_TOL, lambda: f"error {err:.3e}"),
            ("involution", err_star <= INVOLUTION_TOL, lambda: f"error {err_star:.3e}"),
            (
                "group-associativity",
                g_mul(theta, g_mul(theta, a, b), c) == g_mul(theta, a, g_mul(theta, b, c)),
                lambda: f"a={a} b={b} c={c}",
            ),
            ("group-identity", g_mul(theta, e, a) == a == g_mul(theta, a, e), lambda: f"a={a}"),
            (
                "group-inverse",
                g_mul(theta, a, a_inv) == e == g_mul(theta, a_inv, a),
                lambda: f"a={a}",
            ),
        ]
        if trial < QUADRATURE_TRIALS:
            p, r = (circ(random_element(theta, rng, support=2, box=2)) for _ in range(2))
            err_q = max_abs_diff_g(g_convolve(p, r), g_convolve_by_quadrature(p, r, quad_points))
            checks.append(
                ("quadrature-convolution", err_q <= QUADRATURE_TOL, lambda: f"error {err_q:.3e} at q={quad_points}")
            )
        result.add_trial(checks)
    return result


def validate(
    theta: Union[ThetaData, FloatTheta],
    weight: Weight,
    trials: Dict[str, int],
    seed: int = 0,
    quad_points: int = 64,
) -> ValidationReport:
    """Run every identity suite from one seeded generator.

    `trials` maps suite name (cocycle, algebra, weights, extension) to a
    trial count. Suites needing exact phases are skipped for a float theta.
    """
    rng = np.random.default_rng(seed)
    weights = weights_suite(weight, theta.n, trials["weights"], seed)
    if isinstance(theta, FloatTheta):
        suites = [SuiteResult(name, trials[name], skipped=True) for name in ("cocycle", "algebra")]
        suites += [weights, SuiteResult("extension", trials["extension"], skipped=True)]
    else:
        suites = [
            cocycle_suite(theta, trials["cocycle"], rng),
            algebra_suite(theta, weight, trials["algebra"], rng),
            weights,
            extension_suite(theta, trials["extension"], rng, quad_points),
        ]
    return ValidationReport(ok=all(s.failed == 0 for s in suites), suites=suites)
