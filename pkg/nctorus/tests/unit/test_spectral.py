import math

import numpy as np
import pytest

from nctorus.core.algebra import (
    Element,
    delta,
    involution,
    max_abs_diff,
    twisted_convolve,
    unit,
)
from nctorus.core.errors import (
    ConvergenceError,
    InsufficientSupportError,
    InvalidInputError,
    NotDiagonallyDominantError,
    SingularTruncationError,
    TruncationTooLargeError,
)
from nctorus.core.phases import IrrationalBasis, ThetaData, UnitPhase
from nctorus.core.weights import constant_one, exponential, polynomial
from nctorus.engines.spectral import (
    DecayFit,
    box_points,
    build_truncation,
    cstar_inverse_norm,
    decay_fit,
    neumann_invert,
    opnorm_estimate,
    smooth_class,
    spectral_radius_l1v,
)


def as_vector(f, points):
    return np.array([f[x] for x in points], dtype=complex)


def alpha_theta():
    return ThetaData.build(2, {(2, 1): UnitPhase.of(0, {0: 1})}, IrrationalBasis((2**0.5,)))


def line():
    return ThetaData.build(1)


def test_box_points_are_lexicographic():
    pts = box_points(2, 1)
    assert len(pts) == 9
    assert pts[0] == (-1, -1)
    assert pts == sorted(pts)


def test_truncation_of_scalars():
    theta = alpha_theta()
    T = build_truncation(unit(theta), 2)
    assert np.array_equal(T.matrix, np.eye(25))
    T2 = build_truncation(Element(theta, {(0, 0): 2.0}), 2)
    assert np.array_equal(T2.matrix, 2 * np.eye(25))


def test_truncation_of_dirac_is_a_partial_shift():
    theta = alpha_theta()
    T = build_truncation(delta(theta, (1, 0)), 2)
    index = {x: i for i, x in enumerate(T.points)}
    for z in T.points:
        column = T.matrix[:, index[z]]
        target = (z[0] + 1, z[1])
        if target in index:
            assert np.count_nonzero(column) == 1
            assert abs(column[index[target]]) == pytest.approx(1.0)
        else:
            assert not column.any()


def test_truncation_columns_match_products():
    theta = alpha_theta()
    f = Element(theta, {(0, 0): 1.0, (1, -1): 0.5j, (0, 1): -0.25})
    T = build_truncation(f, 3)
    index = {x: i for i, x in enumerate(T.points)}
    for z in box_points(2, 2):
        expected = as_vector(twisted_convolve(f, delta(theta, z)), T.points)
        assert np.max(np.abs(T.matrix[:, index[z]] - expected)) <= 1e-12
    e0 = np.zeros(len(T.points), dtype=complex)
    e0[index[(0, 0)]] = 1.0
    assert np.array_equal(T.apply(e0), as_vector(f, T.points))


def test_truncation_limits():
    theta = alpha_theta()
    with pytest.raises(InvalidInputError):
        build_truncation(unit(theta), 0)
    with pytest.raises(TruncationTooLargeError):
        build_truncation(unit(theta), 1, max_rows=8)


def test_opnorm_of_unitaries_and_scalars():
    theta = alpha_theta()
    for y in [(1, 0), (2, -3)]:
        bracket = opnorm_estimate(build_truncation(delta(theta, y), 3), 1e-12)
        assert bracket.estimate == pytest.approx(1.0, abs=1e-9)
        assert bracket.l1_upper == pytest.approx(1.0)
    two = opnorm_estimate(build_truncation(Element(theta, {(0, 0): 2.0}), 2), 1e-12)
    assert two.estimate == pytest.approx(2.0, abs=1e-9)


def test_opnorm_compressions_increase_towards_the_norm():
    theta = line()
    f = Element(theta, {(0,): 1.0, (1,): 1.0})
    estimates = []
    for N in (1, 2, 4):
        bracket = opnorm_estimate(build_truncation(f, N), 1e-12)
        m = 2 * N + 1
        assert bracket.estimate == pytest.approx(2 * math.cos(math.pi / (2 * m + 1)), rel=1e-6)
        assert bracket.estimate <= bracket.l1_upper
        estimates.append(bracket.estimate)
    assert estimates == sorted(estimates)
    assert estimates[-1] < 2.0


def test_opnorm_zero_and_non_convergence():
    theta = line()
    zero = opnorm_estimate(build_truncation(Element(theta, {}), 2), 1e-9)
    assert zero.estimate == 0.0
    f = Element(theta, {(0,): 1.0, (1,): 1.0})
    with pytest.raises(ConvergenceError) as info:
        opnorm_estimate(build_truncation(f, 4), 1e-12, max_iter=1)
    assert info.value.last_iterate > 0
    with pytest.raises(InvalidInputError):
        opnorm_estimate(build_truncation(f, 1), 0.0)


def test_spectral_radius_profiles():
    poly = spectral_radius_l1v(polynomial(2), (1, 0), 50, alpha_theta())
    assert poly.max_deviation <= 1e-12
    assert poly.max_phase_error <= 1e-12
    assert poly.sequence[-1] == pytest.approx(51 ** (2 / 50))
    assert poly.grs.verdict.holds is True

    exp = spectral_radius_l1v(exponential(1.0), (1, 0), 20)
    assert all(value == pytest.approx(math.e) for value in exp.sequence)
    assert exp.grs.verdict.holds is False


def test_spectral_radius_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        spectral_radius_l1v(polynomial(1), (0, 0), 10)
    with pytest.raises(InvalidInputError):
        spectral_radius_l1v(polynomial(1), (1, 0), 0)


def test_neumann_geometric_series():
    theta = alpha_theta()
    f = Element(theta, {(0, 0): 1.0, (1, 0): -0.5})
    report = neumann_invert(f, 1e-10, 200, polynomial(2))
    assert report.converged
    assert report.stop_reason == "converged"
    assert not report.diverged
    assert not report.weighted_diverged
    assert report.residual_l1 <= 1e-9
    assert report.inverse[(3, 0)] == pytest.approx(0.125)
    assert report.decay_fit.model == "exponential"
    assert report.decay_fit.params["a"] == pytest.approx(math.log(2), rel=0.05)
    assert report.smooth_class == ("ultra-smooth", "smooth", "l1")


def test_neumann_scalar_stops_at_once():
    theta = alpha_theta()
    report = neumann_invert(Element(theta, {(0, 0): 2.0}), 1e-10, 50, polynomial(1))
    assert report.terms_used == 1
    assert report.inverse == Element(theta, {(0, 0): 0.5})
    assert report.decay_fit is None
    assert report.smooth_class[0] == "finite-support"


def test_neumann_needs_a_unit_coefficient():
    theta = alpha_theta()
    with pytest.raises(NotDiagonallyDominantError):
        neumann_invert(Element(theta, {(1, 0): 1.0, (0, 1): 0.5}), 1e-10, 50, polynomial(1))
    with pytest.raises(InvalidInputError):
        neumann_invert(unit(theta), 0.0, 50, polynomial(1))


def test_neumann_weighted_divergence_under_exponential_weight():
    theta = alpha_theta()
    f = Element(theta, {(0, 0): 1.5, (1, 0): -1.0})
    report = neumann_invert(f, 1e-10, 200, exponential(1.0))
    assert report.converged
    assert report.residual_l1 <= 1e-9
    assert not report.diverged
    assert report.weighted_diverged
    assert report.terms_used == 200
    assert report.stop_reason == "max-terms"
    for k, norm in enumerate(report.term_weighted_norms):
        assert norm == pytest.approx(1.5 ** -(k + 1) * math.e**k, rel=1e-9)
    assert cstar_inverse_norm(f, 6).inverse_norm <= 2 + 1e-6


def test_neumann_stops_before_terms_overflow():
    theta = alpha_theta()
    f = Element(theta, {(0, 0): 1.0, (1, 0): -2.0})
    report = neumann_invert(f, 1e-10, 1100, constant_one())
    assert report.stop_reason == "overflow"
    assert report.diverged
    assert not report.converged
    # 2^0 + ... + 2^1023 no longer fits in a float
    assert report.terms_used == 1023
    assert all(math.isfinite(v) for v in report.partial_l1_norms)
    assert report.residual_estimate == math.inf
    assert report.residual_l1 == pytest.approx(2.0**1023)
    assert report.decay_fit.model == "exponential"
    assert report.decay_fit.params["a"] == pytest.approx(-math.log(2), rel=1e-6)
    assert report.smooth_class == ("no-decay",)


def test_neumann_commutes_with_the_involution():
    theta = alpha_theta()
    f = Element(theta, {(0, 0): 1.0, (1, 0): -0.3, (0, 1): -0.2j})
    report = neumann_invert(f, 1e-10, 100, constant_one())
    star = neumann_invert(involution(f), 1e-10, 100, constant_one())
    assert max_abs_diff(star.inverse, involution(report.inverse)) <= 1e-9
    left = twisted_convolve(report.inverse, f)
    assert max_abs_diff(left, unit(theta)) <= 1e-9


def test_cstar_inverse_bracket():
    theta = alpha_theta()
    f = Element(theta, {(0, 0): 2.0, (1, 0): -1.0})
    estimate = cstar_inverse_norm(f, 6)
    assert 0.5 <= estimate.inverse_norm <= 1.0 + 1e-9
    scalar = cstar_inverse_norm(Element(theta, {(0, 0): 2.0}), 2)
    assert scalar.inverse_norm == pytest.approx(0.5)
    with pytest.raises(SingularTruncationError):
        cstar_inverse_norm(Element(theta, {}), 2)


def _sampled(theta, law, radius=5):
    return Element(theta, {x: law(math.hypot(*x)) for x in box_points(2, radius)})


def test_decay_fit_recovers_laws():
    theta = alpha_theta()
    poly = decay_fit(_sampled(theta, lambda r: (1 + r) ** -3))
    assert poly.model == "polynomial"
    assert poly.params["s"] == pytest.approx(3, rel=0.05)

    expo = decay_fit(_sampled(theta, lambda r: math.exp(-r)))
    assert expo.model == "exponential"
    assert expo.params["a"] == pytest.approx(1.0, rel=0.05)

    subexp = decay_fit(_sampled(theta, lambda r: math.exp(-0.5 * r**0.5)))
    assert subexp.model == "subexponential"
    assert subexp.params["a"] == pytest.approx(0.5, rel=0.05)
    assert subexp.params["b"] == pytest.approx(0.5, rel=0.05)
    assert set(subexp.candidates) == {"polynomial", "exponential", "subexponential"}


def test_decay_fit_degenerate_and_small_support():
    theta = alpha_theta()
    flat = decay_fit(_sampled(theta, lambda r: 0.5, radius=1))
    assert flat.degenerate
    assert smooth_class(flat, 2) == ("no-decay",)
    with pytest.raises(InsufficientSupportError):
        decay_fit(Element(theta, {(0, 0): 1.0, (1, 0): 0.5, (2, 0): 0.25}))
    blown = _sampled(theta, lambda r: math.exp(-r))
    blown = Element(theta, {**blown.coeffs, (5, 5): math.inf})
    with pytest.raises(InsufficientSupportError):
        decay_fit(blown)


def test_smooth_class_labels():
    fit = DecayFit("polynomial", {"s": 3.0, "intercept": 0.0}, 0.0)
    assert smooth_class(fit, 2) == ("l1",)
    assert smooth_class(fit, 3) == ("not-l1",)
    assert smooth_class(None, 2) == ("finite-support", "ultra-smooth", "smooth", "l1")
    assert smooth_class(DecayFit("exponential", {"a": 0.3}, 0.0), 2)[0] == "ultra-smooth"
