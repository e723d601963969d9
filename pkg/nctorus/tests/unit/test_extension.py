import math

import pytest

from nctorus.core.algebra import Element, involution, l1_norm, twisted_convolve
from nctorus.core.errors import InvalidInputError
from nctorus.core.extension import (
    GFunction,
    GroupPoint,
    circ,
    extend_weight,
    g_convolve,
    g_convolve_by_quadrature,
    g_identity,
    g_inverse,
    g_involution,
    g_mul,
    g_norm,
    max_abs_diff_g,
    weighted_g_norm,
)
from nctorus.core.phases import IrrationalBasis, ThetaData, UnitPhase
from nctorus.core.weights import exponential, polynomial


def theta3():
    return ThetaData.build(
        3,
        {(2, 1): UnitPhase.of([1, 3], {0: 1}), (3, 2): UnitPhase.of(0, {1: [1, 2]}), (3, 1): UnitPhase.of([1, 5])},
        IrrationalBasis((2**0.5, 3**0.5)),
    )


def sample_pair(theta):
    f = Element(theta, {(0, 0, 0): 1.0, (1, -1, 2): 0.5j, (-2, 1, 0): -0.75 + 0.1j})
    g = Element(theta, {(1, 0, 0): 0.3, (0, 2, -1): -1.0 + 0.5j})
    return f, g


def test_circ_is_an_isometry():
    theta = theta3()
    f, _ = sample_pair(theta)
    cf = circ(f)
    assert cf.frequencies == {-1}
    assert g_norm(cf) == l1_norm(f)


def test_circ_is_a_homomorphism():
    theta = theta3()
    f, g = sample_pair(theta)
    lhs = circ(twisted_convolve(f, g))
    rhs = g_convolve(circ(f), circ(g))
    assert max_abs_diff_g(lhs, rhs) <= 1e-12


def test_circ_respects_involutions():
    theta = theta3()
    f, _ = sample_pair(theta)
    assert max_abs_diff_g(circ(involution(f)), g_involution(circ(f))) <= 1e-14


def test_frequency_convolution_matches_the_group_integral():
    theta = theta3()
    F = GFunction(theta, {((0, 0, 0), 0): 1.0, ((1, 0, 0), 1): 0.5j, ((0, 1, 1), -1): -0.25})
    H = GFunction(theta, {((1, 1, 0), 1): 2.0, ((0, -1, 0), -1): 1.0 - 1j, ((0, 0, 0), 0): 0.5})
    exact = g_convolve(F, H)
    reference = g_convolve_by_quadrature(F, H, quad_points=16)
    assert max_abs_diff_g(exact, reference) <= 1e-9


def test_quadrature_needs_enough_points():
    theta = theta3()
    F = GFunction(theta, {((0, 0, 0), 3): 1.0})
    with pytest.raises(InvalidInputError):
        g_convolve_by_quadrature(F, F, quad_points=8)
    with pytest.raises(InvalidInputError):
        weighted_g_norm(GFunction(theta, {((0, 0, 0), 3): 1.0, ((1, 0, 0), 0): 1.0}), extend_weight(polynomial(1.0)), 4)


def test_single_frequency_norm_still_checks_the_quadrature_size():
    theta = theta3()
    f, _ = sample_pair(theta)
    cf = circ(f)
    with pytest.raises(InvalidInputError):
        g_norm(cf, 1)
    with pytest.raises(InvalidInputError):
        g_norm(GFunction(theta, {((0, 0, 0), 3): 1.0}), 6)
    assert g_norm(cf, 3) == l1_norm(f)


def test_weighted_g_norm():
    theta = theta3()
    omega = extend_weight(polynomial(1.0))
    single = circ(Element(theta, {(1, 0, 0): 2.0, (0, 0, 0): 1.0}))
    assert weighted_g_norm(single, omega) == pytest.approx(2.0 * 2.0 + 1.0)
    spread = GFunction(theta, {((1, 0, 0), 0): 2.0, ((0, 0, 0), 2): 1j})
    assert weighted_g_norm(spread, omega, quad_points=16) == pytest.approx(5.0, abs=1e-12)
    # |1 + xi| averages to 4/pi over the circle
    bump = GFunction(theta, {((0, 0, 0), 0): 1.0, ((0, 0, 0), 1): 1.0})
    assert weighted_g_norm(bump, omega, quad_points=4096) == pytest.approx(4 / math.pi, abs=1e-6)


def test_extended_weight_inherits_the_grs_verdict():
    assert extend_weight(polynomial(2.0)).grs_verdict((1, 0, 0)).holds is True
    omega = extend_weight(exponential(1.0))
    assert omega.grs_verdict((1, 0, 0)).holds is False
    assert omega.evaluate((1, 0, 0), 1j) == pytest.approx(math.e)


def test_group_law():
    theta = theta3()
    a = GroupPoint((1, 2, -1), UnitPhase.of([1, 7], {0: 2}))
    b = GroupPoint((0, -3, 4), UnitPhase.of(0, {1: [1, 3]}))
    c = GroupPoint((5, 0, 1))
    e = g_identity(3)
    assert g_mul(theta, g_mul(theta, a, b), c) == g_mul(theta, a, g_mul(theta, b, c))
    assert g_mul(theta, e, a) == a == g_mul(theta, a, e)
    assert g_mul(theta, a, g_inverse(theta, a)) == e
    assert g_mul(theta, g_inverse(theta, a), a) == e
