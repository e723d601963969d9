import math

import numpy as np
import pytest

from nctorus.core.errors import InvalidInputError
from nctorus.core.weights import (
    LatticeNorm,
    WeightKind,
    check_axioms,
    constant_one,
    custom,
    evaluate,
    exponential,
    grs_profile,
    grs_verdict,
    lattice_norm,
    log_evaluate,
    polynomial,
    product,
    subexponential,
)


def test_lattice_norms():
    assert lattice_norm((3, 4)) == 5.0
    assert lattice_norm((3, -4), LatticeNorm.L1) == 7.0
    assert lattice_norm((3, -4), "linf") == 4.0
    assert lattice_norm(()) == 0.0


def test_family_values():
    assert evaluate(constant_one(), (7, 7)) == 1.0
    assert evaluate(polynomial(2.0), (3, 4)) == pytest.approx(36.0)
    assert evaluate(polynomial(2.0, LatticeNorm.L1), (3, 4)) == pytest.approx(64.0)
    assert evaluate(polynomial(2.0, LatticeNorm.LINF), (3, 4)) == pytest.approx(25.0)
    assert evaluate(subexponential(1.0, 0.5), (4, 0)) == pytest.approx(math.exp(2.0))
    assert evaluate(exponential(1.0), (1, 0)) == pytest.approx(math.e)
    assert evaluate(product(polynomial(1.0), exponential(1.0)), (1, 0)) == pytest.approx(2 * math.e)


def test_log_evaluate_matches():
    for v in [polynomial(3.0), subexponential(0.7, 0.3), exponential(2.0), product(polynomial(1.0), exponential(0.5))]:
        for x in [(0, 0), (1, 2), (-5, 3)]:
            assert log_evaluate(v, x) == pytest.approx(math.log(evaluate(v, x)))


def test_custom_table_and_fallback():
    v = custom({(1, 0): 2.0, (-1, 0): 2.0}, fallback=polynomial(1.0))
    assert v.kind is WeightKind.CUSTOM
    assert evaluate(v, (1, 0)) == 2.0
    assert evaluate(v, (0, 3)) == pytest.approx(4.0)
    assert evaluate(custom({(1, 0): 3.0}), (2, 2)) == 1.0


@pytest.mark.parametrize(
    "build",
    [
        lambda: polynomial(-1.0),
        lambda: subexponential(1.0, 1.0),
        lambda: subexponential(0.0, 0.5),
        lambda: exponential(0.0),
        lambda: product(),
        lambda: custom({(1, 0): 0.0}),
    ],
)
def test_invalid_parameters(build):
    with pytest.raises(InvalidInputError):
        build()


def test_grs_verdicts():
    x = (1, 0)
    assert grs_verdict(polynomial(2.0), x).holds is True
    assert grs_verdict(subexponential(1.0, 0.5), x).limit == 1.0
    exp_verdict = grs_verdict(exponential(1.0), x)
    assert exp_verdict.holds is False
    assert exp_verdict.limit == pytest.approx(math.e)
    assert grs_verdict(custom({(1, 0): 2.0}), x).holds is None
    both = grs_verdict(product(polynomial(1.0), subexponential(1.0, 0.5)), x)
    assert both.holds is True and both.limit == 1.0
    mixed = grs_verdict(product(polynomial(1.0), exponential(2.0)), x)
    assert mixed.holds is False
    assert mixed.limit == pytest.approx(math.exp(2.0))


def test_grs_profiles():
    poly = grs_profile(polynomial(2.0), (1, 0), 100)
    assert poly.sequence[99] == pytest.approx(1.0967, abs=1e-4)
    assert all(a > b for a, b in zip(poly.sequence[1:], poly.sequence[2:]))
    sub = grs_profile(subexponential(1.0, 0.5), (2, 1), 200)
    assert np.all(np.diff(sub.sequence) < 0)
    expo = grs_profile(exponential(1.0), (1, 0), 50)
    assert np.allclose(expo.sequence, math.e)
    with pytest.raises(InvalidInputError):
        grs_profile(polynomial(1.0), (0, 0), 10)
    with pytest.raises(InvalidInputError):
        grs_profile(polynomial(1.0), (1, 0), 0)


@pytest.mark.parametrize(
    "v",
    [
        constant_one(),
        polynomial(2.5),
        subexponential(1.0, 0.5),
        exponential(0.3, LatticeNorm.L1),
        product(polynomial(1.0), subexponential(0.5, 0.25)),
    ],
)
def test_builtin_families_satisfy_the_axioms(v):
    report = check_axioms(v, 500, 10, n=3, seed=1)
    assert report.ok, report.violations[:3]
    for x in [(1, 2, 3), (-4, 0, 9)]:
        assert evaluate(v, x) == evaluate(v, tuple(-c for c in x))


def test_corrupted_custom_weight_is_reported():
    v = custom({(1, 0): 0.5})
    report = check_axioms(v, 50, 3, n=2, seed=0)
    assert not report.ok
    kinds = {violation.kind for violation in report.violations}
    assert "symmetric" in kinds
    assert "submultiplicative" in kinds


def test_unit_axiom():
    report = check_axioms(custom({(0, 0): 0.5}), 10, 2, n=2)
    assert any(v.kind == "unit" for v in report.violations)
