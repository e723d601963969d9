import numpy as np

from nctorus.core.algebra import delta, involution, max_abs_diff, power, twisted_convolve, unit
from nctorus.core.phases import add_points, phase_mul, scale_point, sigma
from nctorus.core.validate import COCYCLE_BOX, random_point, random_theta

CONFIGS = 20
TRIPLES_PER_CONFIG = 10_000
DIRAC_SAMPLES = 1_000


def test_cocycle_identity_over_random_configs():
    irrational_configs = 0
    for seed in range(CONFIGS):
        rng = np.random.default_rng(seed)
        theta = random_theta(rng, 2 + seed % 4)
        irrational_configs += any(p.irr for _, p in theta.vartheta)
        for _ in range(TRIPLES_PER_CONFIG):
            l, m, p = (random_point(rng, theta.n, COCYCLE_BOX) for _ in range(3))
            lhs = phase_mul(sigma(theta, l, m), sigma(theta, add_points(l, m), p))
            rhs = phase_mul(sigma(theta, l, add_points(m, p)), sigma(theta, m, p))
            assert lhs == rhs, (seed, l, m, p)
    assert irrational_configs > 0


def test_diracs_are_unitary_and_powers_stay_monomial():
    rng = np.random.default_rng(3)
    thetas = [random_theta(rng, n) for n in (2, 3, 4, 5)]
    for _ in range(DIRAC_SAMPLES):
        theta = thetas[int(rng.integers(len(thetas)))]
        one = unit(theta)
        y = random_point(rng, theta.n, COCYCLE_BOX)
        dy = delta(theta, y)
        assert max_abs_diff(twisted_convolve(dy, involution(dy)), one) <= 1e-15
        assert max_abs_diff(twisted_convolve(involution(dy), dy), one) <= 1e-15

        x = random_point(rng, theta.n, COCYCLE_BOX)
        k = int(rng.integers(1, 51))
        kx = scale_point(k, x)
        pk = power(delta(theta, x), k)
        assert pk.support == [kx]
        assert abs(abs(pk[kx]) - 1.0) <= 1e-12
