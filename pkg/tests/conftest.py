import numpy as np
import pytest

from trajopt.core import ProblemInstance, validate


def random_instance(rng, d, degenerate=False):
    """Random validated instance; degenerate plants ties in lambda, a and E."""
    if degenerate:
        k = int(rng.integers(2, d + 1))
        vals = rng.uniform(0.1, 1.0, k)
        lam = vals[rng.integers(0, k, d)]
        lam = lam / lam.sum()
        a = rng.integers(0, 3, d).astype(float)
        e = rng.choice([0.0, 0.25, 1.0], d) + rng.integers(0, 2, d) * 0.5
    else:
        lam = rng.dirichlet(np.ones(d))
        a = rng.normal(size=d)
        e = rng.normal(size=d)
    return validate(ProblemInstance(eigenvalues=lam, target=a, cost=e))


def random_degenerate_spectrum(rng, d):
    """Spectrum with a random planted degeneracy pattern (possibly none)."""
    k = int(rng.integers(1, d + 1))
    vals = np.sort(rng.uniform(0.05, 1.0, k))[::-1]
    labels = np.concatenate([np.arange(k), rng.integers(0, k, d - k)])
    rng.shuffle(labels)
    lam = vals[labels]
    return lam / lam.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)
