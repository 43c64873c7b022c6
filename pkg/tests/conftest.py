import numpy as np
import pytest

from pbcstab.model import BangBangControl, PBCSystem


def random_metzler(rng, n, scale=1.0):
    M = rng.uniform(0.0, scale, (n, n))
    M[np.diag_indices(n)] = rng.uniform(-scale, scale, n)
    return M


def random_valid_system(rng, n, T=1.0):
    """Random PBCS: draws A+B and A-B as independent Metzler matrices."""
    M1 = random_metzler(rng, n)
    M2 = random_metzler(rng, n)
    return PBCSystem((M1 + M2) / 2.0, (M1 - M2) / 2.0, T)


def random_bangbang(rng, k, T):
    """Random k-arc bang-bang control with well-separated switch times."""
    durations = rng.uniform(0.2, 1.0, k)
    durations *= T / durations.sum()
    times = np.cumsum(durations)[:-1]
    r = int(rng.choice([-1, 1]))
    return BangBangControl(r, tuple(times))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
