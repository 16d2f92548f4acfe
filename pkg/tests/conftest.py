import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240915)


def random_spd(rng, d, ridge=0.5):
    a = rng.standard_normal((d, d))
    return a @ a.T + ridge * d * np.eye(d)


def random_psd(rng, d, rank=None):
    rank = rank or d
    a = rng.standard_normal((d, rank))
    return a @ a.T


def random_instance(rng, q, p, eta=None, beta=None):
    """A random (theta, cov, cfg) triple with SPD yy block."""
    from gengm.model import CovarianceTriplet, ParameterPair, RegularizationConfig

    theta = ParameterPair(
        omega_yy=random_spd(rng, q), omega_yx=rng.standard_normal((q, p))
    )
    cov = CovarianceTriplet(
        s_yy=random_psd(rng, q) / q + 0.1 * np.eye(q),
        s_yx=rng.standard_normal((q, p)),
        s_xx=random_psd(rng, p) / p + 0.1 * np.eye(p),
        n=50,
    )
    cfg = RegularizationConfig(
        lambda_=float(rng.uniform(0, 0.5)),
        mu=float(rng.uniform(0, 0.5)),
        eta=float(rng.uniform(0, 1.5)) if eta is None else eta,
        beta=float(rng.choice([1.0, 1.25, 2.0])) if beta is None else beta,
        structure=random_psd(rng, p) / p,
    )
    return theta, cov, cfg
