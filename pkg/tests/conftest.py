import numpy as np
import pytest

from regenmax import RateEnvelope, replica_rng


@pytest.fixture
def unit_exp_envelope():
    """Envelope of the standard exponential tail: R0(x) = x."""
    return RateEnvelope(
        r0_fn=lambda x: x + 0.0 * x,
        r0_deriv=lambda x: 1.0 + 0.0 * x,
        r0_inv=lambda y: y + 0.0 * y,
        kappa=0.0,
        x0=0.0,
    )


@pytest.fixture
def rng():
    return replica_rng(20250809, 0)


def exp_sampler(r: np.random.Generator, size: int) -> np.ndarray:
    return r.exponential(size=size)
