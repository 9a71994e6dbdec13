"""Shared helpers for the test suite: complex random draws and link factories."""

import numpy as np
import pytest

from rislink import LinkSet


def crandn(rng, *shape):
    """Standard complex Gaussian array (unit variance per entry)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_links(rng, u=1, k=1, m=4, n=8, v=1, sigma2=1.0, sigma_r2=0.0, direct=True):
    """Random dense LinkSet grid [u][k] with shared per-UE direct channels."""
    h0s = [crandn(rng, v, m) if direct else np.zeros((v, m), complex) for _ in range(k)]
    h1s = [crandn(rng, n, m) for _ in range(u)]
    return [
        [
            LinkSet(
                h0=h0s[kk],
                h1=h1s[uu],
                h2=crandn(rng, v, n),
                sigma2_w=sigma2,
                sigma_r2_w=sigma_r2,
            )
            for kk in range(k)
        ]
        for uu in range(u)
    ]
