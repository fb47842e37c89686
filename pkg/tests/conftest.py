"""Shared helpers for the test suite."""

import numpy as np
import pytest

from skcprobe import ChannelRealization, ProbingConfig


def make_config(**overrides) -> ProbingConfig:
    """Small general-position scenario; override anything per test."""
    params = dict(
        n_a=2, n_b=2, n_e=2, v_a=2, v_b=1, phi_a=16, phi_b=16,
        power_a=2.0, power_b=1.5, noise_a=1.0, noise_b=1.0,
        noise_ea=0.5, noise_eb=2.0, rho=0.8,
    )
    params.update(overrides)
    return ProbingConfig(**params)


def make_realization(h_ba, g_a, g_b, h_ab=None) -> ChannelRealization:
    """Build a realization from explicit matrices (h_ab defaults to the
    perfectly reciprocal transpose)."""
    h_ba = np.asarray(h_ba, dtype=complex)
    g_a = np.asarray(g_a, dtype=complex)
    g_b = np.asarray(g_b, dtype=complex)
    h_ab = h_ba.T.copy() if h_ab is None else np.asarray(h_ab, dtype=complex)
    for m in (h_ba, h_ab, g_a, g_b):
        m.flags.writeable = False
    return ChannelRealization(h_ba=h_ba, h_ab=h_ab, g_a=g_a, g_b=g_b)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
