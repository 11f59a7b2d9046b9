import numpy as np
import pytest
from hypothesis import given, settings

from nlamp import _kernels
from nlamp._kernels import _pykernels

from conftest import gains, random_density, seeds

ckernels = pytest.importorskip("nlamp._kernels._ckernels")


def test_backend_is_reported():
    assert _kernels.BACKEND in ("cython", "python")


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_q_backends_agree(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 15, decay=0.6).rho
    lam, coeffs = _kernels.spectral_factors(rho)
    axis = np.linspace(-4, 4, 41)
    a = _pykernels.q_function(lam, coeffs, axis, axis)
    b = ckernels.q_function(lam, coeffs, axis, axis)
    assert np.abs(a - b).max() < 1e-13


@settings(max_examples=30, deadline=None)
@given(seed=seeds, g=gains)
def test_resample_backends_agree(seed, g):
    rng = np.random.default_rng(seed)
    values = rng.random((33, 29))
    xs = np.linspace(-3, 3, 33)
    ys = np.linspace(-2.5, 2.5, 29)
    a = _pykernels.reweight_resample(values, xs, ys, g)
    b = ckernels.reweight_resample(values, xs, ys, g)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


def test_resample_at_unit_gain_is_identity():
    values = np.arange(20.0).reshape(4, 5)
    xs, ys = np.linspace(-1, 1, 4), np.linspace(-1, 1, 5)
    for impl in (_pykernels, ckernels):
        assert np.allclose(impl.reweight_resample(values, xs, ys, 1.0), values)
