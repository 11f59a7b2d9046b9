"""Grid kernels for phase-space evaluation.

The compiled extension is used when it was built; otherwise the numpy
implementation is selected. Set ``NLAMP_KERNELS=python`` to force the
fallback.
"""
import os

import numpy as np
from scipy.special import gammaln

from . import _pykernels

BACKEND = "python"
if os.environ.get("NLAMP_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
    else:
        BACKEND = "cython"
else:
    _impl = _pykernels

reweight_resample = _impl.reweight_resample

_EIG_CUT = 1e-15


def spectral_factors(rho):
    """Eigen-pairs ``(lam, phi)`` of ``rho`` with negligible weights dropped.

    Row ``k`` of the returned matrix holds ``conj(phi_k[n]) / sqrt(n!)``, the
    polynomial coefficients of ``<phi_k|alpha> exp(|alpha|^2 / 2)``.
    """
    rho = np.asarray(rho, dtype=complex)
    lam, vecs = np.linalg.eigh(rho)
    keep = lam > _EIG_CUT * max(lam.max(), 1e-300)
    n = np.arange(rho.shape[0])
    coeffs = vecs[:, keep].conj().T * np.exp(-0.5 * gammaln(n + 1))[None, :]
    return np.ascontiguousarray(lam[keep]), np.ascontiguousarray(coeffs)


def q_function(rho, xs, ys):
    """``<alpha|rho|alpha> / pi`` at ``alpha = xs[i] + 1j * ys[j]``."""
    lam, coeffs = spectral_factors(rho)
    return _impl.q_function(lam, coeffs, xs, ys)

__all__ = ["BACKEND", "q_function", "reweight_resample"]
