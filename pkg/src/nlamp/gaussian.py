"""Single-mode Gaussian states under the noiseless filter.

Conventions: the vacuum covariance matrix is the identity, quadrature
variances of the vacuum are 1/2, and a coherent amplitude ``alpha`` sits at
``d = sqrt(2) * (Re alpha, Im alpha)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import fock
from .errors import CutoffUnfaithful, InvalidGain, InvalidState, SingularMatrix, UnphysicalOutput

TOL_PHYS = 1e-9
TOL_HEISENBERG = 1e-9


def _rotation(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class QuadratureVariances:
    vx: float
    vp: float

    def __post_init__(self):
        if not (self.vx > 0 and self.vp > 0):
            raise InvalidState("quadrature variances must be positive")
        if self.vx * self.vp < 0.25 - TOL_HEISENBERG:
            raise InvalidState(f"Vx*Vp = {self.vx * self.vp:.6g} violates the uncertainty relation")


@dataclass(frozen=True, eq=False)
class GaussianState:
    gamma: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=float)
        d = np.array(self.d, dtype=float).reshape(-1)
        if gamma.shape != (2, 2) or d.shape != (2,):
            raise InvalidState("expected a 2x2 covariance matrix and a 2-vector")
        if abs(gamma[0, 1] - gamma[1, 0]) > 1e-12 * max(1.0, np.abs(gamma).max()):
            raise InvalidState("covariance matrix is not symmetric")
        gamma = 0.5 * (gamma + gamma.T)
        # gamma + i*Omega >= 0 reduces to gamma > 0 and det(gamma) >= 1
        if np.linalg.eigvalsh(gamma)[0] <= 0 or np.linalg.det(gamma) < 1 - TOL_HEISENBERG:
            raise InvalidState("covariance matrix violates the uncertainty relation")
        gamma.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "d", d)

    @classmethod
    def vacuum(cls):
        return cls(np.eye(2), np.zeros(2))

    @classmethod
    def coherent(cls, alpha):
        return cls(np.eye(2), _displacement(alpha))

    @classmethod
    def thermal(cls, nbar, alpha=0.0):
        return cls((2 * nbar + 1) * np.eye(2), _displacement(alpha))

    @classmethod
    def squeezed(cls, s, phi=0.0, alpha=0.0, nbar=0.0):
        """Squeezed along the quadrature ``cos(phi) x + sin(phi) p`` when ``s > 0``."""
        R = _rotation(phi)
        gamma = (2 * nbar + 1) * R @ np.diag([np.exp(-2 * s), np.exp(2 * s)]) @ R.T
        return cls(gamma, _displacement(alpha))

    @property
    def mean_field(self):
        return complex(self.d[0], self.d[1]) / np.sqrt(2)

    def principal_axes(self):
        """Variances in ascending order and the orthonormal axes (columns)."""
        lam, R = np.linalg.eigh(self.gamma)
        return lam / 2, R

    def variances(self):
        v, _ = self.principal_axes()
        return QuadratureVariances(float(v[0]), float(v[1]))


def _displacement(alpha):
    alpha = complex(alpha)
    return np.sqrt(2) * np.array([alpha.real, alpha.imag])


def _check_gain(g):
    g = float(g)
    if not g > 0 or not np.isfinite(g):
        raise InvalidGain(f"gain must be a positive finite number, got {g!r}")
    return g


def amplification_bound(g):
    """Largest quadrature variance that still gives a physical output for ``g > 1``."""
    g = _check_gain(g)
    if g <= 1:
        return np.inf
    return 0.5 * (g * g + 1) / (g * g - 1)


def is_amplifiable(state, g):
    """True when the filtered state is physical; attenuation (g <= 1) always is."""
    v, _ = state.principal_axes()
    return bool(v[-1] < amplification_bound(g) - TOL_PHYS)


def effective_gain(V, g):
    """Displacement gain of a quadrature with variance ``V``."""
    g = _check_gain(g)
    if not V > 0:
        raise InvalidState("variance must be positive")
    if V >= amplification_bound(g) - TOL_PHYS:
        raise UnphysicalOutput(f"V={V} is at or beyond the bound {amplification_bound(g)} for g={g}")
    return 2 * g / ((1 + g * g) + 2 * V * (1 - g * g))


def transform_gaussian(state, g):
    """Covariance matrix and displacement of the filtered Gaussian state.

    Works in the principal-axis frame of ``gamma``; the filter commutes with
    phase rotations, so the diagonal formulas apply there.
    """
    g = _check_gain(g)
    if g > 1 and not is_amplifiable(state, g):
        raise UnphysicalOutput(
            f"max variance {state.principal_axes()[0][-1]:.6g} reaches the bound "
            f"{amplification_bound(g):.6g} for g={g}"
        )
    v, R = state.principal_axes()
    Gamma_t = g * g / (2 * v + 1) - 0.5 * (g * g - 1)
    if np.any(Gamma_t <= 0):
        raise SingularMatrix("transformed matrix is not invertible")
    gamma_t = 1 / Gamma_t - 1
    d_t = np.array([effective_gain(vj, g) for vj in v]) * (R.T @ state.d)
    return GaussianState(R @ np.diag(gamma_t) @ R.T, R @ d_t)


def quadrature_gains(state, g):
    """Effective gains along the principal axes, smallest variance first."""
    v, _ = state.principal_axes()
    return np.array([effective_gain(vj, g) for vj in v])


def squeezing_parameter(state):
    """``s`` with ``gamma`` eigenvalues ``nu * exp(-+2s)``."""
    lam = np.linalg.eigvalsh(state.gamma)
    return 0.25 * np.log(lam[1] / lam[0])


# -- Fock-space bridge -----------------------------------------------------------

def to_fock(state, cutoff=40, pad=60, tol=1e-8):
    """Density matrix of a Gaussian state on the truncated Fock basis.

    Built as ``D S rho_th S^dag D^dag`` by exponentiating the ladder operators
    in a space of ``cutoff + pad`` levels, then truncated and renormalized.
    """
    dim = cutoff + 1 + pad
    lam, R = np.linalg.eigh(state.gamma)
    nu = np.sqrt(lam[0] * lam[1])
    r = 0.25 * np.log(lam[1] / lam[0])
    phi = np.arctan2(R[1, 0], R[0, 0])
    nbar = 0.5 * (nu - 1)
    alpha = state.mean_field

    a = fock.annihilation(dim - 1).astype(complex)
    ad = a.conj().T
    n = np.arange(dim)
    pops = (n == 0).astype(float) if nbar <= 0 else nbar**n / (1 + nbar) ** (n + 1)
    zeta = r * np.exp(2j * phi)
    S = expm(0.5 * (np.conj(zeta) * a @ a - zeta * ad @ ad))
    D = expm(alpha * ad - np.conj(alpha) * a)
    U = D @ S
    rho = U @ np.diag(pops) @ U.conj().T
    kept = rho[: cutoff + 1, : cutoff + 1]
    lost = 1 - np.trace(kept).real
    if lost > tol:
        raise CutoffUnfaithful(f"Gaussian state loses {lost:.3e} of its weight at cutoff {cutoff}")
    return fock.FockDensityMatrix.from_matrix(kept)


def moments(state):
    """Covariance matrix and displacement of any Fock-space state."""
    rho = fock.as_density(state).rho
    a = fock.annihilation(rho.shape[0] - 1)
    ea = np.trace(rho @ a)
    ea2 = np.trace(rho @ a @ a)
    en = np.trace(rho @ a.T @ a).real
    d = np.sqrt(2) * np.array([ea.real, ea.imag])
    vx = 0.5 * (2 * ea2.real + 2 * en + 1) - d[0] ** 2
    vp = 0.5 * (-2 * ea2.real + 2 * en + 1) - d[1] ** 2
    cxp = ea2.imag - d[0] * d[1]
    return 2 * np.array([[vx, cxp], [cxp, vp]]), d
