"""Heralded attenuation with a beam splitter, an imperfect no-click detector
and an impure photon-addition source.

Modes are ordered (A, B, C): A is the signal, B feeds the detector and C
absorbs the photons the detector misses. The brute-force route builds the
full three-mode Fock tensor; the closed forms below are what it is checked
against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from . import fock
from .errors import DegenerateHerald, InvalidState, ZeroInputAmplitude
from .nongaussian import ZERO_INPUT, SpacsParams, build_spacs

DEFAULT_MODE_CUTOFF = 20
TOL_UNITARY = 1e-12
TOL_HERALD = 1e-12


@dataclass(frozen=True)
class SetupParams:
    alpha: float
    delta: float
    nu: float
    eta: float = 1.0
    p: float = 1.0
    cutoff: int = DEFAULT_MODE_CUTOFF

    def __post_init__(self):
        if not 0 < self.nu <= 1:
            raise InvalidState(f"nu must lie in (0, 1], got {self.nu!r}")
        if not 0 <= self.eta <= 1:
            raise InvalidState(f"eta must lie in [0, 1], got {self.eta!r}")
        if not 0 <= self.p <= 1:
            raise InvalidState(f"p must lie in [0, 1], got {self.p!r}")
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise InvalidState(f"cutoff must be a positive integer, got {self.cutoff!r}")

    @property
    def T(self):
        return 1.0 - self.nu**2

    @property
    def spacs(self):
        return SpacsParams(self.alpha, self.delta)


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    """3x3 matrix acting on the mode operators (a, b, c)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise InvalidState("mode unitary must be 3x3")
        err = np.abs(m.T @ m - np.eye(3)).max()
        if err > TOL_UNITARY:
            raise InvalidState(f"mode matrix is not unitary (deviation {err:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def build_mode_unitary(nu, eta):
    T = 1.0 - nu * nu
    se, sl = math.sqrt(eta), math.sqrt(1.0 - eta)
    st = math.sqrt(T)
    return ModeUnitary([
        [nu, st * se, st * sl],
        [-st, nu * se, nu * sl],
        [0.0, -sl, se],
    ])


@dataclass(frozen=True, eq=False)
class MultimodeFockState:
    """Amplitudes ``psi[i, j, k]`` of ``|i>_A |j>_B |k>_C``."""

    psi: np.ndarray

    def __post_init__(self):
        psi = np.array(self.psi, dtype=complex)
        if psi.ndim != 3:
            raise InvalidState("expected a three-mode tensor")
        norm = np.vdot(psi, psi).real
        if abs(norm - 1.0) > fock.TOL_NORM:
            raise InvalidState(f"three-mode state is not normalized (norm**2 = {norm!r})")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    def herald_vacuum_b(self):
        """Unnormalized A-mode density after projecting B onto vacuum, C traced out."""
        v = self.psi[:, 0, :]
        return v @ v.conj().T


@lru_cache(maxsize=8)
def _multinomial_table(cutoff):
    """``sqrt(n! / (i! j! k!))`` with ``n = i + j + k``, zero where ``n > cutoff``."""
    i = np.arange(cutoff + 1)
    I, J, K = np.meshgrid(i, i, i, indexing="ij")
    n = I + J + K
    lf = gammaln(np.arange(3 * cutoff + 1) + 1)
    table = np.exp(0.5 * (lf[n] - lf[I] - lf[J] - lf[K]))
    table = np.where(n <= cutoff, table, 0.0)
    n = np.minimum(n, cutoff)
    table.setflags(write=False)
    n.setflags(write=False)
    return table, n


def spread_modes(amps, unitary):
    """Image of ``sum_n amps[n] |n>_A |0>_B |0>_C`` under the mode coupling."""
    amps = np.asarray(amps, dtype=complex)
    cutoff = amps.size - 1
    table, n = _multinomial_table(cutoff)
    u = unitary.matrix[0]
    i = np.arange(cutoff + 1)
    powers = [u[m] ** i for m in range(3)]
    psi = (
        amps[n] * table
        * powers[0][:, None, None] * powers[1][None, :, None] * powers[2][None, None, :]
    )
    return MultimodeFockState(psi)


def herald_output(state, nu, eta=1.0):
    """Unnormalized A-mode density and its weight for a single-mode input.

    Mixed inputs are split into their eigenvectors and each is propagated
    through the three-mode tensor.
    """
    U = build_mode_unitary(nu, eta)
    if isinstance(state, fock.FockState):
        branches = [(1.0, state.amps)]
    else:
        lam, vecs = np.linalg.eigh(fock.as_density(state).rho)
        branches = [(l, vecs[:, k]) for k, l in enumerate(lam) if l > 1e-15]
    rho = sum(w * spread_modes(v, U).herald_vacuum_b() for w, v in branches)
    return rho, float(np.trace(rho).real)


def simulate_setup(params):
    """Brute-force output state on A and the total no-click probability."""
    cutoff = int(params.cutoff)
    parts = []
    if params.p > 0:
        parts.append((params.p, build_spacs(params.spacs, cutoff)))
    if params.p < 1:
        parts.append((1 - params.p, fock.coherent_state(params.alpha, cutoff)))
    rho = 0
    weight = 0.0
    for w, state in parts:
        r, h = herald_output(state, params.nu, params.eta)
        rho = rho + w * r
        weight += w * h
    if weight < TOL_HERALD:
        raise DegenerateHerald(f"no-click probability {weight:.3e} is below {TOL_HERALD}")
    return fock.FockDensityMatrix.from_matrix(rho / weight), weight


# -- closed forms -------------------------------------------------------------------

def _denominator(params):
    x = params.alpha * (1 - params.eta * params.T) + params.delta
    return x * x + 1 - params.eta * params.T


def amplitude_eta(params):
    """Output amplitude of the pure photon-added branch."""
    nu, a, d = params.nu, params.alpha, params.delta
    return nu * a + (nu * a * (1 - params.eta * params.T) + nu * d) / _denominator(params)


def purity_weight(params):
    """Post-herald weight of the photon-added branch."""
    p = params.p
    if p == 0:
        return 0.0
    ratio = (1 + (params.alpha + params.delta) ** 2) / _denominator(params)
    return p / (p + (1 - p) * ratio)


def amplitude_eta_p(params):
    q = purity_weight(params)
    return q * amplitude_eta(params) + (1 - q) * params.nu * params.alpha


def herald_weight(params):
    """No-click probability of the whole setup, both source branches included."""
    coherent = math.exp(-params.eta * params.T * params.alpha**2)
    spacs = coherent * _denominator(params) / params.spacs.norm
    return params.p * spacs + (1 - params.p) * coherent


def input_amplitude(params):
    """Mean field of the source: the photon-added and coherent branches mixed by p."""
    s = params.alpha + params.delta
    return params.p * (params.alpha + s / (1 + s * s)) + (1 - params.p) * params.alpha


def gain(params):
    a = input_amplitude(params)
    if abs(a) < ZERO_INPUT:
        raise ZeroInputAmplitude(f"source amplitude {a!r} is zero; gain undefined")
    return amplitude_eta_p(params) / a
