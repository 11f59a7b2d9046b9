"""Closed-form gains for non-Gaussian states where the filter can move the
mean field against the direction of ``g``.

All families use real parameters except the coherent mixture, whose gain
may be complex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import fock
from .errors import CutoffUnfaithful, InvalidGain, InvalidState, ZeroInputAmplitude

# |A| below this is treated as a vanishing input amplitude
ZERO_INPUT = 1e-14
SQRT2 = math.sqrt(2.0)


def _gain(g):
    g = float(g)
    if not g > 0 or not math.isfinite(g):
        raise InvalidGain(f"gain must be a positive finite number, got {g!r}")
    return g


def _ratio(out, a):
    if abs(a) < ZERO_INPUT:
        raise ZeroInputAmplitude(f"input amplitude {a!r} is zero; gain undefined")
    return out / a


@dataclass(frozen=True)
class Psi1Params:
    """``sqrt(1 - c1^2)|0> + c1|1>``."""

    c1: float

    def __post_init__(self):
        if not 0.0 <= self.c1 <= 1.0:
            raise InvalidState(f"c1 must lie in [0, 1], got {self.c1!r}")

    @property
    def c0(self):
        return math.sqrt(max(0.0, 1.0 - self.c1**2))

    def state(self, cutoff=fock.DEFAULT_CUTOFF):
        return fock.superposition([self.c0, self.c1], cutoff)


@dataclass(frozen=True)
class Psi2Params:
    c0: float
    c1: float
    c2: float

    def __post_init__(self):
        norm = self.c0**2 + self.c1**2 + self.c2**2
        if abs(norm - 1.0) > fock.TOL_NORM:
            raise InvalidState(f"amplitudes are not normalized (sum of squares {norm!r})")

    def state(self, cutoff=fock.DEFAULT_CUTOFF):
        return fock.superposition([self.c0, self.c1, self.c2], cutoff)


@dataclass(frozen=True)
class MixtureParams:
    """``p|alpha><alpha| + (1 - p)|beta><beta|``."""

    alpha: complex
    beta: complex
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise InvalidState(f"p must lie in [0, 1], got {self.p!r}")

    def state(self, cutoff=fock.DEFAULT_CUTOFF):
        return fock.mixture(
            [self.p, 1 - self.p],
            [fock.coherent_state(self.alpha, cutoff), fock.coherent_state(self.beta, cutoff)],
        )


@dataclass(frozen=True)
class SpacsParams:
    """``(a^dag + delta)|alpha>`` up to normalization, with real alpha and delta."""

    alpha: float
    delta: float

    def __post_init__(self):
        for name in ("alpha", "delta"):
            v = getattr(self, name)
            if isinstance(v, complex) or not math.isfinite(v):
                raise InvalidState(f"{name} must be a finite real number, got {v!r}")

    @property
    def norm(self):
        return 1.0 + (self.alpha + self.delta) ** 2


# -- superpositions of low Fock states ------------------------------------------

def psi1_amplitudes(params, g):
    """Input and filtered mean fields ``(A, A~)``."""
    g = _gain(g)
    c0, c1 = params.c0, params.c1
    return c0 * c1, g * c0 * c1 / (c0**2 + g * g * c1**2)


def gain_psi1(params, g):
    g = _gain(g)
    return g / (1.0 + (g * g - 1.0) * params.c1**2)


def psi1_threshold(g):
    """Value of ``c1^2`` at which the gain crosses 1."""
    return 1.0 / (1.0 + _gain(g))


def psi2_amplitudes(params, g):
    g = _gain(g)
    c0, c1, c2 = params.c0, params.c1, params.c2
    a_in = c1 * (c0 + SQRT2 * c2)
    a_out = g * c1 * (c0 + SQRT2 * g * g * c2) / (c0**2 + g**2 * c1**2 + g**4 * c2**2)
    return a_in, a_out


def gain_psi2(params, g):
    g = _gain(g)
    c0, c1, c2 = params.c0, params.c1, params.c2
    if abs(c1 * (c0 + SQRT2 * c2)) < ZERO_INPUT:
        raise ZeroInputAmplitude("c1 (c0 + sqrt2 c2) vanishes; gain undefined")
    return g * (c0 + SQRT2 * g * g * c2) / ((c0**2 + g**2 * c1**2 + g**4 * c2**2) * (c0 + SQRT2 * c2))


# -- coherent mixture -----------------------------------------------------------

def mixture_weight(params, g):
    """Post-filter weight of the ``|g alpha>`` component."""
    g = _gain(g)
    if params.p in (0.0, 1.0):
        return float(params.p)
    logit = (
        math.log(params.p) - math.log1p(-params.p)
        + (g * g - 1.0) * (abs(params.alpha) ** 2 - abs(params.beta) ** 2)
    )
    return float(expit(logit))


def mixture_amplitudes(params, g):
    g = _gain(g)
    a, b, p = complex(params.alpha), complex(params.beta), params.p
    q = mixture_weight(params, g)
    return p * a + (1 - p) * b, g * (q * a + (1 - q) * b)


def gain_mixture(params, g):
    a_in, a_out = mixture_amplitudes(params, g)
    return complex(_ratio(a_out, a_in))


# -- photon-added coherent states ------------------------------------------------

def spacs_amplitude(params):
    s = params.alpha + params.delta
    return params.alpha + s / (1.0 + s * s)


def spacs_attenuated_amplitude(params, nu):
    nu = _gain(nu)
    if nu > 1:
        raise InvalidGain(f"attenuation factor must lie in (0, 1], got {nu!r}")
    x = nu * params.alpha + params.delta / nu
    return nu * params.alpha + x / (1.0 + x * x)


def spacs_herald_weight(params, nu):
    """Success probability of the attenuating filter on the normalized SPACS."""
    nu = _gain(nu)
    x = nu * params.alpha + params.delta / nu
    return nu * nu * math.exp((nu * nu - 1) * params.alpha**2) * (1 + x * x) / params.norm


def spacs_gain(params, nu):
    return _ratio(spacs_attenuated_amplitude(params, nu), spacs_amplitude(params))


def spacs_amplitudes_vector(alpha, delta, cutoff):
    """Unnormalized ``(a^dag + delta)|alpha>`` truncated at ``cutoff``."""
    c = fock.coherent_amplitudes(alpha, cutoff)
    out = delta * c
    n = np.arange(1, cutoff + 1)
    out[1:] += np.sqrt(n) * c[:-1]
    return out


def build_spacs(params, cutoff=fock.DEFAULT_CUTOFF):
    vec = spacs_amplitudes_vector(params.alpha, params.delta, cutoff)
    lost = 1.0 - np.vdot(vec, vec).real / params.norm
    if lost >= fock.TOL_TAIL:
        raise CutoffUnfaithful(
            f"SPACS with alpha={params.alpha} loses {lost:.3e} of its norm at cutoff {cutoff}"
        )
    return fock.FockState.from_amplitudes(vec)


def oracle_gain(state, g, truncated=False):
    """Gain measured on a Fock vector: ratio of filtered to input mean field."""
    out = fock.apply_filter(state, g, truncated=truncated).state
    return _ratio(fock.mean_field(out), fock.mean_field(state))
