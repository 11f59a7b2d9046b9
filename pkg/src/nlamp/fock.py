"""Truncated Fock-space states and the heralded filter ``g**n``.

Matrix elements follow ``rho[m, n] = <m|rho|n>`` and the annihilation operator
acts as ``a|n> = sqrt(n)|n-1>``. All state objects are immutable; every
operation returns new objects.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import CutoffUnfaithful, DivergentAmplification, InvalidGain, InvalidState

TOL_NORM = 1e-10
TOL_PSD = 1e-8
TOL_DERIV = 1e-6
TOL_TAIL = 1e-8
K_TAIL = 5
DEFAULT_CUTOFF = 30


def _readonly(a, dtype=complex):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FockState:
    """Pure state ``sum_n amps[n] |n>`` with ``n = 0..cutoff``."""

    amps: np.ndarray

    def __post_init__(self):
        amps = _readonly(self.amps)
        if amps.ndim != 1 or amps.size == 0:
            raise InvalidState("amplitudes must be a non-empty vector")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > TOL_NORM:
            raise InvalidState(f"state is not normalized (norm**2 = {norm!r})")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps, normalize=True):
        amps = np.asarray(amps, dtype=complex)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0 or not np.isfinite(norm):
                raise InvalidState("cannot normalize a null vector")
            amps = amps / norm
        return cls(amps)

    @property
    def cutoff(self):
        return self.amps.size - 1

    def tail_mass(self, levels=2):
        return float(np.sum(np.abs(self.amps[-levels:]) ** 2))

    def check_faithful(self, levels=2, tol=TOL_TAIL):
        tail = self.tail_mass(levels)
        if tail >= tol:
            raise CutoffUnfaithful(
                f"population {tail:.3e} in the top {levels} levels at cutoff {self.cutoff}"
            )
        return self

    def to_density(self):
        return FockDensityMatrix(np.outer(self.amps, self.amps.conj()))


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Mixed state on the truncated Fock basis; ``rho[m, n] = <m|rho|n>``."""

    rho: np.ndarray

    def __post_init__(self):
        rho = _readonly(self.rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
            raise InvalidState("density matrix must be square and non-empty")
        if np.max(np.abs(rho - rho.conj().T)) > TOL_NORM:
            raise InvalidState("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TOL_NORM:
            raise InvalidState(f"trace is {tr!r}, expected 1")
        lam = np.linalg.eigvalsh(rho)[0]
        if lam < -TOL_PSD:
            raise InvalidState(f"density matrix has negative eigenvalue {lam:.3e}")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_matrix(cls, m, normalize=True):
        m = np.asarray(m, dtype=complex)
        m = 0.5 * (m + m.conj().T)
        if normalize:
            tr = np.trace(m).real
            if not tr > 0:
                raise InvalidState("cannot normalize a matrix with non-positive trace")
            m = m / tr
        return cls(m)

    @property
    def cutoff(self):
        return self.rho.shape[0] - 1

    @property
    def populations(self):
        return np.clip(np.diagonal(self.rho).real, 0.0, None)

    def tail_mass(self, levels=2):
        return float(self.populations[-levels:].sum())


@dataclass(frozen=True)
class HeraldedOutcome:
    state: FockDensityMatrix
    weight: float


def as_density(state):
    if isinstance(state, FockDensityMatrix):
        return state
    if isinstance(state, FockState):
        return state.to_density()
    raise TypeError(f"expected a Fock state, got {type(state).__name__}")


# -- constructors -----------------------------------------------------------

def basis_state(n, cutoff=DEFAULT_CUTOFF):
    if not 0 <= n <= cutoff:
        raise InvalidState(f"|{n}> is outside the cutoff {cutoff}")
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[n] = 1.0
    return FockState(amps)


def vacuum(cutoff=DEFAULT_CUTOFF):
    return basis_state(0, cutoff)


def coherent_amplitudes(alpha, cutoff):
    """Untruncated-normalization amplitudes ``<n|alpha>`` for ``n <= cutoff``."""
    n = np.arange(cutoff + 1)
    alpha = complex(alpha)
    if alpha == 0:
        out = np.zeros(cutoff + 1, dtype=complex)
        out[0] = 1.0
        return out
    logmag = n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) - 0.5 * abs(alpha) ** 2
    return np.exp(logmag) * np.exp(1j * n * np.angle(alpha))


def coherent_state(alpha, cutoff=DEFAULT_CUTOFF, check=True):
    amps = coherent_amplitudes(alpha, cutoff)
    lost = 1.0 - np.vdot(amps, amps).real
    if check and lost >= TOL_TAIL:
        raise CutoffUnfaithful(
            f"coherent state |{alpha}> loses {lost:.3e} of its norm at cutoff {cutoff}"
        )
    return FockState.from_amplitudes(amps)


def superposition(coeffs, cutoff=DEFAULT_CUTOFF):
    coeffs = np.asarray(coeffs, dtype=complex)
    if cutoff + 1 < coeffs.size:
        raise InvalidState("cutoff smaller than the number of coefficients")
    coeffs = np.concatenate([coeffs, np.zeros(cutoff + 1 - coeffs.size)])
    return FockState.from_amplitudes(coeffs)


def thermal_state(nbar, cutoff=DEFAULT_CUTOFF):
    if nbar < 0:
        raise InvalidState("mean photon number must be non-negative")
    n = np.arange(cutoff + 1)
    if nbar == 0:
        pops = (n == 0).astype(float)
    else:
        pops = nbar**n / (1.0 + nbar) ** (n + 1)
    return FockDensityMatrix.from_matrix(np.diag(pops))


def mixture(weights, states):
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or weights.sum() <= 0:
        raise InvalidState("mixture weights must be non-negative with positive sum")
    mats = [as_density(s).rho for s in states]
    if len({m.shape for m in mats}) != 1:
        raise InvalidState("all mixture components must share one cutoff")
    return FockDensityMatrix.from_matrix(sum(w * m for w, m in zip(weights, mats)))


def random_density(rng, cutoff, rank=None, decay=None):
    """Wishart-type random state; ``decay`` < 1 damps row n by ``decay**n``."""
    dim = cutoff + 1
    rank = rank or dim
    m = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    if decay is not None:
        m *= (decay ** np.arange(dim))[:, None]
    return FockDensityMatrix.from_matrix(m @ m.conj().T)


def annihilation(cutoff):
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)


def phase_rotate(state, phi):
    """Apply ``exp(i*phi*n)``."""
    phases = np.exp(1j * phi * np.arange(state.cutoff + 1))
    if isinstance(state, FockState):
        return FockState(phases * state.amps)
    rho = as_density(state).rho
    return FockDensityMatrix(phases[:, None] * rho * phases.conj()[None, :])


# -- observables ------------------------------------------------------------

def mean_field(state):
    """``Tr(rho a)``."""
    if isinstance(state, FockState):
        c = state.amps
        return complex(np.sum(np.sqrt(np.arange(1, c.size)) * c[1:] * c[:-1].conj()))
    rho = as_density(state).rho
    return complex(np.sum(np.sqrt(np.arange(1, rho.shape[0])) * np.diagonal(rho, -1)))


def mean_photon_number(state):
    if isinstance(state, FockState):
        pops = np.abs(state.amps) ** 2
    else:
        pops = as_density(state).populations
    return float(np.dot(np.arange(pops.size), pops))


def fidelity(state, target):
    """Overlap ``<psi|rho|psi>`` with a pure target."""
    psi = target.amps
    rho = as_density(state).rho
    return float(np.vdot(psi, rho @ psi).real)


# -- the filter -------------------------------------------------------------

def _check_gain(g):
    g = float(g)
    if not g > 0 or not np.isfinite(g):
        raise InvalidGain(f"gain must be a positive finite number, got {g!r}")
    return g


def _filter_terms(pops, g, truncated):
    n = np.arange(pops.size)
    terms = pops * np.exp(2.0 * n * np.log(g))
    total = terms.sum()
    if not np.isfinite(total) or total <= 0:
        raise DivergentAmplification(f"heralding weight is not finite for g={g}")
    if g > 1 and not truncated:
        tail = terms[-K_TAIL:].sum() / total
        if tail > TOL_TAIL:
            raise DivergentAmplification(
                f"g={g}: {tail:.3e} of the amplified weight sits in the top "
                f"{K_TAIL} Fock levels; raise the cutoff or the state is unphysical"
            )
    return terms, total


def apply_filter(state, g, truncated=False):
    """Herald ``g**n rho g**n`` and renormalize.

    For ``g > 1`` the amplified weight must decay over the last ``K_TAIL``
    levels, otherwise `DivergentAmplification` is raised. Passing
    ``truncated=True`` treats the cutoff as part of the device (an amplifier
    acting on a finite Fock space) and skips that check.
    """
    g = _check_gain(g)
    rho = as_density(state).rho
    _, weight = _filter_terms(np.clip(np.diagonal(rho).real, 0, None), g, truncated)
    d = np.exp(np.arange(rho.shape[0]) * np.log(g))
    out = d[:, None] * rho * d[None, :] / weight
    return HeraldedOutcome(FockDensityMatrix.from_matrix(out), float(weight))


def filtered_mean_photon(state, g, truncated=False):
    """Mean photon number after the filter, from populations only."""
    g = _check_gain(g)
    pops = state.populations if isinstance(state, FockDensityMatrix) else np.abs(state.amps) ** 2
    terms, total = _filter_terms(pops, g, truncated)
    return float(np.dot(np.arange(pops.size), terms) / total)


def mean_photon_derivative(state, g, h=1e-5, truncated=False):
    """Central finite difference of the filtered mean photon number in ``g``."""
    g = _check_gain(g)
    if not 0 < h < g:
        raise InvalidGain("step must satisfy 0 < h < g")
    up = filtered_mean_photon(state, g + h, truncated)
    down = filtered_mean_photon(state, g - h, truncated)
    return (up - down) / (2.0 * h)
