"""Randomized invariant suites behind ``nlamp verify``.

Each suite returns a `SuiteReport` holding the seed, the number of checks
and the worst residual seen, so a failure can be replayed exactly.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import experiment as ex
from . import fock, gaussian
from . import nongaussian as ng
from . import phase_space as ps
from .errors import CutoffUnfaithful

TOL_ORACLE = 1e-8
TOL_TRIANGLE = 1e-4
DEFAULT_SEED = 20240611

EXPERIMENT_CORNERS = dict(
    alpha=(0.0, 0.25, 0.5),
    delta=tuple(np.round(np.linspace(-1, 1, 21), 12)),
    nu=(0.3, 0.5, 0.7, 0.9),
    eta=(0.0, 0.25, 0.5, 1.0),
    p=(0.0, 0.5, 0.75, 1.0),
)

# Q grid for the triangle: spacing 0.0125, wide enough for |g alpha| at g = 1.25
TRIANGLE_GRID = dict(extent=7.0, nodes=1121)
TRIANGLE_GAINS = (0.5, 0.8, 1.25)


@dataclass
class SuiteReport:
    suite: str
    passed: bool
    seed: int
    checked: int
    worst: dict = field(default_factory=dict)
    tolerance: float = 0.0

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def random_gaussian(rng):
    """Physical Gaussian state with random thermal noise, squeezing, angle and displacement."""
    return gaussian.GaussianState.squeezed(
        rng.uniform(0, 1.2), rng.uniform(0, np.pi),
        complex(*rng.normal(scale=0.8, size=2)), nbar=rng.exponential(0.5),
    )


def _max_amplifying_gain(state):
    v = state.principal_axes()[0][-1]
    return math.inf if v <= 0.5 else math.sqrt((2 * v + 1) / (2 * v - 1))


# -- suites -------------------------------------------------------------------------

def monotonicity(seed=DEFAULT_SEED, n_states=1000, cutoff=25, gains=None):
    rng = np.random.default_rng(seed)
    gains = np.linspace(0.3, 1.8, 16) if gains is None else np.asarray(gains)
    worst = math.inf
    for _ in range(n_states):
        dim = cutoff + 1
        rho = fock.random_density(
            rng, cutoff, rank=int(rng.integers(1, dim + 1)), decay=rng.uniform(0.2, 1.0)
        )
        for g in gains:
            worst = min(worst, fock.mean_photon_derivative(rho, g, truncated=True))
    return SuiteReport(
        "monotonicity", bool(worst >= -fock.TOL_DERIV), seed, n_states * gains.size,
        {"min_derivative": float(worst)}, fock.TOL_DERIV,
    )


def gaussian_bounds(seed=DEFAULT_SEED, n_states=1000):
    """One attenuating and one amplifying gain per random state."""
    rng = np.random.default_rng(seed)
    margin_amp = margin_att = math.inf
    for _ in range(n_states):
        state = random_gaussian(rng)
        g_att = rng.uniform(0.05, 0.999)
        G = gaussian.quadrature_gains(state, g_att)
        margin_att = min(margin_att, (2 * g_att / (1 + g_att**2) - G).min())
        g_hi = min(_max_amplifying_gain(state), 5.0)
        # stay clear of the open bound, where the gain diverges
        g_amp = 1 + (g_hi - 1) * rng.uniform(0.01, 0.99)
        if not gaussian.is_amplifiable(state, g_amp):
            continue
        G = gaussian.quadrature_gains(state, g_amp)
        margin_amp = min(margin_amp, (G - (1 + g_amp**2) / (2 * g_amp)).min())
    return SuiteReport(
        "gaussian-bounds", bool(margin_amp > 0 and margin_att > 0), seed, 2 * n_states,
        {"min_margin_amplifier": float(margin_amp), "min_margin_attenuator": float(margin_att)}, 0.0,
    )


def _experiment_residual():
    worst = 0.0
    for values in itertools.product(*EXPERIMENT_CORNERS.values()):
        params = ex.SetupParams(*values)
        rho, _ = ex.simulate_setup(params)
        worst = max(worst, abs(fock.mean_field(rho) - ex.amplitude_eta_p(params)))
    return worst


def oracle_equivalence(seed=DEFAULT_SEED, n_samples=200, include_experiment=True):
    """Closed forms against the Fock filter, and the setup formula against the 3-mode tensor."""
    rng = np.random.default_rng(seed)
    worst = dict(psi1=0.0, psi2=0.0, mixture=0.0, spacs=0.0, gaussian=0.0)
    for _ in range(n_samples):
        g = rng.uniform(0.3, 2.5)
        nu = rng.uniform(0.3, 1.0)

        p1 = ng.Psi1Params(rng.uniform(0.05, 1.0))
        worst["psi1"] = max(worst["psi1"], abs(ng.gain_psi1(p1, g) - ng.oracle_gain(p1.state(), g)))

        v = rng.normal(size=3)
        p2 = ng.Psi2Params(*(v / np.linalg.norm(v)))
        if abs(ng.psi2_amplitudes(p2, g)[0]) > 1e-3:
            worst["psi2"] = max(worst["psi2"], abs(ng.gain_psi2(p2, g) - ng.oracle_gain(p2.state(), g)))

        a, b = (complex(*rng.uniform(-1.5, 1.5, 2)) for _ in range(2))
        mix = ng.MixtureParams(a, b, rng.uniform())
        a_in, a_out = ng.mixture_amplitudes(mix, g)
        out = fock.apply_filter(mix.state(60), g).state
        worst["mixture"] = max(worst["mixture"], abs(a_out - fock.mean_field(out)))

        sp = ng.SpacsParams(*rng.uniform(-1.5, 1.5, 2))
        out = fock.apply_filter(ng.build_spacs(sp, 40), nu).state
        worst["spacs"] = max(worst["spacs"], abs(ng.spacs_attenuated_amplitude(sp, nu) - fock.mean_field(out)))

    for _ in range(max(1, n_samples // 10)):
        state = random_gaussian(rng)
        g = rng.uniform(0.3, 0.95)
        closed = gaussian.transform_gaussian(state, g).mean_field
        try:
            rho = gaussian.to_fock(state, 80)
        except CutoffUnfaithful:
            continue
        out = fock.apply_filter(rho, g).state
        worst["gaussian"] = max(worst["gaussian"], abs(closed - fock.mean_field(out)))

    checked = 5 * n_samples
    if include_experiment:
        worst["experiment"] = _experiment_residual()
        checked += int(np.prod([len(v) for v in EXPERIMENT_CORNERS.values()]))
    worst = {k: float(v) for k, v in worst.items()}
    return SuiteReport(
        "oracle-equivalence", max(worst.values()) < TOL_ORACLE, seed, checked, worst, TOL_ORACLE
    )


def triangle_corpus(cutoff=40):
    """Shared states: name, Fock density, and Gaussian description when there is one."""
    coh = gaussian.GaussianState.coherent(0.6 - 0.3j)
    sq = gaussian.GaussianState.squeezed(0.25, 0.4, 0.4 - 0.3j)
    spacs = ng.build_spacs(ng.SpacsParams(0.25, -0.55), cutoff)
    return [
        ("coherent", gaussian.to_fock(coh, cutoff), coh),
        ("squeezed", gaussian.to_fock(sq, cutoff), sq),
        ("spacs", fock.as_density(spacs), None),
    ]


def triangle_residuals(gains=TRIANGLE_GAINS, grid=TRIANGLE_GRID):
    """Mean-field spread across the Fock, Q and Gaussian routes, per state and gain."""
    out = {}
    for name, rho, gstate in triangle_corpus():
        q = ps.q_from_density(rho, **grid)
        for g in gains:
            routes = [
                fock.mean_field(fock.apply_filter(rho, g).state),
                ps.transform_q(q, g).mean_field(),
            ]
            if gstate is not None:
                routes.append(gaussian.transform_gaussian(gstate, g).mean_field)
            out[f"{name}@{g}"] = float(max(abs(x - y) for x, y in itertools.combinations(routes, 2)))
    return out


def representation_triangle(seed=DEFAULT_SEED):
    worst = triangle_residuals()
    return SuiteReport(
        "representation-triangle", max(worst.values()) < TOL_TRIANGLE, seed, len(worst), worst,
        TOL_TRIANGLE,
    )


SUITES = {
    "monotonicity": monotonicity,
    "gaussian-bounds": gaussian_bounds,
    "oracle-equivalence": oracle_equivalence,
    "representation-triangle": representation_triangle,
}


def run_suite(name, seed=DEFAULT_SEED):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](seed=seed)
