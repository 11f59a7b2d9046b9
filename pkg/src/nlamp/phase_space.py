"""Husimi Q and Glauber-Sudarshan P representations under the filter."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels, fock
from .errors import DivergentAmplification, GridTooSmall, InvalidGain, InvalidState, NonIntegrable

DEFAULT_EXTENT = 5.0
DEFAULT_NODES = 401
TOL_Q = 1e-12
TOL_QNORM = 1e-6
# mass allowed in the outer ring of EDGE_NODES nodes before a transform is rejected
EDGE_NODES = 5
TOL_EDGE = 1e-6


def grid_axis(extent=DEFAULT_EXTENT, nodes=DEFAULT_NODES):
    return np.linspace(-extent, extent, nodes)


def _edge_fraction(values):
    inner = values[EDGE_NODES:-EDGE_NODES, EDGE_NODES:-EDGE_NODES].sum()
    total = values.sum()
    return (total - inner) / total


@dataclass(frozen=True, eq=False)
class QGrid:
    """Q(alpha) sampled at ``values[i, j] = Q(xs[i] + 1j * ys[j])``."""

    values: np.ndarray
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        xs = np.array(self.xs, dtype=float)
        ys = np.array(self.ys, dtype=float)
        if values.shape != (xs.size, ys.size) or xs.size < 2 or ys.size < 2:
            raise InvalidState("grid values do not match the axes")
        for axis in (xs, ys):
            steps = np.diff(axis)
            if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps[0]:
                raise InvalidState("grid axes must be uniform and increasing")
        if values.min() < -TOL_Q:
            raise InvalidState(f"Q function is negative ({values.min():.3e})")
        for a in (values, xs, ys):
            a.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def cell(self):
        return (self.xs[1] - self.xs[0]) * (self.ys[1] - self.ys[0])

    @property
    def mass(self):
        return float(self.values.sum() * self.cell)

    def alphas(self):
        return self.xs[:, None] + 1j * self.ys[None, :]

    def expect(self, f):
        """Normalized average of ``f(alpha)`` over the grid."""
        return np.sum(f(self.alphas()) * self.values) / self.values.sum()

    def mean_field(self):
        """<a>, which is exactly the first moment of Q."""
        return complex(self.expect(lambda a: a))

    def gaussian_fit(self):
        """Covariance matrix and displacement of the Gaussian with these moments."""
        m = self.mean_field()
        dx = self.alphas() - m
        cov = np.array([
            [self.expect(lambda _: dx.real**2), self.expect(lambda _: dx.real * dx.imag)],
            [self.expect(lambda _: dx.real * dx.imag), self.expect(lambda _: dx.imag**2)],
        ]).real
        # Q's covariance in r = sqrt(2) alpha is (gamma + I) / 2
        return 4 * cov - np.eye(2), np.sqrt(2) * np.array([m.real, m.imag])

    def to_csv(self, path):
        a = self.alphas()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["alpha_re", "alpha_im", "q"])
            for z, q in zip(a.ravel(), self.values.ravel()):
                w.writerow([f"{z.real:.11e}", f"{z.imag:.11e}", f"{q:.11e}"])

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        xs = np.unique(data[:, 0])
        ys = np.unique(data[:, 1])
        if xs.size * ys.size != data.shape[0]:
            raise InvalidState("CSV does not describe a full rectangular grid")
        return cls(data[:, 2].reshape(xs.size, ys.size), xs, ys)


def q_from_density(state, extent=DEFAULT_EXTENT, nodes=DEFAULT_NODES):
    rho = fock.as_density(state).rho
    axis = grid_axis(extent, nodes)
    values = _kernels.q_function(rho, axis, axis)
    grid = QGrid(np.clip(values, 0.0, None) if values.min() >= -TOL_Q else values, axis, axis)
    if grid.mass < 1 - TOL_QNORM:
        raise GridTooSmall(f"grid of extent {extent} captures only {grid.mass:.8f} of the state")
    return grid


def q_from_gaussian(state, extent=DEFAULT_EXTENT, nodes=DEFAULT_NODES):
    """Closed-form Q of a Gaussian state with covariance ``gamma`` and mean ``d``."""
    axis = grid_axis(extent, nodes)
    A = np.eye(2) + state.gamma
    Gamma = np.linalg.inv(A)
    rx = np.sqrt(2) * axis[:, None] - state.d[0]
    ry = np.sqrt(2) * axis[None, :] - state.d[1]
    quad = Gamma[0, 0] * rx**2 + 2 * Gamma[0, 1] * rx * ry + Gamma[1, 1] * ry**2
    values = 2 / (np.pi * np.sqrt(np.linalg.det(A))) * np.exp(-quad)
    return QGrid(values, axis, axis)


def transform_q(q, g):
    """Filtered Q function, resampled on the same grid and renormalized."""
    g = float(g)
    if not g > 0 or not np.isfinite(g):
        raise InvalidGain(f"gain must be a positive finite number, got {g!r}")
    if g == 1:
        return q
    values = _kernels.reweight_resample(q.values, q.xs, q.ys, g)
    total = values.sum()
    if not np.isfinite(total) or total <= 0:
        raise DivergentAmplification(f"reweighted Q has no finite mass for g={g}")
    edge = _edge_fraction(values)
    if g > 1:
        # nodes whose source point g*alpha falls in the outer band of the input grid
        hx, hy = q.xs[1] - q.xs[0], q.ys[1] - q.ys[0]
        bx = (g * q.xs < q.xs[0] + EDGE_NODES * hx) | (g * q.xs > q.xs[-1] - EDGE_NODES * hx)
        by = (g * q.ys < q.ys[0] + EDGE_NODES * hy) | (g * q.ys > q.ys[-1] - EDGE_NODES * hy)
        band = bx[:, None] | by[None, :]
        edge = max(edge, values[band].sum() / total)
    if edge > TOL_EDGE:
        raise DivergentAmplification(
            f"{edge:.3e} of the reweighted Q mass sits on the grid boundary for g={g}"
        )
    return QGrid(values / (total * q.cell), q.xs, q.ys)


# -- P representation ----------------------------------------------------------

@dataclass(frozen=True)
class PDensity:
    """Regular P function ``func(alpha)`` together with its integration grid."""

    func: Callable[[np.ndarray], np.ndarray]
    extent: float = DEFAULT_EXTENT
    nodes: int = DEFAULT_NODES

    def _grid(self):
        axis = grid_axis(self.extent, self.nodes)
        alpha = axis[:, None] + 1j * axis[None, :]
        return alpha, (axis[1] - axis[0]) ** 2

    def __call__(self, alpha):
        return self.func(np.asarray(alpha, dtype=complex))

    def integrate(self, f=None):
        alpha, cell = self._grid()
        vals = self.func(alpha)
        if f is not None:
            vals = f(alpha) * vals
        return np.sum(vals) * cell

    @property
    def mass(self):
        return float(np.real(self.integrate()))

    def mean_field(self):
        """<a> = integral of alpha P, valid since a is normally ordered."""
        return complex(self.integrate(lambda a: a) / self.integrate())


def gaussian_p(center, nbar, extent=DEFAULT_EXTENT, nodes=DEFAULT_NODES):
    """P function of a displaced thermal state; a narrow peak as ``nbar -> 0``."""
    center = complex(center)
    if not nbar > 0:
        raise InvalidState("nbar must be positive for a regular P function")

    def func(alpha):
        return np.exp(-np.abs(alpha - center) ** 2 / nbar) / (np.pi * nbar)

    return PDensity(func, extent, nodes)


def mixture_p(weights, densities):
    weights = [float(w) for w in weights]
    funcs = [d.func for d in densities]

    def func(alpha):
        return sum(w * f(alpha) for w, f in zip(weights, funcs))

    first = densities[0]
    return PDensity(func, first.extent, first.nodes)


def transform_p(p, g):
    """Filtered P function ``exp((1 - 1/g^2)|alpha|^2) P(alpha/g)``, normalized."""
    g = float(g)
    if not g > 0 or not np.isfinite(g):
        raise InvalidGain(f"gain must be a positive finite number, got {g!r}")
    if g == 1:
        return p
    inner = p.func
    k = 1 - 1 / (g * g)

    def raw(alpha):
        return np.exp(k * np.abs(alpha) ** 2) * inner(alpha / g)

    alpha, cell = PDensity(raw, p.extent, p.nodes)._grid()
    vals = raw(alpha)
    total = vals.sum() * cell
    if not np.isfinite(total) or total <= 0:
        raise NonIntegrable(f"filtered P function is not integrable for g={g}")
    if _edge_fraction(np.abs(vals)) > TOL_EDGE:
        raise NonIntegrable(f"filtered P function reaches the grid boundary for g={g}")

    def func(alpha):
        return raw(alpha) / total

    return PDensity(func, p.extent, p.nodes)
