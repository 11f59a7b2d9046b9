"""Vectorized numpy implementations of the grid kernels."""
import numpy as np

_CHUNK = 64


def q_function(lam, coeffs, xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    dim = coeffs.shape[1]
    out = np.empty((xs.size, ys.size))
    powers = np.arange(dim)
    for start in range(0, xs.size, _CHUNK):
        block = xs[start:start + _CHUNK]
        alpha = (block[:, None] + 1j * ys[None, :]).ravel()
        overlaps = (alpha[:, None] ** powers[None, :]) @ coeffs.T
        q = np.exp(-np.abs(alpha) ** 2) * (np.abs(overlaps) ** 2 @ lam) / np.pi
        out[start:start + block.size] = q.reshape(block.size, ys.size)
    return out


def reweight_resample(values, xs, ys, g):
    values = np.asarray(values, dtype=float)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    hx = xs[1] - xs[0]
    hy = ys[1] - ys[0]
    gx = g * xs
    gy = g * ys

    fx = (gx - xs[0]) / hx
    fy = (gy - ys[0]) / hy
    ix = np.floor(fx).astype(int)
    iy = np.floor(fy).astype(int)
    # nodes landing exactly on the last grid line interpolate from the last cell
    ix = np.where(ix == xs.size - 1, xs.size - 2, ix)
    iy = np.where(iy == ys.size - 1, ys.size - 2, iy)
    okx = (fx >= 0) & (ix >= 0) & (ix <= xs.size - 2)
    oky = (fy >= 0) & (iy >= 0) & (iy <= ys.size - 2)
    ix = np.clip(ix, 0, xs.size - 2)
    iy = np.clip(iy, 0, ys.size - 2)
    tx = (fx - ix)[:, None]
    ty = (fy - iy)[None, :]

    I, J = ix[:, None], iy[None, :]
    interp = (
        (1 - tx) * (1 - ty) * values[I, J]
        + tx * (1 - ty) * values[I + 1, J]
        + (1 - tx) * ty * values[I, J + 1]
        + tx * ty * values[I + 1, J + 1]
    )
    interp *= okx[:, None] & oky[None, :]
    weight = np.exp((g * g - 1) * (xs[:, None] ** 2 + ys[None, :] ** 2))
    return weight * interp
