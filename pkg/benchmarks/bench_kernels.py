"""Time the compiled grid kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--nodes 401] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from nlamp import _kernels, fock
from nlamp import nongaussian as ng
from nlamp._kernels import _pykernels

try:
    from nlamp._kernels import _ckernels
except ImportError:
    _ckernels = None


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--nodes", type=int, default=401)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    axis = np.linspace(-5, 5, args.nodes)
    states = {
        "coherent (rank 1)": fock.coherent_state(0.7 - 0.2j, 30),
        "spacs (rank 1)": ng.build_spacs(ng.SpacsParams(0.25, -0.55), 30),
        "random (rank 31)": fock.random_density(np.random.default_rng(1), 30, decay=0.6),
    }
    backends = {"numpy": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    print(f"default backend: {_kernels.BACKEND}; grid {args.nodes}x{args.nodes}")

    def best(fn):
        return min(timeit.repeat(fn, number=1, repeat=args.repeat))

    print(f"\n{'kernel':<34}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, state in states.items():
        lam, coeffs = _kernels.spectral_factors(fock.as_density(state).rho)
        times = [best(lambda m=m: m.q_function(lam, coeffs, axis, axis)) for m in backends.values()]
        ref = _pykernels.q_function(lam, coeffs, axis, axis)
        for m in backends.values():
            assert np.abs(m.q_function(lam, coeffs, axis, axis) - ref).max() < 1e-12
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{'q_function ' + name:<34}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + speed)

    values = _pykernels.q_function(lam, coeffs, axis, axis)
    for g in (0.5, 1.25):
        times = [best(lambda m=m: m.reweight_resample(values, axis, axis, g)) for m in backends.values()]
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{f'reweight_resample g={g}':<34}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
