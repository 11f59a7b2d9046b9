"""Acceptance criteria, each at its stated tolerance.

One pass/fail line per criterion is printed in the terminal summary.
"""
import json
import math
import time
import timeit
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

from nlamp import experiment as ex
from nlamp import fock, gaussian, scan, verify
from nlamp import nongaussian as ng

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
# frozen after confirming closed form and 3-mode simulation agree (10.69436...)
GOLDEN_G07 = 10.694

TITLES = {
    1: "mixture gain 0.063 +- 5e-4 in < 1 ms",
    2: "squeezed law tanh s' = g^2 tanh s to 1e-10",
    3: "Gaussian gain bounds over 1e3 random states",
    4: "monotonicity over 1e3 random states, d<n>/dg >= -1e-6",
    5: "experiment closed form vs 3-mode simulation to 1e-8 in < 60 s",
    6: "gain landscape (G(0.7) = 10.7 +- 0.1; G > 1 region for every eta)",
    7: "psi1 threshold c1^2 = 1/(1+nu) to 1e-10",
    8: "representation triangle to 1e-4",
}
RESULTS = {}


def record(n, ok, detail):
    RESULTS.setdefault(n, []).append((bool(ok), detail))
    assert ok, f"criterion {n}: {detail}"


def summary_lines():
    lines = []
    for n, title in TITLES.items():
        got = RESULTS.get(n)
        if not got:
            lines.append(f"criterion {n}: NOT RUN  {title}")
            continue
        passed = sum(ok for ok, _ in got)
        status = "PASS" if passed == len(got) else "FAIL"
        failed = "; ".join(d for ok, d in got if not ok or len(got) == 1)
        detail = f" ({passed}/{len(got)} cases)" if len(got) > 1 else ""
        lines.append(f"criterion {n}: {status}  {title}{detail}" + (f"  [{failed}]" if failed else ""))
    return lines


def test_criterion_1_mixture_gain():
    params = ng.MixtureParams(1.0, -0.9, 1 / 3)
    G = ng.gain_mixture(params, 2.0)
    per_call = min(timeit.repeat(lambda: ng.gain_mixture(params, 2.0), number=200, repeat=5)) / 200
    ok = abs(G - 0.063) <= 5e-4 and per_call < 1e-3
    record(1, ok, f"G={G.real:.6f}{G.imag:+.1e}j, {per_call * 1e6:.1f} us/call")


@pytest.mark.parametrize("g", [1.2, 1.5])
@pytest.mark.parametrize("s", [0.1, 0.3, 0.6])
def test_criterion_2_squeezed_law(s, g):
    try:
        out = gaussian.transform_gaussian(gaussian.GaussianState.squeezed(s), g)
    except Exception as exc:
        record(2, False, f"s={s}, g={g}: {type(exc).__name__}")
    err = abs(np.tanh(gaussian.squeezing_parameter(out)) - g * g * np.tanh(s))
    record(2, err <= 1e-10, f"s={s}, g={g}: residual {err:.1e}")


def test_criterion_3_gaussian_bounds():
    r = verify.gaussian_bounds(n_states=1000)
    record(3, r.passed and r.checked >= 1000, f"{r.checked} checks, margins {r.worst}")


def test_criterion_4_monotonicity():
    r = verify.monotonicity(n_states=1000, cutoff=25)
    record(4, r.passed, f"{r.checked} checks, min derivative {r.worst['min_derivative']:.3e}")


def test_criterion_5_experiment_oracle():
    start = time.perf_counter()
    worst = verify._experiment_residual()
    elapsed = time.perf_counter() - start
    n = int(np.prod([len(v) for v in verify.EXPERIMENT_CORNERS.values()]))
    record(5, worst <= 1e-8 and elapsed < 60, f"{n} corners, worst {worst:.1e}, {elapsed:.1f} s")


def _scan_rows(name):
    config = scan.parse_config(json.loads((CONFIGS / name).read_text()))
    points, rows = scan.run_scan(config)
    return config, points, rows


def _gain_regions(points, rows, key):
    """Per family value: the nu values where the closed-form gain exceeds 1."""
    out = {}
    for v, r in zip(points, rows):
        out.setdefault(v[key], [])
        if complex(r.gain).real > 1:
            out[v[key]].append(v["nu"])
    return out


def test_criterion_6_pure_source_sweep():
    params = ex.SetupParams(0.25, -0.55, 0.7, eta=1.0, p=1.0)
    closed = ex.gain(params)
    rho, _ = ex.simulate_setup(params)
    simulated = fock.mean_field(rho).real / ex.input_amplitude(params)
    _, points, rows = _scan_rows("pure_source_nu_sweep.json")
    regions = _gain_regions(points, rows, "eta")
    above = sorted(regions[1.0])
    # the interval around 0.7 must be contiguous on the sweep grid
    contains = bool(above) and above[0] < 0.7 < above[-1]
    residual = max(r.residual for r in rows)
    ok = (
        abs(closed - GOLDEN_G07) <= 0.1 and abs(simulated - GOLDEN_G07) <= 0.1
        and abs(closed - 10.7) <= 0.1 and contains and residual < 1e-8
    )
    record(6, ok, f"G(0.7) closed {closed:.4f}, simulated {simulated:.4f}, "
                  f"G>1 for nu in [{above[0]:.2f}, {above[-1]:.2f}]")


def test_criterion_6_impure_source_sweep():
    _, points, rows = _scan_rows("impure_source_nu_sweep.json")
    regions = _gain_regions(points, rows, "eta")
    residual = max(r.residual for r in rows)
    empty = [eta for eta in (0.25, 0.5, 0.75, 1.0) if not regions.get(eta)]
    spans = ", ".join(f"eta={e}: {min(v):.2f}-{max(v):.2f}" for e, v in regions.items() if v)
    record(6, not empty and residual < 1e-8, f"G>1 regions {spans}; empty for {empty}")


@pytest.mark.parametrize("nu", [0.3, 0.5, 0.8])
def test_criterion_7_psi1_threshold(nu):
    root = brentq(lambda c2: ng.gain_psi1(ng.Psi1Params(math.sqrt(c2)), nu) - 1, 1e-9, 1 - 1e-9,
                  xtol=1e-15, rtol=4 * np.finfo(float).eps)
    err = abs(root - 1 / (1 + nu))
    record(7, err <= 1e-10, f"nu={nu}: root {root:.12f}, error {err:.1e}")


def test_criterion_8_representation_triangle():
    worst = verify.triangle_residuals()
    name = max(worst, key=worst.get)
    record(8, max(worst.values()) < 1e-4, f"worst {worst[name]:.1e} ({name}), {len(worst)} cases")
