"""Parameter scans over the closed forms, each row checked against a Fock simulation.

A scan is described by a JSON config::

    {
      "scenario": "experiment",
      "sweep": {"param": "nu", "start": 0.05, "stop": 1.0, "steps": 96},
      "fixed": {"alpha": 0.25, "delta": -0.55, "p": 1.0, "eta": [1, 0.75, 0.5, 0.25]},
      "cutoff": 20
    }

``sweep`` takes either ``start``/``stop``/``steps`` (inclusive linspace) or an
explicit ``values`` list. A list under ``fixed`` turns that parameter into a
family axis: one block of rows per combination, written in config order.
Complex parameters accept numbers or strings such as ``"0.3-0.2j"``.
"""
from __future__ import annotations

import copy
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import experiment as ex
from . import fock, gaussian
from . import nongaussian as ng
from .errors import NLAError
from .verify import TOL_ORACLE

NEAR_ZERO = 1e-3
CONFIG_KEYS = {"scenario", "sweep", "fixed", "cutoff", "oracle", "near_zero", "seed", "output", "workers"}


class ConfigError(ValueError):
    pass


class ScanError(RuntimeError):
    """A grid point could not be evaluated (unphysical regime or unfaithful cutoff)."""


@dataclass(frozen=True)
class Row:
    a_in: complex
    a_out: complex
    gain: complex
    weight: float
    residual: float


def _ratio(a_out, a_in):
    return a_out / a_in if abs(a_in) >= ng.ZERO_INPUT else complex(math.nan, math.nan)


def _residual(a_out, state):
    return abs(a_out - fock.mean_field(state))


def _psi1(v, cutoff, oracle):
    params = ng.Psi1Params(v["c1"])
    a_in, a_out = ng.psi1_amplitudes(params, v["g"])
    weight = params.c0**2 + v["g"] ** 2 * params.c1**2
    res = _residual(a_out, fock.apply_filter(params.state(cutoff), v["g"]).state) if oracle else math.nan
    return Row(a_in, a_out, ng.gain_psi1(params, v["g"]), weight, res)


def _psi2(v, cutoff, oracle):
    c = np.array([v["c0"], v["c1"], v["c2"]], dtype=float)
    norm = np.linalg.norm(c)
    if norm == 0:
        raise ConfigError("psi2 needs a non-zero amplitude vector")
    params = ng.Psi2Params(*(c / norm))
    g = v["g"]
    a_in, a_out = ng.psi2_amplitudes(params, g)
    weight = params.c0**2 + g**2 * params.c1**2 + g**4 * params.c2**2
    res = _residual(a_out, fock.apply_filter(params.state(cutoff), g).state) if oracle else math.nan
    return Row(a_in, a_out, _ratio(a_out, a_in), weight, res)


def _mixture(v, cutoff, oracle):
    params = ng.MixtureParams(v["alpha"], v["beta"], v["p"])
    g = v["g"]
    a_in, a_out = ng.mixture_amplitudes(params, g)
    k = g * g - 1
    weight = params.p * math.exp(k * abs(params.alpha) ** 2) + (1 - params.p) * math.exp(k * abs(params.beta) ** 2)
    res = _residual(a_out, fock.apply_filter(params.state(cutoff), g).state) if oracle else math.nan
    return Row(a_in, a_out, _ratio(a_out, a_in), weight, res)


def _spacs(v, cutoff, oracle):
    params = ng.SpacsParams(v["alpha"], v["delta"])
    a_in = ng.spacs_amplitude(params)
    a_out = ng.spacs_attenuated_amplitude(params, v["nu"])
    res = math.nan
    if oracle:
        res = _residual(a_out, fock.apply_filter(ng.build_spacs(params, cutoff), v["nu"]).state)
    return Row(a_in, a_out, _ratio(a_out, a_in), ng.spacs_herald_weight(params, v["nu"]), res)


def _gaussian(v, cutoff, oracle):
    state = gaussian.GaussianState.squeezed(v["s"], v["phi"], v["alpha"], v["nbar"])
    g = v["g"]
    a_in = state.mean_field
    a_out = gaussian.transform_gaussian(state, g).mean_field
    # no closed form for the success probability here; it comes from the Fock run
    weight = res = math.nan
    if oracle:
        out = fock.apply_filter(gaussian.to_fock(state, cutoff), g)
        weight, res = out.weight, _residual(a_out, out.state)
    return Row(a_in, a_out, _ratio(a_out, a_in), weight, res)


def _experiment(v, cutoff, oracle):
    params = ex.SetupParams(v["alpha"], v["delta"], v["nu"], v["eta"], v["p"], cutoff)
    a_in = ex.input_amplitude(params)
    a_out = ex.amplitude_eta_p(params)
    res = _residual(a_out, ex.simulate_setup(params)[0]) if oracle else math.nan
    return Row(a_in, a_out, _ratio(a_out, a_in), ex.herald_weight(params), res)


@dataclass(frozen=True)
class Scenario:
    params: tuple
    evaluate: object
    cutoff: int
    complex_params: tuple = ()


SCENARIOS = {
    "psi1": Scenario(("c1", "g"), _psi1, fock.DEFAULT_CUTOFF),
    "psi2": Scenario(("c0", "c1", "c2", "g"), _psi2, fock.DEFAULT_CUTOFF),
    "mixture": Scenario(("alpha", "beta", "p", "g"), _mixture, fock.DEFAULT_CUTOFF, ("alpha", "beta")),
    "spacs": Scenario(("alpha", "delta", "nu"), _spacs, fock.DEFAULT_CUTOFF),
    "gaussian": Scenario(("nbar", "s", "phi", "alpha", "g"), _gaussian, 40, ("alpha",)),
    "experiment": Scenario(("alpha", "delta", "nu", "eta", "p"), _experiment, ex.DEFAULT_MODE_CUTOFF),
}


@dataclass
class ScanConfig:
    scenario: str
    sweep_param: str
    sweep_values: tuple
    fixed: dict
    cutoff: int
    oracle: bool = True
    near_zero: float = NEAR_ZERO
    seed: int = 0
    output: str | None = None
    workers: int = 1
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def spec(self):
        return SCENARIOS[self.scenario]

    def families(self):
        """Family axes (list-valued fixed params) in scenario order."""
        return [k for k in self.spec.params if isinstance(self.fixed.get(k), list)]


def _number(name, value, allow_complex):
    try:
        z = complex(value) if allow_complex else float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {name!r}: cannot read {value!r} as a number") from None
    if not np.isfinite(z):
        raise ConfigError(f"parameter {name!r} must be finite")
    if allow_complex and z.imag == 0:
        return z.real
    return z


def parse_config(raw):
    """Validate a config mapping and resolve the sweep grid."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    name = raw.get("scenario")
    if name not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {sorted(SCENARIOS)}, got {name!r}")
    spec = SCENARIOS[name]

    sweep = raw.get("sweep")
    if not isinstance(sweep, dict) or "param" not in sweep:
        raise ConfigError("sweep must be an object with a 'param' entry")
    param = sweep["param"]
    if param not in spec.params:
        raise ConfigError(f"cannot sweep {param!r}; {name} has parameters {list(spec.params)}")
    if param in spec.complex_params:
        raise ConfigError(f"{param!r} is complex; sweep a real parameter and use families for it")
    if "values" in sweep:
        values = [_number(param, x, False) for x in sweep["values"]]
    else:
        try:
            start, stop, steps = float(sweep["start"]), float(sweep["stop"]), int(sweep["steps"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError("sweep needs 'values' or numeric 'start', 'stop' and 'steps'") from None
        if steps < 1 or not (math.isfinite(start) and math.isfinite(stop)):
            raise ConfigError("sweep range must be finite with steps >= 1")
        values = list(np.linspace(start, stop, steps)) if steps > 1 else [start]
    if not values:
        raise ConfigError("sweep range is empty")

    fixed_raw = raw.get("fixed", {})
    if not isinstance(fixed_raw, dict):
        raise ConfigError("fixed must be an object")
    extra = set(fixed_raw) - set(spec.params)
    if extra:
        raise ConfigError(f"{name} has no parameters {sorted(extra)}")
    if param in fixed_raw:
        raise ConfigError(f"{param!r} is both swept and fixed")
    fixed = {}
    for key in spec.params:
        if key == param:
            continue
        if key not in fixed_raw:
            raise ConfigError(f"parameter {key!r} is not set")
        val = fixed_raw[key]
        cplx = key in spec.complex_params
        if isinstance(val, list):
            if not val:
                raise ConfigError(f"family {key!r} is empty")
            fixed[key] = [_number(key, x, cplx) for x in val]
        else:
            fixed[key] = _number(key, val, cplx)

    cutoff = raw.get("cutoff", spec.cutoff)
    if not isinstance(cutoff, int) or isinstance(cutoff, bool) or cutoff < 2:
        raise ConfigError(f"cutoff must be an integer >= 2, got {cutoff!r}")
    workers = raw.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError(f"workers must be a positive integer, got {workers!r}")
    near_zero = _number("near_zero", raw.get("near_zero", NEAR_ZERO), False)
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    return ScanConfig(
        name, param, tuple(values), fixed, cutoff, bool(raw.get("oracle", True)),
        near_zero, seed, raw.get("output"), workers, copy.deepcopy(raw),
    )


def apply_overrides(raw, overrides):
    """Apply ``key=value`` overrides; dotted keys reach into nested objects.

    Values are parsed as JSON when possible, otherwise kept as strings.
    """
    raw = copy.deepcopy(raw)
    for item in overrides:
        key, sep, text = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends into a non-object")
        node[parts[-1]] = value
    return raw


def grid_points(config):
    """Every (family values, swept value) pair in output order."""
    fams = config.families()
    combos = itertools.product(*(config.fixed[k] for k in fams))
    points = []
    for combo in combos:
        base = {k: v for k, v in config.fixed.items() if k not in fams}
        base.update(zip(fams, combo))
        for x in config.sweep_values:
            values = dict(base)
            values[config.sweep_param] = x
            points.append(values)
    return points


def _evaluate(task):
    scenario, values, cutoff, oracle = task
    try:
        return SCENARIOS[scenario].evaluate(values, cutoff, oracle)
    except (NLAError, ArithmeticError) as exc:
        shown = ", ".join(f"{k}={values[k]}" for k in SCENARIOS[scenario].params)
        raise ScanError(f"{scenario} at {shown}: {exc}") from None


def run_scan(config):
    """Evaluate every grid point; rows come back in sweep order whatever the worker count."""
    points = grid_points(config)
    tasks = [(config.scenario, v, config.cutoff, config.oracle) for v in points]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))))
    else:
        rows = [_evaluate(t) for t in tasks]
    return points, rows


def _fmt(x):
    # adding 0.0 folds -0.0 into 0.0
    return f"{x + 0.0:.11e}"


def _family_columns(config):
    cols = []
    for k in config.families():
        if k in config.spec.complex_params:
            cols += [f"{k}_re", f"{k}_im"]
        else:
            cols.append(k)
    return cols


def _family_values(config, values):
    out = []
    for k in config.families():
        if k in config.spec.complex_params:
            z = complex(values[k])
            out += [z.real, z.imag]
        else:
            out.append(values[k])
    return out


def header_lines(config):
    record = {k: v for k, v in config.raw.items() if k not in ("output", "workers")}
    record["cutoff"] = config.cutoff
    record["seed"] = config.seed
    tolerances = dict(
        TOL_NORM=fock.TOL_NORM, TOL_TAIL=fock.TOL_TAIL, TOL_PSD=fock.TOL_PSD,
        TOL_ORACLE=TOL_ORACLE, ZERO_INPUT=ng.ZERO_INPUT, near_zero=config.near_zero,
    )
    return [
        f"# nlamp {__version__}",
        f"# scenario: {config.scenario}",
        f"# cutoff: {config.cutoff}",
        "# tolerances: " + " ".join(f"{k}={v:g}" for k, v in tolerances.items()),
        "# params: " + json.dumps(record, sort_keys=True, separators=(",", ":")),
        f"# seed: {config.seed}",
    ]


COLUMNS = (
    "A_re", "A_im", "A_out_re", "A_out_im", "gain_re", "gain_im",
    "herald_weight", "oracle_residual", "near_zero_input",
)


def format_csv(config, points, rows):
    buf = io.StringIO()
    for line in header_lines(config):
        buf.write(line + "\n")
    buf.write(",".join([config.sweep_param, *_family_columns(config), *COLUMNS]) + "\n")
    for values, row in zip(points, rows):
        a_in, a_out, G = complex(row.a_in), complex(row.a_out), complex(row.gain)
        cells = [values[config.sweep_param], *_family_values(config, values),
                 a_in.real, a_in.imag, a_out.real, a_out.imag, G.real, G.imag,
                 row.weight, row.residual]
        flag = int(abs(a_in) < config.near_zero)
        buf.write(",".join([*(_fmt(float(c)) for c in cells), str(flag)]) + "\n")
    return buf.getvalue()


def worst_residual(rows):
    res = [r.residual for r in rows if not math.isnan(r.residual)]
    return max(res) if res else math.nan
