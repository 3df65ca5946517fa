"""Command-line front end.

Exit codes: 0 success, 1 verify failure, 2 usage or domain error, 3 I/O error.
Output is assembled in memory and written in one step, so failed runs never
leave partial files behind.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import dist, gfp, harness, pointproc, simulate
from .dist import DomainError, TailBalancedLaw
from .gfp import FarimaSpec
from .kernels import LimitKernel, StepKernel

__all__ = ["CliConfig", "UsageError", "parse_args", "run_command", "main"]

SUBCOMMANDS = ("coeffs", "expansion-check", "simulate", "decompose", "flp", "pp", "extremes", "verify")

DEFAULTS = {
    "alpha": 1.5,
    "p": 0.5,
    "gamma": None,
    "theta": "1",
    "phi": "1",
    "n": 1000,
    "reps": 1000,
    "seed": 42,
    "depth": 1e4,
    "out": None,
    "format": "csv",
    "kernel": None,
    "window_theta": 0.3,
    "floor": pointproc.DEFAULT_FLOOR,
    "source": "path",
    "m": 1,
    "xs": "0.5,1,2",
    "only": None,
    "workers": 1,
}


class UsageError(Exception):
    """Invalid command line; maps to exit code 2."""


@dataclass
class CliConfig:
    subcommand: str
    options: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.options[name]
        except KeyError:
            raise AttributeError(name) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--alpha", type=float, help="tail index in (0,2)")
    common.add_argument("--p", type=float, help="right-tail weight p in [0,1]")
    common.add_argument("--gamma", type=float, help="fractional order of the FARIMA filter")
    common.add_argument("--theta", type=str, help="Theta coefficients, comma separated, ascending")
    common.add_argument("--phi", type=str, help="Phi coefficients, comma separated, ascending")
    common.add_argument("--n", type=int, help="sample size or number of coefficients")
    common.add_argument("--reps", type=int, help="Monte Carlo replicates")
    common.add_argument("--seed", type=int, help="base seed")
    common.add_argument("--depth", type=float, help="LePage series depth (W_i <= depth)")
    common.add_argument("--out", type=str, help="output file (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--config", type=str, help="JSON file with flag values; flags win")

    parser = _Parser(prog="heavytail", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    helps = {
        "coeffs": "FARIMA coefficients g_0..g_{n-1}",
        "expansion-check": "coefficients against their second-order expansion",
        "simulate": "simulate a weighted partial-sum path",
        "decompose": "simulate a path and split it into middle and extreme parts",
        "flp": "fractional Levy path from a LePage series",
        "pp": "point pattern of a rescaled path or of the limit",
        "extremes": "Monte Carlo law of the path maximum against its limit",
        "verify": "run the acceptance suite",
    }
    subs = {name: sub.add_parser(name, parents=[common], help=helps[name]) for name in SUBCOMMANDS}
    for name in ("simulate", "decompose", "pp", "extremes"):
        subs[name].add_argument("--kernel", choices=("farima", "constant"),
                                help="constant kernel k = 1 instead of FARIMA coefficients")
    subs["decompose"].add_argument("--window-theta", type=float, dest="window_theta",
                                   help="truncation exponent, m_n = n**theta")
    subs["pp"].add_argument("--floor", type=float, help="magnitude floor")
    subs["pp"].add_argument("--source", choices=("path", "limit"), help="pattern source")
    subs["expansion-check"].add_argument("--m", type=int, help="expansion order (1 or 2)")
    subs["extremes"].add_argument("--xs", type=str, help="thresholds, comma separated")
    subs["verify"].add_argument("--only", type=str, help="criterion numbers, comma separated")
    subs["verify"].add_argument("--workers", type=int, help="worker processes")
    return parser


def _floats(text, what: str) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise UsageError(f"{what} must be a comma separated list of numbers") from None


def parse_args(argv) -> CliConfig:
    """Parse and validate; raises :class:`UsageError` on bad input."""
    ns = _build_parser().parse_args(argv)
    given = {k: v for k, v in vars(ns).items() if v is not None}
    opts = dict(DEFAULTS)
    if "config" in given:
        try:
            with open(given["config"], encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(config, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(config) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        opts.update(config)
    opts.update(given)
    opts.pop("config", None)
    cfg = CliConfig(subcommand=opts.pop("subcommand"), options=opts)
    _validate(cfg, given)
    return cfg


def _validate(cfg: CliConfig, given: dict):
    o = cfg.options
    if not 0.0 < float(o["alpha"]) < 2.0:
        raise UsageError("alpha must lie in (0,2)")
    if not 0.0 <= float(o["p"]) <= 1.0:
        raise UsageError("p must lie in [0,1]")
    if int(o["n"]) < 1:
        raise UsageError("n must be at least 1")
    if int(o["reps"]) < 1:
        raise UsageError("reps must be at least 1")
    if int(o["seed"]) < 0:
        raise UsageError("seed must be nonnegative")
    if float(o["depth"]) < 1.0:
        raise UsageError("depth must be at least 1")
    o["theta"] = _floats(o["theta"], "theta")
    o["phi"] = _floats(o["phi"], "phi")
    o["xs"] = _floats(o["xs"], "xs")
    if o.get("kernel") == "constant":
        clash = [k for k in ("gamma", "theta", "phi") if k in given]
        if clash:
            raise UsageError("--kernel constant conflicts with --" + ", --".join(clash))
    if cfg.subcommand in ("coeffs", "expansion-check") and o["gamma"] is None:
        raise UsageError(f"{cfg.subcommand} requires --gamma")
    if cfg.subcommand in ("simulate", "decompose", "pp", "extremes") and o.get("kernel") != "constant" \
            and o["gamma"] is None:
        raise UsageError(f"{cfg.subcommand} requires --gamma or --kernel constant")
    if o["only"] is not None:
        try:
            o["only"] = tuple(int(v) for v in str(o["only"]).split(",") if v.strip())
        except ValueError:
            raise UsageError("--only must list criterion numbers") from None


# output helpers -------------------------------------------------------------

def _short(x: float) -> str:
    """Shortest round-trip text, without a trailing ``.0``."""
    text = repr(x)
    return text[:-2] if text.endswith(".0") else text


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return _short(float(v))


def _render(columns: dict, fmt: str) -> str:
    names = list(columns)
    data = [np.asarray(columns[k]) for k in names]
    rows = len(data[0]) if data else 0
    if fmt == "json":
        out = [{k: (d[i].item() if hasattr(d[i], "item") else d[i]) for k, d in zip(names, data)}
               for i in range(rows)]
        return json.dumps(out, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for i in range(rows):
        w.writerow([_fmt(d[i]) for d in data])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".heavytail-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# commands ------------------------------------------------------------------

def _law(o) -> TailBalancedLaw:
    return TailBalancedLaw(float(o["alpha"]), float(o["p"]))


def _spec(o) -> FarimaSpec:
    return FarimaSpec(float(o["gamma"]), o["theta"], o["phi"])


def _kernel(o, n: int):
    if o.get("kernel") == "constant":
        return StepKernel(np.ones(n + 1))
    return harness.build_kernel(_spec(o), n)


def _cmd_coeffs(o):
    n = int(o["n"])
    g = gfp.farima_coeffs(_spec(o), n - 1).g
    return _render({"k": np.arange(n), "g": g}, o["format"]), 0


def _cmd_expansion(o):
    spec = _spec(o)
    m = int(o["m"])
    top = int(o["n"])
    ns = 2 ** np.arange(0, int(math.log2(top)) + 1)
    coeffs = gfp.farima_coeffs(spec, int(ns[-1]))
    oracle = gfp.expansion_oracle(spec, None, m)
    d = oracle.d
    nf = ns.astype(float)
    pred = sum(c * nf ** (d - 1.0 - j) for j, c in enumerate(oracle.P_coeffs)) / special.gamma(d)
    resid = gfp.expansion_residual(spec, None, m, ns, coeffs=coeffs)
    cols = {"n": ns, "g_n": coeffs.g[ns], f"P{m}_prediction": pred, "residual": resid}
    return _render(cols, o["format"]), 0


def _cmd_simulate(o):
    law, n = _law(o), int(o["n"])
    bundle = simulate.simulate_path(law, _kernel(o, n), n, int(o["seed"]))
    return _render(simulate.path_table(bundle), o["format"]), 0


def _cmd_decompose(o):
    law, n = _law(o), int(o["n"])
    if n < 2:
        raise DomainError("decompose needs n >= 2")
    bundle = simulate.simulate_path(law, _kernel(o, n), n, int(o["seed"]))
    dec = simulate.decompose(bundle, dist.truncation_window(law, n, float(o["window_theta"])))
    return _render(simulate.path_table(bundle, dec), o["format"]), 0


def _cmd_flp(o):
    law, n = _law(o), int(o["n"])
    k = LimitKernel.constant(1.0) if o["gamma"] is None else LimitKernel.fractional(float(o["gamma"]))
    grid = np.arange(n + 1) / n
    values = simulate.fractional_levy(k, law.alpha, law.p, law.q, float(o["depth"]), grid, int(o["seed"]))
    return _render({"t": grid, "value": values}, o["format"]), 0


def _cmd_pp(o):
    law, n = _law(o), int(o["n"])
    floor = float(o["floor"])
    kernel = _kernel(o, n)
    if o["source"] == "limit":
        kappa = np.trim_zeros(np.asarray(kernel.values), "b")
        pat = pointproc.sample_limit_pattern(kappa, law.alpha, law.p, law.q, float(o["depth"]),
                                             floor, int(o["seed"]))
    else:
        if n < 2:
            raise DomainError("pp needs n >= 2")
        pat = pointproc.extract_pattern(simulate.simulate_path(law, kernel, n, int(o["seed"])), floor)
    rows = pointproc.pattern_to_rows(pat)
    return _render({"t": [r[0] for r in rows], "y": [r[1] for r in rows]}, o["format"]), 0


def _cmd_extremes(o):
    law, n, reps = _law(o), int(o["n"]), int(o["reps"])
    if n < 2:
        raise DomainError("extremes needs n >= 2")
    kernel = _kernel(o, n)
    g_max = float(np.max(kernel.values))
    vals = harness.maxima_samples(law, kernel, n, reps, int(o["seed"]))
    xs = np.asarray(o["xs"])
    observed = harness.empirical_cdf(vals, xs)
    predicted = pointproc.extreme_cdf(law.alpha, law.p, g_max, xs)
    cols = {"x": xs, "observed": observed, "predicted": predicted,
            "abs_gap": np.abs(observed - predicted)}
    return _render(cols, o["format"]), 0


def _cmd_verify(o):
    results = harness.run_acceptance(int(o["seed"]), o["only"], int(o["workers"]))
    table = harness.SummaryTable()
    for key in sorted(results):
        table.extend(results[key])
    text = table.to_json() + "\n" if o["format"] == "json" else table.to_csv()
    summary = "".join(f"criterion {k}: {'PASS' if results[k].all_pass else 'FAIL'}\n"
                      for k in sorted(results))
    sys.stderr.write(summary)
    return text, 0 if all(r.all_pass for r in results.values()) else 1


COMMANDS = {
    "coeffs": _cmd_coeffs,
    "expansion-check": _cmd_expansion,
    "simulate": _cmd_simulate,
    "decompose": _cmd_decompose,
    "flp": _cmd_flp,
    "pp": _cmd_pp,
    "extremes": _cmd_extremes,
    "verify": _cmd_verify,
}


def run_command(config: CliConfig) -> int:
    try:
        text, code = COMMANDS[config.subcommand](config.options)
    except (DomainError, NotImplementedError) as exc:
        sys.stderr.write(f"heavytail: {exc}\n")
        return 2
    try:
        _emit(text, config.options.get("out"))
    except OSError as exc:
        sys.stderr.write(f"heavytail: cannot write output: {exc}\n")
        return 3
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return run_command(config)
