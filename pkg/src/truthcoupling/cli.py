"""Command-line drivers: JSON config in, CSV table out.

Usage::

    truthcoupling <command> [--config PATH] [--seed N] [--out PATH]

Commands: phase, collapse, simulate, goodhart, citations, estimate, optimize.
Exit status is 0 on success, 1 for a bad config and 2 for a domain or data
error raised by the model. Schemas for each command live in :data:`SCHEMAS`
and can be printed with ``truthcoupling schema <command>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import jsonschema
import numpy as np

from . import analytic, citations, estimation, incentives, montecarlo, policy
from .errors import ModelError

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2


class ConfigError(Exception):
    """Config file missing, unparsable or schema-invalid."""


# -- schemas ------------------------------------------------------------------

_num = {"type": "number"}
_pos_int = {"type": "integer", "minimum": 1}
_num_or_list = {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 1}]}
_mode = {"type": "string"}
_seed = {"type": "integer", "minimum": 0, "maximum": 2**64 - 1}
_grid = {
    "oneOf": [
        {"type": "array", "items": _num, "minItems": 1},
        {
            "type": "object",
            "properties": {"start": _num, "stop": _num, "num": _pos_int},
            "required": ["start", "stop", "num"],
            "additionalProperties": False,
        },
    ]
}
_pressure = {
    "type": "object",
    "properties": {"claim_rate": _num, "raw_cost": _num, "fidelity": _num, "bandwidth": _num},
    "required": ["claim_rate", "raw_cost", "bandwidth"],
    "additionalProperties": False,
}
_common = {"output_path": {"type": "string"}, "base_seed": _seed}


def _schema(properties: dict, required: Sequence[str] = ()) -> dict:
    return {
        "type": "object",
        "properties": {**_common, **properties},
        "required": list(required),
        "additionalProperties": False,
    }


SCHEMAS: dict[str, dict] = {
    "phase": _schema(
        {
            "phase": {
                "type": "object",
                "properties": {
                    "lambda_min": _num,
                    "lambda_max": _num,
                    "n_lambda": _pos_int,
                    "r_min": _num,
                    "r_max": _num,
                    "n_r": _pos_int,
                    "contour_rhos": {"type": "array", "items": _num},
                    "contour_lambdas": {"type": "array", "items": _num},
                },
                "additionalProperties": False,
            }
        }
    ),
    "collapse": _schema(
        {
            "effort": {
                "type": "object",
                "properties": {
                    "family": {"enum": ["log", "power"]},
                    "a": _num,
                    "b": _num,
                    "A": _num,
                    "beta": _num,
                },
                "required": ["family"],
                "additionalProperties": False,
            },
            "gamma": _num,
            "q_grid": _grid,
        },
        required=["effort", "gamma"],
    ),
    "simulate": _schema(
        {
            "model": {
                "type": "object",
                "properties": {
                    "var_t": _num,
                    "var_delta": _num,
                    "q": _num,
                    "pressure": _pressure,
                },
                "required": ["var_t", "var_delta"],
                "additionalProperties": False,
            },
            "grid": {
                "type": "object",
                "properties": {"q": _grid, "r": _grid, "var_t": _num},
                "required": ["q", "r"],
                "additionalProperties": False,
            },
            "mode": {"oneOf": [_mode, {"type": "array", "items": _mode, "minItems": 1}]},
            "sim": {
                "type": "object",
                "properties": {
                    "replications": _pos_int,
                    "samples_per_rep": _pos_int,
                    "workers": _pos_int,
                },
                "additionalProperties": False,
            },
        },
    ),
    "goodhart": _schema(
        {
            "pareto": {
                "type": "object",
                "properties": {"x_min": _num, "alpha": _num, "k0": _num, "beta_growth": _num},
                "additionalProperties": False,
            },
            "lambdas": _grid,
            "n_draws": {"type": "integer", "minimum": 1000},
        },
        required=["pareto"],
    ),
    "citations": _schema(
        {
            "fields": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "properties": {
                        "name": {"type": "string"},
                        "q": _num,
                        "lambda": _num,
                        "r_c": _num,
                        "s": _num,
                        "mu": _num,
                    },
                    "required": ["name", "r_c"],
                    "additionalProperties": False,
                },
            },
            "pairs": {
                "type": "array",
                "items": {
                    "type": "array",
                    "items": {"type": "string"},
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
        },
        required=["fields"],
    ),
    "estimate": _schema(
        {
            "audit_csv": {"type": "string"},
            "headroom_csv": {"type": "string"},
            "window": {"type": "integer", "minimum": 2},
            "venue": {
                "type": "object",
                "properties": {
                    "claim_rate": _num,
                    "reviewer_hours": _num,
                    "mean_check_cost": _num,
                    "fidelity": _num,
                },
                "required": ["claim_rate", "reviewer_hours", "mean_check_cost"],
                "additionalProperties": False,
            },
        },
    ),
    "optimize": _schema(
        {
            "policy": {
                "type": "object",
                "properties": {
                    "r": _num_or_list,
                    "lambda_cost": _num_or_list,
                    "unit_cost": _num_or_list,
                    "mode": _mode,
                    "grid_points": {"type": "integer", "minimum": 3},
                },
                "required": ["r", "lambda_cost"],
                "additionalProperties": False,
            }
        },
        required=["policy"],
    ),
}


# -- helpers ------------------------------------------------------------------


def fmt(value: Any) -> str:
    """Serialize a cell: floats with 12 significant digits, everything else via ``str``."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.12g}"
    if value is None:
        return ""
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def expand_grid(spec: Any) -> list[float]:
    if isinstance(spec, dict):
        return [float(v) for v in np.linspace(spec["start"], spec["stop"], spec["num"])]
    return [float(v) for v in spec]


def _as_list(value: Any) -> list:
    return list(value) if isinstance(value, list) else [value]


def derive_seed(base_seed: int, index: int) -> int:
    """Seed for the ``index``-th point of a sweep."""
    state = np.random.SeedSequence(base_seed, spawn_key=(index,)).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    cfg.setdefault("_base_dir", str(Path(path).resolve().parent))
    return cfg


def validate(command: str, cfg: dict) -> None:
    body = {k: v for k, v in cfg.items() if not k.startswith("_")}
    try:
        jsonschema.validate(body, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from exc


def _resolve(cfg: dict, path: str) -> Path:
    p = Path(path)
    if not p.is_absolute():
        p = Path(cfg.get("_base_dir", ".")) / p
    if not p.exists():
        raise ConfigError(f"input file not found: {p}")
    return p


# -- commands -----------------------------------------------------------------

PHASE_DEFAULTS = {
    "lambda_min": 1.0,
    "lambda_max": 100.0,
    "n_lambda": 100,
    "r_min": 0.1,
    "r_max": 60.0,
    "n_r": 100,
    "contour_rhos": [0.5, 0.7, 0.9],
    "contour_lambdas": [2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
}


def cmd_phase(cfg: dict) -> str:
    """Log-spaced (pressure, noise ratio) grid of linear coupling plus contour rows."""
    p = {**PHASE_DEFAULTS, **cfg.get("phase", {})}
    if not 0.0 < p["lambda_min"] <= p["lambda_max"] or not 0.0 < p["r_min"] <= p["r_max"]:
        raise ModelError("grid bounds must be positive and ordered")
    lambdas = np.geomspace(p["lambda_min"], p["lambda_max"], p["n_lambda"])
    ratios = np.geomspace(p["r_min"], p["r_max"], p["n_r"])
    rows = []
    for lam in lambdas:
        q = analytic.verification_rate(float(lam))
        for r in ratios:
            rows.append((float(lam), float(r), q, analytic.truth_coupling(q, float(r)), "grid"))
    for rho in p["contour_rhos"]:
        for lam in p["contour_lambdas"]:
            if lam <= 1.0:
                continue
            r = analytic.contour_ratio(rho, lam)
            rows.append((float(lam), r, analytic.verification_rate(lam), float(rho), "contour"))
    return render_csv(("lambda", "r", "q", "rho", "kind"), rows)


def _family(block: dict) -> incentives.Family:
    try:
        if block["family"] == "log":
            return incentives.LogFamily(block["a"], block["b"])
        return incentives.PowerFamily(block["A"], block["beta"])
    except KeyError as exc:
        raise ConfigError(f"effort block for family {block['family']!r} is missing {exc}") from None


def cmd_collapse(cfg: dict) -> str:
    """Optimal truth effort against proxy return ``x = (1 - q) gamma``.

    When the collapse threshold ``x = f'(0)`` is reachable a row at exactly
    that ``x`` is added so the regime flip is visible in the table.
    """
    family = _family(cfg["effort"])
    gamma = float(cfg["gamma"])
    q_grid = expand_grid(cfg.get("q_grid", {"start": 0.0, "stop": 1.0, "num": 101}))
    points = incentives.effort_curve(family, gamma, q_grid)
    f0 = family.marginal(0.0)
    if math.isfinite(f0) and f0 <= gamma and all(x != f0 for x, _ in points):
        points.append((f0, incentives.solve_effort(family, f0)))
        points.sort(key=lambda item: item[0])
    rows = [(x, sol.e_star, sol.regime.value) for x, sol in points]
    return render_csv(("x", "e_star", "regime"), rows)


SIMULATE_COLUMNS = (
    "q", "r", "mode", "rho_hat", "std_err", "n_total", "rho_closed_form", "z_score",
)


def cmd_simulate(cfg: dict) -> str:
    """Monte Carlo truth-coupling at one model point or over a (q, r) grid."""
    sim = {"replications": 20, "samples_per_rep": 50_000, "workers": 1, **cfg.get("sim", {})}
    seed = int(cfg.get("base_seed", 0))
    modes = [analytic.MixingMode.parse(m) for m in _as_list(cfg.get("mode", "linear"))]

    points: list[analytic.ModelParams] = []
    if "grid" in cfg:
        var_t = float(cfg["grid"].get("var_t", 1.0))
        for q in expand_grid(cfg["grid"]["q"]):
            for r in expand_grid(cfg["grid"]["r"]):
                points.append(analytic.ModelParams.from_ratio(r, q, var_t))
    elif "model" in cfg:
        m = cfg["model"]
        if "pressure" in m:
            pressure = analytic.PressureInputs(**{"fidelity": 1.0, **m["pressure"]})
            points.append(analytic.ModelParams.from_pressure(m["var_t"], m["var_delta"], pressure))
        elif "q" in m:
            points.append(analytic.ModelParams(m["var_t"], m["var_delta"], m["q"]))
        else:
            raise ConfigError("model block needs either q or pressure")
    else:
        raise ConfigError("simulate needs a model or a grid block")

    rows = []
    for i, (model, mode) in enumerate(itertools.product(points, modes)):
        sc = montecarlo.SimConfig(
            model=model,
            mode=mode,
            replications=sim["replications"],
            samples_per_rep=sim["samples_per_rep"],
            base_seed=derive_seed(seed, i),
            workers=sim["workers"],
        )
        est = montecarlo.simulate_coupling(sc)
        exact = analytic.truth_coupling(model.q, model.r, mode)
        z = (est.rho_hat - exact) / est.std_err if est.std_err > 0 else 0.0
        rows.append(
            (model.q, model.r, mode.value, est.rho_hat, est.std_err, est.n_total, exact, z)
        )
    return render_csv(SIMULATE_COLUMNS, rows)


GOODHART_COLUMNS = (
    "lambda", "k_real", "k_int", "median_exact", "median_approx",
    "median_empirical", "var_empirical", "var_std_err",
)


def cmd_goodhart(cfg: dict) -> str:
    """Best-of-K amplification of proxy noise along a pressure grid."""
    g = montecarlo.ParetoGaming(**cfg["pareto"])
    lambdas = expand_grid(cfg.get("lambdas", [1.0, 2.0, 5.0, 10.0, 20.0]))
    n_draws = int(cfg.get("n_draws", 100_000))
    seed = int(cfg.get("base_seed", 0))
    rows = []
    for i, lam in enumerate(lambdas):
        k_real = montecarlo.attempts_under_pressure(g, lam)
        rng = np.random.default_rng(derive_seed(seed, i))
        k_int = montecarlo.sampling_attempts(g, lam)
        draws = montecarlo.best_of_k_sample(g, k_int, rng, n_draws)
        floor = montecarlo.amplified_noise_floor(g, lam, n_draws, rng)
        rows.append(
            (
                lam,
                k_real,
                k_int,
                montecarlo.best_of_k_median(g, k_real),
                montecarlo.pressure_median_approx(g, lam),
                float(np.median(draws)),
                floor.variance,
                floor.std_err,
            )
        )
    return render_csv(GOODHART_COLUMNS, rows)


CITATION_COLUMNS = (
    "from_field", "to_field", "K_from", "K_to", "rho_from", "rho_to",
    "kappa_from", "kappa_to", "exchange_rate",
)


def _field(block: dict) -> citations.FieldProfile:
    if "q" in block:
        q = block["q"]
    elif "lambda" in block:
        q = analytic.verification_rate(block["lambda"])
    else:
        raise ConfigError(f"field {block['name']!r} needs q or lambda")
    return citations.FieldProfile(
        block["name"], q, block["r_c"], block.get("s", 1.0), block.get("mu", 0.0)
    )


def cmd_citations(cfg: dict) -> str:
    """Exchange rates between fields; defaults to every ordered pair."""
    fields = [_field(b) for b in cfg["fields"]]
    by_name = {f.name: f for f in fields}
    if len(by_name) != len(fields):
        raise ConfigError("field names must be unique")
    if "pairs" in cfg:
        try:
            pairs = [(by_name[a], by_name[b]) for a, b in cfg["pairs"]]
        except KeyError as exc:
            raise ConfigError(f"unknown field in pairs: {exc}") from None
    else:
        pairs = [(a, b) for a in fields for b in fields if a is not b]
        if not pairs:
            pairs = [(fields[0], fields[0])]
    rows = []
    for a, b in pairs:
        rows.append(
            (
                a.name, b.name, a.K, b.K, a.rho_c, b.rho_c,
                citations.marginal_value_per_citation(a),
                citations.marginal_value_per_citation(b),
                citations.exchange_rate(a, b),
            )
        )
    return render_csv(CITATION_COLUMNS, rows)


def cmd_estimate(cfg: dict) -> str:
    """Long-format table ``estimator,quantity,period,value`` of every requested estimate."""
    if not any(k in cfg for k in ("audit_csv", "headroom_csv", "venue")):
        raise ConfigError("estimate needs at least one of audit_csv, headroom_csv, venue")
    rows: list[tuple] = []
    if "audit_csv" in cfg:
        records = estimation.read_audit_csv(_resolve(cfg, cfg["audit_csv"]))
        dec = estimation.decompose_variance(records)
        rows += [
            ("audit", "n", None, dec.n),
            ("audit", "var_delta", None, dec.var_delta),
            ("audit", "var_t", None, dec.var_t),
            ("audit", "r", None, dec.r),
        ]
    if "headroom_csv" in cfg:
        series = estimation.read_headroom_csv(_resolve(cfg, cfg["headroom_csv"]))
        stats = estimation.headroom_stats(series, cfg.get("window", estimation.DEFAULT_WINDOW))
        for period, h in zip(stats.periods, stats.headroom):
            rows.append(("headroom", "headroom", period, h))
        for period, d in zip(stats.periods[1:], stats.improvements):
            rows.append(("headroom", "improvement", period, d))
        for period, v in zip(stats.periods[stats.window :], stats.rolling_variance):
            rows.append(("headroom", "rolling_variance", period, v))
    if "venue" in cfg:
        lam, q = estimation.estimate_pressure(estimation.VenueCounts(**cfg["venue"]))
        rows += [("pressure", "lambda", None, lam), ("pressure", "q", None, q)]
    return render_csv(("estimator", "quantity", "period", "value"), rows)


OPTIMIZE_COLUMNS = ("r", "lambda_cost", "unit_cost", "mode", "q_star", "objective", "rho")


def cmd_optimize(cfg: dict) -> str:
    """Optimal audit rate for each point of the (r, lambda_cost, unit_cost) product."""
    block = cfg["policy"]
    mode = analytic.MixingMode.parse(block.get("mode", "linear"))
    grid_points = block.get("grid_points", 1000)
    rows = []
    for r, lam, cost in itertools.product(
        _as_list(block["r"]), _as_list(block["lambda_cost"]), _as_list(block.get("unit_cost", 1.0))
    ):
        prob = policy.PolicyProblem(float(r), float(lam), float(cost), mode)
        sol = policy.optimize_audit_rate(prob, grid_points)
        rows.append((prob.r, prob.lambda_cost, prob.unit_cost, mode.value, sol.q, sol.value, sol.rho))
    return render_csv(OPTIMIZE_COLUMNS, rows)


COMMANDS: dict[str, Callable[[dict], str]] = {
    "phase": cmd_phase,
    "collapse": cmd_collapse,
    "simulate": cmd_simulate,
    "goodhart": cmd_goodhart,
    "citations": cmd_citations,
    "estimate": cmd_estimate,
    "optimize": cmd_optimize,
}


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truthcoupling",
        description="Truth-coupling, incentive collapse and citation calculus from JSON scenarios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0])
        p.add_argument("--config", help="JSON scenario file")
        p.add_argument("--seed", type=int, help="base seed (unsigned 64-bit), overrides config")
        p.add_argument("--out", help="output CSV path, overrides config output_path")
    p = sub.add_parser("schema", help="print the JSON schema of a command's config")
    p.add_argument("target", choices=sorted(SCHEMAS))
    return parser


def run(command: str, cfg: dict, seed: int | None = None) -> str:
    """Validate ``cfg`` for ``command`` and return the CSV text."""
    if seed is not None:
        cfg = {**cfg, "base_seed": seed}
    validate(command, cfg)
    return COMMANDS[command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.command == "schema":
        print(json.dumps(SCHEMAS[args.target], indent=2))
        return EXIT_OK
    try:
        cfg = load_config(args.config)
        text = run(args.command, cfg, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    out = args.out or cfg.get("output_path")
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
