"""Command-line interface: ``bellsep <command> [options]``.

Exit codes: 0 success, 1 usage or input error, 2 a check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import catalog
from .bell_polytope import (
    ChshSettings,
    chsh_correlators,
    chsh_value,
    chsh_variants,
    deterministic_strategies,
    detect_signalling,
    max_chsh,
    mixture_table,
    separability_feasible,
)
from .general_model import (
    bayes_settings_given_lambda,
    build_general_brans,
    build_signalling_model,
    causal_decomposition,
    check_properties,
    verify_reproduction,
)
from .info_measures import cmd_report, general_dimension_bound
from .montecarlo import RngSpec, estimate_chsh, estimate_joint
from .quantum_core import ValidationError, born_probability
from .singlet_models import SIGN_PAIRS, ModelKind, NumericalError, SingletModel, brans_weights, singlet_joint
from .sphere import uniform_sphere
from . import formats

DEFAULTS = {"seed": 0, "samples": 100_000, "quadrature_order": 64, "output": "json", "check": False, "out": None}

CMD_TARGETS = {
    "brans": ("exact_value", 1.0, 1e-9),
    "degorre": ("exact_value", math.log2(2.0 / math.sqrt(math.e)), 1e-4),
    "hall": ("upper_bound", 0.0663, 0.002),
}


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, result):
        super().__init__("check failed")
        self.result = result


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- output ------------------------------------------------------------------

def _round(v):
    if isinstance(v, dict):
        return {str(k): _round(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_round(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if not math.isfinite(v) else float(f"{v:.9g}")
    return v


def flatten(v, prefix: str = "") -> list[tuple[str, object]]:
    if isinstance(v, dict):
        out = []
        for k, x in v.items():
            out += flatten(x, f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(v, list):
        out = []
        for i, x in enumerate(v):
            out += flatten(x, f"{prefix}.{i}" if prefix else str(i))
        return out
    return [(prefix, v)]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.9g}"
    if v is None:
        return ""
    return str(v)


def render(result: dict, fmt: str) -> str:
    result = _round(result)
    if fmt == "json":
        return json.dumps(result, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    series = result.get("series") if isinstance(result, dict) else None
    if series:
        cols = list(series[0])
        w.writerow(cols)
        for row in series:
            w.writerow([_fmt(row[c]) for c in cols])
    else:
        w.writerow(["key", "value"])
        for k, v in flatten(result):
            w.writerow([k, _fmt(v)])
    return buf.getvalue()


# -- helpers -----------------------------------------------------------------

def _model_kinds(name: str) -> list[ModelKind]:
    return list(ModelKind) if name == "all" else [ModelKind(name)]


def _random_pairs(rng: np.random.Generator, n: int):
    pts = uniform_sphere(rng, 2 * n)
    return [(pts[2 * i], pts[2 * i + 1]) for i in range(n)]


def _parse_floats(text: str, n: int) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _azimuth(q: int) -> int:
    return 2 * q


def _table_from_args(args, builtins: dict):
    if getattr(args, "table", None):
        return formats.read_table(args.table), args.table
    name = args.builtin
    if name not in builtins:
        raise UsageError(f"unknown builtin table {name!r}; choose from {sorted(builtins)}")
    return builtins[name](), f"builtin:{name}"


def _mixture_builtin():
    strategies = deterministic_strategies(("x0", "x1"), ("y0", "y1"))
    w = np.random.default_rng(0).dirichlet(np.ones(len(strategies)))
    return mixture_table(strategies, w, catalog.chsh_label_settings())


TABLE_BUILTINS = {
    "singlet": catalog.singlet_chsh_table,
    "uniform": catalog.uniform_table,
    "signalling": catalog.signalling_table,
    "mixture": _mixture_builtin,
}


# -- commands ----------------------------------------------------------------

def cmd_singlet_check(args) -> dict:
    rng = np.random.default_rng(args.seed)
    pairs = _random_pairs(rng, args.pairs)
    q = args.quadrature_order
    results, ok = {}, True
    for kind in _model_kinds(args.model):
        model = SingletModel(kind)
        tol = args.tol_exact if args.tol_exact is not None else (1e-12 if kind is ModelKind.BRANS else 1e-6)
        try:
            err = max(float(np.max(np.abs(model.exact_joint(x, y, q, _azimuth(q)) - singlet_joint(x, y)))) for x, y in pairs)
            entry = {"pairs": len(pairs), "exact_max_error": err, "exact_tolerance": tol, "exact_pass": err < tol}
        except NumericalError as exc:
            entry = {"pairs": len(pairs), "exact_error": str(exc), "exact_tolerance": tol, "exact_pass": False}
        if args.samples > 0:
            mc_err, max_z, mc_ok = 0.0, 0.0, True
            for i, (x, y) in enumerate(pairs):
                est = estimate_joint(model, x, y, args.samples, RngSpec(args.seed, i))
                target = singlet_joint(x, y)
                dev = np.abs(est.probs - target)
                se = np.sqrt(target * (1.0 - target) / args.samples)
                z = np.where(se > 0, dev / np.where(se > 0, se, 1.0), np.where(dev > 0, np.inf, 0.0))
                mc_err = max(mc_err, float(dev.max()))
                max_z = max(max_z, float(z.max()))
            mc_ok = max_z <= 5.0
            entry.update({"mc_samples": args.samples, "mc_max_abs_error": mc_err, "mc_max_z": max_z, "mc_pass": mc_ok})
        else:
            mc_ok = True
        entry["pass"] = entry["exact_pass"] and mc_ok
        ok = ok and entry["pass"]
        results[kind.value] = entry
    out = {"command": "singlet-check", "seed": args.seed, "models": results, "pass": ok}
    if not ok:
        raise CheckFailed(out)
    return out


def cmd_cmd_report(args) -> dict:
    q = args.quadrature_order
    if args.model_file:
        model = formats.read_model(args.model_file)
        rep = cmd_report(model)
        d = rep.to_dict()
        d["dimension_bound"] = general_dimension_bound(*model.outcomes)
        out = {"command": "cmd-report", "report": d}
        if args.check and rep.upper_bound > d["dimension_bound"] + 1e-9:
            raise CheckFailed(out)
        return out
    rep = cmd_report(ModelKind(args.model), polar_order=q, azimuth_order=_azimuth(q))
    out = {"command": "cmd-report", "report": rep.to_dict()}
    if args.check:
        field, target, tol = CMD_TARGETS[args.model]
        value = getattr(rep, field)
        out["check"] = {"field": field, "target": target, "tolerance": tol, "value": value, "pass": abs(value - target) <= tol}
        if not out["check"]["pass"]:
            raise CheckFailed(out)
    return out


def cmd_chsh(args) -> dict:
    labels = ("E(x,y)", "E(x,y')", "E(x',y)", "E(x',y')")
    if args.table:
        table = formats.read_table(args.table)
        if args.labels:
            names = args.labels.split(",")
            if len(names) != 4:
                raise UsageError("--labels needs four comma-separated setting labels")
            s = ChshSettings(*names)
        else:
            xs, ys = table.x_settings, table.y_settings
            if len(xs) < 2 or len(ys) < 2:
                raise UsageError("table needs at least two settings per side")
            s = ChshSettings(xs[0], xs[1], ys[0], ys[1])
        try:
            es = chsh_correlators(table, s)
        except KeyError as exc:
            raise UsageError(str(exc)) from None
        best, _ = max_chsh(table)
        return {
            "command": "chsh",
            "source": args.table,
            "S": chsh_value(table, s),
            "std_error": 0.0,
            "correlators": dict(zip(labels, es)),
            "max_variant": max(chsh_variants(table, s)),
            "max_over_settings": best,
            "separable_bound": 2.0,
        }
    angles = _parse_floats(args.angles, 4) if args.angles else catalog.OPTIMAL_CHSH_ANGLES
    dirs = catalog.chsh_directions(angles)
    model = SingletModel(ModelKind(args.model))
    est = estimate_chsh(model, dirs, args.samples, RngSpec(args.seed))
    exact = [float(-np.dot(np.array(x), np.array(y))) for x, y in dirs.pairs()]
    d = est.to_dict()
    return {
        "command": "chsh",
        "model": model.kind.value,
        "seed": args.seed,
        "angles": list(angles),
        "samples_per_correlator": args.samples,
        "S": d["S"]["value"],
        "std_error": d["S"]["std_error"],
        "singlet_S": exact[0] + exact[1] + exact[2] - exact[3],
        "correlators": {k: v for k, v in d["correlators"].items()},
        "separable_bound": 2.0,
    }


def cmd_separability(args) -> dict:
    table, source = _table_from_args(args, TABLE_BUILTINS)
    if tuple(table.outcomes) != (2, 2):
        raise UsageError(f"separability supports binary outcomes only; table has outcomes {list(table.outcomes)}")
    res = separability_feasible(table)
    out = {"command": "separability", "source": source, **res.to_dict()}
    if table.x_settings and len(table.x_settings) > 1 and len(table.y_settings) > 1:
        out["max_chsh"] = max_chsh(table)[0]
    return out


def cmd_signalling_demo(args) -> dict:
    table, source = _table_from_args(args, TABLE_BUILTINS)
    violations = detect_signalling(table)
    model = build_signalling_model(table)
    rep = verify_reproduction(model, table)
    props = check_properties(model)
    return {
        "command": "signalling-demo",
        "source": source,
        "signalling": bool(violations),
        "violations": [v.to_dict() for v in violations],
        "reproduction": rep.to_dict(),
        "properties": {
            "statistical_completeness": "PASS" if props.outcome_independence else "FAIL",
            "statistical_locality": "PASS" if props.parameter_independence else "FAIL",
            "measurement_independence": "PASS" if props.measurement_independence else "FAIL",
        },
    }


def cmd_general_model(args) -> dict:
    if args.state or args.povm:
        if not (args.state and args.povm):
            raise UsageError("--state and --povm must be given together")
        rho, povms = formats.read_state(args.state), formats.read_povm(args.povm)
        source = f"{args.state} + {args.povm}"
    elif args.builtin == "singlet":
        rho, povms, _, _ = catalog.singlet_scenario(args.grid)
        source = f"builtin:singlet grid {args.grid}x{args.grid}"
    elif args.builtin == "qutrit":
        rho, povms = catalog.qudit_scenario(3, args.grid, seed=args.seed)
        source = f"builtin:qutrit grid {args.grid}x{args.grid}"
    else:
        raise UsageError(f"unknown builtin scenario {args.builtin!r}")
    model = build_general_brans(rho, povms)
    err = 0.0
    for i, (x, y) in enumerate(povms.settings):
        joint = model.implied_joint(x, y)
        for a in range(povms.d1):
            for b in range(povms.d2):
                err = max(err, abs(joint[a, b] - born_probability(rho, povms.effect(x, y, a + 1, b + 1))))
    rep = cmd_report(model)
    ceiling = general_dimension_bound(povms.d1, povms.d2)
    out = {
        "command": "general-model",
        "source": source,
        "dims": [povms.d1, povms.d2],
        "settings": len(povms.settings),
        "reproduction_max_error": err,
        "cmd": rep.to_dict(),
        "dimension_ceiling": ceiling,
        "bound_within_ceiling": rep.upper_bound <= ceiling + 1e-12,
    }
    if args.check and (err >= 1e-12 or not out["bound_within_ceiling"]):
        raise CheckFailed(out)
    return out


def cmd_causal_decompose(args) -> dict:
    if args.weights:
        weights, p_xy = formats.read_weights(args.weights)
        source = args.weights
    else:
        z = np.array([0.0, 0.0, 1.0])
        x = np.array(catalog.coplanar(np.pi / 3))
        weights = {}
        for label, (u, v) in {"s0": (z, z), "s1": (z, x)}.items():
            for lam, w in zip(SIGN_PAIRS, brans_weights(u, v)):
                weights[(lam, label, "y")] = float(w)
        p_xy = {("s0", "y"): 0.5, ("s1", "y"): 0.5}
        source = "builtin:brans"
    mu = causal_decomposition(weights, p_xy)
    bayes = bayes_settings_given_lambda(weights, p_xy)
    err = 0.0
    for lam in mu.lambda_domain:
        recon = mu.p_settings_given_lambda(lam)
        err = max(err, max(abs(recon[s] - bayes[lam].get(s, 0.0)) for s in recon))
    return {"command": "causal-decompose", "source": source, "mu_model": mu.to_dict(), "reconstruction_max_error": err}


def cmd_correlator_series(args) -> dict:
    model = SingletModel(ModelKind(args.model))
    q = args.quadrature_order
    z = np.array([0.0, 0.0, 1.0])
    rows = []
    for t in np.linspace(0.0, np.pi, args.points):
        y = np.array(catalog.coplanar(float(t)))
        p = model.exact_joint(z, y, q, _azimuth(q))
        rows.append({"angle": float(t), "correlator": float(p[0, 0] + p[1, 1] - p[0, 1] - p[1, 0]), "singlet": float(-np.cos(t))})
    return {"command": "correlator-series", "model": model.kind.value, "series": rows}


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--samples", type=int, help="Monte Carlo samples per setting pair")
    common.add_argument("--quadrature-order", type=int, help="Gauss-Legendre polar nodes (azimuth uses twice as many)")
    common.add_argument("--output", choices=["json", "csv"], help="output format")
    common.add_argument("--check", action="store_const", const=True, help="exit 2 if results miss their targets")
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--config", help="JSON file of option defaults")

    p = _Parser(prog="bellsep", description="Measurement-dependent local models and Bell-separability tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("singlet-check", parents=[common], help="check singlet reproduction of the three models")
    s.add_argument("--model", default="all", choices=["all"] + [k.value for k in ModelKind])
    s.add_argument("--pairs", type=int, default=50)
    s.add_argument("--tol-exact", type=float)
    s.set_defaults(func=cmd_singlet_check)

    s = sub.add_parser("cmd-report", parents=[common], help="measurement-dependence capacity report")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--model", choices=[k.value for k in ModelKind])
    g.add_argument("--model-file")
    s.set_defaults(func=cmd_cmd_report)

    s = sub.add_parser("chsh", parents=[common], help="CHSH value from a model (sampled) or a table (exact)")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--model", choices=[k.value for k in ModelKind])
    g.add_argument("--table")
    s.add_argument("--angles", help="coplanar angles x,x',y,y' in radians (model mode)")
    s.add_argument("--labels", help="setting labels x,x',y,y' (table mode)")
    s.set_defaults(func=cmd_chsh)

    s = sub.add_parser("separability", parents=[common], help="local-polytope membership test")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--table")
    g.add_argument("--builtin", choices=sorted(TABLE_BUILTINS))
    s.set_defaults(func=cmd_separability)

    s = sub.add_parser("signalling-demo", parents=[common], help="local deterministic model of any table")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--table")
    g.add_argument("--builtin", choices=sorted(TABLE_BUILTINS), default="signalling")
    s.set_defaults(func=cmd_signalling_demo)

    s = sub.add_parser("general-model", parents=[common], help="generalized Brans model for a state and POVMs")
    s.add_argument("--state")
    s.add_argument("--povm")
    s.add_argument("--builtin", choices=["singlet", "qutrit"], default="singlet")
    s.add_argument("--grid", type=int, default=8, help="settings per side for builtin scenarios")
    s.set_defaults(func=cmd_general_model)

    s = sub.add_parser("causal-decompose", parents=[common], help="causal mu-model for a weight table")
    s.add_argument("--weights")
    s.set_defaults(func=cmd_causal_decompose)

    s = sub.add_parser("correlator-series", parents=[common], help="plot-ready correlator vs angle")
    s.add_argument("--model", choices=[k.value for k in ModelKind], default="hall")
    s.add_argument("--points", type=int, default=37)
    s.set_defaults(func=cmd_correlator_series)
    return p


def _resolve(args) -> None:
    config = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, config.get(key.replace("_", "-"), config.get(key, default)))
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    if args.samples < 0:
        raise UsageError("--samples must be nonnegative")
    if args.quadrature_order < 2:
        raise UsageError("--quadrature-order must be at least 2")


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve(args)
        result = args.func(args)
        code = 0
    except CheckFailed as exc:
        result, code = exc.result, 2
    except (UsageError, ValidationError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"bellsep {args.command}: error: {exc}", file=sys.stderr)
        return 1
    _emit(render(result, args.output), args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
