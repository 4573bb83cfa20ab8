"""Command-line front end.

Subcommands: entropy, sweep, optimal-k, max-entanglement, estimate-rho,
epsilon-bound, oracle-check. Exit codes: 0 success, 1 domain/estimation/oracle
failure, 2 usage error.

Option values are resolved as flags > ``--config FILE`` (key=value lines,
flag names as keys) > built-in defaults; the effective configuration is
echoed in every output.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import csv
import datetime as _dt
import io
import itertools
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .bogoliubov import BOSON_FORMS, Statistics, gamma_sq
from .entanglement import DomainError, entropy_sample
from .estimation import (
    EstimationError,
    epsilon_lower_bound,
    estimate_rho,
    max_entanglement,
    optimal_k,
)
from .modeevolution import IntegrationError, match_out, integrate_mode, Branch
from .spectrum import ExpansionParams, ModeParams, spectrum

THREADS_ENV = "RWENTANGLE_THREADS"
SWEEP_COLUMNS = (
    "k", "mass", "rho", "epsilon",
    "log_gamma_sq_fermion", "entropy_fermion_bits",
    "log_gamma_sq_boson", "entropy_boson_bits",
)
DEFAULT_GRID = {
    "epsilon": (0.5, 1.0, 2.0),
    "rho": (0.5, 1.0, 5.0),
    "mass": (0.5, 1.0, 2.0),
    "k": (0.3, 1.0, 3.0),
}
ABS_SWITCH = 1e-6
ABS_TOL = 1e-8
WRONSKIAN_TOL = 1e-6


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    return str(x)


def _json_value(x):
    if isinstance(x, float):
        if math.isfinite(x):
            return float(format(x, ".17g"))
        return fmt(x)
    return x


# ---------------------------------------------------------------- validators

def _float(text) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return v


def positive_float(text) -> float:
    v = _float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text!r}")
    return v


def nonnegative_float(text) -> float:
    v = _float(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text!r}")
    return v


def unit_interval(text) -> float:
    v = _float(text)
    if not 0.0 <= v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1), got {text!r}")
    return v


def count_type(text) -> int:
    try:
        v = int(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError(f"must be >= 2, got {text!r}")
    return v


def _choice(*values):
    def parse(text):
        if text not in values:
            raise argparse.ArgumentTypeError(f"must be one of {', '.join(values)}; got {text!r}")
        return text
    return parse


# option name -> (type, default); None default means required
PARAM_OPTIONS = {
    "mass": (nonnegative_float, 1.0),
    "k": (positive_float, 1.0),
    "rho": (positive_float, 1.0),
    "epsilon": (positive_float, 1.0),
    "stats": (_choice("fermion", "boson", "both"), "both"),
    "boson_form": (_choice(*BOSON_FORMS), "default"),
}


def _add(parser, name, help_text, **kw):
    flag = "--" + name.replace("_", "-")
    parser.add_argument(flag, dest=name, default=None, help=help_text, **kw)


def _add_common(parser, formats=("kv", "json")):
    parser.add_argument("--config", default=None, help="key=value file; flag names as keys")
    parser.add_argument("--format", dest="format", default=None, type=_choice(*formats),
                        help=f"output format ({'/'.join(formats)})")
    parser.add_argument("--reproducible", action="store_true",
                        help="omit the timestamp so identical flags give identical output")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rwentangle", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="entropy of one mode")
    for name in ("stats", "mass", "k", "rho", "epsilon", "boson_form"):
        _add(p, name, f"{name} (default {PARAM_OPTIONS[name][1]})", type=PARAM_OPTIONS[name][0])
    _add_common(p)

    p = sub.add_parser("sweep", help="grid along one parameter axis")
    _add(p, "axis", "swept parameter", type=_choice("k", "mass", "epsilon", "rho"))
    _add(p, "lo", "lower end of the axis", type=_float)
    _add(p, "hi", "upper end of the axis", type=_float)
    _add(p, "count", "number of grid points (>= 2)", type=count_type)
    _add(p, "spacing", "linear or log", type=_choice("linear", "log"))
    for name in ("stats", "mass", "k", "rho", "epsilon", "boson_form"):
        _add(p, name, f"fixed {name}", type=PARAM_OPTIONS[name][0])
    _add(p, "out", "output path ('-' for stdout)")
    _add_common(p, formats=("csv", "json"))

    p = sub.add_parser("optimal-k", help="entropy-maximizing momentum at fixed mass")
    for name in ("mass", "rho", "epsilon"):
        _add(p, name, name, type=PARAM_OPTIONS[name][0])
    _add_common(p)

    p = sub.add_parser("max-entanglement", help="maximum entropy over mass and momentum")
    for name in ("rho", "epsilon"):
        _add(p, name, name, type=PARAM_OPTIONS[name][0])
    _add_common(p)

    p = sub.add_parser("estimate-rho", help="rapidity from an observed optimal momentum")
    _add(p, "mass", "field mass", type=positive_float)
    _add(p, "k_observed", "observed optimal momentum", type=positive_float)
    _add(p, "epsilon_ref", "reference volume parameter (default 1)", type=positive_float)
    p.add_argument("--bracket", dest="bracket", nargs=2, type=positive_float, default=None,
                   metavar=("LO", "HI"), help="rapidity bracket (default 1 2000)")
    _add_common(p)

    p = sub.add_parser("epsilon-bound", help="lower bound on epsilon from observed entropy")
    _add(p, "entropy", "observed optimal-mode entropy in [0, 1)", type=unit_interval)
    _add_common(p)

    p = sub.add_parser("oracle-check", help="closed forms vs numerical mode evolution")
    _add(p, "grid", "e.g. 'epsilon=0.5,1,2;rho=1;mass=1,2;k=0.3,1,3'")
    _add(p, "tol", "relative tolerance (absolute below 1e-6), default 1e-3", type=positive_float)
    _add(p, "ode_tol", "integrator tolerance, default 1e-10", type=positive_float)
    for name in ("stats", "boson_form"):
        _add(p, name, name, type=PARAM_OPTIONS[name][0])
    _add_common(p, formats=("kv", "csv", "json"))
    for sp in sub.choices.values():
        sp.set_defaults(subparser=sp)
    return ap


COMMAND_DEFAULTS = {
    "entropy": {"stats": "both", "mass": 1.0, "k": 1.0, "rho": 1.0, "epsilon": 1.0,
                "boson_form": "default", "format": "kv"},
    "sweep": {"axis": "k", "lo": 0.01, "hi": 100.0, "count": 200, "spacing": "log",
              "stats": "both", "mass": 1.0, "k": 1.0, "rho": 1.0, "epsilon": 1.0,
              "boson_form": "default", "out": "-", "format": "csv"},
    "optimal-k": {"mass": 1.0, "rho": 1.0, "epsilon": 1.0, "format": "kv"},
    "max-entanglement": {"rho": 1.0, "epsilon": 1.0, "format": "kv"},
    "estimate-rho": {"mass": None, "k_observed": None, "epsilon_ref": 1.0,
                     "bracket": [1.0, 2000.0], "format": "kv"},
    "epsilon-bound": {"entropy": None, "format": "kv"},
    "oracle-check": {"grid": "", "tol": 1e-3, "ode_tol": 1e-10, "stats": "both",
                     "boson_form": "default", "format": "kv"},
}


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags, config file and defaults into the effective config."""
    defaults = COMMAND_DEFAULTS[args.command]
    file_values = read_config(args.config) if args.config else {}
    unknown = set(file_values) - set(defaults)
    if unknown:
        raise UsageError(f"unknown config keys for {args.command}: {', '.join(sorted(unknown))}")
    actions = {a.dest: a for a in args.subparser._actions}
    config = {}
    for key, default in defaults.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            config[key] = flag_value
        elif key in file_values:
            action = actions[key]
            raw = file_values[key]
            try:
                if action.nargs == 2:
                    config[key] = [action.type(v) for v in raw.replace(",", " ").split()]
                    if len(config[key]) != 2:
                        raise argparse.ArgumentTypeError("expected two values")
                else:
                    config[key] = action.type(raw) if action.type else raw
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"config {key}: {exc}") from None
        elif default is None:
            raise UsageError(f"missing required option --{key.replace('_', '-')}")
        else:
            config[key] = default
    return config


# ---------------------------------------------------------------- output

def provenance(config: dict, reproducible: bool) -> dict:
    record = {"tool": "rwentangle", "version": __version__}
    if not reproducible:
        record["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    record["config"] = {k: v for k, v in config.items() if k != "format"}
    return record


def emit_record(fields: dict, config: dict, reproducible: bool, out=None) -> None:
    out = out or sys.stdout
    prov = provenance(config, reproducible)
    if config.get("format") == "json":
        payload = {k: _json_value(v) for k, v in fields.items()}
        payload["provenance"] = _json_provenance(prov)
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    for key, value in fields.items():
        out.write(f"{key}={fmt(value)}\n")
    for key, value in prov.items():
        if key == "config":
            for ck, cv in value.items():
                if isinstance(cv, (list, tuple)):
                    cv = " ".join(fmt(v) for v in cv)
                out.write(f"config.{ck}={fmt(cv)}\n")
        else:
            out.write(f"{key}={fmt(value)}\n")


def _json_provenance(prov: dict) -> dict:
    out = dict(prov)
    out["config"] = {k: ([_json_value(x) for x in v] if isinstance(v, (list, tuple)) else _json_value(v))
                     for k, v in prov["config"].items()}
    return out


def _stats_list(stats: str) -> list[Statistics]:
    if stats == "both":
        return [Statistics.FERMION, Statistics.BOSON]
    return [Statistics(stats)]


# ---------------------------------------------------------------- commands

def evaluate_row(mass: float, k: float, rho: float, epsilon: float, stats: str,
                 boson_form: str = "default") -> dict:
    """One sweep/entropy row; statistics not requested are left as None."""
    p = ExpansionParams(epsilon, rho)
    mp = ModeParams(mass, k)
    row = {"k": k, "mass": mass, "rho": rho, "epsilon": epsilon}
    for st in (Statistics.FERMION, Statistics.BOSON):
        name = st.value
        if st in _stats_list(stats):
            sample = entropy_sample(p, mp, st, boson_form=boson_form)
            row[f"log_gamma_sq_{name}"] = sample.log_gamma_sq
            row[f"entropy_{name}_bits"] = sample.entropy_bits
        else:
            row[f"log_gamma_sq_{name}"] = None
            row[f"entropy_{name}_bits"] = None
    return row


def cmd_entropy(config: dict, reproducible: bool) -> int:
    row = evaluate_row(config["mass"], config["k"], config["rho"], config["epsilon"],
                       config["stats"], config["boson_form"])
    fields = {k: v for k, v in row.items() if v is not None}
    emit_record(fields, config, reproducible)
    return 0


def sweep_axis(lo: float, hi: float, count: int, spacing: str) -> np.ndarray:
    if spacing == "log":
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def sweep_rows(config: dict) -> list[dict]:
    axis = config["axis"]
    lo, hi = config["lo"], config["hi"]
    if not lo < hi:
        raise UsageError(f"--lo must be < --hi, got {lo!r} >= {hi!r}")
    if config["spacing"] == "log" and lo <= 0:
        raise UsageError("--lo must be > 0 for log spacing")
    if axis != "mass" and lo <= 0:
        raise UsageError(f"--lo must be > 0 for axis {axis}")
    if axis == "mass" and lo < 0:
        raise UsageError("--lo must be >= 0 for axis mass")
    rows = []
    for value in sweep_axis(lo, hi, config["count"], config["spacing"]):
        point = {name: config[name] for name in ("mass", "k", "rho", "epsilon")}
        point[axis] = float(value)
        rows.append(evaluate_row(stats=config["stats"], boson_form=config["boson_form"], **point))
    return rows


def write_rows(rows: list[dict], fmt_name: str, fh) -> None:
    if fmt_name == "csv":
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([fmt(row[c]) for c in SWEEP_COLUMNS])
    else:
        payload = [{c: _json_value(row[c]) for c in SWEEP_COLUMNS} for row in rows]
        fh.write(json.dumps(payload, indent=1) + "\n")


def _atomic_write(path: str, writer) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".rwentangle-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_sweep(config: dict, reproducible: bool) -> int:
    rows = sweep_rows(config)
    out = config["out"]
    if out == "-":
        write_rows(rows, config["format"], sys.stdout)
        return 0
    try:
        _atomic_write(out, lambda fh: write_rows(rows, config["format"], fh))
        prov = _json_provenance(provenance(config, reproducible))
        _atomic_write(out + ".provenance.json",
                      lambda fh: fh.write(json.dumps(prov, indent=2) + "\n"))
    except OSError as exc:
        print(f"rwentangle: cannot write {out}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    return 0


def cmd_optimal_k(config: dict, reproducible: bool) -> int:
    mode = optimal_k(ExpansionParams(config["epsilon"], config["rho"]), config["mass"])
    fields = {
        "k_star": mode.k_star,
        "entropy_at_peak": mode.entropy_at_peak,
        "entropy_left": mode.entropy_left,
        "entropy_right": mode.entropy_right,
        "certified": mode.certified,
    }
    if mode.warning:
        fields["warning"] = mode.warning
    emit_record(fields, config, reproducible)
    return 0


def cmd_max_entanglement(config: dict, reproducible: bool) -> int:
    res = max_entanglement(ExpansionParams(config["epsilon"], config["rho"]))
    emit_record({"m_star": res.m_star, "k_star": res.k_star, "s_max": res.s_max},
                config, reproducible)
    return 0


def _estimation_fields(res, name: str) -> dict:
    return {
        name: res.estimate,
        "bracket_lo": res.bracket[0],
        "bracket_hi": res.bracket[1],
        "residual": res.residual,
        "iterations": res.iterations,
    }


def cmd_estimate_rho(config: dict, reproducible: bool) -> int:
    res = estimate_rho(config["mass"], config["k_observed"], config["epsilon_ref"],
                       tuple(config["bracket"]))
    emit_record(_estimation_fields(res, "rho"), config, reproducible)
    return 0


def cmd_epsilon_bound(config: dict, reproducible: bool) -> int:
    res = epsilon_lower_bound(config["entropy"])
    emit_record(_estimation_fields(res, "eps_min"), config, reproducible)
    return 0


def parse_grid(text: str) -> dict[str, tuple[float, ...]]:
    grid = dict(DEFAULT_GRID)
    for part in filter(None, (s.strip() for s in text.split(";"))):
        if "=" not in part:
            raise UsageError(f"--grid: expected name=v1,v2,... got {part!r}")
        name, values = (s.strip() for s in part.split("=", 1))
        if name not in grid:
            raise UsageError(f"--grid: unknown parameter {name!r}")
        check = nonnegative_float if name == "mass" else positive_float
        try:
            grid[name] = tuple(check(v) for v in values.split(",") if v.strip())
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"--grid {name}: {exc}") from None
        if not grid[name]:
            raise UsageError(f"--grid {name}: no values")
    return grid


def compare(closed: float, oracle: float, tol: float) -> tuple[float, str, bool]:
    """Relative error, switching to absolute when both are below 1e-6."""
    if max(abs(closed), abs(oracle)) < ABS_SWITCH:
        err = abs(oracle - closed)
        return err, "abs", err <= ABS_TOL
    err = abs(oracle - closed) / abs(closed) if closed != 0 else math.inf
    return err, "rel", err <= tol


def oracle_point(args) -> dict:
    (eps, rho, mass, k), st, boson_form, ode_tol, tol = args
    p = ExpansionParams(eps, rho)
    mp = ModeParams(mass, k)
    st = Statistics(st)
    row = {"epsilon": eps, "rho": rho, "mass": mass, "k": k, "statistics": st.value}
    closed = gamma_sq(p, mp, st, boson_form).value
    try:
        branch = Branch.MINUS if st is Statistics.FERMION else None
        pair = match_out(integrate_mode(p, mp, st, branch, tol=ode_tol), p, mp, st, branch)
    except (IntegrationError, ValueError) as exc:
        row.update(closed_form=closed, oracle=math.nan, error=math.nan, mode="", wronskian=math.nan,
                   ok=False, failure=str(exc))
        return row
    oracle = pair.ratio_sq
    if st is Statistics.FERMION:
        s = spectrum(p, mp)
        oracle *= (k / (s.omega_out + s.mu_out)) ** 2
    err, mode, ok = compare(closed, oracle, tol)
    wronskian = pair.wronskian if st is Statistics.BOSON else math.nan
    if st is Statistics.BOSON and abs(wronskian - 1.0) > WRONSKIAN_TOL:
        ok = False
    row.update(closed_form=closed, oracle=oracle, error=err, mode=mode, wronskian=wronskian,
               ok=ok, failure="")
    return row


ORACLE_COLUMNS = ("epsilon", "rho", "mass", "k", "statistics", "closed_form", "oracle",
                  "error", "mode", "wronskian", "ok", "failure")


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_oracle_check(config: dict) -> list[dict]:
    grid = parse_grid(config["grid"])
    points = list(itertools.product(grid["epsilon"], grid["rho"], grid["mass"], grid["k"]))
    jobs = [(pt, st.value, config["boson_form"], config["ode_tol"], config["tol"])
            for pt in points for st in _stats_list(config["stats"])]
    workers = _workers()
    if workers == 1:
        return [oracle_point(j) for j in jobs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(oracle_point, jobs))


def cmd_oracle_check(config: dict, reproducible: bool) -> int:
    if not 1e-13 < config["ode_tol"] < 1e-3:
        raise UsageError("--ode-tol must lie in (1e-13, 1e-3)")
    rows = run_oracle_check(config)
    all_ok = all(r["ok"] for r in rows)
    finite = [r["error"] for r in rows if not math.isnan(r["error"])]
    summary = {"points": len(rows), "failures": sum(not r["ok"] for r in rows),
               "max_error": max(finite) if finite else math.nan, "all_ok": all_ok}
    fmt_name = config["format"]
    if fmt_name == "json":
        payload = {"rows": [{c: _json_value(r[c]) for c in ORACLE_COLUMNS} for r in rows],
                   "summary": {k: _json_value(v) for k, v in summary.items()},
                   "provenance": _json_provenance(provenance(config, reproducible))}
        sys.stdout.write(json.dumps(payload, indent=1) + "\n")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ORACLE_COLUMNS)
        for r in rows:
            writer.writerow([fmt(r[c]) for c in ORACLE_COLUMNS])
        sys.stdout.write(buf.getvalue())
        if fmt_name == "kv":
            sys.stdout.write("\n")
            emit_record(summary, config, reproducible)
    return 0 if all_ok else 1


COMMANDS = {
    "entropy": cmd_entropy,
    "sweep": cmd_sweep,
    "optimal-k": cmd_optimal_k,
    "max-entanglement": cmd_max_entanglement,
    "estimate-rho": cmd_estimate_rho,
    "epsilon-bound": cmd_epsilon_bound,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve(args)
        return COMMANDS[args.command](config, args.reproducible)
    except UsageError as exc:
        print(f"rwentangle {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"rwentangle {args.command}: error: {exc}", file=sys.stderr)
        return 2 if args.config and exc.filename == args.config else 1
    except EstimationError as exc:
        print(f"rwentangle {args.command}: {exc.kind} failure: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"rwentangle {args.command}: domain error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
