"""Command-line entry point.

Subcommands: ``analyze``, ``spectrum``, ``verify``, ``correspond``. A JSON
config file (``--config``) supplies defaults; flags override it. Exit codes:
0 success, 2 reportable findings (unmatched levels, failed exact checks),
1 solver failure, 64 malformed input.
"""

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classical_spectrum import elementary_candidates, product, verification_records
from .correspondence import default_sweep, run_correspondence
from .equilibrium import find_equilibrium
from .errors import PrepotentialError, ValidationError
from .quantum_1d import GridSpec, converge_spectrum, default_grid
from .systems import CATALOG, level_vectors, make_system

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FINDINGS = 2
EXIT_USAGE = 64

COMMANDS = ("analyze", "spectrum", "verify", "correspond")
CONFIG_KEYS = {"system", "command", "hbar_list", "grid", "levels", "output", "seed"}
GRID_KEYS = {"half_width", "points", "levels"}
OUTPUT_KEYS = {"prefix", "format"}
FORMATS = ("json", "csv", "both")
PARAM_FLAGS = {"omega": "omega", "g": "g", "N": "N"}
EXACT_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(prog="prepotential", description="Classical data and quantum spectra from a prepotential.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON run configuration")
        p.add_argument("--system", choices=CATALOG)
        p.add_argument("--omega", type=float)
        p.add_argument("--g", type=float)
        p.add_argument("--N", type=float)
        p.add_argument("--hbar", type=float, nargs="+", dest="hbar_list")
        p.add_argument("--levels", type=int)
        p.add_argument("--half-width", type=float, dest="half_width")
        p.add_argument("--points", type=int)
        p.add_argument("--out", help="output path prefix")
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--seed", type=int)
    return parser


def _strict(mapping, allowed, where):
    if not isinstance(mapping, dict):
        raise UsageError(f"{where} must be a JSON object")
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise UsageError(f"unknown key(s) in {where}: {unknown}")


def load_config(path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    _strict(data, CONFIG_KEYS, "config")
    if "system" in data:
        _strict(data["system"], {"name", "params"}, "config.system")
    if "grid" in data:
        _strict(data["grid"], GRID_KEYS, "config.grid")
    if "output" in data:
        _strict(data["output"], OUTPUT_KEYS, "config.output")
    return data


def resolve_config(args):
    """Merge file config and flags (flags win) into a normalized RunConfig dict."""
    cfg = load_config(args.config) if args.config else {}
    if "command" in cfg and cfg["command"] != args.command:
        raise UsageError(f"config command {cfg['command']!r} does not match subcommand {args.command!r}")
    system = dict(cfg.get("system", {}))
    params = dict(system.get("params", {}))
    if args.system:
        if system.get("name") not in (None, args.system):
            params = {}
        system["name"] = args.system
    for flag, key in PARAM_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            params[key] = value
    if "name" not in system:
        raise UsageError("no system given (use --system or config.system.name)")
    system["params"] = params

    hbar_list = args.hbar_list if args.hbar_list is not None else cfg.get("hbar_list")
    if hbar_list is not None:
        try:
            hbar_list = [float(h) for h in hbar_list]
        except (TypeError, ValueError):
            raise UsageError("hbar_list must be a list of numbers") from None
        if any(not (h > 0 and math.isfinite(h)) for h in hbar_list):
            raise UsageError("hbar values must be positive")
        if len(set(hbar_list)) != len(hbar_list):
            raise UsageError("hbar values must be distinct")

    levels = args.levels
    if levels is None:
        levels = cfg.get("levels", cfg.get("grid", {}).get("levels", 6))
    if not isinstance(levels, int) or levels < 1:
        raise UsageError("levels must be a positive integer")

    grid = dict(cfg.get("grid", {}))
    if args.half_width is not None:
        grid["half_width"] = args.half_width
    if args.points is not None:
        grid["points"] = args.points

    output = dict(cfg.get("output", {}))
    if args.out is not None:
        output["prefix"] = args.out
    if args.format is not None:
        output["format"] = args.format
    output.setdefault("format", "json")
    if output["format"] not in FORMATS:
        raise UsageError(f"output.format must be one of {FORMATS}")

    seed = args.seed if args.seed is not None else cfg.get("seed", 42)
    if not isinstance(seed, int):
        raise UsageError("seed must be an integer")
    return {
        "command": args.command,
        "system": system,
        "hbar_list": hbar_list,
        "grid": grid,
        "levels": levels,
        "output": output,
        "seed": seed,
    }


def _clean(obj):
    """JSON-safe copy: numpy to builtins, non-finite floats to null."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _grid_for(cfg, system, hbar, center):
    levels = cfg["levels"]
    overrides = cfg["grid"]
    base = default_grid(system, hbar, levels, center=center)
    return GridSpec(
        half_width=float(overrides.get("half_width", base.half_width)),
        points=int(overrides.get("points", base.points)),
        levels=levels,
    )


def cmd_analyze(system, cfg):
    rep = find_equilibrium(system)
    result = rep.as_dict()
    result["hessian"] = rep.hessian.tolist()
    result["vc_hessian_eigenvalues"] = rep.vc_hessian_eigenvalues.tolist()
    summary = [
        f"system: {system.name} {dict(system.params)}",
        f"qbar = {np.array2string(rep.qbar, precision=10)}",
        f"frequencies = {np.array2string(rep.frequencies, precision=10)}",
        f"|grad W(qbar)| = {rep.grad_norm:.3e}",
    ]
    header = ["mode", "frequency"] + [f"v_{j + 1}" for j in range(rep.dimension)]
    rows = [[j, f, *v] for j, (f, v) in enumerate(zip(rep.frequencies, rep.modes))]
    return result, (header, rows), summary, EXIT_OK


def cmd_spectrum(system, cfg):
    levels = cfg["levels"]
    hbar_list = cfg["hbar_list"] or default_sweep(system, levels)
    rows = []
    tables = []
    summary = [f"system: {system.name} {dict(system.params)}"]
    if system.dimension == 1:
        center = float(find_equilibrium(system).qbar[0])
        for h in hbar_list:
            t = converge_spectrum(system, h, _grid_for(cfg, system, h, center), center=center)
            tables.append(t.as_dict())
            rows.extend(t.csv_rows())
            summary.append(f"hbar={h:g}: " + ", ".join(f"{e:.10g}" for e in t.energies))
    else:
        if system.reference_spectrum is None:
            raise PrepotentialError("multi-dimensional grid solving is not supported")
        vectors = level_vectors(system.dimension, levels - 1)
        for h in hbar_list:
            energies = [system.reference_spectrum(n, h) for n in vectors]
            tables.append(
                {"hbar": h, "labels": [list(n) for n in vectors], "energies": energies, "source": "reference"}
            )
            rows.extend((h, i, e, "reference") for i, e in enumerate(energies))
            summary.append(f"hbar={h:g}: {len(vectors)} reference levels")
    return {"spectra": tables}, (["hbar", "n", "E_n", "flag"], rows), summary, EXIT_OK


def cmd_verify(system, cfg):
    rep = find_equilibrium(system)
    registry = list(system.reference_classical_eigenfunctions)
    if registry:
        base = registry[:2]
    else:
        base = elementary_candidates(rep)
        registry = list(base)
    funcs = list(registry)
    for i in range(len(base)):
        for j in range(i, len(base)):
            funcs.append(product(base[i], base[j]))
    records = verification_records(system, rep, funcs, samples=64, seed=cfg["seed"])
    failed = 0
    for rec in records:
        if rec["approximate"]:
            rec["passed"] = None
            continue
        ok = rec["residual"] < EXACT_TOL and (rec["eigenvalue"] == 0 or rec["vanishing"] < EXACT_TOL)
        if rec["hessian_residual"] >= 0:
            ok = ok and rec["hessian_residual"] < 1e-8
        rec["passed"] = bool(ok)
        failed += not ok
    summary = [f"system: {system.name} {dict(system.params)}"]
    for rec in records:
        summary.append(
            f"label={rec['label']} E={rec['eigenvalue']:.6g} residual={rec['residual']:.2e} "
            f"vanishing={rec['vanishing']:.2e} hessian={rec['hessian_residual']:.2e}"
            + (" (approximate)" if rec["approximate"] else "")
        )
    header = ["label", "eigenvalue", "residual", "vanishing", "hessian_residual"]
    rows = [
        [" ".join(map(str, r["label"])) if isinstance(r["label"], list) else r["label"],
         r["eigenvalue"], r["residual"], r["vanishing"], r["hessian_residual"]]
        for r in records
    ]
    return records, (header, rows), summary, EXIT_FINDINGS if failed else EXIT_OK


def cmd_correspond(system, cfg):
    levels = cfg["levels"]
    rep = find_equilibrium(system)
    grid = None
    if system.dimension == 1 and cfg["grid"]:
        h0 = (cfg["hbar_list"] or default_sweep(system, levels))[0]
        grid = _grid_for(cfg, system, h0, float(rep.qbar[0]))
    reports = run_correspondence(system, cfg["hbar_list"], grid=grid, levels=levels, report=rep)
    r = system.dimension
    header = ["level", "calE"] + [f"n_{j + 1}" for j in range(r)] + ["match_residual", "fit_residual", "status"]
    rows = []
    for c in reports:
        vec = list(c.match_vector) if c.match_vector is not None else [""] * r
        rows.append([c.level_index, c.calE, *vec, c.match_residual, c.fit_residual, c.status])
    bad = [c for c in reports if c.status != "matched"]
    summary = [
        f"system: {system.name} {dict(system.params)}",
        f"frequencies = {np.array2string(rep.frequencies, precision=10)}",
        f"{len(reports) - len(bad)} of {len(reports)} levels matched",
    ]
    for c in reports[:20]:
        name = f"level {c.level_index}" + (f" {c.level_label}" if c.level_label is not None else "")
        summary.append(f"{name}: calE={c.calE:.10g} -> {c.match_vector if c.match_vector else c.status}")
    result = {"frequencies": rep.frequencies.tolist(), "levels": [c.as_dict() for c in reports]}
    return result, (header, rows), summary, EXIT_FINDINGS if bad else EXIT_OK


HANDLERS = {
    "analyze": cmd_analyze,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "correspond": cmd_correspond,
}


def render_json(cfg, result):
    doc = {"tool": "prepotential", "version": __version__, "config": cfg, "result": result}
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + " | ".join(COMMANDS))
        cfg = resolve_config(args)
        system = make_system(cfg["system"]["name"], cfg["system"]["params"])
    except (UsageError, ValidationError, KeyError) as exc:
        print(f"error: {exc}", file=stderr)
        print(parser.format_usage(), end="", file=stderr)
        return EXIT_USAGE

    try:
        result, (header, rows), summary, code = HANDLERS[cfg["command"]](system, cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except PrepotentialError as exc:
        print(f"solver failure: {exc}", file=stderr)
        return EXIT_ERROR

    prefix = cfg["output"].get("prefix")
    if prefix:
        fmt = cfg["output"]["format"]
        if fmt in ("json", "both"):
            Path(f"{prefix}.json").write_text(render_json(cfg, result))
        if fmt in ("csv", "both"):
            Path(f"{prefix}.csv").write_text(_csv_text(header, rows))
    for line in summary:
        print(line, file=stdout)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
