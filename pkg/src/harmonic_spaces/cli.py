"""Command-line front end.

    harmonic-spaces eval   --corpus sec3_example --functional beta2
    harmonic-spaces sweep  --corpus remark3 --functional besov_seminorm_smooth --p 2 --axis truncation
    harmonic-spaces verify --filter C5,C6
    harmonic-spaces corpus list | export NAME

Exit codes: 0 success, 2 when a computed verdict is ``divergent-suspect``,
1 on any error.  Reports contain no timing unless ``--timing`` is given, so
repeated runs with the same configuration are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .corpus import FAMILIES, corpus_list, lookup
from .errors import ArgError, HarmonicSpacesError
from .harmonic import map_from_json
from .jets import from_json
from .quadrature import DIVERGENT, divergence_probe
from .registry import FUNCTIONALS, Settings, functional_names, integrand, run

__all__ = ["main", "build_parser", "load_config", "resolve_target"]

EXIT_OK, EXIT_ERROR, EXIT_DIVERGENT = 0, 1, 2

# keys that may appear in a config file, mirrored by flags
CONFIG_KEYS = ("map", "corpus", "functional", "p", "n", "alpha", "lambda", "mu", "r", "a", "z", "tol", "rings",
               "angular", "cap", "out", "format", "filter", "axis", "values", "theta", "levels")
PARAM_KEYS = ("p", "n", "alpha", "lambda", "mu", "r", "a", "z")


def _complex_arg(s: str) -> complex:
    try:
        return complex(str(s).replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from None


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON file with the same fields as the flags (flags win)")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--map", help="JSON file describing a map or an analytic function")
    src.add_argument("--corpus", help="corpus entry name, e.g. shear_rho:0.5")
    sp.add_argument("--functional", help="functional name (see 'corpus list --functionals')")
    sp.add_argument("--p", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--lambda", dest="lambda", type=_complex_arg)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--a", type=_complex_arg, help="automorphism parameter, e.g. 0.5+0.2j")
    sp.add_argument("--z", type=_complex_arg)
    sp.add_argument("--tol", type=float, help="quadrature rel_tol")
    sp.add_argument("--rings", type=int)
    sp.add_argument("--angular", type=int)
    sp.add_argument("--cap", type=float, help="sup-search cap radius")
    sp.add_argument("--out", help="output file (default stdout)")
    sp.add_argument("--format", choices=("json", "csv"))
    sp.add_argument("--timing", action="store_true", help="add wall time to the report")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="harmonic-spaces",
                                 description="Function-space functionals of planar harmonic maps on the disk.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one functional")
    _add_common(ev)

    sw = sub.add_parser("sweep", help="evaluate a functional along a parameter axis")
    _add_common(sw)
    sw.add_argument("--axis", choices=("p", "rho", "a-radius", "truncation"))
    sw.add_argument("--values", help="comma-separated axis values")
    sw.add_argument("--theta", type=float, help="direction of a for the a-radius axis (default 0)")
    sw.add_argument("--levels", type=int, help="truncation levels (default 14)")

    ve = sub.add_parser("verify", help="run the acceptance suite")
    ve.add_argument("--filter", help="comma-separated criterion ids, e.g. C1,C5")
    ve.add_argument("--override", action="append", default=[], metavar="ID=VALUE",
                    help="replace a criterion tolerance")
    ve.add_argument("--out", help="JSON summary file")

    co = sub.add_parser("corpus", help="list or export corpus entries")
    co.add_argument("action", choices=("list", "export"))
    co.add_argument("name", nargs="?")
    co.add_argument("--functionals", action="store_true", help="list functional names instead")
    co.add_argument("--out")
    return ap


def load_config(args: argparse.Namespace) -> dict:
    """Merge the optional JSON config with the flags; flags override."""
    cfg: dict = {}
    path = getattr(args, "config", None)
    if path:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ArgError("config file must hold a JSON object")
        unknown = sorted(set(data) - set(CONFIG_KEYS))
        if unknown:
            raise ArgError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(data)
        for k in ("a", "lambda", "z"):
            if k in cfg and cfg[k] is not None:
                v = cfg[k]
                cfg[k] = complex(*v) if isinstance(v, list) else _complex_arg(v)
    for k in CONFIG_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if cfg.get("map") and cfg.get("corpus"):
        raise ArgError("give either a map file or a corpus name, not both")
    return cfg


def resolve_target(cfg: dict):
    """``(target, description)`` from ``corpus`` or ``map``."""
    if cfg.get("corpus"):
        e = lookup(cfg["corpus"])
        return e.obj, {"corpus": e.name}
    if cfg.get("map"):
        with open(cfg["map"], encoding="utf-8") as fh:
            d = json.load(fh)
        if "analytic" in d:
            return from_json(d["analytic"]), {"map": d}
        return map_from_json(d), {"map": d}
    return None, {}


def _settings(cfg: dict) -> Settings:
    return Settings(rings=cfg.get("rings"), angular=cfg.get("angular"), cap=cfg.get("cap"), tol=cfg.get("tol"))


def _params(cfg: dict) -> dict:
    return {k: cfg[k] for k in PARAM_KEYS if cfg.get(k) is not None}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(float(x.real)), _jsonable(float(x.imag))]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def _versions() -> dict:
    return {"harmonic_spaces": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv_text(rows: list, columns: list) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def _headline(rep: dict):
    return rep["sup"] if "sup" in rep else rep.get("value")


# --- commands ------------------------------------------------------------------------------------


def cmd_eval(cfg: dict) -> int:
    name = cfg.get("functional")
    if not name:
        raise ArgError("--functional is required")
    target, src = resolve_target(cfg)
    if target is None and FUNCTIONALS.get(name) and FUNCTIONALS[name].target != "none":
        raise ArgError("--map or --corpus is required")
    t0 = time.perf_counter()
    rep = run(name, target, _params(cfg), _settings(cfg))
    inputs = {"source": src, "functional": name, "params": _params(cfg), "settings": _settings(cfg).to_dict()}
    report = {"inputs": inputs, **rep, "versions": _versions()}
    if cfg.get("timing"):
        report["wall_time_s"] = time.perf_counter() - t0
    report = _jsonable(report)
    if cfg.get("format") == "csv":
        row = {"functional": name, "value": _headline(report), "est_error": report.get("est_error"),
               "verdict": report.get("verdict")}
        _emit(_csv_text([row], list(row)), cfg.get("out"))
    else:
        _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", cfg.get("out"))
    return EXIT_DIVERGENT if report.get("verdict") == DIVERGENT else EXIT_OK


def _axis_values(cfg: dict, default):
    v = cfg.get("values")
    if v is None:
        return list(default)
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(x) for x in str(v).split(",") if x.strip()]


def cmd_sweep(cfg: dict) -> int:
    name, axis = cfg.get("functional"), cfg.get("axis")
    if not name or not axis:
        raise ArgError("--functional and --axis are required")
    settings = _settings(cfg)
    params = _params(cfg)
    rows = []
    divergent = False
    if axis == "truncation":
        target, _ = resolve_target(cfg)
        G, alpha = integrand(name, target, params)
        rep = divergence_probe(G, alpha, levels=int(cfg.get("levels") or 14))
        for m, t, inc in zip(rep.levels, rep.truncations, rep.increments):
            rows.append({"axis": "truncation", "axis_value": m, "radius": 1 - 2.0 ** (-m), "value": t,
                         "increment": inc, "verdict": rep.verdict})
        divergent = rep.verdict == DIVERGENT
        columns = ["axis", "axis_value", "radius", "value", "increment", "verdict"]
    else:
        if axis == "p":
            target, _ = resolve_target(cfg)
            points = [(x, target, {**params, "p": x}) for x in _axis_values(cfg, (1.5, 2.0, 3.0))]
        elif axis == "rho":
            fam = str(cfg.get("corpus") or "").partition(":")[0]
            if fam not in FAMILIES:
                raise ArgError(f"the rho axis needs a corpus family ({', '.join(sorted(FAMILIES))})")
            points = [(x, lookup(f"{fam}:{x:g}").obj, params)
                      for x in _axis_values(cfg, (0.25, 0.5, 0.75))]
        elif axis == "a-radius":
            target, _ = resolve_target(cfg)
            if "a" not in FUNCTIONALS.get(name, FUNCTIONALS["qp_integral"]).optional:
                raise ArgError(f"functional {name!r} has no automorphism parameter")
            th = float(cfg.get("theta") or 0.0)
            u = complex(math.cos(th), math.sin(th))
            points = [(x, target, {**params, "a": x * u})
                      for x in _axis_values(cfg, [1 - 2.0 ** (-k) for k in range(1, 11)])]
        else:
            raise ArgError(f"unknown sweep axis {axis!r}")
        for x, target, P in points:
            rep = _jsonable(run(name, target, P, settings))
            divergent |= rep.get("verdict") == DIVERGENT
            rows.append({"axis": axis, "axis_value": x, "value": _headline(rep), "est_error": rep.get("est_error"),
                         "verdict": rep.get("verdict")})
        columns = ["axis", "axis_value", "value", "est_error", "verdict"]
    rows = _jsonable(rows)
    if cfg.get("format") == "json":
        _emit(json.dumps({"functional": name, "params": _jsonable(params), "axis": axis, "rows": rows},
                         indent=2, sort_keys=True) + "\n", cfg.get("out"))
    else:
        _emit(_csv_text(rows, columns), cfg.get("out"))
    return EXIT_DIVERGENT if divergent else EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    from .acceptance import run_suite

    overrides = {}
    for item in args.override:
        key, sep, val = item.partition("=")
        if not sep:
            raise ArgError(f"override must look like ID=VALUE, got {item!r}")
        overrides[key.strip()] = float(val)
    ids = [s.strip() for s in args.filter.split(",")] if args.filter else None
    results = run_suite(ids, overrides)
    for r in results:
        print(r.line())
    summary = {"passed": all(r.passed for r in results), "results": [r.to_dict() for r in results]}
    if args.out:
        Path(args.out).write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    failed = [r.id for r in results if not r.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_corpus(args: argparse.Namespace) -> int:
    if args.functionals:
        text = "\n".join(f"{n}\t{FUNCTIONALS[n].kind}\t{FUNCTIONALS[n].description}" for n in functional_names())
        _emit(text + "\n", args.out)
        return EXIT_OK
    if args.action == "list":
        text = "\n".join(f"{e.name}\t{e.kind}\t{e.description}" for e in corpus_list())
        _emit(text + "\n", args.out)
        return EXIT_OK
    if not args.name:
        raise ArgError("corpus export needs an entry name")
    e = lookup(args.name)
    _emit(json.dumps(_jsonable({**e.to_json(), "facts": [f.to_dict() for f in e.facts]}), indent=2,
                     sort_keys=True) + "\n", args.out)
    return EXIT_OK


def main(argv: list | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "corpus":
            return cmd_corpus(args)
        cfg = load_config(args)
        cfg["timing"] = args.timing
        if args.command == "eval":
            return cmd_eval(cfg)
        return cmd_sweep(cfg)
    except (HarmonicSpacesError, OSError, ValueError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
