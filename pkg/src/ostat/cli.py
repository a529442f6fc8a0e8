"""Command-line interface.

Subcommands::

    ostat simulate  --dist normal --n 10 --out sample.csv
    ostat envelope  --dist uniform --n 9 --band additive --t 0.2 --out env.csv
    ostat verify    --suite lemma2 --n 2000 --t 0.1 --trials 5000 --seed 42
    ostat calibrate --dist normal --n-cal 1000 --trials 500 --out constants.json
    ostat rate      --dist normal --n-list 1000,10000 --trials 200 --out rate.csv

Every file written is accompanied by ``<file>.manifest.json`` holding the
resolved configuration, seed, timestamps and output paths.  Data files never
contain timestamps, so identical invocations give byte-identical data.

Exit status: 0 on success, 1 on configuration errors, 2 on runtime errors.
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
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import Family, make_model
from .envelopes import (SupLogConcave, SupUniformWidth, additive_band, calibrate_constant,
                        ratio_band, sup_band)
from .errors import ConfigurationError, OstatError
from .montecarlo import rate_scaling_experiment
from .sampler import sample_order_stats, stream
from .suites import SUITES
from .theta import (check_central_lipschitz, check_quantile_gap_bound,
                    check_quantile_tail_bound, lipschitz_modulus)

SEED_ENV = "OSTAT_SEED"
DEFAULT_SEED = 0

_DIST_PARAMS = {
    Family.UNIFORM01: (),
    Family.NORMAL: ("mean", "sd"),
    Family.EXPONENTIAL: ("rate",),
    Family.LAPLACE: ("loc", "scale"),
    Family.GENEXP: ("p",),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_writable(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    parent = p.parent if str(p.parent) else Path(".")
    if not parent.is_dir():
        raise ConfigurationError(f"output directory {str(parent)!r} does not exist")
    if not os.access(parent, os.W_OK) or (p.exists() and not os.access(p, os.W_OK)):
        raise ConfigurationError(f"output path {str(p)!r} is not writable")
    return p


def _add_dist(p: argparse.ArgumentParser, default: str | None = None) -> None:
    g = p.add_argument_group("distribution")
    g.add_argument("--dist", default=default, choices=[f.value for f in Family],
                   help="distribution family")
    g.add_argument("--p", type=float, help="exponent of the genexp family (>= 1)")
    g.add_argument("--mean", type=float, help="normal mean")
    g.add_argument("--sd", type=float, help="normal standard deviation")
    g.add_argument("--rate", type=float, help="exponential rate")
    g.add_argument("--loc", type=float, help="laplace location")
    g.add_argument("--scale", type=float, help="laplace scale")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file whose keys mirror the flags; flags win")
    p.add_argument("--seed", type=int, help=f"master seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    p.add_argument("--workers", type=int, default=1, help="worker processes for Monte Carlo runs")
    p.add_argument("--out", help="output file (default: stdout)")


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ostat", description="Concentration envelopes for order statistics.")
    parser.add_argument("--version", action="version", version=f"ostat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="draw one sorted sample (CSV: index,value)")
    _add_dist(p, "normal")
    _add_common(p)
    p.add_argument("--n", type=int, required=False)
    p.add_argument("--trial", type=int, default=0, help="trial index of the random stream")

    p = sub.add_parser("envelope", help="build a simultaneous envelope (CSV)")
    _add_dist(p, "normal")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--band", choices=["ratio", "additive", "sup-logconcave", "sup-uniform"],
                   default="additive")
    p.add_argument("--T", type=float, help="ratio factor (ratio, sup-uniform)")
    p.add_argument("--t", type=float, help="additive half-width in probability space")
    p.add_argument("--c", type=float, help="width constant of the sup-logconcave band")
    p.add_argument("--c-prob", dest="c_prob", type=float, help="probability constant of sup-logconcave")
    p.add_argument("--q", type=float, help="probability exponent of sup-logconcave")
    p.add_argument("--k", type=float, help="width constant of the sup-uniform band")
    p.add_argument("--rate-p", dest="rate_p", type=float,
                   help="exponent p of the log-concave rate (default: model's index)")

    p = sub.add_parser("verify", help="run a named verification suite (JSON report)")
    _add_dist(p, None)
    _add_common(p)
    p.add_argument("--suite", choices=sorted(SUITES), required=False)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--omega", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--n-list", dest="n_list", type=_int_list)
    p.add_argument("--rate-p", dest="rate_p", type=float)
    p.add_argument("--records", help="write per-trial JSONL records here")

    p = sub.add_parser("calibrate", help="calibrate constants (JSON)")
    _add_dist(p, "normal")
    _add_common(p)
    p.add_argument("--rate-p", dest="rate_p", type=float)
    p.add_argument("--n-cal", dest="n_cal", type=int, default=1000)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--target-quantile", dest="target_quantile", type=float, default=0.9)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.01, help="central Lipschitz margin")

    p = sub.add_parser("rate", help="median sup deviation against the log-concave rate (CSV)")
    _add_dist(p, "normal")
    _add_common(p)
    p.add_argument("--rate-p", dest="rate_p", type=float)
    p.add_argument("--n-list", dest="n_list", type=_int_list, default=[1000, 10_000, 100_000])
    p.add_argument("--trials", type=int, default=200)
    parser.subcommands = dict(sub.choices)
    return parser


def _parse(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config file {args.config!r}: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise ConfigurationError("config file must hold a JSON object")
        file_cfg = {k.replace("-", "_"): v for k, v in file_cfg.items()}
        known = vars(args)
        unknown = sorted(set(file_cfg) - set(known) - {"command"})
        if unknown:
            raise ConfigurationError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
        # Re-parse with file values as defaults so explicit flags still win.
        sub = parser.subcommands[args.command]
        if "n_list" in file_cfg and isinstance(file_cfg["n_list"], str):
            file_cfg["n_list"] = _int_list(file_cfg["n_list"])
        sub.set_defaults(**file_cfg)
        args = parser.parse_args(argv)
    if args.seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            args.seed = int(env) if env not in (None, "") else DEFAULT_SEED
        except ValueError:
            raise ConfigurationError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    if not 0 <= args.seed < 2 ** 64:
        raise ConfigurationError("seed must be a 64-bit unsigned integer")
    if args.workers < 1:
        raise ConfigurationError("--workers must be >= 1")
    return args


def _model(args, default: str | None = None):
    name = args.dist or default
    if name is None:
        return None
    fam = Family(name)
    params = {k: getattr(args, k) for k in _DIST_PARAMS[fam] if getattr(args, k) is not None}
    stray = [k for f, ks in _DIST_PARAMS.items() if f is not fam for k in ks
             if k not in _DIST_PARAMS[fam] and getattr(args, k, None) is not None]
    if stray:
        raise ConfigurationError(f"--{stray[0]} does not apply to --dist {name}")
    return make_model(name, **params)


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise ConfigurationError(f"--{name.replace('_', '-')} is required for {args.command}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _cmd_simulate(args):
    _require(args, "n")
    model = _model(args)
    x = sample_order_stats(model, args.n, stream(args.seed, args.trial)).values
    text = _csv(["index", "value"], [(i + 1, _fmt(v)) for i, v in enumerate(x)])
    config = {"model": model.to_dict(), "n": args.n, "trial": args.trial}
    return text, config, {}


def _cmd_envelope(args):
    _require(args, "n")
    model = _model(args)
    if args.band == "ratio":
        _require(args, "T")
        env = ratio_band(model, args.n, args.T)
    elif args.band == "additive":
        _require(args, "t")
        env = additive_band(model, args.n, args.t)
    elif args.band == "sup-logconcave":
        _require(args, "c")
        p = args.rate_p if args.rate_p is not None else model.p_index
        env = sup_band(model, args.n, SupLogConcave(p, args.c, args.c_prob, args.q))
    else:
        _require(args, "k", "T")
        env = sup_band(model, args.n, SupUniformWidth(args.k, args.T))
    rows = [(i + 1, _fmt(q), _fmt(r), _fmt(lo), _fmt(hi))
            for i, (q, r, lo, hi) in enumerate(zip(env.q, env.reference, env.lower, env.upper))]
    text = _csv(["index", "q", "x_star", "lower", "upper"], rows)
    config = {"model": model.to_dict(), "n": args.n, "band": args.band,
              "params": {k: getattr(args, k) for k in ("T", "t", "c", "c_prob", "q", "k", "rate_p")
                         if getattr(args, k) is not None},
              "nominal_coverage": env.nominal_coverage}
    return text, config, {}


def _cmd_verify(args):
    _require(args, "suite")
    kwargs = {"seed": args.seed, "workers": args.workers}
    model = _model(args)
    if model is not None:
        kwargs["model"] = model
    for key in ("n", "t", "T", "omega", "trials", "n_list"):
        if getattr(args, key) is not None:
            kwargs[key] = getattr(args, key)
    if args.rate_p is not None:
        kwargs["p"] = args.rate_p
    if args.suite == "metric" and args.trials is not None:
        kwargs["triples"] = args.trials
    report, records = SUITES[args.suite](**kwargs)
    extra = {}
    if args.records:
        if records is None:
            raise ConfigurationError(f"suite {args.suite} has no per-trial records")
        lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records.records())
        extra[args.records] = lines
    return _json(report), report["config"], extra


def _cmd_calibrate(args):
    model = _model(args)
    p = args.rate_p if args.rate_p is not None else model.p_index
    cal = calibrate_constant(model, p, args.n_cal, args.trials, args.target_quantile,
                             seed=args.seed, q=args.q, workers=args.workers)
    gap = check_quantile_gap_bound(model)
    tail = check_quantile_tail_bound(model)
    central = check_central_lipschitz(model, args.epsilon)
    out = {
        "model": model.to_dict(),
        "rate_constant": {"c": cal.c, "c_prob": cal.c_prob, "q": cal.q, "p": cal.p,
                          "n_cal": cal.n_cal, "trials": cal.trials,
                          "target_quantile": cal.target_quantile},
        "quantile_gap_bound": {"c": gap.constant, "argmax": list(gap.argmax)},
        "quantile_tail_bound": {"c": tail.constant, "argmax": tail.argmax[0]},
        "central_lipschitz": {"c": central.constant, "epsilon": args.epsilon},
    }
    if math.isfinite(model.p_index):
        lip = lipschitz_modulus(model, model.p_index)
        out["theta_lipschitz"] = {"c": lip.constant, "p": model.p_index, "argmax": list(lip.argmax)}
    config = {"model": model.to_dict(), "rate_p": p, "n_cal": args.n_cal, "trials": args.trials,
              "target_quantile": args.target_quantile, "q": args.q, "epsilon": args.epsilon,
              "seed": args.seed}
    return _json(out), config, {}


def _cmd_rate(args):
    model = _model(args)
    p = args.rate_p if args.rate_p is not None else model.p_index
    rows = rate_scaling_experiment(model, p, args.n_list, args.trials, args.seed, args.workers)
    text = _csv(["n", "median_sup_dev", "rate", "ratio"],
                [(r.n, _fmt(r.median_sup_dev), _fmt(r.rate), _fmt(r.ratio)) for r in rows])
    config = {"model": model.to_dict(), "rate_p": p, "n_list": list(args.n_list),
              "trials": args.trials, "seed": args.seed}
    return text, config, {}


_COMMANDS = {
    "simulate": _cmd_simulate,
    "envelope": _cmd_envelope,
    "verify": _cmd_verify,
    "calibrate": _cmd_calibrate,
    "rate": _cmd_rate,
}


def _manifest(args, argv, config, outputs, started) -> str:
    return _json({
        "tool": "ostat",
        "version": __version__,
        "command": args.command,
        "argv": list(argv),
        "config": config,
        "master_seed": args.seed,
        "workers": args.workers,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
    })


def run_cli(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    started = datetime.now(timezone.utc).isoformat()
    try:
        args = _parse(argv)
        out = _check_writable(args.out)
        extra_paths = {}
        if getattr(args, "records", None):
            extra_paths[args.records] = _check_writable(args.records)
        with np.errstate(all="ignore"):
            text, config, extra = _COMMANDS[args.command](args)
    except OstatError as exc:
        print(f"ostat: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numerical or runtime failure
        print(f"ostat: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    try:
        written = {}
        if out is None:
            sys.stdout.write(text)
        else:
            written[str(out)] = text
        for key, body in extra.items():
            written[str(extra_paths[key])] = body
        outputs = sorted(written)
        for path, body in written.items():
            _atomic_write(Path(path), body)
        for path in outputs:
            _atomic_write(Path(path + ".manifest.json"),
                          _manifest(args, argv, config, outputs, started))
        if out is not None and args.command == "verify":
            report = json.loads(text)
            status = "PASS" if report["passed"] else "FAIL"
            print(f"{report['suite']}: {status}")
    except OSError as exc:
        print(f"ostat: error writing output: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
