"""Command-line entry point: ``hlsub <subcommand> [options]``.

Exit codes: 0 success, 1 domain/resource/configuration error, 2 usage error,
3 verification found violations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any

from . import pnt_bounds, thresholds
from .errors import ConfigurationError, DomainError, HLSubError
from .logint import li
from .pnt_bounds import BoundId, Hypothesis
from .prime_engine import PrimeTable, build_prime_table, load_table, pi, save_table
from .verifier import scan_exceptions, verify_exhaustive

SUBCOMMANDS = ("pi", "li", "rbound", "threshold", "verify", "scan", "crossover")
FORMATS = ("json", "csv", "text")
EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    parameters: dict[str, Any] = field(default_factory=dict)
    output_format: str = "json"
    worker_count: int = 1

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigurationError(f"unknown subcommand {self.subcommand!r}")
        if self.output_format not in FORMATS:
            raise ConfigurationError(f"unknown output format {self.output_format!r}")
        if self.worker_count < 1:
            raise ConfigurationError("worker_count must be >= 1")


def _int_arg(text: str) -> int:
    """Integer that may be written in scientific notation, e.g. ``1e6``."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value != value.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def _positive_int(text: str) -> int:
    value = _int_arg(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _real_arg(text: str):
    """Exact int when the text is integral, float otherwise."""
    try:
        return _int_arg(text)
    except argparse.ArgumentTypeError:
        return float(text)


# ---------------------------------------------------------------------------
# output


def _plain(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _csv(rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        cells = {}
        for k, v in row.items():
            if isinstance(v, (list, dict)):
                v = json.dumps(v, sort_keys=True)
            elif isinstance(v, float):
                v = repr(v)
            cells[k] = v
        writer.writerow(cells)
    return buf.getvalue()


def render(payload: dict[str, Any], fmt: str, rows: list[dict[str, Any]] | None = None) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, allow_nan=False) + "\n"
    if fmt == "csv":
        return _csv(rows if rows else [payload])
    lines = []
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, (list, dict)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def _table(limit: int, params: dict[str, Any], workers: int) -> PrimeTable:
    cache = params.get("cache")
    if cache and Path(cache).exists():
        table = load_table(cache)
        if table.limit >= limit:
            return table
    table = build_prime_table(max(limit, 2), workers=workers)
    if cache:
        save_table(table, cache)
    return table


def _hypothesis(name: str | None) -> Hypothesis:
    if name is None:
        raise ConfigurationError("--hypothesis is required")
    return Hypothesis(name)


def _bound(params: dict[str, Any]) -> pnt_bounds.BoundSpec:
    spec = pnt_bounds.get_bound(params["bound"])
    changes = {"C": params.get("constant"), "x_min": params.get("x_min"), "t0": params.get("t0")}
    if any(v is not None for v in changes.values()):
        spec = spec.configure(**changes)
    return spec


def cmd_pi(cfg: RunConfig):
    x = cfg.parameters["x"]
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    table = _table(x, cfg.parameters, cfg.worker_count)
    return EXIT_OK, {"x": x, "pi": pi(table, x)}, None


def cmd_li(cfg: RunConfig):
    x = cfg.parameters["x"]
    value = li(x)
    return EXIT_OK, {"x": x, "li": value.value, "abs_err_bound": value.abs_err_bound}, None


def cmd_rbound(cfg: RunConfig):
    p = cfg.parameters
    if p.get("list"):
        if cfg.output_format == "json":
            entries = [
                {
                    "name": s.name,
                    "C": s.C,
                    "x_min": s.x_min,
                    "hypothesis": s.hypothesis.value,
                    "monotone_from": s.monotone_from,
                    "t0": s.t0,
                    "citation": s.citation,
                }
                for s in pnt_bounds.CATALOG.values()
            ]
            return EXIT_OK, {"bounds": entries}, entries
        return EXIT_OK, pnt_bounds.catalog_text(), None
    if not p.get("bound"):
        raise ConfigurationError("--bound is required unless --list is given")
    spec = _bound(p)
    if p.get("hypothesis"):
        pnt_bounds.check_admissible(spec, _hypothesis(p["hypothesis"]))
    if p.get("logx") is not None:
        log_x = float(p["logx"])
        x_out = None
    elif p.get("x") is not None:
        log_x = math.log(p["x"])
        x_out = p["x"]
    else:
        raise ConfigurationError("give --x or --logx")
    log_value = pnt_bounds.log_r_eval(spec, log_x)
    value = pnt_bounds.r_eval(spec, p["x"]) if x_out is not None else (math.exp(log_value) if log_value < 709 else None)
    return EXIT_OK, {"bound": spec.name, "x": x_out, "log_x": log_x, "log_value": log_value, "value": _plain(value)}, None


def cmd_threshold(cfg: RunConfig):
    p = cfg.parameters
    x, regime = p["x"], p["regime"]
    hyp = Hypothesis(p["hypothesis"]) if p.get("hypothesis") else None
    t0 = p.get("t0") or pnt_bounds.PLATT_TRUDGIAN_T0
    eps = p.get("epsilon")
    if regime in ("rh-epsilon", "udrescu") and eps is None:
        raise ConfigurationError(f"--epsilon is required for regime {regime}")
    if regime == "theorem1":
        if not p.get("bound"):
            raise ConfigurationError("--bound is required for regime theorem1")
        res = thresholds.theorem1_ymin(_bound(p), x, hyp)
    elif regime == "best":
        mty = None
        if p.get("constant") is not None:
            if p.get("x_min") is None:
                raise ConfigurationError("an mty constant also needs --x-min")
            mty = pnt_bounds.CATALOG[BoundId.MTY].configure(C=p["constant"], x_min=p["x_min"])
        res = thresholds.best_ymin(x, _hypothesis(p.get("hypothesis")), mty=mty, t0=t0)
    else:
        needs = {
            "rh-refined": Hypothesis.RH,
            "rh-epsilon": Hypothesis.RH,
            "partial-rh": Hypothesis.RH_TO_HEIGHT,
        }
        if hyp is Hypothesis.UNCONDITIONAL and regime in needs:
            raise ConfigurationError(f"regime {regime} is conditional; not admissible in an unconditional run")
        if hyp is Hypothesis.RH_TO_HEIGHT and needs.get(regime) is Hypothesis.RH:
            raise ConfigurationError(f"regime {regime} needs full RH")
        res = {
            "rh-refined": lambda: thresholds.rh_refined_ymin(x),
            "rh-epsilon": lambda: thresholds.rh_epsilon_ymin(x, eps),
            "partial-rh": lambda: thresholds.partial_rh_ymin(x, t0),
            "dusart": lambda: thresholds.dusart_ymin(x),
            "udrescu": lambda: thresholds.udrescu_ymin(x, eps),
            "mv-weak": lambda: thresholds.mv_weak_ymin(x),
        }[regime]()
    return EXIT_OK, res.to_dict(), None


def cmd_verify(cfg: RunConfig):
    p = cfg.parameters
    table = _table(p["smax"], p, cfg.worker_count)
    report = verify_exhaustive(table, p["smax"], p.get("reduction", False), workers=cfg.worker_count)
    return (EXIT_OK if report.ok else EXIT_VIOLATION), report.to_dict(), None


def cmd_scan(cfg: RunConfig):
    p = cfg.parameters
    hyp = _hypothesis(p.get("hypothesis"))
    table = _table(2 * p["X"], p, cfg.worker_count)
    res = scan_exceptions(table, p["X"], hyp, exhaustive=p.get("exhaustive", True), workers=cfg.worker_count)
    code = EXIT_VIOLATION if res.violating_pairs else EXIT_OK
    return code, res.to_dict(), None


def cmd_crossover(cfg: RunConfig):
    p = cfg.parameters
    lo, hi, n = p.get("lo", math.log(23)), p.get("hi", 1e12), p.get("samples", 200)
    if not (lo >= math.log(23) and hi > lo and n >= 2):
        raise DomainError("need log(23) <= lo < hi and samples >= 2")
    classical = pnt_bounds.CATALOG[BoundId.JY_CLASSICAL]
    vk = pnt_bounds.CATALOG[BoundId.JY_VK]
    ratio = (hi / lo) ** (1 / (n - 1))
    rows = []
    for k in range(n):
        L = lo * ratio**k
        a, b = pnt_bounds.log_r_eval(classical, L), pnt_bounds.log_r_eval(vk, L)
        rows.append({"log_x": L, "log_classical": a, "log_vk": b, "classical_le_vk": a <= b})
    payload = {"crossovers_log_x": pnt_bounds.crossover_points(lo, hi), "grid": rows}
    return EXIT_OK, payload, rows


HANDLERS = {
    "pi": cmd_pi,
    "li": cmd_li,
    "rbound": cmd_rbound,
    "threshold": cmd_threshold,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "crossover": cmd_crossover,
}


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one subcommand; returns (exit status, serialized output)."""
    try:
        config.validate()
        code, payload, rows = HANDLERS[config.subcommand](config)
    except (HLSubError, ValueError, OverflowError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "subcommand": config.subcommand}
        return EXIT_ERROR, json.dumps(err, sort_keys=True) + "\n"
    if isinstance(payload, str):
        return code, payload
    return code, render(payload, config.output_format, rows)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=FORMATS, default=None)
    common.add_argument("--workers", dest="worker_count", type=_positive_int, default=1)
    common.add_argument("--cache", help="binary prime-table cache file (read if present, written otherwise)")

    parser = argparse.ArgumentParser(prog="hlsub", description="Subadditivity of pi(x): bounds, thresholds, verification.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("pi", parents=[common], help="exact prime count pi(x)")
    p.add_argument("--x", type=_int_arg, required=True)

    p = sub.add_parser("li", parents=[common], help="li(x) = int_2^x du/log u")
    p.add_argument("--x", type=_real_arg, required=True)

    p = sub.add_parser("rbound", parents=[common], help="explicit PNT error bounds")
    p.add_argument("--list", action="store_true")
    p.add_argument("--bound", choices=[b.value for b in BoundId])
    p.add_argument("--x", type=_real_arg)
    p.add_argument("--logx", type=float)
    p.add_argument("--constant", type=float, help="implied constant (required for mty)")
    p.add_argument("--x-min", dest="x_min", type=_int_arg)
    p.add_argument("--t0", type=float)
    p.add_argument("--hypothesis", choices=[h.value for h in Hypothesis])

    p = sub.add_parser("threshold", parents=[common], help="proven lower bound for y")
    p.add_argument("--x", type=_int_arg, required=True)
    p.add_argument(
        "--regime",
        required=True,
        choices=[r.value for r in thresholds.Regime] + ["best"],
    )
    p.add_argument("--epsilon", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--bound", choices=[b.value for b in BoundId])
    p.add_argument("--constant", type=float, help="implied constant for mty")
    p.add_argument("--x-min", dest="x_min", type=_int_arg)
    p.add_argument("--hypothesis", choices=[h.value for h in Hypothesis])

    p = sub.add_parser("verify", parents=[common], help="exhaustive subadditivity check")
    p.add_argument("--smax", type=_int_arg, required=True)
    p.add_argument("--reduction", action="store_true")

    p = sub.add_parser("scan", parents=[common], help="exceptional-set scan")
    p.add_argument("--X", dest="X", type=_int_arg, required=True)
    p.add_argument("--hypothesis", choices=[h.value for h in Hypothesis], required=True)
    p.add_argument("--no-exhaustive", dest="exhaustive", action="store_false")

    p = sub.add_parser("crossover", parents=[common], help="classical vs Vinogradov-Korobov bound sweep")
    p.add_argument("--lo", type=float, help="smallest log x (default log 23)")
    p.add_argument("--hi", type=float, help="largest log x (default 1e12)")
    p.add_argument("--samples", type=_positive_int)
    return parser


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    sub = ns.pop("subcommand")
    fmt = ns.pop("output_format") or ("text" if sub == "rbound" and ns.get("list") else "json")
    workers = ns.pop("worker_count")
    params = {k: v for k, v in ns.items() if v is not None}
    return RunConfig(sub, params, fmt, workers)


def main(argv: list[str] | None = None) -> int:
    config = config_from_args(argv)
    code, text = run(config)
    stream = sys.stderr if code == EXIT_ERROR else sys.stdout
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
