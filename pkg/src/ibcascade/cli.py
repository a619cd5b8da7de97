"""Command-line entry point.

Subcommands: ``synth`` (generate a dataset), ``run`` (full experiment),
``summarize`` (re-aggregate a runs table), ``validate`` (preset checks).
Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime error.

A config file (``--config``) holds flat ``key = value`` lines with ``#``
comments; command-line flags override it. Keys mirror the long flag names
(see README for the schema).
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .balance import Params
from .errors import ConfigError, DataError, IbcascadeError
from .experiment import (
    GAMMA_GRID,
    THETA_GRID,
    ExperimentConfig,
    run_experiment,
    summarize_file,
)
from .ingest import parse_transactions, write_transactions
from .nullmodel import NullModelKind
from .synth import PRESETS, MarketPreset, generate_market, get_preset, validate_against_preset

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as ConfigError (exit code 1)."""

    def error(self, message):
        raise ConfigError(message)


def _float_list(text: str, sweep: tuple[float, ...]) -> tuple[float, ...]:
    if text.strip() == "sweep":
        return sweep
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated float list, got {text!r}") from exc


def _kind_list(text: str) -> tuple[NullModelKind, ...]:
    if text.strip() == "all":
        return tuple(NullModelKind)
    return tuple(NullModelKind.from_label(part.strip()) for part in text.split(",") if part.strip())


def read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="ibcascade", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="generate a synthetic transaction file")
    synth.add_argument("--preset", required=True, choices=sorted(PRESETS))
    synth.add_argument("--out", required=True, help="output transaction file")
    synth.add_argument("--seed", type=int, default=None, help="override the preset seed")
    synth.add_argument("--days", type=int, default=None, help="override the preset day count")
    synth.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any preset field (repeatable)")

    run = sub.add_parser("run", help="run the full experiment matrix")
    run.add_argument("--config", default=None, help="config file with key = value lines")
    run.add_argument("--input", default=None, help="transaction file to simulate")
    run.add_argument("--preset", default=None, choices=sorted(PRESETS))
    run.add_argument("--days", type=int, default=None)
    run.add_argument("--gamma", default=None, help="comma list or 'sweep'")
    run.add_argument("--theta", default=None, help="comma list or 'sweep'")
    run.add_argument("--baseline-gamma", type=float, default=None)
    run.add_argument("--baseline-theta", type=float, default=None)
    run.add_argument("--null-models", default=None,
                     help="comma list of kinds or 'all' "
                          f"({', '.join(k.value for k in NullModelKind)})")
    run.add_argument("--replicates", type=int, default=None)
    run.add_argument("--threshold", default=None, help="comma list of cascade thresholds")
    run.add_argument("--seed", type=int, default=None, help="master seed")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--measure", choices=("nodes", "lending"), default=None)
    run.add_argument("--no-victim-curves", action="store_true")

    summ = sub.add_parser("summarize", help="re-aggregate a runs.csv table")
    summ.add_argument("--input", required=True, help="runs.csv from a previous run")
    summ.add_argument("--measure", choices=("nodes", "lending"), default="nodes")
    summ.add_argument("--out", required=True, help="output summary file")

    val = sub.add_parser("validate", help="check a dataset against preset statistics")
    val.add_argument("--preset", required=True, choices=sorted(PRESETS))
    val.add_argument("--input", default=None,
                     help="transaction file to check (default: self-check a generated one)")
    val.add_argument("--seed", type=int, default=None)
    val.add_argument("--days", type=int, default=None)

    return parser


def _preset_overrides(args) -> dict:
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.days is not None:
        overrides["n_days"] = args.days
    field_types = {f.name: f.type for f in dataclasses.fields(MarketPreset)}
    for item in getattr(args, "set", []):
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in field_types or key == "name":
            raise ConfigError(f"unknown preset field {key!r}")
        caster = int if field_types[key] in ("int", int) else float
        try:
            overrides[key] = caster(value.strip())
        except ValueError as exc:
            raise ConfigError(f"bad value for preset field {key!r}: {value!r}") from exc
    return overrides


def _cmd_synth(args) -> int:
    preset = get_preset(args.preset, **_preset_overrides(args))
    txs = generate_market(preset)
    write_transactions(args.out, txs)
    log.info("wrote %d transactions to %s", len(txs), args.out)
    return 0


def _setting(args, file_cfg: dict[str, str], key: str, default):
    """Flag > config file > default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    return file_cfg.get(key, default)


def _cmd_run(args) -> int:
    file_cfg = read_config_file(args.config) if args.config else {}

    gamma_text = _setting(args, file_cfg, "gamma", "")
    theta_text = _setting(args, file_cfg, "theta", "")
    kinds_text = _setting(args, file_cfg, "null_models", "empirical")
    thresholds_text = _setting(args, file_cfg, "threshold", "0.05")
    days = _setting(args, file_cfg, "days", None)
    if args.no_victim_curves:
        victim = False
    else:
        victim = _as_bool(file_cfg.get("victim_curves", "true"))

    cfg = ExperimentConfig(
        input_path=_setting(args, file_cfg, "input", None),
        preset=_setting(args, file_cfg, "preset", None),
        days=int(days) if days is not None else None,
        params=Params(
            theta=float(_setting(args, file_cfg, "baseline_theta", 0.2)),
            gamma=float(_setting(args, file_cfg, "baseline_gamma", 0.05)),
        ),
        gamma_grid=_float_list(str(gamma_text), GAMMA_GRID) if gamma_text else (),
        theta_grid=_float_list(str(theta_text), THETA_GRID) if theta_text else (),
        null_kinds=_kind_list(str(kinds_text)),
        replicates=int(_setting(args, file_cfg, "replicates", 20)),
        thresholds=_float_list(str(thresholds_text), (0.05,)),
        master_seed=int(_setting(args, file_cfg, "seed", 0)),
        out_dir=str(_setting(args, file_cfg, "out", "out")),
        workers=int(_setting(args, file_cfg, "workers", 1)),
        measure=str(_setting(args, file_cfg, "measure", "nodes")),
        victim_curves=victim,
    )
    manifest = run_experiment(cfg)
    log.info("wrote %d records over %d days to %s",
             manifest["n_records"], manifest["n_days"], cfg.out_dir)
    return 0


def _as_bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _cmd_summarize(args) -> int:
    summarize_file(args.input, args.measure, args.out)
    return 0


def _cmd_validate(args) -> int:
    preset = get_preset(args.preset, **_preset_overrides(args))
    if args.input:
        with open(args.input, encoding="utf-8", newline="") as fh:
            txs = parse_transactions(fh)
    else:
        txs = generate_market(preset)
    report = validate_against_preset(txs, preset)
    print(f"preset {report.preset}")
    for check in report.checks:
        status = "pass" if check.passed else "FAIL"
        print(f"  {check.statistic:<8} target {check.target:>10.1f} +- {check.tolerance:<8.1f}"
              f" observed {check.observed:>12.2f}  {status}")
    return 0 if report.passed else 2


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "synth": _cmd_synth,
            "run": _cmd_run,
            "summarize": _cmd_summarize,
            "validate": _cmd_validate,
        }[args.command]
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except IbcascadeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
