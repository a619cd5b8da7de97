"""Experiment driver: days x null models x parameter grids x seed banks.

Every eligible simulation becomes one flat RunRecord; aggregate tables are
derived from those records only, so any figure can be rebuilt from runs.csv.
Output bytes are a pure function of the configuration: randomness is split
off the master seed per (purpose, day, kind, replicate), worker results are
consumed in day order, and rows are sorted on write.

Seed splitting rule: a 64-bit stream seed is
``SeedSequence([master_seed, purpose, *key]).generate_state(1)`` with purpose
0 for dataset generation and 1 for null-model generation, and key
``(day_index, kind_ordinal, replicate)`` for null models.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import warnings
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .balance import Params
from .cascade import run_cascade
from .centrality import BinnedStatistic, bin_cascades, centrality_profiles
from .errors import ConfigError, DataError
from .ingest import ActivityHistory, build_daily_networks, parse_transactions
from .network import DailyNetwork
from .nullmodel import NullModelKind, PartialRewireWarning, generate, rebuild_sheets
from .synth import PRESETS, generate_market, get_preset

log = logging.getLogger(__name__)

#: sweep grids for the parameter-sensitivity and deviation analyses
GAMMA_GRID = (0.01, 0.02, 0.03, 0.04, 0.05, 0.07, 0.10)
THETA_GRID = (0.1, 0.2, 0.3, 0.4, 0.5)

_KIND_ORDER = {kind: i for i, kind in enumerate(NullModelKind)}

RUNS_HEADER = (
    "date", "kind", "replicate", "seed_bank", "gamma", "theta",
    "initial_shock", "defaulted_count", "node_fraction", "lending_loss",
    "loss_fraction", "rounds", "seed_in_degree", "seed_out_degree",
    "seed_closeness", "seed_core_number",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved description of one experiment run."""

    input_path: str | None = None
    preset: str | None = None
    days: int | None = None  # preset n_days override
    params: Params = field(default_factory=Params)
    gamma_grid: tuple[float, ...] = ()
    theta_grid: tuple[float, ...] = ()
    null_kinds: tuple[NullModelKind, ...] = (NullModelKind.EMPIRICAL,)
    replicates: int = 20
    thresholds: tuple[float, ...] = (0.05,)
    master_seed: int = 0
    out_dir: str = "out"
    workers: int = 1
    measure: str = "nodes"
    victim_curves: bool = True

    def __post_init__(self):
        if (self.input_path is None) == (self.preset is None):
            raise ConfigError("exactly one of input_path or preset is required")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.measure not in ("nodes", "lending"):
            raise ConfigError(f"measure must be nodes or lending, got {self.measure!r}")
        if len(set(self.null_kinds)) != len(self.null_kinds) or not self.null_kinds:
            raise ConfigError("null_kinds must be a non-empty list without duplicates")
        for t in self.thresholds:
            if not (0.0 < t < 1.0):
                raise ConfigError(f"thresholds must lie in (0, 1), got {t}")
        if not self.thresholds:
            raise ConfigError("at least one threshold is required")
        for g in (*self.gamma_grid, *self.theta_grid):
            if not (0.0 < g < 1.0):
                raise ConfigError(f"grid values must lie in (0, 1), got {g}")

    @property
    def gammas(self) -> tuple[float, ...]:
        """Gamma grid, always including the baseline value, sorted."""
        return tuple(sorted(set(self.gamma_grid) | {self.params.gamma}))

    @property
    def thetas(self) -> tuple[float, ...]:
        return tuple(sorted(set(self.theta_grid) | {self.params.theta}))


@dataclass(frozen=True)
class RunRecord:
    """One flat simulation outcome row; (date, kind, replicate, seed_bank,
    gamma, theta) is unique within a run."""

    date: dt.date
    kind: NullModelKind
    replicate: int
    seed_bank: int
    gamma: float
    theta: float
    initial_shock: float
    defaulted_count: int
    node_fraction: float
    lending_loss: float
    loss_fraction: float
    rounds: int
    seed_in_degree: int
    seed_out_degree: int
    seed_closeness: float
    seed_core_number: int

    def to_row(self) -> list[str]:
        return [
            self.date.isoformat(), self.kind.value, str(self.replicate),
            str(self.seed_bank), str(self.gamma), str(self.theta),
            str(self.initial_shock), str(self.defaulted_count),
            str(self.node_fraction), str(self.lending_loss),
            str(self.loss_fraction), str(self.rounds),
            str(self.seed_in_degree), str(self.seed_out_degree),
            str(self.seed_closeness), str(self.seed_core_number),
        ]


def stream_seed(master_seed: int, purpose: int, *key: int) -> int:
    """64-bit seed for one generator, split deterministically off the master."""
    seq = np.random.SeedSequence([master_seed, purpose, *key])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


# -- per-day simulation ----------------------------------------------------


@dataclass
class _DayTask:
    day_index: int
    net: DailyNetwork
    rolling_tv: dict[int, float]
    cfg: ExperimentConfig


@dataclass
class _DayResult:
    records: list[RunRecord]
    daily_rows: list[dict]
    seed_samples: list  # (profile, CascadeResult) at the empirical baseline
    victim_stats: dict[str, BinnedStatistic]
    ineligible: int
    partial_rewires: int


_VICTIM_AXES = ("in_degree", "out_degree", "closeness", "core_number")


def _simulate_day(task: _DayTask) -> _DayResult:
    cfg = task.cfg
    net = task.net
    records: list[RunRecord] = []
    daily_rows: list[dict] = []
    seed_samples: list = []
    victim_samples: list = []
    ineligible = 0
    partial_rewires = 0
    baseline = (cfg.params.gamma, cfg.params.theta)

    for kind in cfg.null_kinds:
        reps = 1 if kind is NullModelKind.EMPIRICAL else cfg.replicates
        stats: dict[tuple[float, float], dict] = {
            (g, t): _new_day_stats(cfg) for g in cfg.gammas for t in cfg.thetas
        }
        for rep in range(reps):
            null_net, was_partial = _generate_replicate(task, kind, rep)
            partial_rewires += was_partial
            profiles = centrality_profiles(null_net)
            eligible = [b for b in null_net.nodes if null_net.in_degree(b) >= 1]
            for gamma in cfg.gammas:
                for theta in cfg.thetas:
                    params = Params(theta=theta, gamma=gamma)
                    sheets = rebuild_sheets(
                        null_net, params, kind, rolling_tv=task.rolling_tv, clamp=True
                    )
                    ineligible += null_net.n_nodes - len(eligible)
                    is_baseline = (gamma, theta) == baseline
                    stat = stats[(gamma, theta)]
                    for seed_bank in eligible:
                        result = run_cascade(null_net, sheets, seed_bank, params)
                        profile = profiles[seed_bank]
                        records.append(RunRecord(
                            date=net.date, kind=kind, replicate=rep,
                            seed_bank=seed_bank, gamma=gamma, theta=theta,
                            initial_shock=result.initial_shock,
                            defaulted_count=result.defaulted_count,
                            node_fraction=result.node_fraction,
                            lending_loss=result.lending_loss,
                            loss_fraction=result.loss_fraction,
                            rounds=result.rounds,
                            seed_in_degree=profile.in_degree,
                            seed_out_degree=profile.out_degree,
                            seed_closeness=profile.closeness,
                            seed_core_number=profile.core_number,
                        ))
                        _accumulate_day_stats(stat, result, cfg.thresholds)
                        if is_baseline and kind is NullModelKind.EMPIRICAL:
                            seed_samples.append((profile, result))
                            if cfg.victim_curves:
                                fell = set(result.defaulted_banks)
                                for bank in null_net.nodes:
                                    if bank != seed_bank:
                                        victim_samples.append(
                                            (profiles[bank], bank in fell)
                                        )
        for (gamma, theta), stat in sorted(stats.items()):
            daily_rows.append(_finish_day_stats(
                stat, net, kind, gamma, theta, cfg.thresholds
            ))

    victim_stats = {}
    if victim_samples:
        for axis in _VICTIM_AXES:
            victim_stats[axis] = bin_cascades(victim_samples, (axis,))
    return _DayResult(records, daily_rows, seed_samples, victim_stats,
                      ineligible, partial_rewires)


def _generate_replicate(task: _DayTask, kind: NullModelKind, rep: int):
    """One null network; degenerate rewiring inputs fall back to the identity."""
    cfg = task.cfg
    if kind is NullModelKind.REWIRED and task.net.n_edges < 2:
        return task.net, 1
    seed = stream_seed(cfg.master_seed, 1, task.day_index, _KIND_ORDER[kind], rep)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PartialRewireWarning)
        null_net = generate(task.net, kind, seed)
    partial = sum(1 for w in caught if isinstance(w.message, PartialRewireWarning))
    return null_net, partial


def _new_day_stats(cfg: ExperimentConfig) -> dict:
    return {
        "runs": 0,
        "knockons": 0,
        "sum_nodes": 0.0,
        "sum_lending": 0.0,
        "over_nodes": [0] * len(cfg.thresholds),
        "over_lending": [0] * len(cfg.thresholds),
    }


def _accumulate_day_stats(stat: dict, result, thresholds: Sequence[float]) -> None:
    stat["runs"] += 1
    stat["knockons"] += 1 if result.defaulted_count >= 1 else 0
    stat["sum_nodes"] += result.node_fraction
    stat["sum_lending"] += result.loss_fraction
    for i, t in enumerate(thresholds):
        stat["over_nodes"][i] += 1 if result.node_fraction > t else 0
        stat["over_lending"][i] += 1 if result.loss_fraction > t else 0


def _finish_day_stats(stat, net, kind, gamma, theta, thresholds) -> dict:
    runs = stat["runs"]
    row = {
        "date": net.date.isoformat(),
        "kind": kind.value,
        "gamma": gamma,
        "theta": theta,
        "n_nodes": net.n_nodes,
        "n_edges": net.n_edges,
        "runs": runs,
        "knockon_share": stat["knockons"] / runs if runs else 0.0,
        "mean_node_fraction": stat["sum_nodes"] / runs if runs else 0.0,
        "mean_loss_fraction": stat["sum_lending"] / runs if runs else 0.0,
    }
    for i, t in enumerate(thresholds):
        row[f"share_nodes_gt_{t}"] = stat["over_nodes"][i] / runs if runs else 0.0
        row[f"share_lending_gt_{t}"] = stat["over_lending"][i] / runs if runs else 0.0
    return row


# -- the driver ------------------------------------------------------------


def load_dataset(cfg: ExperimentConfig):
    """Transactions either parsed from the input file or generated from the
    preset (seeded off the master seed so reruns see identical data)."""
    if cfg.input_path is not None:
        with open(cfg.input_path, encoding="utf-8", newline="") as fh:
            return parse_transactions(fh)
    overrides: dict = {"seed": stream_seed(cfg.master_seed, 0)}
    if cfg.days is not None:
        overrides["n_days"] = cfg.days
    return generate_market(get_preset(cfg.preset, **overrides))


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run the whole matrix and write every output table; returns the manifest."""
    out_dir = Path(cfg.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {cfg.out_dir!r} is not writable: {exc}") from exc

    txs = load_dataset(cfg)
    if not txs:
        raise DataError("dataset contains no transactions")
    history = ActivityHistory.from_transactions(txs)
    nets = build_daily_networks(txs)
    tasks = []
    for day_index, net in enumerate(nets):
        tv = {b: history.rolling_volume(b, net.date) for b in net.nodes}
        tasks.append(_DayTask(day_index, net, tv, cfg))

    records: list[RunRecord] = []
    daily_rows: list[dict] = []
    seed_samples: list = []
    victim_stats: dict[str, BinnedStatistic] = {}
    ineligible = 0
    partial_rewires = 0

    if cfg.workers > 1:
        pool = Pool(cfg.workers)
        try:
            results = pool.imap(_simulate_day, tasks, chunksize=1)
            merged = _merge_days(results, records, daily_rows, seed_samples, victim_stats)
        finally:
            pool.close()
            pool.join()
    else:
        merged = _merge_days(map(_simulate_day, tasks), records, daily_rows,
                             seed_samples, victim_stats)
    ineligible, partial_rewires = merged

    records.sort(key=lambda r: (
        r.date, _KIND_ORDER[r.kind], r.replicate, r.gamma, r.theta, r.seed_bank
    ))
    daily_rows.sort(key=lambda row: (
        row["date"], _KIND_ORDER[NullModelKind.from_label(row["kind"])],
        row["gamma"], row["theta"],
    ))

    outputs: dict[str, str] = {}
    _write_runs(out_dir / "runs.csv", records, outputs)
    _write_daily(out_dir / "daily.csv", daily_rows, cfg, outputs)
    for measure in ("nodes", "lending"):
        table = summarize_records(records, measure)
        _write_table(out_dir / f"summary_{measure}.csv", table, outputs)
    _write_table(out_dir / "nullmodel_comparison.csv",
                 _nullmodel_comparison(daily_rows, cfg), outputs)
    _write_table(out_dir / "gamma_deviation.csv",
                 _gamma_deviation(records, cfg), outputs)
    if seed_samples:
        _write_table(out_dir / "shock_response.csv",
                     _shock_response(seed_samples), outputs)
        _write_table(out_dir / "seed_degree_heatmap.csv", _heatmap_rows(
            bin_cascades(seed_samples, ("in_degree", "out_degree")),
            ("in_degree", "out_degree")), outputs)
        _write_table(out_dir / "seed_shock_heatmap.csv", _heatmap_rows(
            bin_cascades(seed_samples, ("in_degree", "shock")),
            ("in_degree", "shock_bin")), outputs)
        _write_table(out_dir / "seed_core.csv", _heatmap_rows(
            bin_cascades(seed_samples, ("core_number",)), ("core_number",),
            with_se=True), outputs)
    if victim_stats:
        _write_table(out_dir / "victim_curves.csv",
                     _victim_rows(victim_stats), outputs)

    manifest = {
        "config": _config_echo(cfg),
        "n_days": len(nets),
        "n_records": len(records),
        "ineligible_seeds": ineligible,
        "partial_rewires": partial_rewires,
        "outputs": sorted(outputs),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest


def _merge_days(results, records, daily_rows, seed_samples, victim_stats):
    ineligible = 0
    partial_rewires = 0
    for day_index, day in enumerate(results):
        records.extend(day.records)
        daily_rows.extend(day.daily_rows)
        seed_samples.extend(day.seed_samples)
        for axis, stat in day.victim_stats.items():
            if axis in victim_stats:
                victim_stats[axis].merge(stat)
            else:
                victim_stats[axis] = stat
        ineligible += day.ineligible
        partial_rewires += day.partial_rewires
        if day_index % 50 == 49:
            log.info("simulated %d days", day_index + 1)
    return ineligible, partial_rewires


def _config_echo(cfg: ExperimentConfig) -> dict:
    return {
        "input_path": cfg.input_path,
        "preset": cfg.preset,
        "days": cfg.days,
        "gamma": cfg.params.gamma,
        "theta": cfg.params.theta,
        "gamma_grid": list(cfg.gammas),
        "theta_grid": list(cfg.thetas),
        "null_kinds": [k.value for k in cfg.null_kinds],
        "replicates": cfg.replicates,
        "thresholds": list(cfg.thresholds),
        "master_seed": cfg.master_seed,
        "out_dir": cfg.out_dir,
        "workers": cfg.workers,
        "measure": cfg.measure,
        "victim_curves": cfg.victim_curves,
    }


# -- aggregate tables --------------------------------------------------------


def _quantile(sorted_values: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile of presorted data."""
    n = len(sorted_values)
    if n == 1:
        return sorted_values[0]
    pos = q * (n - 1)
    lo = int(pos)
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return sorted_values[lo] + (sorted_values[hi] - sorted_values[lo]) * frac


def _mean_se(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, (var / n) ** 0.5


def summarize_records(records: Iterable[RunRecord], measure: str) -> list[dict]:
    """Per (kind, gamma, theta): location/spread of cascade size plus the
    ratio against the empirical mean at the same grid point."""
    if measure not in ("nodes", "lending"):
        raise ConfigError(f"measure must be nodes or lending, got {measure!r}")
    groups: dict[tuple, list[float]] = {}
    for r in records:
        value = r.node_fraction if measure == "nodes" else r.loss_fraction
        groups.setdefault((r.kind.value, r.gamma, r.theta), []).append(value)
    if not groups:
        raise DataError("no run records to summarize")
    table = []
    for key in sorted(groups, key=lambda k: (_KIND_ORDER[NullModelKind.from_label(k[0])], k[1], k[2])):
        kind, gamma, theta = key
        values = groups[key]
        mean, se = _mean_se(values)
        ordered = sorted(values)
        row = {
            "kind": kind, "gamma": gamma, "theta": theta, "runs": len(values),
            "mean": mean, "median": _quantile(ordered, 0.5),
            "q1": _quantile(ordered, 0.25), "q3": _quantile(ordered, 0.75),
            "se": se,
        }
        emp = groups.get((NullModelKind.EMPIRICAL.value, gamma, theta))
        if emp is None:
            row["ratio_vs_empirical"] = ""
            row["zero_flag"] = ""
        else:
            emp_mean = sum(emp) / len(emp)
            if emp_mean == 0.0:
                row["ratio_vs_empirical"] = 1.0
                row["zero_flag"] = 1
            else:
                row["ratio_vs_empirical"] = mean / emp_mean
                row["zero_flag"] = 0
        table.append(row)
    return table


def _nullmodel_comparison(daily_rows: list[dict], cfg: ExperimentConfig) -> list[dict]:
    """Across-day average of the per-day mean cascade size, by kind, at the
    baseline parameter point."""
    baseline = (cfg.params.gamma, cfg.params.theta)
    per_kind: dict[str, list[tuple[float, float]]] = {}
    for row in daily_rows:
        if (row["gamma"], row["theta"]) != baseline or row["runs"] == 0:
            continue
        per_kind.setdefault(row["kind"], []).append(
            (row["mean_node_fraction"], row["mean_loss_fraction"])
        )
    emp = per_kind.get(NullModelKind.EMPIRICAL.value)
    emp_nodes = sum(v[0] for v in emp) / len(emp) if emp else None
    emp_lending = sum(v[1] for v in emp) / len(emp) if emp else None
    table = []
    for kind in sorted(per_kind, key=lambda k: _KIND_ORDER[NullModelKind.from_label(k)]):
        values = per_kind[kind]
        nodes = sum(v[0] for v in values) / len(values)
        lending = sum(v[1] for v in values) / len(values)
        table.append({
            "kind": kind,
            "n_days": len(values),
            "mean_daily_nodes": nodes,
            "ratio_nodes": nodes / emp_nodes if emp_nodes else "",
            "mean_daily_lending": lending,
            "ratio_lending": lending / emp_lending if emp_lending else "",
        })
    return table


def _gamma_deviation(records: list[RunRecord], cfg: ExperimentConfig) -> list[dict]:
    """Mean cascade size and deviation from empirical per (kind, gamma), at
    the baseline theta, for both measures."""
    theta = cfg.params.theta
    groups: dict[tuple[str, float], tuple[list[float], list[float]]] = {}
    for r in records:
        if r.theta != theta:
            continue
        nodes, lending = groups.setdefault((r.kind.value, r.gamma), ([], []))
        nodes.append(r.node_fraction)
        lending.append(r.loss_fraction)
    table = []
    for (kind, gamma) in sorted(groups, key=lambda k: (_KIND_ORDER[NullModelKind.from_label(k[0])], k[1])):
        nodes, lending = groups[(kind, gamma)]
        mean_n, se_n = _mean_se(nodes)
        mean_l, se_l = _mean_se(lending)
        row = {
            "kind": kind, "gamma": gamma, "theta": theta, "runs": len(nodes),
            "mean_nodes": mean_n, "se_nodes": se_n,
            "mean_lending": mean_l, "se_lending": se_l,
        }
        emp = groups.get((NullModelKind.EMPIRICAL.value, gamma))
        for label, mean in (("nodes", mean_n), ("lending", mean_l)):
            if emp is None:
                row[f"ratio_{label}"] = ""
                continue
            values = emp[0] if label == "nodes" else emp[1]
            emp_mean = sum(values) / len(values)
            row[f"ratio_{label}"] = mean / emp_mean if emp_mean else 1.0
        table.append(row)
    return table


def _shock_response(seed_samples: list) -> list[dict]:
    by_nodes = bin_cascades(seed_samples, ("shock",), measure="nodes")
    by_lending = bin_cascades(seed_samples, ("shock",), measure="lending")
    table = []
    for key, cell in by_nodes.cells():
        lending_cell = by_lending.cell(key)
        table.append({
            "shock_bin": key[0],
            "count": cell.count,
            "mean_node_fraction": cell.mean,
            "se_node_fraction": cell.se,
            "mean_loss_fraction": lending_cell.mean,
            "se_loss_fraction": lending_cell.se,
        })
    return table


def _heatmap_rows(stat: BinnedStatistic, names: tuple[str, ...], with_se: bool = False) -> list[dict]:
    table = []
    for key, cell in stat.cells():
        row = dict(zip(names, key))
        row["count"] = cell.count
        row["mean_cascade"] = cell.mean
        if with_se:
            row["se"] = cell.se
        table.append(row)
    return table


def _victim_rows(victim_stats: Mapping[str, BinnedStatistic]) -> list[dict]:
    table = []
    for axis in _VICTIM_AXES:
        if axis not in victim_stats:
            continue
        for key, cell in victim_stats[axis].cells():
            table.append({
                "axis": axis,
                "bin": key[0],
                "count": cell.count,
                "p_default": cell.mean,
                "se": cell.se,
            })
    return table


# -- file writing ------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_runs(path: Path, records: list[RunRecord], outputs: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUNS_HEADER)
        for record in records:
            writer.writerow(record.to_row())
    outputs[path.name] = str(path)


def _write_daily(path: Path, rows: list[dict], cfg: ExperimentConfig, outputs: dict) -> None:
    header = [
        "date", "kind", "gamma", "theta", "n_nodes", "n_edges", "runs",
        "knockon_share", "mean_node_fraction", "mean_loss_fraction",
    ]
    for t in cfg.thresholds:
        header.append(f"share_nodes_gt_{t}")
        header.append(f"share_lending_gt_{t}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[col]) for col in header])
    outputs[path.name] = str(path)


def _write_table(path: Path, rows: list[dict], outputs: dict) -> None:
    if not rows:
        return
    header = list(rows[0])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[col]) for col in header])
    outputs[path.name] = str(path)


# -- re-aggregation from the raw table ---------------------------------------


def read_runs(path: str | Path) -> list[RunRecord]:
    """Parse a runs.csv written by run_experiment back into records."""
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != RUNS_HEADER:
            raise DataError(f"{path}: not a runs table (bad header)")
        for row in reader:
            records.append(RunRecord(
                date=dt.date.fromisoformat(row["date"]),
                kind=NullModelKind.from_label(row["kind"]),
                replicate=int(row["replicate"]),
                seed_bank=int(row["seed_bank"]),
                gamma=float(row["gamma"]),
                theta=float(row["theta"]),
                initial_shock=float(row["initial_shock"]),
                defaulted_count=int(row["defaulted_count"]),
                node_fraction=float(row["node_fraction"]),
                lending_loss=float(row["lending_loss"]),
                loss_fraction=float(row["loss_fraction"]),
                rounds=int(row["rounds"]),
                seed_in_degree=int(row["seed_in_degree"]),
                seed_out_degree=int(row["seed_out_degree"]),
                seed_closeness=float(row["seed_closeness"]),
                seed_core_number=int(row["seed_core_number"]),
            ))
    return records


def summarize_file(runs_path: str | Path, measure: str, out_path: str | Path) -> list[dict]:
    """CLI-facing re-aggregation: read runs.csv, write one summary table."""
    table = summarize_records(read_runs(runs_path), measure)
    outputs: dict = {}
    _write_table(Path(out_path), table, outputs)
    return table
