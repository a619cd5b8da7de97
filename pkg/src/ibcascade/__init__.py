"""Interbank default-cascade simulation on daily netted loan networks."""

from .balance import BalanceSheet, Params, is_solvent, make_balance_sheet
from .cascade import (
    CascadeResult,
    CascadeState,
    classify_cascade,
    distribute_residual,
    run_cascade,
    seed_default,
)
from .centrality import (
    BinnedStatistic,
    CentralityProfile,
    bin_cascades,
    centrality_profiles,
    closeness,
    core_number,
)
from .errors import (
    BalanceSheetError,
    ConfigError,
    DataError,
    IbcascadeError,
    InvalidSeedError,
    RecordError,
    UndefinedHistoryError,
)
from .experiment import ExperimentConfig, RunRecord, run_experiment, summarize_records
from .ingest import (
    ActivityHistory,
    LoanTransaction,
    RecordFormat,
    build_daily_networks,
    parse_transactions,
    rolling_volume,
    write_transactions,
)
from .network import DailyNetwork, degrees, net_edges, weak_components
from .nullmodel import (
    NullModelKind,
    PartialRewireWarning,
    RewireConfig,
    fix_weights,
    randomize,
    randomize_fixed,
    rebuild_sheets,
    rewire,
)
from .synth import MarketPreset, PRESETS, generate_market, get_preset, validate_against_preset

__version__ = "0.1.0"
