"""Look-up-table compensation of transceiver nonlinearities for PS-64-QAM lanes."""

from .channel import DEFAULT_CHANNEL, ChannelModel, apply_channel, noise_sigma_for_snr
from .errors import (
    ConfigError,
    DegenerateDenominator,
    DhlutError,
    InvalidInput,
    InvalidParameter,
    IoError,
    OutOfRange,
)
from .lut import (
    BlockConfig,
    DhLut,
    FullLut,
    HLut,
    Partition,
    PatternWeights,
    build_dhlut,
    compensate,
    degenerate_table,
    eta_metric,
    load_table,
    optimize_partition,
    optimize_shared_partition,
    pattern_weights,
    save_table,
    table_size_report,
    train_full,
    train_hlut,
)
from .metrics import MetricReport, ber, decide_frame, evaluate, hard_decide, snr_db
from .shaping import (
    LEVELS,
    ShapingDistribution,
    SymbolFrame,
    entropy_bits,
    gray_decode,
    gray_encode,
    maxwell_boltzmann,
    sample_frame,
    solve_lambda,
)

__version__ = "0.1.0"
