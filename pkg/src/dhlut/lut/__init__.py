from .degeneration import (
    Partition,
    PatternWeights,
    all_partitions,
    contiguous_partitions,
    degenerate_table,
    enumerate_partitions,
    eta_metric,
    optimize_partition,
    optimize_shared_partition,
    pattern_weights,
)
from .io import load_table, save_table
from .tables import (
    BlockConfig,
    DhLut,
    FullLut,
    HLut,
    build_dhlut,
    compensate,
    table_size_report,
    train_full,
    train_hlut,
)
