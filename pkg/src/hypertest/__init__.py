"""Community-structure hypothesis tests for uniform and nonuniform hypergraphs.

Modules: hypercore (representation), genmodel (samplers), motifs (exact
census and empirical densities), stats (statistics, estimators,
classifier), simlab (Monte Carlo harness), ingest (file I/O), cli.
"""

__version__ = "0.1.0"

from .hypercore import Hypergraph, NonuniformHypergraph, canonicalize_hyperedge
from .genmodel import (
    CommunityDistribution,
    LayerSpec,
    WeightLaw,
    matched_null_probability,
    sample_labels,
    sample_nonuniform,
    sample_uniform_er,
    sample_uniform_hsbm,
)
from .motifs import (
    EmpiricalDensities,
    MotifCounts,
    census,
    count_hypertriangles,
    count_hypervees,
    count_loose_cycles,
    empirical_evt,
    tensor_sum_oracle,
)
from .stats import (
    CombinedTestReport,
    CycleTestReport,
    DenseRegimeParams,
    DenseTestReport,
    EstimateReport,
    RegimeVerdict,
    SparseRegimeParams,
    combined_test,
    contiguity_constants,
    cycle_null_moments,
    cycle_test,
    dense_test,
    estimate_ab,
    lambda_m,
    normal_quantile,
    optimal_weights,
    regime_classify,
    select_kn,
    snr_kappa,
    suggest_overlap,
    theoretical_evt,
    trace_m0_power,
)
from .simlab import (
    LayerConfig,
    SimConfig,
    SimResult,
    emit_csv,
    load_config,
    run_experiment,
    run_grid,
    solve_rate_ratio,
)

__all__ = [name for name in dir() if not name.startswith("_")]
