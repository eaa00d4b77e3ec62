"""
The `sgbench` package holds everything around the solvers: the synthetic benchmark generator, the
evaluation statistics, the support-recovery comparison, the tab-separated file formats and the
`sgsvd` command line.
"""

from sgbench.simulate import SignMode, SimSpec, GroundTruth, Dataset, gen_dataset, gamma_grid, make_rng
from sgbench.evaluate import (
    SupportMetrics,
    ModuleEnrichment,
    support_metrics,
    fc_score,
    hypergeom_right_tail,
    edge_enrichment,
    enrichment_fractions,
    module_correlation_excess,
)
from sgbench.benchmark import RecoveryRow, run_recovery_benchmark
