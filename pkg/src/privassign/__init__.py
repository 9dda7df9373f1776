"""Privacy-aware spatial task assignment under local differential privacy."""

from .baselines import BaselineKind, greedy, hungarian, max_weight_matching, run_variant
from .cea import Candidate, ExactComparator, PcfComparator, build_rank_matrix, resolve_conflicts
from .compare import EffectivePair, effective_pair, pcf, ppcf, utility_shift
from .core import (Instance, MatchState, Task, ValueFunctions, Worker, distance,
                   objective_value, true_utility)
from .harness import (ExperimentConfig, MetricsRow, compute_metrics, generate_normal,
                      generate_uniform, ingest_csv, run_config, run_sweep)
from .pgt import GameState, convergence_bound, epoa_bounds, run_pgt
from .privacy import BudgetError, BudgetPool, BudgetVector, LdpLedger, ldp_level, obfuscate
from .puce import (DCE, PDCE, PDCE_NPPCF, PUCE, PUCE_NPPCF, UCE, ConflictElimination,
                   SolverMode, run_puce)

__version__ = "0.1.0"

__all__ = [
    "BaselineKind", "greedy", "hungarian", "max_weight_matching", "run_variant",
    "Candidate", "ExactComparator", "PcfComparator", "build_rank_matrix", "resolve_conflicts",
    "EffectivePair", "effective_pair", "pcf", "ppcf", "utility_shift",
    "Instance", "MatchState", "Task", "ValueFunctions", "Worker", "distance",
    "objective_value", "true_utility",
    "ExperimentConfig", "MetricsRow", "compute_metrics", "generate_normal",
    "generate_uniform", "ingest_csv", "run_config", "run_sweep",
    "GameState", "convergence_bound", "epoa_bounds", "run_pgt",
    "BudgetError", "BudgetPool", "BudgetVector", "LdpLedger", "ldp_level", "obfuscate",
    "DCE", "PDCE", "PDCE_NPPCF", "PUCE", "PUCE_NPPCF", "UCE", "ConflictElimination",
    "SolverMode", "run_puce",
]
