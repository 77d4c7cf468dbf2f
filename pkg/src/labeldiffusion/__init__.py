"""Local graph clustering with noisy node labels.

Flow diffusion and l1-regularized PageRank run over a graph whose
cross-label edges are down-weighted, plus random graph generators,
closed-form recovery bounds and an experiment harness.
"""
from .classifier import (InsufficientSupport, LinearModel, predict_labels,
                         pseudo_label_pipeline, train_logistic)
from .flow import (DiffusionProblem, Embedding, InfeasibleDiffusion, LabelOracle,
                   NonConvergence, kkt_violation, qp_oracle, solve_flow_diffusion, support)
from .graph import Graph, build_graph, conductance, from_arrays, set_stats
from .labels import (LabelAccuracy, generate_noisy_labels, label_accuracy, labels_f1,
                     reweight)
from .models import ModelSpec, attributed_sbm, gamma, generate_local_model, generate_sbm
from .pagerank import (DegenerateSeed, PageRankConfig, PageRankResult, default_appr_config,
                       solve_appr)
from .sweep import sweep_cut
from .theory import (ModelParams, bounds_formal, bounds_simplified, conjecture_margins,
                     monte_carlo_verify)

__all__ = [
    "DegenerateSeed", "DiffusionProblem", "Embedding", "Graph", "InfeasibleDiffusion",
    "InsufficientSupport", "LabelAccuracy", "LabelOracle", "LinearModel", "ModelParams",
    "ModelSpec", "NonConvergence", "PageRankConfig", "PageRankResult", "attributed_sbm",
    "bounds_formal", "bounds_simplified", "build_graph", "conductance", "conjecture_margins",
    "default_appr_config", "from_arrays", "gamma", "generate_local_model",
    "generate_noisy_labels", "generate_sbm", "kkt_violation", "label_accuracy", "labels_f1",
    "monte_carlo_verify", "predict_labels", "pseudo_label_pipeline", "qp_oracle", "reweight",
    "set_stats", "solve_appr", "solve_flow_diffusion", "support", "sweep_cut",
    "train_logistic",
]
