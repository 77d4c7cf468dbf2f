from .config import ExperimentConfig, config_from_dict, load_config
from .io import Dataset, DatasetError, load_dataset
from .metrics import Scores, cluster_scores
from .report import digest, summarize, to_csv, write_csv
from .runner import TheoryRecord, TrialRecord, run_experiment, run_theory, run_trial

__all__ = [
    "Dataset", "DatasetError", "ExperimentConfig", "Scores", "TheoryRecord", "TrialRecord",
    "cluster_scores", "config_from_dict", "digest", "load_config", "load_dataset",
    "run_experiment", "run_theory", "run_trial", "summarize", "to_csv", "write_csv",
]
