"""Secrecy-oriented transmitter selection laboratory.

Simulates an underlay cognitive-radio small-cell downlink with unreliable
backhaul, implements the conventional optimal transmitter selection and its
secrecy outage probability, and trains five from-scratch classifiers (k-NN,
Gaussian naive Bayes, RBF-SVM, MLP, peephole LSTM) to replace the oracle.
"""

from .backhaul import active_set_probability, sample_backhaul
from .channel import (ChannelRealization, PowerSolution, sample_channels, secrecy_rate,
                      sinr, solve_secondary_power)
from .complexity import complexity_estimate, feedback_overhead
from .config import (ExperimentConfig, SystemConfig, TrainConfig, iid_config, inid_config,
                     load_experiment_config)
from .dataset import (Dataset, build_feature_matrix, generate_dataset, label_sample,
                      load_dataset, normalize, save_dataset)
from .learners import TrainedModel, train_model
from .metrics import MetricsReport, misclassification_report
from .selection import (SelectionOutcome, SopEstimate, policy_sop, select_optimal,
                        sop_decomposed, sop_direct)

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization", "Dataset", "ExperimentConfig", "MetricsReport",
    "PowerSolution", "SelectionOutcome", "SopEstimate", "SystemConfig",
    "TrainConfig", "TrainedModel",
    "active_set_probability", "build_feature_matrix", "complexity_estimate",
    "feedback_overhead", "generate_dataset", "iid_config", "inid_config",
    "label_sample", "load_dataset", "load_experiment_config",
    "misclassification_report", "normalize", "policy_sop", "sample_backhaul",
    "sample_channels", "save_dataset", "secrecy_rate", "select_optimal", "sinr",
    "solve_secondary_power", "sop_decomposed", "sop_direct", "train_model",
]
