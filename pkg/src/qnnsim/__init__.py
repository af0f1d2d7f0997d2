"""Classical simulation of a product-of-sines quantum neural network classifier."""
from .data import Dataset, DataError, load_csv, stratified_split
from .encoding import FeatureStats, compute_stats, encode_feature, encode_sample
from .harness import ExperimentConfig, compare_runs, evaluate, run_experiment
from .kernels import BACKEND
from .mlp import MlpNetwork, mlp_train
from .qnn import QnnNetwork, backward, decode_class, forward, neuron_forward, train
from .statevec import StateVector, neuron_oracle

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Dataset", "DataError", "ExperimentConfig", "FeatureStats", "MlpNetwork",
    "QnnNetwork", "StateVector", "backward", "compare_runs", "compute_stats", "decode_class",
    "encode_feature", "encode_sample", "evaluate", "forward", "load_csv", "mlp_train",
    "neuron_forward", "neuron_oracle", "run_experiment", "stratified_split", "train",
]
