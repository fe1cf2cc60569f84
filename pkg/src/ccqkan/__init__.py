"""Statevector simulation and experiment harness for Chebyshev quantum KANs
with merged amplitude encoding."""

__version__ = "0.1.0"

from .chebyshev import cheb_basis, cheb_eval
from .data import load_digits, synthetic_dataset
from .experiments import GridSpec, MnistSpec, run_grid, run_mnist_binary, run_mnist_ova, summarize
from .network import (
    MERGED,
    SEQUENTIAL,
    NetworkConfig,
    NetworkParams,
    ResourceReport,
    executions_per_grad_step,
    forward,
    forward_batch,
    param_count,
    resources,
)
from .statevector import EvalCondition, encode, overlap, uniform_overlap
from .stats import WilcoxonResult, wilcoxon
from .training import TrainConfig, init_params, train, transfer_params

__all__ = [
    "MERGED",
    "SEQUENTIAL",
    "EvalCondition",
    "GridSpec",
    "MnistSpec",
    "NetworkConfig",
    "NetworkParams",
    "ResourceReport",
    "TrainConfig",
    "WilcoxonResult",
    "cheb_basis",
    "cheb_eval",
    "encode",
    "executions_per_grad_step",
    "forward",
    "forward_batch",
    "init_params",
    "load_digits",
    "overlap",
    "param_count",
    "resources",
    "run_grid",
    "run_mnist_binary",
    "run_mnist_ova",
    "summarize",
    "synthetic_dataset",
    "train",
    "transfer_params",
    "uniform_overlap",
    "wilcoxon",
]
