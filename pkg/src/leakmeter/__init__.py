"""leakmeter: black-box secrecy-leakage estimation for randomized protocols.

Treats a protocol implementation as a noisy channel from secret inputs to
observable outputs, learns the conditional structure from sampled execution
traces, and reports the channel capacity (worst-case leakage in bits).
Exact analytic oracles for the dining-cryptographers and crowds protocols
provide ground truth for validating the statistical estimates.
"""

from .channel import (
    CapacityResult,
    Channel,
    NotRowSymmetricError,
    arimoto_blahut,
    capacity,
    is_row_symmetric,
    joint_from,
    load_channel,
    save_channel,
    symmetric_capacity,
)
from .infotheory import (
    AlphabetMismatchError,
    DiscreteDistribution,
    InvalidDistributionError,
    JointDistribution,
    conditional_entropy,
    empirical_distribution,
    empirical_joint,
    entropy,
    kl_divergence,
    mutual_information,
)
from .learn import (
    DependencyModel,
    EstimationResult,
    StructureLearningError,
    empirical_channel,
    estimate_capacity,
    fit_cpts,
    learn_structure,
    load_model,
    model_to_channel,
    save_model,
)
from .oracle import oracle_capacity, oracle_crowds_channel, oracle_dc_channel
from .simulate import (
    CrowdsConfig,
    DcConfig,
    kernel_backend,
    simulate_crowds,
    simulate_dc,
)
from .traces import TraceSet, read_traces, write_traces

__version__ = "0.1.0"

__all__ = [
    "AlphabetMismatchError",
    "CapacityResult",
    "Channel",
    "CrowdsConfig",
    "DcConfig",
    "DependencyModel",
    "DiscreteDistribution",
    "EstimationResult",
    "InvalidDistributionError",
    "JointDistribution",
    "NotRowSymmetricError",
    "StructureLearningError",
    "TraceSet",
    "arimoto_blahut",
    "capacity",
    "conditional_entropy",
    "empirical_channel",
    "empirical_distribution",
    "empirical_joint",
    "entropy",
    "estimate_capacity",
    "fit_cpts",
    "is_row_symmetric",
    "joint_from",
    "kernel_backend",
    "kl_divergence",
    "learn_structure",
    "load_channel",
    "load_model",
    "model_to_channel",
    "mutual_information",
    "oracle_capacity",
    "oracle_crowds_channel",
    "oracle_dc_channel",
    "read_traces",
    "save_channel",
    "save_model",
    "simulate_crowds",
    "simulate_dc",
    "symmetric_capacity",
    "write_traces",
]
