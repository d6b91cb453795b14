"""Plug-in block entropy, the modified k-block code, and entropy-rate consistency experiments."""
from .codec import (
    Codebook,
    EncodedStream,
    build_codebook,
    code_length_bound,
    decode,
    encode,
    min_code_length,
)
from .empirical import (
    EmpiricalBlockDistribution,
    distinct_blocks,
    empirical_distribution,
    plug_in_entropy,
    variational_distance,
)
from .errors import ConfigError, DecodeError, ResourceError
from .exact import (
    block_entropy,
    conditional_block_entropy,
    exact_block_law,
    log_probability,
)
from .kernels import BACKEND
from .models import (
    IID,
    FunctionOfMarkov,
    Markov,
    Mixture,
    Sample,
    entropy_rate,
    sample,
    trial_seed,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigError",
    "DecodeError",
    "ResourceError",
    "block_entropy",
    "build_codebook",
    "code_length_bound",
    "Codebook",
    "conditional_block_entropy",
    "decode",
    "distinct_blocks",
    "empirical_distribution",
    "EmpiricalBlockDistribution",
    "encode",
    "EncodedStream",
    "entropy_rate",
    "exact_block_law",
    "FunctionOfMarkov",
    "IID",
    "log_probability",
    "Markov",
    "min_code_length",
    "Mixture",
    "plug_in_entropy",
    "Sample",
    "sample",
    "trial_seed",
    "variational_distance",
]
