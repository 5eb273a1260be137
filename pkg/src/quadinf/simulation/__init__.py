"""Monte Carlo designs, random streams and the replication harness."""

from .cases import CASES, SimConfig, case2_scale, case_params, generate_case, generate_two_sample
from .harness import KINDS, ReplicationRecord, collect_records, qq_points, replicate, \
    run_replications, summarize
from .ks import kolmogorov_q, ks_uniformity
from .rng import config_stream, sample_standard_normal, sample_student_t, sample_uniform, stream

__all__ = ["CASES", "KINDS", "SimConfig", "ReplicationRecord", "case2_scale", "case_params",
           "collect_records", "config_stream", "generate_case", "generate_two_sample",
           "kolmogorov_q", "ks_uniformity", "qq_points", "replicate", "run_replications",
           "sample_standard_normal", "sample_student_t", "sample_uniform", "stream", "summarize"]
