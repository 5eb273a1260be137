"""Counter-based random streams.

Each stream is a Philox generator keyed by ``(seed, rep_index, substream)``
through :class:`numpy.random.SeedSequence` spawn keys, so replications can
run in any order or in parallel and still see the same numbers.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..normal import normal_quantile

# substream ids
DESIGN, ERROR, DESIGN_B, ERROR_B, PARAMS = range(5)

_U53 = 2.0 ** -53


def stream(seed: int, rep_index: int, substream: int) -> np.random.Generator:
    """Generator for one replication's substream."""
    if seed < 0 or rep_index < 0 or substream < 0:
        raise DomainError("seed, rep_index and substream must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(rep_index), int(substream)))
    return np.random.Generator(np.random.Philox(ss))


def config_stream(seed: int, substream: int) -> np.random.Generator:
    """Generator for quantities drawn once per configuration."""
    # a length-1 spawn key never collides with the per-replication keys
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(substream),))
    return np.random.Generator(np.random.Philox(ss))


def sample_uniform(gen: np.random.Generator, size=None):
    """Uniforms on the open interval (0, 1) with 53-bit resolution."""
    k = gen.integers(0, 2 ** 53, size=size, dtype=np.int64)
    return (k + 0.5) * _U53


def sample_standard_normal(gen: np.random.Generator, size=None):
    """N(0, 1) variates by inversion."""
    return normal_quantile(sample_uniform(gen, size))


def sample_student_t(gen: np.random.Generator, df: float, scale: bool = False, size=None):
    """Student t variates built as Z / sqrt(chi2_df / df).

    With ``scale=True`` the draws are divided by sqrt(df / (df - 2)) so they
    have unit variance (requires df > 2).
    """
    if not df > 0:
        raise DomainError("df must be positive")
    if scale and not df > 2:
        raise DomainError("unit-variance scaling needs df > 2")
    z = sample_standard_normal(gen, size)
    chi2 = 2.0 * gen.standard_gamma(df / 2.0, size=size)
    t = z / np.sqrt(chi2 / df)
    if scale:
        t = t / np.sqrt(df / (df - 2.0))
    return t
