"""Seeded sampling of the protocol, independent of every closed form."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import kernels, rng
from .arrangement import N_CARDS, Arrangement, evaluate_and, rotate
from .errors import ParameterError
from .leakage import PosteriorTable, PriorSpec, table_from_joint
from .shuffle_model import BiasSpec, CutChain, bias_to_distribution, step_distribution

Shuffle = Union[BiasSpec, CutChain]


@dataclass(frozen=True)
class SimConfig:
    prior: PriorSpec
    shuffle: Shuffle
    n_samples: int
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.n_samples, bool) or not isinstance(self.n_samples, int) or self.n_samples < 1:
            raise ParameterError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if not isinstance(self.shuffle, (BiasSpec, CutChain)):
            raise ParameterError("shuffle must be a BiasSpec or a CutChain")
        try:
            rng.check_seed(self.seed)
        except ValueError as e:
            raise ParameterError(str(e)) from None

    @property
    def s_star(self) -> int:
        return self.shuffle.s_star if isinstance(self.shuffle, BiasSpec) else 0


@dataclass
class SimResult:
    config: SimConfig
    joint_counts: dict[tuple[Arrangement, Arrangement], int]
    shift_counts: tuple[int, ...]
    empirical_posterior: PosteriorTable
    empirical_and_rate: float
    std_error_bound: float
    algorithm: str = rng.ALGORITHM
    backend: str = field(default=kernels.BACKEND, compare=False)

    @property
    def n_samples(self) -> int:
        return self.config.n_samples

    def final_counts(self) -> dict[Arrangement, int]:
        out: dict[Arrangement, int] = {}
        for (_, f), c in self.joint_counts.items():
            out[f] = out.get(f, 0) + c
        return out

    def conditional_std_error(self, final: Arrangement) -> float:
        """Worst-case binomial standard error of a posterior estimated from the samples landing on ``final``.

        Larger than ``std_error_bound`` by sqrt(n / n_final): the posterior is a
        proportion among those samples only.
        """
        return 1 / (2 * math.sqrt(self.final_counts()[final]))

    def shift_frequencies(self) -> list[float]:
        return [c / self.n_samples for c in self.shift_counts]

    def to_json(self) -> dict:
        nested: dict[str, dict[str, int]] = {}
        for (i, f), c in sorted(self.joint_counts.items()):
            nested.setdefault(i.text, {})[f.text] = c
        shuffle = self.config.shuffle
        return {
            "n_samples": self.n_samples,
            "seed": self.config.seed,
            "shuffle": {"kind": "bias" if isinstance(shuffle, BiasSpec) else "chain", **shuffle.to_json()},
            "prior": self.config.prior.to_json(),
            "algorithm": self.algorithm,
            "backend": self.backend,
            "joint_counts": nested,
            "shift_counts": list(self.shift_counts),
            "empirical_posterior": self.empirical_posterior.to_json(),
            "empirical_and_rate": self.empirical_and_rate,
            "std_error_bound": self.std_error_bound,
        }


def _step_law(shuffle: Shuffle):
    if isinstance(shuffle, BiasSpec):
        return bias_to_distribution(shuffle), 1
    return step_distribution(shuffle.a), shuffle.T


def simulate(config: SimConfig, backend: str | None = None) -> SimResult:
    """Draw ``n_samples`` protocol runs and tabulate (initial, final) pairs.

    A biased single cut takes one index from its law.  A chain takes ``T``
    increments, each 0 with probability ``a`` and otherwise uniform over the
    other four, summed mod 5.  The result depends only on ``config``.
    """
    sampler = kernels.BACKENDS[backend] if backend else kernels.sample_joint_counts
    support = config.prior.support()
    prior_cdf = rng.sampling_cdf([config.prior[i] for i in support])
    law, n_steps = _step_law(config.shuffle)
    step_cdf = rng.sampling_cdf(law.p)
    counts = np.asarray(sampler(rng.lane_states(config.seed), config.n_samples, prior_cdf, step_cdf, n_steps))

    joint: dict[tuple[Arrangement, Arrangement], int] = {}
    and_hits = 0
    for row, i in enumerate(support):
        for k in range(N_CARDS):
            c = int(counts[row, k])
            if c == 0:
                continue
            f = rotate(i, k)
            joint[(i, f)] = joint.get((i, f), 0) + c
            and_hits += c * evaluate_and(f)
    table, _ = table_from_joint(joint, support, config.s_star)
    n = config.n_samples
    return SimResult(
        config=config,
        joint_counts=joint,
        shift_counts=tuple(int(v) for v in counts.sum(axis=0)),
        empirical_posterior=table,
        empirical_and_rate=and_hits / n,
        std_error_bound=1 / (2 * math.sqrt(n)),
        backend=backend or kernels.BACKEND,
    )
