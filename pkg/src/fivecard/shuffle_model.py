"""Laws of the cut index: biased single cuts and repeated cuts as a Markov chain.

Every probability here may be a ``float`` or a ``fractions.Fraction``.  When
the parameters are Fractions the results are exact rationals, which is what
the identity tests rely on.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Sequence

import numpy as np

from .arrangement import N_CARDS, check_cut_index
from .errors import ParameterError

SUM_TOL = 1e-12
ENTRY_TOL = 1e-12
DEFAULT_POWER_CAP = 10**6


def _const(num: int, den: int, like) -> Real:
    """num/den as a Fraction if ``like`` is exact, as a float otherwise."""
    return Fraction(num, den) if isinstance(like, Fraction) else num / den


def _is_exact(values) -> bool:
    return all(isinstance(v, (Fraction, int)) and not isinstance(v, bool) for v in values)


@dataclass(frozen=True)
class ShiftDistribution:
    """Probability of each cut index 0..4."""

    p: tuple

    def __post_init__(self):
        p = tuple(self.p)
        if len(p) != N_CARDS:
            raise ParameterError(f"shift distribution needs {N_CARDS} entries, got {len(p)}")
        if _is_exact(p):
            p = tuple(Fraction(v) for v in p)
            if any(v < 0 or v > 1 for v in p):
                raise ParameterError(f"probabilities must lie in [0, 1]: {p}")
            if sum(p) != 1:
                raise ParameterError(f"probabilities must sum to 1, got {sum(p)}")
        else:
            p = tuple(float(v) for v in p)
            if any(not (-ENTRY_TOL <= v <= 1 + ENTRY_TOL) for v in p):
                raise ParameterError(f"probabilities must lie in [0, 1]: {p}")
            if abs(sum(p) - 1.0) > SUM_TOL:
                raise ParameterError(f"probabilities must sum to 1 within {SUM_TOL}, got {sum(p)!r}")
        object.__setattr__(self, "p", p)

    @property
    def exact(self) -> bool:
        return isinstance(self.p[0], Fraction)

    def __getitem__(self, k: int):
        return self.p[k]

    def __iter__(self):
        return iter(self.p)

    def __len__(self) -> int:
        return N_CARDS

    @classmethod
    def uniform(cls, exact: bool = False) -> "ShiftDistribution":
        v = Fraction(1, 5) if exact else 0.2
        return cls((v,) * N_CARDS)

    @classmethod
    def delta(cls, k: int, exact: bool = False) -> "ShiftDistribution":
        k = check_cut_index(k)
        one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
        return cls(tuple(one if j == k else zero for j in range(N_CARDS)))

    @classmethod
    def normalized(cls, weights: Sequence[Real]) -> "ShiftDistribution":
        """Rescale nonnegative weights to sum to one (the only place renormalisation happens)."""
        w = list(weights)
        if any(v < 0 for v in w):
            raise ParameterError("weights must be nonnegative")
        total = sum(w)
        if total <= 0:
            raise ParameterError("weights must have positive total")
        if _is_exact(w):
            return cls(tuple(Fraction(v) / total for v in w))
        return cls(tuple(v / total for v in w))

    def to_json(self) -> list:
        return [float(v) for v in self.p]

    @classmethod
    def from_json(cls, obj) -> "ShiftDistribution":
        return cls(tuple(obj))

    def max_abs_diff(self, other: "ShiftDistribution") -> float:
        return max(abs(float(x) - float(y)) for x, y in zip(self.p, other.p))


def check_epsilon(epsilon) -> Real:
    if isinstance(epsilon, bool) or not isinstance(epsilon, Real):
        raise ParameterError(f"epsilon must be a real number, got {epsilon!r}")
    lo, hi = (Fraction(-4, 5), Fraction(1, 5)) if isinstance(epsilon, Fraction) else (-0.8, 0.2)
    if not lo <= epsilon <= hi:
        raise ParameterError(f"epsilon must lie in [-4/5, 1/5], got {epsilon!r}")
    return epsilon


def check_diagonal(a) -> Real:
    if isinstance(a, bool) or not isinstance(a, Real):
        raise ParameterError(f"a must be a real number, got {a!r}")
    if not 0 <= a <= 1:
        raise ParameterError(f"a must lie in [0, 1], got {a!r}")
    return a


@dataclass(frozen=True)
class BiasSpec:
    """A single cut where index ``s_star`` has probability 1/5 - epsilon
    and every other index 1/5 + epsilon/4."""

    epsilon: Real
    s_star: int = 0

    def __post_init__(self):
        check_epsilon(self.epsilon)
        check_cut_index(self.s_star)

    def to_json(self) -> dict:
        return {"epsilon": float(self.epsilon), "s_star": self.s_star}


@dataclass(frozen=True)
class CutChain:
    """``T`` repeated cuts, each staying put with probability ``a``."""

    a: Real
    T: int

    def __post_init__(self):
        check_diagonal(self.a)
        if isinstance(self.T, bool) or not isinstance(self.T, int) or self.T < 0:
            raise ParameterError(f"T must be a nonnegative integer, got {self.T!r}")

    @property
    def b(self) -> Real:
        return (1 - self.a) / 4

    @property
    def gap(self) -> Real:
        """``a - b``, the repeated eigenvalue of the transition matrix."""
        return self.a - self.b

    def to_json(self) -> dict:
        return {"a": float(self.a), "T": self.T}

    @classmethod
    def from_json(cls, obj: dict) -> "CutChain":
        return cls(a=obj["a"], T=int(obj["T"]))


def bias_to_distribution(spec: BiasSpec) -> ShiftDistribution:
    eps = spec.epsilon
    fifth = _const(1, 5, eps)
    hit = fifth - eps
    rest = fifth + eps / 4
    return ShiftDistribution(tuple(hit if j == spec.s_star else rest for j in range(N_CARDS)))


def step_distribution(a: Real) -> ShiftDistribution:
    """Law of the increment of one chain step: stay with prob ``a``, else one of four other shifts."""
    check_diagonal(a)
    b = (1 - a) / 4
    return ShiftDistribution((a, b, b, b, b))


def transition_matrix(a: Real) -> np.ndarray:
    """5x5 row-stochastic matrix with ``a`` on the diagonal and ``(1-a)/4`` elsewhere.

    Exact (object dtype) when ``a`` is a Fraction.
    """
    check_diagonal(a)
    b = (1 - a) / 4
    dtype = object if isinstance(a, Fraction) else float
    m = np.full((N_CARDS, N_CARDS), b, dtype=dtype)
    for i in range(N_CARDS):
        m[i, i] = a
    return m


def chain_distribution_closed(chain: CutChain) -> ShiftDistribution:
    """t-step law of the cut index started at 0, from the eigenstructure of P."""
    x = chain.gap ** chain.T
    fifth = _const(1, 5, chain.a)
    p0 = fifth + 4 * x / 5
    pi = fifth - x / 5
    return ShiftDistribution((p0, pi, pi, pi, pi))


def chain_distribution_power(chain: CutChain, cap: int = DEFAULT_POWER_CAP) -> ShiftDistribution:
    """Same law as :func:`chain_distribution_closed`, by propagating ``nu`` through P one step at a time."""
    if chain.T > cap:
        raise ParameterError(f"T={chain.T} exceeds the power-iteration cap {cap}")
    P = transition_matrix(chain.a)
    exact = isinstance(chain.a, Fraction)
    if exact:
        v = [Fraction(1)] + [Fraction(0)] * (N_CARDS - 1)
        rows = [list(r) for r in P]
        for _ in range(chain.T):
            v = [sum(v[i] * rows[i][j] for i in range(N_CARDS)) for j in range(N_CARDS)]
        return ShiftDistribution(tuple(v))
    v = np.zeros(N_CARDS)
    v[0] = 1.0
    for _ in range(chain.T):
        v = v @ P
    return ShiftDistribution(tuple(v))


def compose(d1: ShiftDistribution, d2: ShiftDistribution) -> ShiftDistribution:
    """Law of the sum (mod 5) of two independent cut indices."""
    out = []
    for k in range(N_CARDS):
        out.append(sum(d1[j] * d2[(k - j) % N_CARDS] for j in range(N_CARDS)))
    return ShiftDistribution(tuple(out))


def effective_epsilon(chain: CutChain) -> Real:
    """Single-cut bias equivalent to the whole chain (with s_star = 0)."""
    x = chain.gap ** chain.T
    return -4 * x / 5 if isinstance(chain.a, Fraction) else -0.8 * x
