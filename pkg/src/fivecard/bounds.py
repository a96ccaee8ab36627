"""How many repeated cuts keep |P(I | F) - 1/2| <= C.

Two routes: the analytic thresholds (one per parity condition) and an
exact scan over T of the closed-form posterior table.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from numbers import Real

from .errors import ParameterError
from .leakage import posterior_closed_repeated
from .shuffle_model import CutChain, check_diagonal

SCAN_CAP = 10**6


class Parity(str, enum.Enum):
    ANY = "any"
    EVEN = "even"
    ODD = "odd"

    def admits(self, T: int) -> bool:
        return self is Parity.ANY or (T % 2 == 0) == (self is Parity.EVEN)


class Status(str, enum.Enum):
    OK = "ok"
    ANY = "any"  # a == b: one cut already mixes perfectly
    UNREACHABLE = "unreachable"  # a == 1: the chain never moves


@dataclass(frozen=True)
class BoundQuery:
    a: Real
    C: Real
    parity: Parity = Parity.ANY

    def __post_init__(self):
        check_diagonal(self.a)
        if isinstance(self.C, bool) or not isinstance(self.C, Real) or not 0 < self.C < 0.5:
            raise ParameterError(f"C must lie strictly inside (0, 1/2), got {self.C!r}")
        object.__setattr__(self, "parity", Parity(self.parity))

    @property
    def b(self) -> Real:
        return (1 - self.a) / 4

    @property
    def gap(self) -> Real:
        return self.a - self.b


@dataclass
class BoundResult:
    query: BoundQuery
    status: Status
    analytic_T_cond1: float | None = None
    analytic_T_cond2: float | None = None
    analytic_T: int | None = None
    minimal_T: int | None = None
    achieved_deviation: float | None = None

    def to_json(self) -> dict:
        q = self.query
        out = {"a": float(q.a), "C": float(q.C), "parity": q.parity.value, "status": self.status.value}
        if self.status is Status.OK:
            out["analytic_T_cond1"] = self.analytic_T_cond1
            out["analytic_T_cond2"] = self.analytic_T_cond2
            out["analytic_T"] = self.analytic_T
        else:
            sentinel = self.status.value
            out["analytic_T_cond1"] = out["analytic_T_cond2"] = out["analytic_T"] = sentinel
        out["minimal_T"] = self.minimal_T if self.minimal_T is not None else self.status.value
        out["achieved_deviation"] = self.achieved_deviation
        return out


def _status(q: BoundQuery) -> Status:
    if q.gap == 0:
        return Status.ANY
    if q.a == 1:
        return Status.UNREACHABLE
    return Status.OK


def ceil_to_parity(threshold: float, parity: Parity) -> int:
    """Smallest T >= max(threshold, 0) with the requested parity."""
    T = max(0, math.ceil(threshold))
    if not parity.admits(T):
        T += 1
    return T


def corollary_bound(query: BoundQuery) -> BoundResult:
    """Analytic sufficient shuffle counts.

    Condition 1 (T even, or a > b): T >= ln(16C / (20 - 24C)) / ln|a - b|.
    Condition 2 (T odd and a < b): T >= ln(16C / (20 + 24C)) / ln|a - b|.
    ``analytic_T`` is the smallest integer meeting whichever condition applies
    under the query's parity.
    """
    status = _status(query)
    res = BoundResult(query, status)
    if status is not Status.OK:
        return res
    C = float(query.C)
    log_gap = math.log(abs(float(query.gap)))
    res.analytic_T_cond1 = math.log(16 * C / (20 - 24 * C)) / log_gap
    res.analytic_T_cond2 = math.log(16 * C / (20 + 24 * C)) / log_gap
    if query.gap > 0:
        res.analytic_T = ceil_to_parity(res.analytic_T_cond1, query.parity)
    else:
        even = ceil_to_parity(res.analytic_T_cond1, Parity.EVEN)
        odd = ceil_to_parity(res.analytic_T_cond2, Parity.ODD)
        res.analytic_T = {Parity.EVEN: even, Parity.ODD: odd, Parity.ANY: min(even, odd)}[query.parity]
    return res


def condition_met(query: BoundQuery, T: int) -> bool:
    """Whether T satisfies the applicable analytic condition of the bound."""
    res = corollary_bound(query)
    if res.status is not Status.OK:
        raise ParameterError(f"no analytic condition when status is {res.status.value}")
    if query.gap > 0 or T % 2 == 0:
        return T >= res.analytic_T_cond1
    # odd T with a < b: the denominator 16 - 24|a-b|^T must stay positive
    assert 16 - 24 * abs(float(query.gap)) ** T > 0
    return T >= res.analytic_T_cond2


def deviation_after(a: Real, T: int) -> float:
    """max |P(I | F) - 1/2| over every reachable pair after T chain steps."""
    return posterior_closed_repeated(CutChain(a, T)).max_deviation()


def minimal_shuffles(query: BoundQuery, cap: int = SCAN_CAP) -> BoundResult:
    """Smallest admissible T whose exact deviation is at most C."""
    status = _status(query)
    res = BoundResult(query, status)
    if status is Status.UNREACHABLE:
        return res
    # T = 0 means no cut at all, which reveals everything, so the scan starts there too.
    for T in range(cap + 1):
        if not query.parity.admits(T):
            continue
        dev = deviation_after(query.a, T)
        if dev <= query.C:
            res.minimal_T = T
            res.achieved_deviation = dev
            return res
    raise ParameterError(f"no T <= {cap} reaches deviation {query.C}")


def solve(query: BoundQuery) -> BoundResult:
    """Analytic thresholds and the exact minimum in one result."""
    res = corollary_bound(query)
    scan = minimal_shuffles(query)
    res.minimal_T = scan.minimal_T
    res.achieved_deviation = scan.achieved_deviation
    return res
