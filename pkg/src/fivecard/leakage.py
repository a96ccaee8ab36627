"""What Bob learns about Alice's bit from the revealed arrangement.

``posterior_exact`` is the brute-force route: Bayes' rule over every
initial arrangement and every cut index.  The ``posterior_closed_*``
functions evaluate the two-case closed forms directly and never enumerate
cuts, so the two routes check each other.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Mapping

from .arrangement import (
    CUT_INDICES,
    Arrangement,
    as_arrangement,
    check_cut_index,
    orbit,
    restricted_final_set,
    restricted_initial_set,
    rotate,
)
from .errors import ArrangementError, ParameterError
from .shuffle_model import (
    CutChain,
    ShiftDistribution,
    _const,
    check_epsilon,
)

PRIOR_SUM_TOL = 1e-12


class Case(str, enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    UNREACHABLE = "Unreachable"


@dataclass(frozen=True)
class PriorSpec:
    """Probability of each initial arrangement."""

    weights: Mapping[Arrangement, Real]

    def __post_init__(self):
        w = {as_arrangement(k): v for k, v in dict(self.weights).items()}
        if any(v < 0 for v in w.values()):
            raise ParameterError("prior weights must be nonnegative")
        total = sum(w.values())
        exact = all(isinstance(v, (Fraction, int)) for v in w.values())
        if not any(v > 0 for v in w.values()):
            raise ParameterError("prior has empty support")
        if (exact and total != 1) or (not exact and abs(total - 1) > PRIOR_SUM_TOL):
            raise ParameterError(f"prior weights must sum to 1, got {total}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def default(cls, exact: bool = False) -> "PriorSpec":
        """Alice's bit is a fair coin and Bob's bit is 0."""
        half = Fraction(1, 2) if exact else 0.5
        return cls({arr: half for arr in restricted_initial_set()})

    @classmethod
    def point(cls, arr: Arrangement | str, exact: bool = False) -> "PriorSpec":
        return cls({as_arrangement(arr): Fraction(1) if exact else 1.0})

    def support(self) -> list[Arrangement]:
        return sorted(k for k, v in self.weights.items() if v > 0)

    def __getitem__(self, arr: Arrangement) -> Real:
        return self.weights.get(as_arrangement(arr), 0)

    def to_json(self) -> dict:
        return {k.text: float(v) for k, v in sorted(self.weights.items())}


@dataclass
class PosteriorTable:
    """P(initial = I | final = F) for every reachable final F.

    ``entries`` only holds reachable finals; ``cases`` labels every final
    considered, including unreachable ones.
    """

    entries: dict[tuple[Arrangement, Arrangement], Real]
    cases: dict[Arrangement, Case]

    def finals(self) -> list[Arrangement]:
        return sorted(self.cases)

    def reachable_finals(self) -> list[Arrangement]:
        return [f for f in self.finals() if self.cases[f] is not Case.UNREACHABLE]

    def finals_of(self, case: Case) -> list[Arrangement]:
        return [f for f in self.finals() if self.cases[f] is case]

    def initials(self) -> list[Arrangement]:
        return sorted({i for i, _ in self.entries})

    def row(self, final: Arrangement | str) -> dict[Arrangement, Real]:
        final = as_arrangement(final)
        return {i: p for (i, f), p in sorted(self.entries.items()) if f == final}

    def __getitem__(self, key) -> Real:
        i, f = key
        return self.entries[(as_arrangement(i), as_arrangement(f))]

    def max_abs_diff(self, other: "PosteriorTable") -> float:
        """Largest entrywise gap; the tables must cover the same pairs with the same labels."""
        if self.cases != other.cases:
            raise ValueError("posterior tables disagree on final labels")
        if set(self.entries) != set(other.entries):
            raise ValueError("posterior tables cover different (initial, final) pairs")
        if not self.entries:
            return 0.0
        return max(abs(float(self.entries[k]) - float(other.entries[k])) for k in self.entries)

    def max_deviation(self) -> float:
        """max |posterior - 1/2| over the reachable entries."""
        return max((abs(float(p) - 0.5) for p in self.entries.values()), default=0.0)

    def to_json(self) -> list[dict]:
        out = []
        for f in self.finals():
            out.append({
                "final": f.text,
                "case": self.cases[f].value,
                "posteriors": {i.text: float(p) for i, p in self.row(f).items()},
            })
        return out

    @classmethod
    def from_json(cls, rows: Iterable[dict]) -> "PosteriorTable":
        entries, cases = {}, {}
        for row in rows:
            f = Arrangement(row["final"])
            cases[f] = Case(row["case"])
            for i, p in row["posteriors"].items():
                entries[(Arrangement(i), f)] = p
        return cls(entries, cases)

    def to_rows(self) -> list[tuple[str, str, str, Real]]:
        """Flat (initial, final, case, posterior) rows; unreachable finals are omitted."""
        return [(i.text, f.text, self.cases[f].value, p)
                for (i, f), p in sorted(self.entries.items(), key=lambda kv: (kv[0][1], kv[0][0]))]


@dataclass
class LeakageReport:
    posterior: PosteriorTable
    final_marginals: dict[Arrangement, Real]
    map_guess_success: Real
    max_deviation: float
    map_guesses: dict[Arrangement, Arrangement] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "posterior": self.posterior.to_json(),
            "final_marginals": {f.text: float(p) for f, p in sorted(self.final_marginals.items())},
            "map_guess_success": float(self.map_guess_success),
            "max_deviation": self.max_deviation,
            "map_guesses": {f.text: i.text for f, i in sorted(self.map_guesses.items())},
        }


def _one_half(like) -> Real:
    return _const(1, 2, like)


def table_from_joint(joint: Mapping[tuple[Arrangement, Arrangement], Real],
                     initials: Iterable[Arrangement],
                     s_star: int = 0) -> tuple[PosteriorTable, dict[Arrangement, Real]]:
    """Condition a joint law (or joint counts) of (initial, final) on the final.

    Finals in the cut orbits of ``initials`` are labelled Case1 when they are
    ``rotate(I, s_star)`` for some initial I, Case2 otherwise, and Unreachable
    when their marginal is zero.  Returns the table and the final marginals.
    """
    initials = sorted(initials)
    case1 = {rotate(i, s_star) for i in initials}
    finals = sorted({f for i in initials for f in orbit(i)})
    entries, cases, marginals = {}, {}, {}
    for f in finals:
        m = sum(joint.get((i, f), 0) for i in initials)
        marginals[f] = m
        if m <= 0:
            cases[f] = Case.UNREACHABLE
            continue
        cases[f] = Case.CASE1 if f in case1 else Case.CASE2
        for i in initials:
            entries[(i, f)] = joint.get((i, f), 0) / m
    return PosteriorTable(entries, cases), marginals


def joint_law(prior: PriorSpec, dist: ShiftDistribution) -> dict[tuple[Arrangement, Arrangement], Real]:
    """P(initial = I, final = F), enumerating the five cut indices."""
    joint: dict[tuple[Arrangement, Arrangement], Real] = {}
    for i in prior.support():
        for k in CUT_INDICES:
            key = (i, rotate(i, k))
            joint[key] = joint.get(key, 0) + prior[i] * dist[k]
    return joint


def posterior_exact(prior: PriorSpec, dist: ShiftDistribution, s_star: int = 0) -> PosteriorTable:
    """Bayes' rule by exhaustive enumeration.  ``s_star`` only affects the case labels."""
    check_cut_index(s_star)
    support = prior.support()
    if not support:
        raise ParameterError("prior has empty support")
    table, _ = table_from_joint(joint_law(prior, dist), support, s_star)
    return table


def final_marginal_case1(epsilon: Real) -> Real:
    """P(final = F) for a final of the form rotate(I, s_star), I restricted."""
    check_epsilon(epsilon)
    return _one_half(epsilon) * (_const(2, 5, epsilon) - 3 * epsilon / 4)


def final_marginal_case2(epsilon: Real) -> Real:
    """P(final = F) for any other final of the restricted orbit."""
    check_epsilon(epsilon)
    return _const(1, 5, epsilon) + epsilon / 4


def _two_case_table(same, other, case2_reachable: bool, s_star: int) -> PosteriorTable:
    ibar = sorted(restricted_initial_set())
    case1 = {rotate(i, s_star) for i in ibar}
    entries, cases = {}, {}
    half = _one_half(same)
    for f in sorted(restricted_final_set()):
        if f in case1:
            cases[f] = Case.CASE1
            for i in ibar:
                entries[(i, f)] = same if f == rotate(i, s_star) else other
        elif case2_reachable:
            cases[f] = Case.CASE2
            for i in ibar:
                entries[(i, f)] = half
        else:
            cases[f] = Case.UNREACHABLE
    return PosteriorTable(entries, cases)


def posterior_closed_single(epsilon: Real, s_star: int = 0) -> PosteriorTable:
    """Closed-form posterior for one biased cut under the default prior."""
    check_epsilon(epsilon)
    check_cut_index(s_star)
    den = 8 - 15 * epsilon
    same = (4 - 20 * epsilon) / den
    other = (4 + 5 * epsilon) / den
    if isinstance(epsilon, int):
        same, other = Fraction(4 - 20 * epsilon, den), Fraction(4 + 5 * epsilon, den)
    return _two_case_table(same, other, final_marginal_case2(epsilon) > 0, s_star)


def posterior_closed_repeated(chain: CutChain) -> PosteriorTable:
    """Closed-form posterior after ``chain.T`` chain steps under the default prior."""
    x = chain.gap ** chain.T
    den = 8 + 12 * x
    same = (4 + 16 * x) / den
    other = (4 - 4 * x) / den
    # Case2 marginal is (1 - x)/5, zero only when the chain never moves.
    return _two_case_table(same, other, x != 1, 0)


def repeated_deviation(chain: CutChain) -> Real:
    """|posterior - 1/2| on Case1 finals after the chain: 20|x| / (16 + 24x), x = (a-b)^T."""
    x = chain.gap ** chain.T
    return 20 * abs(x) / (16 + 24 * x)


def shift_match_probability(i: Arrangement | str, j: Arrangement | str, dist: ShiftDistribution) -> Real:
    """P(rotate(i, s) == j) for restricted initials i, j, by enumerating s."""
    i, j = as_arrangement(i), as_arrangement(j)
    ibar = restricted_initial_set()
    for x in (i, j):
        if x not in ibar:
            raise ArrangementError(f"{x} is not a restricted initial arrangement")
    target = rotate(j, 0)
    return sum((dist[k] for k in CUT_INDICES if rotate(i, k) == target), _const(0, 1, dist[0]))


def adversary_report(prior: PriorSpec, dist: ShiftDistribution, s_star: int = 0) -> LeakageReport:
    """How well a MAP-guessing Bob does.  Ties go to the lexicographically smallest arrangement."""
    table, marginals = table_from_joint(joint_law(prior, dist), prior.support(), s_star)
    success = _const(0, 1, dist[0])
    guesses = {}
    for f in table.reachable_finals():
        row = table.row(f)
        best = max(row.values())
        guesses[f] = min(i for i, p in row.items() if p == best)
        success += marginals[f] * best
    reachable = {f: marginals[f] for f in table.reachable_finals()}
    return LeakageReport(table, reachable, success, table.max_deviation(), guesses)


def level2_bounds(eps_lower: Real) -> tuple[Real, Real]:
    """Bounds on the Case1 posteriors when the bias is known to be at least ``eps_lower``.

    Returns (upper bound for F = rotate(I, s_star), lower bound for the other Case1 final).
    """
    hi = _const(1, 5, eps_lower)
    if isinstance(eps_lower, bool) or not isinstance(eps_lower, Real) or not 0 < eps_lower <= hi:
        raise ParameterError(f"eps_lower must lie in (0, 1/5], got {eps_lower!r}")
    den = 8 - 15 * eps_lower
    return (4 - 20 * eps_lower) / den, (4 + 5 * eps_lower) / den
