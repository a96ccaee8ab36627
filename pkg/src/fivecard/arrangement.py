"""Card arrangements of the five card trick and the cyclic cut.

An arrangement is written as a five character string over ``B`` (black)
and ``r`` (red), e.g. ``"rBBrB"``.  Alice lays down her two cards, then the
extra black card, then Bob's two cards::

    Alice a=1 -> "rB"    a=0 -> "Br"
    Bob   b=1 -> "Br"    b=0 -> "rB"

A cut by index ``k`` rotates the sequence right by ``k`` positions, so
``rotate("abcde", 1) == "eabcd"`` and ``rotate("abcde", 2) == "deabc"``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import total_ordering

from .errors import ArrangementError, ParameterError

N_CARDS = 5
N_BLACK = 3
N_RED = 2
CUT_INDICES = tuple(range(N_CARDS))


class Card(enum.Enum):
    BLACK = "B"
    RED = "r"

    def __str__(self) -> str:
        return self.value


@total_ordering
@dataclass(frozen=True)
class Arrangement:
    """Five cards, three black and two red, in table order."""

    text: str

    def __post_init__(self):
        if not isinstance(self.text, str):
            raise ArrangementError(f"arrangement must be a string, got {type(self.text).__name__}")
        if len(self.text) != N_CARDS:
            raise ArrangementError(f"arrangement {self.text!r} must have exactly {N_CARDS} cards")
        bad = sorted(set(self.text) - {"B", "r"})
        if bad:
            raise ArrangementError(f"arrangement {self.text!r} has invalid card(s) {''.join(bad)!r}; use 'B' and 'r'")
        if self.text.count("B") != N_BLACK:
            raise ArrangementError(f"arrangement {self.text!r} must contain 3 'B' and 2 'r'")

    @property
    def cards(self) -> tuple[Card, ...]:
        return tuple(Card(c) for c in self.text)

    def red_positions(self) -> tuple[int, int]:
        i, j = (k for k, c in enumerate(self.text) if c == "r")
        return i, j

    def __lt__(self, other: "Arrangement") -> bool:
        if not isinstance(other, Arrangement):
            return NotImplemented
        return self.text < other.text

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"Arrangement({self.text!r})"


def parse_arrangement(text: str) -> Arrangement:
    return Arrangement(text)


def format_arrangement(arr: Arrangement) -> str:
    return arr.text


def as_arrangement(x: Arrangement | str) -> Arrangement:
    return x if isinstance(x, Arrangement) else Arrangement(x)


def _check_bit(name: str, v) -> int:
    if v not in (0, 1) or isinstance(v, float):
        raise ParameterError(f"{name} must be a bit (0 or 1), got {v!r}")
    return int(v)


def encode_initial(a: int, b: int) -> Arrangement:
    """Initial arrangement for Alice's bit ``a`` and Bob's bit ``b``."""
    a = _check_bit("a", a)
    b = _check_bit("b", b)
    alice = "rB" if a == 1 else "Br"
    bob = "Br" if b == 1 else "rB"
    return Arrangement(alice + "B" + bob)


def check_cut_index(k) -> int:
    if isinstance(k, bool) or not isinstance(k, int) or not 0 <= k < N_CARDS:
        raise ParameterError(f"cut index must be an integer in 0..4, got {k!r}")
    return k


def rotate(arr: Arrangement | str, k: int) -> Arrangement:
    """The cut ``f(arr, k)``: rotate right by ``k`` positions."""
    arr = as_arrangement(arr)
    k = check_cut_index(k)
    if k == 0:
        return arr
    t = arr.text
    return Arrangement(t[-k:] + t[:-k])


def cut_index_between(src: Arrangement | str, dst: Arrangement | str) -> int | None:
    """The unique ``k`` with ``rotate(src, k) == dst``, or None if dst is not in the orbit of src."""
    src, dst = as_arrangement(src), as_arrangement(dst)
    for k in CUT_INDICES:
        if rotate(src, k) == dst:
            return k
    return None


def evaluate_and(arr: Arrangement | str) -> int:
    """1 iff the two red cards sit next to each other (cyclically)."""
    i, j = as_arrangement(arr).red_positions()
    return 1 if (j - i) % N_CARDS in (1, N_CARDS - 1) else 0


def all_arrangements() -> tuple[Arrangement, ...]:
    out = []
    for reds in itertools.combinations(range(N_CARDS), N_RED):
        out.append(Arrangement("".join("r" if k in reds else "B" for k in range(N_CARDS))))
    return tuple(sorted(out))


def initial_set() -> frozenset[Arrangement]:
    """Every arrangement the players can lay down: one per (a, b)."""
    return frozenset(encode_initial(a, b) for a in (0, 1) for b in (0, 1))


def orbit(arr: Arrangement | str) -> frozenset[Arrangement]:
    return frozenset(rotate(arr, k) for k in CUT_INDICES)


def final_set() -> frozenset[Arrangement]:
    return frozenset(f for i in initial_set() for f in orbit(i))


def restricted_initial_set() -> frozenset[Arrangement]:
    """Initial arrangements with Bob's bit fixed to 0: {rBBrB, BrBrB}."""
    return frozenset({Arrangement("rBBrB"), Arrangement("BrBrB")})


def restricted_final_set() -> frozenset[Arrangement]:
    return frozenset({
        Arrangement("rBBrB"),
        Arrangement("BrBBr"),
        Arrangement("rBrBB"),
        Arrangement("BrBrB"),
        Arrangement("BBrBr"),
    })


def complement(arr: Arrangement | str) -> Arrangement:
    """The other member of the restricted initial set."""
    arr = as_arrangement(arr)
    ibar = restricted_initial_set()
    if arr not in ibar:
        raise ArrangementError(f"{arr} is not a restricted initial arrangement")
    (other,) = ibar - {arr}
    return other
