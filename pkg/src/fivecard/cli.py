"""Command line front end.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 internal check failed.
The default output format comes from ``FIVECARD_FORMAT`` when set.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from fractions import Fraction

from .arrangement import encode_initial, evaluate_and, rotate
from .bounds import BoundQuery, Parity, solve
from .errors import FiveCardError
from .leakage import (
    PriorSpec,
    final_marginal_case1,
    posterior_closed_repeated,
    posterior_closed_single,
    posterior_exact,
)
from .montecarlo import SimConfig, simulate
from .rng import Xoshiro256StarStar, sampling_cdf
from .shuffle_model import (
    BiasSpec,
    CutChain,
    bias_to_distribution,
    chain_distribution_closed,
    chain_distribution_power,
    effective_epsilon,
)

EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_INTERNAL = 4
FORMAT_ENV = "FIVECARD_FORMAT"
FORMATS = ("json", "csv", "table")
ORACLE_TOL = 1e-10


class InternalCheckError(RuntimeError):
    pass


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, Fraction)):
        return format(float(x), ".12g")
    return str(x)


def parse_float_range(text: str) -> list[float]:
    """``start:stop:step``, stop included when within half a step."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric range {text!r}") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"empty or inverted range {text!r}")
    n = math.floor((stop - start) / step + 0.5)
    return [round(start + k * step, 12) for k in range(n + 1)]


def parse_int_range(text: str) -> list[int]:
    """``start:stop`` with unit step, both ends included."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            start = stop = int(parts[0])
        elif len(parts) == 2:
            start, stop = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop integers, got {text!r}") from None
    if start < 0 or stop < start:
        raise argparse.ArgumentTypeError(f"empty or inverted range {text!r}")
    return list(range(start, stop + 1))


def parse_cuts(text: str) -> list[int]:
    try:
        cuts = [int(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cuts must be comma separated integers, got {text!r}") from None
    if not cuts or any(not 0 <= c <= 4 for c in cuts):
        raise argparse.ArgumentTypeError(f"cut indices must lie in 0..4, got {text!r}")
    return cuts


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def bit(text: str) -> int:
    if text not in ("0", "1"):
        raise argparse.ArgumentTypeError(f"expected 0 or 1, got {text!r}")
    return int(text)


def write_csv(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def write_table(out, header, rows):
    cells = [list(map(str, header))] + [[fmt(v) for v in r] for r in rows]
    widths = [max(len(row[c]) for row in cells) for c in range(len(header))]
    for k, row in enumerate(cells):
        out.write("  ".join(v.rjust(w) for v, w in zip(row, widths)).rstrip() + "\n")
        if k == 0:
            out.write("  ".join("-" * w for w in widths) + "\n")


def emit(args, header, rows, payload):
    if args.format == "json":
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
    elif args.format == "csv":
        write_csv(sys.stdout, header, rows)
    else:
        write_table(sys.stdout, header, rows)


def _shuffle_from_args(args):
    """BiasSpec from --epsilon, or CutChain from --a/--T; exactly one must be given."""
    has_eps = args.epsilon is not None
    has_chain = args.a is not None or args.T is not None
    if has_eps == has_chain:
        raise UsageError("give exactly one of --epsilon or (--a, --T)")
    if has_eps:
        return BiasSpec(args.epsilon, args.s_star)
    if args.a is None or args.T is None:
        raise UsageError("--a and --T must be given together")
    if args.s_star != 0:
        raise UsageError("--s-star applies to --epsilon only; chains start from index 0")
    return CutChain(args.a, args.T)


def cmd_posterior(args) -> None:
    shuffle = _shuffle_from_args(args)
    prior = PriorSpec.default()
    if isinstance(shuffle, BiasSpec):
        closed = posterior_closed_single(shuffle.epsilon, shuffle.s_star)
        oracle = posterior_exact(prior, bias_to_distribution(shuffle), shuffle.s_star)
        params = shuffle.to_json()
    else:
        closed = posterior_closed_repeated(shuffle)
        oracle = posterior_exact(prior, chain_distribution_power(shuffle))
        params = {**shuffle.to_json(), "effective_epsilon": float(effective_epsilon(shuffle))}
    diff = closed.max_abs_diff(oracle)
    if not diff < ORACLE_TOL:
        raise InternalCheckError(f"closed form and enumeration disagree by {diff:g}")
    rows = []
    for i_text, f_text, case, p in closed.to_rows():
        q = oracle[(i_text, f_text)]
        rows.append((i_text, f_text, case, p, q, abs(float(p) - float(q))))
    for f in closed.finals():
        if f not in closed.reachable_finals():
            rows.append(("", f.text, closed.cases[f].value, "", "", ""))
    payload = {"params": params, "closed": closed.to_json(), "exact": oracle.to_json(), "max_abs_diff": diff}
    emit(args, ("initial", "final", "case", "posterior", "oracle", "abs_diff"), rows, payload)


def cmd_sweep(args) -> None:
    if (args.epsilon is None) == (args.T is None):
        raise UsageError("give either --epsilon start:stop:step or --a A --T start:stop")
    if args.epsilon is not None:
        if args.a is not None:
            raise UsageError("--a only applies to a T sweep")
        key = "epsilon"
        points = [(e, e) for e in args.epsilon]
        for e in args.epsilon:
            BiasSpec(e, args.s_star)
    else:
        if args.a is None:
            raise UsageError("a T sweep needs --a")
        if args.s_star != 0:
            raise UsageError("--s-star applies to --epsilon sweeps only")
        key = "T"
        points = [(T, effective_epsilon(CutChain(args.a, T))) for T in args.T]
    s_star = args.s_star
    ref = encode_initial(1, 0)
    same_f = rotate(ref, s_star)
    other_f = rotate(encode_initial(0, 0), s_star)
    rows = []
    for x, eps in points:
        if key == "T":
            table = posterior_closed_repeated(CutChain(args.a, x))
        else:
            table = posterior_closed_single(eps, s_star)
        rows.append((x, table[(ref, same_f)], table[(ref, other_f)], 0.5, final_marginal_case1(eps)))
    header = (key, "posterior_same", "posterior_other", "case2", "final_marginal_case1")
    payload = [dict(zip(header, (v if isinstance(v, int) else float(v) for v in r))) for r in rows]
    emit(args, header, rows, payload)


def cmd_bound(args) -> None:
    res = solve(BoundQuery(args.a, args.C, Parity(args.parity)))
    payload = res.to_json()
    emit(args, tuple(payload), [tuple(payload.values())], payload)


def cmd_simulate(args) -> None:
    shuffle = _shuffle_from_args(args)
    prior = PriorSpec.point(args.initial) if args.initial else PriorSpec.default()
    result = simulate(SimConfig(prior, shuffle, args.n, args.seed))
    if isinstance(shuffle, BiasSpec):
        dist = bias_to_distribution(shuffle)
        shift_exact = dist
    else:
        dist = chain_distribution_power(shuffle)
        shift_exact = chain_distribution_closed(shuffle)
    exact = posterior_exact(prior, dist, result.config.s_star)
    sigma = result.std_error_bound
    rows = []
    worst, worst_cond = 0.0, 0.0
    for (i, f), p_emp in sorted(result.empirical_posterior.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        p_ex = exact.entries.get((i, f))
        if p_ex is None:
            continue
        d = abs(float(p_emp) - float(p_ex))
        cond = d / result.conditional_std_error(f)
        worst = max(worst, d)
        worst_cond = max(worst_cond, cond)
        rows.append(("posterior", i.text, f.text, p_emp, p_ex, d, d / sigma, cond))
    freqs = result.shift_frequencies()
    for k in range(5):
        d = abs(freqs[k] - float(shift_exact[k]))
        rows.append(("shift", "", str(k), freqs[k], shift_exact[k], d, d / sigma, d / sigma))
    payload = result.to_json()
    payload["exact_posterior"] = exact.to_json()
    payload["exact_shift"] = shift_exact.to_json()
    payload["max_abs_diff"] = worst
    payload["max_sigma_multiple"] = worst / sigma
    payload["max_conditional_sigma_multiple"] = worst_cond
    header = ("kind", "initial", "final", "empirical", "exact", "abs_diff", "sigmas", "cond_sigmas")
    emit(args, header, rows, payload)
    if args.format == "table":
        print(f"\nmax |empirical - exact| = {worst:.6g} ({worst / sigma:.3g} sigma, "
              f"sigma = 1/(2 sqrt(n)) = {sigma:.3g}; {worst_cond:.3g} sigma against the per-final count; "
              f"backend {result.backend})")


def cmd_protocol(args) -> None:
    if args.cuts is not None and args.seed is not None:
        raise UsageError("give either --cuts or --seed, not both")
    if args.cuts is not None:
        cuts = args.cuts
    else:
        g = Xoshiro256StarStar(seed=args.seed if args.seed is not None else 0)
        cdf = sampling_cdf(bias_to_distribution(BiasSpec(args.epsilon, args.s_star)).p)
        cuts = [g.choice(cdf) for _ in range(args.num_cuts)]
    arr = encode_initial(args.alice, args.bob)
    trace = [(0, "", arr)]
    for step, k in enumerate(cuts, 1):
        arr = rotate(arr, k)
        trace.append((step, k, arr))
    result = evaluate_and(arr)
    if result != (args.alice & args.bob):
        raise InternalCheckError(f"decoded {result} but a AND b = {args.alice & args.bob}")
    rows = [(s, k, a.text) for s, k, a in trace]
    payload = {
        "a": args.alice,
        "b": args.bob,
        "cuts": cuts,
        "initial": trace[0][2].text,
        "trace": [a.text for _, _, a in trace],
        "final": arr.text,
        "total_shift": sum(cuts) % 5,
        "and": result,
    }
    emit(args, ("step", "cut", "arrangement"), rows, payload)
    if args.format == "table":
        print(f"\nAND = {result}")


def build_parser() -> argparse.ArgumentParser:
    default_format = os.environ.get(FORMAT_ENV)
    if default_format is not None and default_format not in FORMATS:
        default_format = None

    parser = argparse.ArgumentParser(prog="fivecard", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p, fallback="table"):
        p.add_argument("--format", choices=FORMATS, default=default_format or fallback)

    def add_shuffle(p):
        p.add_argument("--epsilon", type=float, help="single biased cut, in [-0.8, 0.2]")
        p.add_argument("--a", type=float, help="chain: probability a cut keeps the order")
        p.add_argument("--T", type=int, help="chain: number of cuts")
        p.add_argument("--s-star", type=int, default=0, choices=range(5), dest="s_star")

    p = sub.add_parser("posterior", help="closed-form posterior next to the enumeration oracle")
    add_shuffle(p)
    add_format(p)
    p.set_defaults(func=cmd_posterior)

    p = sub.add_parser("sweep", help="Case1 posteriors over a range of epsilon or T")
    p.add_argument("--epsilon", type=parse_float_range, help="start:stop:step")
    p.add_argument("--a", type=float)
    p.add_argument("--T", type=parse_int_range, help="start:stop")
    p.add_argument("--s-star", type=int, default=0, choices=range(5), dest="s_star")
    add_format(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bound", help="shuffles needed for |P - 1/2| <= C")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--parity", choices=[q.value for q in Parity], default="any")
    add_format(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="Monte Carlo run compared with the exact posterior")
    add_shuffle(p)
    p.add_argument("--n", type=positive_int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--initial", help="point prior on this arrangement instead of the default prior")
    add_format(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("protocol", help="trace one run of the trick")
    p.add_argument("--a", type=bit, required=True, dest="alice")
    p.add_argument("--b", type=bit, required=True, dest="bob")
    p.add_argument("--cuts", type=parse_cuts, help="comma separated cut indices")
    p.add_argument("--seed", type=int, help="draw the cuts instead")
    p.add_argument("--num-cuts", type=positive_int, default=1)
    p.add_argument("--epsilon", type=float, default=0.0, help="bias of drawn cuts")
    p.add_argument("--s-star", type=int, default=0, choices=range(5), dest="s_star")
    add_format(p)
    p.set_defaults(func=cmd_protocol)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"fivecard: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FiveCardError, ValueError) as e:
        print(f"fivecard: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except InternalCheckError as e:
        print(f"fivecard: internal check failed: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
