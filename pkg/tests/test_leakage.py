import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fivecard.arrangement import Arrangement, encode_initial, restricted_initial_set, rotate
from fivecard.errors import ArrangementError, ParameterError
from fivecard.leakage import (
    Case,
    PosteriorTable,
    PriorSpec,
    adversary_report,
    final_marginal_case1,
    final_marginal_case2,
    level2_bounds,
    posterior_closed_repeated,
    posterior_closed_single,
    posterior_exact,
    repeated_deviation,
    shift_match_probability,
)
from fivecard.shuffle_model import (
    BiasSpec,
    CutChain,
    ShiftDistribution,
    bias_to_distribution,
    chain_distribution_power,
)

EPS_GRID = [k / 20 for k in range(-16, 5)]
EPS_GRID_EXACT = [Fraction(k, 20) for k in range(-16, 5)]
I1, I2 = Arrangement("rBBrB"), Arrangement("BrBrB")


def oracle_posterior(prior, shift):
    """Bayes by hand on strings: {final: {initial: P(initial | final)}} for reachable finals."""
    joint = {}
    for init, w in prior.items():
        for k, pk in enumerate(shift):
            final = init[-k:] + init[:-k] if k else init
            joint.setdefault(final, {}).setdefault(init, 0)
            joint[final][init] += w * pk
    out = {}
    for final, row in joint.items():
        m = sum(row.values())
        if m > 0:
            out[final] = {i: v / m for i, v in row.items()}
    return out


def oracle_map_success(prior, shift):
    joint = {}
    for init, w in prior.items():
        for k, pk in enumerate(shift):
            final = init[-k:] + init[:-k] if k else init
            joint.setdefault(final, {}).setdefault(init, 0)
            joint[final][init] += w * pk
    # sum over finals of max_I P(I, F) equals sum of P(F) max_I P(I | F)
    return sum(max(row.values()) for row in joint.values())


def as_nested(table):
    return {f.text: {i.text: p for i, p in table.row(f).items()} for f in table.reachable_finals()}


DEFAULT = {"rBBrB": 0.5, "BrBrB": 0.5}


class TestPriorSpec:
    def test_default(self):
        p = PriorSpec.default()
        assert p.support() == [I2, I1]
        assert p[I1] == 0.5 and p["rBBBr"] == 0

    @pytest.mark.parametrize("w", [{}, {"rBBrB": 0.0}, {"rBBrB": 0.6, "BrBrB": 0.6}, {"rBBrB": -0.5, "BrBrB": 1.5}])
    def test_invalid(self, w):
        with pytest.raises(ParameterError):
            PriorSpec(w)

    def test_invalid_key(self):
        with pytest.raises(ArrangementError):
            PriorSpec({"BBBBB": 1.0})


class TestPosteriorExact:
    def test_uniform_half(self):
        t = posterior_exact(PriorSpec.default(), ShiftDistribution.uniform())
        assert len(t.entries) == 10
        assert all(p == pytest.approx(0.5, abs=1e-15) for p in t.entries.values())

    def test_bias_example(self):
        t = posterior_exact(PriorSpec.default(), bias_to_distribution(BiasSpec(0.1)))
        # oracle: P(rBBrB, rBBrB) = .5 * .1, P(BrBrB -> rBBrB at cut 2) = .5 * .225
        assert t[(I1, I1)] == pytest.approx(0.05 / (0.05 + 0.1125), abs=1e-12)
        assert t[(I1, I1)] == pytest.approx(4 / 13, abs=1e-12)

    def test_point_prior(self):
        t = posterior_exact(PriorSpec.point("rBBrB"), bias_to_distribution(BiasSpec(-0.3, 2)))
        assert t.initials() == [I1]
        assert all(p == 1 for p in t.entries.values())

    @pytest.mark.parametrize("eps", [-0.8, -0.35, 0.0, 0.1, 0.2])
    @pytest.mark.parametrize("s", range(5))
    def test_matches_string_oracle(self, eps, s):
        dist = bias_to_distribution(BiasSpec(eps, s))
        got = as_nested(posterior_exact(PriorSpec.default(), dist, s))
        want = oracle_posterior(DEFAULT, dist.p)
        assert got.keys() == want.keys()
        for f in want:
            assert got[f] == pytest.approx(want[f], abs=1e-14)

    def test_full_prior_oracle(self):
        prior = {"rBBrB": 0.1, "BrBrB": 0.2, "rBBBr": 0.3, "BrBBr": 0.4}
        dist = ShiftDistribution((0.05, 0.3, 0.15, 0.25, 0.25))
        t = posterior_exact(PriorSpec(prior), dist)
        assert len(t.finals()) == 10
        want = oracle_posterior(prior, dist.p)
        got = as_nested(t)
        for f in want:
            assert {i: v for i, v in got[f].items() if v} == pytest.approx(
                {i: v for i, v in want[f].items() if v}, abs=1e-14)

    def test_unreachable_labelled(self):
        t = posterior_exact(PriorSpec.default(), ShiftDistribution.delta(0))
        assert {f.text for f in t.reachable_finals()} == {"rBBrB", "BrBrB"}
        assert len(t.finals_of(Case.UNREACHABLE)) == 3
        assert all(f in {I1, I2} for _, f in t.entries)

    def test_rows_sum_to_one(self):
        t = posterior_exact(PriorSpec.default(), bias_to_distribution(BiasSpec(0.13, 3)), 3)
        for f in t.reachable_finals():
            assert sum(t.row(f).values()) == pytest.approx(1, abs=1e-12)


class TestClosedSingle:
    def test_unbiased(self):
        assert all(p == 0.5 for p in posterior_closed_single(0.0).entries.values())

    def test_boundary(self):
        t = posterior_closed_single(0.2, 0)
        assert t[(I1, I1)] == 0 and t[(I2, I2)] == 0
        assert t[(I1, I2)] == pytest.approx(1) and t[(I2, I1)] == pytest.approx(1)

    def test_case2_half(self):
        t = posterior_closed_single(0.1, 0)
        assert t.cases[Arrangement("rBrBB")] is Case.CASE2
        assert t[(I1, "rBrBB")] == 0.5

    def test_values(self):
        t = posterior_closed_single(Fraction(1, 10), 0)
        assert t[(I1, I1)] == Fraction(4, 13) and t[(I2, I1)] == Fraction(9, 13)

    def test_statement_not_proof_typo(self):
        # the other Case1 posterior is (4 + 5e)/(8 - 15e); (4 + 15e) would not complement
        eps = Fraction(1, 10)
        t = posterior_closed_single(eps)
        assert t[(I2, I1)] == (Fraction(1, 5) + eps / 4) / (Fraction(2, 5) - 3 * eps / 4)
        assert t[(I2, I1)] != (4 + 15 * eps) / (8 - 15 * eps)

    def test_range(self):
        with pytest.raises(ParameterError):
            posterior_closed_single(0.25)
        with pytest.raises(ParameterError):
            posterior_closed_single(0.1, 5)

    @pytest.mark.parametrize("s", range(5))
    def test_oracle_agreement_exact(self, s):
        for eps in EPS_GRID_EXACT:
            closed = posterior_closed_single(eps, s)
            exact = posterior_exact(PriorSpec.default(exact=True), bias_to_distribution(BiasSpec(eps, s)), s)
            assert closed.cases == exact.cases
            assert closed.entries == exact.entries

    @pytest.mark.parametrize("s", range(5))
    def test_oracle_agreement_float(self, s):
        for eps in EPS_GRID:
            closed = posterior_closed_single(eps, s)
            exact = posterior_exact(PriorSpec.default(), bias_to_distribution(BiasSpec(eps, s)), s)
            assert closed.max_abs_diff(exact) <= 1e-12

    @pytest.mark.parametrize("s", range(5))
    def test_case1_complementary_and_signs(self, s):
        for eps in EPS_GRID_EXACT:
            t = posterior_closed_single(eps, s)
            for f in t.finals_of(Case.CASE1):
                row = t.row(f)
                assert sum(row.values()) == 1
                hit = next(i for i in row if rotate(i, s) == f)
                miss = next(i for i in row if i != hit)
                if eps > 0:
                    assert row[hit] < Fraction(1, 2) < row[miss]
                elif eps < 0:
                    assert row[hit] > Fraction(1, 2) > row[miss]
            for f in t.finals_of(Case.CASE2):
                assert all(p == Fraction(1, 2) for p in t.row(f).values())

    def test_case2_unreachable_without_shuffle(self):
        t = posterior_closed_single(-0.8)
        assert len(t.finals_of(Case.UNREACHABLE)) == 3
        assert t[(I1, I1)] == 1


class TestClosedRepeated:
    def test_uniform(self):
        for T in (0, 1, 4):
            t = posterior_closed_repeated(CutChain(0.2, T))
            if T:
                assert all(p == pytest.approx(0.5, abs=1e-15) for p in t.entries.values())

    def test_T0(self):
        for a in (0.0, 0.2, 0.7):
            t = posterior_closed_repeated(CutChain(a, 0))
            assert t[(I1, I1)] == 1 and t[(I1, I2)] == 0

    def test_a0_T1(self):
        t = posterior_closed_repeated(CutChain(0.0, 1))
        assert t[(I1, I1)] == pytest.approx(0, abs=1e-15)
        assert t[(I1, I2)] == pytest.approx(1, abs=1e-15)

    def test_exact_reduction(self):
        from fivecard.shuffle_model import effective_epsilon
        for a in (Fraction(0), Fraction(1, 10), Fraction(1, 5), Fraction(2, 3), Fraction(1)):
            for T in range(15):
                chain = CutChain(a, T)
                closed = posterior_closed_repeated(chain)
                assert closed.entries == posterior_closed_single(effective_epsilon(chain), 0).entries
                assert closed.entries == posterior_exact(PriorSpec.default(exact=True),
                                                         chain_distribution_power(chain)).entries

    def test_parity(self):
        # exact: for a near 1/5 the float deviation underflows below 1 ulp of 1/2
        for a in (Fraction(0), Fraction(1, 10), Fraction(3, 20), Fraction(19, 100)):
            for T in range(1, 21):
                p = posterior_closed_repeated(CutChain(a, T))[(I1, I1)]
                assert (p > Fraction(1, 2)) if T % 2 == 0 else (p < Fraction(1, 2))

    def test_parity_float(self):
        for T in range(1, 21):
            p = posterior_closed_repeated(CutChain(0.0, T))[(I1, I1)]
            assert (p > 0.5) if T % 2 == 0 else (p < 0.5)

    def test_deviation_formula(self):
        for a in (Fraction(0), Fraction(1, 20), Fraction(9, 10)):
            for T in range(12):
                t = posterior_closed_repeated(CutChain(a, T))
                devs = {abs(p - Fraction(1, 2)) for f in t.finals_of(Case.CASE1) for p in t.row(f).values()}
                assert devs == {repeated_deviation(CutChain(a, T))}


class TestLemmas:
    @pytest.mark.parametrize("eps", EPS_GRID_EXACT)
    def test_shift_match(self, eps):
        dist = bias_to_distribution(BiasSpec(eps, 0))
        assert shift_match_probability(I1, I1, dist) == Fraction(1, 5) - eps
        assert shift_match_probability(I2, I2, dist) == Fraction(1, 5) - eps
        assert shift_match_probability(I1, I2, dist) == Fraction(1, 5) + eps / 4
        assert shift_match_probability(I2, I1, dist) == Fraction(1, 5) + eps / 4

    def test_shift_match_examples(self):
        dist = bias_to_distribution(BiasSpec(0.1, 0))
        assert shift_match_probability("rBBrB", "rBBrB", dist) == pytest.approx(0.1)
        assert shift_match_probability("rBBrB", "BrBrB", dist) == pytest.approx(0.225)
        assert shift_match_probability(I1, I1, ShiftDistribution.uniform()) == pytest.approx(0.2)

    def test_shift_match_domain(self):
        with pytest.raises(ArrangementError):
            shift_match_probability("rBBBr", I1, ShiftDistribution.uniform())

    def test_marginal_examples(self):
        assert final_marginal_case1(0.0) == pytest.approx(0.2)
        assert final_marginal_case1(0.2) == pytest.approx(0.125)
        assert final_marginal_case1(-0.8) == pytest.approx(0.5)
        with pytest.raises(ParameterError):
            final_marginal_case1(0.3)

    @pytest.mark.parametrize("eps", EPS_GRID_EXACT)
    def test_marginals_total_one(self, eps):
        assert 2 * final_marginal_case1(eps) + 3 * final_marginal_case2(eps) == 1

    @pytest.mark.parametrize("eps", EPS_GRID_EXACT)
    @pytest.mark.parametrize("s", range(5))
    def test_marginals_against_enumeration(self, eps, s):
        report = adversary_report(PriorSpec.default(exact=True), bias_to_distribution(BiasSpec(eps, s)), s)
        for f, m in report.final_marginals.items():
            want = final_marginal_case1(eps) if report.posterior.cases[f] is Case.CASE1 else final_marginal_case2(eps)
            assert m == want

    @pytest.mark.parametrize("eps", EPS_GRID_EXACT)
    def test_same_initial_same_cut(self, eps):
        # P(f(I, s) = f(I, r)) = P(s = r): the cut map of a fixed arrangement is one-to-one
        for s_star in range(5):
            dist = bias_to_distribution(BiasSpec(eps, s_star))
            for init in restricted_initial_set():
                for r in range(5):
                    target = rotate(init, r)
                    assert sum(dist[k] for k in range(5) if rotate(init, k) == target) == dist[r]


class TestAdversary:
    def test_uniform(self):
        r = adversary_report(PriorSpec.default(), ShiftDistribution.uniform())
        assert r.map_guess_success == pytest.approx(0.5)
        assert r.max_deviation == pytest.approx(0, abs=1e-15)

    def test_max_bias(self):
        dist = bias_to_distribution(BiasSpec(0.2, 0))
        r = adversary_report(PriorSpec.default(), dist)
        want = oracle_map_success(DEFAULT, dist.p)
        assert want == pytest.approx(2 * 0.125 * 1 + 0.75 * 0.5)
        assert r.map_guess_success == pytest.approx(want, abs=1e-15)
        assert r.map_guess_success == pytest.approx(0.625)

    def test_no_shuffle(self):
        r = adversary_report(PriorSpec.default(), ShiftDistribution.delta(0))
        assert r.map_guess_success == 1
        assert r.map_guesses == {I1: I1, I2: I2}

    def test_tie_break(self):
        r = adversary_report(PriorSpec.default(), ShiftDistribution.uniform())
        assert set(r.map_guesses.values()) == {I2}

    @given(st.sampled_from(EPS_GRID_EXACT), st.integers(0, 4))
    def test_at_least_coin_flip(self, eps, s):
        r = adversary_report(PriorSpec.default(exact=True), bias_to_distribution(BiasSpec(eps, s)), s)
        assert r.map_guess_success >= Fraction(1, 2)
        assert (r.map_guess_success == Fraction(1, 2)) == (r.max_deviation == 0)
        assert sum(r.final_marginals.values()) == 1
        assert r.map_guess_success == oracle_map_success(
            {"rBBrB": Fraction(1, 2), "BrBrB": Fraction(1, 2)}, bias_to_distribution(BiasSpec(eps, s)).p)

    def test_json(self):
        r = adversary_report(PriorSpec.default(), bias_to_distribution(BiasSpec(0.1)))
        obj = json.loads(json.dumps(r.to_json()))
        assert obj["map_guess_success"] == pytest.approx(float(r.map_guess_success))


class TestLevel2:
    def test_extreme(self):
        assert level2_bounds(0.2) == (pytest.approx(0, abs=1e-15), pytest.approx(1))

    def test_small(self):
        lo, hi = level2_bounds(1e-9)
        assert lo == pytest.approx(0.5, abs=1e-8) and hi == pytest.approx(0.5, abs=1e-8)

    def test_tenth(self):
        assert level2_bounds(Fraction(1, 10)) == (Fraction(4, 13), Fraction(9, 13))

    @pytest.mark.parametrize("e", [0, -0.1, 0.25, 0.5])
    def test_range(self, e):
        with pytest.raises(ParameterError):
            level2_bounds(e)


class TestSerialisation:
    def test_json_round_trip(self):
        t = posterior_closed_single(0.1, 2)
        back = PosteriorTable.from_json(json.loads(json.dumps(t.to_json())))
        assert back.cases == t.cases
        assert back.max_abs_diff(t) == 0

    def test_json_schema(self):
        rows = posterior_closed_single(-0.8).to_json()
        assert {r["case"] for r in rows} == {"Case1", "Unreachable"}
        for r in rows:
            assert set(r) == {"final", "case", "posteriors"}
            if r["case"] == "Unreachable":
                assert r["posteriors"] == {}

    def test_rows(self):
        rows = posterior_closed_single(0.1).to_rows()
        assert len(rows) == 10
        assert ("rBBrB", "rBBrB", "Case1", pytest.approx(4 / 13)) in rows

    def test_mismatched_tables(self):
        with pytest.raises(ValueError):
            posterior_closed_single(0.1).max_abs_diff(posterior_closed_single(-0.8))


def test_encode_consistency():
    assert restricted_initial_set() == {encode_initial(1, 0), encode_initial(0, 0)}
