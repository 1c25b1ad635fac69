import math

import numpy as np
import pytest

from matprod.ensembles import (
    FactorEnsemble,
    FactorStats,
    make_bounded_perturbation,
    make_rademacher_rank_one,
)
from matprod.errors import (
    EnumerationInfeasibleError,
    InvalidConstructionError,
    InvalidParameterError,
    NothingToCheckError,
)
from matprod.simulate import NormBiasedTwoPointHook, ProductSpec
from matprod.verify import (
    CompareRow,
    check_bound_dominance,
    check_factor_contraction,
    check_martingale_bound,
    check_number_inequality,
    check_subquadratic,
    check_uniform_smoothness,
    comparison_rows,
    default_suite,
    projected_product_stats,
    sharpness_probe,
)


def scalar_spec(n=2, radius=0.1, mean=0.0):
    e = make_bounded_perturbation(1, mean * np.ones((1, 1)), radius, 1.0)
    return ProductSpec(factors=(e,) * n, z0=np.eye(1))


class TestUniformSmoothness:
    def test_small_run_clean(self):
        rep = check_uniform_smoothness(trials=200, seed=1729)
        assert rep.passed
        assert rep.name == "uniform-smoothness"
        assert rep.instances >= 200
        assert rep.worst_margin >= -rep.tolerance

    def test_equality_slice(self):
        rep = check_uniform_smoothness(p_list=(2.0,), trials=100, seed=3)
        assert rep.passed
        # two-sided at p = 2: margins hug zero from below
        assert -1e-10 <= rep.worst_margin <= 0.0

    def test_p_validation(self):
        with pytest.raises(InvalidParameterError):
            check_uniform_smoothness(p_list=(0.5,), trials=10)
        with pytest.raises(InvalidParameterError):
            check_uniform_smoothness(p_list=(math.inf,), trials=10)


class TestSharpnessProbe:
    def test_frozen_ratios(self):
        out = sharpness_probe(p=4.0, eps_values=(1e-2, 1e-3, 1e-4))
        ratios = [row["ratio"] for row in out]
        assert ratios[0] == pytest.approx(1.3329334799400263e-04, rel=1e-10)
        assert ratios[1] == pytest.approx(1.3333293333479999e-06, rel=1e-10)
        assert ratios[2] == pytest.approx(1.3333332933333348e-08, rel=1e-10)

    def test_constant_needed_approaches_p_minus_one(self):
        out = sharpness_probe(p=4.0, eps_values=(1e-2, 1e-3, 1e-4))
        needed = [row["constant_needed"] for row in out]
        assert needed == sorted(needed)
        assert all(c < 3.0 for c in needed)
        assert needed[-1] == pytest.approx(3.0, abs=1e-6)

    def test_needs_p_above_two(self):
        with pytest.raises(InvalidParameterError):
            sharpness_probe(p=2.0)


class TestSubquadratic:
    def test_clean(self):
        for p, q in [(2.0, 2.0), (4.0, 2.0)]:
            rep = check_subquadratic(p, q, trials=150, seed=1729)
            assert rep.passed, (p, q, rep.worst_margin)
            assert rep.name == "subquadratic"
            # strong and weak variant per instance
            assert rep.instances == 300

    def test_negative_control_fires(self):
        rep = check_subquadratic(2.0, 2.0, trials=50, seed=1729, constant=0.5)
        assert rep.name == "subquadratic-constant-0.5"
        assert rep.violations >= 1
        assert not rep.passed
        assert rep.failures
        assert rep.failures[0]["margin"] < 0

    def test_parameter_validation(self):
        with pytest.raises(InvalidParameterError):
            check_subquadratic(2.0, 4.0, trials=1)
        with pytest.raises(InvalidParameterError):
            check_subquadratic(4.0, 1.0, trials=1)

    def test_rejects_uncentered_construction(self):
        def biased(rng):
            return [(np.zeros((1, 1)), [(np.ones((1, 1)), 1.0)])]

        with pytest.raises(InvalidConstructionError):
            check_subquadratic(2.0, 2.0, construction=biased, trials=1)

    def test_rejects_bad_probabilities(self):
        def lopsided(rng):
            y = np.ones((1, 1))
            return [(np.zeros((1, 1)), [(y, 0.4), (-y, 0.4)])]

        with pytest.raises(InvalidConstructionError):
            check_subquadratic(2.0, 2.0, construction=lopsided, trials=1)


class TestMartingale:
    def test_equality_at_p2(self):
        rep = check_martingale_bound(2.0, 2.0, n=5, trials=30, seed=1729)
        assert rep.passed
        assert -1e-10 <= rep.worst_margin <= 0.0

    def test_clean_above_two(self):
        rep = check_martingale_bound(4.0, 2.0, n=5, trials=30, seed=1729)
        assert rep.passed
        assert rep.worst_margin >= 0.0

    def test_path_budget(self):
        with pytest.raises(EnumerationInfeasibleError):
            check_martingale_bound(2.0, 2.0, n=17, trials=1)

    def test_parameter_validation(self):
        with pytest.raises(InvalidParameterError):
            check_martingale_bound(2.0, 3.0, trials=1)


class TestFactorContraction:
    def test_clean(self):
        rep = check_factor_contraction(4.0, 2.0, trials=120, seed=1729)
        assert rep.passed
        assert rep.instances == 120

    def test_parameter_validation(self):
        with pytest.raises(InvalidParameterError):
            check_factor_contraction(2.0, 4.0, trials=1)


class TestNumberInequality:
    def test_clean(self):
        rep = check_number_inequality(trials=20_000, seed=1729)
        assert rep.passed
        assert rep.instances == 20_000

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            check_number_inequality(trials=10, length_range=(0, 5))
        with pytest.raises(InvalidParameterError):
            check_number_inequality(trials=10, length_range=(5, 2))


class TestComparisonRows:
    def test_scalar_hand_values(self):
        rows, meta = comparison_rows(scalar_spec(), p=2.0, q=2.0, trials=0,
                                     bounds=["concentration-mean"])
        assert meta["source"] == "enumeration"
        assert meta["outcomes"] == 4
        (row,) = rows
        assert row.quantity == "concentration-mean"
        assert row.empirical_kind == "exact"
        assert row.empirical == pytest.approx(0.105, rel=1e-14)
        assert row.bound == pytest.approx(0.14213141815501529, rel=1e-14)
        assert row.ratio == pytest.approx(1.3536325538572885, rel=1e-12)

    def test_deterministic_ratio_is_exactly_one(self):
        rows, _ = comparison_rows(scalar_spec(radius=0.0, mean=0.2), p=2.0,
                                  q=2.0, trials=0, bounds=["growth-moment"])
        assert rows[0].ratio == 1.0

    def test_default_bound_set_square_independent(self):
        rows, _ = comparison_rows(scalar_spec(), trials=0)
        names = [r.quantity for r in rows]
        assert names == ["growth-moment", "concentration-moment",
                         "expectation-growth", "expectation-concentration",
                         "spectral-radius-expectation"]

    def test_exact_tail_rows(self):
        rows, _ = comparison_rows(scalar_spec(), trials=0, bounds=[],
                                  thresholds_growth=(1.2,),
                                  thresholds_deviation=(0.2,))
        growth, dev = rows
        assert growth.quantity == "tail-growth@1.2"
        assert growth.empirical == pytest.approx(0.25, rel=1e-14)
        assert growth.threshold == pytest.approx(1.2, rel=1e-14)
        assert growth.conditions_met
        assert dev.quantity == "tail-concentration@0.2"
        assert dev.empirical == pytest.approx(0.25, rel=1e-14)

    def test_condition_violated_tail_is_skipped(self):
        rows, _ = comparison_rows(scalar_spec(), trials=0, bounds=[],
                                  thresholds_growth=(1.005,))
        (row,) = rows
        assert row.skipped
        assert row.note == "condition violated"
        assert math.isinf(row.bound)

    def test_monte_carlo_rows_carry_limits(self):
        rows, meta = comparison_rows(scalar_spec(), trials=128, seed=5,
                                     bounds=["expectation-concentration"])
        assert meta["source"] == "monte-carlo"
        assert meta["trials"] == 128
        (row,) = rows
        assert row.empirical_kind == "estimate"
        assert row.limit is not None
        assert row.empirical <= row.limit

    def test_fallback_downgrades_with_notice(self):
        spec = scalar_spec(n=21)
        with pytest.raises(EnumerationInfeasibleError):
            comparison_rows(spec, trials=0, bounds=["expectation-growth"])
        rows, meta = comparison_rows(spec, trials=0,
                                     bounds=["expectation-growth"],
                                     mc_fallback_trials=64)
        assert meta["notice"] == "enumeration infeasible; downgraded to Monte Carlo"
        assert meta["source"] == "monte-carlo"
        assert meta["trials"] == 64
        assert rows[0].empirical_kind == "estimate"

    def test_unknown_bound_name(self):
        with pytest.raises(InvalidParameterError):
            comparison_rows(scalar_spec(), trials=0, bounds=["no-such-bound"])

    def test_inverse_rows_exact_dominance(self):
        e = make_bounded_perturbation(2, 0.1 * np.eye(2), 0.1, 3.0)
        spec = ProductSpec(factors=(e,) * 3, z0=np.eye(2), mode="inverse")
        rows, meta = comparison_rows(spec, trials=0)
        assert meta["outcomes"] == 8
        names = [r.quantity for r in rows]
        assert names == ["inverse-expectation-growth",
                         "inverse-expectation-concentration"]
        for row in rows:
            assert not row.skipped
            assert row.bound >= row.empirical

    def test_inverse_rows_skip_without_perturbation_stats(self):
        atoms = (np.array([[0.9]]), np.array([[1.1]]))
        plain = FactorEnsemble(dim=1, sampler=lambda rng: atoms[0],
                               stats=FactorStats(1.0, 0.1),
                               support=((atoms[0], 0.5), (atoms[1], 0.5)))
        spec = ProductSpec(factors=(plain,) * 2, z0=np.eye(1), mode="inverse")
        rows, _ = comparison_rows(spec, trials=0)
        assert all(r.skipped for r in rows)
        assert all(r.note == "factors carry no perturbation statistics" for r in rows)

    def test_lowrank_rows_exact(self):
        e = make_rademacher_rank_one(6)
        spec = ProductSpec(factors=(e,) * 4, z0=np.eye(6)[:, :1])
        rows, meta = comparison_rows(spec, p=4.0, q=2.0, trials=0,
                                     bounds=["lowrank-growth", "lowrank-concentration"])
        assert meta["outcomes"] == 12 ** 4
        growth, conc = rows
        assert growth.bound == pytest.approx(math.e, rel=1e-12)
        assert growth.bound >= growth.empirical
        assert conc.bound >= conc.empirical

    def test_adapted_rows_exact(self):
        hook = NormBiasedTwoPointHook(2, scale=0.05, high=0.7)
        spec = ProductSpec(factors=(), z0=np.eye(2), mode="adapted",
                           adapted_hook=hook, n_steps=8)
        rows, meta = comparison_rows(spec, p=2.0, q=2.0, trials=0)
        assert meta["outcomes"] == 256
        names = [r.quantity for r in rows]
        assert names == ["adapted-growth-moment", "adapted-concentration-moment"]
        for row in rows:
            assert row.bound >= row.empirical


class TestBoundDominance:
    def test_exact_scalar_clean(self):
        rep = check_bound_dominance(scalar_spec(), p=2.0, q=2.0, trials=0)
        assert rep.passed
        assert "source=enumeration" in rep.notes

    def test_skipped_rows_are_noted_not_counted(self):
        rep = check_bound_dominance(scalar_spec(), trials=0,
                                    thresholds_growth=(1.005,))
        assert rep.passed
        assert any("skipped tail-growth@1.005" in n for n in rep.notes)

    def test_monte_carlo_uses_confidence_limits(self):
        rep = check_bound_dominance(
            scalar_spec(), trials=256,
            bounds=["expectation-growth", "expectation-concentration"],
            thresholds_growth=(1.2,))
        assert rep.passed
        assert "source=monte-carlo" in rep.notes

    def test_nothing_to_check(self):
        with pytest.raises(NothingToCheckError):
            check_bound_dominance(scalar_spec(), trials=0, bounds=[])
        with pytest.raises(NothingToCheckError):
            check_bound_dominance(scalar_spec(n=21), trials=0)

    def test_inverse_exact(self):
        e = make_bounded_perturbation(2, 0.1 * np.eye(2), 0.1, 3.0)
        spec = ProductSpec(factors=(e,) * 3, z0=np.eye(2), mode="inverse")
        rep = check_bound_dominance(spec, trials=0)
        assert rep.passed

    def test_adapted_exact(self):
        hook = NormBiasedTwoPointHook(2, scale=0.05, high=0.7)
        spec = ProductSpec(factors=(), z0=np.eye(2), mode="adapted",
                           adapted_hook=hook, n_steps=8)
        rep = check_bound_dominance(spec, p=2.0, q=2.0, trials=0)
        assert rep.passed


class TestCompareRowJson:
    def test_nan_empirical_omitted(self):
        row = CompareRow("x", math.nan, "none", 1.0, "x", skipped=True)
        out = row.to_json()
        assert "empirical" not in out
        assert "ratio" not in out
        assert "note" not in out
        assert out["skipped"] is True

    def test_full_row_round_trips_fields(self):
        row = CompareRow("x", 0.5, "exact", 1.0, "x", limit=0.6,
                         threshold=2.0, ratio=2.0, note="hi")
        out = row.to_json()
        assert out["empirical"] == 0.5
        assert out["limit"] == 0.6
        assert out["threshold"] == 2.0
        assert out["note"] == "hi"


class TestProjectedProductStats:
    def test_analytic_quality(self):
        e = make_rademacher_rank_one(6)
        spec = ProductSpec(factors=(e,) * 4, z0=np.eye(6)[:, :1])
        stats, quality = projected_product_stats(spec)
        assert quality == "analytic"
        assert stats.projected_rank == 1
        for f in stats.factors:
            assert f.sigma == pytest.approx(math.sqrt(1.0 / 6.0), rel=1e-14)

    def test_sampled_quality_flagged(self):
        e = make_bounded_perturbation(3, np.zeros((3, 3)), 0.3, 3.0,
                                      support="uniform-sphere")
        spec = ProductSpec(factors=(e,) * 2, z0=np.eye(3)[:, :1])
        stats, quality = projected_product_stats(spec)
        assert quality == "lower-estimate"


class TestDefaultSuite:
    def test_suite_is_clean_with_firing_control(self):
        reports, ok = default_suite(seed=1729)
        assert ok
        assert len(reports) == 15
        controls = [(r, flag) for r, flag in reports if flag]
        assert len(controls) == 1
        control, _ = controls[0]
        assert control.name == "subquadratic-constant-0.5"
        assert control.violations >= 1
        for rep, is_control in reports:
            if not is_control:
                assert rep.passed, rep.name
