"""Tests for the logistic regression fitter and the agreement design."""

import math
import warnings

import numpy as np
import pytest

from castnet.corpus import CharacterRegistry
from castnet.errors import FormatError
from castnet.extraction import pair_key
from castnet.stats import (
    CollinearityError,
    RegressionDesign,
    agreement_design,
    format_fit_table,
    log_likelihood,
    logistic_fit,
    read_design,
    score,
    write_design,
)
from castnet.survey import (
    RespondentProfile,
    SurveyResponse,
    Task1Entry,
    Task1Response,
    Task2Response,
)


def design_of(x, y, columns=None):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] == 1:
        x = x.T
    columns = columns or tuple(f"x{i + 1}" for i in range(x.shape[1]))
    return RegressionDesign(tuple(columns), x, np.asarray(y, dtype=float))


def random_design(rng, n=40, p=2):
    x = rng.normal(size=(n, p))
    y = rng.integers(0, 2, size=n)
    if y.max() == y.min():
        y[0] = 1 - y[0]
    return design_of(x, y)


class TestLogLikelihood:
    def test_zero_beta_gives_n_log_half(self):
        d = random_design(np.random.default_rng(0), n=23)
        assert log_likelihood(d, np.zeros(3)) == pytest.approx(23 * math.log(0.5))

    def test_duplicated_row_doubles_its_contribution(self):
        x = [[0.4], [1.3], [-0.7]]
        d1 = design_of(x, [1, 0, 1])
        d2 = design_of(x + [[-0.7]], [1, 0, 1, 1])
        beta = np.array([0.3, -1.1])
        eta = 0.3 + -1.1 * -0.7
        row_ll = 1 * eta - math.log1p(math.exp(eta))
        assert log_likelihood(d2, beta) == pytest.approx(
            log_likelihood(d1, beta) + row_ll)

    def test_finite_for_extreme_beta(self):
        d = random_design(np.random.default_rng(1))
        assert math.isfinite(log_likelihood(d, np.array([500.0, -800.0, 300.0])))

    def test_gradient_matches_central_differences(self):
        rng = np.random.default_rng(2)
        h = 1e-5
        for _ in range(5):
            d = random_design(rng, n=30, p=3)
            beta = rng.normal(scale=0.8, size=4)
            analytic = score(d, beta)
            numeric = np.empty_like(analytic)
            for j in range(len(beta)):
                up, down = beta.copy(), beta.copy()
                up[j] += h
                down[j] -= h
                numeric[j] = (log_likelihood(d, up) - log_likelihood(d, down)) / (2 * h)
            assert np.max(np.abs(analytic - numeric)) < 1e-6

    def test_wrong_beta_length_rejected(self):
        d = random_design(np.random.default_rng(3), p=2)
        with pytest.raises(ValueError, match="coefficients"):
            log_likelihood(d, np.zeros(2))


class TestLogisticFit:
    def test_four_row_fit_beats_exhaustive_grid(self):
        # brute-force likelihood oracle over beta in [-5,5]^2 at step 0.01
        x = np.array([-1.5, -0.5, 0.5, 1.5])
        y = np.array([0.0, 1.0, 0.0, 1.0])
        d = design_of(x, y)
        grid = np.arange(-5.0, 5.0 + 1e-9, 0.01)
        b0 = grid[:, None]
        b1 = grid[None, :]
        ll = np.zeros((len(grid), len(grid)))
        for xi, yi in zip(x, y):
            eta = b0 + b1 * xi
            ll += yi * eta - np.logaddexp(0.0, eta)
        best_grid = float(ll.max())
        fit = logistic_fit(d)
        assert fit.converged
        assert fit.log_likelihood >= best_grid - 1e-12
        assert abs(fit.log_likelihood - best_grid) < 1e-4

    def test_recovers_known_coefficients(self):
        # Monte Carlo oracle: simulate from beta = (-0.5, 1.2) and refit
        rng = np.random.default_rng(42)
        x = rng.normal(size=2000)
        p = 1.0 / (1.0 + np.exp(-(-0.5 + 1.2 * x)))
        y = (rng.random(2000) < p).astype(float)
        fit = logistic_fit(design_of(x, y))
        assert fit.converged
        assert abs(fit.coefficients[0] - -0.5) < 0.15
        assert abs(fit.coefficients[1] - 1.2) < 0.15

    def test_balanced_symmetric_predictor_has_null_effect(self):
        x = np.array([1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0])
        y = np.array([1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0])
        fit = logistic_fit(design_of(x, y))
        assert fit.converged
        assert abs(fit.coefficients[1]) < 2 * fit.standard_errors[1]
        assert abs(fit.coefficients[1]) < 1e-6  # exact symmetry here

    def test_converged_score_is_small_and_hessian_nsd(self):
        rng = np.random.default_rng(5)
        d = random_design(rng, n=60, p=3)
        fit = logistic_fit(d)
        assert fit.converged
        assert np.max(np.abs(score(d, fit.coefficients))) < 1e-6
        x = d.design_matrix()
        eta = x @ fit.coefficients
        w = 1.0 / (1.0 + np.exp(-eta))
        w = w * (1 - w)
        hessian = -(x.T @ (x * w[:, None]))
        assert np.all(np.linalg.eigvalsh(hessian) <= 1e-9)

    def test_fit_improves_on_intercept_only(self):
        rng = np.random.default_rng(6)
        d = random_design(rng, n=50, p=2)
        fit = logistic_fit(d)
        base = np.mean(d.outcome)
        intercept_only = np.array([math.log(base / (1 - base)), 0.0, 0.0])
        assert fit.log_likelihood >= log_likelihood(d, intercept_only) - 1e-12

    def test_rescaling_predictor_rescales_coefficient_only(self):
        rng = np.random.default_rng(7)
        d = random_design(rng, n=80, p=2)
        fit = logistic_fit(d)
        c = 37.5
        scaled = design_of(d.predictors * np.array([c, 1.0]), d.outcome)
        refit = logistic_fit(scaled)
        assert refit.coefficients[1] == pytest.approx(fit.coefficients[1] / c, rel=1e-6)
        assert refit.z_scores[1] == pytest.approx(fit.z_scores[1], abs=1e-6)
        assert refit.p_values[1] == pytest.approx(fit.p_values[1], abs=1e-6)

    def test_p_values_within_unit_interval(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            fit = logistic_fit(random_design(rng))
            assert np.all((fit.p_values >= 0) & (fit.p_values <= 1))

    def test_perfect_separation_reported_not_masked(self):
        x = np.array([-2.0, -1.0, 1.0, 2.0, -1.5, 1.5])
        y = np.array([0.0, 0.0, 1.0, 1.0, 0.0, 1.0])
        fit = logistic_fit(design_of(x, y))
        assert not fit.converged
        assert abs(fit.coefficients[1]) > 3.0  # diverging slope left visible
        assert np.all((fit.p_values >= 0) & (fit.p_values <= 1))

    def test_collinear_columns_named(self):
        rng = np.random.default_rng(9)
        x1 = rng.normal(size=30)
        x = np.column_stack([x1, rng.normal(size=30), 2.0 * x1])
        y = rng.integers(0, 2, size=30)
        y[0], y[1] = 0, 1
        with pytest.raises(CollinearityError, match="x3"):
            logistic_fit(design_of(x, y))

    def test_single_class_outcome_rejected(self):
        with pytest.raises(ValueError, match="both classes"):
            logistic_fit(design_of([0.0, 1.0, 2.0], [1, 1, 1]))

    def test_too_few_rows_rejected(self):
        with pytest.raises(ValueError, match="rows"):
            logistic_fit(design_of([[0.0, 1.0], [1.0, 0.0]], [0, 1]))


class TestDesignValidation:
    def test_missing_values_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            design_of([[1.0], [float("nan")], [0.0]], [0, 1, 0])

    def test_non_binary_outcome_rejected(self):
        with pytest.raises(ValueError, match="0/1"):
            design_of([[1.0], [2.0]], [0.0, 0.5])

    def test_column_count_must_match(self):
        with pytest.raises(ValueError, match="column names"):
            RegressionDesign(("a",), np.zeros((3, 2)), np.zeros(3))


def make_response(rid, pairs1, pairs2, profile_kwargs):
    entries = [Task1Entry(pair_key(a, b), w, i) for i, (a, b, w) in enumerate(pairs1)]
    cells = {pair_key(a, b): w for a, b, w in pairs2}
    return SurveyResponse(
        rid, "story",
        task1=Task1Response(rid, "story", entries),
        task2=Task2Response(rid, "story", cells),
        profile=RespondentProfile(rid, **profile_kwargs),
    )


class TestAgreementDesign:
    registry = CharacterRegistry("story", [("A", []), ("B", []), ("C", []), ("D", [])])

    def build(self, threshold=None):
        agree = [("A", "B", 6.0), ("A", "C", 3.0)]
        echo = [("A", "B", 10.0), ("A", "C", 5.0)]  # same shape: r = 1
        clash = [("A", "B", 1.0), ("A", "C", 9.0)]  # reordered: r < 1
        responses = [
            make_response("r1", agree, echo,
                          dict(gender="female", age=25, education_level="bachelors",
                               academic_background="arts_humanities")),
            make_response("r2", agree, echo,
                          dict(gender="male", age=31, education_level="masters",
                               academic_background="science_medical")),
            make_response("r3", agree, clash,
                          dict(gender="female", age=44, education_level="masters",
                               academic_background="social_science")),
            make_response("r4", agree, clash,
                          dict(gender="other", age=19, education_level="secondary",
                               academic_background="other")),
        ]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return agreement_design(responses, self.registry, threshold)

    def test_outcome_splits_at_median(self):
        d = self.build()
        assert list(d.outcome) == [1.0, 1.0, 0.0, 0.0]

    def test_threshold_configurable(self):
        d = self.build(threshold=-2.0)
        assert list(d.outcome) == [1.0, 1.0, 1.0, 1.0]

    def test_background_indicators_use_fixed_levels(self):
        d = self.build()
        for name in ("background=arts_humanities", "background=social_science",
                     "background=science_medical"):
            assert name in d.columns
        bg = d.predictors[:, [d.columns.index(c) for c in (
            "background=arts_humanities", "background=social_science",
            "background=science_medical")]]
        assert bg[0].tolist() == [1.0, 0.0, 0.0]
        assert bg[3].tolist() == [0.0, 0.0, 0.0]  # baseline "other"

    def test_sums_and_age_present(self):
        d = self.build()
        i1, i2 = d.columns.index("task1_sum"), d.columns.index("task2_sum")
        assert d.predictors[0, i1] == 9.0
        assert d.predictors[0, i2] == 15.0
        assert d.predictors[:, d.columns.index("age")].tolist() == [25, 31, 44, 19]

    def test_incomplete_respondents_excluded_with_warning(self):
        responses = [
            make_response("r1", [("A", "B", 6.0)], [("A", "B", 5.0), ("A", "C", 1.0)],
                          dict(gender="f", age=20, education_level="x",
                               academic_background="other")),
            make_response("r2", [("A", "B", 2.0)], [("A", "B", 1.0), ("B", "C", 3.0)],
                          dict(gender="f", age=21, education_level="x",
                               academic_background="other")),
            SurveyResponse("r3", "story"),
        ]
        with pytest.warns(UserWarning, match="r3"):
            d = agreement_design(responses, self.registry)
        assert d.n_rows() == 2

    def test_constant_network_respondent_excluded(self):
        good = [
            make_response(f"r{i}", [("A", "B", 6.0)], [("A", "B", float(i + 1))],
                          dict(gender="f", age=20, education_level="x",
                               academic_background="other"))
            for i in range(2)
        ]
        empty_task2 = make_response("rz", [("A", "B", 6.0)], [],
                                    dict(gender="f", age=20, education_level="x",
                                         academic_background="other"))
        with pytest.warns(UserWarning, match="rz"):
            d = agreement_design(good + [empty_task2], self.registry)
        assert d.n_rows() == 2


class TestDesignIo:
    def test_round_trip(self, tmp_path):
        d = random_design(np.random.default_rng(10), n=12, p=3)
        path = tmp_path / "design.tsv"
        write_design(d, path)
        back = read_design(path)
        assert back.columns == d.columns
        assert np.array_equal(back.predictors, d.predictors)
        assert np.array_equal(back.outcome, d.outcome)

    def test_outcome_column_must_be_last(self, tmp_path):
        path = tmp_path / "design.tsv"
        path.write_text("outcome\tx1\n1\t0.5\n")
        with pytest.raises(FormatError, match="outcome"):
            read_design(path)

    def test_bad_number_names_line(self, tmp_path):
        path = tmp_path / "design.tsv"
        path.write_text("x1\toutcome\n0.5\t1\nzap\t0\n")
        with pytest.raises(FormatError) as exc:
            read_design(path)
        assert exc.value.line == 3


class TestFitTable:
    def test_table_lists_every_coefficient(self):
        rng = np.random.default_rng(11)
        d = random_design(rng, n=40, p=2)
        table = format_fit_table(logistic_fit(d))
        for name in ("intercept", "x1", "x2", "p-Value", "Parameter"):
            assert name in table
        assert "converged" in table

    def test_non_convergence_is_loud(self):
        x = np.array([-2.0, -1.0, 1.0, 2.0, -1.5, 1.5])
        y = np.array([0.0, 0.0, 1.0, 1.0, 0.0, 1.0])
        table = format_fit_table(logistic_fit(design_of(x, y)))
        assert "DID NOT CONVERGE" in table
