import json

import numpy as np
import pytest
from scipy.optimize import nnls as scipy_nnls

from benchsel.errors import (
    EnvironmentLookupError,
    SingularMatrixError,
    ValidationError,
)
from benchsel.linreg import (
    LinearModel,
    cross_validated_mse,
    fit_nnls,
    fit_ols,
    load_model,
    model_from_dict,
    model_to_dict,
    predict_linear,
    r_squared,
    save_model,
)


def brute_force_ols(X, t, with_intercept=False):
    """Independent oracle: explicit (X'X)^-1 X't on the augmented design."""
    Xa = np.hstack([X, np.ones((len(t), 1))]) if with_intercept else X
    beta = np.linalg.inv(Xa.T @ Xa) @ (Xa.T @ t)
    if with_intercept:
        return beta[:-1], beta[-1]
    return beta, None


class TestFitOls:
    def test_exact_line_through_origin(self):
        model = fit_ols(np.array([[1.0], [2.0]]), np.array([2.0, 4.0]))
        assert model.coefficients[0] == pytest.approx(2.0, abs=1e-14)
        assert model.intercept is None
        assert model.stats.r_squared == pytest.approx(1.0, abs=1e-14)

    def test_constant_target_with_intercept(self):
        X = np.array([[1.0], [2.0], [3.0]])
        t = np.array([5.0, 5.0, 5.0])
        model = fit_ols(X, t, with_intercept=True)
        assert model.coefficients[0] == pytest.approx(0.0, abs=1e-12)
        assert model.intercept == pytest.approx(5.0, abs=1e-12)
        # SS_tot = 0 -> r_squared pinned to 0 by convention
        assert model.stats.r_squared == 0.0

    def test_matches_normal_equations_oracle(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(50, 3))
        t = rng.normal(size=50)
        model = fit_ols(X, t)
        oracle, _ = brute_force_ols(X, t)
        assert np.abs(model.coefficients - oracle).max() <= \
            1e-9 * max(1.0, np.abs(oracle).max())

    def test_oracle_sweep_up_to_200x11(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            rows = int(rng.integers(20, 201))
            cols = int(rng.integers(1, 12))
            with_intercept = bool(rng.integers(2))
            X = rng.normal(size=(rows, cols))
            t = rng.normal(size=rows)
            model = fit_ols(X, t, with_intercept=with_intercept)
            oracle, c = brute_force_ols(X, t, with_intercept)
            scale = max(1e-30, np.abs(oracle).max())
            assert np.abs(model.coefficients - oracle).max() / scale <= 1e-9
            if with_intercept:
                assert abs(model.intercept - c) <= 1e-9 * max(1.0, abs(c))

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(120, 7))
        t = rng.normal(size=120)
        model = fit_ols(X, t)
        residual = t - X @ model.coefficients
        assert np.abs(X.T @ residual).max() <= 1e-8

    def test_singular_design_names_column(self):
        X = np.ones((10, 2))
        X[:, 0] = np.arange(10)
        X = np.hstack([X, X[:, :1]])  # duplicate first column
        with pytest.raises(SingularMatrixError, match="third"):
            fit_ols(X, np.arange(10.0),
                    environment_ids=("first", "second", "third"))

    def test_too_few_rows_rejected(self):
        with pytest.raises(ValidationError):
            fit_ols(np.ones((2, 2)), np.ones(2))

    def test_too_many_columns_rejected(self):
        with pytest.raises(ValidationError):
            fit_ols(np.ones((40, 17)), np.ones(40))


class TestFitNnls:
    def test_recovers_true_nonnegative_solution(self):
        # x2 orthogonal to both x1 and the target, so OLS already gives
        # exactly (3, 0); NNLS must agree.
        X = np.array([[1.0, 1.0], [2.0, -1.0], [3.0, -1.0], [4.0, 1.0]])
        t = 3.0 * X[:, 0]
        model = fit_nnls(X, t)
        assert model.coefficients == pytest.approx([3.0, 0.0], abs=1e-12)
        assert model.constrained_nonnegative

    def test_matches_ols_when_constraint_inactive(self):
        rng = np.random.default_rng(21)
        X = rng.uniform(0.5, 2.0, size=(60, 4))
        t = X @ np.array([1.0, 0.5, 2.0, 0.25]) + rng.normal(0, 0.01, 60)
        constrained = fit_nnls(X, t)
        unconstrained = fit_ols(X, t)
        assert (unconstrained.coefficients >= 0).all()
        assert np.abs(constrained.coefficients
                      - unconstrained.coefficients).max() <= 1e-9

    def test_negative_relation_clamps_to_zero(self):
        X = np.arange(1.0, 7.0)[:, None]
        t = -X[:, 0]
        model = fit_nnls(X, t)
        assert model.coefficients[0] == 0.0
        assert model.stats.r_squared <= 0.0

    def test_kkt_conditions_random_problems(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            rows = int(rng.integers(15, 80))
            cols = int(rng.integers(1, 9))
            X = rng.normal(size=(rows, cols))
            t = rng.normal(size=rows)
            model = fit_nnls(X, t)
            coef = model.coefficients
            gradient = X.T @ (X @ coef - t)  # d/dcoef of 0.5*SSE
            assert (coef >= 0).all()
            active = coef == 0.0
            assert np.abs(gradient[~active]).max(initial=0.0) <= 1e-8
            assert gradient[active].min(initial=0.0) >= -1e-8

    def test_agrees_with_scipy(self):
        rng = np.random.default_rng(23)
        for _ in range(25):
            X = rng.normal(size=(40, 5))
            t = rng.normal(size=40)
            ours = fit_nnls(X, t).coefficients
            ref, _ = scipy_nnls(X, t)
            assert np.abs(ours - ref).max() <= 1e-8 * max(1.0, ref.max())

    def test_intercept_profiled_out(self):
        rng = np.random.default_rng(24)
        X = rng.uniform(0, 2, size=(50, 3))
        t = X @ np.array([0.5, 0.0, 1.5]) - 2.0 + rng.normal(0, 0.01, 50)
        model = fit_nnls(X, t, with_intercept=True)
        assert (model.coefficients >= 0).all()
        assert model.intercept == pytest.approx(-2.0, abs=0.05)
        # KKT on the centered problem
        Xc = X - X.mean(axis=0)
        gradient = Xc.T @ (Xc @ model.coefficients - (t - t.mean()))
        active = model.coefficients == 0.0
        assert np.abs(gradient[~active]).max(initial=0.0) <= 1e-8
        assert gradient[active].min(initial=0.0) >= -1e-8


class TestRSquared:
    def test_perfect_predictions(self):
        X = np.arange(1.0, 6.0)[:, None]
        t = 2.0 * X[:, 0]
        model = fit_ols(X, t)
        assert r_squared(model, X, t) == pytest.approx(1.0, abs=1e-12)

    def test_mean_predictor_scores_zero(self):
        t = np.array([1.0, 2.0, 3.0, 4.0])
        model = LinearModel(("x0",), np.array([0.0]), intercept=float(t.mean()))
        X = np.ones((4, 1))
        assert r_squared(model, X, t) == pytest.approx(0.0, abs=1e-12)


class TestCrossValidatedMse:
    def test_noise_free_model_generalizes_exactly(self):
        rng = np.random.default_rng(31)
        X = rng.uniform(0, 3, size=(30, 3))
        t = X @ np.array([0.4, 0.5, 0.1])
        for folds in (2, 5, 10):
            assert cross_validated_mse(X, t, folds=folds, seed=0) <= 1e-18

    def test_leave_one_out_matches_hand_oracle(self):
        # x=[0..4], t below; frozen value from the independent per-point
        # refit oracle (fit on 4 points, square the held-out residual).
        X = np.array([0.0, 1.0, 2.0, 3.0, 4.0])[:, None]
        t = np.array([1.0, 2.2, 2.9, 4.1, 5.2])
        loo = cross_validated_mse(X, t, folds=5, seed=123)
        assert loo == pytest.approx(0.4263032821146524, rel=1e-12)

    def test_deterministic_to_the_bit(self):
        rng = np.random.default_rng(32)
        X = rng.normal(size=(40, 4))
        t = rng.normal(size=40)
        a = cross_validated_mse(X, t, folds=10, seed=99)
        b = cross_validated_mse(X, t, folds=10, seed=99)
        assert a == b
        assert a != cross_validated_mse(X, t, folds=10, seed=100)

    def test_rank_deficient_fold_raises(self):
        X = np.zeros((12, 2))
        X[:, 0] = np.arange(12)
        with pytest.raises(SingularMatrixError):
            cross_validated_mse(X, np.arange(12.0), folds=3, seed=0)

    def test_preconditions(self):
        X = np.ones((6, 1))
        with pytest.raises(ValidationError):
            cross_validated_mse(X, np.ones(6), folds=1, seed=0)
        with pytest.raises(ValidationError):
            cross_validated_mse(X, np.ones(6), folds=7, seed=0)


class TestPredictLinear:
    def test_zero_vector_no_intercept(self):
        model = LinearModel(("a", "b"), np.array([0.4, 0.6]))
        assert predict_linear(model, [0.0, 0.0]) == 0.0

    def test_reference_triple_on_unit_inputs(self):
        model = LinearModel(("Battle Zone", "Name This Game", "Phoenix"),
                            np.array([0.3706, 0.5133, 0.1015]))
        assert predict_linear(model, [1.0, 1.0, 1.0]) == pytest.approx(
            0.9854, abs=1e-12)

    def test_identity_model_returns_input(self):
        model = LinearModel(("Battle Zone",), np.array([1.0]), intercept=0.0)
        for value in (0.0, 1.234, 3.9):
            assert predict_linear(model, [value]) == value

    def test_mapping_input_with_loose_names(self):
        model = LinearModel(("Q*Bert",), np.array([2.0]))
        assert predict_linear(model, {"qbert": 1.5}) == 3.0

    def test_missing_component_names_environment(self):
        model = LinearModel(("Pong", "Breakout"), np.array([1.0, 1.0]))
        with pytest.raises(EnvironmentLookupError, match="Breakout"):
            predict_linear(model, {"Pong": 1.0})


class TestSerialization:
    def test_round_trip(self, tmp_path):
        model = LinearModel(("Pong", "Breakout"),
                            np.array([0.123456789012345, 0.5]),
                            intercept=-0.25)
        path = tmp_path / "model.json"
        save_model(path, model, name="demo", norms_checksum="sha256:abc")
        loaded, doc = load_model(path)
        assert loaded.environment_ids == model.environment_ids
        assert np.array_equal(loaded.coefficients, model.coefficients)
        assert loaded.intercept == model.intercept
        assert doc["norms_checksum"] == "sha256:abc"
        assert doc["name"] == "demo"

    def test_full_precision(self):
        model = LinearModel(("x",), np.array([1 / 3]))
        doc = json.loads(json.dumps(model_to_dict(model)))
        assert model_from_dict(doc).coefficients[0] == 1 / 3

    def test_rejects_wrong_format(self):
        with pytest.raises(ValidationError):
            model_from_dict({"format": "something-else"})

    def test_constrained_flag_checked(self):
        with pytest.raises(ValidationError):
            LinearModel(("x",), np.array([-1.0]), constrained_nonnegative=True)
