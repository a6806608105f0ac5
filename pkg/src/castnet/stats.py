"""Logistic regression of respondent factors against human-machine agreement.

Self-contained maximum-likelihood fitter (Newton / iteratively reweighted
least squares) so the analysis has no dependency beyond numpy. The outcome
is a binarized agreement indicator: whether a respondent's Task 1 vs Task 2
correlation reaches the population median (threshold configurable).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import CharacterRegistry
from .errors import CastnetError, FormatError
from .netops import ConstantNetworkError, pearson_correlation
from .survey import ACADEMIC_BACKGROUNDS, SurveyResponse, respondent_network

SCORE_TOL = 1e-8
MAX_ITER = 50


class CollinearityError(CastnetError):
    """The design matrix is rank deficient."""


@dataclass
class RegressionDesign:
    """Predictor matrix (one row per respondent) and a binary outcome."""

    columns: tuple[str, ...]
    predictors: np.ndarray  # shape (n_rows, n_predictors)
    outcome: np.ndarray  # shape (n_rows,), values in {0, 1}

    def __post_init__(self):
        self.predictors = np.asarray(self.predictors, dtype=float)
        self.outcome = np.asarray(self.outcome, dtype=float)
        n, p = self.predictors.shape
        if len(self.columns) != p:
            raise ValueError(f"{len(self.columns)} column names for {p} predictors")
        if self.outcome.shape != (n,):
            raise ValueError("outcome length does not match predictor rows")
        if not np.all(np.isfinite(self.predictors)):
            raise ValueError("predictors contain missing or non-finite values")
        if not np.all((self.outcome == 0) | (self.outcome == 1)):
            raise ValueError("outcome must be coded 0/1")

    def n_rows(self) -> int:
        return self.predictors.shape[0]

    def design_matrix(self) -> np.ndarray:
        """Predictors with a leading intercept column."""
        return np.column_stack([np.ones(self.n_rows()), self.predictors])


@dataclass
class FitResult:
    columns: tuple[str, ...]  # "intercept" first, then predictor names
    coefficients: np.ndarray
    standard_errors: np.ndarray
    z_scores: np.ndarray
    p_values: np.ndarray
    converged: bool
    log_likelihood: float
    n_iterations: int


def _linear_predictor(design: RegressionDesign, beta: np.ndarray) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    expected = design.predictors.shape[1] + 1
    if beta.shape != (expected,):
        raise ValueError(f"expected {expected} coefficients, got {beta.shape}")
    return design.design_matrix() @ beta


def log_likelihood(design: RegressionDesign, beta: np.ndarray) -> float:
    """Bernoulli log-likelihood sum(y*log p + (1-y)*log(1-p)).

    Uses the identity y*eta - log(1 + e^eta) with log-sum-exp stabilization,
    so the result stays finite for any beta.
    """
    eta = _linear_predictor(design, beta)
    return float(np.sum(design.outcome * eta - np.logaddexp(0.0, eta)))


def score(design: RegressionDesign, beta: np.ndarray) -> np.ndarray:
    """Gradient of the log-likelihood: X^T (y - p)."""
    eta = _linear_predictor(design, beta)
    p = 1.0 / (1.0 + np.exp(-eta))
    return design.design_matrix().T @ (design.outcome - p)


def _dependent_columns(x: np.ndarray, names: list[str]) -> list[str]:
    kept: list[int] = []
    dependent: list[str] = []
    for j in range(x.shape[1]):
        candidate = x[:, kept + [j]]
        if np.linalg.matrix_rank(candidate) == len(kept):
            dependent.append(names[j])
        else:
            kept.append(j)
    return dependent


def logistic_fit(design: RegressionDesign) -> FitResult:
    """Maximum-likelihood logistic coefficients with Wald inference.

    Newton iterations until max |score| < 1e-8 or 50 rounds. Perfectly
    separated data cannot converge (the likelihood has no maximum); the
    result is returned with converged=False rather than masked.
    """
    x = design.design_matrix()
    n, p = x.shape
    if n < p + 1:
        raise ValueError(f"need at least {p + 1} rows to fit {p} coefficients, got {n}")
    classes = np.unique(design.outcome)
    if len(classes) < 2:
        raise ValueError("outcome must contain both classes")
    names = ["intercept"] + list(design.columns)
    if np.linalg.matrix_rank(x) < p:
        dependent = _dependent_columns(x, names)
        raise CollinearityError(
            f"design matrix is rank deficient; dependent column(s): "
            f"{', '.join(dependent)}"
        )

    beta = np.zeros(p)
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITER + 1):
        eta = x @ beta
        prob = 1.0 / (1.0 + np.exp(-eta))
        grad = x.T @ (design.outcome - prob)
        if np.max(np.abs(grad)) < SCORE_TOL:
            # every margin positive means the likelihood still rises along
            # the ray c*beta: separated data, no finite maximum exists even
            # though saturation has flattened the gradient
            margins = (2.0 * design.outcome - 1.0) * eta
            converged = not bool(np.all(margins > 0))
            break
        w = prob * (1.0 - prob)
        hessian = x.T @ (x * w[:, None])
        try:
            step = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            break  # information matrix singular: separation or degeneracy
        beta = beta + step

    eta = x @ beta
    prob = 1.0 / (1.0 + np.exp(-eta))
    w = prob * (1.0 - prob)
    hessian = x.T @ (x * w[:, None])
    try:
        covariance = np.linalg.inv(hessian)
        se = np.sqrt(np.maximum(np.diag(covariance), 0.0))
    except np.linalg.LinAlgError:
        se = np.full(p, np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, beta / se, 0.0)
    z = np.where(np.isfinite(z), z, 0.0)
    p_values = np.array([math.erfc(abs(zi) / math.sqrt(2.0)) for zi in z])

    return FitResult(
        columns=tuple(names),
        coefficients=beta,
        standard_errors=se,
        z_scores=z,
        p_values=p_values,
        converged=converged,
        log_likelihood=log_likelihood(design, beta),
        n_iterations=iterations,
    )


# --- building the agreement design from survey data ------------------------


def _indicator_block(values: list[str], prefix: str) -> tuple[list[str], np.ndarray]:
    """Indicator-code a categorical column, dropping the first sorted level."""
    levels = sorted(set(values))
    kept = levels[1:]
    cols = np.zeros((len(values), len(kept)))
    for i, v in enumerate(values):
        if v in kept:
            cols[i, kept.index(v)] = 1.0
    return [f"{prefix}={level}" for level in kept], cols


def agreement_design(
    responses: list[SurveyResponse],
    registry: CharacterRegistry,
    threshold: float | None = None,
) -> RegressionDesign:
    """Design matrix relating respondent factors to human-machine agreement.

    Rows are respondents with both tasks and a profile. Predictors: academic
    background indicators (baseline "other"), gender indicators, age,
    education level indicators, Task 1 importance sum, Task 2 weight sum.
    Outcome: 1 iff the respondent's Task 1 vs Task 2 correlation reaches the
    threshold (population median when threshold is None).
    """
    rows = []
    for r in responses:
        if r.task1 is None or r.task2 is None or r.profile is None:
            warnings.warn(f"respondent {r.respondent_id!r} incomplete; excluded")
            continue
        net1 = respondent_network(r.task1, registry)
        net2 = respondent_network(r.task2, registry)
        try:
            corr = pearson_correlation(net1, net2)
        except ConstantNetworkError:
            warnings.warn(
                f"respondent {r.respondent_id!r} has a constant network; excluded"
            )
            continue
        task1_sum = sum(e.importance for e in r.task1.entries)
        task2_sum = sum(r.task2.cells.values())
        rows.append((r.profile, corr, task1_sum, task2_sum))
    if len(rows) < 2:
        raise ValueError(f"need at least 2 complete respondents, got {len(rows)}")

    correlations = np.array([row[1] for row in rows])
    cut = float(np.median(correlations)) if threshold is None else threshold
    outcome = (correlations >= cut).astype(float)

    columns: list[str] = []
    blocks: list[np.ndarray] = []
    # fixed background order with "other" as the baseline level
    bg_levels = [b for b in ACADEMIC_BACKGROUNDS if b != "other"]
    bg = np.zeros((len(rows), len(bg_levels)))
    for i, (profile, _, _, _) in enumerate(rows):
        if profile.academic_background in bg_levels:
            bg[i, bg_levels.index(profile.academic_background)] = 1.0
    columns += [f"background={level}" for level in bg_levels]
    blocks.append(bg)

    gender_names, gender_cols = _indicator_block(
        [row[0].gender for row in rows], "gender")
    columns += gender_names
    blocks.append(gender_cols)

    columns.append("age")
    blocks.append(np.array([[float(row[0].age)] for row in rows]))

    edu_names, edu_cols = _indicator_block(
        [row[0].education_level for row in rows], "education")
    columns += edu_names
    blocks.append(edu_cols)

    columns += ["task1_sum", "task2_sum"]
    blocks.append(np.array([[row[2], row[3]] for row in rows]))

    predictors = np.hstack([b for b in blocks if b.size] or [np.zeros((len(rows), 0))])
    return RegressionDesign(tuple(columns), predictors, outcome)


# --- file import and reporting ---------------------------------------------

DESIGN_OUTCOME_COLUMN = "outcome"


def read_design(path: str | Path) -> RegressionDesign:
    """Read a tab-separated design matrix; header row, outcome column last."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise FormatError(path, 1, "empty file")
    header = lines[0].split("\t")
    if header[-1] != DESIGN_OUTCOME_COLUMN:
        raise FormatError(path, 1, f"last column must be {DESIGN_OUTCOME_COLUMN!r}")
    width = len(header)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != width:
            raise FormatError(path, lineno, f"expected {width} fields, got {len(fields)}")
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise FormatError(path, lineno, str(exc)) from None
    if not rows:
        raise FormatError(path, 2, "no data rows")
    data = np.array(rows)
    return RegressionDesign(tuple(header[:-1]), data[:, :-1], data[:, -1])


def write_design(design: RegressionDesign, path: str | Path) -> None:
    lines = ["\t".join(list(design.columns) + [DESIGN_OUTCOME_COLUMN])]
    for row, y in zip(design.predictors, design.outcome):
        lines.append("\t".join([repr(float(v)) for v in row] + [str(int(y))]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def format_fit_table(fit: FitResult) -> str:
    """Fit summary as an aligned text table: one row per coefficient."""
    header = ("Predictor", "Parameter", "Std. Error", "z", "p-Value")
    rows = [header]
    for i, name in enumerate(fit.columns):
        rows.append((
            name,
            f"{fit.coefficients[i]:.4f}",
            f"{fit.standard_errors[i]:.4f}",
            f"{fit.z_scores[i]:.3f}",
            f"{fit.p_values[i]:.4f}",
        ))
    widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
    out = []
    for r in rows:
        out.append("  ".join(f"{r[0]:<{widths[0]}}" if c == 0 else f"{r[c]:>{widths[c]}}"
                             for c in range(len(header))))
    status = "converged" if fit.converged else "DID NOT CONVERGE"
    out.append(f"log-likelihood {fit.log_likelihood:.4f} ({status}, "
               f"{fit.n_iterations} iterations)")
    return "\n".join(out)
