"""Least-squares fitting with the diagnostics a die-design study needs.

fit_ols gives coefficients, t tests, standardized (beta) coefficients and
partial/semi-partial correlations for a fixed regressor set. stepwise_fit
adds automatic variable selection: candidates enter while their trial
p value stays below entry_p and leave while their fitted p value exceeds
removal_p, the convention used by mainstream stats packages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import special

__all__ = [
    "CANDIDATE_ORDER",
    "Dataset",
    "CoefficientStats",
    "StepAction",
    "RegressionReport",
    "student_t_sf",
    "fit_ols",
    "beta_coefficients",
    "partial_correlation",
    "semipartial_correlation",
    "stepwise_fit",
    "fit_loglinear",
]

# Canonical candidate regressors, in tie-break order. The first five are the
# variables the balancing models can consume; the rest are recorded die and
# press characteristics offered to the selection so it can discard them.
CANDIDATE_ORDER = (
    "dist",
    "area_total",
    "area_prof",
    "perim_prof",
    "dist_port_prof",
    "perimeter",
    "perim_total",
    "depth",
    "container_diameter",
    "max_pressure",
)

# Entry stops once the residual sum of squares is this far below the total
# sum of squares: coefficient noise on a numerically exact fit is not signal.
_PERFECT_FIT_RTOL = 1e-12


@dataclass(frozen=True)
class Dataset:
    """Observations for fitting: response vector plus named regressor columns."""

    response: np.ndarray
    columns: tuple[str, ...]
    regressors: np.ndarray
    response_name: str = "area"
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        y = np.asarray(self.response, dtype=float)
        x = np.asarray(self.regressors, dtype=float)
        if x.ndim != 2:
            raise ValueError(f"regressors must be a 2-D matrix, got shape {x.shape}")
        if y.ndim != 1 or y.shape[0] != x.shape[0]:
            raise ValueError(
                f"response length {y.shape} does not match {x.shape[0]} rows"
            )
        if len(self.columns) != x.shape[1]:
            raise ValueError(
                f"{len(self.columns)} column names for {x.shape[1]} columns"
            )
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate column names")
        if self.labels and len(self.labels) != y.shape[0]:
            raise ValueError("labels length does not match row count")
        for name, col in zip(("response",) + tuple(self.columns), [y] + list(x.T)):
            bad = np.flatnonzero(~np.isfinite(col))
            if bad.size:
                raise ValueError(
                    f"column {name}: non-finite value in {self._row_name(int(bad[0]))}"
                )
        object.__setattr__(self, "response", y)
        object.__setattr__(self, "regressors", x)
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "labels", tuple(self.labels))

    def _row_name(self, i: int) -> str:
        if self.labels:
            return f"row {i + 1} ({self.labels[i]})"
        return f"row {i + 1}"

    @property
    def n_rows(self) -> int:
        return int(self.response.shape[0])

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.columns.index(name)
        except ValueError:
            raise KeyError(f"no column {name!r}") from None
        return self.regressors[:, j]

    def subset(self, names: Sequence[str]) -> "Dataset":
        idx = [self.columns.index(n) for n in names]
        return replace(
            self, columns=tuple(names), regressors=self.regressors[:, idx]
        )

    def to_log(self) -> "Dataset":
        """Natural-log transform of the response and every column."""
        for name, col in zip(
            (self.response_name,) + self.columns,
            [self.response] + list(self.regressors.T),
        ):
            bad = np.flatnonzero(col <= 0)
            if bad.size:
                i = int(bad[0])
                raise ValueError(
                    f"log transform needs positive values: column {name}, "
                    f"{self._row_name(i)} has {col[i]}"
                )
        return replace(
            self, response=np.log(self.response), regressors=np.log(self.regressors)
        )


def student_t_sf(t: float, df: float) -> float:
    """Upper tail P(T > t) of Student's t, via the regularized incomplete
    beta function."""
    if df <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if math.isnan(t):
        return math.nan
    x = df / (df + t * t)
    p = 0.5 * float(special.betainc(0.5 * df, 0.5, x))
    return p if t >= 0 else 1.0 - p


def _two_sided_p(t: float, df: float) -> float:
    return 2.0 * student_t_sf(abs(t), df)


@dataclass(frozen=True)
class CoefficientStats:
    """One fitted term. beta/partial/semipartial are None for the intercept
    and None where residual variance vanishes (undefined)."""

    name: str
    coef: float
    std_error: float
    t: float
    p: float
    beta: float | None = None
    partial: float | None = None
    semipartial: float | None = None


@dataclass(frozen=True)
class StepAction:
    step: int
    action: str  # "enter" | "remove"
    variable: str
    p: float


@dataclass(frozen=True)
class RegressionReport:
    included: tuple[str, ...]
    terms: tuple[CoefficientStats, ...]  # intercept first
    r2: float
    adjusted_r2: float
    std_error_estimate: float
    n_obs: int
    steps: tuple[StepAction, ...] = ()
    log_transformed: bool = False

    @property
    def intercept(self) -> float:
        return self.terms[0].coef

    def coefficient(self, name: str) -> float:
        for term in self.terms:
            if term.name == name:
                return term.coef
        raise KeyError(f"no fitted term {name!r}")


class _CoreFit:
    """Coefficients, t and p values without the full diagnostic suite."""

    __slots__ = ("coef", "se", "t", "p", "sse", "sst", "df")

    def __init__(self, design: np.ndarray, y: np.ndarray, names: Sequence[str]):
        n, k_plus_1 = design.shape
        self.df = n - k_plus_1
        coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
        if rank < k_plus_1:
            raise ValueError(
                "regressors are linearly dependent: "
                + _describe_dependence(design, names)
            )
        resid = y - design @ coef
        self.sse = float(resid @ resid)
        self.sst = float(np.sum((y - y.mean()) ** 2))
        s2 = self.sse / self.df if self.df > 0 else math.nan
        gram_inv = np.linalg.inv(design.T @ design)
        var = np.maximum(s2 * np.diag(gram_inv), 0.0)
        self.coef = coef
        self.se = np.sqrt(var)
        t = np.empty_like(coef)
        for j in range(k_plus_1):
            if self.se[j] > 0:
                t[j] = coef[j] / self.se[j]
            else:
                t[j] = 0.0 if coef[j] == 0 else math.copysign(math.inf, coef[j])
        self.t = t
        self.p = np.array([_two_sided_p(float(tj), self.df) for tj in t])


def _describe_dependence(design: np.ndarray, names: Sequence[str]) -> str:
    # Columns loading on the smallest singular vector form the dependent set.
    _, _, vt = np.linalg.svd(design)
    null = vt[-1]
    involved = [
        ("intercept" if j == 0 else names[j - 1])
        for j in range(design.shape[1])
        if abs(null[j]) > 1e-8
    ]
    return "{" + ", ".join(involved) + "}"


def _design(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    if x.shape[1] == 0:
        return np.ones((n, 1))
    return np.column_stack([np.ones(n), x])


def _residualize(v: np.ndarray, others: np.ndarray) -> np.ndarray:
    """Residuals of v regressed on an intercept plus the other columns."""
    d = _design(others)
    coef, _, _, _ = np.linalg.lstsq(d, v, rcond=None)
    return v - d @ coef


def _corr_or_none(a: np.ndarray, b: np.ndarray) -> float | None:
    a = a - a.mean()
    b = b - b.mean()
    na = float(np.sqrt(a @ a))
    nb = float(np.sqrt(b @ b))
    if na == 0.0 or nb == 0.0:
        return None
    return float((a @ b) / (na * nb))


_DEGENERATE_RTOL = 1e-8


def partial_correlation(
    x_j: np.ndarray, y: np.ndarray, x_others: np.ndarray | None = None
) -> float | None:
    """Correlation of x_j and y once the other columns are removed from both.

    With an empty conditioning set this is the plain correlation. Returns
    None when either residual is (numerically) constant, i.e. x_j is a
    linear combination of the others or y is fully explained by them.
    """
    x_j = np.asarray(x_j, dtype=float)
    y = np.asarray(y, dtype=float)
    others = _others_matrix(x_others, x_j.shape[0])
    rx = _residualize(x_j, others)
    ry = _residualize(y, others)
    if _degenerate(rx, x_j) or _degenerate(ry, y):
        return None
    return _corr_or_none(rx, ry)


def semipartial_correlation(
    x_j: np.ndarray, y: np.ndarray, x_others: np.ndarray | None = None
) -> float | None:
    """Correlation of raw y with the part of x_j not explained by the others."""
    x_j = np.asarray(x_j, dtype=float)
    y = np.asarray(y, dtype=float)
    others = _others_matrix(x_others, x_j.shape[0])
    rx = _residualize(x_j, others)
    if _degenerate(rx, x_j):
        return None
    return _corr_or_none(rx, y)


def _others_matrix(x_others: np.ndarray | None, n: int) -> np.ndarray:
    if x_others is None:
        return np.empty((n, 0))
    others = np.asarray(x_others, dtype=float)
    if others.ndim == 1:
        others = others.reshape(-1, 1)
    return others


def _degenerate(residual: np.ndarray, original: np.ndarray) -> bool:
    centered = original - original.mean()
    scale = float(np.sqrt(centered @ centered))
    if scale == 0.0:
        return True
    return float(np.sqrt(residual @ residual)) <= _DEGENERATE_RTOL * scale


def fit_ols(X, y, names: Sequence[str] | None = None) -> RegressionReport:
    """Ordinary least squares of y on X plus an intercept.

    Parameters
    ----------
    X : array-like, shape (n, k)
        Regressor columns (no intercept column; one is always added).
        k = 0 fits the intercept-only model.
    y : array-like, shape (n,)
    names : optional column names for reporting; defaults to x1..xk.

    Returns a RegressionReport with per-term standard errors, t and
    two-sided p values (df = n - k - 1), standardized betas, and partial /
    semi-partial correlations of each regressor against the rest.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if names is None:
        names = tuple(f"x{j + 1}" for j in range(k))
    else:
        names = tuple(names)
        if len(names) != k:
            raise ValueError(f"{len(names)} names for {k} columns")
    if y.shape != (n,):
        raise ValueError(f"response shape {y.shape} does not match {n} rows")
    if n < k + 2:
        raise ValueError(f"need at least {k + 2} rows to fit {k} regressors, got {n}")
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        raise ValueError("response has zero variance; nothing to fit")

    core = _CoreFit(_design(X), y, names)
    r2 = min(1.0, max(0.0, 1.0 - core.sse / core.sst))
    adjusted = 1.0 - (1.0 - r2) * (n - 1) / core.df
    sd_y = float(np.std(y, ddof=1))
    terms = [
        CoefficientStats(
            name="intercept",
            coef=float(core.coef[0]),
            std_error=float(core.se[0]),
            t=float(core.t[0]),
            p=float(core.p[0]),
        )
    ]
    for j in range(k):
        col = X[:, j]
        others = np.delete(X, j, axis=1)
        terms.append(
            CoefficientStats(
                name=names[j],
                coef=float(core.coef[j + 1]),
                std_error=float(core.se[j + 1]),
                t=float(core.t[j + 1]),
                p=float(core.p[j + 1]),
                beta=float(core.coef[j + 1]) * float(np.std(col, ddof=1)) / sd_y,
                partial=partial_correlation(col, y, others),
                semipartial=semipartial_correlation(col, y, others),
            )
        )
    return RegressionReport(
        included=names,
        terms=tuple(terms),
        r2=r2,
        adjusted_r2=adjusted,
        std_error_estimate=math.sqrt(core.sse / core.df),
        n_obs=n,
    )


def beta_coefficients(report: RegressionReport, X, y) -> dict[str, float]:
    """Standardized coefficients beta_j = coef_j * sd(x_j) / sd(y).

    Scale-free: |beta| ranks variable importance regardless of units.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=float)
    sd_y = float(np.std(y, ddof=1))
    if sd_y == 0.0:
        raise ValueError("response has zero variance")
    out: dict[str, float] = {}
    non_intercept = [t for t in report.terms if t.name != "intercept"]
    if len(non_intercept) != X.shape[1]:
        raise ValueError(
            f"{X.shape[1]} columns for {len(non_intercept)} fitted regressors"
        )
    for term, col in zip(non_intercept, X.T):
        sd_x = float(np.std(col, ddof=1))
        if sd_x == 0.0:
            raise ValueError(f"column {term.name}: zero variance")
        out[term.name] = term.coef * sd_x / sd_y
    return out


def stepwise_fit(
    d: Dataset, entry_p: float = 0.05, removal_p: float = 0.10
) -> RegressionReport:
    """Stepwise variable selection over the dataset's candidate columns.

    Each pass first trial-fits every excluded candidate and enters the one
    with the smallest would-be p value if it beats entry_p (ties broken by
    larger |t|, then column order), then drops the included variable with
    the largest p value if it exceeds removal_p. Passes repeat until
    neither rule fires. Re-entering a variable at the same included-set
    state it was removed from is forbidden, which rules out enter/remove
    cycling. The final report carries the step trace.
    """
    if not 0.0 < entry_p < 1.0 or not 0.0 < removal_p < 1.0:
        raise ValueError("entry_p and removal_p must lie in (0, 1)")
    if entry_p > removal_p:
        raise ValueError(
            f"entry_p ({entry_p}) must not exceed removal_p ({removal_p}); "
            "a variable would be removed as soon as it enters"
        )
    y = d.response
    n = d.n_rows
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        raise ValueError("response has zero variance; nothing to fit")

    included: list[str] = []
    trace: list[StepAction] = []
    removed_at: set[tuple[frozenset, str]] = set()
    max_actions = 2 * len(d.columns) ** 2 + 2

    while len(trace) <= max_actions:
        acted = False
        current = _CoreFit(_design(d.subset(included).regressors), y, included)

        # Entry: smallest trial p below the threshold wins.
        exact_fit = current.sse <= _PERFECT_FIT_RTOL * sst
        if not exact_fit:
            state = frozenset(included)
            best: tuple[float, float, int] | None = None
            best_name = None
            for idx, name in enumerate(d.columns):
                if name in included or (state, name) in removed_at:
                    continue
                if n - (len(included) + 1) - 1 < 1:
                    break
                trial_names = included + [name]
                try:
                    trial = _CoreFit(
                        _design(d.subset(trial_names).regressors), y, trial_names
                    )
                except ValueError:
                    continue  # collinear with the current model; cannot enter
                p = float(trial.p[-1])
                key = (p, -abs(float(trial.t[-1])), idx)
                if best is None or key < best:
                    best = key
                    best_name = name
            if best_name is not None and best[0] < entry_p:
                included.append(best_name)
                trace.append(
                    StepAction(len(trace) + 1, "enter", best_name, best[0])
                )
                acted = True
                current = _CoreFit(
                    _design(d.subset(included).regressors), y, included
                )

        # Removal: largest p above the threshold goes.
        if included:
            worst_j = max(
                range(1, len(included) + 1),
                key=lambda j: (float(current.p[j]), j),
            )
            worst_p = float(current.p[worst_j])
            if worst_p > removal_p:
                name = included.pop(worst_j - 1)
                removed_at.add((frozenset(included), name))
                trace.append(StepAction(len(trace) + 1, "remove", name, worst_p))
                acted = True

        if not acted:
            break

    final = fit_ols(d.subset(included).regressors, y, names=included)
    return replace(final, steps=tuple(trace))


def fit_loglinear(
    d: Dataset, entry_p: float = 0.05, removal_p: float = 0.10
) -> RegressionReport:
    """Stepwise fit in log space: coefficients are exponents of the original
    variables and exp(intercept) is the multiplicative constant."""
    report = stepwise_fit(d.to_log(), entry_p=entry_p, removal_p=removal_p)
    return replace(report, log_transformed=True)
