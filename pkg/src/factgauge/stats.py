"""Meta-evaluation statistics over score tables.

Five checks per (metric, domain, subset) cell:
  boundedness   level means inside [random-pairing lower, reference upper]
  sensitivity   |OLS slope| of per-level mean score against level
  correlation   Pearson r between level (or per-summary error count) and score
  significance  two-tailed p for r, plus Welch tests between adjacent levels
  commonsense   Pearson r against human-annotated error counts

The default fit window is levels 1..L; level 0 (the untransformed
references) is reported alongside and joins the fit only on request.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc

from .corpus import HumanAnnotationRecord
from .errors import StatsError, UndefinedCorrelationError
from .perturb import DiagnosticDataset
from .metrics.scoring import ScoreTable, reference_request_id, random_baseline_request_id

ALL_DOMAINS = "all"
ALL_SUBSETS = "all"

# A slope below this is treated as no measurable response to injected
# errors (mirrors the reported "<0.01" worst-tier threshold). The
# threshold lives on the reporting scale; see REPORT_SCALE.
INSENSITIVITY_THRESHOLD = 0.01

# Scores for [0,1] metrics are stored raw and rendered x100 in tables.
# Sensitivity scales with the scores, so flag comparisons multiply by the
# same factor first. Pass score_scale=1.0 when feeding table-scale values.
REPORT_SCALE = 100.0


@dataclass(frozen=True)
class LevelSeries:
    """Per-level mean scores for one (metric, domain, subset) cell.

    level_means covers 0..L where level 0 is the untransformed references;
    its mean equals upper_bound by construction. Instance scores are
    averaged per document over the R runs before the level mean is taken.
    """

    metric: str
    domain: str
    subset: str
    level_means: tuple[tuple[int, float], ...]
    upper_bound: float
    lower_bound: float
    runs: int
    # per-level per-document run-averaged samples, for adjacent-level tests
    level_samples: tuple[tuple[int, tuple[float, ...]], ...] = ()

    def __post_init__(self):
        levels = [lvl for lvl, _ in self.level_means]
        if levels != sorted(set(levels)):
            raise StatsError("levels must be strictly increasing")
        if levels and levels[0] == 0:
            zero_mean = self.level_means[0][1]
            if not math.isclose(zero_mean, self.upper_bound, rel_tol=0, abs_tol=1e-9):
                raise StatsError("level 0 mean must equal the upper bound")

    def window(self, include_level_zero: bool = False) -> tuple[list[int], list[float]]:
        pairs = [
            (lvl, mean)
            for lvl, mean in self.level_means
            if include_level_zero or lvl > 0
        ]
        return [p[0] for p in pairs], [p[1] for p in pairs]

    def grand_mean(self, include_level_zero: bool = False) -> float:
        _, means = self.window(include_level_zero)
        if not means:
            raise StatsError("empty fit window")
        return float(np.mean(means))


def level_means(
    table: ScoreTable,
    dataset: DiagnosticDataset,
    metric: str,
    domain: str = ALL_DOMAINS,
    subset: str = ALL_SUBSETS,
) -> LevelSeries:
    """Build the LevelSeries for one cell; every instance must be scored."""
    doc_domain = dict(dataset.domains)
    instances = [
        inst
        for inst in dataset.instances
        if (domain == ALL_DOMAINS or doc_domain[inst.doc_id] == domain)
        and (subset == ALL_SUBSETS or inst.subset == subset)
    ]
    if not instances:
        raise StatsError(f"no instances for domain={domain!r} subset={subset!r}")
    doc_ids = sorted({inst.doc_id for inst in instances})

    # Per (doc, level): average the R runs first, then average documents.
    per_doc_level: dict[tuple[str, int], list[float]] = {}
    for inst in instances:
        value = table.value(metric, inst.instance_id)
        per_doc_level.setdefault((inst.doc_id, inst.nominal_level), []).append(value)

    ref_scores = [table.value(metric, reference_request_id(d)) for d in doc_ids]
    rand_scores = [table.value(metric, random_baseline_request_id(d)) for d in doc_ids]
    upper = float(np.mean(ref_scores))
    lower = float(np.mean(rand_scores))

    levels = sorted({inst.nominal_level for inst in instances})
    means: list[tuple[int, float]] = [(0, upper)]
    samples: list[tuple[int, tuple[float, ...]]] = [(0, tuple(ref_scores))]
    for lvl in levels:
        doc_means = [
            float(np.mean(per_doc_level[(d, lvl)]))
            for d in doc_ids
            if (d, lvl) in per_doc_level
        ]
        if not doc_means:
            raise StatsError(f"no scores at level {lvl}")
        means.append((lvl, float(np.mean(doc_means))))
        samples.append((lvl, tuple(doc_means)))
    return LevelSeries(
        metric=metric,
        domain=domain,
        subset=subset,
        level_means=tuple(means),
        upper_bound=upper,
        lower_bound=lower,
        runs=dataset.runs,
        level_samples=tuple(samples),
    )


def _ols_slope(xs: np.ndarray, ys: np.ndarray) -> float:
    x_mean = xs.mean()
    denom = float(((xs - x_mean) ** 2).sum())
    if denom == 0.0:
        raise StatsError("degenerate fit window (constant x)")
    return float(((xs - x_mean) * (ys - ys.mean())).sum() / denom)


def sensitivity(series: LevelSeries, include_level_zero: bool = False) -> float:
    """Absolute OLS slope of level means against level over the fit window."""
    xs, ys = series.window(include_level_zero)
    if len(xs) < 2:
        raise StatsError("sensitivity needs at least 2 levels in the fit window")
    return abs(_ols_slope(np.asarray(xs, float), np.asarray(ys, float)))


def pearson(xs, ys) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise StatsError("inputs must be equal-length 1-d sequences")
    if xs.size < 2:
        raise StatsError("correlation needs at least 2 points")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sx = float((dx * dx).sum())
    sy = float((dy * dy).sum())
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError(
            "zero variance input; correlation undefined (never reported as 0)"
        )
    r = float((dx * dy).sum() / math.sqrt(sx * sy))
    return max(-1.0, min(1.0, r))


def p_value_pearson(r: float, n: int) -> float:
    """Two-tailed p for a Pearson r with n samples (df = n-2).

    df=1 uses the Cauchy closed form 2*(1/2 - arctan|t|/pi); larger df go
    through the regularized incomplete beta function.
    """
    if n < 3:
        raise StatsError("p-value needs n >= 3")
    if not -1.0 <= r <= 1.0:
        raise StatsError(f"correlation {r} outside [-1, 1]")
    if abs(r) == 1.0:
        return 0.0
    df = n - 2
    t = abs(r) * math.sqrt(df / (1.0 - r * r))
    if df == 1:
        return 2.0 * (0.5 - math.atan(t) / math.pi)
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


@dataclass(frozen=True)
class AdjacentTest:
    level_a: int
    level_b: int
    t: float
    p: float
    degenerate: bool = False


def adjacent_level_test(scores_a, scores_b) -> tuple[float, float, bool]:
    """Welch's unequal-variance t test, two-tailed.

    Returns (t, p, degenerate). Two zero-variance samples give t=0, p=1
    when their means agree; p=0 with the degenerate flag when they differ.
    """
    a = np.asarray(scores_a, dtype=float)
    b = np.asarray(scores_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise StatsError("adjacent-level test needs >= 2 samples per side")
    va = float(a.var(ddof=1))
    vb = float(b.var(ddof=1))
    diff = float(a.mean() - b.mean())
    if va == 0.0 and vb == 0.0:
        if diff == 0.0:
            return 0.0, 1.0, False
        return math.copysign(math.inf, diff), 0.0, True
    sa, sb = va / a.size, vb / b.size
    t = diff / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa**2 / (a.size - 1) + sb**2 / (b.size - 1))
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t))) if t != 0.0 else 1.0
    return t, p, False


@dataclass(frozen=True)
class BoundednessResult:
    passed: bool
    # (level, mean, violated bound)
    violations: tuple[tuple[int, float, float], ...] = ()


def check_boundedness(series: LevelSeries) -> BoundednessResult:
    """Condition: every level mean lies in [lower_bound, upper_bound]."""
    violations = []
    for lvl, mean in series.level_means:
        if mean > series.upper_bound:
            violations.append((lvl, mean, series.upper_bound))
        elif mean < series.lower_bound:
            violations.append((lvl, mean, series.lower_bound))
    return BoundednessResult(passed=not violations, violations=tuple(violations))


def commonsense_correlation(
    scores: dict[str, float],
    annotations: list[HumanAnnotationRecord],
    exclude_error_types: frozenset[str] | set[str] = frozenset(),
) -> tuple[float, float, int]:
    """Pearson r between per-summary error counts and metric values.

    Counts exclude the given error types; every annotated summary must be
    scored. Returns (r, p, n).
    """
    if not annotations:
        raise StatsError("no annotation records")
    xs, ys = [], []
    for record in annotations:
        if record.summary_id not in scores:
            raise StatsError(f"summary {record.summary_id!r} has no score")
        xs.append(float(record.level_excluding(exclude_error_types)))
        ys.append(scores[record.summary_id])
    r = pearson(xs, ys)
    return r, p_value_pearson(r, len(xs)), len(xs)


@dataclass(frozen=True)
class ConditionReport:
    """All per-cell meta-evaluation outcomes for one metric."""

    metric: str
    domain: str
    subset: str
    series: LevelSeries
    bounded: BoundednessResult
    sensitivity: float
    sensitivity_with_zero: float
    correlation_r: float | None
    p_value: float | None
    correlation_n: int
    correlation_mode: str
    adjacent_tests: tuple[AdjacentTest, ...]
    commonsense_r: float | None = None
    commonsense_p: float | None = None
    commonsense_n: int | None = None
    flags: tuple[str, ...] = ()

    @property
    def insensitive(self) -> bool:
        return "insensitive" in self.flags

    @property
    def invalid_direction(self) -> bool:
        return "invalid-direction" in self.flags

    def trend_significant(self, alpha: float = 0.05) -> bool:
        """Downward trend established: r defined, negative, p <= alpha."""
        return (
            self.correlation_r is not None
            and self.correlation_r < 0
            and self.p_value is not None
            and self.p_value <= alpha
        )


CORRELATION_MODES = ("level-mean", "per-summary")


def _per_summary_points(
    table: ScoreTable,
    dataset: DiagnosticDataset,
    metric: str,
    domain: str,
    subset: str,
    include_level_zero: bool,
) -> tuple[list[float], list[float]]:
    doc_domain = dict(dataset.domains)
    xs, ys = [], []
    seen_docs = set()
    for inst in dataset.instances:
        if domain != ALL_DOMAINS and doc_domain[inst.doc_id] != domain:
            continue
        if subset != ALL_SUBSETS and inst.subset != subset:
            continue
        xs.append(float(len(inst.applied)))
        ys.append(table.value(metric, inst.instance_id))
        seen_docs.add(inst.doc_id)
    if include_level_zero:
        for doc_id in sorted(seen_docs):
            xs.append(0.0)
            ys.append(table.value(metric, reference_request_id(doc_id)))
    return xs, ys


def build_condition_report(
    table: ScoreTable,
    dataset: DiagnosticDataset,
    metric: str,
    domain: str = ALL_DOMAINS,
    subset: str = ALL_SUBSETS,
    include_level_zero: bool = False,
    correlation_mode: str = "level-mean",
    score_scale: float = REPORT_SCALE,
) -> ConditionReport:
    """Assemble every per-cell statistic; undefined correlation is flagged,
    not silently zeroed."""
    if correlation_mode not in CORRELATION_MODES:
        raise StatsError(f"unknown correlation mode {correlation_mode!r}")
    if score_scale <= 0:
        raise StatsError("score_scale must be positive")
    series = level_means(table, dataset, metric, domain, subset)
    bounded = check_boundedness(series)
    sens = sensitivity(series, include_level_zero=False)
    sens_zero = sensitivity(series, include_level_zero=True)

    flags: list[str] = []
    r: float | None
    p: float | None
    try:
        if correlation_mode == "level-mean":
            xs, ys = series.window(include_level_zero)
            n = len(xs)
            r = pearson(xs, ys)
        else:
            xs, ys = _per_summary_points(
                table, dataset, metric, domain, subset, include_level_zero
            )
            n = len(xs)
            r = pearson(xs, ys)
        # two fit points force r to +-1 and leave the t test without
        # degrees of freedom; keep r but report no p
        p = p_value_pearson(r, n) if n >= 3 else None
    except UndefinedCorrelationError:
        r, p, n = None, None, 0
        flags.append("undefined-correlation")

    if r is not None and r > 0:
        flags.append("invalid-direction")
    fitted = sens_zero if include_level_zero else sens
    if r is None or fitted * score_scale < INSENSITIVITY_THRESHOLD:
        flags.append("insensitive")

    samples = dict(series.level_samples)
    tests = []
    ordered = [lvl for lvl, _ in series.level_means if include_level_zero or lvl > 0]
    for a, b in zip(ordered, ordered[1:]):
        t, tp, degenerate = adjacent_level_test(samples[a], samples[b])
        tests.append(AdjacentTest(a, b, t, tp, degenerate))

    return ConditionReport(
        metric=metric,
        domain=domain,
        subset=subset,
        series=series,
        bounded=bounded,
        sensitivity=sens,
        sensitivity_with_zero=sens_zero,
        correlation_r=r,
        p_value=p,
        correlation_n=n,
        correlation_mode=correlation_mode,
        adjacent_tests=tuple(tests),
        flags=tuple(flags),
    )


def generality_matrix(reports: list[ConditionReport]) -> dict[str, tuple[tuple[str, bool], ...]]:
    """Per metric: the domains where boundedness holds and a significant
    downward trend exists (no invalid direction)."""
    by_metric: dict[str, dict[str, bool]] = {}
    for rep in reports:
        passed = rep.bounded.passed and rep.trend_significant() and not rep.invalid_direction
        cell = by_metric.setdefault(rep.metric, {})
        # a metric passes a domain only if every recorded subset cell passes
        cell[rep.domain] = cell.get(rep.domain, True) and passed
    return {
        metric: tuple(sorted(domains.items()))
        for metric, domains in sorted(by_metric.items())
    }


def robustness_pairs(
    reports: list[ConditionReport],
) -> dict[tuple[str, str], dict[str, ConditionReport]]:
    """Group reports as (metric, domain) -> {subset: report} for the
    entity / non-entity side-by-side comparison."""
    grouped: dict[tuple[str, str], dict[str, ConditionReport]] = {}
    for rep in reports:
        grouped.setdefault((rep.metric, rep.domain), {})[rep.subset] = rep
    return grouped
