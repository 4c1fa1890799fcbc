"""Paired significance testing against a baseline model.

Exact two-sided Student-t p-values via the regularized incomplete beta
function (continued-fraction evaluation, no external stats dependency),
plus the fixed significance-tier legend used in reports:
p < 0.0001, < 0.001, < 0.01, < 0.05, not significant. All thresholds are
strict; records without per-sample vectors are reported as unavailable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .registry import RegistrySnapshot, UnknownNameError, canonical_scope

TIER_THRESHOLDS = (
    (1e-4, "p<0.0001"),
    (1e-3, "p<0.001"),
    (1e-2, "p<0.01"),
    (5e-2, "p<0.05"),
)
TIER_NOT_SIGNIFICANT = "not_significant"
TIER_UNAVAILABLE = "unavailable"

_BETA_EPS = 1e-15
_BETA_TINY = 1e-300
_BETA_MAX_ITER = 500


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    df: int
    p_two_sided: float
    n: int
    degenerate: bool = False  # constant nonzero differences (sd == 0)


@dataclass(frozen=True)
class SignificanceTier:
    tier: str
    direction: str  # improves / degrades / tie


@dataclass(frozen=True)
class SignificanceCell:
    model: str
    dataset: str
    scope: str
    source: str | None
    t_stat: float | None
    df: int | None
    p: float | None
    tier: SignificanceTier


def _betacf(x: float, a: float, b: float) -> float:
    """Continued fraction for the incomplete beta (Lentz's method)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_TINY:
        d = _BETA_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge for x={x}, a={a}, b={b}")


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b), absolute error well below 1e-10 over the t-test range."""
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fast for x below the distribution
    # bulk; use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(x, a, b) / a
    return 1.0 - front * _betacf(1.0 - x, b, a) / b


def student_t_sf(t: float, df: int) -> float:
    """One-sided upper-tail probability P(T >= t) for Student's t."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if math.isnan(t):
        raise ValueError("t statistic is NaN")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(x, df / 2.0, 0.5)
    return tail if t > 0 else 1.0 - tail


def paired_t_test(x: list[float], y: list[float]) -> TTestResult:
    """Two-sided paired t-test on per-sample aligned vectors."""
    if len(x) != len(y):
        raise ValueError(f"paired vectors differ in length: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise ValueError(f"paired t-test needs at least 2 pairs, got {n}")
    d = [xi - yi for xi, yi in zip(x, y)]
    mean = sum(d) / n
    var = sum((v - mean) ** 2 for v in d) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(t_stat=0.0, df=n - 1, p_two_sided=1.0, n=n)
        # Limit of the statistic as sd -> 0: flagged so callers cannot
        # mistake it for a well-conditioned result.
        return TTestResult(
            t_stat=math.copysign(math.inf, mean), df=n - 1, p_two_sided=0.0, n=n, degenerate=True
        )
    t = mean * math.sqrt(n) / sd
    p = 2.0 * student_t_sf(abs(t), n - 1)
    return TTestResult(t_stat=t, df=n - 1, p_two_sided=min(p, 1.0), n=n)


def classify(p: float | None, variant_mean: float, baseline_mean: float) -> SignificanceTier:
    """Tier from strict thresholds; direction from the mean comparison."""
    if variant_mean > baseline_mean:
        direction = "improves"
    elif variant_mean < baseline_mean:
        direction = "degrades"
    else:
        direction = "tie"
    if p is None:
        return SignificanceTier(TIER_UNAVAILABLE, direction)
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    for threshold, name in TIER_THRESHOLDS:
        if p < threshold:
            return SignificanceTier(name, direction)
    return SignificanceTier(TIER_NOT_SIGNIFICANT, direction)


def significance_matrix(
    snapshot: RegistrySnapshot, baseline: str, scope: str
) -> list[SignificanceCell]:
    """Paired test of every variant against the baseline, per dataset.

    Pairs records on (dataset, scope, source); both sides need sample
    vectors of equal length, otherwise the cell is unavailable.
    """
    scope = canonical_scope(scope)
    if all(card.name != baseline for card in snapshot.models):
        raise UnknownNameError(f"baseline model {baseline!r} is not registered")
    base_records = {
        (r.dataset, r.source): r for r in snapshot.records if r.model == baseline and r.scope == scope
    }
    cells: list[SignificanceCell] = []
    for record in snapshot.records:
        if record.scope != scope or record.model == baseline:
            continue
        base = base_records.get((record.dataset, record.source))
        t_stat = df = p = None
        if (
            base is not None
            and record.sample_ious
            and base.sample_ious
            and len(record.sample_ious) == len(base.sample_ious)
        ):
            result = paired_t_test(list(record.sample_ious), list(base.sample_ious))
            t_stat, df, p = result.t_stat, result.df, result.p_two_sided
        baseline_mean = base.mean_iou if base is not None else record.mean_iou
        tier = classify(p, record.mean_iou, baseline_mean)
        cells.append(
            SignificanceCell(
                model=record.model,
                dataset=record.dataset,
                scope=record.scope,
                source=record.source,
                t_stat=t_stat,
                df=df,
                p=p,
                tier=tier,
            )
        )
    cells.sort(key=lambda c: (c.model, c.dataset, c.source or ""))
    return cells
