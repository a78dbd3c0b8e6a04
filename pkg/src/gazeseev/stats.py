"""Two-sample t-tests and one-way ANOVA with p-values from the incomplete beta function."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000


class TTestVariant(enum.Enum):
    POOLED = "pooled"
    WELCH = "welch"


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p: float
    variant: TTestVariant


@dataclass(frozen=True)
class AnovaResult:
    f: float
    df_between: int
    df_within: int
    p: float


def _beta_cf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta ``I_x(a, b)``.

    ``y`` may carry ``1 - x`` computed without cancellation by the caller.
    """
    if not (a > 0 and b > 0):
        raise ValueError(f"betainc needs a, b > 0 (got a={a}, b={b})")
    if y is None:
        y = 1.0 - x
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"betainc needs 0 <= x <= 1, got {x}")
    if x == 0.0:
        return 0.0
    if y == 0.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log(y))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return min(1.0, front * _beta_cf(a, b, x) / a)
    return max(0.0, 1.0 - front * _beta_cf(b, a, y) / b)


def _check_df(*dfs: float) -> None:
    for df in dfs:
        if not (df > 0 and not math.isnan(df)):
            raise ValueError(f"degrees of freedom must be positive, got {df}")


def t_sf2(t: float, df: float) -> float:
    """Two-sided tail probability ``P(|T| >= |t|)``."""
    _check_df(df)
    if math.isinf(t):
        return 0.0
    t2 = t * t
    return betainc(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2))


def t_cdf(x: float, df: float) -> float:
    _check_df(df)
    if math.isnan(x):
        raise ValueError("t_cdf of NaN")
    if x == 0:
        return 0.5
    tail = 0.5 * t_sf2(x, df)
    return 1.0 - tail if x > 0 else tail


def f_sf(x: float, d1: float, d2: float) -> float:
    """Upper tail ``P(F >= x)``."""
    _check_df(d1, d2)
    if x <= 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    denom = d1 * x + d2
    return betainc(d2 / 2.0, d1 / 2.0, d2 / denom, d1 * x / denom)


def f_cdf(x: float, d1: float, d2: float) -> float:
    _check_df(d1, d2)
    if math.isnan(x):
        raise ValueError("f_cdf of NaN")
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    denom = d1 * x + d2
    return betainc(d1 / 2.0, d2 / 2.0, d1 * x / denom, d2 / denom)


def _mean_var(values: Sequence[float]) -> tuple[int, float, float]:
    n = len(values)
    m = math.fsum(values) / n
    ss = math.fsum((v - m) ** 2 for v in values)
    return n, m, ss / (n - 1)


def t_test(a: Sequence[float], b: Sequence[float], variant: TTestVariant = TTestVariant.WELCH) -> TTestResult:
    """Two-sided independent-samples t-test (pooled or Welch)."""
    variant = TTestVariant(variant)
    if len(a) < 2 or len(b) < 2:
        raise ValueError(f"each group needs at least 2 values (got {len(a)} and {len(b)})")
    na, ma, va = _mean_var(a)
    nb, mb, vb = _mean_var(b)
    if variant is TTestVariant.POOLED:
        df = na + nb - 2
        sp2 = ((na - 1) * va + (nb - 1) * vb) / df
        if sp2 <= 0:
            raise ValueError("pooled variance is zero; t statistic undefined")
        se = math.sqrt(sp2 * (1.0 / na + 1.0 / nb))
    else:
        qa, qb = va / na, vb / nb
        if qa + qb <= 0:
            raise ValueError("both groups have zero variance; t statistic undefined")
        se = math.sqrt(qa + qb)
        df = (qa + qb) ** 2 / (qa * qa / (na - 1) + qb * qb / (nb - 1))
    t = (ma - mb) / se
    return TTestResult(t, float(df), t_sf2(t, df), variant)


def one_way_anova(groups: Sequence[Sequence[float]]) -> AnovaResult:
    if len(groups) < 2:
        raise ValueError(f"ANOVA needs at least 2 groups, got {len(groups)}")
    stats = []
    for i, g in enumerate(groups):
        if len(g) < 2:
            raise ValueError(f"group {i} has {len(g)} value(s); need at least 2")
        stats.append(_mean_var(g))
    n_total = sum(s[0] for s in stats)
    k = len(stats)
    # pairwise form of the between-group sum of squares: exactly 0 when all means agree
    ssb = math.fsum(
        stats[i][0] * stats[j][0] * (stats[i][1] - stats[j][1]) ** 2
        for i in range(k) for j in range(i + 1, k)
    ) / n_total
    ssw = math.fsum((s[0] - 1) * s[2] for s in stats)
    if ssw <= 0:
        raise ValueError("within-group variance is zero; F statistic undefined")
    df_b, df_w = k - 1, n_total - k
    f = (ssb / df_b) / (ssw / df_w)
    return AnovaResult(f, df_b, df_w, f_sf(f, df_b, df_w))
