"""Deviation bounds evaluated in log space.

Every bound returns a :class:`BoundValue` holding the natural log of the
unclamped bound; the probability is that value clamped to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import TailParams

LN8 = math.log(8.0)
LN12 = math.log(12.0)


class MDEUndefinedError(ValueError):
    """Raised when a bound needs the discrimination margin but none exists."""


@dataclass(frozen=True)
class BoundValue:
    log_value: float
    vacuous: bool = False
    threshold: float | None = None

    @property
    def probability(self) -> float:
        return 1.0 if self.log_value >= 0 else math.exp(self.log_value)

    def to_dict(self) -> dict:
        out = {"log_value": self.log_value, "probability": self.probability, "vacuous": self.vacuous}
        if self.threshold is not None:
            out["threshold"] = self.threshold
        return out


VACUOUS = BoundValue(0.0, vacuous=True)

Handle = Callable[[float, float, int], BoundValue]


def log_sum(*values: BoundValue) -> BoundValue:
    """Bound on a union of events: the sum of the bounds, in log space."""
    top = max(v.log_value for v in values)
    total = top + math.log(math.fsum(math.exp(v.log_value - top) for v in values))
    return BoundValue(total, any(v.vacuous for v in values))


def scaled(value: BoundValue, factor: float) -> BoundValue:
    if factor <= 0:
        raise ValueError("scale factor must be positive")
    return BoundValue(math.log(factor) + value.log_value, value.vacuous, value.threshold)


def _check(N, eps, d, C=1.0) -> None:
    if not N >= 1:
        raise ValueError("N must be at least 1")
    if not eps >= 0:
        raise ValueError("epsilon must be nonnegative")
    if not d >= 1:
        raise ValueError("d must be at least 1")
    if not C > 0:
        raise ValueError("C must be positive")


def shatter_log_bound(d: int, N: float) -> float:
    """Log of the growth-function bound: ``N ln 2`` up to ``N = d``, then ``d(1 + ln(N/d))``."""
    if d < 1 or N < 1:
        raise ValueError("d and N must be at least 1")
    return N * math.log(2.0) if N <= d else d * (1 + math.log(N / d))


def gc_bound(N: float, epsilon: float) -> BoundValue:
    _check(N, epsilon, 1)
    return BoundValue(LN8 + math.log(N + 1) - N * epsilon**2 / 32)


def _vc_tail(N, eps, d, C, denom) -> BoundValue:
    _check(N, eps, d, C)
    if N <= d:
        return VACUOUS
    return BoundValue(LN8 + d * (1 + math.log(N / d)) - N * eps**2 / (denom * C**2))


def typeI_bounded(N: float, epsilon: float, d: int, C: float = 1.0) -> BoundValue:
    """Uniform deviation bound for a loss bounded by C."""
    return _vc_tail(N, epsilon, d, C, 32)


def typeI_binary(N: float, epsilon: float, d: int) -> BoundValue:
    return typeI_bounded(N, epsilon, d, 1.0)


def typeII_bounded(N: float, epsilon: float, d: int, C: float = 1.0) -> BoundValue:
    """Excess-risk bound for the empirical risk minimizer (loss bounded by C)."""
    return _vc_tail(N, epsilon, d, C, 128)


def lambda_factor(p: float, varsigma: float) -> float:
    """Light-tail constant, defined for p > 2."""
    if not p > 2:
        raise ValueError("lambda_factor needs p > 2")
    if not 0 < varsigma < 1:
        raise ValueError("varsigma must lie in (0, 1)")
    return 0.5 ** (2 / p) * (p / (p - 2)) ** ((p - 1) / p) + (p / (p - 1)) * varsigma ** ((p - 2) / (2 * p))


def gamma_factor(p: float, epsilon: float, varsigma: float) -> float:
    """Heavy-tail constant, defined for 1 < p <= 2 and 0 < epsilon < 1."""
    if not 1 < p <= 2:
        raise ValueError("gamma_factor needs 1 < p <= 2")
    if not 0 < epsilon < 1:
        raise ValueError("gamma_factor needs 0 < epsilon < 1")
    if not 0 <= varsigma < 1:
        raise ValueError("varsigma must lie in (0, 1)")
    a = (p - 1) / p
    b = (p / (p - 1)) ** (p - 1)
    first = a * (1 + varsigma) ** (1 / p)
    second = (1 / p) * b * (1 + a**p * varsigma ** (1 / p)) ** (1 / p) * (1 + math.log(1 / epsilon) / b) ** a
    return first + second


def light_exponent(p: float) -> float:
    q = math.sqrt(p)
    return 1 - 2 / q + 2 / p


def heavy_exponent(p: float) -> float:
    q = math.sqrt(p)
    return 2 * (q - 1) / q - 2 / q + 2 / p


def heavy_scaled_epsilon(N: float, epsilon: float, p: float) -> float:
    q = math.sqrt(p)
    return epsilon / N ** (1 / q - 1 / p)


def default_varsigma(N: float, epsilon: float, p: float) -> float:
    """Half the admissible slack boundary of the branch selected by ``p``."""
    if p >= 4:
        return epsilon**2 / 2
    q = math.sqrt(p)
    eps_n = heavy_scaled_epsilon(N, epsilon, p)
    return math.exp(math.log(0.5) + (q / (q - 1)) ** 2 * math.log(eps_n))


def _check_varsigma(N, epsilon, p, varsigma) -> None:
    if p >= 4:
        if not 0 < varsigma < epsilon**2:
            raise ValueError("light tails need 0 < varsigma < epsilon**2")
        return
    q = math.sqrt(p)
    eps_n = heavy_scaled_epsilon(N, epsilon, p)
    if not varsigma > 0 or not (q - 1) / q * math.log(varsigma) < q / (q - 1) * math.log(eps_n):
        raise ValueError("heavy tails need varsigma**((q-1)/q) < eps_N**(q/(q-1)) with q = sqrt(p)")


def _relative(N, epsilon, d, tail: TailParams, light_den, heavy_den, damp) -> BoundValue:
    if not 0 < epsilon < 1:
        raise ValueError("relative bounds need 0 < epsilon < 1")
    if not N >= 1 or not d >= 1:
        raise ValueError("N and d must be at least 1")
    p = tail.p
    q = math.sqrt(p)
    varsigma = tail.varsigma if tail.varsigma is not None else default_varsigma(N, epsilon, p)
    if tail.varsigma is not None:
        _check_varsigma(N, epsilon, p, varsigma)
    if p >= 4:
        # at p == 4 the constant is evaluated at 2, where it diverges
        factor = math.inf if q <= 2 else lambda_factor(q, varsigma)
        rate = epsilon**2 * damp**2 * N ** light_exponent(p) / light_den
    else:
        factor = gamma_factor(q, heavy_scaled_epsilon(N, epsilon, p), varsigma)
        rate = epsilon**2 * N ** heavy_exponent(p) / heavy_den(q)
    threshold = tail.tau_star * factor * epsilon
    if 2 * N <= d:
        return BoundValue(0.0, True, threshold)
    return BoundValue(LN12 + d * (1 + math.log(2 * N / d)) - rate, False, threshold)


def relI_unbounded(N: float, epsilon: float, d: int, tail: TailParams) -> BoundValue:
    """Relative uniform deviation bound for losses >= 1 with a moment-ratio cap."""
    return _relative(N, epsilon, d, tail, 4, lambda q: 2 ** ((q + 2) / 2), 1 - epsilon)


def relII_unbounded(N: float, epsilon: float, d: int, tail: TailParams) -> BoundValue:
    """Relative excess-risk bound for losses >= 1 with a moment-ratio cap."""
    return _relative(N, epsilon, d, tail, 16, lambda q: 2 ** ((q + 6) / 2), 1 - epsilon / 2)


@dataclass(frozen=True)
class SelectionBoundParams:
    """Inputs shared by the model-selection bounds.

    Training and validation sizes come from ``train_size``/``val_size`` when
    given, else from ``c`` (holdout) or ``k`` (k-fold).
    """

    N: float
    epsilon_star: float | None
    d_vc_family: int
    m_pairs: int = 1
    m_maximal: int = 1
    epsilon: float | None = None
    M: float | None = None
    c: float | None = None
    k: int | None = None
    train_size: float | None = None
    val_size: float | None = None
    C: float = 1.0
    max_model_risk: float | None = None
    target_model_risk: float | None = None
    tail: TailParams | None = None

    def __post_init__(self):
        if self.c is not None and not 0 < self.c < 0.5:
            raise ValueError("c must lie in (0, 1/2)")
        if self.k is not None and self.k < 2:
            raise ValueError("k must be at least 2")
        if self.m_pairs < 1 or self.m_maximal < 1:
            raise ValueError("pair and maximal-model counts must be at least 1")

    def sizes(self) -> tuple[float, float]:
        if self.train_size is not None and self.val_size is not None:
            return self.train_size, self.val_size
        if self.c is not None:
            return (1 - self.c) * self.N, self.c * self.N
        if self.k is not None:
            return self.N * (self.k - 1) / self.k, self.N / self.k
        raise ValueError("give train/validation sizes, c or k")

    def margin(self) -> float:
        if self.epsilon_star is None:
            raise MDEUndefinedError("every model attains the target risk; the margin is undefined")
        if not self.epsilon_star > 0:
            raise ValueError("epsilon_star must be positive")
        return self.epsilon_star

    def need_epsilon(self) -> float:
        if self.epsilon is None or not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        return self.epsilon


def _bounded_handles(params, B, B_hat):
    default = lambda n, e, d: typeI_bounded(n, e, d, params.C)  # noqa: E731
    return B or default, B_hat or default


def _consistency(params: SelectionBoundParams, margin: float, B, B_hat) -> BoundValue:
    B, B_hat = _bounded_handles(params, B, B_hat)
    train, val = params.sizes()
    d = params.d_vc_family
    inner = log_sum(B(train, margin / 8, d), B_hat(val, margin / 4, d))
    return scaled(inner, params.m_pairs * params.m_maximal)


def model_consistency_bounded(params: SelectionBoundParams, B: Handle | None = None, B_hat: Handle | None = None) -> BoundValue:
    """Bound on selecting a model whose risk differs from the target's."""
    return _consistency(params, params.margin(), B, B_hat)


def typeIII_bounded(params: SelectionBoundParams, B: Handle | None = None, B_hat: Handle | None = None) -> BoundValue:
    eps = params.need_epsilon()
    return _consistency(params, max(eps, params.margin()), B, B_hat)


def typeIV_bounded(
    params: SelectionBoundParams, B: Handle | None = None, B_hat: Handle | None = None, B_II: Handle | None = None
) -> BoundValue:
    eps = params.need_epsilon()
    if params.M is None:
        raise ValueError("type IV needs the independent sample size M")
    B_II = B_II or (lambda n, e, d: typeII_bounded(n, e, d, params.C))
    third = _consistency(params, max(eps / 2, params.margin()), B, B_hat)
    return log_sum(B_II(params.M, eps / 2, params.d_vc_family), third)


def _unbounded_handles(params, B, B_hat):
    if (B is None or B_hat is None) and params.tail is None:
        raise ValueError("default relative handles need tail parameters")
    default = lambda n, e, d: relI_unbounded(n, e, d, params.tail)  # noqa: E731
    return B or default, B_hat or default


def _delta(params: SelectionBoundParams, margin: float) -> float:
    if params.max_model_risk is None or not params.max_model_risk > 0:
        raise ValueError("the largest model risk must be positive")
    delta = margin / (2 * params.max_model_risk)
    if not 0 < delta < 1:
        raise ValueError(f"delta={delta} is outside (0, 1); margin and model risks are inconsistent")
    return delta


def _consistency_relative(params: SelectionBoundParams, margin: float, B, B_hat) -> BoundValue:
    B, B_hat = _unbounded_handles(params, B, B_hat)
    delta = _delta(params, margin)
    train, val = params.sizes()
    d = params.d_vc_family
    inner = log_sum(B_hat(val, delta * (1 - delta) / 2, d), B(train, delta * (1 - delta) / 4, d))
    return scaled(inner, 2 * params.m_pairs * params.m_maximal)


def model_consistency_unbounded(params: SelectionBoundParams, B: Handle | None = None, B_hat: Handle | None = None) -> BoundValue:
    return _consistency_relative(params, params.margin(), B, B_hat)


def typeIII_unbounded(params: SelectionBoundParams, B: Handle | None = None, B_hat: Handle | None = None) -> BoundValue:
    eps = params.need_epsilon()
    return _consistency_relative(params, max(eps, params.margin()), B, B_hat)


def typeIV_unbounded(
    params: SelectionBoundParams, B: Handle | None = None, B_hat: Handle | None = None, B_II: Handle | None = None
) -> BoundValue:
    eps = params.need_epsilon()
    if params.M is None:
        raise ValueError("type IV needs the independent sample size M")
    if params.target_model_risk is None or not params.target_model_risk > 0:
        raise ValueError("type IV needs a positive target model risk")
    if B_II is None:
        if params.tail is None:
            raise ValueError("default relative handles need tail parameters")
        B_II = lambda n, e, d: relII_unbounded(n, e, d, params.tail)  # noqa: E731
    first = B_II(params.M, eps / (2 * params.target_model_risk), params.d_vc_family)
    third = _consistency_relative(params, max(eps / 2, params.margin()), B, B_hat)
    return log_sum(first, third)


def bound_on_selected(
    M: float,
    epsilon: float,
    d_vc_family: int,
    kind: str = "typeI",
    loss_kind: str = "binary",
    C: float = 1.0,
    tail: TailParams | None = None,
) -> BoundValue:
    """Worst-case bound for errors I or II of learning on the selected model."""
    if kind not in ("typeI", "typeII"):
        raise ValueError("kind must be 'typeI' or 'typeII'")
    if loss_kind in ("binary", "bounded"):
        C = 1.0 if loss_kind == "binary" else C
        fn = typeI_bounded if kind == "typeI" else typeII_bounded
        return fn(M, epsilon, d_vc_family, C)
    if loss_kind == "unbounded":
        if tail is None:
            raise ValueError("unbounded losses need tail parameters")
        fn = relI_unbounded if kind == "typeI" else relII_unbounded
        return fn(M, epsilon, d_vc_family, tail)
    raise ValueError(f"unknown loss kind {loss_kind!r}")


def lemma_norm_envelope(q: float, p: float, N: int) -> tuple[float, float]:
    """Envelope ``[1, N**(1/q - 1/p)]`` of the ratio of sample L^p and L^q norms."""
    if not 1 <= q < p:
        raise ValueError("need 1 <= q < p")
    if N < 1:
        raise ValueError("N must be at least 1")
    return 1.0, N ** (1 / q - 1 / p)
