"""Sample-size inversion and the classical-versus-selection bound comparison."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping

from .bounds import LN8, VACUOUS, BoundValue, log_sum


class CeilingExceeded(RuntimeError):
    """No sample size up to the ceiling brings the bound under the target."""


class NonMonotoneTail(RuntimeError):
    """The bound failed to stay under the target beyond the returned size."""


def _check_common(d, epsilon, epsilon_star=None, c=None):
    if d < 1:
        raise ValueError("d must be at least 1")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if epsilon_star is not None and not epsilon_star > 0:
        raise ValueError("epsilon_star must be positive")
    if c is not None and not 0 < c < 0.5:
        raise ValueError("c must lie in (0, 1/2)")


def _term(n: float, k: float, rate: float) -> BoundValue:
    """``k(1 + ln(n/k)) - n*rate``, vacuous when ``n <= k``."""
    if n <= k:
        return VACUOUS
    return BoundValue(k * (1 + math.log(n / k)) - n * rate)


def bt2(N: float, d: int, epsilon: float) -> BoundValue:
    """Classical excess-risk bound over the whole space with 2N records."""
    _check_common(d, epsilon)
    if 2 * N <= d:
        return VACUOUS
    return BoundValue(LN8 + d * (1 + math.log(2 * N / d)) - 2 * N * epsilon**2 / 128)


def _first_term(N, epsilon) -> BoundValue:
    if N <= 2:
        return VACUOUS
    return BoundValue(LN8 + 2 * (1 + math.log(N / 2)) - N * epsilon**2 / 512)


def bt4(N: float, d: int, epsilon: float, epsilon_star: float, c: float) -> BoundValue:
    """Total-error bound when selecting among partitions with at most two blocks."""
    _check_common(d, epsilon, epsilon_star, c)
    if d < 2:
        raise ValueError("bt4 needs d >= 2")
    x = max(epsilon / 2, epsilon_star)
    inner = log_sum(_term(c * N, 2, x**2 / 512), _term((1 - c) * N, 2, x**2 / 2048))
    second = BoundValue(LN8 + math.log(2 ** (d - 1) - 1) + inner.log_value, inner.vacuous)
    return log_sum(_first_term(N, epsilon), second)


def bt4_2(N: float, d: int, epsilon: float, epsilon_star: float, c: float) -> BoundValue:
    """Total-error bound when selecting among all partitions of a d-point domain."""
    _check_common(d, epsilon, epsilon_star, c)
    x = max(epsilon / 2, epsilon_star)
    inner = log_sum(_term(c * N, d, x**2 / 512), _term((1 - c) * N, d, x**2 / 2048))
    second = BoundValue(LN8 + inner.log_value, inner.vacuous)
    return log_sum(_first_term(N, epsilon), second)


@dataclass(frozen=True)
class InversionRequest:
    bound: Callable[[int], BoundValue]
    target: float
    n_max: int = 10**13
    n_min: int = 1

    def __post_init__(self):
        if not 0 < self.target <= 1:
            raise ValueError("target must lie in (0, 1]")
        if self.n_min < 1 or self.n_max < self.n_min:
            raise ValueError("need 1 <= n_min <= n_max")


def invert_for_N(request: InversionRequest) -> int:
    """Smallest N on the decreasing branch with ``bound(N) <= target``.

    Doubles N until the bound is under the target at N, 2N and 4N with three
    strictly decreasing values, then bisects over integers below that point.
    """
    if request.target >= 1:
        return request.n_min
    log_t = math.log(request.target)
    cache: dict[int, BoundValue] = {}

    def value(n: int) -> BoundValue:
        if n not in cache:
            cache[n] = request.bound(n)
        return cache[n]

    def ok(n: int) -> bool:
        v = value(n)
        return not v.vacuous and v.log_value <= log_t

    def settled(n: int) -> bool:
        a, b, c = (value(n * f).log_value for f in (1, 2, 4))
        return ok(n) and ok(2 * n) and ok(4 * n) and a > b > c

    n = request.n_min
    while not settled(n):
        n *= 2
        if n > request.n_max:
            raise CeilingExceeded(f"bound stays above {request.target} up to N={request.n_max}")
    hi = n
    lo = n // 2 if n > request.n_min else request.n_min - 1
    if lo >= request.n_min and ok(lo):
        raise NonMonotoneTail(f"bound already under target at N={lo} before its decreasing branch")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    if not (ok(hi) and ok(2 * hi) and ok(4 * hi)):
        raise NonMonotoneTail(f"bound rises above target after N={hi}")
    return hi


BT_FORMULAS = {"bt4": bt4, "bt4_2": bt4_2}


@dataclass(frozen=True)
class FigureConfig:
    d_values: tuple[int, ...] = tuple(range(4, 51))
    eps_values: tuple[float, ...] = (0.01, 0.025, 0.05)
    eps_star_values: tuple[float, ...] = (0.05, 0.1, 0.2)
    c: float = 0.2
    target: float = 0.05
    formula: str = "bt4"
    n_max: int = 10**13

    def __post_init__(self):
        if self.formula not in BT_FORMULAS:
            raise ValueError(f"formula must be one of {sorted(BT_FORMULAS)}")
        if not self.d_values or not self.eps_values or not self.eps_star_values:
            raise ValueError("grid axes must be nonempty")
        object.__setattr__(self, "d_values", tuple(int(d) for d in self.d_values))
        object.__setattr__(self, "eps_values", tuple(float(e) for e in self.eps_values))
        object.__setattr__(self, "eps_star_values", tuple(float(e) for e in self.eps_star_values))

    @classmethod
    def from_dict(cls, data: Mapping) -> "FigureConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown figure config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GridCell:
    d_vc: int
    epsilon: float
    epsilon_star: float
    n_ii: int
    n_iv: int

    @property
    def tighter(self) -> str:
        if self.n_iv < self.n_ii:
            return "IV"
        if self.n_ii < self.n_iv:
            return "II"
        return "tie"


CSV_COLUMNS = ("d_vc", "epsilon", "epsilon_star", "N_II", "N_IV", "tighter")


@dataclass(frozen=True)
class FigureGrid:
    config: FigureConfig
    cells: tuple[GridCell, ...] = field(default_factory=tuple)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in self.cells:
            writer.writerow([c.d_vc, repr(c.epsilon), repr(c.epsilon_star), c.n_ii, c.n_iv, c.tighter])
        return buf.getvalue()


def solve_cell(config: FigureConfig, d: int, eps: float, eps_star: float) -> GridCell:
    formula = BT_FORMULAS[config.formula]
    n_ii = invert_for_N(InversionRequest(lambda n: bt2(n, d, eps), config.target, config.n_max))
    n_iv = invert_for_N(InversionRequest(lambda n: formula(n, d, eps, eps_star, config.c), config.target, config.n_max))
    return GridCell(d, eps, eps_star, n_ii, n_iv)


def figure_grid(config: FigureConfig | None = None) -> FigureGrid:
    """Invert both bounds on every (epsilon, epsilon_star, d) cell."""
    config = config or FigureConfig()
    cells = tuple(
        solve_cell(config, d, eps, es)
        for eps in config.eps_values
        for es in config.eps_star_values
        for d in config.d_values
    )
    return FigureGrid(config, cells)


def load_figure_config(text: str) -> FigureConfig:
    return FigureConfig.from_dict(json.loads(text))
