"""Finite domains, hypotheses, distributions, samples, losses and risks.

Risks are exact ``Fraction`` values whenever the loss and the weights are
rational, so equality between risks needs no tolerance.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

LABELS = (0, 1)
REAL_TOL = 1e-12

LOSS_KINDS = ("binary", "bounded", "unbounded")


def _as_fraction(value) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("weights must be rational numbers, not booleans")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"weights must be exact rationals, got {type(value).__name__}")


def exact_div(total, count: int):
    """Divide keeping exactness for rational totals."""
    return Fraction(total, count) if isinstance(total, int) else total / count


@dataclass(frozen=True)
class FiniteDomain:
    """Points ``0..size-1`` paired with the labels ``{0, 1}``."""

    size: int

    def __post_init__(self):
        if isinstance(self.size, bool) or not isinstance(self.size, (int, np.integer)):
            raise TypeError("domain size must be an integer")
        if self.size < 1:
            raise ValueError("domain size must be at least 1")
        object.__setattr__(self, "size", int(self.size))

    @property
    def atoms(self) -> tuple[tuple[int, int], ...]:
        return tuple((x, y) for x in range(self.size) for y in LABELS)

    def check(self, x, y) -> None:
        if not (0 <= x < self.size) or y not in LABELS:
            raise ValueError(f"({x}, {y}) is not a valid record for a domain of size {self.size}")


@dataclass(frozen=True, order=True)
class Hypothesis:
    """A labeling table; ``table[x]`` is the predicted label of point x."""

    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        if not table:
            raise ValueError("a hypothesis needs at least one point")
        if any(v not in LABELS for v in table):
            raise ValueError("hypothesis labels must be 0 or 1")
        object.__setattr__(self, "table", table)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __len__(self) -> int:
        return len(self.table)

    def __str__(self) -> str:
        return "".join(map(str, self.table))

    @classmethod
    def from_string(cls, text: str) -> "Hypothesis":
        return cls(tuple(int(ch) for ch in text.strip()))

    @property
    def n(self) -> int:
        return len(self.table)


def all_hypotheses(n: int) -> tuple[Hypothesis, ...]:
    """Every labeling of ``n`` points, in lexicographic table order."""
    FiniteDomain(n)
    return tuple(Hypothesis(tuple((code >> (n - 1 - i)) & 1 for i in range(n))) for code in range(2**n))


@dataclass(frozen=True)
class JointDistribution:
    """Exact probability mass over ``(x, y)``; ``weights[2*x + y]``."""

    n: int
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        FiniteDomain(self.n)
        weights = tuple(_as_fraction(w) for w in self.weights)
        if len(weights) != 2 * self.n:
            raise ValueError(f"expected {2 * self.n} weights, got {len(weights)}")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative")
        if sum(weights) != 1:
            raise ValueError(f"weights sum to {sum(weights)}, not 1")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_pmf(cls, n: int, pmf: Mapping[tuple[int, int], object]) -> "JointDistribution":
        domain = FiniteDomain(n)
        weights = [Fraction(0)] * (2 * n)
        for (x, y), w in pmf.items():
            domain.check(x, y)
            weights[2 * x + y] += _as_fraction(w)
        return cls(n, tuple(weights))

    @classmethod
    def uniform(cls, n: int) -> "JointDistribution":
        return cls(n, (Fraction(1, 2 * n),) * (2 * n))

    @classmethod
    def from_conditional(cls, px: Sequence, py1: Sequence) -> "JointDistribution":
        """Build from a marginal over points and ``P(y=1 | x)``."""
        if len(px) != len(py1):
            raise ValueError("marginal and conditional lengths differ")
        weights = []
        for a, b in zip(px, py1):
            a, b = _as_fraction(a), _as_fraction(b)
            if not 0 <= b <= 1:
                raise ValueError("conditional probabilities must lie in [0, 1]")
            weights += [a * (1 - b), a * b]
        return cls(len(px), tuple(weights))

    @classmethod
    def deterministic(cls, labels: Sequence[int], px: Sequence | None = None) -> "JointDistribution":
        """Labels are a fixed function of the point; uniform points by default."""
        n = len(labels)
        px = px if px is not None else [Fraction(1, n)] * n
        return cls.from_conditional(px, [Fraction(int(v)) for v in labels])

    @property
    def domain(self) -> FiniteDomain:
        return FiniteDomain(self.n)

    def __getitem__(self, atom: tuple[int, int]) -> Fraction:
        x, y = atom
        self.domain.check(x, y)
        return self.weights[2 * x + y]

    @property
    def pmf(self) -> dict[tuple[int, int], Fraction]:
        return {(i // 2, i % 2): w for i, w in enumerate(self.weights)}

    @cached_property
    def by_point(self) -> tuple[tuple[Fraction, Fraction], ...]:
        w = self.weights
        return tuple((w[2 * x], w[2 * x + 1]) for x in range(self.n))

    def to_dict(self) -> dict:
        return {
            "size": self.n,
            "pmf": [
                {"x": i // 2, "y": i % 2, "num": w.numerator, "den": w.denominator}
                for i, w in enumerate(self.weights)
                if w
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "JointDistribution":
        try:
            n = int(data["size"])
            pmf = {(int(e["x"]), int(e["y"])): Fraction(int(e["num"]), int(e["den"])) for e in data["pmf"]}
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed distribution: {exc}") from exc
        return cls.from_pmf(n, pmf)

    @classmethod
    def from_json(cls, text: str) -> "JointDistribution":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Sample:
    """An ordered sequence of ``(x, y)`` records over a domain of size ``n``."""

    n: int
    records: tuple[tuple[int, int], ...]

    def __post_init__(self):
        domain = FiniteDomain(self.n)
        records = tuple((int(x), int(y)) for x, y in self.records)
        if not records:
            raise ValueError("a sample needs at least one record")
        for x, y in records:
            domain.check(x, y)
        object.__setattr__(self, "records", records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @cached_property
    def atom_codes(self) -> np.ndarray:
        return np.fromiter((2 * x + y for x, y in self.records), dtype=np.int64, count=len(self.records))

    def counts(self, indices=None) -> tuple[tuple[int, int], ...]:
        """Per-point label counts, optionally over a subset of record indices."""
        codes = self.atom_codes if indices is None else self.atom_codes[np.asarray(indices, dtype=np.int64)]
        flat = np.bincount(codes, minlength=2 * self.n).tolist()
        return tuple((flat[2 * x], flat[2 * x + 1]) for x in range(self.n))

    def subset(self, indices: Iterable[int]) -> "Sample":
        return Sample(self.n, tuple(self.records[i] for i in indices))

    def empirical_distribution(self) -> JointDistribution:
        N = len(self.records)
        flat = np.bincount(self.atom_codes, minlength=2 * self.n).tolist()
        return JointDistribution(self.n, tuple(Fraction(c, N) for c in flat))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y"])
        writer.writerows(self.records)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, n: int | None = None) -> "Sample":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows or "x" not in rows[0] or "y" not in rows[0]:
            raise ValueError("sample CSV needs columns x,y and at least one row")
        records = tuple((int(r["x"]), int(r["y"])) for r in rows)
        size = n if n is not None else 1 + max(x for x, _ in records)
        return cls(size, records)


@dataclass(frozen=True)
class TailParams:
    """Tail description for relative bounds: moment order, moment-ratio cap and slack."""

    p: float
    tau_star: float
    varsigma: float | None = None

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if not (1 < self.tau_star < math.inf):
            raise ValueError("tau_star must be finite and exceed 1")
        if self.varsigma is not None and not (0 < self.varsigma < 1):
            raise ValueError("varsigma must lie in (0, 1)")

    @property
    def q(self) -> float:
        return math.sqrt(self.p)


def _simple_loss(x, y, pred):
    return int(pred != y)


@dataclass(frozen=True)
class LossSpec:
    """Pointwise loss ``fn(x, y, prediction)`` with a declared range.

    ``binary`` losses take values in {0, 1}, ``bounded`` ones in ``[0, C]`` and
    ``unbounded`` ones are at least 1.
    """

    kind: str = "binary"
    fn: Callable[[int, int, int], object] = _simple_loss
    C: float | None = None

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"loss kind must be one of {LOSS_KINDS}")
        if self.kind == "bounded" and not (self.C is not None and self.C > 0):
            raise ValueError("bounded losses need C > 0")
        if self.kind == "binary":
            object.__setattr__(self, "C", 1)

    @classmethod
    def simple(cls) -> "LossSpec":
        return _SIMPLE

    @classmethod
    def bounded(cls, fn, C) -> "LossSpec":
        return cls("bounded", fn, C)

    @classmethod
    def unbounded(cls, fn) -> "LossSpec":
        return cls("unbounded", fn)

    def shifted(self, k=1) -> "LossSpec":
        """The loss plus a constant, as an unbounded loss (needs k >= 1)."""
        if k < 1:
            raise ValueError("shift must be at least 1 to stay >= 1")
        base = self.fn
        return LossSpec("unbounded", _Shifted(base, k))

    def __call__(self, x: int, y: int, pred: int):
        v = self.fn(x, y, pred)
        self._check(v)
        return v

    def _check(self, v) -> None:
        if self.kind == "binary" and v not in (0, 1):
            raise ValueError(f"binary loss returned {v}")
        if self.kind == "bounded" and not (0 <= v <= self.C):
            raise ValueError(f"bounded loss returned {v} outside [0, {self.C}]")
        if self.kind == "unbounded" and not v >= 1:
            raise ValueError(f"unbounded loss returned {v} < 1")

    def table(self, n: int):
        """``table[x][y][pred]`` for every point, validated once."""
        return _loss_table(self, n)


@dataclass(frozen=True)
class _Shifted:
    base: Callable
    k: object

    def __call__(self, x, y, pred):
        return self.base(x, y, pred) + self.k


_SIMPLE = LossSpec()


@lru_cache(maxsize=256)
def _loss_table(loss: LossSpec, n: int):
    return tuple(tuple(tuple(loss(x, y, p) for p in LABELS) for y in LABELS) for x in range(n))


def weighted_loss(h: Hypothesis, weights, table):
    """``sum_x sum_y weights[x][y] * loss(x, y, h(x))`` with per-point weights."""
    total = 0
    for x, label in enumerate(h.table):
        w0, w1 = weights[x]
        row = table[x]
        if w0:
            total += w0 * row[0][label]
        if w1:
            total += w1 * row[1][label]
    return total


def _check_same_domain(h: Hypothesis, n: int) -> None:
    if len(h) != n:
        raise ValueError(f"hypothesis has {len(h)} points but the domain has {n}")


def true_risk(h: Hypothesis, P: JointDistribution, loss: LossSpec = _SIMPLE):
    _check_same_domain(h, P.n)
    return weighted_loss(h, P.by_point, loss.table(P.n)) + Fraction(0)


def empirical_risk(h: Hypothesis, sample: Sample, loss: LossSpec = _SIMPLE):
    if len(sample) == 0:
        raise ValueError("empty sample")
    _check_same_domain(h, sample.n)
    return exact_div(weighted_loss(h, sample.counts(), loss.table(sample.n)), len(sample))


def lp_mean(values: Sequence[float], p: float, weights: Sequence[float] | None = None) -> float:
    """``(mean of v**p) ** (1/p)``, weighted when weights are given (p >= 1)."""
    if p < 1:
        raise ValueError("p must be at least 1")
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("no values")
    if weights is None:
        mean = math.fsum(v**p for v in vals) / len(vals)
    else:
        mean = math.fsum(float(w) * v**p for w, v in zip(weights, vals))
    return mean ** (1.0 / p)


def p_moment(h: Hypothesis, carrier: JointDistribution | Sample, loss: LossSpec, p: float) -> float:
    """L^p norm of the loss of ``h`` under a distribution or a sample."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    if isinstance(carrier, Sample):
        _check_same_domain(h, carrier.n)
        return lp_mean([loss(x, y, h(x)) for x, y in carrier.records], p)
    _check_same_domain(h, carrier.n)
    atoms = [(i // 2, i % 2, w) for i, w in enumerate(carrier.weights) if w]
    return lp_mean([loss(x, y, h(x)) for x, y, _ in atoms], p, [w for _, _, w in atoms])


def tau_p(model: Iterable[Hypothesis], P: JointDistribution, loss: LossSpec, p: float) -> float:
    """Largest ratio ``L^p(h) / L(h)`` over the model."""
    best = None
    for h in model:
        risk = float(true_risk(h, P, loss))
        if risk <= 0:
            raise ValueError("tau_p needs strictly positive risks")
        ratio = p_moment(h, P, loss, p) / risk
        best = ratio if best is None else max(best, ratio)
    if best is None:
        raise ValueError("empty model")
    return best


def best_in_model(model, weights, table):
    """Minimizer of the weighted loss over a model and its weighted loss.

    Ties go to the lexicographically smallest table. Models that expose
    ``best_from_weights`` are solved without enumeration.
    """
    fast = getattr(model, "best_from_weights", None)
    if fast is not None:
        return fast(weights, table)
    best_h, best_v = None, None
    for h in model:
        v = weighted_loss(h, weights, table)
        if best_h is None or v < best_v or (v == best_v and h.table < best_h.table):
            best_h, best_v = h, v
    if best_h is None:
        raise ValueError("empty model")
    return best_h, best_v


def erm(model, sample: Sample, loss: LossSpec = _SIMPLE) -> tuple[Hypothesis, object]:
    """Empirical risk minimizer over ``model`` and its empirical risk."""
    h, total = best_in_model(model, sample.counts(), loss.table(sample.n))
    _check_same_domain(h, sample.n)
    return h, exact_div(total, len(sample))


def targets_in_model(model, weights, table) -> tuple[Hypothesis, ...]:
    fast = getattr(model, "minimizers_from_weights", None)
    if fast is not None:
        return fast(weights, table)
    scored = [(weighted_loss(h, weights, table), h) for h in model]
    if not scored:
        raise ValueError("empty model")
    low = min(v for v, _ in scored)
    return tuple(sorted(h for v, h in scored if v == low))


def model_true_risk(model, P: JointDistribution, loss: LossSpec = _SIMPLE):
    """``(L(M), minimizers)``: the least true risk in the model and its attainers."""
    table = loss.table(P.n)
    h, value = best_in_model(model, P.by_point, table)
    _check_same_domain(h, P.n)
    return value + Fraction(0), targets_in_model(model, P.by_point, table)


def bayes_risk(P: JointDistribution, loss: LossSpec = _SIMPLE):
    """Least true risk over every labeling of the domain."""
    table = loss.table(P.n)
    total = Fraction(0)
    for x, (w0, w1) in enumerate(P.by_point):
        total += min(w0 * table[x][0][label] + w1 * table[x][1][label] for label in LABELS)
    return total
