"""Cross-validation estimates of model risk: holdout and k-fold plans."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import LossSpec, Sample, best_in_model, exact_div, weighted_loss

PLAN_KINDS = ("holdout", "kfold", "custom")


def _ranges(indices: Sequence[int]) -> list[list[int]]:
    """Compress sorted indices into half-open ``[start, stop)`` runs."""
    runs: list[list[int]] = []
    for i in indices:
        if runs and runs[-1][1] == i:
            runs[-1][1] = i + 1
        else:
            runs.append([i, i + 1])
    return runs


def _expand(runs) -> tuple[int, ...]:
    return tuple(i for start, stop in runs for i in range(int(start), int(stop)))


@dataclass(frozen=True)
class RiskEstimatorPlan:
    """``m`` (train, validation) index pairs over records ``0..N-1``."""

    N: int
    pairs: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    kind: str = "custom"
    c: Fraction | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind not in PLAN_KINDS:
            raise ValueError(f"plan kind must be one of {PLAN_KINDS}")
        pairs = tuple((tuple(sorted(tr)), tuple(sorted(va))) for tr, va in self.pairs)
        if not pairs:
            raise ValueError("a plan needs at least one pair")
        for train, val in pairs:
            if not train or not val:
                raise ValueError("train and validation sets must be nonempty")
            if set(train) & set(val):
                raise ValueError("train and validation sets overlap")
            if min(train + val) < 0 or max(train + val) >= self.N:
                raise ValueError(f"indices outside 0..{self.N - 1}")
            if len(set(train)) != len(train) or len(set(val)) != len(val):
                raise ValueError("repeated indices in a pair")
        if self.kind == "kfold":
            seen = sorted(i for _, val in pairs for i in val)
            if seen != list(range(self.N)):
                raise ValueError("k-fold validation sets must partition the records")
            everything = set(range(self.N))
            if any(set(tr) != everything - set(va) for tr, va in pairs):
                raise ValueError("k-fold training sets must be the complements of the folds")
        object.__setattr__(self, "pairs", pairs)

    @property
    def m(self) -> int:
        return len(self.pairs)

    @property
    def train_sizes(self) -> tuple[int, ...]:
        return tuple(len(tr) for tr, _ in self.pairs)

    @property
    def validation_sizes(self) -> tuple[int, ...]:
        return tuple(len(va) for _, va in self.pairs)

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "N": self.N}
        if self.k is not None:
            out["k"] = self.k
        if self.c is not None:
            out["c"] = str(self.c)
        out["pairs"] = [{"train": _ranges(tr), "validation": _ranges(va)} for tr, va in self.pairs]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "RiskEstimatorPlan":
        pairs = tuple((_expand(p["train"]), _expand(p["validation"])) for p in data["pairs"])
        c = Fraction(data["c"]) if data.get("c") is not None else None
        k = int(data["k"]) if data.get("k") is not None else None
        return cls(int(data["N"]), pairs, data.get("kind", "custom"), c, k)

    @classmethod
    def from_json(cls, text: str) -> "RiskEstimatorPlan":
        return cls.from_dict(json.loads(text))


def _fraction(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(str(c))


def holdout_plan(N: int, c) -> RiskEstimatorPlan:
    """First ``N - floor(cN)`` records train, the last ``floor(cN)`` validate."""
    c = _fraction(c)
    if not 0 < c <= Fraction(1, 2):
        raise ValueError("c must lie in (0, 1/2]")
    if N < 2:
        raise ValueError("holdout needs N >= 2")
    V = (c * N).__floor__()
    if V < 1 or N - V < 1:
        raise ValueError(f"holdout split of N={N} with c={c} leaves an empty side")
    return RiskEstimatorPlan(N, ((tuple(range(N - V)), tuple(range(N - V, N))),), "holdout", c=c)


def kfold_plan(N: int, k: int) -> RiskEstimatorPlan:
    """Contiguous folds of size ``N/k``; fold j validates, the rest trains."""
    if k < 2:
        raise ValueError("k-fold needs k >= 2")
    if N % k:
        raise ValueError(f"N={N} is not a multiple of k={k}")
    size = N // k
    pairs = []
    for j in range(k):
        val = tuple(range(j * size, (j + 1) * size))
        train = tuple(range(0, j * size)) + tuple(range((j + 1) * size, N))
        pairs.append((train, val))
    return RiskEstimatorPlan(N, tuple(pairs), "kfold", k=k)


def pair_counts(plan: RiskEstimatorPlan, sample: Sample):
    """Per-pair ``(train_counts, validation_counts, validation_size)``."""
    if len(sample) != plan.N:
        raise ValueError(f"plan expects {plan.N} records, sample has {len(sample)}")
    return [(sample.counts(tr), sample.counts(va), len(va)) for tr, va in plan.pairs]


def estimate_from_counts(model, counts, table):
    """Average validation risk of the train-side minimizer, over all pairs."""
    total = Fraction(0)
    for train_counts, val_counts, val_size in counts:
        h, _ = best_in_model(model, train_counts, table)
        total += exact_div(weighted_loss(h, val_counts, table), val_size)
    return total / len(counts)


def estimate_model_risk(plan: RiskEstimatorPlan, model, sample: Sample, loss: LossSpec | None = None):
    loss = loss or LossSpec.simple()
    return estimate_from_counts(model, pair_counts(plan, sample), loss.table(sample.n))


def estimate_risks(plan: RiskEstimatorPlan, models, sample: Sample, loss: LossSpec | None = None) -> list:
    """Estimated risk of each model, sharing the per-pair counts."""
    loss = loss or LossSpec.simple()
    counts = pair_counts(plan, sample)
    table = loss.table(sample.n)
    return [estimate_from_counts(m, counts, table) for m in models]
