"""Set partitions, partition models and candidate families of models."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .core import LABELS, FiniteDomain, Hypothesis, LossSpec

MAX_PARTITION_N = 12
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True, order=True)
class Partition:
    """A set partition stored as a restricted-growth string (``rgs[i]`` = block of i)."""

    rgs: tuple[int, ...]

    def __post_init__(self):
        rgs = tuple(int(v) for v in self.rgs)
        if not rgs or rgs[0] != 0:
            raise ValueError("a restricted-growth string starts with 0")
        top = 0
        for v in rgs[1:]:
            if v < 0 or v > top + 1:
                raise ValueError(f"{rgs} is not a restricted-growth string")
            top = max(top, v)
        object.__setattr__(self, "rgs", rgs)

    @classmethod
    def from_string(cls, text: str) -> "Partition":
        return cls(tuple(_DIGITS.index(ch) for ch in text.strip().lower()))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> "Partition":
        blocks = [sorted(b) for b in blocks]
        size = n if n is not None else sum(len(b) for b in blocks)
        owner = [-1] * size
        for i, block in enumerate(blocks):
            for x in block:
                if owner[x] != -1:
                    raise ValueError("blocks overlap")
                owner[x] = i
        if -1 in owner:
            raise ValueError("blocks do not cover the domain")
        relabel: dict[int, int] = {}
        return cls(tuple(relabel.setdefault(b, len(relabel)) for b in owner))

    @classmethod
    def coarsest(cls, n: int) -> "Partition":
        return cls((0,) * n)

    @classmethod
    def finest(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    def __str__(self) -> str:
        return "".join(_DIGITS[v] for v in self.rgs)

    @property
    def n(self) -> int:
        return len(self.rgs)

    @property
    def n_blocks(self) -> int:
        return 1 + max(self.rgs)

    @cached_property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_blocks)]
        for x, b in enumerate(self.rgs):
            out[b].append(x)
        return tuple(tuple(b) for b in out)


def _check_n(n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= MAX_PARTITION_N:
        raise ValueError(f"n must be an integer in 1..{MAX_PARTITION_N}")


def enumerate_partitions(n: int, max_blocks: int | None = None) -> tuple[Partition, ...]:
    """All partitions of ``n`` points in lexicographic restricted-growth order."""
    _check_n(n)
    limit = n if max_blocks is None else max_blocks
    out: list[Partition] = []
    rgs = [0] * n

    def extend(i: int, top: int) -> None:
        if i == n:
            out.append(Partition(tuple(rgs)))
            return
        for v in range(min(top + 1, limit - 1) + 1):
            rgs[i] = v
            extend(i + 1, max(top, v))

    extend(1, 0)
    return tuple(out)


def refinement_leq(p1: Partition, p2: Partition) -> bool:
    """True when every block of ``p2`` sits inside a block of ``p1``."""
    if p1.n != p2.n:
        raise ValueError("partitions of different domains")
    return all(len({p1.rgs[x] for x in block}) == 1 for block in p2.blocks)


@dataclass(frozen=True)
class PartitionModel:
    """Labelings that are constant on every block of a partition."""

    partition: Partition

    @property
    def key(self) -> str:
        return str(self.partition)

    @property
    def n(self) -> int:
        return self.partition.n

    @property
    def vc_dim(self) -> int:
        return vc_dim_analytic(self)

    def __len__(self) -> int:
        return 2**self.partition.n_blocks

    def __iter__(self) -> Iterator[Hypothesis]:
        rgs = self.partition.rgs
        for labels in itertools.product(LABELS, repeat=self.partition.n_blocks):
            yield Hypothesis(tuple(labels[b] for b in rgs))

    def __contains__(self, h) -> bool:
        if not isinstance(h, Hypothesis) or len(h) != self.n:
            return False
        return all(len({h.table[x] for x in block}) == 1 for block in self.partition.blocks)

    def _block_scores(self, weights, table):
        scores = []
        for block in self.partition.blocks:
            s = [0, 0]
            for x in block:
                w0, w1 = weights[x]
                row = table[x]
                for label in LABELS:
                    if w0:
                        s[label] += w0 * row[0][label]
                    if w1:
                        s[label] += w1 * row[1][label]
            scores.append(s)
        return scores

    def best_from_weights(self, weights, table):
        """Blockwise minimizer; ties take label 0, giving the smallest table."""
        labels, total = [], 0
        for s0, s1 in self._block_scores(weights, table):
            if s1 < s0:
                labels.append(1)
                total += s1
            else:
                labels.append(0)
                total += s0
        return Hypothesis(tuple(labels[b] for b in self.partition.rgs)), total

    def minimizers_from_weights(self, weights, table) -> tuple[Hypothesis, ...]:
        choices = []
        for s0, s1 in self._block_scores(weights, table):
            choices.append((0, 1) if s0 == s1 else ((1,) if s1 < s0 else (0,)))
        rgs = self.partition.rgs
        return tuple(sorted(Hypothesis(tuple(lab[b] for b in rgs)) for lab in itertools.product(*choices)))


@dataclass(frozen=True)
class ExplicitModel:
    """A user-supplied finite set of hypotheses with a declared VC dimension."""

    key: str
    hypotheses: tuple[Hypothesis, ...]
    vc_dim: int

    def __post_init__(self):
        hyps = tuple(sorted(set(self.hypotheses)))
        if not hyps:
            raise ValueError("a model needs at least one hypothesis")
        if len({len(h) for h in hyps}) != 1:
            raise ValueError("hypotheses of different domain sizes")
        if self.vc_dim < 0:
            raise ValueError("VC dimension must be nonnegative")
        object.__setattr__(self, "hypotheses", hyps)

    @property
    def n(self) -> int:
        return len(self.hypotheses[0])

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __iter__(self) -> Iterator[Hypothesis]:
        return iter(self.hypotheses)

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.hypotheses)

    def __contains__(self, h) -> bool:
        return h in self._members


def vc_dim_analytic(model: PartitionModel) -> int:
    return model.partition.n_blocks


def _is_subset(a, b) -> bool:
    if isinstance(a, PartitionModel) and isinstance(b, PartitionModel):
        return refinement_leq(a.partition, b.partition)
    return all(h in b for h in a)


@dataclass(frozen=True)
class CandidateFamily:
    """A finite sequence of models addressed by their keys."""

    models: tuple
    kind: str = "explicit"
    covers: bool = False
    declared_vc: int | None = field(default=None, compare=False)

    def __post_init__(self):
        models = tuple(self.models)
        if not models:
            raise ValueError("a family needs at least one model")
        keys = [m.key for m in models]
        if len(set(keys)) != len(keys):
            raise ValueError("model keys must be unique")
        if len({m.n for m in models}) != 1:
            raise ValueError("models over different domains")
        object.__setattr__(self, "models", models)

    @property
    def n(self) -> int:
        return self.models[0].n

    @cached_property
    def by_key(self) -> dict:
        return {m.key: m for m in self.models}

    def model(self, key: str):
        return self.by_key[key]

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(m.key for m in self.models)

    @property
    def vc_dims(self) -> dict[str, int]:
        return {m.key: m.vc_dim for m in self.models}

    @property
    def d_vc(self) -> int:
        if self.declared_vc is not None:
            return self.declared_vc
        return max(m.vc_dim for m in self.models)

    @cached_property
    def maximal_keys(self) -> tuple[str, ...]:
        """Models contained in no other member except copies of themselves."""
        if self.kind == "all-partitions":
            return (str(Partition.finest(self.n)),)
        if self.kind == "two-block" and self.n > 1:
            return tuple(m.key for m in self.models if m.partition.n_blocks == 2)
        return maximal_by_scan(self)

    @property
    def maximal_count(self) -> int:
        return len(self.maximal_keys)

    def union(self) -> frozenset:
        return frozenset(h for m in self.models for h in m)

    def reordered(self, order: Sequence[int]) -> "CandidateFamily":
        return CandidateFamily(tuple(self.models[i] for i in order), self.kind, self.covers, self.declared_vc)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "model_count": len(self.models),
            "d_vc": self.d_vc,
            "maximal_count": self.maximal_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.describe())


def maximal_by_scan(family: CandidateFamily) -> tuple[str, ...]:
    """Maximal members found by pairwise containment checks."""
    out = []
    for a in family.models:
        dominated = any(b is not a and _is_subset(a, b) and not _is_subset(b, a) for b in family.models)
        if not dominated:
            out.append(a.key)
    return tuple(out)


FAMILY_KINDS = {"all-partitions": None, "all": None, "two-block": 2, "two": 2}


def build_family(domain: FiniteDomain | int, kind: str = "all-partitions") -> CandidateFamily:
    """All partition models, or those with at most two blocks."""
    n = domain.size if isinstance(domain, FiniteDomain) else int(domain)
    if kind not in FAMILY_KINDS:
        raise ValueError(f"unknown family kind {kind!r}; use 'all-partitions' or 'two-block'")
    max_blocks = FAMILY_KINDS[kind]
    canonical = "all-partitions" if max_blocks is None else "two-block"
    models = tuple(PartitionModel(p) for p in enumerate_partitions(n, max_blocks))
    return CandidateFamily(models, canonical, covers=True)


def explicit_family(models: Sequence[tuple[str, Sequence[Hypothesis], int]]) -> CandidateFamily:
    """Family from ``(key, hypotheses, vc_dim)`` triples."""
    return CandidateFamily(tuple(ExplicitModel(k, tuple(h), d) for k, h, d in models))


MAX_SHATTER_MODEL = 2**10
MAX_SHATTER_N = 8


def _patterns(model: Sequence[Hypothesis], loss: LossSpec, points: Sequence[tuple[int, int]]) -> int:
    table = loss.table(len(model[0]))
    return len({tuple(table[x][y][h.table[x]] for x, y in points) for h in model})


def shatter_bruteforce(model: Iterable[Hypothesis], loss: LossSpec, N: int) -> tuple[int, int]:
    """Exact ``(S(model, N), d_VC)`` by enumerating dichotomies over the atoms.

    Repeated atoms never add dichotomies, so only sets of distinct atoms of size
    ``min(N, |Z|)`` are scanned. A VC dimension of 0 means "below 1".
    """
    if loss.kind != "binary":
        raise ValueError("brute-force shattering needs a binary loss")
    hyps = tuple(model)
    if not hyps:
        raise ValueError("empty model")
    if len(hyps) > MAX_SHATTER_MODEL:
        raise ValueError(f"model has more than {MAX_SHATTER_MODEL} hypotheses")
    if not 1 <= N <= MAX_SHATTER_N:
        raise ValueError(f"N must lie in 1..{MAX_SHATTER_N}")
    atoms = FiniteDomain(len(hyps[0])).atoms

    def coefficient(k: int) -> int:
        k = min(k, len(atoms))
        return max(_patterns(hyps, loss, pts) for pts in itertools.combinations(atoms, k))

    d = 0
    k = 1
    while k <= len(atoms) and 2**k <= len(hyps) and coefficient(k) == 2**k:
        d = k
        k += 1
    return coefficient(N), d
