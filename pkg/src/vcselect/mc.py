"""Monte Carlo harness: simulate selection and learning, check exact inclusions."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .bounds import SelectionBoundParams, model_consistency_bounded, typeI_bounded
from .core import JointDistribution, LossSpec, Sample, bayes_risk
from .estimators import RiskEstimatorPlan, holdout_plan, kfold_plan
from .lattice import CandidateFamily, build_family
from .selection import (
    ErrorReport,
    ModelClass,
    estimation_errors,
    family_true_risks,
    learn_on_selected,
    mde_from_risks,
    select_from_risks,
    select_model,
)


def trial_rng(master: int, *path: int) -> np.random.Generator:
    """Independent stream for ``(master, *path)``; the same inputs give the same stream."""
    return np.random.default_rng(np.random.SeedSequence([int(master), *map(int, path)]))


def sample_from(P: JointDistribution, N: int, seed) -> Sample:
    """Draw N records by inverse-CDF lookup; ``seed`` is an int or a Generator."""
    if N < 1:
        raise ValueError("N must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cdf = np.cumsum([float(w) for w in P.weights])
    cdf[-1] = 1.0
    # atoms of zero mass are never hit with side="right"
    codes = np.searchsorted(cdf, rng.random(N), side="right")
    return Sample(P.n, tuple((int(c) // 2, int(c) % 2) for c in codes))


@dataclass(frozen=True)
class Scenario:
    distribution: JointDistribution
    family: str = "all-partitions"
    plan: str = "holdout"
    c: Fraction = Fraction(1, 5)
    k: int = 3
    n_grid: tuple[int, ...] = (40, 200, 1000)
    M: int = 100
    trials: int = 10_000
    seed: int = 0
    loss: LossSpec = field(default_factory=LossSpec.simple)
    epsilons: tuple[float, ...] = (0.05, 0.1, 0.2)

    def __post_init__(self):
        if self.plan not in ("holdout", "kfold"):
            raise ValueError("plan must be 'holdout' or 'kfold'")
        if self.trials < 1 or self.M < 1 or not self.n_grid:
            raise ValueError("need trials >= 1, M >= 1 and a nonempty N grid")
        if self.loss.kind == "unbounded":
            raise ValueError("simulation supports binary and bounded losses only")
        object.__setattr__(self, "c", Fraction(str(self.c)) if not isinstance(self.c, Fraction) else self.c)
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        build_family(self.distribution.n, self.family)
        for n in self.n_grid:
            self.make_plan(n)

    def make_plan(self, N: int) -> RiskEstimatorPlan:
        return holdout_plan(N, self.c) if self.plan == "holdout" else kfold_plan(N, self.k)

    def to_dict(self) -> dict:
        if self.loss != LossSpec.simple():
            raise ValueError("only the simple loss can be serialized")
        return {
            "distribution": self.distribution.to_dict(),
            "family": self.family,
            "plan": self.plan,
            "c": str(self.c),
            "k": self.k,
            "n_grid": list(self.n_grid),
            "M": self.M,
            "trials": self.trials,
            "seed": self.seed,
            "loss": "simple",
            "epsilons": list(self.epsilons),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Mapping) -> "Scenario":
        data = dict(data)
        if data.pop("loss", "simple") != "simple":
            raise ValueError("scenario files support the simple loss only")
        known = set(cls.__dataclass_fields__) - {"loss"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        if "distribution" not in data:
            raise ValueError("scenario needs a distribution")
        data["distribution"] = JointDistribution.from_dict(data["distribution"])
        for key in ("n_grid", "epsilons"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class _Context:
    family: CandidateFamily
    risks: dict
    target: ModelClass
    margin: object
    best: object
    max_model_risk: object


@lru_cache(maxsize=32)
def _context(P: JointDistribution, kind: str, loss: LossSpec) -> _Context:
    family = build_family(P.n, kind)
    risks = family_true_risks(family, P, loss)
    target = select_from_risks(family, risks, tag="true").selected
    return _Context(family, risks, target, mde_from_risks(risks, target.risk), bayes_risk(P, loss), max(risks.values()))


def scenario_context(scenario: Scenario) -> _Context:
    return _context(scenario.distribution, scenario.family, scenario.loss)


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    N: int
    index: int
    selected: tuple[str, ...]
    representative: str
    same_risk: bool
    hit_target: bool
    max_deviation: object
    errors: ErrorReport
    prop2_applicable: bool
    prop2_ok: bool
    thm4_ok: bool
    lemma_ok: bool
    identity_ok: bool


def _seed_of(scenario: Scenario, N: int, index: int) -> int:
    return int(np.random.SeedSequence([scenario.seed, N, index]).generate_state(1)[0])


def run_trial(scenario: Scenario, trial_index: int, N: int | None = None, estimator=None) -> TrialRecord:
    """One full pipeline run with exact checks of the deterministic inclusions.

    ``estimator`` optionally replaces cross-validation: it maps a model key and
    the selection sample to an estimated risk.
    """
    N = scenario.n_grid[0] if N is None else N
    ctx = scenario_context(scenario)
    P, loss = scenario.distribution, scenario.loss
    rng = trial_rng(scenario.seed, N, trial_index)
    selection_sample = sample_from(P, N, rng)
    independent = sample_from(P, scenario.M, rng)
    if estimator is None:
        result = select_model(ctx.family, selection_sample, scenario.make_plan(N), loss)
    else:
        result = select_from_risks(ctx.family, {k: estimator(k, selection_sample) for k in ctx.family.keys})
    result = learn_on_selected(result, independent, loss, P)
    errors = estimation_errors(result, P, loss, h_star_risk=ctx.best, relative=False)

    estimates = result.risk_table
    max_dev = max(abs(ctx.risks[k] - estimates[k]) for k in ctx.family.keys)
    chosen_risk = ctx.risks[result.representative]
    same_risk = chosen_risk == ctx.target.risk
    hit = same_risk and result.selected.vc_dim == ctx.target.vc_dim
    margin = ctx.margin
    if margin is None:
        prop2_applicable, prop2_ok, thm4_ok = False, True, True
    else:
        prop2_applicable = max_dev < margin / 2
        prop2_ok = same_risk or not prop2_applicable
        # max_dev < eps/2 must force a gap below eps, for every eps > margin
        thm4_ok = chosen_risk - ctx.target.risk <= max(margin, 2 * max_dev)
    return TrialRecord(
        seed=_seed_of(scenario, N, trial_index),
        N=N,
        index=trial_index,
        selected=result.selected.members,
        representative=result.representative,
        same_risk=same_risk,
        hit_target=hit,
        max_deviation=max_dev,
        errors=errors,
        prop2_applicable=prop2_applicable,
        prop2_ok=prop2_ok,
        thm4_ok=thm4_ok,
        lemma_ok=errors.type_ii <= 2 * errors.type_i,
        identity_ok=errors.type_iv == errors.type_ii + errors.type_iii,
    )


def binomial_allowance(p: float, trials: int, sigmas: float = 3.0) -> float:
    p = min(max(p, 0.0), 1.0)
    return sigmas * math.sqrt(p * (1 - p) / trials)


@dataclass(frozen=True)
class CellSummary:
    N: int
    trials: int
    freq_neq: float
    freq_target: float
    thm1_bound: float | None
    means: tuple[float, float, float, float]
    quantiles: dict
    prop2_violations: int
    thm4_violations: int
    lemma_violations: int
    identity_violations: int
    type_i_exceed: dict
    type_i_bounds: dict

    def thm1_respected(self) -> bool:
        if self.thm1_bound is None:
            return True
        return self.freq_neq <= self.thm1_bound + binomial_allowance(self.thm1_bound, self.trials)

    def thm3_respected(self) -> bool:
        return all(
            self.type_i_exceed[e] <= b + binomial_allowance(b, self.trials) for e, b in self.type_i_bounds.items()
        )


EXPERIMENT_COLUMNS = (
    "N",
    "trials",
    "freq_neq",
    "thm1_bound",
    "mean_I",
    "mean_II",
    "mean_III",
    "mean_IV",
    "prop2_violations",
    "lemma_violations",
    "freq_target",
    "thm4_violations",
    "identity_violations",
)


@dataclass(frozen=True)
class ExperimentSummary:
    scenario: Scenario
    cells: tuple[CellSummary, ...]

    def rows(self) -> list[dict]:
        out = []
        for c in self.cells:
            out.append(
                {
                    "N": c.N,
                    "trials": c.trials,
                    "freq_neq": repr(c.freq_neq),
                    "thm1_bound": "undefined" if c.thm1_bound is None else repr(c.thm1_bound),
                    "mean_I": repr(c.means[0]),
                    "mean_II": repr(c.means[1]),
                    "mean_III": repr(c.means[2]),
                    "mean_IV": repr(c.means[3]),
                    "prop2_violations": c.prop2_violations,
                    "lemma_violations": c.lemma_violations,
                    "freq_target": repr(c.freq_target),
                    "thm4_violations": c.thm4_violations,
                    "identity_violations": c.identity_violations,
                }
            )
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=EXPERIMENT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows())
        return buf.getvalue()


def consistency_bound(scenario: Scenario, N: int) -> float | None:
    """Probability bound on selecting a model of the wrong risk, at the plan's actual sizes."""
    ctx = scenario_context(scenario)
    if ctx.margin is None:
        return None
    plan = scenario.make_plan(N)
    params = SelectionBoundParams(
        N=N,
        epsilon_star=float(ctx.margin),
        d_vc_family=ctx.family.d_vc,
        m_pairs=plan.m,
        m_maximal=ctx.family.maximal_count,
        train_size=min(plan.train_sizes),
        val_size=min(plan.validation_sizes),
        C=1.0 if scenario.loss.C is None else float(scenario.loss.C),
    )
    return model_consistency_bounded(params).probability


def summarize(scenario: Scenario, N: int, records: Sequence[TrialRecord]) -> CellSummary:
    ctx = scenario_context(scenario)
    T = len(records)
    names = ("type_i", "type_ii", "type_iii", "type_iv")
    columns = [np.array([float(getattr(r.errors, n)) for r in records]) for n in names]
    C = 1.0 if scenario.loss.C is None else float(scenario.loss.C)
    exceed = {e: sum(float(r.errors.type_i) > e for r in records) / T for e in scenario.epsilons}
    bounds = {e: typeI_bounded(scenario.M, e, ctx.family.d_vc, C).probability for e in scenario.epsilons}
    return CellSummary(
        N=N,
        trials=T,
        freq_neq=sum(not r.same_risk for r in records) / T,
        freq_target=sum(r.hit_target for r in records) / T,
        thm1_bound=consistency_bound(scenario, N),
        means=tuple(float(col.mean()) for col in columns),
        quantiles={n: tuple(float(q) for q in np.quantile(col, (0.5, 0.9))) for n, col in zip(names, columns)},
        prop2_violations=sum(not r.prop2_ok for r in records),
        thm4_violations=sum(not r.thm4_ok for r in records),
        lemma_violations=sum(not r.lemma_ok for r in records),
        identity_violations=sum(not r.identity_ok for r in records),
        type_i_exceed=exceed,
        type_i_bounds=bounds,
    )


def run_cell(scenario: Scenario, N: int, trials: int | None = None) -> tuple[CellSummary, list[TrialRecord]]:
    records = [run_trial(scenario, i, N) for i in range(trials or scenario.trials)]
    return summarize(scenario, N, records), records


def run_experiment(scenario: Scenario) -> ExperimentSummary:
    return ExperimentSummary(scenario, tuple(run_cell(scenario, N)[0] for N in scenario.n_grid))


def reference_scenario(trials: int = 1000, seed: int = 2024) -> Scenario:
    """Four uniform points labeled by the block of {0,1} | {2,3}; margin 1/4 over all partitions."""
    P = JointDistribution.deterministic((0, 0, 1, 1))
    return Scenario(P, "all-partitions", "holdout", Fraction(1, 5), 3, (40, 200, 1000), 100, trials, seed)
