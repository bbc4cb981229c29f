"""Model classes, the target model, the discrimination margin, selection and errors."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    Hypothesis,
    JointDistribution,
    LossSpec,
    Sample,
    bayes_risk,
    best_in_model,
    erm,
    exact_div,
    model_true_risk,
    true_risk,
    weighted_loss,
)
from .estimators import RiskEstimatorPlan, estimate_risks


@dataclass(frozen=True)
class ModelClass:
    """Models sharing a VC dimension and an exact risk value."""

    members: tuple[str, ...]
    vc_dim: int
    risk: object
    tag: str = "true"

    @property
    def key(self) -> str:
        return self.members[0]

    def __contains__(self, key: str) -> bool:
        return key in self.members

    def to_dict(self) -> dict:
        return {"members": list(self.members), "vc_dim": self.vc_dim, "risk": _num(self.risk), "tag": self.tag}


def _num(v):
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator}
    return v


def equivalence_classes(keys: Sequence[str], risks: Sequence, vcs: Sequence[int], tag: str = "true") -> list[ModelClass]:
    """Group models by ``(vc_dim, risk)``, ordered by risk, VC dimension and first member."""
    if not (len(keys) == len(risks) == len(vcs)):
        raise ValueError("keys, risks and VC dimensions must align")
    groups: dict[tuple, list[str]] = {}
    for key, risk, vc in zip(keys, risks, vcs):
        groups.setdefault((vc, risk), []).append(key)
    classes = [ModelClass(tuple(sorted(members)), vc, risk, tag) for (vc, risk), members in groups.items()]
    classes.sort(key=lambda c: (c.risk, c.vc_dim, c.key))
    return classes


def _simplest_best(classes: list[ModelClass]) -> ModelClass:
    low = min(c.risk for c in classes)
    return min((c for c in classes if c.risk == low), key=lambda c: (c.vc_dim, c.key))


def family_true_risks(family, P: JointDistribution, loss: LossSpec | None = None) -> dict:
    loss = loss or LossSpec.simple()
    return {m.key: model_true_risk(m, P, loss)[0] for m in family.models}


def target_model(family, P: JointDistribution, loss: LossSpec | None = None) -> ModelClass:
    """Among the classes of least true risk, the one with the least VC dimension."""
    risks = family_true_risks(family, P, loss)
    classes = equivalence_classes(family.keys, [risks[k] for k in family.keys], [m.vc_dim for m in family.models])
    return _simplest_best(classes)


def mde_from_risks(risks: Mapping[str, object], target_risk) -> object:
    gaps = [r - target_risk for r in risks.values() if r > target_risk]
    return min(gaps) if gaps else None


def mde(family, P: JointDistribution, loss: LossSpec | None = None):
    """Least gap between a suboptimal model risk and the target risk; ``None`` if no gap exists."""
    risks = family_true_risks(family, P, loss)
    return mde_from_risks(risks, min(risks.values()))


@dataclass(frozen=True)
class SelectionResult:
    estimated_risks: tuple[tuple[str, object], ...]
    selected: ModelClass
    representative: str
    model: object = field(repr=False, compare=False)
    learned: Hypothesis | None = None
    learned_empirical_risk: object = None
    learned_true_risk: object = None
    independent_sample: Sample | None = field(default=None, repr=False, compare=False)
    errors: "ErrorReport | None" = None

    @property
    def risk_table(self) -> dict:
        return dict(self.estimated_risks)

    def to_dict(self) -> dict:
        return {
            "models": [k for k, _ in self.estimated_risks],
            "estimated_risks": {k: _num(v) for k, v in self.estimated_risks},
            "selected": self.selected.to_dict(),
            "representative": self.representative,
            "learned": str(self.learned) if self.learned is not None else None,
            "learned_empirical_risk": _num(self.learned_empirical_risk),
            "learned_true_risk": _num(self.learned_true_risk),
            "errors": self.errors.to_dict() if self.errors is not None else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def select_from_risks(family, risks: Mapping[str, object], tag: str = "estimated") -> SelectionResult:
    """Simplest class among those with least risk under the given risk table."""
    keys = family.keys
    classes = equivalence_classes(keys, [risks[k] for k in keys], [m.vc_dim for m in family.models], tag)
    chosen = _simplest_best(classes)
    return SelectionResult(
        estimated_risks=tuple((k, risks[k]) for k in sorted(keys)),
        selected=chosen,
        representative=chosen.key,
        model=family.model(chosen.key),
    )


def select_model(family, sample: Sample, plan: RiskEstimatorPlan, loss: LossSpec | None = None) -> SelectionResult:
    estimates = estimate_risks(plan, family.models, sample, loss)
    return select_from_risks(family, dict(zip(family.keys, estimates)))


def learn_on_selected(
    result: SelectionResult,
    independent_sample: Sample,
    loss: LossSpec | None = None,
    P: JointDistribution | None = None,
) -> SelectionResult:
    """Minimize empirical risk over the selected representative on a fresh sample."""
    loss = loss or LossSpec.simple()
    if independent_sample is None or len(independent_sample) == 0:
        raise ValueError("empty independent sample")
    h, risk = erm(result.model, independent_sample, loss)
    return replace(
        result,
        learned=h,
        learned_empirical_risk=risk,
        learned_true_risk=true_risk(h, P, loss) if P is not None else None,
        independent_sample=independent_sample,
    )


@dataclass(frozen=True)
class ErrorReport:
    type_i: object
    type_ii: object
    type_iii: object
    type_iv: object
    rel_i: float | None = None
    rel_ii: object = None
    rel_iii: object = None
    rel_iv: object = None

    @property
    def has_relative(self) -> bool:
        return self.rel_ii is not None

    def to_dict(self) -> dict:
        names = ("type_i", "type_ii", "type_iii", "type_iv", "rel_i", "rel_ii", "rel_iii", "rel_iv")
        return {n: _num(getattr(self, n)) for n in names}


def sup_deviation(model, P: JointDistribution, sample: Sample, loss: LossSpec):
    """Exact ``max_h |L_sample(h) - L(h)|`` over every member, with the matching ratio sup."""
    table = loss.table(P.n)
    counts = sample.counts()
    N = len(sample)
    worst, worst_rel = Fraction(0), 0.0
    for h in model:
        truth = weighted_loss(h, P.by_point, table)
        gap = abs(exact_div(weighted_loss(h, counts, table), N) - truth)
        worst = max(worst, gap)
        if truth > 0:
            worst_rel = max(worst_rel, float(gap / truth))
        elif gap > 0:
            worst_rel = float("inf")
    return worst, worst_rel


def estimation_errors(
    result: SelectionResult,
    P: JointDistribution,
    loss: LossSpec | None = None,
    h_star_risk=None,
    relative: bool | None = None,
) -> ErrorReport:
    """Errors I to IV of the learned hypothesis, exact for rational losses.

    ``relative=None`` adds the relative forms whenever their denominators are
    positive; ``True`` demands them and raises when they are undefined.
    """
    loss = loss or LossSpec.simple()
    if result.learned is None or result.independent_sample is None:
        raise ValueError("learn_on_selected must run before computing errors")
    best = bayes_risk(P, loss) if h_star_risk is None else h_star_risk
    learned = true_risk(result.learned, P, loss)
    within = model_true_risk(result.model, P, loss)[0]
    type_i, rel_i = sup_deviation(result.model, P, result.independent_sample, loss)
    report = ErrorReport(type_i, learned - within, within - best, learned - best)
    denominators_ok = loss.kind == "unbounded" or (learned > 0 and within > 0)
    if relative is True and not denominators_ok:
        raise ValueError("relative errors need positive risks in every denominator")
    if relative is False or not denominators_ok:
        return report
    return replace(
        report,
        rel_i=rel_i,
        rel_ii=report.type_ii / learned,
        rel_iii=report.type_iii / within,
        rel_iv=report.type_iv / learned,
    )


def result_with_errors(result: SelectionResult, P: JointDistribution, loss: LossSpec | None = None) -> SelectionResult:
    return replace(result, errors=estimation_errors(result, P, loss))
