"""Bounds addressable by name with keyword parameters."""

from __future__ import annotations

import inspect
from typing import Callable, Mapping

from . import bounds as b
from . import solver as s
from .core import TailParams


def _tail(p, tau_star, varsigma=None) -> TailParams:
    return TailParams(p, tau_star, varsigma)


def _params(N, eps_star, d, m=1, mm=1, eps=None, M=None, c=None, k=None, C=1.0, max_risk=None, target_risk=None, tail=None):
    return b.SelectionBoundParams(
        N=N,
        epsilon_star=eps_star,
        d_vc_family=int(d),
        m_pairs=int(m),
        m_maximal=int(mm),
        epsilon=eps,
        M=M,
        c=c,
        k=None if k is None else int(k),
        C=C,
        max_model_risk=max_risk,
        target_model_risk=target_risk,
        tail=tail,
    )


def _unbounded(fn):
    def run(N, eps_star, d, p, tau_star, varsigma=None, m=1, mm=1, eps=None, M=None, c=None, k=None, max_risk=None, target_risk=None):
        tail = _tail(p, tau_star, varsigma)
        return fn(_params(N, eps_star, d, m, mm, eps, M, c, k, 1.0, max_risk, target_risk, tail))

    return run


def _bounded(fn):
    def run(N, eps_star, d, m=1, mm=1, eps=None, M=None, c=None, k=None, C=1.0):
        return fn(_params(N, eps_star, d, m, mm, eps, M, c, k, C))

    return run


REGISTRY: dict[str, Callable] = {
    "shatter": lambda d, N: b.shatter_log_bound(int(d), N),
    "gc": lambda N, eps: b.gc_bound(N, eps),
    "typeI_binary": lambda N, eps, d: b.typeI_binary(N, eps, int(d)),
    "typeI_bounded": lambda N, eps, d, C=1.0: b.typeI_bounded(N, eps, int(d), C),
    "typeII_bounded": lambda N, eps, d, C=1.0: b.typeII_bounded(N, eps, int(d), C),
    "lambda": lambda p, varsigma: b.lambda_factor(p, varsigma),
    "gamma": lambda p, eps, varsigma: b.gamma_factor(p, eps, varsigma),
    "relI_unbounded": lambda N, eps, d, p, tau_star, varsigma=None: b.relI_unbounded(N, eps, int(d), _tail(p, tau_star, varsigma)),
    "relII_unbounded": lambda N, eps, d, p, tau_star, varsigma=None: b.relII_unbounded(N, eps, int(d), _tail(p, tau_star, varsigma)),
    "model_consistency_bounded": _bounded(b.model_consistency_bounded),
    "typeIII_bounded": _bounded(b.typeIII_bounded),
    "typeIV_bounded": _bounded(b.typeIV_bounded),
    "model_consistency_unbounded": _unbounded(b.model_consistency_unbounded),
    "typeIII_unbounded": _unbounded(b.typeIII_unbounded),
    "typeIV_unbounded": _unbounded(b.typeIV_unbounded),
    "bt2": lambda N, d, eps: s.bt2(N, int(d), eps),
    "bt4": lambda N, d, eps, eps_star, c: s.bt4(N, int(d), eps, eps_star, c),
    "bt4_2": lambda N, d, eps, eps_star, c: s.bt4_2(N, int(d), eps, eps_star, c),
}


def parameter_names(name: str) -> tuple[list[str], list[str]]:
    """Required and optional keyword names of a registered bound."""
    sig = inspect.signature(lookup(name))
    required = [p.name for p in sig.parameters.values() if p.default is inspect.Parameter.empty]
    optional = [p.name for p in sig.parameters.values() if p.default is not inspect.Parameter.empty]
    return required, optional


def lookup(name: str) -> Callable:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown bound {name!r}; known: {', '.join(sorted(REGISTRY))}") from None


def evaluate(name: str, params: Mapping[str, float]):
    """Evaluate a registered bound, checking parameter names first."""
    required, optional = parameter_names(name)
    missing = [k for k in required if k not in params]
    unknown = [k for k in params if k not in required + optional]
    if missing or unknown:
        raise ValueError(f"{name}: missing {missing or 'nothing'}, unknown {unknown or 'nothing'}; expects {required} and optional {optional}")
    return lookup(name)(**params)
