"""Batch Bayesian optimization with acquisition Thompson sampling."""

import json

from ._core import (
    AskTell,
    AtsError,
    ConfigError,
    Dataset,
    DomainError,
    HyperParams,
    InvalidStateError,
    LookupError,
    NumericalError,
    ParseError,
    StateMismatchError,
    benchmark_domain,
    benchmark_names,
    evaluate,
    log_marginal_likelihood,
    min_value,
    predict,
    sample_hyperparams,
)
from . import _core


def _dump(config):
    return config if isinstance(config, str) else json.dumps(config)


def propose(data, config, iteration=1):
    """Next batch for a raw Dataset. config is a dict or a JSON string."""
    return _core.propose(data, _dump(config), iteration)


def run_experiment(config):
    """Runs the benchmark loop; returns (rows, failures)."""
    return _core.run_experiment(_dump(config))


def ask_tell(config, rep=0):
    return AskTell(_dump(config), rep)


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
