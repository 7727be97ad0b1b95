# Copyright (C) 2026 The tailscore Authors
# SPDX-License-Identifier: Apache-2.0

"""Python bindings for the tailscore library."""

import json as _json

from ._core import (
    ConfigError,
    DomainError,
    DriftSpec,
    InsufficientData,
    InvalidInput,
    IoError,
    Pipeline,
    SchemaError,
    TailscoreError,
    TrainingError,
    __version__,
    laplace_cdf,
    laplace_quantile,
)
from . import _core


def _dump(config):
    if config is None:
        return "{}"
    return config if isinstance(config, str) else _json.dumps(config)


def fit(x, y, config=None, seed=0):
    """Fit a pipeline; config uses the CLI config schema (mode, drift, schedule, train, cevt)."""
    return Pipeline.fit(list(x), list(y), _dump(config), seed)


def repro(experiment, out_dir, config=None):
    """Run a synthetic experiment end to end and return the comparison summary."""
    return _json.loads(_core.repro(experiment, _dump(config), str(out_dir)))


def experiment_defaults(experiment):
    return _json.loads(_core.experiment_defaults(experiment))


__all__ = [
    "ConfigError",
    "DomainError",
    "DriftSpec",
    "InsufficientData",
    "InvalidInput",
    "IoError",
    "Pipeline",
    "SchemaError",
    "TailscoreError",
    "TrainingError",
    "experiment_defaults",
    "fit",
    "laplace_cdf",
    "laplace_quantile",
    "repro",
]
