"""Python access to the mbmlab simulation and estimation core."""

import csv
import io
import json

from ._core import (
    ConfigError,
    Error,
    est_boxdim_local,
    est_exponents,
    est_frontier,
    fbf_eval,
    gen_brownian,
    gen_fbm,
    hurst_eval,
    mbm_path,
    predict_boxdim_graph,
    predict_hausdim_graph,
    predict_image_dim,
    predict_pointwise_mbm,
    project_frontier,
    suite_names,
)
from . import _core


def run_pipeline(config):
    """Run a pipeline from a config dict; returns (rows, report)."""
    text, report = _core.run_pipeline_json(json.dumps(config))
    rows = list(csv.DictReader(io.StringIO(text)))
    return rows, json.loads(report)


def verify_suite(name, seed=1, workers=1):
    return json.loads(_core.verify_suite_json(name, seed, workers))


__all__ = [
    "ConfigError",
    "Error",
    "est_boxdim_local",
    "est_exponents",
    "est_frontier",
    "fbf_eval",
    "gen_brownian",
    "gen_fbm",
    "hurst_eval",
    "mbm_path",
    "predict_boxdim_graph",
    "predict_hausdim_graph",
    "predict_image_dim",
    "predict_pointwise_mbm",
    "project_frontier",
    "run_pipeline",
    "suite_names",
    "verify_suite",
]
