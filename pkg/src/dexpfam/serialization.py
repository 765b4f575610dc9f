"""JSON/CSV I/O with stable, round-trippable number formatting.

Numbers are emitted at 12 significant digits: coarse enough to survive a
text round trip bit-for-bit, fine enough not to disturb the 1e-8 tolerances
used elsewhere.  All dumps sort keys so identical inputs yield identical
bytes.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import ValidationError
from .linspan import LinearSpan, build_span, evaluate
from .mle import MleKind, MleResult
from .statespace import Sample, StateSpace, build_space, make_sample
from .uniqueness import UniquenessReport

__all__ = [
    "round_floats",
    "dumps_stable",
    "space_to_dict",
    "space_from_dict",
    "span_to_dict",
    "span_from_dict",
    "load_json",
    "load_sample",
    "report_to_dict",
    "mle_to_dict",
]


def _tidy(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(format(float(value), ".12g"))
    return value


def round_floats(obj: Any) -> Any:
    """Recursively coerce numpy scalars/arrays and trim floats to 12 digits."""
    if isinstance(obj, dict):
        return {str(k): round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [round_floats(v) for v in list(obj)]
    return _tidy(obj)


def dumps_stable(obj: Any) -> str:
    return json.dumps(round_floats(obj), indent=2, sort_keys=True) + "\n"


def _label_to_json(label: Any) -> Any:
    if isinstance(label, tuple):
        return [_label_to_json(v) for v in label]
    return _tidy(label)


def _label_from_json(label: Any) -> Any:
    if isinstance(label, list):
        return tuple(_label_from_json(v) for v in label)
    return label


def space_to_dict(space: StateSpace) -> dict:
    return {
        "labels": [_label_to_json(lab) for lab in space.labels],
        "weights": list(space.weights),
    }


def space_from_dict(data: dict) -> StateSpace:
    if not isinstance(data, dict) or "labels" not in data or "weights" not in data:
        raise ValidationError('state space JSON needs "labels" and "weights"')
    labels = [_label_from_json(lab) for lab in data["labels"]]
    return build_space(labels, data["weights"])


def span_to_dict(span: LinearSpan) -> dict:
    return {"rows": [list(row) for row in span.basis]}


def span_from_dict(data: dict) -> LinearSpan:
    if not isinstance(data, dict) or "rows" not in data:
        raise ValidationError('basis JSON needs "rows"')
    return build_span(data["rows"])


def load_json(path: str) -> Any:
    try:
        with open(path) as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc


def load_sample(path: str, space: StateSpace) -> Sample:
    """Read a sample: a JSON array of state indices, or one label per line."""
    with open(path) as handle:
        text = handle.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        indices = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                label = _label_from_json(json.loads(line))
            except json.JSONDecodeError:
                label = line
            indices.append(space.index_of(label))
        return make_sample(space, indices)
    if not isinstance(data, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in data
    ):
        raise ValidationError(f"{path}: sample JSON must be an array of integers")
    return make_sample(space, data)


def report_to_dict(report: UniquenessReport, space: StateSpace, span: LinearSpan) -> dict:
    closure_sorted = sorted(report.closure)
    out = {
        "subset": list(report.subset),
        "is_uniqueness": report.is_uniqueness,
        "closure": closure_sorted,
        "closure_labels": [_label_to_json(space.labels[i]) for i in closure_sorted],
        "witness_delta": None,
        "escape_witnesses": {
            str(x): list(w) for x, w in sorted(report.escape_witnesses.items())
        },
    }
    if report.witness_delta is not None:
        out["witness_delta"] = {
            "coefficients": list(report.witness_delta),
            "values": list(evaluate(span, report.witness_delta)),
        }
    return out


def mle_to_dict(result: MleResult, space: StateSpace) -> dict:
    return {
        "kind": result.kind.value,
        "support": list(result.support),
        "support_labels": [_label_to_json(space.labels[i]) for i in result.support],
        "coefficients": list(result.coefficients),
        "density": list(result.density.values),
        "log_density": list(result.density.log_values),
        "log_likelihood_sup": result.log_likelihood_sup,
        "iterations": result.iterations,
        "moment_residual": result.moment_residual,
    }
