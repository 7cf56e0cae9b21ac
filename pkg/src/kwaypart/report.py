"""Run report serialization and the assignment TSV format."""

from __future__ import annotations

import json
from typing import TextIO

import numpy as np

from .cuts import ncut, psi_cut
from .eigen import compute_lk
from .errors import ReportSchemaError
from .graph import Partition, WeightedGraph

SCHEMA_VERSION = 1

SECTIONS = {
    "schema_version": None,
    "input": {"path", "format", "one_based", "n", "edges", "largest_component", "n_original"},
    "params": {"k", "method", "regularize", "seed", "tol_grad", "tol_eig", "max_iter", "restarts"},
    "spectrum": {"eigenvalues", "lambda_next", "L_k", "gap", "gap_warning", "max_eig_residual"},
    "metrics": {"residual", "grad_q_norm", "iterations", "converged", "ncut", "psi_cut", "phi_cut",
                "negatives_count", "s"},
    "partition": {"k", "sizes"},
    "timing": None,
}


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def validate_report(doc: dict) -> dict:
    if not isinstance(doc, dict):
        raise ReportSchemaError("report must be a JSON object")
    keys = set(doc)
    if keys != set(SECTIONS):
        extra, missing = sorted(keys - set(SECTIONS)), sorted(set(SECTIONS) - keys)
        raise ReportSchemaError(f"top-level keys mismatch: unknown {extra}, missing {missing}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ReportSchemaError(f"unsupported schema_version {doc['schema_version']!r}")
    for name, allowed in SECTIONS.items():
        if allowed is None:
            continue
        section = doc[name]
        if not isinstance(section, dict):
            raise ReportSchemaError(f"section {name!r} must be an object")
        unknown = set(section) - allowed
        if unknown:
            raise ReportSchemaError(f"unknown field(s) in {name!r}: {sorted(unknown)}")
    if doc["timing"] is not None and not isinstance(doc["timing"], dict):
        raise ReportSchemaError("timing must be null or an object")
    return doc


def dumps_report(doc: dict) -> str:
    return json.dumps(validate_report(_clean(doc)), sort_keys=True, indent=2) + "\n"


def load_report(stream: TextIO) -> dict:
    try:
        doc = json.load(stream)
    except json.JSONDecodeError as exc:
        raise ReportSchemaError(f"invalid JSON: {exc}") from None
    return validate_report(doc)


def write_assignment(stream: TextIO, partition: Partition, node_labels=None) -> None:
    stream.write("node\tpart\n")
    names = node_labels if node_labels is not None else range(partition.n)
    for name, part in zip(names, partition.labels.tolist()):
        stream.write(f"{name}\t{part}\n")


def read_assignment(stream: TextIO):
    """Return ``(node_names, labels)`` from an assignment TSV."""
    header = stream.readline().rstrip("\n")
    if header != "node\tpart":
        raise ReportSchemaError(f"bad assignment header {header!r}")
    names, labels = [], []
    for line in stream:
        if not line.strip():
            continue
        node, part = line.rstrip("\n").split("\t")
        names.append(node)
        labels.append(int(part))
    return names, np.asarray(labels, dtype=np.int64)


def verify_report(doc: dict, graph: WeightedGraph, partition: Partition, tol: float = 1e-9) -> list:
    """Recompute partition-determined metrics; return a list of mismatch descriptions."""
    problems = []
    m = doc["metrics"]
    for key, fn in (("ncut", ncut), ("psi_cut", psi_cut)):
        if m.get(key) is not None and abs(fn(graph, partition) - m[key]) > tol:
            problems.append(f"{key}: report {m[key]} vs recomputed {fn(graph, partition)}")
    if list(partition.sizes()) != doc["partition"]["sizes"]:
        problems.append("partition sizes differ")
    ev = doc["spectrum"]["eigenvalues"]
    k = doc["params"]["k"]
    if abs(compute_lk(ev[:k]) - doc["spectrum"]["L_k"]) > tol:
        problems.append("L_k inconsistent with eigenvalues")
    return problems
