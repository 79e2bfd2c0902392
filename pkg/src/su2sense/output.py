"""Deterministic columnar output files and JSON run manifests.

Data files are whitespace-delimited columns with '#'-prefixed header lines;
floats are printed with a fixed 17-significant-digit format so identical
configurations produce bit-identical bytes.  Each data file is accompanied
by a sibling <stem>.manifest.json recording the resolved configuration, its
hash, the tool version and per-column method metadata.
"""

import json
from pathlib import Path

import numpy as np

from . import __version__

__all__ = ["format_float", "write_columns", "write_manifest"]


def format_float(x):
    return f"{float(x):.17e}"


def write_columns(path, columns, header_lines=()):
    """Write named columns as whitespace-delimited text.

    columns: list of (name, 1-D array) pairs, all the same length.
    """
    path = Path(path)
    names = [name for name, _ in columns]
    arrays = [np.asarray(arr) for _, arr in columns]
    length = len(arrays[0])
    if any(len(a) != length for a in arrays):
        raise ValueError("columns differ in length")
    lines = [f"# {line}" for line in header_lines]
    lines.append("# columns: " + " ".join(names))
    for i in range(length):
        lines.append(" ".join(format_float(a[i]) for a in arrays))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_manifest(path, config, columns_meta, checks=None, extra=None):
    """Write the JSON manifest next to a data file."""
    path = Path(path)
    doc = {
        "tool": "su2sense",
        "version": __version__,
        "scenario": config.scenario,
        "config": config.params,
        "config_sha256": config.hash(),
        "columns": columns_meta,
    }
    if checks is not None:
        doc["checks"] = checks
    if extra:
        doc.update(extra)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return path
