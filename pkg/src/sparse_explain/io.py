"""Text formats.

Model
    TSV, one ``feature_id<TAB>weight`` per line; the reserved id
    ``__intercept__`` sets the intercept. The decision threshold is not stored.
Data
    SVMLight style, ``label idx:1 idx:1 ...`` with strictly increasing indices.
    Only the value 1 is accepted. Instance ids are 0-based data-line numbers.
Feature names
    TSV sidecar, ``feature_id<TAB>name``.

Blank lines and lines starting with ``#`` are skipped everywhere. Outputs
are CSV preceded by ``# key=value`` metadata lines.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, TextIO

from .errors import BinaryViolationError, FormatError
from .model import LinearModel, SparseDataset, SparseInstance
from .ranking import FeatureRanking, RankEntry

INTERCEPT_TOKEN = "__intercept__"


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def load_model(path, threshold: float = 0.0, num_features: int = 0) -> LinearModel:
    weights: dict[int, float] = {}
    intercept = None
    for lineno, line in _data_lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError("expected 'feature_id<TAB>weight'", path, lineno)
        key, value = parts[0].strip(), parts[1].strip()
        try:
            weight = float(value)
        except ValueError:
            raise FormatError(f"bad weight {value!r}", path, lineno) from None
        if not math.isfinite(weight):
            raise FormatError(f"non-finite weight {value!r}", path, lineno)
        if key == INTERCEPT_TOKEN:
            if intercept is not None:
                raise FormatError("duplicate intercept", path, lineno)
            intercept = weight
            continue
        try:
            fid = int(key)
        except ValueError:
            raise FormatError(f"bad feature id {key!r}", path, lineno) from None
        if fid < 0:
            raise FormatError(f"negative feature id {fid}", path, lineno)
        if fid in weights:
            raise FormatError(f"duplicate feature id {fid}", path, lineno)
        weights[fid] = weight
    return LinearModel(weights, 0.0 if intercept is None else intercept, threshold,
                       max(num_features, max(weights, default=-1) + 1))


def format_model(model: LinearModel) -> str:
    lines = [f"{f}\t{model.weights[f]!r}" for f in sorted(model.weights)]
    lines.append(f"{INTERCEPT_TOKEN}\t{model.intercept!r}")
    return "\n".join(lines) + "\n"


def _parse_label(token, path, lineno) -> int:
    try:
        value = float(token)
    except ValueError:
        raise FormatError(f"bad label {token!r}", path, lineno) from None
    return 1 if value > 0 else 0


def load_dataset(path, num_features: int = 0) -> SparseDataset:
    instances = []
    for lineno, line in _data_lines(path):
        line = line.split("#", 1)[0]
        tokens = line.split()
        label = _parse_label(tokens[0], path, lineno)
        active = []
        for tok in tokens[1:]:
            idx, sep, val = tok.partition(":")
            if not sep:
                raise FormatError(f"expected 'index:value', got {tok!r}", path, lineno)
            try:
                j = int(idx)
                v = float(val)
            except ValueError:
                raise FormatError(f"bad entry {tok!r}", path, lineno) from None
            if j < 0:
                raise FormatError(f"negative feature index {j}", path, lineno)
            if v != 1.0:
                raise BinaryViolationError(f"feature {j} has value {val}; only 1 allowed",
                                           path, lineno)
            if active and j <= active[-1]:
                raise FormatError(f"index {j} not above previous index {active[-1]}",
                                  path, lineno)
            active.append(j)
        instances.append(SparseInstance(len(instances), tuple(active), label))
    return SparseDataset(tuple(instances), num_features)


def format_dataset(dataset: SparseDataset) -> str:
    """SVMLight text; a missing label is written as 0."""
    out = []
    for inst in dataset:
        tokens = [str(inst.label or 0)] + [f"{j}:1" for j in inst.active]
        out.append(" ".join(tokens))
    return "".join(line + "\n" for line in out)


def load_feature_names(path) -> dict[int, str]:
    names = {}
    for lineno, line in _data_lines(path):
        key, sep, name = line.partition("\t")
        if not sep:
            raise FormatError("expected 'feature_id<TAB>name'", path, lineno)
        try:
            names[int(key)] = name
        except ValueError:
            raise FormatError(f"bad feature id {key!r}", path, lineno) from None
    return names


def fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def format_csv(meta: Mapping[str, object], header: Sequence[str],
               rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_text(path, text: str, stdout: Optional[TextIO] = None) -> None:
    if path in (None, "-"):
        (stdout or sys.stdout).write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_csv_rows(path) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Metadata lines and data rows of a CSV written by :func:`format_csv`."""
    meta, body = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            else:
                body.append(line)
    return meta, list(csv.DictReader(body))


def load_ranking(path, method: Optional[str] = None) -> FeatureRanking:
    """Read back the output of the ``rank`` command."""
    meta, rows = read_csv_rows(path)
    try:
        entries = tuple(RankEntry(int(r["feature_id"]), float(r["normalized_score"]),
                                  float(r["raw_score"])) for r in rows)
    except (KeyError, ValueError) as exc:
        raise FormatError(f"not a ranking file ({exc})", path) from None
    return FeatureRanking(method or meta.get("method", Path(path).stem), entries,
                          float(meta.get("raw_total", "nan")))
