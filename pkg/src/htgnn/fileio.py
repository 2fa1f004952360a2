"""Readers/writers for the documented artifact formats.

All text artifacts are UTF-8 with LF line endings and are written
atomically (temp file + rename). Floats use ``repr`` so a write/read
cycle is lossless.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

import numpy as np


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


def atomic_write_json(path: str | Path, payload) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def write_edges_csv(
    path: str | Path, edges: np.ndarray, weights: np.ndarray, relation: str
) -> None:
    """Edge-set CSV: ``src,dst,relation,weight`` with relation 'q' or 'p'."""
    if relation not in ("q", "p"):
        raise ValueError("relation must be 'q' or 'p'")
    lines = ["src,dst,relation,weight"]
    for (i, j), w in zip(np.asarray(edges, np.int64), np.asarray(weights, float)):
        lines.append(f"{i},{j},{relation},{repr(float(w))}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_edges_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "src,dst,relation,weight":
        raise ValueError(f"{path}: expected header 'src,dst,relation,weight'")
    edges = []
    weights = []
    relations = set()
    for line in lines[1:]:
        src, dst, rel, w = line.split(",")
        edges.append((int(src), int(dst)))
        weights.append(float(w))
        relations.add(rel)
    if len(relations) > 1:
        raise ValueError(f"{path}: mixed relations {sorted(relations)}")
    relation = relations.pop() if relations else "q"
    e = np.array(edges, np.int64).reshape(-1, 2)
    return e, np.array(weights, float), relation


def write_diagram_csv(path: str | Path, pairs) -> None:
    """Persistence diagram CSV: ``dim,birth,death`` with ``inf`` deaths."""
    lines = ["dim,birth,death"]
    for p in pairs:
        death = "inf" if math.isinf(p.death) else repr(float(p.death))
        lines.append(f"{p.dim},{repr(float(p.birth))},{death}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_diagram_csv(path: str | Path) -> list[tuple[int, float, float]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "dim,birth,death":
        raise ValueError(f"{path}: expected header 'dim,birth,death'")
    out = []
    for line in lines[1:]:
        dim, birth, death = line.split(",")
        out.append((int(dim), float(birth), math.inf if death == "inf" else float(death)))
    return out


def write_dense_matrix_csv(path: str | Path, matrix: np.ndarray) -> None:
    """Dense float matrix, one CSV row per matrix row, no header."""
    m = np.asarray(matrix, float)
    lines = [",".join(repr(float(v)) for v in row) for row in m]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_dense_matrix_csv(path: str | Path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return np.array([[float(c) for c in line.split(",")] for line in lines], float)


def write_predictions_csv(
    path: str | Path, bank_ids: list[str], predictions: np.ndarray, probs: np.ndarray
) -> None:
    """Predictions CSV: ``bank_id,predicted_rating,prob_1..prob_4``."""
    lines = ["bank_id,predicted_rating,prob_1,prob_2,prob_3,prob_4"]
    for bank, pred, row in zip(bank_ids, predictions, probs):
        probs_txt = ",".join(repr(float(v)) for v in row)
        lines.append(f"{bank},{int(pred)},{probs_txt}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_predictions_csv(path: str | Path) -> tuple[list[str], np.ndarray, np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = "bank_id,predicted_rating,prob_1,prob_2,prob_3,prob_4"
    if not lines or lines[0] != header:
        raise ValueError(f"{path}: expected header {header!r}")
    banks: list[str] = []
    preds: list[int] = []
    probs: list[list[float]] = []
    for line in lines[1:]:
        cells = line.split(",")
        banks.append(cells[0])
        preds.append(int(cells[1]))
        probs.append([float(c) for c in cells[2:6]])
    return banks, np.array(preds, np.int64), np.array(probs, float)
