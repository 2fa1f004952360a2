"""Homophily, multi-class classification metrics, and paired t-tests.

The t-distribution tail is evaluated directly through the regularized
incomplete beta function (continued fraction), so p-values do not depend
on an external statistics library; library routines are reserved for the
test suite as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

N_CLASSES = 4


class ZeroVarianceError(ValueError):
    """Paired differences have zero sample variance; t is undefined."""


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    p_value: float
    dof: int


def homophily_ratio(edges: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of undirected edges whose endpoints share a label."""
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.shape[0] == 0:
        raise ValueError("homophily ratio is undefined for an empty edge set")
    y = np.asarray(labels)
    same = y[e[:, 0]] == y[e[:, 1]]
    return float(np.count_nonzero(same)) / e.shape[0]


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray) -> np.ndarray:
    """4x4 count matrix C[a][b] = #nodes with true class a+1 predicted b+1."""
    t = np.asarray(y_true, dtype=np.int64)
    p = np.asarray(y_pred, dtype=np.int64)
    if t.shape != p.shape:
        raise ValueError(f"length mismatch: {t.shape} vs {p.shape}")
    if t.size == 0:
        raise ValueError("at least one label pair required")
    for name, v in (("true", t), ("predicted", p)):
        if np.any((v < 1) | (v > N_CLASSES)):
            raise ValueError(f"{name} labels must lie in {{1,..,{N_CLASSES}}}")
    cm = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(cm, (t - 1, p - 1), 1)
    return cm


def classification_metrics(y_true: np.ndarray, y_pred: np.ndarray) -> dict[str, float]:
    """Accuracy plus macro precision/recall/F1 as fractions.

    A class with a zero denominator contributes 0 to the corresponding
    metric, except classes absent from both vectors, which are excluded
    from the macro average entirely.
    """
    cm = confusion_matrix(y_true, y_pred)
    total = cm.sum()
    accuracy = float(np.trace(cm)) / total
    precisions, recalls, f1s = [], [], []
    for a in range(N_CLASSES):
        row = cm[a].sum()
        col = cm[:, a].sum()
        if row == 0 and col == 0:
            continue
        prec = cm[a, a] / col if col > 0 else 0.0
        rec = cm[a, a] / row if row > 0 else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec > 0 else 0.0
        precisions.append(prec)
        recalls.append(rec)
        f1s.append(f1)
    return {
        "accuracy": accuracy,
        "macro_precision": float(np.mean(precisions)),
        "macro_recall": float(np.mean(recalls)),
        "macro_f1": float(np.mean(f1s)),
    }


_BETA_MAX_ITER = 400
_BETA_EPS = 1e-15
_BETA_FPMIN = 1e-300


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    # Lentz's algorithm for the incomplete-beta continued fraction.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_FPMIN:
        d = _BETA_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise RuntimeError("incomplete beta continued fraction failed to converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) to absolute accuracy well below 1e-10."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def student_t_sf(t: float, dof: int) -> float:
    """One-sided upper tail P(T > t) for Student's t with ``dof`` degrees."""
    if dof < 1:
        raise ValueError("dof must be >= 1")
    x = dof / (dof + t * t)
    half_tail = 0.5 * regularized_incomplete_beta(dof / 2.0, 0.5, x)
    return half_tail if t >= 0 else 1.0 - half_tail


def paired_t_test(a: np.ndarray, b: np.ndarray) -> TTestResult:
    """Two-sided paired t-test with exact Student-t p-value."""
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape or av.ndim != 1:
        raise ValueError("samples must be 1-d vectors of equal length")
    n = av.shape[0]
    if n < 2:
        raise ValueError("paired t-test needs at least 2 pairs")
    d = av - bv
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        raise ZeroVarianceError("paired differences have zero variance")
    t = float(d.mean()) / (sd / math.sqrt(n))
    p = 2.0 * student_t_sf(abs(t), n - 1)
    return TTestResult(t_statistic=t, p_value=p, dof=n - 1)
