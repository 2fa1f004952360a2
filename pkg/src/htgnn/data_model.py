"""Quarter snapshots: CSV ingestion, rating buckets, and synthetic data.

The production data behind this pipeline (per-bank statement features,
aggregate interbank positions, agency ratings) is proprietary, so the
module offers two entry points with the same output type: a strict CSV
reader for externally supplied quarters and a seeded generator that
produces feature-clustered stand-in data. The generator ties ratings to
feature clusters on purpose: it is the knob that lets behavioural tests
control how label-aligned the persistence-derived graph can be, while
lending totals stay label-random.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

RATING_CLASSES = (1, 2, 3, 4)

_TRAILING_COLUMNS = ("interbank_assets", "interbank_liabilities", "rating")


class QuarterParseError(ValueError):
    """A quarter CSV violates the schema; message names row and column."""


@dataclass
class QuarterSnapshot:
    """One quarter of bank data, index-aligned across all fields.

    Node index order is fixed by construction (file row order for CSV
    input) and every downstream matrix uses it.
    """

    quarter_id: str
    bank_ids: list[str]
    features: np.ndarray               # (N, d) float64
    interbank_assets: np.ndarray       # (N,) float64, >= 0
    interbank_liabilities: np.ndarray  # (N,) float64, >= 0
    ratings: np.ndarray                # (N,) int64 in {1,2,3,4}

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.interbank_assets = np.asarray(self.interbank_assets, dtype=np.float64)
        self.interbank_liabilities = np.asarray(self.interbank_liabilities, dtype=np.float64)
        self.ratings = np.asarray(self.ratings, dtype=np.int64)
        n = len(self.bank_ids)
        if n == 0:
            raise ValueError("snapshot must contain at least one bank")
        if len(set(self.bank_ids)) != n:
            raise ValueError("bank_ids are not pairwise distinct")
        if self.features.ndim != 2 or self.features.shape[0] != n:
            raise ValueError(f"features must be ({n}, d), got {self.features.shape}")
        for name, vec in (
            ("interbank_assets", self.interbank_assets),
            ("interbank_liabilities", self.interbank_liabilities),
            ("ratings", self.ratings),
        ):
            if vec.shape != (n,):
                raise ValueError(f"{name} must have length {n}, got {vec.shape}")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features contain non-finite values")
        for name, vec in (
            ("interbank_assets", self.interbank_assets),
            ("interbank_liabilities", self.interbank_liabilities),
        ):
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"{name} contains non-finite values")
            if np.any(vec < 0):
                raise ValueError(f"{name} contains negative values")
        if not np.all(np.isin(self.ratings, RATING_CLASSES)):
            raise ValueError("ratings must all be in {1,2,3,4}")

    @property
    def n_banks(self) -> int:
        return len(self.bank_ids)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray, quarter_id: str | None = None) -> "QuarterSnapshot":
        """Snapshot restricted to the given node indices (order preserved)."""
        idx = np.asarray(indices, dtype=np.int64)
        return QuarterSnapshot(
            quarter_id=quarter_id if quarter_id is not None else self.quarter_id,
            bank_ids=[self.bank_ids[i] for i in idx],
            features=self.features[idx],
            interbank_assets=self.interbank_assets[idx],
            interbank_liabilities=self.interbank_liabilities[idx],
            ratings=self.ratings[idx],
        )


@dataclass
class SyntheticConfig:
    """Parameters for the seeded stand-in data generator."""

    n_banks: int
    n_features: int = 70
    n_clusters: int = 4
    cluster_spread: float = 0.2
    label_noise: float = 0.0
    lending_density: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_banks < 1 or self.n_features < 1 or self.n_clusters < 1:
            raise ValueError("n_banks, n_features and n_clusters must be positive")
        if self.n_clusters > self.n_banks:
            raise ValueError("n_clusters must not exceed n_banks")
        if not 0.0 <= self.label_noise <= 1.0:
            raise ValueError("label_noise must lie in [0, 1]")
        if not 0.0 < self.lending_density <= 1.0:
            raise ValueError("lending_density must lie in (0, 1]")
        if self.cluster_spread <= 0:
            raise ValueError("cluster_spread must be positive")


def _expected_header(n_features: int) -> list[str]:
    return ["bank_id"] + [f"f{k}" for k in range(1, n_features + 1)] + list(_TRAILING_COLUMNS)


def load_quarter_csv(path: str | Path) -> QuarterSnapshot:
    """Read one quarter from CSV; row order defines node index order.

    Schema: ``bank_id,f1,...,f{d},interbank_assets,interbank_liabilities,
    rating`` with a mandatory header. The quarter id is taken from the
    file name stem. Any malformed cell raises :class:`QuarterParseError`
    naming the offending data row (1-based) and column.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        import csv

        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise QuarterParseError(f"{path}: empty file, header required") from None
        n_cols = len(header)
        if n_cols < len(_TRAILING_COLUMNS) + 2:
            raise QuarterParseError(f"{path}: header has too few columns: {header}")
        d = n_cols - 1 - len(_TRAILING_COLUMNS)
        expected = _expected_header(d)
        if header != expected:
            raise QuarterParseError(
                f"{path}: header mismatch; expected {expected[:3]}...{expected[-3:]} "
                f"for d={d} feature columns, got {header[:3]}...{header[-3:]}"
            )

        bank_ids: list[str] = []
        seen: set[str] = set()
        feats: list[list[float]] = []
        assets: list[float] = []
        liabs: list[float] = []
        ratings: list[int] = []
        for row_no, row in enumerate(reader, start=1):
            if len(row) != n_cols:
                raise QuarterParseError(
                    f"{path}: row {row_no} has {len(row)} cells, expected {n_cols}"
                )
            bank_id = row[0]
            if bank_id in seen:
                raise QuarterParseError(
                    f"{path}: row {row_no}, column 'bank_id': duplicate id {bank_id!r}"
                )
            seen.add(bank_id)
            values = []
            for col_idx in range(1, 1 + d + 2):
                col_name = header[col_idx]
                try:
                    value = float(row[col_idx])
                except ValueError:
                    raise QuarterParseError(
                        f"{path}: row {row_no}, column {col_name!r}: "
                        f"non-numeric cell {row[col_idx]!r}"
                    ) from None
                if not math.isfinite(value):
                    raise QuarterParseError(
                        f"{path}: row {row_no}, column {col_name!r}: non-finite value"
                    )
                values.append(value)
            try:
                rating = int(row[-1])
            except ValueError:
                raise QuarterParseError(
                    f"{path}: row {row_no}, column 'rating': "
                    f"non-integer cell {row[-1]!r}"
                ) from None
            if rating not in RATING_CLASSES:
                raise QuarterParseError(
                    f"{path}: row {row_no}, column 'rating': value {rating} outside {{1,2,3,4}}"
                )
            bank_ids.append(bank_id)
            feats.append(values[:d])
            assets.append(values[d])
            liabs.append(values[d + 1])
            ratings.append(rating)

    if not bank_ids:
        raise QuarterParseError(f"{path}: no data rows")
    return QuarterSnapshot(
        quarter_id=path.stem,
        bank_ids=bank_ids,
        features=np.array(feats, dtype=np.float64),
        interbank_assets=np.array(assets, dtype=np.float64),
        interbank_liabilities=np.array(liabs, dtype=np.float64),
        ratings=np.array(ratings, dtype=np.int64),
    )


def write_quarter_csv(snapshot: QuarterSnapshot, path: str | Path) -> None:
    """Write a snapshot in the quarter CSV schema (UTF-8, LF endings).

    Floats are serialized with ``repr`` so a load/write cycle is
    byte-stable and numerically lossless.
    """
    path = Path(path)
    d = snapshot.n_features
    lines = [",".join(_expected_header(d))]
    for i in range(snapshot.n_banks):
        cells = [snapshot.bank_ids[i]]
        cells.extend(repr(float(v)) for v in snapshot.features[i])
        cells.append(repr(float(snapshot.interbank_assets[i])))
        cells.append(repr(float(snapshot.interbank_liabilities[i])))
        cells.append(str(int(snapshot.ratings[i])))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def bucket_ratings(raw: Sequence[str], mapping: Sequence[Sequence[str]]) -> np.ndarray:
    """Map agency rating strings onto the four ordinal classes.

    ``mapping`` lists exactly four groups ordered best to worst; each raw
    rating must appear in exactly one group. Ordinality is preserved by
    construction: earlier group, smaller class.
    """
    if len(mapping) != 4:
        raise ValueError(f"mapping must have exactly 4 groups, got {len(mapping)}")
    lookup: dict[str, int] = {}
    for bucket, group in enumerate(mapping, start=1):
        for name in group:
            if name in lookup:
                raise ValueError(f"rating {name!r} appears in more than one group")
            lookup[name] = bucket
    out = np.empty(len(raw), dtype=np.int64)
    for i, name in enumerate(raw):
        if name not in lookup:
            raise ValueError(f"unknown rating string {name!r}")
        out[i] = lookup[name]
    return out


def scale_features(features: np.ndarray, mode: str = "min_max") -> np.ndarray:
    """Column-wise feature scaling.

    ``min_max`` maps each column affinely onto [0, 1] (constant columns
    map to 0), which keeps all vectors nonnegative and hence cosine
    distances inside [0, 1]. ``none`` returns the input unchanged.
    """
    X = np.asarray(features, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise ValueError("features contain non-finite values")
    if mode == "none":
        return X
    if mode != "min_max":
        raise ValueError(f"unknown scaling mode {mode!r}")
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    span = hi - lo
    out = np.zeros_like(X)
    nonconst = span > 0
    out[:, nonconst] = (X[:, nonconst] - lo[nonconst]) / span[nonconst]
    return out


# Cluster centres: a per-cluster block of strong features over a weak
# positive base, so same-cluster cosine distances are small and
# cross-cluster ones approach 1.
_CENTER_BASE = 0.05
_CENTER_BLOCK = 1.0
_LENDING_SCALE = 100.0


def _cluster_centers(n_clusters: int, n_features: int) -> np.ndarray:
    centers = np.full((n_clusters, n_features), _CENTER_BASE)
    blocks = np.arange(n_features) % n_clusters
    for c in range(n_clusters):
        centers[c, blocks == c] += _CENTER_BLOCK
    return centers


def _noisy_ratings(clusters: np.ndarray, noise: float, rng: np.random.Generator) -> np.ndarray:
    base = (clusters % 4) + 1
    offsets = rng.integers(1, 4, size=base.shape[0])  # uniform over the other 3 classes
    flips = rng.random(base.shape[0]) < noise
    out = base.copy()
    out[flips] = ((base[flips] - 1 + offsets[flips]) % 4) + 1
    return out


def _lending_totals(n: int, density: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    # Lognormal totals give the market a realistic core-periphery shape:
    # a few hub banks carry most of the volume.
    part_a = rng.random(n) < density
    assets = rng.lognormal(np.log(_LENDING_SCALE), 1.5, n) * part_a
    part_l = rng.random(n) < density
    liabs = rng.lognormal(np.log(_LENDING_SCALE), 1.5, n) * part_l
    total_a = assets.sum()
    total_l = liabs.sum()
    if total_a <= 0.0 or total_l <= 0.0:
        return np.zeros(n), np.zeros(n)
    liabs *= total_a / total_l
    return assets, liabs


def gen_synthetic(config: SyntheticConfig) -> tuple[QuarterSnapshot, QuarterSnapshot]:
    """Generate a (quarter t, quarter t+1) snapshot pair, seeded.

    Banks sit in ``n_clusters`` Gaussian-like feature bumps; the rating
    equals the cluster index (cyclic over the four classes) flipped to a
    uniformly random other class with probability ``label_noise``.
    Lending totals are drawn independently of the clusters and
    liabilities are rescaled so assets and liabilities balance. The t+1
    snapshot perturbs features by ``cluster_spread / 10`` and resamples
    label noise with cluster assignments fixed; lending totals are drawn
    fresh, so each quarter's lending network is independently random.
    """
    rng = np.random.default_rng(config.seed)
    n, d = config.n_banks, config.n_features
    clusters = np.arange(n) % config.n_clusters
    centers = _cluster_centers(config.n_clusters, d)

    x_t = np.abs(centers[clusters] + rng.normal(0.0, config.cluster_spread, (n, d)))
    ratings_t = _noisy_ratings(clusters, config.label_noise, rng)
    assets_t, liabs_t = _lending_totals(n, config.lending_density, rng)

    x_t1 = np.abs(x_t + rng.normal(0.0, config.cluster_spread / 10.0, (n, d)))
    ratings_t1 = _noisy_ratings(clusters, config.label_noise, rng)
    assets_t1, liabs_t1 = _lending_totals(n, config.lending_density, rng)

    bank_ids = [f"B{i:05d}" for i in range(n)]
    snap_t = QuarterSnapshot("Q1", bank_ids, x_t, assets_t, liabs_t, ratings_t)
    snap_t1 = QuarterSnapshot("Q2", list(bank_ids), x_t1, assets_t1, liabs_t1, ratings_t1)
    return snap_t, snap_t1
