"""Sliding-window assignment and per-(window, source) feature aggregation.

Windows are half-open intervals [origin + k*stride, origin + k*stride + width)
indexed by k >= 0. A flow belongs to every window containing its start time;
duration never extends membership. Flows sharing a (window, source) pair form
one group, aggregated into the 21 canonical features.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple

import numpy as np

from .errors import EmptyInput, EmptyValues, TimeBeforeOrigin
from .features import BASE_ATTRS, FEATURE_NAMES, FeatureMatrix
from .ingest import FlowRecord, LabelClass

DEFAULT_POSITIVE_CLASSES = frozenset({LabelClass.BOTNET, LabelClass.CNC})

_US_PER_S = 1_000_000


@dataclass(frozen=True)
class WindowConfig:
    """Window geometry in whole seconds.

    origin_us anchors window 0; None means "earliest flow start in the input",
    resolved when a matrix is built. stride > width is legal but leaves gaps
    between windows uncovered; see warnings().
    """

    width_s: int
    stride_s: int
    origin_us: int | None = None

    def __post_init__(self):
        if not (isinstance(self.width_s, int) and self.width_s >= 1):
            raise ValueError(f"width_s must be a positive integer, got {self.width_s!r}")
        if not (isinstance(self.stride_s, int) and self.stride_s >= 1):
            raise ValueError(f"stride_s must be a positive integer, got {self.stride_s!r}")

    @property
    def coverage_gap(self) -> bool:
        return self.stride_s > self.width_s

    def warnings(self) -> list[str]:
        if self.coverage_gap:
            return [f"stride_s={self.stride_s} > width_s={self.width_s}: "
                    "time gaps between windows are uncovered"]
        return []


def window_indices(t_us: int, cfg: WindowConfig) -> list[int]:
    """All window indices whose interval contains t_us, ascending.

    Uses cfg.origin_us (None is treated as 0, i.e. t_us is already an offset).
    Empty when the time falls in a stride>width gap.
    """
    origin = cfg.origin_us if cfg.origin_us is not None else 0
    d = t_us - origin
    if d < 0:
        raise TimeBeforeOrigin(f"t={t_us} precedes origin={origin}")
    w = cfg.width_s * _US_PER_S
    s = cfg.stride_s * _US_PER_S
    # containment: k*s <= d < k*s + w  <=>  (d - w)/s < k <= d/s
    k_max = d // s
    k_min = max(0, (d - w) // s + 1)
    return list(range(k_min, k_max + 1))


class AggregateStats(NamedTuple):
    sum: float
    mean: float
    std: float
    max: float
    median: float


def aggregate_stats(values: Iterable[float]) -> AggregateStats:
    """The five canonical statistics of a non-empty value list.

    std is the population standard deviation (divide by n); an even-length
    median is the mean of the two middle order statistics.
    """
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise EmptyValues("aggregate_stats needs at least one value")
    # Constant lists must report an exact zero spread; mean subtraction can
    # otherwise leave ~1e-16-scale residue.
    std = 0.0 if arr.min() == arr.max() else float(arr.std())
    return AggregateStats(
        sum=float(arr.sum()),
        mean=float(arr.mean()),
        std=std,
        max=float(arr.max()),
        median=float(np.median(arr)),
    )


def build_matrix(flows: Iterable[FlowRecord], cfg: WindowConfig,
                 positive_classes: frozenset[LabelClass] | set[LabelClass] = DEFAULT_POSITIVE_CLASSES,
                 group_by: str = "src") -> FeatureMatrix:
    """Aggregate flows into the labeled per-(window, source) feature matrix.

    group_by: "src" groups by source address (default), "src_dst" by the
    (source, destination) pair. The row target is 1 iff the group contains at
    least one flow of a positive class. Rows come out sorted by
    (window_index, group key); the result is bit-identical under any
    permutation of the input flows.
    """
    if not positive_classes:
        raise ValueError("positive_classes must be non-empty")
    if group_by not in ("src", "src_dst"):
        raise ValueError(f"group_by must be 'src' or 'src_dst', got {group_by!r}")

    ts, keys, cols, cls = [], [], [], []
    for rec in flows:
        ts.append(rec.start_time_us)
        keys.append(rec.src_addr if group_by == "src"
                    else f"{rec.src_addr}>{rec.dst_addr}")
        cols.append((rec.dur, rec.tot_pkts, rec.tot_bytes, rec.src_bytes))
        cls.append(int(rec.label_class))
    if not ts:
        raise EmptyInput("build_matrix needs at least one flow")

    t = np.asarray(ts, dtype=np.int64)
    vals = np.asarray(cols, dtype=np.float64)
    labels = np.asarray(cls, dtype=np.int8)
    key_arr = np.asarray(keys)

    origin = int(t.min()) if cfg.origin_us is None else cfg.origin_us
    if int(t.min()) < origin:
        raise TimeBeforeOrigin(
            f"flow at {int(t.min())} precedes origin {origin}")
    w = cfg.width_s * _US_PER_S
    s = cfg.stride_s * _US_PER_S

    d = t - origin
    k_max = d // s
    k_min = np.maximum(0, (d - w) // s + 1)
    counts = k_max - k_min + 1
    in_gap = counts <= 0
    if in_gap.any():
        keep = ~in_gap
        d, k_min, counts = d[keep], k_min[keep], counts[keep]
        vals, labels, key_arr = vals[keep], labels[keep], key_arr[keep]

    meta = {
        "width_s": cfg.width_s,
        "stride_s": cfg.stride_s,
        "origin_us": origin,
        "positive_classes": sorted(c.token for c in positive_classes),
        "group_by": group_by,
    }
    n_flows = len(counts)
    total = int(counts.sum()) if n_flows else 0
    if total == 0:
        empty = np.empty(0)
        return FeatureMatrix(
            feature_names=FEATURE_NAMES,
            X=np.empty((0, len(FEATURE_NAMES))),
            y=empty.astype(np.int8),
            window_index=empty.astype(np.int64),
            window_start_us=empty.astype(np.int64),
            src_addr=np.empty(0, dtype=key_arr.dtype),
            class_counts=np.empty((0, len(LabelClass)), dtype=np.int64),
            meta=meta,
        )

    # expand each flow to one entry per containing window
    flow_idx = np.repeat(np.arange(n_flows), counts)
    seg_starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    k_e = k_min[flow_idx] + (np.arange(total) - np.repeat(seg_starts, counts))

    uniq_keys, key_code = np.unique(key_arr, return_inverse=True)
    c_e = key_code[flow_idx]
    order = np.lexsort((c_e, k_e))
    k_s, c_s = k_e[order], c_e[order]
    boundary = np.empty(total, dtype=bool)
    boundary[0] = True
    boundary[1:] = (k_s[1:] != k_s[:-1]) | (c_s[1:] != c_s[:-1])
    g_start = np.flatnonzero(boundary)
    g_len = np.diff(np.append(g_start, total))
    g_end = np.append(g_start[1:], total) - 1
    n_groups = len(g_start)

    X = np.empty((n_groups, len(FEATURE_NAMES)))
    X[:, 0] = g_len
    col = 1
    for a in range(len(BASE_ATTRS)):
        v_e = vals[flow_idx, a]
        # sort values within each group so every reduction below is
        # independent of input flow order, bit for bit
        v_s = v_e[np.lexsort((v_e, c_e, k_e))]
        sums = np.add.reduceat(v_s, g_start)
        means = sums / g_len
        maxs = v_s[g_end]
        var = np.add.reduceat((v_s - np.repeat(means, g_len)) ** 2, g_start) / g_len
        mid = g_start + g_len // 2
        odd = (g_len % 2) == 1
        # mid-1 can point into the previous segment for odd groups; np.where
        # discards those lanes, and the index stays in bounds (wraps to -1 at
        # most)
        meds = np.where(odd, v_s[mid], 0.5 * (v_s[mid - 1] + v_s[mid]))
        X[:, col:col + 5] = np.column_stack(
            (sums, means, np.sqrt(var), maxs, meds))
        col += 5

    cls_s = labels[flow_idx][order]
    class_counts = np.column_stack(
        [np.add.reduceat((cls_s == int(c)).astype(np.int64), g_start)
         for c in LabelClass])
    pos_codes = np.asarray(sorted(int(c) for c in positive_classes), dtype=np.int8)
    pos_s = np.isin(cls_s, pos_codes)
    y = (np.add.reduceat(pos_s.astype(np.int64), g_start) > 0).astype(np.int8)

    return FeatureMatrix(
        feature_names=FEATURE_NAMES,
        X=X,
        y=y,
        window_index=k_s[g_start].astype(np.int64),
        window_start_us=origin + k_s[g_start] * s,
        src_addr=uniq_keys[c_s[g_start]],
        class_counts=class_counts,
        meta=meta,
    )


def resolve_config(cfg: WindowConfig, flows_min_t_us: int) -> WindowConfig:
    """Pin a config's origin to an explicit timestamp (earliest flow)."""
    if cfg.origin_us is not None:
        return cfg
    return replace(cfg, origin_us=flows_min_t_us)
