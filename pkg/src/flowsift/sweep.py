"""Grid experiments over window geometry.

A sweep fixes the flow data and varies (width, stride); each cell runs the
full pipeline — windowing, split, training, evaluation — and lands in one CSV
row. Cells are independent, so failures are recorded in-place and the rest of
the grid still runs. Repeat runs re-execute a single cell under consecutive
seeds to expose sampling variance; scenario comparison runs one fixed cell
across several capture files.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ._util import atomic_write_text, fmt_g9
from .errors import FlowsiftError
from .ingest import FlowRecord
from .logreg import HyperParams, fit
from .metrics import MetricsReport, evaluate
from .split import SplitSpec, split, with_seed
from .windows import DEFAULT_POSITIVE_CLASSES, WindowConfig, build_matrix

SWEEP_CSV_HEADER = ("width_s,stride_s,seed,"
                    "train_precision,train_recall,train_f1,"
                    "test_precision,test_recall,test_f1,"
                    "rows_train,rows_test,wall_time_s,status")

REPEAT_CSV_HEADER = ("run,seed,"
                     "train_precision,train_recall,train_f1,"
                     "test_precision,test_recall,test_f1,wall_time_s")

SCENARIO_CSV_HEADER = "scenario," + SWEEP_CSV_HEADER

_METRIC_KEYS = ("train_precision", "train_recall", "train_f1",
                "test_precision", "test_recall", "test_f1")


@dataclass
class SweepCell:
    """Outcome of one (width, stride) grid point.

    status is "ok", "ok:stride_gap" when stride > width left coverage holes,
    or "error:<ExceptionName>" when the cell failed; metric fields are None
    in the error case.
    """

    width_s: int
    stride_s: int
    seed: int
    train: MetricsReport | None = None
    test: MetricsReport | None = None
    rows_train: int | None = None
    rows_test: int | None = None
    wall_time_s: float | None = None
    status: str = "ok"

    def metric(self, key: str) -> float | None:
        report = self.train if key.startswith("train_") else self.test
        if report is None:
            return None
        return getattr(report, key.split("_", 1)[1])


@dataclass
class SweepResult:
    cells: list[SweepCell] = field(default_factory=list)

    @property
    def ok_cells(self) -> list[SweepCell]:
        return [c for c in self.cells if c.status.startswith("ok")]


def run_single(flows: list[FlowRecord],
               width_s: int,
               stride_s: int,
               spec: SplitSpec | None = None,
               hyperparams: HyperParams | None = None,
               seed: int = 0,
               positive_classes: frozenset = DEFAULT_POSITIVE_CLASSES,
               ) -> tuple[MetricsReport, MetricsReport]:
    """One full pipeline pass; returns (train report, test report)."""
    spec = with_seed(spec or SplitSpec(), seed)
    cfg = WindowConfig(width_s=width_s, stride_s=stride_s)
    matrix = build_matrix(flows, cfg, positive_classes=positive_classes)
    train_m, test_m = split(matrix, spec)
    model, _ = fit(train_m, hyperparams, seed=seed)
    extra = {"split": spec.describe(), "seed": seed,
             "rows_train": train_m.n_rows, "rows_test": test_m.n_rows}
    ev_train = evaluate(model, train_m, extra | {"partition": "train"})
    ev_test = evaluate(model, test_m, extra | {"partition": "test"})
    return ev_train, ev_test


def _run_cell(flows: list[FlowRecord], width_s: int, stride_s: int,
              spec: SplitSpec | None, hyperparams: HyperParams | None,
              seed: int, positive_classes: frozenset) -> SweepCell:
    cell = SweepCell(width_s=width_s, stride_s=stride_s, seed=seed)
    t0 = time.perf_counter()
    try:
        ev_train, ev_test = run_single(
            flows, width_s, stride_s, spec, hyperparams, seed,
            positive_classes)
    except FlowsiftError as exc:
        cell.status = f"error:{type(exc).__name__}"
    else:
        cell.train, cell.test = ev_train, ev_test
        cell.rows_train = ev_train.config.get("rows_train")
        cell.rows_test = ev_test.config.get("rows_test")
        cell.status = "ok:stride_gap" if stride_s > width_s else "ok"
    cell.wall_time_s = time.perf_counter() - t0
    return cell


def run_grid(flows: list[FlowRecord],
             widths: list[int],
             strides: list[int],
             spec: SplitSpec | None = None,
             hyperparams: HyperParams | None = None,
             base_seed: int = 0,
             jobs: int = 1,
             positive_classes: frozenset = DEFAULT_POSITIVE_CLASSES,
             ) -> SweepResult:
    """Cartesian sweep in request order: widths outer, strides inner.

    Every cell uses the same base seed so cells differ only in geometry.
    """
    combos = [(w, s) for w in widths for s in strides]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(
                lambda ws: _run_cell(flows, ws[0], ws[1], spec, hyperparams,
                                     base_seed, positive_classes),
                combos))
    else:
        cells = [_run_cell(flows, w, s, spec, hyperparams, base_seed,
                           positive_classes)
                 for w, s in combos]
    return SweepResult(cells=cells)


@dataclass
class RepeatRun:
    run_index: int
    seed: int
    train: MetricsReport
    test: MetricsReport
    wall_time_s: float


def repeat_runs(flows: list[FlowRecord],
                width_s: int,
                stride_s: int,
                runs: int,
                spec: SplitSpec | None = None,
                hyperparams: HyperParams | None = None,
                base_seed: int = 0,
                positive_classes: frozenset = DEFAULT_POSITIVE_CLASSES,
                ) -> tuple[list[RepeatRun], dict]:
    """Re-run one cell under seeds base_seed..base_seed+runs-1.

    Returns the runs plus a dispersion table {metric: {min,max,range}}.
    Dispersion needs at least two runs to mean anything.
    """
    if runs < 2:
        raise ValueError(f"runs must be >= 2, got {runs}")
    if spec is None:
        spec = SplitSpec(mode="stratified_random")
    out: list[RepeatRun] = []
    for i in range(runs):
        seed = base_seed + i
        t0 = time.perf_counter()
        ev_train, ev_test = run_single(
            flows, width_s, stride_s, spec, hyperparams, seed,
            positive_classes)
        out.append(RepeatRun(run_index=i, seed=seed, train=ev_train,
                             test=ev_test,
                             wall_time_s=time.perf_counter() - t0))
    dispersion = {}
    for key in _METRIC_KEYS:
        part, name = key.split("_", 1)
        vals = [getattr(getattr(r, part), name) for r in out]
        lo, hi = min(vals), max(vals)
        dispersion[key] = {"min": lo, "max": hi, "range": hi - lo}
    return out, dispersion


@dataclass
class ScenarioCell:
    scenario: int
    cell: SweepCell


def scenario_compare(scenario_files: dict[int, str],
                     reader,
                     width_s: int = 189,
                     stride_s: int = 129,
                     spec: SplitSpec | None = None,
                     hyperparams: HyperParams | None = None,
                     seed: int = 0,
                     positive_classes: frozenset = DEFAULT_POSITIVE_CLASSES,
                     ) -> list[ScenarioCell]:
    """Run one fixed (width, stride) cell per capture file.

    reader(path) -> list[FlowRecord]. A failure in one capture (missing
    file, bad rows, degenerate split) is recorded in that row and the
    remaining captures still run.
    """
    out: list[ScenarioCell] = []
    for scenario_id in sorted(scenario_files):
        path = scenario_files[scenario_id]
        t0 = time.perf_counter()
        try:
            flows = reader(path)
        except (OSError, FlowsiftError) as exc:
            cell = SweepCell(width_s=width_s, stride_s=stride_s, seed=seed,
                             status=f"error:{type(exc).__name__}",
                             wall_time_s=time.perf_counter() - t0)
            out.append(ScenarioCell(scenario=scenario_id, cell=cell))
            continue
        cell = _run_cell(flows, width_s, stride_s, spec, hyperparams, seed,
                         positive_classes)
        out.append(ScenarioCell(scenario=scenario_id, cell=cell))
    return out


def _cell_fields(cell: SweepCell, timings: bool) -> list[str]:
    metrics = [fmt_g9(cell.metric(k)) if cell.metric(k) is not None else ""
               for k in _METRIC_KEYS]
    rows = [str(cell.rows_train) if cell.rows_train is not None else "",
            str(cell.rows_test) if cell.rows_test is not None else ""]
    wall = f"{cell.wall_time_s:.3f}" if timings and cell.wall_time_s is not None else ""
    return ([str(cell.width_s), str(cell.stride_s), str(cell.seed)]
            + metrics + rows + [wall, cell.status])


def sweep_csv(result: SweepResult, timings: bool = False) -> str:
    """Sweep CSV; wall_time_s stays empty unless timings is set, keeping
    reruns byte-identical."""
    lines = [SWEEP_CSV_HEADER]
    for cell in result.cells:
        lines.append(",".join(_cell_fields(cell, timings)))
    return "\n".join(lines) + "\n"


def repeat_csv(runs: list[RepeatRun], dispersion: dict,
               timings: bool = False) -> str:
    """Per-run rows followed by min/max/range summary rows."""
    lines = [REPEAT_CSV_HEADER]
    for r in runs:
        metrics = [fmt_g9(getattr(getattr(r, k.split("_", 1)[0]),
                                  k.split("_", 1)[1]))
                   for k in _METRIC_KEYS]
        wall = f"{r.wall_time_s:.3f}" if timings else ""
        lines.append(",".join([str(r.run_index), str(r.seed)] + metrics
                              + [wall]))
    for stat in ("min", "max", "range"):
        metrics = [fmt_g9(dispersion[k][stat]) for k in _METRIC_KEYS]
        lines.append(",".join([stat, ""] + metrics + [""]))
    return "\n".join(lines) + "\n"


def scenarios_csv(rows: list[ScenarioCell], timings: bool = False) -> str:
    lines = [SCENARIO_CSV_HEADER]
    for row in rows:
        lines.append(",".join([str(row.scenario)]
                              + _cell_fields(row.cell, timings)))
    return "\n".join(lines) + "\n"


def write_sweep_csv(path, result: SweepResult, timings: bool = False) -> None:
    atomic_write_text(path, sweep_csv(result, timings))


def write_repeat_csv(path, runs, dispersion, timings: bool = False) -> None:
    atomic_write_text(path, repeat_csv(runs, dispersion, timings))


def write_scenarios_csv(path, rows, timings: bool = False) -> None:
    atomic_write_text(path, scenarios_csv(rows, timings))
