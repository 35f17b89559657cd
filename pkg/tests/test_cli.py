"""Command-line behavior: exit codes, flag validation, output formats, and
flag/default parity with the documented interface."""
import argparse
import json

import pytest

from flowsift.cli import build_parser, main
from flowsift.ingest import HEADER_LINE
from flowsift.sweep import SWEEP_CSV_HEADER

BACKGROUND_ROW = ("2011/08/16 10:00:01.000000,2.000000,tcp,10.0.0.{i},1025,"
                  "   ->,77.75.0.1,80,FSPA_FSPA,0,0,10,900,450,"
                  "flow=Background-TCP-Established")
BOTNET_ROW = ("2011/08/16 10:00:02.500000,0.100000,tcp,147.32.85.1,2048,"
              "   ->,77.75.0.2,6667,CON,0,0,4,280,140,"
              "flow=From-Botnet-V42-TCP-Attempt")


def write_flow_file(path, rows):
    path.write_text("\n".join([HEADER_LINE] + rows) + "\n")


@pytest.fixture(scope="module")
def ws(tmp_path_factory):
    """One synthetic capture pushed through the whole pipeline."""
    root = tmp_path_factory.mktemp("cli")
    paths = {
        "flows": str(root / "flows.csv"),
        "features": str(root / "features.csv"),
        "model": str(root / "model.txt"),
        "report": str(root / "report.txt"),
        "sweep": str(root / "sweep.csv"),
        "hist": str(root / "hist.csv"),
        "root": root,
    }
    assert main(["synth", "--seed", "42", "-o", paths["flows"]]) == 0
    assert main(["featurize", paths["flows"], "--width", "60",
                 "--stride", "60", "-o", paths["features"]]) == 0
    assert main(["train", paths["features"], "-o", paths["model"]]) == 0
    assert main(["eval", paths["features"], "--model", paths["model"],
                 "-o", paths["report"]]) == 0
    assert main(["sweep", paths["flows"], "--widths", "60,90",
                 "--strides", "15,60", "--seed", "7",
                 "-o", paths["sweep"]]) == 0
    assert main(["report", paths["sweep"], "--histogram", "precision",
                 "--bin-width", "0.05", "-o", paths["hist"]]) == 0
    return paths


def test_pipeline_composition_produces_full_grid(ws):
    lines = open(ws["sweep"]).read().strip().split("\n")
    assert lines[0] == SWEEP_CSV_HEADER
    assert len(lines) == 5, "2 widths x 2 strides"
    for line in lines[1:]:
        assert line.split(",")[-1] == "ok"


def test_eval_report_is_json(ws):
    payload = json.loads(open(ws["report"]).read())
    for key in ("precision", "recall", "f1", "confusion", "config"):
        assert key in payload
    cm = payload["confusion"]
    assert all(cm[k] >= 0 for k in ("tp", "fp", "fn", "tn"))


def test_report_histogram_shape(ws):
    lines = open(ws["hist"]).read().strip().split("\n")
    assert lines[0] == "kind,bin_lo,bin_hi,count"
    assert lines[1].startswith("underflow,")
    assert lines[-1].startswith("overflow,")
    binned = sum(int(l.split(",")[-1]) for l in lines[1:])
    assert binned == 4, "four ok sweep rows contribute one value each"


def test_stats_csv_stdout(tmp_path, capsys):
    flows = tmp_path / "f.csv"
    write_flow_file(flows, [BACKGROUND_ROW.format(i=1),
                            BACKGROUND_ROW.format(i=2), BOTNET_ROW])
    assert main(["stats", str(flows)]) == 0
    out = capsys.readouterr().out.strip().split("\n")
    assert out[0] == "class,count,percent"
    rows = {l.split(",")[0]: l.split(",")[1:] for l in out[1:]}
    assert rows["background"][0] == "2"
    assert rows["botnet"][0] == "1"
    assert rows["total"] == ["3", "100"]


def test_stats_json_payload(tmp_path, capsys):
    flows = tmp_path / "f.csv"
    write_flow_file(flows, [BACKGROUND_ROW.format(i=1), BOTNET_ROW])
    assert main(["stats", str(flows), "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["total"] == 2
    assert payload["counts"]["botnet"] == 1
    assert payload["rows_skipped"] == 0
    assert payload["unrecognized_labels"] == 0


def test_zero_width_is_usage_error(ws, tmp_path, capsys):
    out = str(tmp_path / "f.csv")
    rc = main(["featurize", ws["flows"], "--width", "0", "--stride", "15",
               "-o", out])
    err = capsys.readouterr().err
    assert rc == 1
    assert "--width" in err, "the message names the offending flag"
    assert not (tmp_path / "f.csv").exists(), "exit 1 writes nothing"


def test_unknown_flag_is_usage_error(ws, capsys):
    rc = main(["stats", ws["flows"], "--verbose"])
    assert rc == 1
    assert capsys.readouterr().err


def test_missing_subcommand_is_usage_error(capsys):
    assert main([]) == 1
    assert capsys.readouterr().err


def test_bad_widths_list_is_usage_error(ws, tmp_path, capsys):
    rc = main(["sweep", ws["flows"], "--widths", "60,x", "--strides", "15",
               "-o", str(tmp_path / "s.csv")])
    assert rc == 1
    assert "--widths" in capsys.readouterr().err


def test_missing_input_is_data_error(tmp_path, capsys):
    out = str(tmp_path / "m.txt")
    rc = main(["train", str(tmp_path / "missing.csv"), "-o", out])
    assert rc == 2
    assert capsys.readouterr().err
    assert not (tmp_path / "m.txt").exists()


def test_mangled_model_is_data_error(ws, tmp_path, capsys):
    bad = tmp_path / "model.txt"
    bad.write_text("{ not json")
    rc = main(["eval", ws["features"], "--model", str(bad),
               "-o", str(tmp_path / "r.txt")])
    assert rc == 2
    assert capsys.readouterr().err


def test_single_class_training_is_degenerate(tmp_path, capsys):
    flows = tmp_path / "flows.csv"
    write_flow_file(flows, [BACKGROUND_ROW.format(i=i) for i in (1, 2, 3)])
    features = str(tmp_path / "features.csv")
    assert main(["featurize", str(flows), "--width", "60", "--stride", "60",
                 "-o", features]) == 0
    rc = main(["train", features, "-o", str(tmp_path / "m.txt")])
    assert rc == 3
    assert "degenerate" in capsys.readouterr().err.lower()
    assert not (tmp_path / "m.txt").exists()


def test_scenarios_isolates_missing_capture(ws, tmp_path):
    out = str(tmp_path / "scenarios.csv")
    rc = main(["scenarios", "--files",
               f"9={ws['flows']},5={tmp_path / 'gone.csv'}",
               "--width", "189", "--stride", "129", "-o", out])
    assert rc == 0, "per-capture failures do not fail the command"
    lines = open(out).read().strip().split("\n")
    assert len(lines) == 3
    assert lines[1].startswith("5,") and lines[1].endswith("error:FileNotFoundError")
    assert lines[2].startswith("9,") and lines[2].endswith("ok")


def test_featurize_selection_stages(ws, tmp_path):
    pca_out = str(tmp_path / "pca.csv")
    report = str(tmp_path / "selection.json")
    rc = main(["featurize", ws["flows"], "--width", "60", "--stride", "60",
               "--corr-threshold", "0.95", "--pca-components", "3",
               "--selection-report", report, "-o", pca_out])
    assert rc == 0
    header = open(pca_out).readline().strip().split(",")
    assert header[3:-1] == ["pc_1", "pc_2", "pc_3"]
    selection = json.loads(open(report).read())
    assert selection["retained"] == ["pc_1", "pc_2", "pc_3"]
    assert any(d["stage"] == "correlation" for d in selection["dropped"])


def test_repeat_command_writes_dispersion(ws, tmp_path):
    out = str(tmp_path / "repeat.csv")
    rc = main(["repeat", ws["flows"], "--width", "60", "--stride", "60",
               "--runs", "2", "--seed", "1", "-o", out])
    assert rc == 0
    lines = open(out).read().strip().split("\n")
    assert lines[-1].startswith("range,")
    assert len(lines) == 1 + 2 + 3


def test_repeat_requires_two_runs(ws, tmp_path, capsys):
    rc = main(["repeat", ws["flows"], "--width", "60", "--stride", "60",
               "--runs", "1", "-o", str(tmp_path / "r.csv")])
    assert rc == 1
    assert "--runs" in capsys.readouterr().err


def test_help_screens_exit_zero(capsys):
    assert main(["--help"]) == 0
    for sub in ("stats", "featurize", "train", "eval", "sweep", "repeat",
                "scenarios", "synth", "report"):
        assert main([sub, "--help"]) == 0
        assert capsys.readouterr().out


EXPECTED_DEFAULTS = {
    "stats": {"--json": False, "--output": None, "--on-error": "skip"},
    "featurize": {"--positive-classes": "botnet,cnc", "--group-by": "src",
                  "--corr-threshold": None, "--backward-elim": False,
                  "--pca-components": None, "--selection-report": None,
                  "--on-error": "skip"},
    "train": {"--l2": 1e-4, "--lr": 0.5, "--max-iter": 2000, "--tol": 1e-8,
              "--class-weight": "balanced", "--seed": 0},
    "eval": {},
    "sweep": {"--split": "chrono", "--fraction": 0.7, "--purge": None,
              "--seed": 0, "--jobs": None, "--timings": False,
              "--on-error": "skip"},
    "repeat": {"--split": "random", "--fraction": 0.7, "--purge": None,
               "--seed": 0, "--timings": False, "--on-error": "skip"},
    "scenarios": {"--width": 189, "--stride": 129, "--split": "chrono",
                  "--fraction": 0.7, "--purge": None, "--seed": 0,
                  "--timings": False, "--on-error": "skip"},
    "synth": {"--preset": "scenario9", "--hard": False, "--seed": 0},
    "report": {"--bin-width": 0.05, "--from": "test"},
}

EXPECTED_REQUIRED = {
    "featurize": {"--width", "--stride", "-o"},
    "train": {"-o"},
    "eval": {"--model", "-o"},
    "sweep": {"--widths", "--strides", "-o"},
    "repeat": {"--width", "--stride", "--runs", "-o"},
    "scenarios": {"--files", "-o"},
    "synth": {"-o"},
    "report": {"--histogram", "-o"},
}


def subcommand_parsers():
    parser = build_parser()
    action = next(a for a in parser._actions
                  if isinstance(a, argparse._SubParsersAction))
    return action.choices


def test_flag_default_parity():
    """Every documented flag exists with its documented default, and --help
    renders that default."""
    subs = subcommand_parsers()
    assert set(subs) == set(EXPECTED_DEFAULTS)
    for name, sub in subs.items():
        by_flag = {}
        for action in sub._actions:
            for opt in action.option_strings:
                by_flag[opt] = action
        for flag, default in EXPECTED_DEFAULTS[name].items():
            assert flag in by_flag, f"{name} lost flag {flag}"
            action = by_flag[flag]
            assert action.default == default, \
                f"{name} {flag}: default {action.default!r} != {default!r}"
            assert not action.required
        for flag in EXPECTED_REQUIRED.get(name, set()):
            assert flag in by_flag, f"{name} lost flag {flag}"
            assert by_flag[flag].required, f"{name} {flag} must be required"
        help_text = sub.format_help()
        defaulted = [f for f, a in by_flag.items()
                     if not a.required and a.default is not argparse.SUPPRESS]
        if defaulted:
            assert "(default:" in help_text, \
                f"{name} --help does not render defaults"


def test_every_subcommand_flag_is_documented():
    """The parity table above is exhaustive: no subcommand grows a flag the
    table does not know about."""
    subs = subcommand_parsers()
    for name, sub in subs.items():
        known = (set(EXPECTED_DEFAULTS[name])
                 | EXPECTED_REQUIRED.get(name, set())
                 | {"-h", "--help", "-o", "--output"})
        for action in sub._actions:
            for opt in action.option_strings:
                assert opt in known, f"undocumented flag {opt} on {name}"
