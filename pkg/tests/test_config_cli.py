import csv
import json
import math
from pathlib import Path

import pytest

from coverentropy import cli, config


BASE_CONFIG = {
    "seed": 11,
    "system": {"kind": "sft", "transition": [[1, 1], [1, 0]]},
    "measures": {
        "parry": {
            "kind": "markov",
            "P": [[0.6180339887498949, 0.3819660112501051], [1.0, 0.0]],
        },
        "lopsided": {"kind": "markov", "P": [[0.8, 0.2], [1.0, 0.0]]},
    },
    "families": {
        "letters": {"kind": "partition", "elements": [["0"], ["1"]]},
        "whole": {"kind": "partition", "elements": [["0", "1"]]},
        "overlap": {"kind": "cover", "elements": [["00", "01"], ["01", "10"]]},
    },
    "factor_maps": {
        "identity": {
            "codomain": {"kind": "sft", "transition": [[1, 1], [1, 0]]},
            "block_length": 1,
            "code": {"0": 0, "1": 1},
        }
    },
    "tasks": [],
}


def write_config(tmp_path, tasks, **overrides):
    doc = json.loads(json.dumps(BASE_CONFIG))
    doc["tasks"] = tasks
    doc.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def test_empty_task_list(tmp_path):
    path = write_config(tmp_path, [])
    out = tmp_path / "out"
    assert cli.run(path, out) == 0
    rows = list(csv.reader(open(out / "summary.csv")))
    assert len(rows) == 1  # header only


def test_static_task_writes_nine_decimals(tmp_path):
    tasks = [{"kind": "static", "measure": "parry", "cover": "overlap",
              "conditioner": "letters"}]
    path = write_config(tmp_path, tasks)
    out = tmp_path / "out"
    assert cli.run(path, out) == 0
    rows = list(csv.reader(open(out / "task_00_static.csv")))
    assert rows[0] == ["quantity", "value", "method"]
    value = rows[1][1]
    assert len(value.split(".")[1]) == 9


def test_unresolved_name_exits_2(tmp_path, capsys):
    tasks = [{"kind": "static", "measure": "mu7", "cover": "overlap",
              "conditioner": "letters"}]
    path = write_config(tmp_path, tasks)
    assert cli.run(path, tmp_path / "out") == 2
    err = capsys.readouterr().err
    assert "NAME_UNRESOLVED" in err and "task 0" in err


def test_malformed_config_exits_2(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert cli.run(path, tmp_path / "out") == 2


def test_unknown_task_kind_rejected(tmp_path):
    path = write_config(tmp_path, [{"kind": "frobnicate"}])
    assert cli.run(path, tmp_path / "out") == 2


def test_estimate_tasks_and_summary(tmp_path):
    tasks = [
        {"kind": "h_top", "cover": "letters", "conditioner": "whole", "n_max": 6},
        {"kind": "h_minus", "measure": "parry", "cover": "letters",
         "conditioner": "whole", "n_max": 6},
        {"kind": "count", "cover": "overlap", "conditioner": "whole"},
        {"kind": "power_check", "measure": "parry", "cover": "letters",
         "conditioner": "whole", "M": 2, "n_max": 2},
    ]
    path = write_config(tmp_path, tasks)
    out = tmp_path / "out"
    assert cli.run(path, out) == 0
    est = json.loads((out / "task_01_h_minus.json").read_text())
    assert est["quantity"] == "joined_cover_rate"
    assert len(est["sequence"]) == 6
    rows = list(csv.reader(open(out / "summary.csv")))
    assert len(rows) == 5
    assert rows[3][1] == "count"


def test_bits_option_rescales_exactly(tmp_path):
    tasks = [{"kind": "h_top", "cover": "letters", "conditioner": "whole",
              "n_max": 5}]
    path = write_config(tmp_path, tasks)
    cli.run(path, tmp_path / "nats")
    cli.run(path, tmp_path / "bits", bits=True)
    nats = list(csv.reader(open(tmp_path / "nats" / "task_00_h_top.csv")))
    bits = list(csv.reader(open(tmp_path / "bits" / "task_00_h_top.csv")))
    for (n_row, b_row) in zip(nats[1:], bits[1:]):
        assert float(b_row[1]) == pytest.approx(
            float(n_row[1]) / math.log(2), abs=1e-9
        )


def test_run_is_deterministic(tmp_path):
    tasks = [
        {"kind": "h_minus", "measure": "lopsided", "cover": "overlap",
         "conditioner": "letters", "n_max": 4},
        {"kind": "bracket", "measure": "lopsided", "cover": "overlap",
         "conditioner": "letters", "n_max": 4, "windows": [2]},
    ]
    path = write_config(tmp_path, tasks)
    assert cli.run(path, tmp_path / "a") == 0
    assert cli.run(path, tmp_path / "b") == 0
    for name in ("task_00_h_minus.csv", "task_01_bracket.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_text() == (
            tmp_path / "b" / name
        ).read_text()


def test_factor_check_task(tmp_path):
    tasks = [
        {"kind": "factor_check", "factor": "identity", "measure": "parry",
         "cover": "letters", "conditioner": "whole", "n_max": 4},
    ]
    path = write_config(tmp_path, tasks)
    out = tmp_path / "out"
    assert cli.run(path, out) == 0
    rep = json.loads((out / "task_00_factor_check.json").read_text())
    assert rep["verdict"] == "holds_within_tol"


def test_codomain_family_reference(tmp_path):
    doc = json.loads(json.dumps(BASE_CONFIG))
    doc["families"]["cod_letters"] = {
        "kind": "partition",
        "elements": [["0"], ["1"]],
        "on": "identity",
    }
    doc["tasks"] = [
        {"kind": "factor_check", "factor": "identity", "measure": "parry",
         "cover": "cod_letters", "conditioner": "whole", "n_max": 3}
    ]
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    assert cli.run(path, tmp_path / "out") == 0


def test_permutation_config(tmp_path):
    doc = {
        "system": {"kind": "permutation", "mapping": [1, 0, 3, 4, 2]},
        "measures": {"uni": {"kind": "cycles", "weights": [0.4, 0.6]}},
        "families": {
            "pair": {"kind": "partition", "elements": [[0, 1], [2, 3, 4]]},
            "whole": {"kind": "partition", "elements": [[0, 1, 2, 3, 4]]},
        },
        "tasks": [
            {"kind": "static", "measure": "uni", "cover": "pair",
             "conditioner": "whole"},
            {"kind": "ergodic_check", "measure": "uni", "family": "pair",
             "conditioner": "whole", "n_max": 6},
        ],
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    assert cli.run(path, tmp_path / "out") == 0


def test_main_entrypoint_run(tmp_path):
    path = write_config(tmp_path, [])
    code = cli.main(["run", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 0
