import json
import subprocess
import sys

import pytest

from conftest import DATA
from roughgran import __version__
from roughgran.agrssa import RankedModels, ToleranceModel
from roughgran.chains import UniversalBlockDistribution
from roughgran.cli import main
from roughgran.table import ChangeSet
from roughgran.validation import ValidationReport


def run(capsys, *argv):
    status = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return status, out, err


def run_json(capsys, *argv):
    status, out, err = run(capsys, *argv)
    return status, json.loads(out) if out else None, err


def validate_args(clusters):
    return ("validate", "--table", DATA / "six_validate.csv", "--clusters", DATA / clusters,
            "--config", DATA / "six_validate_config.json")


def test_enumerate(capsys):
    status, doc, _ = run_json(capsys, "enumerate", "--kind", "tolerance", "--n", 3)
    assert status == 0
    assert doc["command"] == "enumerate" and doc["seed"] == 0 and doc["version"] == __version__
    assert doc["enumeration"]["count"] == 5
    assert UniversalBlockDistribution.from_json(doc["enumeration"]).to_json() == doc["enumeration"]


def test_enumerate_pretty(capsys):
    status, out, _ = run(capsys, "enumerate", "--kind", "congruence", "--n", 3, "--pretty")
    assert status == 0 and out.splitlines()[0] == "0: [0,2]" and len(out.splitlines()) == 4


def test_validate_definite(capsys):
    status, doc, _ = run_json(capsys, *validate_args("six_definite.json"))
    assert status == 0
    assert doc["report"]["overall"] == 1 and doc["report"]["verdict"] == "valid"
    assert ValidationReport.from_json(doc["report"]).to_json() == doc["report"]


def test_validate_marginal(capsys):
    status, doc, _ = run_json(capsys, *validate_args("six_mixed.json"))
    assert status == 3 and doc["report"]["verdict"] == "marginal"


def test_validate_invalid(capsys, tmp_path):
    cfg = json.loads((DATA / "six_validate_config.json").read_text())
    cfg["thresholds"] = {"valid": 0.95, "invalid": 0.9}
    path = tmp_path / "strict.json"
    path.write_text(json.dumps(cfg))
    args = list(validate_args("six_mixed.json"))
    args[-1] = path
    status, doc, _ = run_json(capsys, *args)
    assert status == 4 and doc["report"]["verdict"] == "invalid"


def test_agrssa_m(capsys):
    status, doc, _ = run_json(capsys, "agrssa-m", "--table", DATA / "eight.csv", "--decision", "d",
                              "--config", DATA / "eight_config.json", "--explain", "o1,o2,o5,o6")
    assert status == 0
    model = ToleranceModel.from_json(doc["model"])
    assert model.decision_quality == 0.5
    assert model.to_json() == doc["model"]
    assert doc["explanation"]["lower"] == ["o5", "o6"]


def test_agrssa_m_sigma_override(capsys):
    status, doc, _ = run_json(capsys, "agrssa-m", "--table", DATA / "eight.csv", "--decision", "d",
                              "--config", DATA / "eight_config.json", "--sigma", "1,1")
    assert status == 0 and doc["model"]["decision_quality"] == 0


def test_agrssa_lmr(capsys):
    status, doc, _ = run_json(capsys, "agrssa-lmr", "--table", DATA / "nine.csv", "--decision", "d",
                              "--config", DATA / "nine_lmr.json")
    assert status == 0
    assert doc["result"]["evaluated"] == 25 and len(doc["result"]["models"]) == 25
    qualities = [m["decision_quality"] for m in doc["result"]["models"]]
    assert qualities == sorted(qualities, reverse=True)
    ranked = RankedModels(tuple(ToleranceModel.from_json(m) for m in doc["result"]["models"]),
                          doc["result"]["evaluated"], doc["result"]["notice"])
    assert ranked.to_json() == doc["result"]


def test_agrssa_lmr_capacity(capsys):
    status, out, err = run(capsys, "agrssa-lmr", "--table", DATA / "l4.csv", "--decision", "d",
                           "--config", DATA / "l4_lmr.json")
    assert status == 5 and out == ""
    assert json.loads(err)["error"] == "CapacityError"


def test_agrssa_lmr_cap_flag_overrides(capsys):
    status, doc, _ = run_json(capsys, "agrssa-lmr", "--table", DATA / "l4.csv", "--decision", "d",
                              "--config", DATA / "l4_lmr.json", "--cap", 1000)
    assert status == 0 and doc["result"]["evaluated"] == 196


def test_approx(capsys, tmp_path):
    path = tmp_path / "chain.json"
    path.write_text(json.dumps({"n": 3, "intervals": [[0, 1], [1, 2]]}))
    status, doc, _ = run_json(capsys, "approx", "--blocks", path, "--set", "0,1", "--rough-objects")
    assert status == 0
    assert doc["approximation"]["lower"] == [0, 1] and doc["approximation"]["upper"] == [0, 1, 2]
    assert doc["accuracy"] == pytest.approx(2 / 3)
    assert doc["closeness"] == pytest.approx(5 / 6)
    assert doc["rough_objects"]["exhaustive"] is True
    pairs = tmp_path / "pairs.json"
    pairs.write_text(json.dumps({"size": 3, "pairs": [[0, 1], [1, 2]]}))
    _, again, _ = run_json(capsys, "approx", "--blocks", pairs, "--set", "0,1")
    assert again["approximation"] == doc["approximation"]


def test_diff(capsys, tmp_path):
    old = tmp_path / "old.csv"
    new = tmp_path / "new.csv"
    old.write_text("id,a\nx,1\ny,2\n")
    new.write_text("id,a\nx,1\ny,3\nz,4\n")
    status, doc, _ = run_json(capsys, "diff", "--old", old, "--new", new)
    assert status == 0
    change = ChangeSet.from_json(doc["changes"])
    assert change.to_json() == doc["changes"]
    assert set(change.kinds) == {"O+", "V+"}


def test_errors_go_to_stderr(capsys, tmp_path):
    status, out, err = run(capsys, "enumerate", "--n", 0)
    assert status == 2 and out == ""
    assert json.loads(err)["error"] == "ParameterError"
    bad = tmp_path / "bad.csv"
    bad.write_text("id,a,d\nx,1\n")
    status, _, err = run(capsys, "agrssa-m", "--table", bad, "--decision", "d")
    assert status == 2 and "row" in json.loads(err)["message"]
    status, _, err = run(capsys, "approx", "--blocks", tmp_path / "missing.json")
    assert status == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["enumerate"])
    assert exc.value.code == 2


def test_out_file_and_pretty(capsys, tmp_path):
    target = tmp_path / "report.json"
    status, out, _ = run(capsys, *validate_args("six_mixed.json"), "--out", target, "--pretty")
    assert status == 3
    assert out.startswith("overall 0.7333: marginal")
    assert json.loads(target.read_text())["report"]["verdict"] == "marginal"


def test_figures(capsys, tmp_path):
    figs = tmp_path / "figs"
    status, doc, _ = run_json(capsys, *validate_args("six_definite.json"), "--figures", figs)
    assert status == 0
    assert doc["figures"] == ["validation_closeness.png", "validation_blocks.png"]
    for name in doc["figures"]:
        assert (figs / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_subprocess_entry_point(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "roughgran", "enumerate", "--n", "4", "--kind", "glued"],
        capture_output=True, text=True, check=False,
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["enumeration"]["count"] == 5


def test_explain_pretty(capsys):
    status, out, _ = run(capsys, "agrssa-m", "--table", DATA / "eight.csv", "--decision", "d",
                         "--config", DATA / "eight_config.json", "--explain", "o5,o6", "--pretty")
    assert status == 0
    assert "{o5, o6} = a in [5, 8] x b in [1, 2]" in out
