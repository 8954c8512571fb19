import json
import subprocess
import sys
from fractions import Fraction

import pytest

from pierce_expansion.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    paths = {
        "ones": tmp_path / "ones.txt",
        "tail": tmp_path / "tail.txt",
        "empty": tmp_path / "empty.txt",
        "geom": tmp_path / "geom.txt",
        "point": tmp_path / "point.txt",
    }
    paths["ones"].write_text("set:1\n")
    paths["tail"].write_text("# everything\nall\n")
    paths["empty"].write_text("")
    paths["geom"].write_text("geom:1/2\n")
    paths["point"].write_text("1\n")
    return {k: str(v) for k, v in paths.items()}


def test_expand(capsys):
    code, out, _ = run(capsys, "expand", "2/5")
    doc = json.loads(out)
    assert code == 0
    assert doc["g"] == [2, 3] and doc["q"] == [2, 5]
    assert doc["partial_sums"] == ["1/2", "2/5"] and doc["exact_match"]


def test_expand_csv(capsys):
    code, out, _ = run(capsys, "expand", "5/7", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["k,q,g,partial_sum", "1,1,1,1/1", "2,3,2,2/3", "3,7,4,5/7"]


@pytest.mark.parametrize("x", ["0/1", "1", "3/2", "abc", "1/0"])
def test_expand_rejects(capsys, x):
    code, out, err = run(capsys, "expand", x)
    assert code == 2 and out == "" and err.startswith("error:")


def test_cylinder(capsys):
    doc = json.loads(run(capsys, "cylinder", "2")[1])
    assert (doc["left"], doc["right"], doc["length"]) == ("1/3", "1/2", "1/6")
    doc = json.loads(run(capsys, "cylinder")[1])
    assert (doc["left"], doc["right"]) == ("0/1", "1/1")
    assert run(capsys, "cylinder", "1,0")[0] == 2


def test_measure(capsys, files):
    doc = json.loads(run(capsys, "measure", files["ones"], "--depth", "4")[1])
    assert doc["lower"] == doc["upper"] == "1/120"
    doc = json.loads(run(capsys, "measure", files["tail"], "--depth", "1", "--cutoff", "100")[1])
    assert doc["lower"] == "100/101" and doc["upper"] == "1/1"


def test_measure_errors(capsys, files, tmp_path):
    assert run(capsys, "measure", files["empty"], "--depth", "2")[0] == 2
    assert run(capsys, "measure", str(tmp_path / "missing"), "--depth", "2")[0] == 2
    assert run(capsys, "measure", files["ones"], "--depth", "0")[0] == 2
    code, _, err = run(
        capsys, "measure", files["tail"], "--depth", "3", "--cutoff", "1000", "--max-work", "10"
    )
    assert code == 3 and "error" in err


def test_hausdorff(capsys):
    doc = json.loads(run(capsys, "hausdorff", "--n", "3", "--alpha", "1/5", "--k-max", "3")[1])
    assert doc["decreasing_from_k"] == 242
    assert [r["k"] for r in doc["table"]] == [1, 2, 3]
    assert run(capsys, "hausdorff", "--n", "3", "--alpha", "0", "--k-max", "3")[0] == 2
    doc = json.loads(run(capsys, "hausdorff", "--n", "2", "--alpha", "1", "--k-max", "2")[1])
    assert doc["table"][1]["volume"] == "2/3"


def test_a_k_measure(capsys):
    doc = json.loads(run(capsys, "a-k-measure", "--k", "5")[1])
    assert doc["lower"] == doc["upper"] == "1/32"
    doc = json.loads(run(capsys, "a-k-measure", "--k", "2", "--digit", "3", "--cutoff", "50")[1])
    lower, upper = Fraction(doc["lower"]), Fraction(doc["upper"])
    assert 0 < lower < upper <= Fraction(1, 4)


def test_frequency_worker_independent(capsys):
    args = ["frequency", "--samples", "40", "--depth", "20", "--bits", "256", "--seed", "7"]
    one = run(capsys, *args)[1]
    two = run(capsys, *args, "--workers", "2")[1]
    doc1, doc2 = json.loads(one), json.loads(two)
    doc1["config"].pop("workers", None)
    doc2["config"].pop("workers", None)
    assert doc1 == doc2
    assert run(capsys, *args, "--format", "csv")[1] == run(capsys, *args, "--format", "csv", "--workers", "3")[1]


def test_eta_and_singularity(capsys, files):
    doc = json.loads(run(capsys, "eta", files["point"], "--samples", "2", "--depth", "10")[1])
    assert doc["purity"]["class"] == "discrete"
    assert doc["samples"][0]["digits"] == ",".join(["1"] * 10)
    doc = json.loads(
        run(capsys, "singularity", files["geom"], "--samples", "100", "--depth", "40", "--bits", "256")[1]
    )
    assert doc["divergence_condition"] is True
    csv_out = run(capsys, "singularity", files["geom"], "--samples", "3", "--depth", "5",
                  "--bits", "64", "--format", "csv")[1]
    assert csv_out.splitlines()[0] == "index,left,right,digits"
    assert len(csv_out.splitlines()) == 4
    assert run(capsys, "eta", files["empty"])[0] == 2


def test_out_file_and_byte_identical_reruns(capsys, files, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["eta", files["geom"], "--samples", "5", "--depth", "12", "--seed", "3"]
    assert run(capsys, *argv, "--out", str(a)) == (0, "", "")
    assert run(capsys, *argv, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text() == run(capsys, *argv)[1]


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["measure"])
    assert info.value.code == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pierce_expansion", "expand", "1/2", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "1,2,2,1/2"
