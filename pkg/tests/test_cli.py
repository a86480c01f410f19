from __future__ import annotations

import json
import subprocess
import sys

import pytest

from packlab import cli
from packlab import derangement_lab as dl
from packlab.constructions import k5_minus_bad_cover_raw, outerplanar_2tree_cover
from packlab.cover_model import cover_to_json, full_identity_cover
from packlab.graph_core import cycle


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture
def k5_cover(tmp_path):
    p = tmp_path / "k5.json"
    p.write_text(cover_to_json(k5_minus_bad_cover_raw()))
    return str(p)


def test_read_perms_formats():
    assert cli.read_perms("51234786\n") == [(4, 0, 1, 2, 3, 6, 7, 5)]
    assert cli.read_perms("1 0 2\n# comment\n2,1,0\n") == [(1, 0, 2), (2, 1, 0)]
    with pytest.raises(ValueError):
        cli.read_perms("0 0 1\n")


def test_read_matrix_formats():
    assert cli.read_matrix("2\n10\n0 1\n") == [[1, 0], [0, 1]]
    with pytest.raises(ValueError):
        cli.read_matrix("3\n101\n")


def test_pack_and_count(capsys, k5_cover, tmp_path):
    code, doc = run(capsys, "pack", "--cover", k5_cover)
    assert code == 0 and doc["verdict"] == "NO_PACKING"
    code, doc = run(capsys, "count", "--cover", k5_cover)
    assert doc["transversals"] == 54
    p = tmp_path / "c4.json"
    p.write_text(cover_to_json(full_identity_cover(cycle(4), 3)))
    code, doc = run(capsys, "pack", "--cover", str(p))
    assert doc["verdict"] == "PACKING" and doc["witness"]["valid"]
    code, doc = run(capsys, "pack", "--cover", k5_cover, "--budget", "2")
    assert code == 2 and doc["verdict"] == "INCONCLUSIVE"


def test_upper(capsys, tmp_path):
    code, doc = run(capsys, "upper", "--graph", "K4", "--k", "4")
    assert doc["verdict"] == "HOLDS" and doc["covers_checked"] == 2880
    code, doc = run(capsys, "upper", "--graph", "C4", "--k", "3")
    assert doc["verdict"] == "FAILS" and "witness" in doc
    code, doc = run(capsys, "upper", "--graph", "P4", "--k", "2", "--mode", "list")
    assert doc["verdict"] == "HOLDS"
    state = tmp_path / "ap.state"
    code, doc = run(capsys, "upper", "--graph", "A+", "--k", "4", "--budget", "1", "--resume", str(state))
    assert doc["verdict"] == "INCONCLUSIVE" and json.loads(state.read_text())["next"] == 10 ** 6


def test_derange_and_permanent(capsys, tmp_path):
    p = tmp_path / "case1.txt"
    p.write_text("\n".join(dl.CASE_ONE_ROWS) + "\n")
    code, doc = run(capsys, "derange", "--perms", str(p))
    assert doc["bad_permutations"] == 96 and doc["common_derangements"] == doc["direct_count"]
    m = tmp_path / "j.txt"
    m.write_text("8\n" + "\n".join("".join("0" if i == j else "1" for j in range(8)) for i in range(8)))
    code, doc = run(capsys, "permanent", "--matrix", str(m))
    assert doc["permanent"] == doc["ryser"] == 14833


def test_family(capsys):
    code, doc = run(capsys, "family", "--mindeg", "6")
    assert doc["minimum"] == 4738 and doc["family_size"] == 11


def test_frac(capsys, tmp_path):
    p = tmp_path / "fig.json"
    p.write_text(cover_to_json(outerplanar_2tree_cover().cover))
    code, doc = run(capsys, "frac", "--cover", str(p), "--certify")
    assert not doc["feasible"] and doc["certificate_valid"] and doc["certificate"]["type"] == "clique"
    p.write_text(cover_to_json(full_identity_cover(cycle(5), 3)))
    code, doc = run(capsys, "frac", "--cover", str(p))
    assert doc["feasible"] and doc["certificate_valid"]


def test_construct(capsys, tmp_path):
    code, doc = run(capsys, "construct", "girth", "--g", "5", "--out", str(tmp_path), "--check")
    assert code == 0 and doc["claims_ok"] and len(doc["files"]) == 3
    with pytest.raises(SystemExit):
        cli.main(["construct", "nope", "--out", str(tmp_path)])


def test_verify_and_lemmas(capsys):
    code, doc = run(capsys, "verify", "g8-two-colorings")
    assert code == 0 and doc["status"] == "VERIFIED"
    code, doc = run(capsys, "lemmas")
    assert doc["a-plus"]["fast_tier"] is False and "k5-minus" in doc
    assert cli.main(["verify", "nope"]) == 2
    capsys.readouterr()


def test_report_command(capsys, tmp_path):
    code, doc = run(capsys, "report", "--out", str(tmp_path), "--only", "g733", "series-join-table")
    assert code == 0 and doc["all_verified"] and doc["reports"] == 2
    names = {p.rsplit("/", 1)[-1] for p in doc["files"]}
    assert names == {"summary.tsv", "reports.json", "cases.png", "g733_safe.png"}


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "packlab.cli", "lemmas"], capture_output=True, text=True,
                         check=True)
    assert "series-join-table" in json.loads(out.stdout)
