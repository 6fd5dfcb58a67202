import io
import json
import subprocess
import sys

import pytest

from rootcryst import catalog as data
from rootcryst.cli import run
from rootcryst.crystgrp import group_from_struct
from rootcryst.invariants import build_representative, case_family


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    status = run(list(argv), out, err)
    return status, out.getvalue(), err.getvalue()


def structured(*argv):
    status, out, err = call(*argv, "--format", "structured")
    return status, (json.loads(out) if out else None), (json.loads(err) if err else None)


# ---------------------------------------------------------------- documented examples


def test_weyl_order_b3():
    assert call("weyl", "--type", "B", "--rank", "3", "--show", "order") == (0, "48\n", "")


def test_b3_cl_w2_is_not_split():
    status, out, _ = call("group", "--type", "B", "--rank", "3", "--lattice", "CL", "--rep", "2", "--check", "split")
    assert (status, out) == (0, "false\n")
    status, doc, _ = structured("group", "--type", "B", "--rank", "3", "--lattice", "CL", "--rep", "1",
                                "--check", "split")
    assert doc["result"]["split"] is True and doc["result"]["witness"] is not None


def test_verify_d6_fl_separates_all_three():
    status, doc, _ = structured("verify", "--family", "D6-FL")
    assert status == 0
    report = doc["result"]["reports"][0]
    assert report["ok"] and report["family"] == "D6-FL"
    assert [r["name"] for r in report["representatives"]] == ["W1", "W2", "W3"]
    assert all(p["separated_by"] for p in report["pairs"])


def test_verify_text_report():
    status, out, _ = call("verify", "--family", "C3-FL")
    assert status == 0 and "verdict: ok" in out


def test_distinguish_verb():
    status, out, _ = call("distinguish", "--type", "D", "--rank", "6", "--lattice", "FL", "--pair", "2", "3")
    assert (status, out) == (0, "equal-squares(s5,s6)\n")


# ---------------------------------------------------------------- exit statuses


@pytest.mark.parametrize(
    "argv",
    [["frobnicate"], ["weyl"], ["weyl", "--type", "Z", "--rank", "3"], ["verify", "--family", "D5-FL"],
     ["group", "--type", "B", "--rank", "3", "--lattice", "CL", "--check", "nope"],
     ["group", "--type", "B", "--rank", "3", "--lattice", "CL", "--check", "quotient"],
     ["export", "--entity", "spaceship", "--type", "B", "--rank", "3"]],
)
def test_usage_errors_exit_2_with_error_record(argv):
    status, out, err = call(*argv)
    assert status == 2 and out == ""
    record = json.loads(err)
    assert record["schema_version"] == 1 and record["status"] == 2 and record["error"]["kind"]


def test_ceiling_exit_3():
    status, _, err = call("weyl", "--type", "E7", "--rank", "7")
    assert status == 3 and json.loads(err)["error"]["kind"] == "GroupTooLarge"


def test_ceiling_flag_and_environment(monkeypatch):
    assert call("weyl", "--type", "B", "--rank", "4", "--ceiling", "100")[0] == 3
    assert call("weyl", "--type", "B", "--rank", "4")[0] == 0
    monkeypatch.setenv("ROOTCRYST_CEILING", "100")
    from rootcryst.weyl import weyl_group

    weyl_group.cache_clear()
    try:
        assert call("weyl", "--type", "B", "--rank", "4")[0] == 3
        # the flag wins over the environment
        assert call("weyl", "--type", "B", "--rank", "4", "--ceiling", "1000")[0] == 0
    finally:
        monkeypatch.delenv("ROOTCRYST_CEILING")
        weyl_group.cache_clear()


def test_unbuildable_shipped_representative_is_internal():
    status, _, err = call("group", "--type", "B", "--rank", "4", "--lattice", "CCL", "--rep", "2")
    assert status == 4 and json.loads(err)["error"]["kind"] == "InternalError"


def test_verify_b4_ccl_reports_failure():
    status, doc, _ = structured("verify", "--family", "B4-CCL")
    assert status == 4 and not doc["result"]["reports"][0]["ok"]


def test_unsupported_format():
    status, _, err = call("export", "--entity", "rootsys", "--type", "B", "--rank", "3", "--format", "yaml")
    assert status == 2 and json.loads(err)["error"]["kind"] == "UnsupportedFormat"


# ---------------------------------------------------------------- structured output


def test_structured_output_is_versioned_and_deterministic():
    argv = ["group", "--type", "C", "--rank", "3", "--lattice", "FL", "--rep", "3", "--check", "chi",
            "--format", "structured"]
    first, second = call(*argv), call(*argv)
    assert first == second
    doc = json.loads(first[1])
    assert doc["schema_version"] == 1 and doc["verb"] == "group" and doc["status"] == 0
    assert doc["result"]["chi"]["chi"] == "chi3"


def test_export_b3_root_system():
    status, doc, _ = structured("export", "--entity", "rootsys", "--type", "B", "--rank", "3")
    roots = doc["result"]["roots"]
    assert status == 0 and len(roots) == 18
    assert sum(r["positive"] for r in roots) == 9
    assert all(isinstance(x, str) for r in roots for x in r["vector"])


@pytest.mark.parametrize("t, l", [("B", 4), ("D", 5), ("F4", 4), ("G2", 2), ("E6", 6), ("A", 3), ("C", 3)])
def test_export_diagram_matches_catalog(t, l):
    status, doc, _ = structured("export", "--entity", "diagram", "--type", t, "--rank", str(l))
    edges = sorted(tuple(e) for e in doc["result"]["edges"])
    assert status == 0 and edges == data.diagram_edges(t, l)
    assert doc["result"]["nodes"] == list(range(1, l + 1))


def test_export_diagram_as_dot():
    status, out, _ = call("export", "--entity", "diagram", "--type", "B", "--rank", "3")
    assert status == 0 and out.startswith("graph") and 'label="4"' in out


def test_group_round_trip_through_export(tmp_path):
    status, out, _ = call("export", "--entity", "group", "--type", "B", "--rank", "4", "--lattice", "CCL",
                          "--rep", "3", "--format", "structured")
    assert status == 0
    path = tmp_path / "w3.json"
    path.write_text(out)
    W = build_representative(case_family("B", 4, "CCL"), "W3")
    loaded = group_from_struct(json.loads(out)["result"])
    assert loaded.same_vsys(W)
    assert loaded.to_struct() == W.to_struct()
    status, text, _ = call("group", "--input", str(path), "--check", "chi")
    assert status == 0 and "label: chi3" in text


def test_bad_input_file(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("not json")
    assert call("group", "--input", str(path))[0] == 2


def test_lattice_and_rootsys_views():
    assert call("lattice", "--type", "B", "--rank", "3", "--lattice", "FL", "--show", "sandwich")[1] == "false\n"
    assert call("lattice", "--type", "B", "--rank", "4", "--lattice", "CCL", "--show", "sandwich")[1] == "true\n"
    status, doc, _ = structured("lattice", "--type", "B", "--rank", "3", "--lattice", "QofR", "--show", "maximal",
                                "--max-index", "16")
    assert [c["index"] for c in doc["result"]["maximal"]] == [1, 2, 4]
    status, doc, _ = structured("rootsys", "--type", "E6", "--rank", "6", "--show", "lattices")
    assert doc["result"]["index_of_connection"] == 3


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rootcryst", "weyl", "--type", "G2", "--rank", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "12\n"
