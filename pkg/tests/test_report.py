import json
import math

import pytest

from zksym.report import (
    FAIL,
    NOTE,
    PASS,
    REPORTED,
    Check,
    Report,
    asserted,
    audited,
    discrepancies,
    discrepancy_markdown,
    fmt,
    noted,
    write_csv,
)


def test_asserted_and_audited():
    assert asserted("a", True, 1e-15, 1e-10).status == PASS
    assert asserted("a", False, 1.0, 1e-10, "src").status == FAIL
    c = audited("b", False, 2.0, 1e-10, "src")
    assert c.status == REPORTED and c.verdict == FAIL
    assert noted("n", "src").verdict == NOTE


@pytest.mark.parametrize("status", [FAIL, REPORTED])
def test_citation_required(status):
    with pytest.raises(ValueError):
        Check("x", status)


def test_unknown_status():
    with pytest.raises(ValueError):
        Check("x", "MAYBE")


def test_exit_code_only_on_asserted_failure():
    r = Report([asserted("a", True), audited("b", False, citation="c")])
    assert r.exit_code == 0
    r.extend([asserted("c", False, citation="d")])
    assert r.exit_code == 1
    assert r.counts() == {PASS: 1, FAIL: 1, REPORTED: 1}


def test_json_round_trip_and_nonfinite():
    r = Report([asserted("a", True, math.inf, 1.0), audited("b", False, 0.5, 1e-10, "src", evidence={"k": (1, 2.5)})])
    d = json.loads(r.to_json())
    assert d["checks"][0]["value"] == "inf"
    back = Report.from_dict(d)
    assert back.checks[0].value == math.inf
    assert back.checks[1].evidence == {"k": [1, 2.5]}


def test_discrepancies_sorted_and_filtered():
    r = Report([audited("z", False, 1.0, citation="s"), audited("y", True, 0.0, citation="s"),
                noted("m", "s"), asserted("ok", True)])
    items = discrepancies(r)
    assert [d["name"] for d in items] == ["m", "z"]
    md = discrepancy_markdown(items)
    assert md.startswith("# Discrepancy report") and "| z |" in md
    assert "No discrepancies" in discrepancy_markdown([])


@pytest.mark.parametrize("v, s", [(0.1, "0.10000000000000001"), (3, "3"), (True, "1"), ("x", "x"), (1e-300, "1e-300")])
def test_fmt(v, s):
    assert fmt(v) == s


def test_write_csv(tmp_path):
    p = write_csv(tmp_path / "sub" / "a.csv", ("x", "y"), [(1, 0.5), (2, "b")])
    assert p.read_text() == "x,y\n1,0.5\n2,b\n"
