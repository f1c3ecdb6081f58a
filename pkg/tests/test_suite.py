import json

import pytest

from eulersums.suite import (
    Kind,
    Status,
    SuiteError,
    check_exact,
    check_golden,
    check_numeric,
    default_identities,
    matched_digits,
    parse_identities,
    run_suite,
    select,
    tolerance,
    write_discrepancies,
)
from eulersums.numerics import PrecisionContext

SMALL = """suite-version 1
identity demo.pass numeric
  title zeta(2) two ways
  rhs
    [1] sum(1)/n^2
  lhs
    [1] z2
end
identity demo.exact exact
  title telescoping
  params p=1,2
  lhs
    [fsum(1/(k*(k+1)), k, 1, n)] 1
  rhs
    [1 - 1/(n+1)] 1
end
"""


def test_default_file_parses_and_ids_unique():
    recs = default_identities()
    ids = [r.id for r in recs]
    assert len(ids) == len(set(ids))
    assert sum(r.kind is Kind.GOLDEN for r in recs) == 11
    assert {r.kind for r in recs} == set(Kind)


def test_select():
    assert len(select("golden")) == 11
    assert [r.id for r in select("closed.w4.hl")] == ["closed.w4.hl"]
    assert all(r.id.startswith("closed.w6.") for r in select("closed.w6."))
    assert select("all") == default_identities()
    with pytest.raises(SuiteError):
        select("no-such-identity")


def test_small_file_round_trip():
    recs = parse_identities(SMALL)
    rep = run_suite(recs, digits=20)
    assert rep.ok
    assert rep.counts()["PASS"] == 3
    assert rep.text().splitlines()[-1].startswith("summary PASS=3")
    doc = json.loads(rep.as_json())
    assert doc["summary"]["PASS"] == 3


def test_parse_errors():
    with pytest.raises(SuiteError):
        parse_identities("suite-version 2\n")
    with pytest.raises(SuiteError):
        parse_identities("suite-version 1\nidentity x numeric\n  lhs\n    [1] z2\n")


def test_exact_failure_names_first_bad_n():
    bad = parse_identities(SMALL)[1].corrupted("rhs")
    reps = check_exact(bad, 20)
    assert all(r.status is Status.FAIL for r in reps)
    assert "n=1" in reps[0].detail


def test_numeric_discrepancy_has_both_values():
    rec = parse_identities(SMALL)[0].corrupted("lhs")
    rep = run_suite([rec], digits=20)
    assert rep.reports[0].status is Status.DISCREPANCY
    entry = rep.discrepancies[0]
    assert [p["digits"] for p in entry["precisions"]] == [20, 30]
    assert all("lhs" in p and "rhs" in p for p in entry["precisions"])


def test_unreachable_is_not_silent():
    rec = parse_identities(SMALL)[0]
    r = check_numeric(rec, {}, PrecisionContext(30), "direct", max_terms=1000)
    assert r.status is Status.UNREACHABLE
    assert r.detail


def test_write_discrepancies(tmp_path):
    rec = parse_identities(SMALL)[0].corrupted("rhs")
    rep = run_suite([rec], digits=15)
    path = write_discrepancies(rep, tmp_path / "d.txt")
    text = path.read_text()
    assert "[demo.pass -]" in text and "lhs=" in text and "rhs=" in text


def test_matched_digits():
    assert matched_digits(1.5, "1.5") >= 2
    assert 2.5 < matched_digits(1.2345, "1.2346") < 5


def test_tolerance():
    assert tolerance(20) == tolerance(20)
    assert float(tolerance(30)) == pytest.approx(1e-22)


def test_golden_accel_single():
    rep = check_golden(select("table.h-alt-5")[0], "accel")
    assert rep.status is Status.PASS
    assert "matched=" in rep.detail


def test_report_line_field_order():
    rep = run_suite(parse_identities(SMALL)[:1], digits=15).reports[0]
    fields = [f.split("=")[0] for f in rep.line().split()[3:]]
    assert fields == ["lhs", "rhs", "residual", "tol", "terms", "digits"]
