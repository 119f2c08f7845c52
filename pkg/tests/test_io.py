import numpy as np
import pytest
from helpers import make_rows

from forcematch import DEConfig, GroupDataset, SimConfig, Trajectory, extract_design_rows, fit, form_for, io, simulate
from forcematch.errors import DuplicateTimestamp, MalformedRow, NonFiniteValue


def small_dataset():
    rng = np.random.default_rng(2)
    t = np.cumsum(rng.uniform(0.1, 3, 40))
    return GroupDataset({str(i): Trajectory(str(i), t, rng.normal(size=40) * 1e3, rng.normal(size=40) / 3)
                         for i in range(3)})


def test_dataset_roundtrip_identity(tmp_path):
    data = small_dataset()
    p = tmp_path / "d.csv"
    io.write_dataset(p, data)
    assert io.read_dataset(p) == data
    q = tmp_path / "e.csv"
    io.write_dataset(q, io.read_dataset(p))
    assert p.read_bytes() == q.read_bytes()


def test_dataset_rows_in_any_order(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("individual_id,t,x,y\nb,2,0,0\na,1,1,1\nb,1,5,5\na,0,0,0\n")
    data = io.read_dataset(p)
    np.testing.assert_array_equal(data["b"].t, [1, 2])
    np.testing.assert_array_equal(data["b"].x, [5, 0])


def test_duplicate_timestamp_reports_line(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("individual_id,t,x,y\na,0,0,0\nb,0,0,0\na,0,1,1\n")
    with pytest.raises(DuplicateTimestamp, match="line 4"):
        io.read_dataset(p)


@pytest.mark.parametrize("body, err", [
    ("a,0,nan,0\n", NonFiniteValue),
    ("a,0,1\n", MalformedRow),
    ("a,zero,1,1\n", MalformedRow),
])
def test_malformed_rows(tmp_path, body, err):
    p = tmp_path / "d.csv"
    p.write_text("individual_id,t,x,y\nb,0,0,0\n" + body)
    with pytest.raises(err, match="line 3"):
        io.read_dataset(p)


def test_bad_header(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("id,time,x,y\n")
    with pytest.raises(MalformedRow, match="line 1"):
        io.read_dataset(p)


def test_iso_time(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("individual_id,t,x,y\na,2020-01-01T00:00:00Z,0,0\na,2020-01-01T00:01:00Z,1,0\n"
                 "b,2020-01-01T00:00:30+00:00,0,1\nb,2020-01-01T00:02:00Z,2,2\n")
    data = io.read_dataset(p, iso_time=True)
    assert data["a"].t[1] - data["a"].t[0] == 60.0
    assert data["b"].t[0] - data["a"].t[0] == 30.0


def test_behavior_log_roundtrip(tmp_path):
    _, log = simulate(SimConfig(duration=600.0))
    p = tmp_path / "log.csv"
    io.write_behavior_log(p, log)
    assert io.read_behavior_log(p) == log


def test_rows_roundtrip(tmp_path):
    rows = make_rows(n=30, m=3)
    rows.previous[4] = np.nan
    rows.assoc_dist[2, 1] = np.nan
    rows.assoc_dir[2, 1] = np.nan
    p = tmp_path / "rows.csv"
    io.write_rows(p, rows)
    back = io.read_rows(p)
    assert back.associate_ids == rows.associate_ids and back.focal_id == rows.focal_id
    for name in ("t", "observed", "previous", "da", "iid", "cm", "assoc_dir", "assoc_dist"):
        np.testing.assert_array_equal(getattr(back, name), getattr(rows, name))


def test_extract_write_read_fit_equals_direct_fit(tmp_path):
    data, _ = simulate(SimConfig(duration=1800.0))
    p = tmp_path / "d.csv"
    io.write_dataset(p, data)
    rows = extract_design_rows(io.read_dataset(p), "0")
    io.write_rows(tmp_path / "r.csv", rows)
    via_file = io.read_rows(tmp_path / "r.csv")
    cfg = DEConfig(max_gens=20, patience=10, workers=1)
    direct = fit(extract_design_rows(data, "0"), form_for(rows, "eq2"), config=cfg)
    again = fit(via_file, form_for(via_file, "eq2"), config=cfg)
    assert direct.to_json() == again.to_json()
    io.write_fit(tmp_path / "f.json", direct)
    assert io.read_fit(tmp_path / "f.json") == direct
    io.write_trace(tmp_path / "trace.csv", direct)
    lines = (tmp_path / "trace.csv").read_text().splitlines()
    assert lines[0] == "generation,best_rss" and len(lines) == len(direct.optimizer_trace) + 1
