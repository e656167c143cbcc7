"""Trace CSV, summary JSON/text, manifest, and graph file round-trips."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

import apwalk as ap
from apwalk import io as apio
from apwalk.errors import FormatError

from conftest import get_space


def small_trace():
    space = get_space(2)
    return ap.evolve_and_trace(
        ap.SearchConfig(generation=2, marked=4, steps=8), space=space
    )


def nan_trace():
    space = get_space(2)
    return ap.evolve_and_trace(
        ap.SearchConfig(
            generation=2, marked=4, steps=6, init_set=ap.InitSet.LAST_GENERATION
        ),
        space=space,
    )


# -- number formatting -----------------------------------------------------------


def test_format_number():
    assert apio.format_number(float("nan")) == "nan"
    assert apio.format_number(0.5) == "0.5"
    assert apio.format_number(1.0 / 3.0) == "0.333333333333"
    assert apio.format_number(1.0) == "1"
    assert apio.format_number(0.0) == "0"


# -- traces -----------------------------------------------------------------------


def test_trace_round_trip(tmp_path):
    trace = small_trace()
    path = tmp_path / "t.csv"
    apio.write_trace(trace, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "step,p_marked,p_subspace,p_conditional"
    assert len(lines) == 10
    back = apio.read_trace(path)
    assert back.steps.tolist() == trace.steps.tolist()
    # 12 significant digits survive the round trip at file precision
    assert np.max(np.abs(back.p_marked - trace.p_marked)) < 1e-12
    assert np.max(np.abs(back.p_subspace - trace.p_subspace)) < 1e-12
    assert np.max(np.abs(back.p_conditional - trace.p_conditional)) < 1e-12


def test_trace_nan_round_trip(tmp_path):
    trace = nan_trace()
    assert math.isnan(trace.p_conditional[1])
    path = tmp_path / "t.csv"
    apio.write_trace(trace, path)
    row1 = path.read_text().splitlines()[2]
    assert row1.endswith(",nan")
    back = apio.read_trace(path)
    assert math.isnan(back.p_conditional[1])
    assert back.p_subspace[1] == 0.0


def test_trace_write_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    apio.write_trace(small_trace(), a)
    apio.write_trace(small_trace(), b)
    assert a.read_bytes() == b.read_bytes()


def test_read_trace_rejects_malformed(tmp_path):
    path = tmp_path / "bad.csv"

    path.write_text("")
    with pytest.raises(FormatError):
        apio.read_trace(path)

    path.write_text("step,pm,ps,pc\n0,0.1,0.2,0.5\n")
    with pytest.raises(FormatError, match="header"):
        apio.read_trace(path)

    path.write_text("step,p_marked,p_subspace,p_conditional\n0,0.1,0.2\n")
    with pytest.raises(FormatError, match=":2"):
        apio.read_trace(path)

    path.write_text("step,p_marked,p_subspace,p_conditional\n0,x,0.2,0.5\n")
    with pytest.raises(FormatError, match=":2"):
        apio.read_trace(path)


# -- summaries ----------------------------------------------------------------------


def sample_rows():
    return [
        apio.SummaryRow(
            group="last", generation=4, n_last=27, t_p=10,
            two_sqrt_n_last=2 * math.sqrt(27), p_bar=0.953683828935,
        ),
        apio.SummaryRow(
            group="gen3", generation=3, n_last=9, t_p=7,
            two_sqrt_n_last=6.0, p_bar=float("nan"),
        ),
    ]


def test_summary_round_trip(tmp_path):
    path = tmp_path / "summary.json"
    apio.write_summary(sample_rows(), "conditional", path)
    rows, channel = apio.read_summary(path)
    assert channel == "conditional"
    assert rows[0].group == "last" and rows[0].t_p == 10
    assert abs(rows[0].p_bar - 0.953683828935) < 1e-12
    assert math.isnan(rows[1].p_bar)
    doc = json.loads(path.read_text())
    assert doc["kind"] == "sweep_summary"
    assert set(doc["rows"][0]) == {
        "group", "generation", "n_last", "t_p", "two_sqrt_n_last", "p_bar"
    }


def test_summary_text_table():
    text = apio.summary_text(sample_rows(), "conditional")
    lines = text.splitlines()
    assert lines[0].split() == [
        "group", "generation", "n_last", "t_p", "2*sqrt(n_last)", "p_bar[conditional]"
    ]
    assert "10.3923" in lines[2]
    assert "0.953684" in lines[2]
    assert lines[3].endswith("nan")


def test_read_summary_rejects_malformed(tmp_path):
    path = tmp_path / "s.json"
    path.write_text("{not json")
    with pytest.raises(FormatError):
        apio.read_summary(path)
    path.write_text(json.dumps({"kind": "other"}))
    with pytest.raises(FormatError):
        apio.read_summary(path)
    path.write_text(json.dumps({"kind": "sweep_summary", "rows": [{"group": "x"}]}))
    with pytest.raises(FormatError, match="row 0"):
        apio.read_summary(path)


# -- manifests ----------------------------------------------------------------------


def test_manifest_contents(tmp_path):
    path = tmp_path / "manifest.json"
    apio.write_manifest(
        path,
        command="sweep",
        parameters={"generation": 4, "workers": 1},
        seed=3283,
        outputs=["trace_last.csv", "summary.json"],
        duration_seconds=1.23456,
        version="0.1.0",
    )
    doc = json.loads(path.read_text())
    assert doc["command"] == "sweep"
    assert doc["parameters"]["generation"] == 4
    assert doc["seed"] == 3283
    assert doc["version"] == "0.1.0"
    assert doc["outputs"] == ["trace_last.csv", "summary.json"]
    assert doc["duration_seconds"] == 1.235


# -- graph files ----------------------------------------------------------------------


def test_graph_file_round_trip(tmp_path):
    g = ap.build_random_apollonian(2, 3, seed=5)
    path = tmp_path / "g.json"
    apio.write_graph(g, path)
    back = apio.read_graph(path)
    assert back == g


def test_read_graph_error_names_file(tmp_path):
    path = tmp_path / "g.json"
    path.write_text("{]")
    with pytest.raises(FormatError, match="g.json"):
        apio.read_graph(path)
    path.write_text(json.dumps({"kind": "apollonian"}))
    with pytest.raises(FormatError, match="g.json"):
        apio.read_graph(path)
