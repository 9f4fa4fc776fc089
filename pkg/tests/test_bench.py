import io as stdio
import math
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from qchan import bench
from qchan.bench import SampleStats, nearest_rank

GOLDEN = Path(__file__).parent / "data" / "bench_golden.csv"


@pytest.fixture(scope="module")
def small_run():
    return bench.run_bench([2, 3], 200, seed=7, workers=1)


def test_rerun_is_byte_identical(small_run):
    assert bench.format_csv(small_run) == bench.format_csv(bench.run_bench([2, 3], 200, seed=7, workers=1))


def test_thread_count_does_not_change_output(small_run):
    assert bench.format_csv(bench.run_bench([2, 3], 200, seed=7, workers=3)) == bench.format_csv(small_run)


def test_matches_golden_file(small_run):
    # another LAPACK build may move floats by a few ulps and push a value across a bin edge
    golden = bench.read_csv(GOLDEN)
    assert len(golden) == len(small_run)
    for row, s in zip(golden, small_run):
        assert (row["metric"], row["dim"], row["k"], row["seed"], row["n_pairs"]) == (s.metric, s.dim, s.k, s.seed, s.n_pairs)
        for key in ("mean", "p5", "p95"):
            assert row[key] == pytest.approx(getattr(s, key), abs=1e-12)
        assert sum(abs(a - b) for a, b in zip(row["bins"], s.bins)) <= 2


def test_schema(small_run, tmp_path):
    path = tmp_path / "out.csv"
    bench.write_csv(small_run, path)
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == bench.CSV_HEADER
    assert len(bench.CSV_HEADER) == 108
    assert [(r["dim"], r["metric"]) for r in bench.read_csv(path)] == [(d, m) for d in (2, 3) for m in bench.BENCH_METRICS]
    for s in small_run:
        assert s.k == s.dim**2 and s.seed == 7
        assert sum(s.bins) == s.n_pairs == 200
        assert s.p5 <= s.mean <= s.p95
        lo, hi = bench.metric_range(s.metric)
        assert lo <= s.p5 and s.p95 <= hi


def test_superfidelity_dominates_fidelity(small_run):
    by = {(s.dim, s.metric): s for s in small_run}
    for d in (2, 3):
        assert by[d, "superfidelity"].mean >= by[d, "fidelity"].mean


def test_write_to_stream_and_header_check(small_run, tmp_path):
    buf = stdio.StringIO()
    bench.write_csv(small_run[:1], buf)
    assert buf.getvalue() == bench.format_csv(small_run[:1])
    bad = tmp_path / "bad.csv"
    bad.write_text("metric,dim\n")
    with pytest.raises(ValueError):
        bench.read_csv(bad)


def test_nearest_rank_rule():
    values = list(range(1, 21))
    assert nearest_rank(values, 0.05) == 1
    assert nearest_rank(values, 0.95) == 19
    assert nearest_rank([3.0], 0.95) == 3.0
    with pytest.raises(ValueError):
        nearest_rank([], 0.5)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=300))
def test_sample_stats_invariants(values):
    s = SampleStats.from_sample("superfidelity", 2, 4, 0, values)
    ordered = sorted(values)
    assert sum(s.bins) == len(values)
    assert s.p5 == ordered[math.ceil(0.05 * len(values)) - 1]
    assert s.p5 <= s.p95
    # the final division may round one ulp past the extremes
    assert math.nextafter(min(values), -1) <= s.mean <= math.nextafter(max(values), 2)


def test_histogram_ranges():
    s = SampleStats.from_sample("angle_AG2", 2, 4, 0, [0.0, math.pi / 2])
    assert s.bins[0] == 1 and s.bins[-1] == 1
    s = SampleStats.from_sample("bures_BF", 2, 4, 0, [math.sqrt(2)])
    assert s.bins[-1] == 1
    assert bench.metric_range("fidelity") == (0.0, 1.0)


def test_chunk_sizes():
    assert bench.chunk_size(2) == 1000
    assert bench.chunk_size(9) == 159
    assert all(bench.chunk_size(d) >= 16 for d in range(2, 10))


def test_argument_checks():
    with pytest.raises(ValueError):
        bench.check_dims([1, 2])
    with pytest.raises(ValueError):
        bench.check_dims([10])
    with pytest.raises(ValueError):
        bench.run_bench([2], 10, k=5)
    with pytest.raises(ValueError):
        bench.sample_dimension(2, 0, 0)


def test_explicit_kraus_rank():
    (s,) = [x for x in bench.run_bench([3], 50, seed=1, k=1, workers=1) if x.metric == "fidelity"]
    assert s.k == 1
    # unitary channels have pure states, so fidelity equals superfidelity
    (g,) = [x for x in bench.run_bench([3], 50, seed=1, k=1, workers=1) if x.metric == "superfidelity"]
    assert g.mean == pytest.approx(s.mean, abs=1e-7)


def test_thread_env(monkeypatch):
    monkeypatch.setenv(bench.THREADS_ENV, "2")
    assert bench.worker_count() == 2
    for bad in ("0", "two", "-1"):
        monkeypatch.setenv(bench.THREADS_ENV, bad)
        with pytest.raises(ValueError):
            bench.worker_count()
    monkeypatch.delenv(bench.THREADS_ENV)
    assert bench.worker_count() >= 1


def test_cost_budget_mentions_every_dimension():
    text = bench.cost_budget([2, 9], 100)
    assert "d=2" in text and "d=9" in text and "81x81" in text


def test_log_stream():
    log = stdio.StringIO()
    bench.run_bench([2], 20, log=log, workers=1)
    assert "d=2 done" in log.getvalue()
