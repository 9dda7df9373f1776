from collections import Counter

import numpy as np
import pytest

from privassign.core import Instance, MatchState, Task, ValueFunctions, Worker
from privassign.harness import (ConfigError, DataError, ExperimentConfig, Outcome, RunError,
                                Totals, compute_metrics, format_rows, generate_normal,
                                generate_uniform, ingest_csv, load_batches, load_config_file,
                                make_batches, metrics_from_totals, parse_value, read_tasks,
                                read_workers, run_config, run_sweep, sweep_grid)

SMALL = ExperimentConfig(n_tasks=60, batch_size=30, seed=3, record_time=False)


def test_config_defaults_and_validation():
    cfg = ExperimentConfig()
    assert (cfg.worker_task_ratio, cfg.task_value, cfg.worker_range) == (2.0, 4.5, 1.4)
    assert cfg.eps_range == (0.5, 1.75) and cfg.budget_group_size == 7
    assert cfg.batch_size <= 1000
    assert cfg.group_size == 1000
    for bad in [dict(algo="nope"), dict(eps_range=(1.0, 0.5)), dict(eps_range=(0.0, 1.0)),
                dict(budget_group_size=0), dict(distribution="csv"), dict(alpha=0.0),
                dict(spread_mode="sd"), dict(seed=-1)]:
        with pytest.raises(ConfigError):
            ExperimentConfig(**bad)


def test_run_id_ignores_timing_flag():
    assert SMALL.run_id == SMALL.replace(record_time=True).run_id
    assert SMALL.run_id != SMALL.replace(seed=4).run_id


def test_parse_value_and_config_file(tmp_path):
    assert parse_value("eps_range", "0.5, 0.75") == (0.5, 0.75)
    assert parse_value("worker_group_size", "none") is None
    assert parse_value("record_time", "false") is False
    with pytest.raises(ConfigError):
        parse_value("bogus", "1")
    with pytest.raises(ConfigError):
        parse_value("n_tasks", "ten")
    f = tmp_path / "exp.cfg"
    f.write_text("# desk run\nalgo = pgt\nn_tasks = 40\n\neps_range = 0.5,1\n")
    assert load_config_file(f) == {"algo": "pgt", "n_tasks": 40, "eps_range": (0.5, 1.0)}
    f.write_text("algo pgt\n")
    with pytest.raises(ConfigError, match=":1:"):
        load_config_file(f)


def test_generate_uniform_counts_bounds_and_mean():
    inst = generate_uniform(ExperimentConfig(n_tasks=100, distribution="uniform"),
                            np.random.default_rng(0))
    assert (inst.m, inst.n) == (100, 200)
    pts = np.array([t.location for t in inst.tasks] + [w.location for w in inst.workers])
    assert pts.min() >= 0 and pts.max() <= 100
    assert all(t.value == 4.5 for t in inst.tasks) and all(w.radius == 1.4 for w in inst.workers)
    big = generate_uniform(ExperimentConfig(n_tasks=25000, worker_task_ratio=1, worker_range=1e-6,
                                            distribution="uniform"), np.random.default_rng(1))
    coords = np.array([t.location for t in big.tasks] + [w.location for w in big.workers]).ravel()
    assert coords.size == 10**5
    assert abs(coords.mean() - 50) < 0.5


@pytest.mark.parametrize("mode,spread,var", [("variance", 150.0, 150.0), ("sigma", 150.0, 22500.0)])
def test_generate_normal_statistics(mode, spread, var):
    cfg = ExperimentConfig(n_tasks=25000, worker_task_ratio=1, worker_range=1e-6,
                           spread_mode=mode, sigma_or_var=spread)
    inst = generate_normal(cfg, np.random.default_rng(2))
    assert (inst.m, inst.n) == (25000, 25000)
    pts = np.array([t.location for t in inst.tasks] + [w.location for w in inst.workers])
    for axis in range(2):
        col = pts[:, axis]
        assert abs(col.mean()) < 4 * np.sqrt(var / col.size)
        assert col.var() == pytest.approx(var, rel=0.05)


def _tasks(n):
    # release times deliberately out of id order
    return [Task(k, (0.0, 0.0), 1.0, float((7 * k) % n)) for k in range(n)]


def test_chunking_and_circular_groups():
    workers = [Worker(k, (0.0, 0.0), 1.0) for k in range(4)]
    batches = make_batches(_tasks(2500), workers, 1000, 2)
    assert [b.m for b in batches] == [1000, 1000, 500]
    assert [[w.id for w in b.workers] for b in batches] == [[0, 1], [2, 3], [0, 1]]
    times = [t.release_time for b in batches for t in b.tasks]
    assert times == sorted(times)


def test_batch_union_is_input_multiset():
    rng = np.random.default_rng(5)
    for size in (1, 7, 100, 333):
        tasks = _tasks(int(rng.integers(1, 400)))
        batches = make_batches(tasks, [Worker(0, (0, 0), 1.0)], size, 1)
        ids = [t.id for b in batches for t in b.tasks]
        assert Counter(ids) == Counter(t.id for t in tasks)
        assert all(b.m <= size for b in batches)
    with pytest.raises(DataError):
        make_batches([Task(1, (0, 0), 1.0), Task(1, (1, 1), 1.0)], [], 5, 1)


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_csv_ingest(tmp_path):
    t = _write(tmp_path / "t.csv", "id,release_time,x,y,value\n1,5,0,0,3\n2,1,1,1,4\n3,3,2,2,5\n")
    w = _write(tmp_path / "w.csv", "id,x,y,radius,capacity\n1,0,0,2,1\n2,1,1,2,1\n3,5,5,2,1\n")
    batches = ingest_csv(t, w, batch_size=2, group_size=2)
    assert [[x.id for x in b.tasks] for b in batches] == [[2, 3], [1]]
    assert [[x.id for x in b.workers] for b in batches] == [[1, 2], [3]]
    assert read_workers(w)[2].radius == 2.0


@pytest.mark.parametrize("body,where", [
    ("id,release_time,x,y,value\n1,0,0,0,3\n2,0,0,0\n", ":3: expected 5 columns"),
    ("id,release_time,x,y,value\n1,0,0,0,abc\n", ":2: column value"),
    ("id,release_time,x,y,value\n1,0,0,0,-2\n", ":2: column value"),
    ("id,release_time,x,y,value\n1,0,nan,0,2\n", ":2: column x"),
    ("id,x,y,value\n", ":1: expected header"),
    ("", "empty file"),
])
def test_malformed_task_rows(tmp_path, body, where):
    f = _write(tmp_path / "tasks.csv", body)
    with pytest.raises(DataError, match=where) as err:
        read_tasks(f)
    assert "tasks.csv" in str(err.value)


def test_malformed_worker_rows(tmp_path):
    f = _write(tmp_path / "w.csv", "id,x,y,radius\n1,0,0,0\n")
    with pytest.raises(DataError, match="w.csv:2: column radius"):
        read_workers(f)
    with pytest.raises(DataError):
        read_workers(tmp_path / "missing.csv")


def test_metric_examples():
    inst = Instance([Task(0, (0, 0), 7.0)], [Worker(0, (0, 0), 5.0)], {(0, 0): 2.0})
    one = Outcome(MatchState.from_pairs(1, [(0, 0)]), {0: 2.0})
    row = compute_metrics(one, one, inst, ValueFunctions())
    assert (row.u_avg, row.d_avg, row.matched) == (3.0, 2.0, 1)
    assert metrics_from_totals(Totals(3.0, 1.0, 1), Totals(4.0, 1.0, 1)).u_rd == 0.25
    assert metrics_from_totals(Totals(1.0, 2.5, 1), Totals(1.0, 2.0, 1)).d_rd == 0.25
    with pytest.raises(ValueError):
        metrics_from_totals(Totals(), Totals(1.0, 1.0, 1))
    with pytest.raises(ValueError):
        metrics_from_totals(Totals(1.0, 1.0, 1), Totals(0.0, 1.0, 1))


def test_load_batches_is_seeded():
    a = load_batches(SMALL)
    b = load_batches(SMALL)
    assert [t.location for t in a[0].tasks] == [t.location for t in b[0].tasks]
    assert len(a) == 2 and a[0].n == a[1].n == 60


def test_sweep_rows_and_determinism():
    base = ExperimentConfig(n_tasks=80, batch_size=80, worker_range=5.0, seed=1,
                            record_time=False)
    grid = sweep_grid(base, "worker_task_ratio", [1, 1.5, 2, 2.5, 3])
    rows = run_sweep(grid)
    assert len(rows) == 5
    assert [r.config.worker_task_ratio for r in rows] == [1, 1.5, 2, 2.5, 3]
    first = format_rows(rows)
    assert first == format_rows(run_sweep(grid)) == format_rows(run_sweep(grid, workers=2))
    assert first.splitlines()[0].startswith("run_id,algo,ratio")
    assert all(line.endswith(",") for line in first.splitlines()[1:])
    with pytest.raises(ConfigError):
        sweep_grid(base, "nope", [1])


def test_nonprivate_method_has_zero_deviation():
    row = run_config(SMALL.replace(algo="hungarian", worker_range=5.0))
    assert row.metrics.u_rd == 0 and row.metrics.d_rd == 0


def test_run_errors_carry_run_identity():
    cfg = ExperimentConfig(n_tasks=5, worker_range=0.001, seed=2)
    with pytest.raises(RunError) as err:
        run_config(cfg)
    assert err.value.run_id == cfg.run_id
