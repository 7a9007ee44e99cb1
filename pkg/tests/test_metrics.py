"""Edit distance, diversity estimation, experiment runs, and report emission."""

import json
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freegen.benchmarks import BENCHMARKS, canonical_serialize
from freegen.cli import main
from freegen.metrics import (
    COUNTS_HEADER,
    ExperimentSpec,
    diversity_estimate,
    emit_report,
    levenshtein,
    load_report,
    report_from_dict,
    report_json,
    report_to_dict,
    run_experiment,
)
from freegen.search import rejection_collect


def brute_levenshtein(a, b):
    if not a:
        return len(b)
    if not b:
        return len(a)
    cost = a[0] != b[0]
    return min(
        brute_levenshtein(a[1:], b) + 1,
        brute_levenshtein(a, b[1:]) + 1,
        brute_levenshtein(a[1:], b[1:]) + cost,
    )


class TestLevenshtein:
    def test_identical(self):
        assert levenshtein("abcabc", "abcabc") == 0

    def test_pure_insertions(self):
        assert levenshtein("", "abc") == 3

    def test_classic_pair(self):
        assert levenshtein("kitten", "sitting") == 3

    @settings(max_examples=150)
    @given(st.text("ab", max_size=6), st.text("ab", max_size=6))
    def test_matches_bruteforce(self, a, b):
        assert levenshtein(a, b) == brute_levenshtein(a, b)

    @settings(max_examples=100)
    @given(st.text("abc", max_size=8), st.text("abc", max_size=8))
    def test_symmetric(self, a, b):
        assert levenshtein(a, b) == levenshtein(b, a)


class TestDiversity:
    def test_two_witnesses(self):
        mean, std = diversity_estimate({"aaaa", ""})
        assert mean == 4.0 and std == 0.0

    def test_needs_two(self):
        with pytest.raises(ValueError):
            diversity_estimate({"a"})

    def test_exact_mode_matches_allpairs_bruteforce(self):
        rng = Random(8)
        witnesses = {
            "".join(rng.choice("abc") for _ in range(rng.randrange(8)))
            for _ in range(60)
        }
        items = sorted(witnesses)
        dists = [
            levenshtein(items[i], items[j])
            for i in range(len(items))
            for j in range(i + 1, len(items))
        ]
        expected_mean = sum(dists) / len(dists)
        mean, _ = diversity_estimate(witnesses, pairs=len(dists) + 1)
        assert mean == pytest.approx(expected_mean)

    def test_sampled_mode_tracks_exact_mean(self):
        rng = Random(9)
        witnesses = {
            "".join(rng.choice("abcd") for _ in range(rng.randrange(2, 14)))
            for _ in range(500)
        }
        items = sorted(witnesses)
        dists = [
            levenshtein(items[i], items[j])
            for i in range(len(items))
            for j in range(i + 1, len(items))
        ]
        exact_mean = sum(dists) / len(dists)
        exact_var = sum((d - exact_mean) ** 2 for d in dists) / (len(dists) - 1)
        mean, _ = diversity_estimate(witnesses, pairs=3000, seed=4)
        se = (exact_var / 3000) ** 0.5
        assert abs(mean - exact_mean) < 3 * se


def tiny_spec(algorithm="cgs", **overrides):
    base = dict(
        benchmark="bst",
        algorithm=algorithm,
        budget_episodes=3,
        sample_rate=8,
        depth=2,
        seed=13,
        trials=2,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


class TestRunExperiment:
    def test_zero_budget_all_zero(self):
        report = run_experiment(tiny_spec(budget_episodes=0))
        assert report.unique_valid_count == 0
        assert report.unique_valid_mean == 0.0

    def test_defaults_come_from_benchmark_table(self):
        spec = ExperimentSpec(
            benchmark="avl", algorithm="rejection", budget_episodes=1
        ).resolved()
        assert spec.sample_rate == 500 and spec.depth == 5

    def test_rejects_bad_benchmark(self):
        with pytest.raises(ValueError):
            ExperimentSpec(
                benchmark="nope", algorithm="cgs", budget_episodes=1
            ).resolved()

    def test_dedup_by_canonical_form(self):
        # Reconstruct trial 0 with the experiment's derived seed and compare
        # its canonical dedup against the reported unique count.
        bench = BENCHMARKS["bst"]
        out = rejection_collect(
            bench.build(2), "13/trial0", bench.is_valid, max_draws=2000
        )
        report = run_experiment(
            tiny_spec(algorithm="rejection", budget_episodes=2000, trials=1)
        )
        expected = len({canonical_serialize(v, 2) for v in out.values})
        assert report.unique_valid_count == expected

    def test_series_monotone_and_ends_at_total(self):
        report = run_experiment(tiny_spec(budget_episodes=5, trials=1))
        series = report.count_over_time
        assert series
        assert all(a[1] <= b[1] for a, b in zip(series, series[1:]))
        assert all(a[0] < b[0] for a, b in zip(series, series[1:]))
        assert series[-1][1] == report.unique_valid_count

    def test_aggregates_recompute_from_trials(self):
        report = run_experiment(tiny_spec(budget_episodes=4, trials=3))
        counts = [t.unique_valid_count for t in report.trials]
        mean = sum(counts) / len(counts)
        var = sum((c - mean) ** 2 for c in counts) / (len(counts) - 1)
        assert report.unique_valid_mean == pytest.approx(mean)
        assert report.unique_valid_std == pytest.approx(var**0.5)

    def test_first_trial_detail_matches_trials_list(self):
        report = run_experiment(tiny_spec(budget_episodes=4, trials=3))
        first = report.trials[0]
        assert report.unique_valid_count == first.unique_valid_count
        assert report.count_over_time == first.count_over_time
        assert report.size_histogram == first.size_histogram

    def test_histogram_counts_unique_values(self):
        report = run_experiment(tiny_spec(budget_episodes=5, trials=1))
        assert sum(report.size_histogram.values()) == report.unique_valid_count

    def test_episode_mode_reports_are_byte_identical(self):
        a = report_json(run_experiment(tiny_spec(budget_episodes=4, trials=2)))
        b = report_json(run_experiment(tiny_spec(budget_episodes=4, trials=2)))
        assert a.encode() == b.encode()

    def test_rejection_approaches_enumerated_valid_support(self):
        # With a long draw budget, rejection must find at least every valid
        # value it was overwhelmingly likely to hit, and can never exceed
        # the enumerated valid support.
        from freegen.interp import exact_value_pmf

        bench = BENCHMARKS["bst"]
        draws = 20_000
        vp = exact_value_pmf(bench.build(2))
        valid = {v: float(p) for v, p in vp.items() if bench.is_valid(v)}
        report = run_experiment(
            tiny_spec(algorithm="rejection", budget_episodes=draws, trials=1)
        )
        assert report.unique_valid_count <= len(valid)
        certain = sum(1 for p in valid.values() if draws * p >= 30)
        assert report.unique_valid_count >= certain


class TestEmission:
    def test_json_roundtrip(self, tmp_path):
        report = run_experiment(tiny_spec(budget_episodes=4, trials=2))
        path = tmp_path / "report.json"
        emit_report(report, "json", str(path))
        assert load_report(str(path)) == report

    def test_dict_roundtrip(self):
        report = run_experiment(tiny_spec(budget_episodes=3, trials=1))
        assert report_from_dict(json.loads(json.dumps(report_to_dict(report)))) == report

    def test_zero_report_is_valid_json(self, tmp_path):
        report = run_experiment(tiny_spec(budget_episodes=0, trials=1))
        path = tmp_path / "zero.json"
        emit_report(report, "json", str(path))
        doc = json.loads(path.read_text())
        assert doc["unique_valid_count"] == 0
        assert doc["aggregate"]["unique_valid_mean"] == 0.0

    def test_csv_files_and_headers(self, tmp_path):
        report = run_experiment(tiny_spec(budget_episodes=4, trials=1))
        stem = tmp_path / "out"
        emit_report(report, "csv", str(stem))
        counts = (tmp_path / "out_counts.csv").read_text().splitlines()
        assert counts[0] == ",".join(COUNTS_HEADER)
        assert counts[0] == "elapsed_ms,unique_count"
        sizes = (tmp_path / "out_sizes.csv").read_text().splitlines()
        assert sizes[0] == "size,count"
        summary = (tmp_path / "out_summary.csv").read_text().splitlines()
        assert summary[0].startswith("benchmark,algorithm,")

    def test_csv_is_byte_stable(self, tmp_path):
        report = run_experiment(tiny_spec(budget_episodes=4, trials=1))
        emit_report(report, "csv", str(tmp_path / "a"))
        emit_report(report, "csv", str(tmp_path / "b"))
        for suffix in ("counts", "sizes", "summary"):
            assert (tmp_path / f"a_{suffix}.csv").read_bytes() == (
                tmp_path / f"b_{suffix}.csv"
            ).read_bytes()

    def test_unwritable_path_reports_context(self, tmp_path):
        report = run_experiment(tiny_spec(budget_episodes=1, trials=1))
        bad = tmp_path / "missing-dir" / "x.json"
        with pytest.raises(OSError, match="missing-dir"):
            emit_report(report, "json", str(bad))


class TestCli:
    def run(self, *argv):
        return main(list(argv))

    def test_bench_writes_json(self, tmp_path):
        out = tmp_path / "r.json"
        code = self.run(
            "bench",
            "--benchmark", "bst",
            "--algorithm", "cgs",
            "--budget-episodes", "2",
            "--sample-rate", "5",
            "--depth", "2",
            "--seed", "7",
            "--trials", "1",
            "--format", "json",
            "--out", str(out),
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["benchmark"] == "bst" and doc["algorithm"] == "cgs"

    def test_bench_stdout_by_default(self, capsys):
        code = self.run(
            "bench",
            "--benchmark", "sorted",
            "--algorithm", "rejection",
            "--budget-episodes", "50",
            "--depth", "3",
            "--trials", "1",
        )
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["benchmark"] == "sorted"

    def test_env_seed_overrides_flag(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FREEGEN_SEED", "99")
        out = tmp_path / "r.json"
        self.run(
            "bench",
            "--benchmark", "bst",
            "--algorithm", "rejection",
            "--budget-episodes", "10",
            "--depth", "1",
            "--seed", "7",
            "--trials", "1",
            "--out", str(out),
        )
        assert json.loads(out.read_text())["seed"] == 99

    def test_csv_without_out_fails(self, capsys):
        code = self.run(
            "bench",
            "--benchmark", "bst",
            "--algorithm", "cgs",
            "--budget-episodes", "1",
            "--depth", "1",
            "--format", "csv",
        )
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_demo_runs(self, capsys):
        assert self.run("demo") == 0
        out = capsys.readouterr().out
        assert "(select" in out and "after 'n'" in out
