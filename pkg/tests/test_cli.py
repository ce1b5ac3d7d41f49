import csv
import json

import numpy as np
import pytest

import prefkit as pk
from prefkit.cli import main

from conftest import CATALOG_PATH


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def run_synth(tmp_path, name="synth", **overrides):
    out = tmp_path / name
    flags = {"--n-users": "60", "--n-kits": "4", "--noise-swaps": "1", "--seed": "7"}
    flags.update({k: str(v) for k, v in overrides.items()})
    argv = ["synth", "--catalog", str(CATALOG_PATH), "--out", str(out)]
    for key, value in flags.items():
        argv += [key, value]
    assert main(argv) == 0
    return out


class TestSynth:
    def test_writes_valid_population(self, tmp_path, catalog20, constraint):
        out = run_synth(tmp_path)
        prefs = pk.load_preferences(out / "preferences.csv", catalog20)
        assert prefs.n == 60
        assert pk.validate_constraint(prefs, catalog20, constraint) == []
        user_ids, planted = pk.load_ground_truth(out / "ground_truth.csv")
        assert user_ids == prefs.user_ids
        kits = json.loads((out / "planted_kits.json").read_text())
        assert set(kits) == {"0", "1", "2", "3"}
        assert (planted < 4).all()

    def test_no_noise_rows_duplicate_planted_kits(self, tmp_path, catalog20):
        out = run_synth(tmp_path, **{"--noise-swaps": 0})
        prefs = pk.load_preferences(out / "preferences.csv", catalog20)
        _, planted = pk.load_ground_truth(out / "ground_truth.csv")
        kits = json.loads((out / "planted_kits.json").read_text())
        for i in range(prefs.n):
            expected = sorted(kits[str(planted[i])])
            assert sorted(np.flatnonzero(prefs.data[i]).tolist()) == expected

    def test_same_flags_byte_identical(self, tmp_path):
        a = run_synth(tmp_path, "a")
        b = run_synth(tmp_path, "b")
        for name in ("preferences.csv", "ground_truth.csv", "planted_kits.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_default_flags_give_valid_200_row_survey(self, tmp_path, catalog20, constraint):
        out = tmp_path / "defaults"
        assert main(["synth", "--catalog", str(CATALOG_PATH), "--out", str(out), "--seed", "7"]) == 0
        prefs = pk.load_preferences(out / "preferences.csv", catalog20)
        assert prefs.n == 200
        assert pk.validate_constraint(prefs, catalog20, constraint) == []


class TestValidate:
    def test_clean_file_exits_zero(self, tmp_path):
        out = run_synth(tmp_path)
        report_dir = tmp_path / "report"
        code = main([
            "validate", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(report_dir),
        ])
        assert code == 0
        assert read_csv(report_dir / "violations.csv") == [
            ["row", "user_id", "expensive_count", "cheap_count"]
        ]

    def _dirty_file(self, tmp_path, catalog20):
        out = run_synth(tmp_path)
        prefs = pk.load_preferences(out / "preferences.csv", catalog20)
        data = prefs.data.copy()
        data[0] = 0
        data[0, :7] = 1  # 7 expensive, 0 cheap
        dirty = pk.PreferenceMatrix(prefs.user_ids, data, prefs.column_labels)
        path = tmp_path / "dirty.csv"
        pk.write_preferences(dirty, path)
        return path

    def test_strict_mode_exits_one_and_reports(self, tmp_path, catalog20):
        path = self._dirty_file(tmp_path, catalog20)
        report_dir = tmp_path / "report"
        code = main([
            "validate", "--catalog", str(CATALOG_PATH), "--prefs", str(path),
            "--out", str(report_dir), "--strict",
        ])
        assert code == 1
        rows = read_csv(report_dir / "violations.csv")
        assert rows[1] == ["0", "u0000", "7", "0"]

    def test_non_strict_mode_exits_zero_but_reports(self, tmp_path, catalog20):
        path = self._dirty_file(tmp_path, catalog20)
        report_dir = tmp_path / "report"
        code = main([
            "validate", "--catalog", str(CATALOG_PATH), "--prefs", str(path),
            "--out", str(report_dir), "--force",
        ])
        assert code == 0
        assert len(read_csv(report_dir / "violations.csv")) == 2


class TestKmeansSweep:
    def test_default_range_emits_table_1_layout(self, tmp_path):
        out = run_synth(tmp_path, **{"--n-users": 120})
        sweep_dir = tmp_path / "sweep"
        code = main([
            "kmeans-sweep", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(sweep_dir),
            "--seed", "3",
        ])
        assert code == 0
        table = read_csv(sweep_dir / "sweep_table.csv")
        assert table[0] == ["k", "trial_1", "trial_2", "trial_3"]
        assert [row[0] for row in table[1:]] == [str(k) for k in range(4, 16)]
        assert len(table) == 13
        points = read_csv(sweep_dir / "sweep_points.csv")
        assert points[0] == ["k", "trial", "silhouette"]
        assert len(points) == 1 + 12 * 3
        for row in points[1:]:
            assert -1.0 <= float(row[2]) <= 1.0

    def test_small_k_needs_explicit_override(self, tmp_path):
        out = run_synth(tmp_path)
        code = main([
            "kmeans-sweep", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(tmp_path / "s1"),
            "--k-min", "2", "--k-max", "3",
        ])
        assert code == 2
        code = main([
            "kmeans-sweep", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(tmp_path / "s2"),
            "--k-min", "2", "--k-max", "3", "--allow-small-k",
        ])
        assert code == 0

    def test_fifty_kit_stress_run_emits_47_point_rows(self, tmp_path):
        out = run_synth(tmp_path)
        sweep_dir = tmp_path / "stress"
        code = main([
            "kmeans-sweep", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(sweep_dir),
            "--k-min", "4", "--k-max", "50", "--trials", "1", "--seed", "5",
        ])
        assert code == 0
        points = read_csv(sweep_dir / "sweep_points.csv")
        assert len(points) == 1 + 47
        table = read_csv(sweep_dir / "sweep_table.csv")
        assert [row[0] for row in table[1:]] == [str(k) for k in range(4, 51)]

    def test_k_max_above_population_is_usage_error(self, tmp_path):
        out = run_synth(tmp_path, **{"--n-users": 10})
        code = main([
            "kmeans-sweep", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(tmp_path / "s"),
            "--k-min", "4", "--k-max", "11",
        ])
        assert code == 2


class TestSvdAndSigns:
    def test_scree_has_one_row_per_sigma(self, tmp_path):
        out = run_synth(tmp_path)
        svd_dir = tmp_path / "svd"
        assert main([
            "svd", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(svd_dir),
        ]) == 0
        rows = read_csv(svd_dir / "scree.csv")
        assert rows[0] == ["rank", "sigma"]
        assert len(rows) == 21
        sigmas = [float(r[1]) for r in rows[1:]]
        assert all(a >= b - 1e-12 for a, b in zip(sigmas, sigmas[1:]))

    def test_cluster_signs_counts_and_membership(self, tmp_path):
        out = run_synth(tmp_path)
        signs_dir = tmp_path / "signs"
        assert main([
            "cluster-signs", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(signs_dir),
            "--rank", "4",
        ]) == 0
        counts = read_csv(signs_dir / "user_cluster_counts.csv")
        assert counts[0] == ["r", "count"]
        values = [int(r[1]) for r in counts[1:]]
        assert values[0] == 1
        assert all(a <= b for a, b in zip(values, values[1:]))
        assert all(v <= 2 ** (r - 1) for r, v in enumerate(values[1:], start=2))
        membership = read_csv(signs_dir / "user_membership.csv")
        assert membership[0] == ["element_id", "cluster_id", "pattern_bits"]
        assert len(membership) == 61
        assert all(len(row[2]) == 4 for row in membership[1:])
        items = read_csv(signs_dir / "item_membership.csv")
        assert len(items) == 21

    def test_rank_beyond_p_is_usage_error(self, tmp_path):
        out = run_synth(tmp_path)
        assert main([
            "cluster-signs", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(tmp_path / "x"),
            "--rank", "21",
        ]) == 2


class TestDesignAndReassign:
    def test_kits_have_exact_size(self, tmp_path):
        out = run_synth(tmp_path)
        kits_dir = tmp_path / "kits"
        assert main([
            "design-kits", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(kits_dir),
            "--rank", "4",
        ]) == 0
        kits = json.loads((kits_dir / "kits.json").read_text())
        assert 1 <= len(kits) <= 8
        for items in kits.values():
            assert len(items) == 10
        rows = read_csv(kits_dir / "kits.csv")
        assert rows[0] == ["kit_id", "item_id"]
        assert len(rows) == 1 + 10 * len(kits)

    def test_constrained_kits_respect_quotas(self, tmp_path, catalog20, constraint):
        out = run_synth(tmp_path)
        kits_dir = tmp_path / "kits"
        assert main([
            "design-kits", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(kits_dir),
            "--rank", "4", "--constrained-kits",
        ]) == 0
        kits = json.loads((kits_dir / "kits.json").read_text())
        expensive = set(catalog20.ids_in(pk.Category.EXPENSIVE))
        for items in kits.values():
            assert sum(1 for q in items if q in expensive) == constraint.expensive_quota

    def test_reassign_reduces_total_loss(self, tmp_path):
        out = run_synth(tmp_path, **{"--n-users": 120})
        loss_dir = tmp_path / "loss"
        assert main([
            "reassign", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(loss_dir),
            "--rank", "4",
        ]) == 0
        users = read_csv(loss_dir / "loss_users.csv")
        assert users[0] == ["user_id", "kit_before", "kit_after", "loss_before", "loss_after"]
        before = sum(int(r[3]) for r in users[1:])
        after = sum(int(r[4]) for r in users[1:])
        assert after <= before
        assert all(int(r[4]) <= int(r[3]) for r in users[1:])
        clusters = read_csv(loss_dir / "loss_clusters.csv")
        assert clusters[0] == ["kit_id", "population", "normal_loss", "exponential_loss", "phase"]
        phases = {row[4] for row in clusters[1:]}
        assert phases == {"before", "after"}


class TestPipeline:
    def test_rank_four_yields_at_most_eight_kits(self, tmp_path):
        out = run_synth(tmp_path, **{"--n-users": 150, "--n-kits": 8})
        pipe_dir = tmp_path / "pipe"
        assert main([
            "pipeline", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(pipe_dir),
            "--rank", "4",
        ]) == 0
        kits = json.loads((pipe_dir / "kits.json").read_text())
        assert len(kits) <= 8
        for name in (
            "scree.csv", "user_cluster_counts.csv", "user_membership.csv",
            "kits.csv", "loss_clusters.csv", "loss_users.csv",
        ):
            assert (pipe_dir / name).exists()

    def test_rank_one_gives_single_global_kit(self, tmp_path, catalog20, constraint):
        out = run_synth(tmp_path)
        pipe_dir = tmp_path / "pipe"
        assert main([
            "pipeline", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(pipe_dir),
            "--rank", "1",
        ]) == 0
        kits = json.loads((pipe_dir / "kits.json").read_text())
        assert list(kits) == ["0"]
        prefs = pk.load_preferences(out / "preferences.csv", catalog20)
        expected = pk.top_items(prefs.data.sum(axis=0), constraint.total)
        assert kits["0"] == expected

    def test_noise_free_planted_population_recovers_zero_loss(self, tmp_path):
        out = run_synth(tmp_path, **{"--noise-swaps": 0, "--n-users": 80, "--n-kits": 8})
        pipe_dir = tmp_path / "pipe"
        assert main([
            "pipeline", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(pipe_dir),
            "--rank", "4",
        ]) == 0
        users = read_csv(pipe_dir / "loss_users.csv")
        planted = json.loads((out / "planted_kits.json").read_text())
        designed = {tuple(items) for items in json.loads((pipe_dir / "kits.json").read_text()).values()}
        _, truth = pk.load_ground_truth(out / "ground_truth.csv")
        total_before = sum(int(r[3]) for r in users[1:])
        total_after = sum(int(r[4]) for r in users[1:])
        assert total_after <= total_before
        for row, g in zip(users[1:], truth):
            if tuple(planted[str(g)]) in designed:
                assert int(row[4]) == 0

    def test_strict_pipeline_aborts_on_dirty_rows(self, tmp_path, catalog20):
        out = run_synth(tmp_path)
        prefs = pk.load_preferences(out / "preferences.csv", catalog20)
        data = prefs.data.copy()
        data[0, :] = 1
        dirty = pk.PreferenceMatrix(prefs.user_ids, data, prefs.column_labels)
        path = tmp_path / "dirty.csv"
        pk.write_preferences(dirty, path)
        assert main([
            "pipeline", "--catalog", str(CATALOG_PATH), "--prefs", str(path),
            "--out", str(tmp_path / "pipe"), "--strict",
        ]) == 1


class TestCliContract:
    def test_missing_input_is_io_error(self, tmp_path):
        assert main([
            "svd", "--catalog", str(CATALOG_PATH),
            "--prefs", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o"),
        ]) == 3

    def test_existing_output_needs_force(self, tmp_path):
        out = run_synth(tmp_path)
        again = [
            "synth", "--catalog", str(CATALOG_PATH), "--out", str(out),
            "--n-users", "60", "--n-kits", "4", "--noise-swaps", "1", "--seed", "7",
        ]
        assert main(again) == 3
        assert main(again + ["--force"]) == 0

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_inputs_are_not_mutated(self, tmp_path):
        out = run_synth(tmp_path)
        before = (out / "preferences.csv").read_bytes()
        assert main([
            "pipeline", "--catalog", str(CATALOG_PATH),
            "--prefs", str(out / "preferences.csv"), "--out", str(tmp_path / "pipe"),
            "--rank", "4",
        ]) == 0
        assert (out / "preferences.csv").read_bytes() == before
        assert CATALOG_PATH.read_bytes().startswith(b"item_id,name,category")
