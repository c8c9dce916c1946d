"""End-to-end checks of the command line against direct library calls."""

import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from click.testing import CliRunner

import cases
from topodiv import (
    DatasetSpec,
    PointCloud,
    generate,
    load_csv,
    pairwise_distances,
    rtd,
    rtd_subgradient,
    save_csv,
)
from topodiv.cli import main
from topodiv.persistence import build_filtration, compute_barcode, format_barcode_csv

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, [str(a) for a in args])


def write_cloud(points, path):
    save_csv(PointCloud(np.asarray(points, dtype=float)), path)
    return path


def svg_elements(path, tag):
    return ET.parse(path).getroot().iter(f"{SVG}{tag}")


class TestBarcode:
    def test_unit_square_dim1_row(self, runner, tmp_path):
        src = write_cloud(cases.square_cloud().points, tmp_path / "sq.csv")
        out = tmp_path / "bars.csv"
        result = invoke(runner, "barcode", src, out, "--dim", "1")
        assert result.exit_code == 0
        assert out.read_text() == "dim,birth,death\n1,1,1.4142135623730951\n"

    def test_single_point_infinite_component(self, runner, tmp_path):
        src = write_cloud([[0.0, 0.0]], tmp_path / "pt.csv")
        out = tmp_path / "bars.csv"
        assert invoke(runner, "barcode", src, out).exit_code == 0
        assert out.read_text() == "dim,birth,death\n0,0,inf\n"

    def test_default_covers_both_dimensions(self, runner, tmp_path):
        src = write_cloud(cases.square_cloud().points, tmp_path / "sq.csv")
        out = tmp_path / "bars.csv"
        assert invoke(runner, "barcode", src, out).exit_code == 0
        dims = {line.split(",")[0] for line in out.read_text().splitlines()[1:]}
        assert dims == {"0", "1"}

    def test_matches_library_output(self, runner, tmp_path):
        cloud = PointCloud(np.random.default_rng(11).uniform(size=(12, 3)))
        src = write_cloud(cloud.points, tmp_path / "c.csv")
        out = tmp_path / "bars.csv"
        assert invoke(runner, "barcode", src, out).exit_code == 0
        filtration = build_filtration(pairwise_distances(cloud), max_dim=2)
        expected = format_barcode_csv(compute_barcode(filtration, dims=(0, 1)))
        assert out.read_text() == expected

    def test_max_value_severs_all_edges(self, runner, tmp_path):
        src = write_cloud(cases.square_cloud().points, tmp_path / "sq.csv")
        out = tmp_path / "bars.csv"
        result = invoke(runner, "barcode", src, out, "--max-value", "0.5")
        assert result.exit_code == 0
        rows = out.read_text().splitlines()[1:]
        assert rows == ["0,0,inf"] * 4

    def test_negative_dimension_rejected(self, runner, tmp_path):
        src = write_cloud([[0.0, 0.0]], tmp_path / "pt.csv")
        result = invoke(runner, "barcode", src, tmp_path / "o.csv", "--dim", "-1")
        assert result.exit_code == 1
        assert "nonnegative" in result.stderr


class TestRtd:
    def test_identical_clouds_print_zero(self, runner, tmp_path):
        src = write_cloud(cases.square_cloud().points, tmp_path / "sq.csv")
        result = invoke(runner, "rtd", src, src)
        assert result.exit_code == 0
        assert result.output == "0.0\n"

    def test_square_vs_chain_positive_but_invisible_to_trees(self, runner, tmp_path):
        sq = write_cloud(cases.square_cloud().points, tmp_path / "sq.csv")
        ch = write_cloud(cases.chain_cloud().points, tmp_path / "ch.csv")
        divergence = invoke(runner, "rtd", sq, ch)
        baseline = invoke(runner, "rtd", sq, ch, "--topoae")
        assert divergence.exit_code == 0 and baseline.exit_code == 0
        assert float(divergence.output) > 0
        assert float(baseline.output) == 0.0

    def test_matches_library_value(self, runner, tmp_path):
        rng = np.random.default_rng(23)
        a = PointCloud(rng.uniform(size=(10, 2)))
        b = PointCloud(rng.uniform(size=(10, 2)))
        pa = write_cloud(a.points, tmp_path / "a.csv")
        pb = write_cloud(b.points, tmp_path / "b.csv")
        for variant in ("min", "max"):
            result = invoke(runner, "rtd", pa, pb, "--variant", variant)
            assert result.exit_code == 0
            assert float(result.output) == rtd(a, b, variant=variant)

    def test_grad_writes_first_cloud_subgradient(self, runner, tmp_path):
        rng = np.random.default_rng(31)
        a = PointCloud(rng.uniform(size=(8, 2)))
        b = PointCloud(rng.uniform(size=(8, 2)))
        pa = write_cloud(a.points, tmp_path / "a.csv")
        pb = write_cloud(b.points, tmp_path / "b.csv")
        gpath = tmp_path / "grad.csv"
        result = invoke(runner, "rtd", pa, pb, "--grad", gpath)
        assert result.exit_code == 0
        value, field = rtd_subgradient(a, b)
        assert float(result.output) == value
        written = np.loadtxt(gpath, delimiter=",")
        assert np.array_equal(written, field.d_x)


class TestGen:
    def test_circle_default_size_on_unit_circle(self, runner, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"name": "circle", "seed": 4}))
        out = tmp_path / "c.csv"
        assert invoke(runner, "gen", spec, out).exit_code == 0
        cloud = load_csv(out)
        assert cloud.n == 100 and cloud.dim == 2
        assert np.all(np.abs(np.linalg.norm(cloud.points, axis=1) - 1.0) <= 1e-12)

    def test_flags_override_spec_fields(self, runner, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"name": "circle", "size": 50, "seed": 4}))
        out = tmp_path / "c.csv"
        assert invoke(runner, "gen", spec, out, "--size", "16", "--seed", "9").exit_code == 0
        assert load_csv(out).points.shape == (16, 2)
        expected = generate(DatasetSpec(name="circle", size=16, seed=9))
        assert np.array_equal(load_csv(out).points, expected.points)

    def test_rerun_is_byte_identical_except_manifest_timestamp(self, runner, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"name": "random", "size": 20, "seed": 1}))
        out = tmp_path / "r.csv"
        manifest = tmp_path / "r.csv.manifest.json"
        assert invoke(runner, "gen", spec, out).exit_code == 0
        first_csv = out.read_bytes()
        first_doc = json.loads(manifest.read_text())
        assert invoke(runner, "gen", spec, out).exit_code == 0
        second_doc = json.loads(manifest.read_text())
        assert out.read_bytes() == first_csv
        first_doc.pop("created")
        second_doc.pop("created")
        assert first_doc == second_doc

    def test_manifest_records_run_provenance(self, runner, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"name": "circle", "size": 8, "seed": 6}))
        out = tmp_path / "c.csv"
        assert invoke(runner, "gen", spec, out).exit_code == 0
        doc = json.loads((tmp_path / "c.csv.manifest.json").read_text())
        assert doc["command"] == "gen"
        assert doc["seed"] == 6
        assert len(doc["config_hash"]) == 64
        assert set(doc["versions"]) == {"python", "numpy", "topodiv"}


class TestTrainReduceEval:
    @pytest.fixture
    def train_config(self, tmp_path):
        config = {
            "dataset": {"name": "circle", "size": 30, "seed": 1},
            "train": {
                "batch_size": 15,
                "learning_rate": 1e-3,
                "epochs_total": 4,
                "rtd_start_epoch": 2,
                "rtd_weight": 1.0,
                "seed": 0,
                "hidden_dim": 4,
                "n_layers": 1,
                "latent_dim": 2,
                "optimizer": "adam",
            },
            "out_dir": str(tmp_path / "run"),
        }
        path = tmp_path / "train.json"
        path.write_text(json.dumps(config))
        return path

    def test_train_writes_checkpoint_history_manifest(self, runner, tmp_path, train_config):
        assert invoke(runner, "train", train_config).exit_code == 0
        run = tmp_path / "run"
        assert (run / "checkpoint.json").exists()
        lines = (run / "history.csv").read_text().splitlines()
        assert lines[0] == "epoch,reconstruction,divergence,skipped"
        assert len(lines) == 5
        assert json.loads((run / "manifest.json").read_text())["command"] == "train"

    def test_seed_flag_overrides_config(self, runner, tmp_path, train_config):
        assert invoke(runner, "train", train_config, "--seed", "7").exit_code == 0
        doc = json.loads((tmp_path / "run" / "manifest.json").read_text())
        assert doc["seed"] == 7

    def test_reduce_matches_library_encoder(self, runner, tmp_path, train_config):
        from topodiv import forward, load_checkpoint

        assert invoke(runner, "train", train_config, "--epochs", "2").exit_code == 0
        checkpoint = tmp_path / "run" / "checkpoint.json"
        src = write_cloud(generate(DatasetSpec("circle", size=9, seed=2)).points, tmp_path / "in.csv")
        out = tmp_path / "latent.csv"
        assert invoke(runner, "reduce", checkpoint, src, out).exit_code == 0
        params, _ = load_checkpoint(checkpoint)
        latent, _ = forward(params, load_csv(src))
        assert np.array_equal(load_csv(out).points, latent.points)

    def test_reduce_rejects_width_mismatch(self, runner, tmp_path, train_config):
        assert invoke(runner, "train", train_config, "--epochs", "2").exit_code == 0
        src = write_cloud(np.zeros((4, 3)) + np.arange(12).reshape(4, 3), tmp_path / "bad.csv")
        result = invoke(runner, "reduce", tmp_path / "run" / "checkpoint.json", src, tmp_path / "o.csv")
        assert result.exit_code == 1

    def test_eval_identical_clouds_score_perfectly(self, runner, tmp_path):
        src = write_cloud(generate(DatasetSpec("circle", size=16, seed=3)).points, tmp_path / "x.csv")
        report = tmp_path / "report.json"
        result = invoke(runner, "eval", src, src, report, "--triplets", "400")
        assert result.exit_code == 0
        doc = json.loads(report.read_text())
        assert doc["linear_correlation"] > 0.999999
        assert doc["triplet_accuracy"] == 1.0
        assert doc["wd_h0"] == 0.0
        assert doc["rtd_metric"] == 0.0
        assert doc["wd_h1"] is None
        assert (tmp_path / "report.json.manifest.json").exists()

    def test_eval_h1_flag_fills_degree_one_distance(self, runner, tmp_path):
        src = write_cloud(generate(DatasetSpec("circle", size=16, seed=3)).points, tmp_path / "x.csv")
        report = tmp_path / "report.json"
        assert invoke(runner, "eval", src, src, report, "--triplets", "100", "--h1").exit_code == 0
        assert json.loads(report.read_text())["wd_h1"] == 0.0


class TestMorph:
    @pytest.fixture
    def morph_config(self, tmp_path):
        config = {
            "source": {"name": "random", "size": 10, "seed": 5},
            "target": {"name": "circle", "size": 10, "seed": 6},
            "optimizer": {"steps": 2, "schedule": [[0, 0.1]]},
            "out_dir": str(tmp_path / "morphed"),
        }
        path = tmp_path / "morph.json"
        path.write_text(json.dumps(config))
        return path

    def test_writes_final_cloud_and_trace(self, runner, tmp_path, morph_config):
        assert invoke(runner, "morph", morph_config).exit_code == 0
        out = tmp_path / "morphed"
        assert load_csv(out / "final.csv").points.shape == (10, 2)
        lines = (out / "trace.csv").read_text().splitlines()
        assert lines[0] == "step,rtd"
        steps = [int(line.split(",")[0]) for line in lines[1:]]
        assert steps == [0, 1, 2]
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(np.isfinite(values))
        assert json.loads((out / "manifest.json").read_text())["command"] == "morph"

    def test_steps_flag_overrides_config(self, runner, tmp_path, morph_config):
        assert invoke(runner, "morph", morph_config, "--steps", "1").exit_code == 0
        lines = (tmp_path / "morphed" / "trace.csv").read_text().splitlines()
        assert [line.split(",")[0] for line in lines[1:]] == ["0", "1"]


class TestPlot:
    def test_scatter_has_one_marker_per_row(self, runner, tmp_path):
        src = write_cloud(generate(DatasetSpec("circle", size=12, seed=0)).points, tmp_path / "c.csv")
        out = tmp_path / "c.svg"
        assert invoke(runner, "plot", src, out).exit_code == 0
        markers = [e for e in svg_elements(out, "circle") if e.get("class") == "pt"]
        assert len(markers) == 12

    def test_barcode_header_is_sniffed(self, runner, tmp_path):
        src = write_cloud(cases.square_cloud().points, tmp_path / "sq.csv")
        bars = tmp_path / "bars.csv"
        assert invoke(runner, "barcode", src, bars).exit_code == 0
        out = tmp_path / "bars.svg"
        assert invoke(runner, "plot", bars, out).exit_code == 0
        n_rows = len(bars.read_text().splitlines()) - 1
        segments = [e for e in svg_elements(out, "line") if e.get("class") == "bar"]
        assert len(segments) == n_rows

    def test_empty_barcode_still_renders(self, runner, tmp_path):
        bars = tmp_path / "bars.csv"
        bars.write_text("dim,birth,death\n")
        out = tmp_path / "bars.svg"
        assert invoke(runner, "plot", bars, out).exit_code == 0
        assert not [e for e in svg_elements(out, "line") if e.get("class") == "bar"]

    def test_forcing_barcode_on_cloud_fails_cleanly(self, runner, tmp_path):
        src = write_cloud(cases.square_cloud().points, tmp_path / "sq.csv")
        result = invoke(runner, "plot", src, tmp_path / "o.svg", "--kind", "barcode")
        assert result.exit_code == 1


class TestExitCodes:
    def test_missing_input_is_usage_error(self, runner, tmp_path):
        result = invoke(runner, "rtd", tmp_path / "nope.csv", tmp_path / "nope.csv")
        assert result.exit_code == 2

    def test_unknown_command_is_usage_error(self, runner):
        assert invoke(runner, "frobnicate").exit_code == 2

    def test_malformed_csv_is_domain_error(self, runner, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,mystery\n")
        result = invoke(runner, "barcode", bad, tmp_path / "o.csv")
        assert result.exit_code == 1
        assert "bad.csv" in result.stderr

    def test_broken_json_is_domain_error(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{oops")
        result = invoke(runner, "train", cfg)
        assert result.exit_code == 1
        assert "not valid JSON" in result.stderr

    def test_unknown_config_key_names_the_section(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "dataset": {"name": "circle", "size": 10},
            "train": {"learning_rate_typo": 0.1},
            "out_dir": str(tmp_path / "run"),
        }))
        result = invoke(runner, "train", cfg)
        assert result.exit_code == 1
        assert "train" in result.stderr

    def test_missing_out_dir_is_reported(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"dataset": {"name": "circle", "size": 10}, "train": {}}))
        result = invoke(runner, "train", cfg)
        assert result.exit_code == 1
        assert "out_dir" in result.stderr
