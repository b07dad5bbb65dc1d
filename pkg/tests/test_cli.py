import csv
import json
import logging

import numpy as np
import pytest

from backend.app.dataset.records import SampleRecord
from backend.app.dataset.storage import new_manifest, read_dataset, read_field, write_dataset, write_fields
from backend.app.main import main
from backend.app.schemas import DATASET_CHANNELS, SampleMeta

MBB = """
nelx = 12
nely = 4
template = "mbb"
loads = [[0, 0, 0.0, -1.0]]
max_iters = {iters}
"""


def _config(tmp_path, iters=60):
    path = tmp_path / "mbb.toml"
    path.write_text(MBB.format(iters=iters))
    return path


def _generate(tmp_path, name="ds", n=2, *extra):
    out = tmp_path / name
    code = main(["generate", "--n", str(n), "--res", "4x8", "--seed", "7", "--max-iters", "5", "--out", str(out), *extra])
    assert code == 0
    return out


def _binary_dataset(path, rng, n=4, shape=(8, 12)):
    samples = [
        SampleRecord(
            channels=np.zeros((len(DATASET_CHANNELS), *shape)),
            meta=SampleMeta(index=i, bc_template_id="a", n_forces=1),
            target=(rng.random(shape) > 0.5).astype(float),
        )
        for i in range(n)
    ]
    write_dataset(samples, new_manifest(shape, DATASET_CHANNELS), path)
    return [s.target for s in samples]


def _column(path, name):
    with open(path, newline="") as fh:
        return [float(r[name]) for r in csv.DictReader(fh)]


def test_solve_writes_outputs(tmp_path):
    out = tmp_path / "run"
    code = main(["solve", "--config", str(_config(tmp_path)), "--out", str(out), "--png"])
    assert code in (0, 2)
    density = read_field(out / "density")
    assert density.shape == (4, 12)
    assert (out / "density.png").exists()
    with open(out / "history.csv", newline="") as fh:
        assert next(csv.reader(fh)) == ["iteration", "compliance"]
    record = json.loads((out / "run.json").read_text())
    assert record["command"] == "solve"
    assert record["exit_code"] == code
    assert record["config"]["template"] == "mbb"


def test_solve_iteration_cap_exits_two(tmp_path):
    out = tmp_path / "run"
    assert main(["solve", "--config", str(_config(tmp_path, iters=1)), "--out", str(out)]) == 2
    assert (out / "density" / "samples" / "000000.bin").exists()


def test_solve_is_reproducible(tmp_path):
    config = _config(tmp_path, iters=10)
    for name in ("a", "b"):
        main(["solve", "--config", str(config), "--out", str(tmp_path / name)])
    rel = "density/samples/000000.bin"
    assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()


def test_cli_flags_override_config(tmp_path):
    out = tmp_path / "run"
    main(["solve", "--config", str(_config(tmp_path, iters=60)), "--max-iters", "2", "--out", str(out)])
    assert json.loads((out / "run.json").read_text())["config"]["max_iters"] == 2


def test_res_flag_overrides_config_grid(tmp_path):
    out = tmp_path / "run"
    main(["solve", "--config", str(_config(tmp_path)), "--res", "6x18", "--max-iters", "2", "--out", str(out)])
    assert read_field(out / "density").shape == (6, 18)
    config = json.loads((out / "run.json").read_text())["config"]
    assert config["resolution"] == [6, 18]
    assert config["nelx"] is None and config["nely"] is None


def test_generate_and_solve_resolve_the_grid_alike(tmp_path):
    path = tmp_path / "grid.toml"
    path.write_text("nelx = 8\nnely = 4\n")
    base = ["generate", "--config", str(path), "--n", "1", "--max-iters", "2"]

    assert main([*base, "--out", str(tmp_path / "file")]) == 0
    assert json.loads((tmp_path / "file" / "manifest.json").read_text())["resolution"] == [4, 8]

    assert main([*base, "--res", "6x10", "--out", str(tmp_path / "flag")]) == 0
    assert json.loads((tmp_path / "flag" / "manifest.json").read_text())["resolution"] == [6, 10]


def test_malformed_config_names_the_field(tmp_path, caplog):
    path = tmp_path / "bad.toml"
    path.write_text('nelx = 12\nnely = 4\nvolfrak = 0.4\n')
    assert main(["solve", "--config", str(path), "--out", str(tmp_path / "run")]) == 1
    assert "volfrak" in caplog.text


def test_solve_without_loads_fails(tmp_path):
    path = tmp_path / "noload.toml"
    path.write_text('nelx = 6\nnely = 3\n')
    assert main(["solve", "--config", str(path), "--out", str(tmp_path / "run")]) == 1
    assert json.loads((tmp_path / "run" / "run.json").read_text())["exit_code"] == 1


def test_generate_and_augment(tmp_path):
    plain = _generate(tmp_path, "plain", 2)
    augmented = _generate(tmp_path, "aug", 2, "--augment")
    assert read_dataset(plain)[1].count == 2
    samples, manifest = read_dataset(augmented)
    assert manifest.count == 8
    assert manifest.generation.sampling.templates == ["a", "b"]
    assert manifest.generation.sampling.seed == 7


def test_generate_is_deterministic(tmp_path):
    one, two = _generate(tmp_path, "one", 3), _generate(tmp_path, "two", 3)
    for rel in ("manifest.json", "samples/000000.bin", "samples/000002.bin"):
        assert (one / rel).read_bytes() == (two / rel).read_bytes()


def test_generate_zero_samples(tmp_path):
    out = _generate(tmp_path, "empty", 0)
    assert read_dataset(out)[1].count == 0


def test_generate_rejects_unknown_template(tmp_path):
    assert main(["generate", "--n", "1", "--res", "4x8", "--templates", "a,q", "--out", str(tmp_path)]) == 1


def test_evaluate_ground_truth_against_itself(tmp_path, caplog):
    caplog.set_level(logging.INFO)
    ds = _generate(tmp_path, "ds", 3)
    samples, _ = read_dataset(ds)
    write_fields([s.target for s in samples], tmp_path / "pred")
    out = tmp_path / "eval"
    assert main(["evaluate", "--predictions", str(tmp_path / "pred"), "--dataset", str(ds), "--out", str(out)]) == 0

    with open(out / "metrics.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    for row in rows:
        assert float(row["mse"]) == 0.0
        assert float(row["binary_accuracy"]) == 1.0
        assert float(row["compliance_error"]) == 0.0
        assert float(row["bottleneck_dim0"]) == 0.0
        assert float(row["bottleneck_dim1"]) == 0.0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n_cases"] == 3
    assert summary["lambda_topo"] == 0.1
    assert (out / "table.csv").exists()
    assert "[evaluate] summary" in caplog.text and "C.err" in caplog.text


def test_evaluate_counts_unstable_rows_outside_the_means(tmp_path):
    ds = _generate(tmp_path, "ds", 2)
    samples, _ = read_dataset(ds)
    write_fields([np.zeros_like(samples[0].target), samples[1].target], tmp_path / "pred")
    out = tmp_path / "eval"
    assert main(["evaluate", "--predictions", str(tmp_path / "pred"), "--dataset", str(ds), "--out", str(out)]) == 0

    with open(out / "metrics.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["unstable"] for r in rows] == ["1", "0"]
    assert rows[0]["compliance_error"] == ""
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n_unstable"] == 1
    assert summary["compliance_error"] == 0.0
    assert summary["n_cases"] == 2
    assert "1 unstable" in json.loads((out / "run.json").read_text())["notes"][0]


def test_evaluate_complement(tmp_path, rng):
    truths = _binary_dataset(tmp_path / "ds", rng)
    write_fields([1.0 - t for t in truths], tmp_path / "pred")
    out = tmp_path / "eval"
    assert main(["evaluate", "--predictions", str(tmp_path / "pred"), "--dataset", str(tmp_path / "ds"), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["mse"] == 1.0
    assert summary["binary_accuracy"] == 0.0
    assert summary["compliance_error"] is None
    assert summary["mse"] == pytest.approx(np.mean(_column(out / "metrics.csv", "mse")), abs=1e-12)


def test_evaluate_round_before_metrics(tmp_path, rng):
    truths = _binary_dataset(tmp_path / "ds", rng)
    write_fields([0.1 + 0.8 * t for t in truths], tmp_path / "pred")
    args = ["evaluate", "--predictions", str(tmp_path / "pred"), "--dataset", str(tmp_path / "ds")]

    assert main([*args, "--out", str(tmp_path / "raw")]) == 0
    raw = json.loads((tmp_path / "raw" / "summary.json").read_text())
    assert raw["mse"] == pytest.approx(0.01, rel=1e-5)

    assert main([*args, "--round-before-metrics", "--out", str(tmp_path / "rounded")]) == 0
    rounded = json.loads((tmp_path / "rounded" / "summary.json").read_text())
    assert rounded["mse"] == 0.0
    assert rounded["binary_accuracy"] == raw["binary_accuracy"] == 1.0


def test_evaluate_count_mismatch_names_sample(tmp_path, rng, caplog):
    truths = _binary_dataset(tmp_path / "ds", rng, n=3)
    write_fields(truths[:2], tmp_path / "pred")
    code = main(["evaluate", "--predictions", str(tmp_path / "pred"), "--dataset", str(tmp_path / "ds"), "--out", str(tmp_path / "e")])
    assert code == 1
    assert "sample 2" in caplog.text


def test_evaluate_shape_mismatch(tmp_path, rng, caplog):
    truths = _binary_dataset(tmp_path / "ds", rng, n=2)
    write_fields([t[:, :-1] for t in truths], tmp_path / "pred")
    code = main(["evaluate", "--predictions", str(tmp_path / "pred"), "--dataset", str(tmp_path / "ds"), "--out", str(tmp_path / "e")])
    assert code == 1
    assert "sample 0" in caplog.text


def test_persistence_command(tmp_path):
    ring = np.zeros((7, 7))
    ring[1:-1, 1:-1] = 1.0
    ring[2:-2, 2:-2] = 0.0
    write_fields([np.ones((7, 7)), ring], tmp_path / "fields")

    out = tmp_path / "p0"
    assert main(["persistence", "--field", str(tmp_path / "fields"), "--index", "0", "--out", str(out)]) == 0
    with open(out / "diagram.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows == [{"dim": "0", "birth": "1.0", "death": "-inf", "essential": "1"}]
    with open(out / "betti.csv", newline="") as fh:
        betti = list(csv.DictReader(fh))
    assert [b["threshold"] for b in betti] == [f"0.{i}" for i in range(1, 10)]
    assert all((b["b0"], b["b1"]) == ("1", "0") for b in betti)

    out = tmp_path / "p1"
    assert main(["persistence", "--field", str(tmp_path / "fields"), "--index", "1", "--out", str(out)]) == 0
    with open(out / "diagram.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows == [
        {"dim": "0", "birth": "1.0", "death": "-inf", "essential": "1"},
        {"dim": "1", "birth": "1.0", "death": "0.0", "essential": "0"},
    ]


def test_persistence_command_rejects_bad_container(tmp_path):
    (tmp_path / "junk").mkdir()
    (tmp_path / "junk" / "manifest.json").write_text("{not json")
    assert main(["persistence", "--field", str(tmp_path / "junk"), "--out", str(tmp_path / "p")]) == 1


def test_verify_command(tmp_path):
    ds = _generate(tmp_path, "ds", 2)
    assert main(["verify", "--dataset", str(ds), "--fraction", "1.0", "--out", str(tmp_path / "v")]) == 0
    assert json.loads((tmp_path / "v" / "verify.json").read_text())["ok"] is True
    (ds / "samples" / "000001.bin").write_bytes(b"")
    assert main(["verify", "--dataset", str(ds), "--fraction", "0"]) == 1


@pytest.mark.slow
def test_degraded_predictions_report(tmp_path):
    rng = np.random.default_rng(5)
    truths = _binary_dataset(tmp_path / "ds", rng, n=20, shape=(40, 80))
    preds = []
    for t in truths:
        flip = rng.choice(t.size, size=t.size // 20, replace=False)
        p = t.copy().ravel()
        p[flip] = 1.0 - p[flip]
        preds.append(p.reshape(t.shape))
    write_fields(preds, tmp_path / "pred")
    out = tmp_path / "eval"
    assert main(["evaluate", "--predictions", str(tmp_path / "pred"), "--dataset", str(tmp_path / "ds"), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["binary_accuracy"] == pytest.approx(0.95, abs=0.005)
    assert summary["mse"] == pytest.approx(0.05, abs=0.005)
