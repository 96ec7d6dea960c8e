import csv
import io
import json

import numpy as np
import pytest
from PIL import Image

from sizedepth.annotation import PatchGrid, SizeAnnotation, targets_from_annotations
from sizedepth.cli import main
from sizedepth.io import make_annotation_doc, read_depth, write_annotations, write_depth


@pytest.fixture
def workdir(tmp_path):
    rng = np.random.default_rng(0)
    arr = (rng.uniform(0, 1, size=(63, 84, 3)) * 255).astype(np.uint8)
    img_path = tmp_path / "scene.png"
    Image.fromarray(arr, mode="RGB").save(img_path)

    anns = [SizeAnnotation(r, c, float(1.0 + r + 0.5 * c)) for r in range(7) for c in range(7)]
    ann_path = tmp_path / "labels.json"
    write_annotations(make_annotation_doc(7, 7, anns), ann_path)
    return tmp_path, img_path, ann_path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_solve_writes_working_resolution_pfm(workdir, capsys):
    tmp, img, ann = workdir
    out = tmp / "depth.pfm"
    code = main(["solve", "--image", str(img), "--annotations", str(ann), "--out", str(out)])
    assert code == 0
    depth = read_depth(out)
    assert depth.shape == (63, 84)
    log = capsys.readouterr().out
    assert "residual=" in log and "iterations=" in log and "wall_time=" in log


def test_solve_lambda_zero_reproduces_targets(workdir):
    tmp, img, ann = workdir
    out = tmp / "depth.pfm"
    code = main(
        ["solve", "--image", str(img), "--annotations", str(ann), "--lambda", "0", "--out", str(out)]
    )
    assert code == 0
    depth = read_depth(out)
    anns = [SizeAnnotation(r, c, float(1.0 + r + 0.5 * c)) for r in range(7) for c in range(7)]
    grid = PatchGrid(rows=7, cols=7, image_width=84, image_height=63)
    expected = targets_from_annotations(grid, anns).d.reshape(63, 84)
    # written through float32, so compare at float32 precision
    assert np.array_equal(depth, expected.astype(np.float32).astype(np.float64))


def test_missing_annotation_file_exits_1(workdir, capsys):
    tmp, img, _ = workdir
    missing = tmp / "nope.json"
    code = main(["solve", "--image", str(img), "--annotations", str(missing), "--out", str(tmp / "o.pfm")])
    assert code == 1
    assert "nope.json" in capsys.readouterr().err


def test_unknown_flag_exits_2(workdir, capsys):
    tmp, img, ann = workdir
    code = main(["solve", "--image", str(img), "--annotations", str(ann), "--frobnicate", "1"])
    assert code == 2


def test_sweep_binary_energy_non_increasing_in_lambda(workdir):
    tmp, img, ann = workdir
    out_dir = tmp / "sweep"
    code = main(
        [
            "sweep", "--image", str(img), "--annotations", str(ann),
            "--lambdas", "0.1,1,10", "--betas", "5", "--out-dir", str(out_dir),
        ]
    )
    assert code == 0
    rows = read_csv(out_dir / "energies.csv")
    assert rows[0][:4] == ["lambda", "beta", "unary_energy", "binary_energy"]
    binaries = [float(r[3]) for r in rows[1:]]
    unaries = [float(r[2]) for r in rows[1:]]
    assert binaries[0] > binaries[1] > binaries[2]
    assert unaries[0] < unaries[1] < unaries[2]
    assert (out_dir / "depth_lam0.1_beta5.pfm").exists()
    assert (out_dir / "depth_lam10_beta5.pfm").exists()


def test_sweep_single_cell_matches_solve(workdir):
    tmp, img, ann = workdir
    out_dir = tmp / "sweep1"
    assert main(
        ["sweep", "--image", str(img), "--annotations", str(ann),
         "--lambdas", "1", "--betas", "10", "--out-dir", str(out_dir)]
    ) == 0
    solo = tmp / "solo.pfm"
    assert main(
        ["solve", "--image", str(img), "--annotations", str(ann), "--out", str(solo)]
    ) == 0
    assert (out_dir / "depth_lam1_beta10.pfm").read_bytes() == solo.read_bytes()


def test_sweep_empty_lambda_list_is_usage_error(workdir, capsys):
    tmp, img, ann = workdir
    code = main(
        ["sweep", "--image", str(img), "--annotations", str(ann),
         "--lambdas", "", "--betas", "1", "--out-dir", str(tmp / "x")]
    )
    assert code == 2


def test_eval_identity_scores_perfectly(tmp_path, capsys):
    rng = np.random.default_rng(1)
    values = rng.uniform(1, 5, size=(10, 12)).astype(np.float32).astype(np.float64)
    pred = tmp_path / "pred.pfm"
    write_depth(values, pred)
    code = main(["eval", "--pred", str(pred), "--gt", str(pred), "--seed", "3"])
    assert code == 0
    out = capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["image_id", "n_points", "mse", "cosine", "rank_accuracy", "lambda", "beta"]
    record = dict(zip(rows[0], rows[1]))
    assert record["image_id"] == "pred"
    assert record["n_points"] == "10"
    assert float(record["mse"]) == 0.0
    assert float(record["cosine"]) == pytest.approx(1.0, abs=1e-12)
    assert float(record["rank_accuracy"]) == 1.0


def test_eval_draws_and_prints_seed_when_omitted(tmp_path, capsys):
    values = np.linspace(1, 2, 20).reshape(4, 5)
    pred = tmp_path / "pred.pfm"
    write_depth(values, pred)
    code = main(["eval", "--pred", str(pred), "--gt", str(pred)])
    assert code == 0
    assert "seed:" in capsys.readouterr().out


def test_eval_oversized_n_is_usage_error(tmp_path, capsys):
    values = np.linspace(1, 2, 20).reshape(4, 5)
    pred = tmp_path / "pred.pfm"
    write_depth(values, pred)
    code = main(["eval", "--pred", str(pred), "--gt", str(pred), "--n", "21", "--seed", "1"])
    assert code == 2


def test_eval_shape_mismatch_is_domain_error(tmp_path, capsys):
    a = tmp_path / "a.pfm"
    b = tmp_path / "b.pfm"
    write_depth(np.ones((4, 5)), a)
    write_depth(np.ones((5, 4)), b)
    assert main(["eval", "--pred", str(a), "--gt", str(b), "--seed", "1"]) == 1


def test_study_command_writes_csv(tmp_path, capsys):
    config = {
        "trials": 4,
        "scene_seed": 11,
        "width": 28,
        "height": 21,
        "grid": {"rows": 3, "cols": 3},
    }
    cfg_path = tmp_path / "study.json"
    cfg_path.write_text(json.dumps(config), encoding="utf-8")
    out = tmp_path / "study.csv"
    code = main(["study", "--config", str(cfg_path), "--out", str(out)])
    assert code == 0
    rows = read_csv(out)
    assert rows[0][0] == "row"
    assert len(rows) == 1 + 4 + 1  # header, trials, summary
    assert rows[-1][0] == "summary"
    assert "size MSE" in capsys.readouterr().out


def test_study_without_seed_prints_drawn_seed(tmp_path, capsys):
    cfg_path = tmp_path / "study.json"
    cfg_path.write_text(json.dumps({"trials": 1, "width": 21, "height": 14, "grid": {"rows": 2, "cols": 2}}), encoding="utf-8")
    code = main(["study", "--config", str(cfg_path), "--out", str(tmp_path / "s.csv")])
    assert code == 0
    assert "scene_seed:" in capsys.readouterr().out


def test_study_reruns_identically_with_same_config(tmp_path):
    config = {"trials": 3, "scene_seed": 2, "width": 21, "height": 14, "grid": {"rows": 2, "cols": 2}}
    cfg_path = tmp_path / "study.json"
    cfg_path.write_text(json.dumps(config), encoding="utf-8")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["study", "--config", str(cfg_path), "--out", str(a)]) == 0
    assert main(["study", "--config", str(cfg_path), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_invalid_study_config_is_domain_error(tmp_path, capsys):
    cfg_path = tmp_path / "study.json"
    cfg_path.write_text('{"trials": "lots"}', encoding="utf-8")
    assert main(["study", "--config", str(cfg_path), "--out", str(tmp_path / "s.csv")]) == 1
