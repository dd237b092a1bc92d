"""Command-line surface: exit codes, JSON artifacts, overlays, determinism."""

import json

import numpy as np
import pytest

from arfex.cli import main
from arfex.image import RasterImage
from arfex.image_io import read_image, write_ppm
from arfex.synthetic import blob_texture, noise_image, similarity_map, warp_similarity
from conftest import gray_raster
from oracles import flood_fill_labels


@pytest.fixture(scope="module")
def texture_ppm(tmp_path_factory):
    path = tmp_path_factory.mktemp("fixtures") / "texture.ppm"
    write_ppm(blob_texture(192, 192, 16, seed=21), path)
    return path


def read_json(path):
    return json.loads(path.read_text())


def test_extract_writes_points_and_config(tmp_path, texture_ppm):
    out = tmp_path / "features.json"
    assert main(["extract", "--input", str(texture_ppm), "--output", str(out)]) == 0
    doc = read_json(out)
    assert len(doc["points"]) >= 1
    assert len(doc["descriptors"]) == len(doc["points"])
    assert doc["config"]["octaves"] == 3
    assert doc["config"]["threshold"] == 4e-4
    assert all(len(d) == 64 for d in doc["descriptors"])
    p = doc["points"][0]
    assert set(p) == {"x", "y", "scale", "orientation", "laplacian", "response"}


def test_extract_overlay_has_red_marks(tmp_path, texture_ppm):
    out = tmp_path / "features.json"
    overlay = tmp_path / "overlay.ppm"
    code = main(
        ["extract", "--input", str(texture_ppm), "--output", str(out), "--overlay", str(overlay)]
    )
    assert code == 0
    img = read_image(overlay)
    red = (img.pixels[:, :, 0] == 255) & (img.pixels[:, :, 1] == 0) & (img.pixels[:, :, 2] == 0)
    assert red.any()


def test_extract_missing_input_is_exit_2(tmp_path):
    out = tmp_path / "x.json"
    assert main(["extract", "--input", str(tmp_path / "nope.ppm"), "--output", str(out)]) == 2


def test_extract_tiny_image_is_exit_3(tmp_path):
    tiny = tmp_path / "tiny.ppm"
    write_ppm(gray_raster(np.full((4, 4), 200)), tiny)
    assert main(["extract", "--input", str(tiny), "--output", str(tmp_path / "x.json")]) == 3


def test_extract_threshold_flag_must_be_valid(tmp_path, texture_ppm):
    with pytest.raises(SystemExit):
        main(["extract", "--input", str(texture_ppm), "--output", "x.json", "--threshold", "-1"])


def test_unknown_flag_rejected(texture_ppm):
    with pytest.raises(SystemExit):
        main(["extract", "--input", str(texture_ppm), "--output", "x.json", "--bogus", "1"])


def test_blobs_two_squares(tmp_path):
    levels = np.zeros((12, 12), dtype=np.uint8)
    levels[2:5, 2:5] = 255
    levels[7:11, 7:11] = 255
    img_path = tmp_path / "squares.ppm"
    write_ppm(gray_raster(levels), img_path)
    out = tmp_path / "blobs.json"
    assert main(["blobs", "--input", str(img_path), "--output", str(out)]) == 0
    doc = read_json(out)
    assert doc["threshold"] == 128
    assert doc["polarity"] == "white"
    assert len(doc["blobs"]) == 2
    assert doc["blobs"][0]["count"] == 16
    assert doc["blobs"][0]["bbox"] == [7, 7, 10, 10]
    assert doc["blobs"][1]["count"] == 9


def test_blobs_all_black_white_polarity(tmp_path):
    img_path = tmp_path / "black.ppm"
    write_ppm(gray_raster(np.zeros((8, 8), dtype=np.uint8)), img_path)
    out = tmp_path / "blobs.json"
    assert main(["blobs", "--input", str(img_path), "--output", str(out)]) == 0
    assert read_json(out)["blobs"] == []


def test_blobs_count_matches_flood_fill(tmp_path, rng):
    mask = rng.random((32, 32)) < 0.4
    img_path = tmp_path / "random.ppm"
    write_ppm(gray_raster(mask.astype(np.uint8) * 255), img_path)
    out = tmp_path / "blobs.json"
    assert main(["blobs", "--input", str(img_path), "--output", str(out)]) == 0
    want = int(flood_fill_labels(mask).max())
    assert len(read_json(out)["blobs"]) == want


def test_blobs_polarity_black(tmp_path):
    levels = np.full((8, 8), 200, dtype=np.uint8)
    levels[3:5, 3:5] = 10
    img_path = tmp_path / "dark.ppm"
    write_ppm(gray_raster(levels), img_path)
    out = tmp_path / "blobs.json"
    assert main(["blobs", "--input", str(img_path), "--output", str(out), "--polarity", "black"]) == 0
    doc = read_json(out)
    assert len(doc["blobs"]) == 1
    assert doc["blobs"][0]["count"] == 4


def test_index_and_duplicate(tmp_path, texture_ppm):
    db = tmp_path / "db.json"
    code = main(
        ["index", "--db", str(db), "--input", str(texture_ppm), "--id", "a", "--name", "A", "--info", "alpha"]
    )
    assert code == 0
    doc = read_json(db)
    assert doc["version"] == 1
    assert len(doc["objects"]) == 1
    assert doc["objects"][0]["id"] == "a"
    assert doc["objects"][0]["info"] == "alpha"
    code = main(
        ["index", "--db", str(db), "--input", str(texture_ppm), "--id", "a", "--name", "A", "--info", "alpha"]
    )
    assert code == 4
    assert len(read_json(db)["objects"]) == 1


def test_index_flat_image_is_exit_3(tmp_path):
    flat = tmp_path / "flat.ppm"
    write_ppm(gray_raster(np.full((64, 64), 128)), flat)
    db = tmp_path / "db.json"
    assert main(["index", "--db", str(db), "--input", str(flat), "--id", "f", "--name", "F", "--info", "x"]) == 3


def test_index_info_from_file(tmp_path, texture_ppm):
    info_file = tmp_path / "info.txt"
    info_file.write_text("long description\nwith lines")
    db = tmp_path / "db.json"
    code = main(
        ["index", "--db", str(db), "--input", str(texture_ppm), "--id", "a", "--name", "A", "--info", f"@{info_file}"]
    )
    assert code == 0
    assert read_json(db)["objects"][0]["info"] == "long description\nwith lines"


def build_db(tmp_path, seeds=(31, 32, 33)):
    db = tmp_path / "db.json"
    for k, seed in enumerate(seeds):
        img_path = tmp_path / f"obj{k}.ppm"
        write_ppm(blob_texture(192, 192, 16, seed=seed), img_path)
        assert (
            main(
                ["index", "--db", str(db), "--input", str(img_path), "--id", f"obj{k}", "--name", f"Object {k}", "--info", f"info {k}"]
            )
            == 0
        )
    return db


def test_query_exact_copy_recognized(tmp_path):
    db = build_db(tmp_path)
    out = tmp_path / "result.json"
    assert main(["query", "--db", str(db), "--input", str(tmp_path / "obj1.ppm"), "--output", str(out)]) == 0
    doc = read_json(out)
    assert doc["best"] == "obj1"
    assert doc["associated_info"] == {"name": "Object 1", "info": "info 1"}
    assert len(doc["homography"]) == 9
    assert doc["inlier_indices"]
    assert doc["ranked"][0]["id"] == "obj1"
    assert doc["ranked"][0]["verified"] is True


def test_query_noise_unrecognized_exit_1(tmp_path):
    db = build_db(tmp_path)
    noise_path = tmp_path / "noise.ppm"
    write_ppm(noise_image(192, 192, seed=5), noise_path)
    out = tmp_path / "result.json"
    assert main(["query", "--db", str(db), "--input", str(noise_path), "--output", str(out)]) == 1
    doc = read_json(out)
    assert doc["best"] == "unrecognized"
    assert "associated_info" not in doc
    assert "homography" not in doc
    assert len(doc["ranked"]) == 3


def test_query_annotate_corners_match_ground_truth(tmp_path):
    db = build_db(tmp_path)
    obj = read_image(tmp_path / "obj2.ppm")
    query = warp_similarity(obj, 15.0, 1.0)
    query_path = tmp_path / "query.ppm"
    write_ppm(query, query_path)
    out = tmp_path / "result.json"
    annotated = tmp_path / "annotated.ppm"
    code = main(
        ["query", "--db", str(db), "--input", str(query_path), "--output", str(out), "--annotate", str(annotated)]
    )
    assert code == 0
    doc = read_json(out)
    assert doc["best"] == "obj2"
    h = np.array(doc["homography"]).reshape(3, 3)
    corners = np.array([[0, 0], [191, 0], [191, 191], [0, 191]], dtype=float)
    want = similarity_map(corners, 192, 192, 15.0, 1.0)
    homo = np.hstack([corners, np.ones((4, 1))]) @ h.T
    got = homo[:, :2] / homo[:, 2:3]
    assert np.all(np.hypot(*(got - want).T) <= 3.0)
    img = read_image(annotated)
    red = (img.pixels[:, :, 0] == 255) & (img.pixels[:, :, 1] == 0) & (img.pixels[:, :, 2] == 0)
    assert red.any()


def test_query_output_byte_identical_across_runs(tmp_path):
    db = build_db(tmp_path)
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    args = ["query", "--db", str(db), "--input", str(tmp_path / "obj0.ppm"), "--seed", "7"]
    assert main(args + ["--output", str(out1)]) == 0
    assert main(args + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_query_seed_env_fallback(tmp_path, monkeypatch):
    db = build_db(tmp_path)
    out_env = tmp_path / "env.json"
    out_flag = tmp_path / "flag.json"
    monkeypatch.setenv("ARFEX_SEED", "123")
    assert main(["query", "--db", str(db), "--input", str(tmp_path / "obj0.ppm"), "--output", str(out_env)]) == 0
    monkeypatch.delenv("ARFEX_SEED")
    assert main(["query", "--db", str(db), "--input", str(tmp_path / "obj0.ppm"), "--output", str(out_flag), "--seed", "123"]) == 0
    assert out_env.read_bytes() == out_flag.read_bytes()


def test_query_version_mismatch_exit_4(tmp_path, texture_ppm):
    db = build_db(tmp_path)
    doc = read_json(db)
    doc["version"] = 99
    db.write_text(json.dumps(doc))
    out = tmp_path / "x.json"
    assert main(["query", "--db", str(db), "--input", str(texture_ppm), "--output", str(out)]) == 4


def test_query_corrupt_db_exit_2(tmp_path, texture_ppm):
    db = tmp_path / "broken.json"
    db.write_text("{oops")
    assert main(["query", "--db", str(db), "--input", str(texture_ppm), "--output", str(tmp_path / "x.json")]) == 2


def test_annotate_command_writes_overlay(tmp_path, texture_ppm):
    out = tmp_path / "annotated.ppm"
    assert main(["annotate", "--input", str(texture_ppm), "--output", str(out)]) == 0
    img = read_image(out)
    red = (img.pixels[:, :, 0] == 255) & (img.pixels[:, :, 1] == 0) & (img.pixels[:, :, 2] == 0)
    assert red.any()


def test_extract_json_deterministic(tmp_path, texture_ppm):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(["extract", "--input", str(texture_ppm), "--output", str(out1)]) == 0
    assert main(["extract", "--input", str(texture_ppm), "--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
