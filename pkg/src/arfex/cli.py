"""Command-line surface: extract | blobs | index | query | annotate.

Machine-readable JSON goes to --output files; diagnostics go to stderr.
Exit codes: 0 success/recognized, 1 unrecognized, 2 I/O or unreadable
input, 3 invalid image or no features, 4 database constraint.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import draw, image_io
from .blobs import binarize, detect_blobs
from .errors import (
    DuplicateId,
    ImageTooSmall,
    NoFeatures,
    ParseError,
    VersionMismatch,
)
from .features import ExtractionConfig, extract_features
from .geometry import RansacConfig
from .image import to_grayscale
from .store import (
    Database,
    UNRECOGNIZED,
    index_image,
    load_db,
    query_image,
    save_db,
)

EXIT_OK = 0
EXIT_UNRECOGNIZED = 1
EXIT_IO = 2
EXIT_BAD_IMAGE = 3
EXIT_DB_CONSTRAINT = 4

SEED_ENV_VAR = "ARFEX_SEED"


def _threshold_arg(text: str) -> float:
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"threshold must be >= 0, got {text}")
    return v


def _octaves_arg(text: str) -> int:
    v = int(text)
    if not 1 <= v <= 4:
        raise argparse.ArgumentTypeError(f"octaves must be in [1, 4], got {text}")
    return v


def _level_arg(text: str) -> int:
    v = int(text)
    if not 0 <= v <= 255:
        raise argparse.ArgumentTypeError(f"threshold must be in [0, 255], got {text}")
    return v


def _ratio_arg(text: str) -> float:
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"ratio must be in (0, 1], got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arfex",
        description="Local-feature extraction, blob detection, and object recognition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="detect keypoints and write descriptor JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--overlay", help="also write a keypoint overlay image (PPM P6)")
    p.add_argument("--threshold", type=_threshold_arg, default=None)
    p.add_argument("--octaves", type=_octaves_arg, default=None)
    p.add_argument("--upright", action="store_true")

    p = sub.add_parser("blobs", help="binarize and report merged scanline blobs")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--threshold", type=_level_arg, default=128)
    p.add_argument("--polarity", choices=("white", "black"), default="white")
    p.add_argument("--min-pixels", type=int, default=1)

    p = sub.add_parser("index", help="add an object to a feature database")
    p.add_argument("--db", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--info", required=True, help="metadata text, or @file to read it")

    p = sub.add_parser("query", help="recognize an image against a database")
    p.add_argument("--db", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--annotate", help="write the query with inliers + object frame (PPM P6)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--ratio", type=_ratio_arg, default=None)

    p = sub.add_parser("annotate", help="write a keypoint overlay image only")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--threshold", type=_threshold_arg, default=None)
    p.add_argument("--octaves", type=_octaves_arg, default=None)
    p.add_argument("--upright", action="store_true")

    return parser


def _extraction_config(args) -> ExtractionConfig:
    cfg = ExtractionConfig()
    if getattr(args, "threshold", None) is not None:
        cfg.threshold = args.threshold
    if getattr(args, "octaves", None) is not None:
        cfg.octaves = args.octaves
    if getattr(args, "upright", False):
        cfg.upright = True
    return cfg


def _write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc) + "\n", encoding="ascii")


def _point_json(p) -> dict:
    return {
        "x": p.x,
        "y": p.y,
        "scale": p.scale,
        "orientation": p.orientation,
        "laplacian": p.laplacian_sign,
        "response": p.response,
    }


def cmd_extract(args) -> int:
    img = image_io.read_image(args.input)
    cfg = _extraction_config(args)
    points, descriptors = extract_features(img, cfg)
    doc = {
        "config": cfg.to_dict(),
        "points": [_point_json(p) for p in points],
        "descriptors": [d.components.tolist() for d in descriptors],
    }
    _write_json(args.output, doc)
    if args.overlay:
        image_io.write_ppm(draw.keypoint_overlay(img, points), args.overlay)
    return EXIT_OK


def cmd_blobs(args) -> int:
    img = image_io.read_image(args.input)
    mask = binarize(to_grayscale(img), args.threshold, args.polarity)
    blobs = detect_blobs(mask, min_pixels=args.min_pixels)
    doc = {
        "threshold": args.threshold,
        "polarity": args.polarity,
        "blobs": [
            {
                "count": b.pixel_count,
                "bbox": list(b.bbox),
                "centroid": list(b.centroid),
            }
            for b in blobs
        ],
    }
    _write_json(args.output, doc)
    return EXIT_OK


def cmd_index(args) -> int:
    db_path = Path(args.db)
    db = load_db(db_path) if db_path.exists() else Database()
    img = image_io.read_image(args.input)
    info = args.info
    if info.startswith("@"):
        info = Path(info[1:]).read_text(encoding="utf-8")
    db = index_image(db, img, args.id, args.name, info)
    save_db(db, db_path)
    return EXIT_OK


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env else 0


def cmd_query(args) -> int:
    db = load_db(args.db)
    img = image_io.read_image(args.input)
    from .matching import MatchConfig

    match_cfg = MatchConfig()
    if args.ratio is not None:
        match_cfg.ratio_threshold = args.ratio
    ransac_cfg = RansacConfig(rng_seed=_seed(args))
    result, query_points = query_image(db, img, match_cfg, ransac_cfg)
    doc = {
        "best": result.best,
        "ranked": [
            {
                "id": c.object_id,
                "match_count": c.match_count,
                "verified": c.verification.verified,
                "inlier_count": len(c.verification.inlier_indices),
                "mean_reprojection_error": (
                    c.verification.mean_reprojection_error
                    if math.isfinite(c.verification.mean_reprojection_error)
                    else None
                ),
            }
            for c in result.ranked
        ],
    }
    if result.recognized:
        best = result.ranked[0]
        doc["associated_info"] = result.associated_info
        doc["homography"] = [float(v) for v in best.verification.model.h.ravel()]
        doc["inlier_indices"] = best.verification.inlier_indices
    _write_json(args.output, doc)
    if args.annotate:
        if result.recognized:
            best = result.ranked[0]
            record = next(r for r in db.records if r.object_id == best.object_id)
            inlier_pts = [
                query_points[best.matches[i].query_index]
                for i in best.verification.inlier_indices
            ]
            overlay = draw.recognition_overlay(
                img, inlier_pts, best.verification.model, record.image_size
            )
        else:
            overlay = img
        image_io.write_ppm(overlay, args.annotate)
    return EXIT_OK if result.recognized else EXIT_UNRECOGNIZED


def cmd_annotate(args) -> int:
    img = image_io.read_image(args.input)
    cfg = _extraction_config(args)
    points, _ = extract_features(img, cfg)
    image_io.write_ppm(draw.keypoint_overlay(img, points), args.output)
    return EXIT_OK


_HANDLERS = {
    "extract": cmd_extract,
    "blobs": cmd_blobs,
    "index": cmd_index,
    "query": cmd_query,
    "annotate": cmd_annotate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (OSError, ParseError) as exc:
        print(f"arfex: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ImageTooSmall, NoFeatures) as exc:
        print(f"arfex: {exc}", file=sys.stderr)
        return EXIT_BAD_IMAGE
    except (DuplicateId, VersionMismatch) as exc:
        print(f"arfex: {exc}", file=sys.stderr)
        return EXIT_DB_CONSTRAINT


if __name__ == "__main__":
    sys.exit(main())
