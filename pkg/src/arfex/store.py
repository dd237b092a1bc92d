"""Object database and end-to-end query orchestration.

A Database is an immutable snapshot: indexing returns a new snapshot,
queries never mutate.  Persistence is a single versioned JSON document;
floats survive the round trip exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DuplicateId, InsufficientMatches, NoFeatures, ParseError, VersionMismatch
from .features import Descriptor, ExtractionConfig, InterestPoint, extract_features
from .geometry import RansacConfig, VerificationResult, ransac_verify
from .image import RasterImage
from .matching import Match, MatchConfig, match_descriptors

DB_VERSION = 1
UNRECOGNIZED = "unrecognized"


@dataclass
class ObjectRecord:
    """Indexed object: features plus the associated display metadata."""

    object_id: str
    name: str
    info: str
    image_size: tuple[int, int]  # (width, height)
    keypoints: list[InterestPoint]
    descriptors: list[Descriptor]


@dataclass
class Database:
    version: int = DB_VERSION
    extraction_config: ExtractionConfig = field(default_factory=ExtractionConfig)
    records: list[ObjectRecord] = field(default_factory=list)

    def ids(self) -> set[str]:
        return {r.object_id for r in self.records}


@dataclass
class RankedCandidate:
    """Per-record query outcome; `matches` are kept for overlay drawing."""

    object_id: str
    match_count: int
    verification: VerificationResult
    matches: list[Match] = field(default_factory=list)


@dataclass
class QueryResult:
    ranked: list[RankedCandidate]
    best: str  # object id, or UNRECOGNIZED
    associated_info: Optional[dict] = None  # {"name":…, "info":…} of best

    @property
    def recognized(self) -> bool:
        return self.best != UNRECOGNIZED


def index_image(db: Database, img: RasterImage, object_id: str, name: str, info: str) -> Database:
    """Extract features under the database's config and append a record.

    Returns a new Database snapshot; the input is unchanged.
    """
    if object_id in db.ids():
        raise DuplicateId(f"object id {object_id!r} already indexed")
    points, descriptors = extract_features(img, db.extraction_config)
    if not points:
        raise NoFeatures(f"image for {object_id!r} produced no interest points")
    record = ObjectRecord(
        object_id=object_id,
        name=name,
        info=info,
        image_size=(img.width, img.height),
        keypoints=points,
        descriptors=descriptors,
    )
    return Database(
        version=db.version,
        extraction_config=db.extraction_config,
        records=[*db.records, record],
    )


def query_image(
    db: Database,
    img: RasterImage,
    match_cfg: Optional[MatchConfig] = None,
    ransac_cfg: Optional[RansacConfig] = None,
) -> tuple[QueryResult, list[InterestPoint]]:
    """Match the query against every record and rank verified candidates.

    Query extraction is forced to the database's extraction_config.  Ranking:
    verified desc, inlier count desc, match count desc, id asc.  Returns the
    result plus the query's interest points (for overlay drawing).
    """
    match_cfg = match_cfg or MatchConfig()
    ransac_cfg = ransac_cfg or RansacConfig()
    points, descriptors = extract_features(img, db.extraction_config)
    if not points:
        raise NoFeatures("query image produced no interest points")
    ranked: list[RankedCandidate] = []
    for rec in db.records:
        matches = match_descriptors(descriptors, rec.descriptors, match_cfg)
        try:
            src = np.array([[rec.keypoints[m.target_index].x, rec.keypoints[m.target_index].y] for m in matches])
            dst = np.array([[points[m.query_index].x, points[m.query_index].y] for m in matches])
            verification = ransac_verify(src, dst, ransac_cfg)
        except InsufficientMatches:
            verification = VerificationResult(None, [], math.inf, False)
        ranked.append(
            RankedCandidate(
                object_id=rec.object_id,
                match_count=len(matches),
                verification=verification,
                matches=matches,
            )
        )
    ranked.sort(
        key=lambda c: (
            not c.verification.verified,
            -len(c.verification.inlier_indices),
            -c.match_count,
            c.object_id,
        )
    )
    best = UNRECOGNIZED
    info = None
    for cand in ranked:
        if cand.verification.verified:
            best = cand.object_id
            rec = next(r for r in db.records if r.object_id == best)
            info = {"name": rec.name, "info": rec.info}
            break
    return QueryResult(ranked=ranked, best=best, associated_info=info), points


# --- persistence --------------------------------------------------------

def _point_to_json(p: InterestPoint) -> dict:
    return {
        "x": p.x,
        "y": p.y,
        "scale": p.scale,
        "orientation": p.orientation,
        "laplacian": p.laplacian_sign,
        "response": p.response,
    }


def _point_from_json(d: dict) -> InterestPoint:
    return InterestPoint(
        x=float(d["x"]),
        y=float(d["y"]),
        scale=float(d["scale"]),
        response=float(d["response"]),
        laplacian_sign=int(d["laplacian"]),
        orientation=float(d["orientation"]),
    )


def db_to_json(db: Database) -> dict:
    return {
        "version": db.version,
        "extraction_config": db.extraction_config.to_dict(),
        "objects": [
            {
                "id": r.object_id,
                "name": r.name,
                "info": r.info,
                "image_size": list(r.image_size),
                "keypoints": [_point_to_json(p) for p in r.keypoints],
                "descriptors": [d.components.tolist() for d in r.descriptors],
            }
            for r in db.records
        ],
    }


def db_from_json(doc: dict) -> Database:
    try:
        version = doc["version"]
        if version != DB_VERSION:
            raise VersionMismatch(f"unsupported database version {version}")
        config = ExtractionConfig.from_dict(doc["extraction_config"])
        records = []
        for obj in doc["objects"]:
            keypoints = [_point_from_json(p) for p in obj["keypoints"]]
            descriptors = [
                Descriptor(components=np.array(c, dtype=np.float64), laplacian_sign=p.laplacian_sign)
                for c, p in zip(obj["descriptors"], keypoints)
            ]
            if len(keypoints) != len(obj["descriptors"]) or not keypoints:
                raise ParseError(f"object {obj.get('id')!r} has mismatched or empty features")
            records.append(
                ObjectRecord(
                    object_id=str(obj["id"]),
                    name=str(obj["name"]),
                    info=str(obj["info"]),
                    image_size=(int(obj["image_size"][0]), int(obj["image_size"][1])),
                    keypoints=keypoints,
                    descriptors=descriptors,
                )
            )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed database document: {exc}") from exc
    seen = set()
    for r in records:
        if r.object_id in seen:
            raise ParseError(f"duplicate object id {r.object_id!r} in database document")
        seen.add(r.object_id)
    return Database(version=version, extraction_config=config, records=records)


def save_db(db: Database, path) -> None:
    text = json.dumps(db_to_json(db)) + "\n"
    Path(path).write_text(text, encoding="ascii")


def load_db(path) -> Database:
    text = Path(path).read_text(encoding="ascii")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return db_from_json(doc)
