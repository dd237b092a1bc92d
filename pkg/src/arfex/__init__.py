"""arfex: local-feature extraction and object recognition for AR-style lookup.

Pipeline: image ingestion -> grayscale/integral image -> fast-Hessian
interest points with Haar-wavelet descriptors -> sign-filtered ratio-test
matching -> RANSAC homography verification -> associated-info retrieval
from an indexed object database.  Scanline blob detection is provided as a
companion region detector.
"""

from .blobs import Blob, LineBlob, binarize, detect_blobs, detect_lineblobs, merge_lineblobs, scan_lineblobs
from .errors import (
    ArfexError,
    DegenerateConfiguration,
    DuplicateId,
    ImageTooSmall,
    InsufficientMatches,
    NoFeatures,
    ParseError,
    PointAtInfinity,
    SingularSystem,
    VersionMismatch,
)
from .features import (
    Descriptor,
    ExtractionConfig,
    InterestPoint,
    ResponseMap,
    assign_orientation,
    build_response_maps,
    detect_interest_points,
    extract_descriptor,
    extract_features,
    filter_sizes,
)
from .geometry import (
    Homography,
    RansacConfig,
    VerificationResult,
    estimate_homography,
    estimate_similarity,
    project_point,
    ransac_verify,
    reprojection_errors,
)
from .image import (
    GrayImage,
    IntegralImage,
    RasterImage,
    box_level_sums,
    box_sum,
    box_sums,
    build_integral,
    to_grayscale,
)
from .image_io import read_image, write_ppm
from .matching import Match, MatchConfig, distance, match_descriptors
from .store import (
    Database,
    ObjectRecord,
    QueryResult,
    RankedCandidate,
    UNRECOGNIZED,
    index_image,
    load_db,
    query_image,
    save_db,
)

__version__ = "0.1.0"

__all__ = [
    "ArfexError",
    "Blob",
    "Database",
    "DegenerateConfiguration",
    "Descriptor",
    "DuplicateId",
    "ExtractionConfig",
    "GrayImage",
    "Homography",
    "ImageTooSmall",
    "InsufficientMatches",
    "IntegralImage",
    "InterestPoint",
    "LineBlob",
    "Match",
    "MatchConfig",
    "NoFeatures",
    "ObjectRecord",
    "ParseError",
    "PointAtInfinity",
    "QueryResult",
    "RankedCandidate",
    "RansacConfig",
    "RasterImage",
    "ResponseMap",
    "SingularSystem",
    "UNRECOGNIZED",
    "VerificationResult",
    "VersionMismatch",
    "assign_orientation",
    "binarize",
    "box_level_sums",
    "box_sum",
    "box_sums",
    "build_integral",
    "build_response_maps",
    "detect_blobs",
    "detect_interest_points",
    "detect_lineblobs",
    "distance",
    "estimate_homography",
    "estimate_similarity",
    "extract_descriptor",
    "extract_features",
    "filter_sizes",
    "index_image",
    "load_db",
    "match_descriptors",
    "merge_lineblobs",
    "project_point",
    "query_image",
    "ransac_verify",
    "read_image",
    "reprojection_errors",
    "save_db",
    "scan_lineblobs",
    "to_grayscale",
    "write_ppm",
]
