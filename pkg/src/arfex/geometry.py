"""Planar-model estimation and RANSAC geometric verification.

The default model is a planar homography fit by DLT on the 8-unknown system
(h33 = 1), with coordinates pre-scaled toward [0, 1] to bound conditioning.
A similarity-transform mode is available for degenerate scenes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DegenerateConfiguration,
    InsufficientMatches,
    PointAtInfinity,
    SingularSystem,
)

_COLLINEAR_TOL = 1e-9
_DENOM_TOL = 1e-12


@dataclass(eq=False)
class Homography:
    """3x3 projective map, normalized so h[2, 2] = 1."""

    h: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.h, dtype=np.float64)
        if m.shape != (3, 3):
            raise ValueError(f"expected 3x3 matrix, got {m.shape}")
        self.h = m

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3))


@dataclass
class RansacConfig:
    """min_inliers=None uses the adaptive rule max(8, ceil(0.15 * n_matches));
    model is 'homography' (4-point samples) or 'similarity' (2-point)."""

    max_iterations: int = 2000
    confidence: float = 0.99
    inlier_threshold: float = 3.0
    min_inliers: Optional[int] = None
    rng_seed: int = 0
    model: str = "homography"

    def __post_init__(self):
        if self.model not in ("homography", "similarity"):
            raise ValueError(f"model must be 'homography' or 'similarity', got {self.model!r}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must be in (0, 1), got {self.confidence}")


@dataclass
class VerificationResult:
    """model is present iff verified; inliers satisfy the threshold under it."""

    model: Optional[Homography]
    inlier_indices: list[int]
    mean_reprojection_error: float
    verified: bool


def project_point(hom: Homography, p) -> tuple[float, float]:
    """Projective mapping with division by the third coordinate."""
    x, y = float(p[0]), float(p[1])
    h = hom.h
    den = h[2, 0] * x + h[2, 1] * y + h[2, 2]
    if abs(den) <= _DENOM_TOL:
        raise PointAtInfinity(f"denominator {den!r} at ({x}, {y})")
    px = (h[0, 0] * x + h[0, 1] * y + h[0, 2]) / den
    py = (h[1, 0] * x + h[1, 1] * y + h[1, 2]) / den
    return px, py


def _as_points(a) -> np.ndarray:
    pts = np.asarray(a, dtype=np.float64).reshape(-1, 2)
    return pts


def _check_collinear(src: np.ndarray) -> None:
    n = len(src)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a = src[j] - src[i]
                b = src[k] - src[i]
                if abs(a[0] * b[1] - a[1] * b[0]) <= _COLLINEAR_TOL:
                    raise DegenerateConfiguration(
                        f"source points {i}, {j}, {k} are collinear or duplicated"
                    )


def estimate_homography(src, dst) -> Homography:
    """DLT: exact 8x8 solve for 4 pairs, least squares for more; h33 = 1.

    Collinearity of source points is checked (area test, 1e-9) for the
    minimal 4-pair case; larger systems surface degeneracy as SingularSystem
    via rank deficiency.
    """
    src = _as_points(src)
    dst = _as_points(dst)
    if len(src) != len(dst) or len(src) < 4:
        raise DegenerateConfiguration(f"need >= 4 pairs, got {len(src)}/{len(dst)}")
    if len(src) == 4:
        _check_collinear(src)
    s_src = max(float(np.max(np.abs(src))), _DENOM_TOL)
    s_dst = max(float(np.max(np.abs(dst))), _DENOM_TOL)
    sn = src / s_src
    dn = dst / s_dst
    n = len(sn)
    a = np.zeros((2 * n, 8))
    b = np.zeros(2 * n)
    a[0::2, 0] = sn[:, 0]
    a[0::2, 1] = sn[:, 1]
    a[0::2, 2] = 1.0
    a[0::2, 6] = -sn[:, 0] * dn[:, 0]
    a[0::2, 7] = -sn[:, 1] * dn[:, 0]
    b[0::2] = dn[:, 0]
    a[1::2, 3] = sn[:, 0]
    a[1::2, 4] = sn[:, 1]
    a[1::2, 5] = 1.0
    a[1::2, 6] = -sn[:, 0] * dn[:, 1]
    a[1::2, 7] = -sn[:, 1] * dn[:, 1]
    b[1::2] = dn[:, 1]
    if n == 4:
        try:
            sol = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
    else:
        sol, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
        if rank < 8:
            raise SingularSystem(f"rank-deficient system (rank {rank})")
    hn = np.array(
        [
            [sol[0], sol[1], sol[2]],
            [sol[3], sol[4], sol[5]],
            [sol[6], sol[7], 1.0],
        ]
    )
    h = np.diag([s_dst, s_dst, 1.0]) @ hn @ np.diag([1.0 / s_src, 1.0 / s_src, 1.0])
    if abs(h[2, 2]) <= _DENOM_TOL:
        raise SingularSystem("h33 vanished during unscaling")
    h /= h[2, 2]
    if abs(np.linalg.det(h)) <= _DENOM_TOL:
        raise SingularSystem("estimated matrix is not invertible")
    return Homography(h)


def estimate_similarity(src, dst) -> Homography:
    """Least-squares similarity (rotation + uniform scale + translation).

    Minimal sample is 2 distinct points; returned as a Homography with the
    bottom row (0, 0, 1).
    """
    src = _as_points(src)
    dst = _as_points(dst)
    if len(src) != len(dst) or len(src) < 2:
        raise DegenerateConfiguration(f"need >= 2 pairs, got {len(src)}/{len(dst)}")
    n = len(src)
    a = np.zeros((2 * n, 4))
    b = np.zeros(2 * n)
    a[0::2, 0] = src[:, 0]
    a[0::2, 1] = -src[:, 1]
    a[0::2, 2] = 1.0
    b[0::2] = dst[:, 0]
    a[1::2, 0] = src[:, 1]
    a[1::2, 1] = src[:, 0]
    a[1::2, 3] = 1.0
    b[1::2] = dst[:, 1]
    sol, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < 4:
        raise SingularSystem(f"rank-deficient system (rank {rank})")
    p, q, tx, ty = sol
    if p * p + q * q <= _DENOM_TOL:
        raise SingularSystem("similarity scale collapsed to zero")
    return Homography(np.array([[p, -q, tx], [q, p, ty], [0.0, 0.0, 1.0]]))


def reprojection_errors(hom: Homography, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Euclidean distance between projected src and dst; inf where the
    projective denominator underflows."""
    src = _as_points(src)
    dst = _as_points(dst)
    h = hom.h
    den = h[2, 0] * src[:, 0] + h[2, 1] * src[:, 1] + h[2, 2]
    bad = np.abs(den) <= _DENOM_TOL
    safe = np.where(bad, 1.0, den)
    px = (h[0, 0] * src[:, 0] + h[0, 1] * src[:, 1] + h[0, 2]) / safe
    py = (h[1, 0] * src[:, 0] + h[1, 1] * src[:, 1] + h[1, 2]) / safe
    err = np.hypot(px - dst[:, 0], py - dst[:, 1])
    err[bad] = np.inf
    return err


def default_min_inliers(n_matches: int) -> int:
    return max(8, math.ceil(0.15 * n_matches))


def ransac_verify(src, dst, cfg: Optional[RansacConfig] = None) -> VerificationResult:
    """Adaptive-iteration RANSAC over minimal samples, least-squares refit.

    src/dst are matched (n, 2) coordinate arrays.  Deterministic for a fixed
    rng_seed.  Inlier = reprojection error <= threshold; verified iff the
    final consensus reaches min_inliers.
    """
    cfg = cfg or RansacConfig()
    src = _as_points(src)
    dst = _as_points(dst)
    n = len(src)
    if n != len(dst):
        raise ValueError(f"mismatched correspondence arrays: {n} vs {len(dst)}")
    if n < 4:
        raise InsufficientMatches(f"need >= 4 matches, got {n}")
    estimator = estimate_homography if cfg.model == "homography" else estimate_similarity
    sample_size = 4 if cfg.model == "homography" else 2
    min_inliers = cfg.min_inliers if cfg.min_inliers is not None else default_min_inliers(n)
    rng = np.random.default_rng(cfg.rng_seed)

    best_count = 0
    best_model: Optional[Homography] = None
    best_mask: Optional[np.ndarray] = None
    needed = cfg.max_iterations
    it = 0
    while it < needed:
        it += 1
        idx = rng.choice(n, size=sample_size, replace=False)
        try:
            candidate = estimator(src[idx], dst[idx])
        except (DegenerateConfiguration, SingularSystem):
            continue
        err = reprojection_errors(candidate, src, dst)
        mask = err <= cfg.inlier_threshold
        count = int(mask.sum())
        if count > best_count:
            best_count = count
            best_model = candidate
            best_mask = mask
            w = count / n
            miss = 1.0 - w**sample_size
            if miss <= 0.0:
                needed = it
            else:
                needed = min(
                    cfg.max_iterations,
                    math.ceil(math.log(1.0 - cfg.confidence) / math.log(miss)),
                )

    if best_model is None:
        return VerificationResult(None, [], math.inf, False)

    # Local optimization: least-squares refits pull in marginal inliers the
    # noisy 4-point hypothesis missed.  Candidate A iterates the refit at the
    # inlier threshold; candidate B first polishes at a widened threshold
    # (2x, 1.5x) before tightening.  Both are bounded and deterministic; the
    # better consensus wins.
    def tighten(model, mask):
        for _ in range(10):
            consensus = np.flatnonzero(mask)
            if len(consensus) < sample_size:
                break
            try:
                refit = estimator(src[consensus], dst[consensus])
            except (DegenerateConfiguration, SingularSystem):
                break
            err = reprojection_errors(refit, src, dst)
            new_mask = err <= cfg.inlier_threshold
            if int(new_mask.sum()) < int(mask.sum()):
                break
            converged = bool(np.array_equal(new_mask, mask))
            model = refit
            mask = new_mask
            if converged:
                break
        return model, mask

    def widened(model):
        for factor in (2.0, 1.5):
            err = reprojection_errors(model, src, dst)
            wide = np.flatnonzero(err <= factor * cfg.inlier_threshold)
            if len(wide) < sample_size:
                continue
            try:
                model = estimator(src[wide], dst[wide])
            except (DegenerateConfiguration, SingularSystem):
                continue
        return model

    def score(model, mask):
        err = reprojection_errors(model, src, dst)
        idx = np.flatnonzero(mask)
        mean_err = float(err[idx].mean()) if len(idx) else math.inf
        return len(idx), mean_err

    model_a, mask_a = tighten(best_model, best_mask)
    model_b = widened(best_model)
    mask_b = reprojection_errors(model_b, src, dst) <= cfg.inlier_threshold
    model_b, mask_b = tighten(model_b, mask_b)
    count_a, err_a = score(model_a, mask_a)
    count_b, err_b = score(model_b, mask_b)
    if (count_b, -err_b) > (count_a, -err_a):
        model, mask = model_b, mask_b
    else:
        model, mask = model_a, mask_a

    err = reprojection_errors(model, src, dst)
    inliers = np.flatnonzero(err <= cfg.inlier_threshold)
    mean_err = float(err[inliers].mean()) if len(inliers) else math.inf
    verified = len(inliers) >= min_inliers
    return VerificationResult(
        model=model if verified else None,
        inlier_indices=[int(i) for i in inliers],
        mean_reprojection_error=mean_err,
        verified=verified,
    )
