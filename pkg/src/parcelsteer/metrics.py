"""Numerical kernels for time-course similarity.

Pearson correlation, correlation-distance matrices, parcel homogeneity,
mean +/- standard-error aggregation and functional connectivity. All kernels
accumulate in float64 regardless of the storage precision of their inputs;
1200-sample sums lose too much precision in float32.

Degenerate (zero-variance) time-courses never poison results with NaN:
pairs involving one are assigned r = 0 and flagged, so callers can surface
the degeneracy instead of silently hiding it. Only the two-argument
:func:`pearson_r` raises, because there a flag has nowhere to live.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidRange, LengthMismatch, ZeroVariance


@dataclass(frozen=True)
class TimeCourse:
    """A sampled signal plus the number of sources averaged to produce it."""

    samples: np.ndarray
    source_count: int = 1

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("time-course must be a 1-D vector of length >= 2")
        if not np.all(np.isfinite(samples)):
            raise ValueError("time-course contains non-finite samples")
        if self.source_count < 1:
            raise ValueError("source_count must be positive")

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class DistanceMatrix:
    """Condensed correlation-distance matrix, d(i, j) = 1 - r(i, j).

    ``d`` holds the upper triangle row by row (the (i, j) entry for i < j sits
    at index n*i - i*(i+1)//2 + (j - i - 1)). ``degenerate`` flags pairs where
    at least one course had zero variance; those pairs carry d = 1.
    """

    n: int
    d: np.ndarray
    degenerate: np.ndarray = field(repr=False)

    def index(self, i: int, j: int) -> int:
        if i == j:
            raise IndexError("condensed matrix has no diagonal")
        if i > j:
            i, j = j, i
        return self.n * i - (i * (i + 1)) // 2 + (j - i - 1)

    def get(self, i: int, j: int) -> float:
        return float(self.d[self.index(i, j)])

    def as_square(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.float64)
        iu = np.triu_indices(self.n, k=1)
        out[iu] = self.d
        out[(iu[1], iu[0])] = self.d
        return out


@dataclass(frozen=True)
class FCMatrix:
    """Leaf-by-leaf functional connectivity (Pearson r of mean time-courses)."""

    parcel_ids: tuple
    r: np.ndarray
    degenerate: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class BandedTimeCourse:
    """Per-timepoint mean and standard error over a set of member courses."""

    mean: np.ndarray
    se: np.ndarray
    n_members: int


def _as_matrix(tcs) -> np.ndarray:
    """Stack time-courses into an (n, nt) float64 matrix, checking lengths."""
    if len(tcs) == 0:
        raise ValueError("need at least one time-course")
    rows = [np.asarray(tc.samples, dtype=np.float64) for tc in tcs]
    nt = rows[0].size
    for r in rows:
        if r.size != nt:
            raise LengthMismatch(f"time-course lengths differ: {r.size} != {nt}")
    return np.vstack(rows)


def _standardize_rows(x: np.ndarray):
    """Center rows and scale to unit norm; returns (z, degenerate_row_mask).

    A row is degenerate when all its values are equal (checked exactly, not
    via the computed variance, which rounding can drag off zero). Degenerate
    rows come back as all zeros so that any product involving them is 0,
    which is exactly the convention the callers want.
    """
    x = np.asarray(x, dtype=np.float64)
    degenerate = np.ptp(x, axis=1) == 0.0
    centered = x - x.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered * centered).sum(axis=1))
    bad = ~degenerate & ((norms == 0.0) | ~np.isfinite(norms))
    if bad.any():
        # squared sums under/overflowed for extreme rows; renormalize them
        scale = np.abs(centered[bad]).max(axis=1, keepdims=True)
        rescaled = centered[bad] / scale
        centered[bad] = rescaled
        norms[bad] = np.sqrt((rescaled * rescaled).sum(axis=1))
    norms[degenerate] = 1.0
    z = centered / norms[:, None]
    z[degenerate] = 0.0
    return z, degenerate


def pairwise_r(x: np.ndarray):
    """All pairwise Pearson correlations of the rows of ``x``.

    Returns (r, degenerate_rows): an (n, n) symmetric matrix with unit
    diagonal and entries clamped to [-1, 1], plus the mask of constant rows.
    Pairs involving a constant row get r = 0; the diagonal of a constant row
    is still 1 so identity stays intact downstream. Pairs of bitwise-equal
    rows get r = 1 exactly, so identical courses sit at distance zero rather
    than an ulp away from it.
    """
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    z, degenerate = _standardize_rows(x)
    r = z @ z.T
    np.clip(r, -1.0, 1.0, out=r)
    _, group = np.unique(x, axis=0, return_inverse=True)
    group = group.reshape(-1)
    same = group[:, None] == group[None, :]
    r[same] = 1.0
    r[degenerate, :] = 0.0
    r[:, degenerate] = 0.0
    np.fill_diagonal(r, 1.0)
    return r, degenerate


def _centered(v: np.ndarray) -> np.ndarray:
    c = v - v.mean()
    if not np.all(np.isfinite(c)):
        # centering overflowed; correlation is scale-free, so shrink first
        v = v / np.abs(v).max()
        c = v - v.mean()
    return c


def pearson_r(x: TimeCourse, y: TimeCourse) -> float:
    """Sample Pearson correlation of two time-courses, clamped to [-1, 1].

    Raises ZeroVariance when either course is constant; callers that can
    carry a flag map that to r = 0 instead (see distance_matrix, fc_matrix).
    """
    xs = np.asarray(x.samples, dtype=np.float64)
    ys = np.asarray(y.samples, dtype=np.float64)
    if xs.size != ys.size:
        raise LengthMismatch(f"time-course lengths differ: {xs.size} != {ys.size}")
    if np.ptp(xs) == 0.0 or np.ptp(ys) == 0.0:
        # exact check: the computed variance of a constant course need not be
        # zero once the rounded mean is subtracted
        raise ZeroVariance("correlation with a constant time-course is undefined")
    xc = _centered(xs)
    yc = _centered(ys)
    sxy = float(xc @ yc)
    denom = np.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0 or not np.isfinite(denom):
        # product of sums under/overflowed; renormalize both courses
        xc = xc / np.abs(xc).max()
        yc = yc / np.abs(yc).max()
        sxy = float(xc @ yc)
        denom = np.sqrt(float(xc @ xc) * float(yc @ yc))
    r = sxy / denom
    return float(min(1.0, max(-1.0, r)))


def distance_matrix(tcs) -> DistanceMatrix:
    """Condensed correlation-distance matrix over a list of time-courses.

    d(i, j) = 1 - r(i, j); zero-variance pairs produce d = 1 and are flagged.
    """
    if len(tcs) < 2:
        raise ValueError("need at least two time-courses")
    x = _as_matrix(tcs)
    r, deg_rows = pairwise_r(x)
    iu = np.triu_indices(len(tcs), k=1)
    d = 1.0 - r[iu]
    degenerate = deg_rows[iu[0]] | deg_rows[iu[1]]
    return DistanceMatrix(n=len(tcs), d=d, degenerate=degenerate)


def homogeneity(tcs) -> float:
    """Average pairwise Pearson correlation among member time-courses.

    A single member yields 1.0 by convention (no inhomogeneity observed);
    degenerate pairs contribute r = 0.
    """
    x = _as_matrix(tcs)
    n = x.shape[0]
    if n == 1:
        return 1.0
    r, _ = pairwise_r(x)
    iu = np.triu_indices(n, k=1)
    return float(r[iu].mean())


def homogeneity_from_corr(r: np.ndarray) -> float:
    """Homogeneity from a precomputed pairwise correlation submatrix."""
    n = r.shape[0]
    if n == 1:
        return 1.0
    iu = np.triu_indices(n, k=1)
    return float(r[iu].mean())


def mean_se(tcs) -> BandedTimeCourse:
    """Per-timepoint mean and standard error of the mean over members.

    The mean is unweighted across members; se_t = sd_t / sqrt(n) with the
    n-1 sample standard deviation. A single member gets an all-zero band.
    """
    x = _as_matrix(tcs)
    n = x.shape[0]
    mean = x.mean(axis=0)
    if n == 1:
        se = np.zeros_like(mean)
    else:
        sd = x.std(axis=0, ddof=1)
        se = sd / np.sqrt(n)
    return BandedTimeCourse(mean=mean, se=se, n_members=n)


def fc_matrix(parcel_tcs) -> FCMatrix:
    """Functional connectivity over parcel mean time-courses.

    ``parcel_tcs`` is an ordered list of (parcel_id, TimeCourse). The result
    is symmetric with an exactly-unit diagonal; degenerate pairs are flagged
    and carry r = 0.
    """
    if len(parcel_tcs) < 2:
        raise ValueError("need at least two parcels")
    ids = tuple(pid for pid, _ in parcel_tcs)
    x = _as_matrix([tc for _, tc in parcel_tcs])
    r, deg_rows = pairwise_r(x)
    degenerate = deg_rows[:, None] | deg_rows[None, :]
    np.fill_diagonal(degenerate, deg_rows)
    return FCMatrix(parcel_ids=ids, r=r, degenerate=degenerate)


def fc_filter(m: FCMatrix, lo: float, hi: float):
    """Off-diagonal pairs with lo <= |r| <= hi, strongest first.

    Returns (i, j, r) tuples with i < j indexing into m.parcel_ids, ordered
    by descending |r| with (i, j) as a deterministic tie-break.
    """
    if lo > hi:
        raise InvalidRange(f"lo ({lo}) must not exceed hi ({hi})")
    n = len(m.parcel_ids)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            r = float(m.r[i, j])
            if lo <= abs(r) <= hi:
                out.append((i, j, r))
    out.sort(key=lambda t: (-abs(t[2]), t[0], t[1]))
    return out
