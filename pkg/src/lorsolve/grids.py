"""Finite box-union domains and piecewise-constant sampled functions.

The whole norm/operator stack runs on one representation: a :class:`Domain`
is a finite union of disjoint half-open boxes in R^k with finite measure,
each box carries a uniform grid of ``m`` cells per axis, and a
:class:`SampledFn` holds one value per cell (scalar, vector, real or
complex).  Because the functions are exact step functions, distribution
functions, non-increasing rearrangements and the norm integrals built on
them are finite exact sums -- no quadrature error anywhere in this module.

Layout: cells are ordered box-major, then C-order over the per-axis indices
within a box.  Projection of a callable onto the grid samples at cell
midpoints.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Domain",
    "SampledFn",
    "StepDistribution",
    "StepFn",
    "GridError",
    "distribution",
    "rearrangement",
    "pointwise_norm",
]


class GridError(ValueError):
    """Raised for malformed domains, grid mismatches, or bad cell data."""


def _as_box(lo, hi):
    lo = tuple(float(x) for x in np.atleast_1d(lo))
    hi = tuple(float(x) for x in np.atleast_1d(hi))
    if len(lo) != len(hi):
        raise GridError(f"box corners of different dimension: {lo} vs {hi}")
    for a, b in zip(lo, hi):
        if not (np.isfinite(a) and np.isfinite(b)):
            raise GridError("domains must have finite measure; infinite box")
        if not a < b:
            raise GridError(f"degenerate box edge [{a}, {b})")
    return lo, hi


def _boxes_disjoint(b1, b2):
    (lo1, hi1), (lo2, hi2) = b1, b2
    # Half-open boxes overlap iff they overlap on every axis.
    return any(h1 <= l2 or h2 <= l1 for l1, h1, l2, h2 in zip(lo1, hi1, lo2, hi2))


@dataclass(frozen=True)
class Domain:
    """A finite union of pairwise disjoint half-open boxes [lo, hi) in R^k."""

    boxes: tuple

    def __post_init__(self):
        if not self.boxes:
            raise GridError("domain needs at least one box")
        norm_boxes = tuple(_as_box(lo, hi) for lo, hi in self.boxes)
        object.__setattr__(self, "boxes", norm_boxes)
        k = len(norm_boxes[0][0])
        for lo, hi in norm_boxes:
            if len(lo) != k:
                raise GridError("all boxes must share one dimension")
        for i in range(len(norm_boxes)):
            for j in range(i + 1, len(norm_boxes)):
                if not _boxes_disjoint(norm_boxes[i], norm_boxes[j]):
                    raise GridError(
                        f"boxes {norm_boxes[i]} and {norm_boxes[j]} overlap"
                    )

    @staticmethod
    def interval(a, b):
        return Domain(boxes=(((a,), (b,)),))

    @staticmethod
    def unit_interval():
        return Domain.interval(0.0, 1.0)

    @staticmethod
    def from_intervals(pairs):
        return Domain(boxes=tuple(((a,), (b,)) for a, b in pairs))

    @staticmethod
    def box(lo, hi):
        return Domain(boxes=((tuple(lo), tuple(hi)),))

    @property
    def k(self):
        return len(self.boxes[0][0])

    @property
    def box_volumes(self):
        return tuple(
            float(np.prod([h - l for l, h in zip(lo, hi)]))
            for lo, hi in self.boxes
        )

    @property
    def total_measure(self):
        return float(sum(self.box_volumes))

    def contains(self, points):
        """Membership mask for an (n, k) array (or (n,) when k = 1)."""
        pts = np.asarray(points, dtype=float)
        if self.k == 1 and pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] != self.k:
            raise GridError(f"expected points of dimension {self.k}")
        mask = np.zeros(pts.shape[0], dtype=bool)
        for lo, hi in self.boxes:
            inside = np.ones(pts.shape[0], dtype=bool)
            for ax in range(self.k):
                inside &= (pts[:, ax] >= lo[ax]) & (pts[:, ax] < hi[ax])
            mask |= inside
        return mask

    def intervals(self):
        """The boxes as (lo, hi) float pairs; k = 1 only."""
        if self.k != 1:
            raise GridError("intervals() requires a one-dimensional domain")
        return [(lo[0], hi[0]) for lo, hi in self.boxes]


class SampledFn:
    """A piecewise-constant function on a domain's uniform cell grid.

    ``values`` has shape (ncells,) for scalar functions or (ncells, d) for
    R^d / C^d valued ones, where ncells = nboxes * m**k.  Values are stored
    read-only; all arithmetic returns new instances.  Two functions are grid
    compatible when they share the same domain and the same ``m``.
    """

    __slots__ = ("domain", "m", "values", "_measures", "_mids")

    def __init__(self, domain, m, values):
        if not isinstance(domain, Domain):
            raise GridError("domain must be a Domain")
        m = int(m)
        if m < 1:
            raise GridError(f"cells per axis must be >= 1, got {m}")
        ncells = len(domain.boxes) * m**domain.k
        arr = np.array(values, copy=True)
        if arr.dtype.kind in "iub":
            arr = arr.astype(float)
        elif arr.dtype.kind not in "fc":
            raise GridError(f"unsupported value dtype {arr.dtype}")
        if arr.ndim == 0:
            arr = np.full(ncells, arr[()])
        if arr.shape[0] != ncells or arr.ndim > 2:
            raise GridError(
                f"values shape {arr.shape} does not match {ncells} cells"
            )
        if arr.ndim == 2 and arr.shape[1] == 1:
            arr = arr[:, 0]
        if not np.all(np.isfinite(arr)):
            raise GridError("cell values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "_measures", None)
        object.__setattr__(self, "_mids", None)

    def __setattr__(self, name, value):
        raise AttributeError("SampledFn is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_callable(cls, domain, m, fn, target_dim=1):
        """Project a vectorized callable by sampling at cell midpoints."""
        obj = cls.zeros(domain, m, target_dim)
        mids = obj.midpoints
        arg = mids[:, 0] if domain.k == 1 else mids
        vals = np.asarray(fn(arg))
        if vals.ndim == 0:
            vals = np.full(obj.ncells if target_dim == 1 else (obj.ncells, target_dim),
                           vals[()])
        return cls(domain, m, vals)

    @classmethod
    def constant(cls, domain, m, value):
        value = np.asarray(value)
        ncells = len(domain.boxes) * m**domain.k
        if value.ndim == 0:
            return cls(domain, m, np.full(ncells, value[()]))
        return cls(domain, m, np.tile(value, (ncells, 1)))

    @classmethod
    def zeros(cls, domain, m, target_dim=1):
        ncells = len(domain.boxes) * m**domain.k
        shape = ncells if target_dim == 1 else (ncells, target_dim)
        return cls(domain, m, np.zeros(shape))

    @classmethod
    def indicator(cls, domain, m, subset):
        """Characteristic function of ``subset`` (a Domain, or (lo, hi)
        interval pairs for k = 1), projected by midpoint membership."""
        if not isinstance(subset, Domain):
            subset = Domain.from_intervals(subset)
        probe = cls.zeros(domain, m)
        vals = subset.contains(probe.midpoints).astype(float)
        return cls(domain, m, vals)

    # -- geometry ----------------------------------------------------------

    @property
    def ncells(self):
        return self.values.shape[0]

    @property
    def target_dim(self):
        return 1 if self.values.ndim == 1 else self.values.shape[1]

    @property
    def is_vector(self):
        return self.values.ndim == 2

    @property
    def cell_measures(self):
        if self._measures is None:
            k, m = self.domain.k, self.m
            per_box = [np.full(m**k, vol / m**k) for vol in self.domain.box_volumes]
            object.__setattr__(self, "_measures", np.concatenate(per_box))
            self._measures.setflags(write=False)
        return self._measures

    @property
    def midpoints(self):
        """(ncells, k) midpoint coordinates, box-major then C-order."""
        if self._mids is None:
            k, m = self.domain.k, self.m
            chunks = []
            for lo, hi in self.domain.boxes:
                axes = [
                    lo[ax] + (np.arange(m) + 0.5) * (hi[ax] - lo[ax]) / m
                    for ax in range(k)
                ]
                mesh = np.meshgrid(*axes, indexing="ij")
                chunks.append(np.stack([g.ravel() for g in mesh], axis=1))
            object.__setattr__(self, "_mids", np.concatenate(chunks, axis=0))
            self._mids.setflags(write=False)
        return self._mids

    def cell_bounds(self):
        """(ncells, k) left and right cell edges (two arrays)."""
        k, m = self.domain.k, self.m
        lefts, rights = [], []
        for lo, hi in self.domain.boxes:
            axl = [lo[ax] + np.arange(m) * (hi[ax] - lo[ax]) / m for ax in range(k)]
            axr = [lo[ax] + (np.arange(m) + 1) * (hi[ax] - lo[ax]) / m for ax in range(k)]
            meshl = np.meshgrid(*axl, indexing="ij")
            meshr = np.meshgrid(*axr, indexing="ij")
            lefts.append(np.stack([g.ravel() for g in meshl], axis=1))
            rights.append(np.stack([g.ravel() for g in meshr], axis=1))
        return np.concatenate(lefts, axis=0), np.concatenate(rights, axis=0)

    def cell_index_of(self, points):
        """Flat cell index per point; -1 for points outside the domain.

        Points exactly on an interior cell edge belong to the right cell
        (half-open convention).
        """
        pts = np.asarray(points, dtype=float)
        if self.domain.k == 1 and pts.ndim == 1:
            pts = pts[:, None]
        k, m = self.domain.k, self.m
        out = np.full(pts.shape[0], -1, dtype=np.int64)
        for b, (lo, hi) in enumerate(self.domain.boxes):
            inside = np.ones(pts.shape[0], dtype=bool)
            for ax in range(k):
                inside &= (pts[:, ax] >= lo[ax]) & (pts[:, ax] < hi[ax])
            if not inside.any():
                continue
            flat = np.zeros(int(inside.sum()), dtype=np.int64)
            for ax in range(k):
                w = (hi[ax] - lo[ax]) / m
                idx = np.floor((pts[inside, ax] - lo[ax]) / w).astype(np.int64)
                np.clip(idx, 0, m - 1, out=idx)
                flat = flat * m + idx
            out[inside] = b * m**k + flat
        return out

    def eval_at(self, points):
        """Piecewise-constant evaluation; zero outside the domain."""
        idx = self.cell_index_of(points)
        if self.is_vector:
            res = np.zeros((idx.size, self.target_dim), dtype=self.values.dtype)
            ok = idx >= 0
            res[ok] = self.values[idx[ok]]
            return res
        res = np.zeros(idx.size, dtype=self.values.dtype)
        ok = idx >= 0
        res[ok] = self.values[idx[ok]]
        return res

    # -- algebra -----------------------------------------------------------

    def same_grid(self, other):
        return (
            isinstance(other, SampledFn)
            and self.domain == other.domain
            and self.m == other.m
            and self.values.shape == other.values.shape
        )

    def _require_same_grid(self, other):
        if not self.same_grid(other):
            raise GridError("grid mismatch: operands need equal domain, m, shape")

    def __add__(self, other):
        self._require_same_grid(other)
        return SampledFn(self.domain, self.m, self.values + other.values)

    def __sub__(self, other):
        self._require_same_grid(other)
        return SampledFn(self.domain, self.m, self.values - other.values)

    def __neg__(self):
        return SampledFn(self.domain, self.m, -self.values)

    def __mul__(self, scalar):
        if isinstance(scalar, SampledFn):
            self._require_same_grid(scalar)
            return SampledFn(self.domain, self.m, self.values * scalar.values)
        return SampledFn(self.domain, self.m, self.values * scalar)

    __rmul__ = __mul__

    def abs(self):
        """|f| as a real scalar function (works for complex scalars too)."""
        if self.is_vector:
            raise GridError("abs() is for scalar functions; use pointwise_norm")
        return SampledFn(self.domain, self.m, np.abs(self.values))

    def clip_at(self, level):
        """min(f, level) cellwise, for real scalar f (truncation ladders)."""
        if self.is_vector or self.values.dtype.kind == "c":
            raise GridError("clip_at() needs a real scalar function")
        return SampledFn(self.domain, self.m, np.minimum(self.values, level))

    def integral(self):
        """Exact integral of f over the domain (sum of value * cell measure)."""
        if self.is_vector:
            return self.values.T @ self.cell_measures
        return complex(self.values @ self.cell_measures) if \
            self.values.dtype.kind == "c" else float(self.values @ self.cell_measures)

    def integral_abs_over(self, subset):
        """Exact integral of |f| over ``subset`` (midpoint membership)."""
        if self.is_vector:
            raise GridError("integral_abs_over() is for scalar functions")
        mask = subset.contains(self.midpoints)
        return float(np.abs(self.values[mask]) @ self.cell_measures[mask])

    def max_abs(self):
        if self.is_vector:
            return float(np.max(np.abs(self.values))) if self.ncells else 0.0
        return float(np.max(np.abs(self.values)))

    # -- serialization -----------------------------------------------------

    def write_csv(self, fobj):
        """Write cells as CSV: per-axis left/right edges, then value columns.

        k = 1 scalar produces the canonical header
        ``cell_left,cell_right,value``.
        """
        left, right = self.cell_bounds()
        k = self.domain.k
        if k == 1:
            header = ["cell_left", "cell_right"]
        else:
            header = [f"axis{ax}_left" for ax in range(k)] + [
                f"axis{ax}_right" for ax in range(k)
            ]
        if self.is_vector:
            header += [f"value_{j}" for j in range(self.target_dim)]
        else:
            header += ["value"]
        w = csv.writer(fobj, lineterminator="\n")
        w.writerow(header)
        vals = self.values if self.is_vector else self.values[:, None]
        complex_vals = np.iscomplexobj(vals)

        def fmt(v):
            return repr(complex(v) if complex_vals else float(v))

        for i in range(self.ncells):
            if k == 1:
                row = [repr(float(left[i, 0])), repr(float(right[i, 0]))]
            else:
                row = [repr(float(x)) for x in left[i]] + [
                    repr(float(x)) for x in right[i]
                ]
            row += [fmt(v) for v in vals[i]]
            w.writerow(row)

    def to_csv(self, path):
        with open(path, "w", newline="") as fobj:
            self.write_csv(fobj)

    def csv_text(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, path_or_text, domain, m):
        """Read values for a known grid, validating the cell edges.

        ``path_or_text`` is a filename or a CSV string.  The rows must match
        the grid's cells in order (rel tolerance 1e-9 on edges).
        """
        if "\n" in str(path_or_text):
            rows = list(csv.reader(io.StringIO(path_or_text)))
        else:
            with open(path_or_text, newline="") as fobj:
                rows = list(csv.reader(fobj))
        if not rows:
            raise GridError("empty CSV")
        header, data = rows[0], rows[1:]
        k = domain.k
        ncols_geom = 2 * k if k > 1 else 2
        value_cols = len(header) - ncols_geom
        if value_cols < 1:
            raise GridError(f"CSV header {header} has no value columns")
        probe = cls.zeros(domain, m)
        if len(data) != probe.ncells:
            raise GridError(
                f"CSV has {len(data)} cells, grid needs {probe.ncells}"
            )
        left, right = probe.cell_bounds()
        has_complex = any(
            "j" in x for row in data for x in row[ncols_geom:]
        )
        vals = np.empty(
            (probe.ncells, value_cols),
            dtype=complex if has_complex else float,
        )
        parse = complex if has_complex else float
        scale = max(1.0, float(np.max(np.abs(right))))
        for i, row in enumerate(data):
            geom = np.array([float(x) for x in row[:ncols_geom]])
            want = np.concatenate([left[i], right[i]]) if k > 1 else np.array(
                [left[i, 0], right[i, 0]]
            )
            if np.max(np.abs(geom - want)) > 1e-9 * scale:
                raise GridError(f"CSV row {i + 1} cell edges do not match grid")
            vals[i] = [parse(x) for x in row[ncols_geom:]]
        return cls(domain, m, vals[:, 0] if value_cols == 1 else vals)


# ---------------------------------------------------------------------------
# Step-function algebra: distribution and rearrangement, both exact.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepDistribution:
    """mu_f(s) = measure{|f| > s} as an exact right-continuous step function.

    ``thresholds`` is increasing with thresholds[0] = 0 and last entry
    max|f|; ``measures[i]`` is the (constant) value of mu_f on
    [thresholds[i], thresholds[i+1]), and mu_f = 0 beyond the last
    threshold.  ``measures`` is nonincreasing.
    """

    thresholds: np.ndarray
    measures: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.thresholds, dtype=float)
        mu = np.asarray(self.measures, dtype=float)
        if t.size != mu.size + 1:
            raise GridError("need len(thresholds) == len(measures) + 1")
        if t.size and t[0] != 0.0:
            raise GridError("thresholds must start at 0")
        if np.any(np.diff(t) <= 0):
            raise GridError("thresholds must strictly increase")
        if np.any(np.diff(mu) > 0):
            raise GridError("measures must be nonincreasing")
        t.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "measures", mu)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self.thresholds, s, side="right") - 1
        out = np.zeros(s.shape)
        inside = (idx >= 0) & (idx < self.measures.size)
        out[inside] = self.measures[idx[inside]]
        return out if out.ndim else float(out)

    @property
    def max_abs(self):
        return float(self.thresholds[-1]) if self.measures.size else 0.0

    def lorentz_integral(self, tau_inverse):
        """Exact integral of tau_inverse(mu_f(s)) ds over [0, max|f|]."""
        if not self.measures.size:
            return 0.0
        widths = np.diff(self.thresholds)
        return float(np.asarray(tau_inverse(self.measures), dtype=float) @ widths)

    def equals(self, other):
        return np.array_equal(self.thresholds, other.thresholds) and np.array_equal(
            self.measures, other.measures
        )


@dataclass(frozen=True)
class StepFn:
    """A nonincreasing right-continuous step function on [0, length).

    ``values[i]`` holds on [edges[i], edges[i+1]); the function is 0 beyond
    edges[-1].  Rearrangements produced by :func:`rearrangement` include an
    explicit zero plateau when |f| has a zero set, so edges[-1] is the
    domain's total measure (as summed in rearranged order).

    ``plateau_measures``, when given, stores the exact plateau widths that
    produced the cumulative ``edges``; :meth:`distribution` prefers them so
    that rearranging and then taking the distribution reproduces the original
    distribution bit for bit (diff-of-cumsum would reintroduce rounding).
    """

    edges: np.ndarray
    values: np.ndarray
    plateau_measures: np.ndarray = None

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if e.size != v.size + 1:
            raise GridError("need len(edges) == len(values) + 1")
        if e.size and e[0] != 0.0:
            raise GridError("edges must start at 0")
        if np.any(np.diff(e) <= 0):
            raise GridError("edges must strictly increase")
        if np.any(np.diff(v) > 0):
            raise GridError("values must be nonincreasing")
        if v.size and v[-1] < 0:
            raise GridError("values must be nonnegative")
        e.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "values", v)
        if self.plateau_measures is not None:
            w = np.asarray(self.plateau_measures, dtype=float)
            if w.size != v.size:
                raise GridError("plateau_measures must match values")
            w.setflags(write=False)
            object.__setattr__(self, "plateau_measures", w)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.edges, t, side="right") - 1
        out = np.zeros(t.shape)
        inside = (idx >= 0) & (idx < self.values.size)
        out[inside] = self.values[idx[inside]]
        return out if out.ndim else float(out)

    @property
    def length(self):
        return float(self.edges[-1])

    def integral(self):
        return float(self.values @ np.diff(self.edges))

    def integral_to(self, T):
        """Exact partial integral over [0, T]."""
        e = np.minimum(self.edges, T)
        return float(self.values @ np.maximum(np.diff(e), 0.0))

    def distribution(self):
        if self.plateau_measures is not None:
            return _distribution_from(self.values, self.plateau_measures)
        return _distribution_from(self.values, np.diff(self.edges))


def _distribution_from(values, measures):
    """Exact StepDistribution of nonnegative step data (value, measure)."""
    vals = np.asarray(values, dtype=float)
    meas = np.asarray(measures, dtype=float)
    uniq, inverse = np.unique(vals, return_inverse=True)
    agg = np.bincount(inverse, weights=meas, minlength=uniq.size)
    # tail[j] = measure{value > uniq[j]}
    tail = np.concatenate([np.cumsum(agg[::-1])[::-1][1:], [0.0]])
    if uniq[0] > 0.0:
        thresholds = np.concatenate([[0.0], uniq])
        mu = np.concatenate([[float(agg.sum())], tail])
    else:
        thresholds = uniq
        mu = tail
    # mu holds on [thresholds[i], thresholds[i+1]); the value beyond the last
    # threshold is 0 by construction, so drop the trailing entry.
    if thresholds.size == 1:  # f == 0
        return StepDistribution(thresholds=np.array([0.0]), measures=np.array([]))
    return StepDistribution(thresholds=thresholds, measures=mu[:-1])


def distribution(f):
    """Exact distribution function mu_f(s) = measure{|f| > s} of a scalar f."""
    if f.is_vector:
        raise GridError("distribution() needs a scalar function; "
                        "reduce vectors with pointwise_norm() first")
    return _distribution_from(np.abs(f.values), f.cell_measures)


def rearrangement(f):
    """Exact non-increasing rearrangement f* on [0, measure(domain))."""
    if f.is_vector:
        raise GridError("rearrangement() needs a scalar function; "
                        "reduce vectors with pointwise_norm() first")
    a = np.abs(f.values)
    uniq, inverse = np.unique(a, return_inverse=True)
    agg = np.bincount(inverse, weights=f.cell_measures, minlength=uniq.size)
    vals = uniq[::-1].copy()
    widths = agg[::-1].copy()
    edges = np.concatenate([[0.0], np.cumsum(widths)])
    return StepFn(edges=edges, values=vals, plateau_measures=widths)


def pointwise_norm(f):
    """Cellwise Euclidean norm |f(x)|_2 of a vector function, as a scalar fn.

    Uses the scaled (overflow-safe) reduction m * sqrt(sum((v/m)^2)) with
    m = max |component|; this is exact when only one component is nonzero,
    so lifting a scalar problem to (f, 0, ..., 0) reproduces the scalar
    pipeline bit for bit.
    """
    if not f.is_vector:
        return f.abs()
    a = np.abs(f.values)
    mx = a.max(axis=1)
    safe = np.where(mx > 0, mx, 1.0)
    r = a / safe[:, None]
    out = mx * np.sqrt((r * r).sum(axis=1))
    return SampledFn(f.domain, f.m, out)
