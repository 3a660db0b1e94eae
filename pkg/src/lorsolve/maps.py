"""Piecewise monotone maps, multiplicity counting, change of variables.

A :class:`PiecewiseMap` is a finite list of branches, each a strictly
monotone C^1 map on a half-open interval with a caller-supplied derivative
evaluator.  This branch class is exactly the one for which counting
preimages is trivial (each branch is a bijection onto its image interval)
and for which preimages of null sets are null, so the change-of-variables
identity

    integral_E H(F(x)) |F'(x)| dx  =  integral H(y) N_F(y, E) dy

holds with N_F the Banach indicatrix (number of preimages of y in E).
:func:`change_of_variables_check` verifies it numerically on a grid.

For k > 1 the module provides :class:`TensorMap`, a product of per-axis
one-dimensional maps; evaluation and Jacobians factor across axes.  The
indicatrix and the change-of-variables check stay one-dimensional.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from ._numeric import bisect_increasing
from .grids import Domain, GridError, SampledFn

__all__ = [
    "Branch",
    "PiecewiseMap",
    "TensorMap",
    "MapError",
    "IndicatrixCount",
    "CovReport",
    "banach_indicatrix",
    "indicatrix_profile",
    "change_of_variables_check",
    "identity_map",
    "doubling_map",
    "halving_map",
    "tent3_map",
    "affine_map",
]


class MapError(ValueError):
    """Raised for branches that are not strictly monotone or do not cover."""


_MONO_PROBES = 33


@dataclass(frozen=True)
class Branch:
    """One strictly monotone C^1 piece of a map, on [lo, hi).

    ``fn`` and ``deriv`` must be vectorized.  Strict monotonicity is probed
    at construction on a uniform sample; the derivative may vanish at
    finitely many points but must not change sign.
    """

    lo: float
    hi: float
    fn: Callable
    deriv: Callable

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi) and self.lo < self.hi):
            raise MapError(f"bad branch interval [{self.lo}, {self.hi})")
        xs = np.linspace(self.lo, self.hi, _MONO_PROBES)
        ys = np.asarray(self.fn(xs), dtype=float)
        if not np.all(np.isfinite(ys)):
            raise MapError("branch values must be finite")
        d = np.diff(ys)
        if np.all(d > 0):
            inc = True
        elif np.all(d < 0):
            inc = False
        else:
            raise MapError(
                f"branch on [{self.lo}, {self.hi}) is not strictly monotone"
            )
        ds = np.asarray(self.deriv(xs), dtype=float)
        if inc and np.any(ds < -1e-12) or (not inc) and np.any(ds > 1e-12):
            raise MapError("derivative sign contradicts branch monotonicity")
        object.__setattr__(self, "_increasing", bool(inc))
        object.__setattr__(self, "_ylo", float(min(ys[0], ys[-1])))
        object.__setattr__(self, "_yhi", float(max(ys[0], ys[-1])))

    @property
    def increasing(self):
        return self._increasing

    @property
    def image(self):
        """Closed image interval endpoints (ylo, yhi)."""
        return (self._ylo, self._yhi)

    def invert(self, ys):
        """Preimages of ``ys`` (assumed inside the image) by bisection."""
        ys = np.asarray(ys, dtype=float)
        if self.increasing:
            return bisect_increasing(self.fn, ys, np.full(ys.shape, self.lo),
                                     np.full(ys.shape, self.hi))
        return bisect_increasing(lambda x: -np.asarray(self.fn(x), dtype=float),
                                 -ys, np.full(ys.shape, self.lo),
                                 np.full(ys.shape, self.hi))


def _merge_intervals(ivals):
    ivals = sorted((float(a), float(b)) for a, b in ivals)
    out = []
    for a, b in ivals:
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _intersect_unions(u1, u2):
    out = []
    for a1, b1 in u1:
        for a2, b2 in u2:
            a, b = max(a1, a2), min(b1, b2)
            if a < b:
                out.append((a, b))
    return _merge_intervals(out)


class PiecewiseMap:
    """A one-dimensional map assembled from disjoint monotone branches."""

    def __init__(self, branches, label=""):
        branches = tuple(branches)
        if not branches:
            raise MapError("a map needs at least one branch")
        branches = tuple(sorted(branches, key=lambda b: b.lo))
        for b1, b2 in zip(branches, branches[1:]):
            if b2.lo < b1.hi:
                raise MapError(
                    f"branch intervals [{b1.lo},{b1.hi}) and "
                    f"[{b2.lo},{b2.hi}) overlap"
                )
        self.branches = branches
        self.label = label or f"piecewise[{len(branches)} branches]"

    @property
    def k(self):
        return 1

    def _branch_masks(self, x):
        x = np.asarray(x, dtype=float)
        for b in self.branches:
            yield b, (x >= b.lo) & (x < b.hi)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.nan)
        for b, mask in self._branch_masks(x):
            if mask.any():
                out[mask] = b.fn(x[mask])
        return out if out.ndim else float(out)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.nan)
        for b, mask in self._branch_masks(x):
            if mask.any():
                out[mask] = b.deriv(x[mask])
        return out if out.ndim else float(out)

    def covers(self, points):
        """True where a point lies in some branch interval."""
        pts = np.asarray(points, dtype=float)
        mask = np.zeros(pts.shape, dtype=bool)
        for b in self.branches:
            mask |= (pts >= b.lo) & (pts < b.hi)
        return mask

    def image_intervals(self):
        """The image of the map as a merged union of closed intervals."""
        return _merge_intervals(b.image for b in self.branches)


class TensorMap:
    """A k-dimensional tensor product of one-dimensional maps.

    F(x_1, ..., x_k) = (F_1(x_1), ..., F_k(x_k)); the Jacobian determinant
    is the product of the per-axis derivatives, preimage counts multiply
    across axes, and images are products of per-axis interval unions.
    """

    def __init__(self, axis_maps, label=""):
        axis_maps = tuple(axis_maps)
        if not axis_maps:
            raise MapError("TensorMap needs at least one axis map")
        for f in axis_maps:
            if not isinstance(f, PiecewiseMap):
                raise MapError("TensorMap axes must be PiecewiseMap instances")
        self.axis_maps = axis_maps
        self.label = label or f"tensor[{len(axis_maps)} axes]"

    @property
    def k(self):
        return len(self.axis_maps)

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        cols = [self.axis_maps[ax](pts[:, ax]) for ax in range(self.k)]
        return np.stack(cols, axis=1)

    def deriv(self, points):
        """Jacobian determinant at each point (product of axis derivatives)."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        out = np.ones(pts.shape[0])
        for ax in range(self.k):
            out = out * np.asarray(self.axis_maps[ax].deriv(pts[:, ax]), dtype=float)
        return out

    def covers(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        mask = np.ones(pts.shape[0], dtype=bool)
        for ax in range(self.k):
            mask &= self.axis_maps[ax].covers(pts[:, ax])
        return mask

    def image_boxes(self):
        """Image as a list of per-axis interval-union products."""
        return [f.image_intervals() for f in self.axis_maps]


class IndicatrixCount(NamedTuple):
    count: int
    ambiguous: bool  # y within float tolerance of a branch image endpoint


def _require_1d(F, what):
    if getattr(F, "k", 1) != 1:
        raise MapError(f"{what} requires a one-dimensional map")


def indicatrix_profile(F, E, ys, boundary_atol=1e-12):
    """Vectorized Banach indicatrix N_F(y, E) for an array of levels ``ys``.

    ``E`` restricts preimages to a sub-domain (None means no restriction).
    Returns (counts, ambiguous) arrays; ambiguous marks levels within
    ``boundary_atol`` (scaled) of some branch image endpoint, where the count
    is edge-sensitive.
    """
    _require_1d(F, "indicatrix")
    ys = np.asarray(ys, dtype=float)
    counts = np.zeros(ys.shape, dtype=np.int64)
    ambiguous = np.zeros(ys.shape, dtype=bool)
    for b in F.branches:
        ylo, yhi = b.image
        scale = max(1.0, abs(ylo), abs(yhi))
        tol = boundary_atol * scale
        inside = (ys >= ylo) & (ys < yhi)
        ambiguous |= (np.abs(ys - ylo) <= tol) | (np.abs(ys - yhi) <= tol)
        if E is None:
            counts += inside.astype(np.int64)
            continue
        if inside.any():
            xs = b.invert(ys[inside])
            hit = E.contains(xs)
            # Branch interval membership is implicit (bisection stays in it).
            sub = np.zeros(ys.shape, dtype=bool)
            sub[inside] = hit
            counts += sub.astype(np.int64)
    return counts, ambiguous


def banach_indicatrix(F, E, y):
    """Count preimages of level ``y`` under F inside sub-domain ``E``.

    Each strictly monotone branch contributes at most one preimage, found by
    bisection.  Returns an :class:`IndicatrixCount`; ``ambiguous`` flags a
    level at a branch image endpoint (a measure-zero set where the count
    depends on the half-open convention).
    """
    counts, amb = indicatrix_profile(F, E, np.array([float(y)]))
    return IndicatrixCount(count=int(counts[0]), ambiguous=bool(amb[0]))


@dataclass(frozen=True)
class CovReport:
    map_label: str
    lhs: float
    rhs: float
    rel_gap: float
    tol: float
    passed: bool
    grid_m: int
    ambiguous_levels: int

    def as_text(self):
        lines = [
            f"check = change_of_variables",
            f"map = {self.map_label}",
            f"lhs = {self.lhs!r}",
            f"rhs = {self.rhs!r}",
            f"rel_gap = {self.rel_gap!r}",
            f"tol = {self.tol!r}",
            f"grid_m = {self.grid_m}",
            f"ambiguous_levels = {self.ambiguous_levels}",
            f"verdict = {'PASS' if self.passed else 'FAIL'}",
        ]
        return "\n".join(lines) + "\n"


def change_of_variables_check(F, H, E, m=4096, tol=1e-3):
    """Check integral_E H(F(x))|F'(x)| dx = integral H(y) N_F(y, E) dy.

    ``H`` is a nonnegative scalar :class:`SampledFn` on a grid covering the
    relevant range of F (H is treated as 0 outside its domain).  The left
    side is a midpoint sum on an ``m``-cell grid over ``E``; the right side
    sums H's own cells against the indicatrix at cell midpoints.  Levels
    flagged ambiguous are re-counted at a deterministically jittered level
    just inside the cell.
    """
    _require_1d(F, "change_of_variables_check")
    if H.is_vector or H.values.dtype.kind == "c":
        raise MapError("H must be a real scalar function")
    if np.any(H.values < 0):
        raise MapError("H must be nonnegative")
    grid = SampledFn.zeros(E, m)
    x = grid.midpoints[:, 0]
    if not np.all(F.covers(x)):
        raise MapError("map branches do not cover the integration domain")
    fx = np.asarray(F(x), dtype=float)
    jac = np.abs(np.asarray(F.deriv(x), dtype=float))
    lhs = float((H.eval_at(fx) * jac) @ grid.cell_measures)

    ylev = H.midpoints[:, 0]
    counts, amb = indicatrix_profile(F, E, ylev)
    n_amb = int(amb.sum())
    if n_amb:
        # Deterministic jitter: re-probe just right of the ambiguous level.
        width = (ylev[1] - ylev[0]) if ylev.size > 1 else 1.0
        redo, _ = indicatrix_profile(F, E, ylev[amb] + 1e-6 * width)
        counts = counts.copy()
        counts[amb] = redo
    rhs = float((H.values * counts) @ H.cell_measures)

    scale = max(abs(lhs), abs(rhs), 1e-30)
    rel_gap = abs(lhs - rhs) / scale
    return CovReport(
        map_label=F.label,
        lhs=lhs,
        rhs=rhs,
        rel_gap=rel_gap,
        tol=float(tol),
        passed=bool(rel_gap <= tol),
        grid_m=int(m),
        ambiguous_levels=n_amb,
    )


# ---------------------------------------------------------------------------
# Gallery of standard test maps on (0, 1).
# ---------------------------------------------------------------------------


def affine_map(pieces, label=""):
    """Build a map from affine pieces (lo, hi, slope, intercept)."""
    branches = []
    for lo, hi, a, c in pieces:
        a, c = float(a), float(c)
        branches.append(
            Branch(lo=float(lo), hi=float(hi),
                   fn=(lambda a=a, c=c: (lambda x: a * np.asarray(x, dtype=float) + c))(),
                   deriv=(lambda a=a: (lambda x: np.full(np.shape(x), a)))())
        )
    return PiecewiseMap(branches, label=label)


def identity_map(lo=0.0, hi=1.0):
    return affine_map([(lo, hi, 1.0, 0.0)], label="identity")


def doubling_map():
    """x -> 2x mod 1 on [0, 1): two affine branches with slope 2."""
    return affine_map(
        [(0.0, 0.5, 2.0, 0.0), (0.5, 1.0, 2.0, -1.0)], label="doubling"
    )


def halving_map():
    """x -> x/2 on [0, 1); image [0, 1/2)."""
    return affine_map([(0.0, 1.0, 0.5, 0.0)], label="halving")


def tent3_map():
    """Three full zigzag branches on [0, 1), |slope| = 3 (N_F = 3 a.e.)."""
    return affine_map(
        [
            (0.0, 1.0 / 3.0, 3.0, 0.0),
            (1.0 / 3.0, 2.0 / 3.0, -3.0, 2.0),
            (2.0 / 3.0, 1.0, 3.0, -2.0),
        ],
        label="tent3",
    )
