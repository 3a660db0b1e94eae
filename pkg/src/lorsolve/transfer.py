"""The weighted composition operator and its contraction audit.

The operator acts on sampled functions by

    (P phi)(x) = sum_n g_n(x) * phi(f_n(x)),

with composition realized as midpoint-to-cell lookup (half-open cells, no
interpolation), so P maps the piecewise-constant class to itself and is
exactly linear in cell arithmetic.

The audit checks, at every cell midpoint and for every n, the contraction
inequality

    |g_n(x)| <= alpha * min{ |J_n(x)| / (K*L), 1/N },

where K bounds the preimage multiplicity of each map, L the overlap order
of their images, and N is the number of maps.  K and L are declared by the
caller and cross-checked against estimates (never silently inferred); a
PASS is evidence at grid resolution, a FAIL is authoritative.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .grids import Domain, GridError, SampledFn
from .maps import MapError, PiecewiseMap, TensorMap, _intersect_unions, indicatrix_profile
from .norms import lorentz_norm, lorentz_norm_vector
from .young import derive_tau

__all__ = [
    "InstanceError",
    "AuditFailure",
    "ProblemInstance",
    "apply_P",
    "estimate_multiplicity",
    "OverlapEstimate",
    "estimate_overlap_L",
    "AuditReport",
    "audit_contraction",
]

_CLAMP_TOL = 1e-12
_OUTSIDE_FRACTION_LIMIT = 1e-3


class InstanceError(ValueError):
    """Raised for ill-formed problem instances."""


class AuditFailure(RuntimeError):
    """Raised when a solve is attempted on an instance whose audit FAILed."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            "contraction audit FAILed "
            f"(worst ratio {report.feasible_alpha!r} vs alpha {report.alpha!r}); "
            "pass force=True to iterate anyway"
        )


def _clamp_to_domain(points, domain):
    """Project points onto the closure of the nearest domain box.

    Returns (clamped points, distances); interior points come back with
    distance 0.  The clamp lands on the boundary; a half-open-box nudge to
    the interior is the caller's job via cell lookup on the clamped point.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    best = None
    best_d = np.full(pts.shape[0], np.inf)
    for lo, hi in domain.boxes:
        lo = np.asarray(lo)
        hi = np.asarray(hi)
        cl = np.clip(pts, lo, hi)
        d = np.linalg.norm(pts - cl, axis=1)
        if best is None:
            best, best_d = cl, d
        else:
            take = d < best_d
            best = np.where(take[:, None], cl, best)
            best_d = np.where(take, d, best_d)
    return best, best_d


class ProblemInstance:
    """Fixed data of one functional equation phi = P phi + h0.

    ``maps`` are the inner maps f_n (PiecewiseMap for 1-d domains, TensorMap
    otherwise), ``coeffs`` the weights g_n (scalar SampledFn on h0's grid,
    or vectorized callables sampled at construction), ``h0`` the
    inhomogeneity (scalar or vector, real or complex).  K_decl and L_decl
    are the declared multiplicity and overlap bounds entering the audited
    inequality; alpha in [0, 1/2) is the declared contraction parameter;
    psi selects the Young function generating the norm.

    Construction precomputes, per map, the target cell index of every
    midpoint image; midpoints mapping outside the domain are clamped to the
    nearest cell (counted, and allowed only within a small tolerance for
    more than 0.1% of cells).
    """

    def __init__(self, domain, maps, coeffs, h0, K_decl, L_decl, alpha, psi,
                 label=""):
        if not isinstance(h0, SampledFn):
            raise InstanceError("h0 must be a SampledFn")
        if h0.domain != domain:
            raise InstanceError("h0 is not sampled on the instance domain")
        maps = tuple(maps)
        coeffs = tuple(coeffs)
        if not maps:
            raise InstanceError("an instance needs at least one map")
        if len(maps) != len(coeffs):
            raise InstanceError(
                f"{len(maps)} maps but {len(coeffs)} coefficients"
            )
        for F in maps:
            if getattr(F, "k", None) != domain.k:
                raise InstanceError(
                    f"map {getattr(F, 'label', F)!r} has dimension "
                    f"{getattr(F, 'k', None)}, domain has {domain.k}"
                )
        if not (isinstance(K_decl, (int, np.integer)) and K_decl >= 1):
            raise InstanceError("K_decl must be an integer >= 1")
        if not (isinstance(L_decl, (int, np.integer))
                and 1 <= L_decl <= len(maps)):
            raise InstanceError("L_decl must be an integer in 1..N")
        alpha = float(alpha)
        if not (0.0 <= alpha < 0.5):
            raise InstanceError("alpha must lie in [0, 1/2)")

        self.domain = domain
        self.maps = maps
        self.h0 = h0
        self.K_decl = int(K_decl)
        self.L_decl = int(L_decl)
        self.alpha = alpha
        self.psi = psi
        self.tau = derive_tau(psi)
        self.label = label or "instance"

        sampled = []
        for i, g in enumerate(coeffs):
            if not isinstance(g, SampledFn):
                g = SampledFn.from_callable(domain, h0.m, g)
            if g.domain != h0.domain or g.m != h0.m:
                raise InstanceError(f"coeff {i} is not on h0's grid")
            if g.is_vector:
                raise InstanceError(f"coeff {i} must be scalar-valued")
            sampled.append(g)
        self.coeffs = tuple(sampled)

        mids = h0.midpoints
        x = mids[:, 0] if domain.k == 1 else mids
        idx_arrays = []
        jac_arrays = []
        clamped_within = 0
        clamped_beyond = 0
        for F in maps:
            covered = F.covers(x)
            if not np.all(covered):
                raise InstanceError(
                    f"map {F.label!r} does not cover all grid midpoints "
                    f"({int((~covered).sum())} uncovered)"
                )
            y = np.asarray(F(x), dtype=float)
            ypts = y[:, None] if y.ndim == 1 else y
            idx = h0.cell_index_of(ypts)
            outside = idx < 0
            if outside.any():
                cl, dist = _clamp_to_domain(ypts[outside], domain)
                beyond = dist > _CLAMP_TOL
                clamped_within += int((~beyond).sum())
                clamped_beyond += int(beyond.sum())
                # Nudge onto the boundary and look the cell up again; exact
                # upper-boundary points belong to the last cell.
                fixed = h0.cell_index_of(cl)
                still = fixed < 0
                if still.any():
                    eps = 1e-9 / h0.m
                    fixed2 = h0.cell_index_of(cl[still] - eps)
                    fixed[still] = fixed2
                if np.any(fixed < 0):
                    raise InstanceError(
                        f"map {F.label!r}: could not clamp all outside "
                        "image points onto the domain"
                    )
                idx = idx.copy()
                idx[outside] = fixed
            idx_arrays.append(idx)
            jac_arrays.append(np.abs(np.asarray(F.deriv(x), dtype=float)))
        n_checks = len(maps) * x.shape[0]
        if clamped_beyond > _OUTSIDE_FRACTION_LIMIT * n_checks:
            raise InstanceError(
                f"{clamped_beyond} of {n_checks} midpoint images fall "
                "outside the domain beyond tolerance; the maps are not "
                "self-maps of the domain"
            )
        self._target_idx = tuple(idx_arrays)
        self._abs_jac = tuple(jac_arrays)
        self.clamped_within_tol = clamped_within
        self.clamped_beyond_tol = clamped_beyond

    # -- derived quantities --------------------------------------------------

    @property
    def n_maps(self):
        return len(self.maps)

    @property
    def m(self):
        return self.h0.m

    @property
    def psi_label(self):
        return self.psi.label

    def norm(self, f):
        """The instance norm: exact distribution-route Lorentz norm."""
        if f.is_vector:
            return lorentz_norm_vector(f, self.tau).value
        return lorentz_norm(f, self.tau, "distribution").value

    def apply(self, phi):
        """Evaluate P phi on the instance grid (exact cell arithmetic).

        phi may have any target dimension; only the grid must match.
        """
        if phi.domain != self.h0.domain or phi.m != self.h0.m:
            raise InstanceError("phi is not on the instance grid")
        vals = phi.values
        if phi.is_vector:
            acc = np.zeros(vals.shape,
                           dtype=np.result_type(vals, *[g.values for g in self.coeffs]))
            for g, idx in zip(self.coeffs, self._target_idx):
                acc = acc + g.values[:, None] * vals[idx]
        else:
            acc = np.zeros(vals.shape,
                           dtype=np.result_type(vals, *[g.values for g in self.coeffs]))
            for g, idx in zip(self.coeffs, self._target_idx):
                acc = acc + g.values * vals[idx]
        return SampledFn(self.domain, self.m, acc)


def apply_P(phi, inst):
    """Functional form of :meth:`ProblemInstance.apply`."""
    return inst.apply(phi)


def estimate_multiplicity(F, probes=512, domain=None):
    """Estimate the essential preimage multiplicity of a 1-d map.

    Probes the Banach indicatrix on a uniform interior grid of levels over
    ``domain`` (default: the span of the branch intervals); levels flagged
    as image-endpoint-ambiguous are re-probed with a deterministic quarter-
    spacing jitter.  For branch maps this equals the true essential
    multiplicity once the probes avoid the finite set of branch-image
    endpoints.
    """
    if getattr(F, "k", 1) != 1:
        raise MapError("estimate_multiplicity requires a one-dimensional map")
    if domain is None:
        lo = min(b.lo for b in F.branches)
        hi = max(b.hi for b in F.branches)
        intervals = [(lo, hi)]
    else:
        intervals = domain.intervals()
    best = 0
    for lo, hi in intervals:
        step = (hi - lo) / probes
        ys = lo + (np.arange(probes) + 0.5) * step
        counts, amb = indicatrix_profile(F, domain, ys)
        if amb.any():
            redo, _ = indicatrix_profile(F, domain, ys[amb] + 0.25 * step)
            counts = counts.copy()
            counts[amb] = redo
        if counts.size:
            best = max(best, int(counts.max()))
    return best


class OverlapEstimate(NamedTuple):
    L: int
    table: tuple  # ((subset indices 1-based, intersection measure), ...)


def estimate_overlap_L(maps):
    """Largest number of maps whose image unions intersect with positive
    measure, computed exactly from branch image intervals (1-d only).

    Returns the order L and the per-subset intersection-measure table
    (all nonempty subsets for up to 6 maps, positive-measure rows only
    beyond that).
    """
    maps = list(maps)
    if any(getattr(F, "k", 1) != 1 for F in maps):
        raise MapError("estimate_overlap_L requires one-dimensional maps")
    n = len(maps)
    if n == 0:
        raise MapError("estimate_overlap_L needs at least one map")
    if n > 16:
        raise MapError("overlap enumeration is limited to 16 maps")
    images = [F.image_intervals() for F in maps]
    table = []
    L = 0
    keep_all = n <= 6
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            inter = images[subset[0]]
            for j in subset[1:]:
                inter = _intersect_unions(inter, images[j])
                if not inter:
                    break
            measure = float(sum(b - a for a, b in inter))
            if measure > 0.0:
                L = max(L, size)
            if keep_all or measure > 0.0:
                table.append((tuple(i + 1 for i in subset), measure))
    return OverlapEstimate(L=L, table=tuple(table))


@dataclass(frozen=True)
class AuditReport:
    """Outcome of the contraction audit at grid resolution.

    ``feasible_alpha`` is the largest cellwise ratio
    |g_n(x)| * max{K*L/|J_n(x)|, N} over all maps and cells: the smallest
    alpha the grid data would admit.  PASS requires it to be at most the
    declared alpha (+1e-12) and the declared K, L to dominate the
    estimates.
    """

    instance_label: str
    psi_label: str
    n_maps: int
    grid_m: int
    alpha: float
    k_decl: int
    k_est: int
    l_decl: int
    l_est: int
    multiplicities: tuple
    overlap_table: tuple
    per_map_worst: tuple
    feasible_alpha: float
    worst_witness: str
    clamped_within_tol: int
    clamped_beyond_tol: int
    passed: bool

    def as_text(self):
        lines = [
            "check = contraction_audit",
            f"instance = {self.instance_label}",
            f"psi = {self.psi_label}",
            f"n_maps = {self.n_maps}",
            f"grid_m = {self.grid_m}",
            f"alpha = {self.alpha!r}",
            f"K_declared = {self.k_decl}",
            f"K_estimated = {self.k_est}",
            f"L_declared = {self.l_decl}",
            f"L_estimated = {self.l_est}",
            f"multiplicity_estimates = {list(self.multiplicities)!r}",
        ]
        for subset, measure in self.overlap_table:
            lines.append(
                "overlap_measure_" + "_".join(map(str, subset)) + f" = {measure!r}"
            )
        for i, worst in enumerate(self.per_map_worst, start=1):
            lines.append(f"worst_ratio_map_{i} = {worst!r}")
        lines += [
            f"feasible_alpha = {self.feasible_alpha!r}",
            f"worst_witness = {self.worst_witness}",
            f"clamped_within_tol = {self.clamped_within_tol}",
            f"clamped_beyond_tol = {self.clamped_beyond_tol}",
            "note = PASS is evidence at grid resolution; FAIL is authoritative",
            f"verdict = {'PASS' if self.passed else 'FAIL'}",
        ]
        return "\n".join(lines) + "\n"


def audit_contraction(inst, probes=512):
    """Audit the contraction inequality on the instance grid.

    Checks, per map and cell midpoint, the ratio form of the inequality
    (see :class:`AuditReport`), and cross-checks the declared K and L
    against :func:`estimate_multiplicity` and :func:`estimate_overlap_L`
    (1-d domains; in higher dimension the declared values stand
    unestimated and the cellwise inequality alone decides).
    """
    n = inst.n_maps
    kl = float(inst.K_decl * inst.L_decl)
    per_map_worst = []
    worst = 0.0
    witness = "none"
    mids = inst.h0.midpoints
    for i, g in enumerate(inst.coeffs):
        absg = np.abs(g.values)
        absj = inst._abs_jac[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = np.maximum(kl / absj, float(n))
            ratio = np.where(absg == 0.0, 0.0, absg * factor)
        w = float(np.max(ratio)) if ratio.size else 0.0
        per_map_worst.append(w)
        if w > worst or witness == "none":
            worst = max(worst, w)
            c = int(np.argmax(ratio))
            witness = (
                f"map {i + 1}, cell {c} at x = {mids[c].tolist()!r}: "
                f"|g| = {float(absg[c])!r}, |J| = {float(absj[c])!r}, "
                f"ratio = {float(ratio[c])!r}"
            )

    if inst.domain.k == 1:
        mults = tuple(
            estimate_multiplicity(F, probes=probes, domain=inst.domain)
            for F in inst.maps
        )
        k_est = max(mults)
        overlap = estimate_overlap_L(inst.maps)
        l_est = overlap.L
        table = overlap.table
    else:
        mults = ()
        k_est = 0
        l_est = 0
        table = ()

    passed = (
        worst <= inst.alpha + 1e-12
        and inst.K_decl >= k_est
        and inst.L_decl >= l_est
    )
    return AuditReport(
        instance_label=inst.label,
        psi_label=inst.psi_label,
        n_maps=n,
        grid_m=inst.m,
        alpha=inst.alpha,
        k_decl=inst.K_decl,
        k_est=k_est,
        l_decl=inst.L_decl,
        l_est=l_est,
        multiplicities=mults,
        overlap_table=table,
        per_map_worst=tuple(per_map_worst),
        feasible_alpha=worst,
        worst_witness=witness,
        clamped_within_tol=inst.clamped_within_tol,
        clamped_beyond_tol=inst.clamped_beyond_tol,
        passed=bool(passed),
    )
