"""Bifurcation diagrams of 2-degree-of-freedom models.

The singular-value set of the momentum map is traced in three stages:
grid scanning for low-rank candidates, Newton refinement onto the
rank-1 locus (or rank-0 points), and pseudo-arclength continuation of
the rank-1 condition with the momentum image recorded along the way.

The rank-1 locus is parametrized by the kernel-vector augmentation

    sum_i v_i grad f_i + sum_j mu_j grad C_j = 0,   C = c,   |v|^2 = 1,

whose solution manifold contains an orbit direction on top of the family
direction; Newton corrections therefore use least squares and the
predictor picks the null direction best aligned with the previous step.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .classify import (
    DEFAULT_TOL,
    ClassifyError,
    leaf_frame,
    linearize,
    rank_at,
    reduce_at,
    williamson_type,
)
from .phasespace import IntegrableModel

DEFAULT_SEED = 0


class TraceError(RuntimeError):
    pass


class RefineDivergence(TraceError):
    pass


class RankCertificationError(TraceError):
    pass


@dataclass
class SingularSeed:
    point: np.ndarray
    rank: int
    value: np.ndarray


@dataclass
class Arc:
    arc_id: int
    values: list[np.ndarray]
    phase_samples: list[np.ndarray]
    label: str = "mixed/unknown"
    cusp_candidates: list[np.ndarray] = field(default_factory=list)
    endpoints: list[str] = field(default_factory=list)


@dataclass
class Vertex:
    point: np.ndarray
    value: np.ndarray
    rank: int
    williamson: tuple[int, int, int] | None = None


@dataclass
class BifurcationDiagram:
    arcs: list[Arc]
    vertices: list[Vertex]
    cusp_candidates: list[np.ndarray]

    def all_arc_values(self) -> np.ndarray:
        pts = [v for arc in self.arcs for v in arc.values]
        return np.array(pts) if pts else np.zeros((0, 2))


# ---------------------------------------------------------------------------
# Residuals for the augmented systems
# ---------------------------------------------------------------------------


def _leaf_project(model: IntegrableModel, p0: np.ndarray, tol: float = 1e-12, max_iter: int = 30):
    """Gauss-Newton projection onto the Casimir constraint levels."""
    if not model.structure.casimirs:
        return np.asarray(p0, dtype=float)
    p = np.asarray(p0, dtype=float).copy()
    targets = np.asarray(model.leaf_values)
    for _ in range(max_iter):
        jets = model.casimir_jets(p)
        res = np.array([j.value for j in jets]) - targets
        if np.max(np.abs(res)) < tol:
            return p
        J = np.array([j.gradient for j in jets])
        step, *_ = np.linalg.lstsq(J, -res, rcond=None)
        p = p + step
        if not np.all(np.isfinite(p)):
            raise RefineDivergence("leaf projection blew up")
    raise RefineDivergence("leaf projection did not converge")


def _rank1_residual(model: IntegrableModel, z: np.ndarray):
    """Residual and Jacobian of the kernel-augmented rank-1 system."""
    N, n = model.dim, model.n
    nc = len(model.structure.casimirs)
    p, v, mu = z[:N], z[N : N + n], z[N + n :]
    jets = model.component_jets(p)
    cjets = model.casimir_jets(p)

    grad_rows = np.zeros(N)
    hess_sum = np.zeros((N, N))
    for vi, j in zip(v, jets):
        grad_rows += vi * j.gradient
        hess_sum += vi * j.hessian
    for mj, j in zip(mu, cjets):
        grad_rows += mj * j.gradient
        hess_sum += mj * j.hessian

    res = np.concatenate(
        [
            grad_rows,
            [j.value - c for j, c in zip(cjets, model.leaf_values)],
            [v @ v - 1.0],
        ]
    )
    J = np.zeros((N + nc + 1, N + n + nc))
    J[:N, :N] = hess_sum
    for i, j in enumerate(jets):
        J[:N, N + i] = j.gradient
    for i, j in enumerate(cjets):
        J[:N, N + n + i] = j.gradient
        J[N + i, :N] = j.gradient
    J[N + nc, N : N + n] = 2.0 * v
    return res, J


def _rank0_residual(model: IntegrableModel, z: np.ndarray):
    """Residual/Jacobian for all momentum differentials vanishing on the leaf.

    Unknowns: point p plus one multiplier row per (component, Casimir).
    """
    N, n = model.dim, model.n
    nc = len(model.structure.casimirs)
    p = z[:N]
    mus = z[N:].reshape(n, nc) if nc else np.zeros((n, 0))
    jets = model.component_jets(p)
    cjets = model.casimir_jets(p)

    rows = []
    for i, j in enumerate(jets):
        g = j.gradient.copy()
        for k, cj in enumerate(cjets):
            g += mus[i, k] * cj.gradient
        rows.append(g)
    res = np.concatenate(rows + [[cj.value - c for cj, c in zip(cjets, model.leaf_values)]])

    J = np.zeros((n * N + nc, N + n * nc))
    for i, j in enumerate(jets):
        H = j.hessian.copy()
        for k, cj in enumerate(cjets):
            H += mus[i, k] * cj.hessian
        J[i * N : (i + 1) * N, :N] = H
        for k, cj in enumerate(cjets):
            J[i * N : (i + 1) * N, N + i * nc + k] = cj.gradient
    for k, cj in enumerate(cjets):
        J[n * N + k, :N] = cj.gradient
    return res, J


def _kernel_vector(model: IntegrableModel, p: np.ndarray, tol: float):
    """Left null vector of dF on the leaf plus least-squares multipliers."""
    frame = leaf_frame(model, p, tol, check_leaf=False)
    jets = model.component_jets(p)
    G = np.array([j.gradient for j in jets]) @ frame.basis
    U, sv, _ = np.linalg.svd(G)
    v = U[:, -1]
    grad = sum(vi * j.gradient for vi, j in zip(v, jets))
    cjets = model.casimir_jets(p)
    if cjets:
        Q = np.array([j.gradient for j in cjets]).T
        mu, *_ = np.linalg.lstsq(Q, -grad, rcond=None)
    else:
        mu = np.zeros(0)
    return v, mu


def _singular_values_on_leaf(model: IntegrableModel, p: np.ndarray, tol: float):
    frame = leaf_frame(model, p, tol, check_leaf=False)
    G = np.array([j.gradient for j in model.component_jets(p)]) @ frame.basis
    return np.linalg.svd(G, compute_uv=False)


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------


def refine_singular_point(
    model: IntegrableModel,
    seed,
    target_rank: int,
    tol: float = 1e-11,
    rank_tol: float = DEFAULT_TOL,
    max_iter: int = 60,
) -> np.ndarray:
    """Newton-polish a seed onto the rank-`target_rank` locus and certify it."""
    p0 = seed.point if isinstance(seed, SingularSeed) else np.asarray(seed, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    N, n = model.dim, model.n
    nc = len(model.structure.casimirs)

    if target_rank == 0:
        z = np.concatenate([p0, np.zeros(n * nc)])
        if nc:
            jets = model.component_jets(p0)
            cjets = model.casimir_jets(p0)
            Q = np.array([j.gradient for j in cjets]).T
            for i, j in enumerate(jets):
                mu, *_ = np.linalg.lstsq(Q, -j.gradient, rcond=None)
                z[N + i * nc : N + (i + 1) * nc] = mu
        residual_fn = _rank0_residual
    elif target_rank == n - 1:
        p0 = _leaf_project(model, p0)
        v, mu = _kernel_vector(model, p0, rank_tol)
        z = np.concatenate([p0, v, mu])
        residual_fn = _rank1_residual
    else:
        raise ValueError("refinement supports target rank 0 or n-1 only")

    best = np.inf
    for _ in range(max_iter):
        res, J = residual_fn(model, z)
        norm = float(np.linalg.norm(res))
        if norm <= tol:
            break
        if not math.isfinite(norm):
            raise RefineDivergence("residual became non-finite")
        step, *_ = np.linalg.lstsq(J, -res, rcond=None)
        if norm > 1e3 * max(best, 1.0):
            raise RefineDivergence(f"Newton diverged (residual {norm:.3e})")
        best = min(best, norm)
        z = z + step
    else:
        raise RefineDivergence(f"no convergence after {max_iter} iterations (residual {best:.3e})")

    p = z[:N]
    r = rank_at(model, p, rank_tol)
    if r != target_rank:
        raise RankCertificationError(f"refined point has rank {r}, wanted {target_rank}")
    return p


# ---------------------------------------------------------------------------
# Scanning
# ---------------------------------------------------------------------------


@dataclass
class ScanParams:
    resolution: int = 7
    candidate_fraction: float = 0.05
    max_candidates: int = 120
    rank0_candidates: int = 40
    dedup_radius: float = 0.05
    seed: int = DEFAULT_SEED


def _sample_box(box, resolution: int, rng) -> np.ndarray:
    lows = np.array([b[0] for b in box])
    highs = np.array([b[1] for b in box])
    dim = len(box)
    if dim <= 4:
        axes = [np.linspace(lo, hi, resolution) for lo, hi in box]
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=-1)
    count = resolution ** 4
    return lows + rng.uniform(size=(count, dim)) * (highs - lows)


def scan_singular_points(
    model: IntegrableModel,
    box,
    resolution: int = 7,
    tol: float = DEFAULT_TOL,
    params: ScanParams | None = None,
) -> list[SingularSeed]:
    """Locate singular points in a box: sample, filter by the smallest
    singular value of dF on the leaf, refine, certify, deduplicate."""
    sp = params or ScanParams(resolution=resolution)
    sp.resolution = resolution
    rng = np.random.default_rng(sp.seed)
    samples = _sample_box(box, sp.resolution, rng)

    scored = []
    for raw in samples:
        try:
            p = _leaf_project(model, raw)
        except RefineDivergence:
            continue
        try:
            sv = _singular_values_on_leaf(model, p, tol)
        except ClassifyError:
            continue
        scale = max(float(sv[0]), 1.0)
        scored.append((float(sv[-1]) / scale, float(sv[0]), p))
    seeds: list[SingularSeed] = []

    def push(point: np.ndarray, r: int):
        for s in seeds:
            if s.rank == r and np.linalg.norm(s.point - point) < sp.dedup_radius:
                return
        seeds.append(SingularSeed(point, r, model.momentum_value(point)))

    # rank-0 attempts from the points where the whole differential is smallest
    by_sigma_max = sorted(scored, key=lambda t: t[1])
    for _, _, p in by_sigma_max[: sp.rank0_candidates]:
        try:
            push(refine_singular_point(model, p, 0, rank_tol=tol, max_iter=30), 0)
        except TraceError:
            continue

    scored.sort(key=lambda t: t[0])
    keep = max(1, min(sp.max_candidates, int(len(scored) * sp.candidate_fraction)))
    for _, _, p in scored[:keep]:
        try:
            push(refine_singular_point(model, p, model.n - 1, rank_tol=tol), model.n - 1)
        except TraceError:
            continue
    return seeds


# ---------------------------------------------------------------------------
# Continuation
# ---------------------------------------------------------------------------


@dataclass
class TraceParams:
    step: float = 0.05
    min_step: float = 1e-6
    max_step: float = 0.2
    max_steps: int = 400
    corrector_tol: float = 1e-10
    corrector_iters: int = 12
    vertex_sigma: float = 5e-3
    cusp_speed: float = 1e-4
    dedup_factor: float = 2.0
    value_box: tuple[float, float] | None = None  # (lo, hi) applied per value axis
    phase_bound: float = 25.0
    label_samples: int = 3
    seed: int = DEFAULT_SEED


def _null_space(J: np.ndarray, rel: float = 1e-7) -> np.ndarray:
    _, sv, Vt = np.linalg.svd(J)
    cutoff = rel * max(float(sv[0]), 1.0)
    ncols = J.shape[1]
    small = [i for i in range(ncols) if i >= len(sv) or sv[i] <= cutoff]
    if not small:
        small = [ncols - 1]
    return Vt[small].T


def _corrector(model, z, tangent, z_pred, params: TraceParams):
    for it in range(params.corrector_iters):
        res, J = _rank1_residual(model, z)
        aug = np.concatenate([res, [tangent @ (z - z_pred)]])
        if np.linalg.norm(aug) <= params.corrector_tol:
            return z, it
        Jaug = np.vstack([J, tangent[None, :]])
        step, *_ = np.linalg.lstsq(Jaug, -aug, rcond=None)
        z = z + step
        if not np.all(np.isfinite(z)):
            return None, it
    res, _ = _rank1_residual(model, z)
    if np.linalg.norm(res) <= 10 * params.corrector_tol:
        return z, params.corrector_iters
    return None, params.corrector_iters


def _value_speed(model, z, direction) -> float:
    N = model.dim
    G = np.array([j.gradient for j in model.component_jets(z[:N])])
    dp = direction[:N]
    return float(np.linalg.norm(G @ dp))


@dataclass
class _BranchResult:
    values: list
    phases: list
    cusp_indices: list
    vertex_indices: list  # (index into values, refined rank-0 point)
    reason: str


def _trace_branch(model, z0, direction, params: TraceParams, tol) -> _BranchResult:
    """One continuation run from z0 along the given tangent direction."""
    N = model.dim
    values = [model.momentum_value(z0[:N])]
    phases = [z0[:N].copy()]
    cusps: list[int] = []
    verts: list[tuple[int, np.ndarray]] = []
    z = z0.copy()
    t_prev = direction
    h = params.step
    steps = 0

    sig_prev = float(_singular_values_on_leaf(model, z0[:N], tol)[0])
    sig_falling = False
    attempt_sigma = max(10.0 * params.step, 0.5)

    def near_known_vertex(p):
        return any(np.linalg.norm(p - vp) < 3.0 * params.step for _, vp in verts)

    def try_vertex(idx: int, p_near: np.ndarray) -> bool:
        """Polish a sigma-minimum onto the rank-0 locus and stitch it in."""
        if near_known_vertex(p_near):
            return False
        try:
            pv = refine_singular_point(model, p_near, 0, rank_tol=tol, max_iter=30)
        except TraceError:
            return False
        if np.linalg.norm(pv - p_near) > max(4.0 * params.step, 0.4):
            return False  # converged to a faraway vertex, not a local pass
        pos = idx + 1
        values.insert(pos, model.momentum_value(pv))
        phases.insert(pos, pv.copy())
        for i, c in enumerate(cusps):
            if c >= pos:
                cusps[i] = c + 1
        verts.append((pos, pv))
        return True

    while steps < params.max_steps:
        _, J = _rank1_residual(model, z)
        T = _null_space(J)
        coeff = T.T @ t_prev
        if np.linalg.norm(coeff) < 1e-10:
            t = T[:, 0]
        else:
            t = T @ coeff
            t /= np.linalg.norm(t)
        z_pred = z + h * t
        z_new, iters = _corrector(model, z_pred.copy(), t, z_pred, params)
        if z_new is not None and np.linalg.norm(z_new - z_pred) > 2.0 * h:
            z_new = None  # corrector hopped onto a different branch
        if z_new is None:
            h *= 0.5
            if h < params.min_step:
                return _BranchResult(values, phases, cusps, verts, "step-failure")
            continue
        if iters <= 2 and h < params.max_step:
            h = min(params.max_step, 1.5 * h)

        p = z_new[:N]
        if np.linalg.norm(p) > params.phase_bound:
            return _BranchResult(values, phases, cusps, verts, "phase-bound")
        val = model.momentum_value(p)
        if params.value_box is not None:
            lo, hi = params.value_box
            if np.any(val < lo) or np.any(val > hi):
                return _BranchResult(values, phases, cusps, verts, "value-box")

        speed = _value_speed(model, z_new, t)
        if speed < params.cusp_speed and len(values) > 2:
            cusps.append(len(values))

        sig = float(_singular_values_on_leaf(model, p, tol)[0])
        if sig < params.vertex_sigma:
            # landed (numerically) on a rank-0 point
            if try_vertex(len(values) - 1, p):
                return _BranchResult(values, phases, cusps, verts, "vertex")
            return _BranchResult(values, phases, cusps, verts, "rank-collapse")
        if sig_falling and sig > sig_prev and sig_prev < attempt_sigma:
            # passed a local minimum of |dF| one step ago: likely a vertex
            try_vertex(len(values) - 1, phases[-1])
        sig_falling = sig < sig_prev
        sig_prev = sig

        values.append(val)
        phases.append(p.copy())
        if steps > 10 and np.linalg.norm(p - z0[:N]) < 0.5 * params.step:
            return _BranchResult(values, phases, cusps, verts, "closed-loop")
        t_prev = t
        z = z_new
        steps += 1
    return _BranchResult(values, phases, cusps, verts, "max-steps")


def _point_label(model, p, tol, seed) -> str | None:
    """Reduced 1-d.f. type at a rank-1 point, None when unclassifiable."""
    try:
        L = reduce_at(model, p, tol)
        w = williamson_type(L, tol=tol, seed=seed)
    except ClassifyError:
        return None
    if not hasattr(w, "triple"):
        return None
    if w.triple == (1, 0, 0):
        return "elliptic-family"
    if w.triple == (0, 1, 0):
        return "hyperbolic-family"
    return None


def _transition_cuts(model, phases, tol, params: TraceParams):
    """Indices where the reduced type changes along a branch, found by
    coarse sampling plus bisection; these are tangency/cusp witnesses."""
    n = len(phases)
    if n < 5:
        return [], {}
    stride = max(2, n // 24)
    idxs = list(range(1, n - 1, stride))
    if idxs[-1] != n - 2:
        idxs.append(n - 2)
    labels = {i: _point_label(model, phases[i], tol, params.seed) for i in idxs}
    cuts = []
    known = [i for i in idxs if labels[i] is not None]
    for a, b in zip(known, known[1:]):
        if labels[a] == labels[b]:
            continue
        lo, hi = a, b
        while hi - lo > 2:
            mid = (lo + hi) // 2
            lab = _point_label(model, phases[mid], tol, params.seed)
            labels[mid] = lab
            if lab is None or lab == labels[lo]:
                lo = mid
            else:
                hi = mid
        cuts.append((lo + hi) // 2)
    return cuts, labels


def _segment_label(model, phases, labels: dict, lo: int, hi: int, tol, seed) -> str:
    seen = {lab for i, lab in labels.items() if lo < i < hi - 1 and lab is not None}
    if not seen:
        lab = _point_label(model, phases[(lo + hi) // 2], tol, seed)
        if lab is not None:
            seen.add(lab)
    if len(seen) == 1:
        return seen.pop()
    return "mixed/unknown"


def _arc_duplicates(arc_vals: list[np.ndarray], existing: list[Arc], radius: float) -> bool:
    if not existing:
        return False
    for other in existing:
        pts = np.array(other.values)
        if pts.size == 0:
            continue
        close = 0
        for v in arc_vals:
            if np.min(np.linalg.norm(pts - v, axis=1)) <= radius:
                close += 1
        if close >= 0.9 * len(arc_vals):
            return True
    return False


def trace_diagram(
    model: IntegrableModel,
    seeds: list[SingularSeed],
    params: TraceParams | None = None,
    tol: float = DEFAULT_TOL,
) -> BifurcationDiagram:
    """Continue every rank-1 seed into a labeled momentum-space arc."""
    params = params or TraceParams()
    rank1 = [s for s in seeds if s.rank == model.n - 1]
    rank0 = [s for s in seeds if s.rank == 0]
    if not rank1 and not rank0:
        return BifurcationDiagram([], [], [])

    vertices: list[Vertex] = []

    def add_vertex(point: np.ndarray):
        for v in vertices:
            if np.linalg.norm(v.point - point) < 1e-6:
                return
        wt = None
        try:
            L = linearize(model, point, tol)
            w = williamson_type(L, tol=tol, seed=params.seed)
            if hasattr(w, "triple"):
                wt = w.triple
        except ClassifyError:
            pass
        vertices.append(Vertex(point, model.momentum_value(point), 0, wt))

    for s in rank0:
        add_vertex(s.point)

    arcs: list[Arc] = []
    dedup_radius = params.dedup_factor * params.step
    arc_id = 0
    for s in rank1:
        try:
            p = refine_singular_point(model, s.point, model.n - 1, rank_tol=tol)
            v, mu = _kernel_vector(model, p, tol)
        except TraceError:
            continue
        z0 = np.concatenate([p, v, mu])
        _, J = _rank1_residual(model, z0)
        T = _null_space(J)
        if T.shape[1] == 0:
            continue
        speeds = [_value_speed(model, z0, T[:, i]) for i in range(T.shape[1])]
        t0 = T[:, int(np.argmax(speeds))]

        fwd = _trace_branch(model, z0, t0, params, tol)
        bwd = _trace_branch(model, z0, -t0, params, tol)
        reason_f, reason_b = fwd.reason, bwd.reason
        values = list(reversed(bwd.values)) + fwd.values[1:]
        phases = list(reversed(bwd.phases)) + fwd.phases[1:]
        if len(values) < 3:
            continue
        nb = len(bwd.values)
        vertex_cuts = set()
        for i, pv in bwd.vertex_indices:
            add_vertex(pv)
            vertex_cuts.add(nb - 1 - i)
        for i, pv in fwd.vertex_indices:
            add_vertex(pv)
            vertex_cuts.add(nb - 1 + i)
        if _arc_duplicates(values, arcs, dedup_radius):
            continue
        speed_cuts = {nb - 1 - i for i in bwd.cusp_indices} | {
            nb - 1 + i for i in fwd.cusp_indices
        }
        type_cuts, labels = _transition_cuts(model, phases, tol, params)
        cut_indices = sorted(
            c for c in speed_cuts | vertex_cuts | set(type_cuts) if 2 <= c <= len(values) - 3
        )
        segments = []
        start = 0
        for cut in cut_indices:
            if cut - start >= 2:
                segments.append((start, cut + 1, reason_b if start == 0 else "cusp", "cusp"))
                start = cut
        segments.append((start, len(values), reason_b if start == 0 else "cusp", reason_f))
        for lo, hi, end_lo, end_hi in segments:
            seg_vals = values[lo:hi]
            seg_phases = phases[lo:hi]
            if len(seg_vals) < 3 or _arc_duplicates(seg_vals, arcs, dedup_radius):
                continue
            cusp_vals = [values[c] for c in cut_indices if lo <= c < hi]
            arcs.append(
                Arc(
                    arc_id,
                    seg_vals,
                    seg_phases,
                    label=_segment_label(model, phases, labels, lo, hi, tol, params.seed),
                    cusp_candidates=cusp_vals,
                    endpoints=[end_lo, end_hi],
                )
            )
            arc_id += 1

    all_cusps = [c for arc in arcs for c in arc.cusp_candidates]
    return BifurcationDiagram(arcs, vertices, all_cusps)


def seed_arcs_near_vertex(
    model: IntegrableModel,
    vertex_point: np.ndarray,
    delta: float = 1e-2,
    directions_per_plane: int = 2,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> list[SingularSeed]:
    """Rank-1 seeds on the singular leaves emanating from a rank-0 point.

    The invariant 2-planes of a generic combination of the linearized
    fields are tangent to the local critical submanifolds; perturbing
    along them and polishing back onto the rank-1 locus yields seeds whose
    arcs pass within O(delta^2) of the vertex value.
    """
    L = linearize(model, vertex_point, tol)
    w = williamson_type(L, tol=tol, seed=seed)
    if not hasattr(w, "coefficients"):
        return []
    A = sum(c * M for c, M in zip(w.coefficients, L.matrices))
    eig, vec = np.linalg.eig(A)
    used = np.zeros(len(eig), dtype=bool)
    planes = []
    for i, lam in enumerate(eig):
        if used[i]:
            continue
        if abs(lam.imag) > 1e-10:
            planes.append(np.stack([vec[:, i].real, vec[:, i].imag]))
            for j in range(len(eig)):
                if not used[j] and abs(eig[j] - lam.conjugate()) < 1e-8 * (1 + abs(lam)):
                    used[j] = True
                    break
        else:
            for j in range(i + 1, len(eig)):
                if not used[j] and abs(eig[j] + lam) < 1e-8 * (1 + abs(lam)):
                    planes.append(np.stack([vec[:, i].real, vec[:, j].real]))
                    used[j] = True
                    break
        used[i] = True

    seeds = []
    for plane in planes:
        for kdir in range(directions_per_plane):
            theta = math.pi * kdir / directions_per_plane
            u = math.cos(theta) * plane[0] + math.sin(theta) * plane[1]
            nu = np.linalg.norm(u)
            if nu < 1e-12:
                continue
            for sign in (1.0, -1.0):
                probe = vertex_point + sign * delta * (L.basis @ (u / nu))
                try:
                    probe = _leaf_project(model, probe)
                    p1 = refine_singular_point(model, probe, model.n - 1, rank_tol=tol)
                except TraceError:
                    continue
                seeds.append(SingularSeed(p1, model.n - 1, model.momentum_value(p1)))
    return seeds


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

_SVG_CLASSES = {
    "elliptic-family": "stroke:#1f77b4;stroke-width:2;fill:none",
    "hyperbolic-family": "stroke:#d62728;stroke-width:2;fill:none;stroke-dasharray:none",
    "mixed/unknown": "stroke:#7f7f7f;stroke-width:1.5;fill:none;stroke-dasharray:4 3",
}


def diagram_to_dict(d: BifurcationDiagram) -> dict:
    return {
        "arcs": [
            {
                "id": a.arc_id,
                "label": a.label,
                "points": [[float(x) for x in v] for v in a.values],
                "endpoints": a.endpoints,
                "cusp_candidates": [[float(x) for x in c] for c in a.cusp_candidates],
            }
            for a in d.arcs
        ],
        "vertices": [
            {
                "point": [float(x) for x in v.point],
                "value": [float(x) for x in v.value],
                "rank": v.rank,
                "williamson": list(v.williamson) if v.williamson else None,
            }
            for v in d.vertices
        ],
        "cusp_candidates": [[float(x) for x in c] for c in d.cusp_candidates],
    }


def _svg_text(d: BifurcationDiagram, width: int = 640, height: int = 480) -> str:
    pts = d.all_arc_values()
    vs = np.array([v.value for v in d.vertices]) if d.vertices else np.zeros((0, 2))
    allpts = np.vstack([pts, vs]) if pts.size or vs.size else np.zeros((0, 2))
    if allpts.size:
        lo = allpts.min(axis=0)
        hi = allpts.max(axis=0)
        span = np.maximum(hi - lo, 1e-9)
        lo = lo - 0.05 * span
        hi = hi + 0.05 * span
        span = hi - lo
    else:
        lo = np.array([0.0, 0.0])
        span = np.array([1.0, 1.0])

    def xy(v):
        x = (v[0] - lo[0]) / span[0] * (width - 20) + 10
        y = height - ((v[1] - lo[1]) / span[1] * (height - 20) + 10)
        return f"{x:.2f},{y:.2f}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<style>",
    ]
    for cls, style in _SVG_CLASSES.items():
        safe = cls.replace("/", "-")
        lines.append(f".{safe} {{{style}}}")
    lines.append(".vertex {fill:#000}")
    lines.append(".cusp {fill:none;stroke:#ff7f0e;stroke-width:1}")
    lines.append("</style>")
    for arc in d.arcs:
        cls = arc.label.replace("/", "-")
        path = " ".join(xy(v) for v in arc.values)
        lines.append(f'<polyline class="{cls}" data-arc="{arc.arc_id}" points="{path}"/>')
    for v in d.vertices:
        x, y = xy(v.value).split(",")
        lines.append(f'<circle class="vertex" cx="{x}" cy="{y}" r="4"/>')
    for c in d.cusp_candidates:
        x, y = xy(c).split(",")
        lines.append(f'<circle class="cusp" cx="{x}" cy="{y}" r="3"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_diagram(d: BifurcationDiagram, fmt: str, path: str) -> None:
    """Write the diagram as svg, csv (arc_id,h,k) or json."""
    if fmt == "svg":
        with open(path, "w") as fh:
            fh.write(_svg_text(d))
    elif fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["arc_id", "h", "k"])
            for arc in d.arcs:
                for v in arc.values:
                    writer.writerow([arc.arc_id, repr(float(v[0])), repr(float(v[1]))])
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump(diagram_to_dict(d), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r} (svg, csv, json)")
