"""Rank, linearization and Williamson type of singular points.

Pipeline for a point p of an integrable model:

1. the leaf tangent space at p is the kernel of the Casimir differentials
   (the bivector annihilates exactly the Casimir gradients there, so this
   matches the image of the bivector without building leaf charts);
2. the rank of dF restricted to the leaf tangent decides singularity;
3. the linearizations A_j of the Hamiltonian fields, restricted to the
   leaf tangent, are A_j = Pi Hess(f_j) + (dPi) grad(f_j);
4. for rank r > 0 the A_j are pushed to the symplectic quotient of
   ker dF by the span of the field values;
5. a random combination A = sum c_j A_j with simple spectrum sorts the
   eigenvalues into elliptic pairs, hyperbolic pairs and focus quadruples.

Failure to find a simple-spectrum combination after many draws is strong
evidence of degeneracy and is reported as such, never as a crash.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .phasespace import IntegrableModel, PhasePoint

DEFAULT_TOL = 1e-8
DEFAULT_ATTEMPTS = 32
DEFAULT_SEED = 0


class ClassifyError(RuntimeError):
    pass


class OffLeafError(ClassifyError):
    pass


def _as_array(p) -> np.ndarray:
    return p.coordinates if isinstance(p, PhasePoint) else np.asarray(p, dtype=float)


# ---------------------------------------------------------------------------
# Leaf tangent geometry
# ---------------------------------------------------------------------------


@dataclass
class LeafFrame:
    basis: np.ndarray          # N x 2n_leaf, orthonormal columns
    omega: np.ndarray          # symplectic form matrix on the basis
    pi_restricted: np.ndarray  # bivector on the basis


def leaf_frame(model: IntegrableModel, p, tol: float = DEFAULT_TOL, check_leaf: bool = True) -> LeafFrame:
    pt = _as_array(p)
    if check_leaf and model.leaf_residual(pt) > 1e-6:
        raise OffLeafError(
            f"point is off the leaf: max Casimir residual {model.leaf_residual(pt):.3e}"
        )
    N = model.dim
    cas = model.casimir_jets(pt)
    if cas:
        Q = np.array([j.gradient for j in cas])
        _, sv, Vt = np.linalg.svd(Q)
        ncas = len(cas)
        if sv[-1] <= tol * max(sv[0], 1.0):
            raise ClassifyError("Casimir differentials are dependent at this point")
        B = Vt[ncas:].T
    else:
        B = np.eye(N)
    Pi = model.structure.bivector_at(pt, model.params)
    PiB = B.T @ Pi @ B
    dim_leaf = B.shape[1]
    sv = np.linalg.svd(PiB, compute_uv=False)
    if sv[-1] <= tol * max(sv[0], 1.0):
        raise ClassifyError(
            f"bivector rank degenerates at this point (leaf dimension {dim_leaf})"
        )
    omega = np.linalg.inv(PiB)  # omega(v, X_f) = df forces Omega = Pi^-1 on the leaf
    return LeafFrame(B, omega, PiB)


def _leaf_differential(model: IntegrableModel, pt, frame: LeafFrame, jets=None) -> np.ndarray:
    jets = jets or model.component_jets(pt)
    G = np.array([j.gradient for j in jets])
    return G @ frame.basis


def rank_at(model: IntegrableModel, p, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank of dF restricted to the leaf tangent space at p."""
    pt = _as_array(p)
    frame = leaf_frame(model, pt, tol)
    G = _leaf_differential(model, pt, frame)
    sv = np.linalg.svd(G, compute_uv=False)
    scale = max(float(sv[0]), 1.0)
    return int(np.sum(sv > tol * scale))


# ---------------------------------------------------------------------------
# Linearization
# ---------------------------------------------------------------------------


@dataclass
class Linearization:
    matrices: list[np.ndarray]   # operators on the (possibly reduced) tangent
    omega: np.ndarray            # symplectic form on the same basis
    basis: np.ndarray            # ambient N x dim columns spanning the space
    rank: int                    # rank of dF at the point
    n: int                       # number of momentum components
    reduced: bool
    commutator_norm: float
    symplectic_residual: float
    combo: np.ndarray | None = None  # rows: combinations of f_i used


def _field_jacobians(model: IntegrableModel, pt, jets) -> list[np.ndarray]:
    """Ambient Jacobians of the Hamiltonian fields X_{f_j} at pt.

    d(X_f)_k/dc_m = sum_l [ pi_kl d2f/dl dm + (d pi_kl/dc_m) df/dl ].
    """
    Pi = model.structure.bivector_at(pt, model.params)
    dPi = model.structure.bivector_gradients_at(pt, model.params)
    out = []
    for j in jets:
        M = Pi @ j.hessian
        if dPi.any():
            M = M + np.einsum("klm,l->km", dPi, j.gradient)
        out.append(M)
    return out


def _invariant_residuals(mats, omega) -> tuple[float, float]:
    comm = 0.0
    symp = 0.0
    scale = max(max((np.linalg.norm(A) for A in mats), default=0.0), 1.0)
    for i, A in enumerate(mats):
        symp = max(symp, np.linalg.norm(A.T @ omega + omega @ A))
        for Bm in mats[i + 1 :]:
            comm = max(comm, np.linalg.norm(A @ Bm - Bm @ A))
    return comm / scale, symp / (scale * max(np.linalg.norm(omega), 1.0))


def linearize(model: IntegrableModel, p, tol: float = DEFAULT_TOL) -> Linearization:
    """Linearizations A_j of the fields X_{f_j} on the leaf tangent basis."""
    pt = _as_array(p)
    frame = leaf_frame(model, pt, tol)
    jets = model.component_jets(pt)
    B = frame.basis
    mats = [B.T @ M @ B for M in _field_jacobians(model, pt, jets)]
    G = _leaf_differential(model, pt, frame, jets)
    sv = np.linalg.svd(G, compute_uv=False)
    r = int(np.sum(sv > tol * max(float(sv[0]), 1.0)))
    comm, symp = _invariant_residuals(mats, frame.omega)
    return Linearization(
        matrices=mats,
        omega=frame.omega,
        basis=B,
        rank=r,
        n=model.n,
        reduced=False,
        commutator_norm=comm,
        symplectic_residual=symp,
    )


def reduce_at(model: IntegrableModel, p, tol: float = DEFAULT_TOL) -> Linearization:
    """Linearization on the symplectic quotient at a rank-r point, 0 < r < n.

    Momentum components are remixed so that n-r of them have vanishing
    leaf differential at p; their linearizations descend to ker dF / span
    of the Hamiltonian field values.
    """
    pt = _as_array(p)
    frame = leaf_frame(model, pt, tol)
    jets = model.component_jets(pt)
    B = frame.basis
    dim = B.shape[1]
    n = model.n

    G = _leaf_differential(model, pt, frame, jets)
    U, sv, Vt = np.linalg.svd(G)
    scale = max(float(sv[0]), 1.0)
    r = int(np.sum(sv > tol * scale))
    if r == n:
        raise ClassifyError("point is regular: nothing to reduce")
    if r == 0:
        raise ClassifyError("rank-0 point: use linearize directly")

    # combinations with vanishing leaf differential at p
    U2 = U[:, r:]  # n x (n - r)
    K = Vt[r:].T   # kernel of dF on the leaf tangent, dim - r columns

    # span of the Hamiltonian field values (projected to the leaf basis)
    Pi = model.structure.bivector_at(pt, model.params)
    fields = np.array([Pi @ j.gradient for j in jets]).T  # N x n
    T = B.T @ fields
    Ut, svt, _ = np.linalg.svd(T, full_matrices=False)
    rt = int(np.sum(svt > tol * max(float(svt[0]), 1.0)))
    if rt != r:
        raise ClassifyError(
            f"inconsistent rank: dF has rank {r} but fields span {rt} directions"
        )
    Tb = Ut[:, :rt]

    # T must sit inside K
    resid = np.linalg.norm(Tb - K @ (K.T @ Tb))
    if resid > 1e-6:
        raise ClassifyError(f"field span escapes ker dF (residual {resid:.3e}): inconclusive")

    # complement W = K intersect T-perp
    P = K @ K.T - Tb @ Tb.T
    Uw, svw, _ = np.linalg.svd(P)
    dim_w = 2 * (n - r)
    W = Uw[:, :dim_w]
    if svw[dim_w - 1] < 0.5:
        raise ClassifyError("quotient construction failed: complement is degenerate")

    mats_full = [B.T @ M @ B for M in _field_jacobians(model, pt, jets)]
    reduced = []
    for a in range(n - r):
        Ma = sum(U2[i, a] * mats_full[i] for i in range(n))
        reduced.append(W.T @ Ma @ W)
    omega_w = W.T @ frame.omega @ W
    comm, symp = _invariant_residuals(reduced, omega_w)
    return Linearization(
        matrices=reduced,
        omega=omega_w,
        basis=B @ W,
        rank=r,
        n=n,
        reduced=True,
        commutator_norm=comm,
        symplectic_residual=symp,
        combo=U2.T,
    )


# ---------------------------------------------------------------------------
# Williamson type from eigenvalue symmetry classes
# ---------------------------------------------------------------------------


@dataclass
class WilliamsonType:
    rank: int
    k_e: int
    k_h: int
    k_f: int
    eigenvalues: list[complex]
    coefficients: np.ndarray
    gap: float

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.k_e, self.k_h, self.k_f)

    def label(self) -> str:
        names = ["elliptic"] * self.k_e + ["hyperbolic"] * self.k_h + ["focus"] * self.k_f
        return "-".join(names) if names else "regular"


@dataclass
class DegenerateReport:
    attempts: int
    best_gap: float
    reason: str


def _classify_spectrum(eig: np.ndarray, tol: float):
    """Group a simple Hamiltonian spectrum into (k_e, k_h, k_f) or None."""
    k_e = k_h = k_f = 0
    for lam in eig:
        s = tol * (1.0 + abs(lam))
        re_small = abs(lam.real) <= s
        im_small = abs(lam.imag) <= s
        if re_small and im_small:
            return None  # eigenvalue too close to zero
        if re_small:
            if lam.imag > 0:
                k_e += 1
        elif im_small:
            if lam.real > 0:
                k_h += 1
        else:
            if lam.real > 0 and lam.imag > 0:
                k_f += 1
    if 2 * k_e + 2 * k_h + 4 * k_f != len(eig):
        return None
    return k_e, k_h, k_f


def _spectrum_symmetric(eig: np.ndarray, tol: float) -> bool:
    """Spec A is closed under lambda -> -lambda and lambda -> conj(lambda)."""
    for image in (-eig, eig.conj()):
        for lam in image:
            if min(abs(eig - lam)) > tol * (1.0 + abs(lam)):
                return False
    return True


def williamson_type(
    L: Linearization,
    attempts: int = DEFAULT_ATTEMPTS,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> WilliamsonType | DegenerateReport:
    """Type (k_e, k_h, k_f) from a random simple-spectrum combination.

    Coefficients are drawn uniformly from the unit sphere with a fixed
    seed; simple-spectrum combinations are generic for non-degenerate
    points, so exhausting all draws signals a degenerate or borderline
    point and yields a DegenerateReport instead of a type.
    """
    if not L.reduced and L.rank != 0:
        raise ClassifyError("williamson_type needs a rank-0 or reduced linearization")
    mats = L.matrices
    m2 = mats[0].shape[0]
    rng = np.random.default_rng(seed)
    best_gap = 0.0
    for _ in range(max(1, attempts)):
        c = rng.normal(size=len(mats))
        c /= np.linalg.norm(c)
        A = sum(ci * Ai for ci, Ai in zip(c, mats))
        eig = np.linalg.eigvals(A)
        scale = 1.0 + float(np.abs(eig).max())
        gaps = [abs(a - b) for i, a in enumerate(eig) for b in eig[i + 1 :]]
        gap = min(gaps) if gaps else np.inf
        best_gap = max(best_gap, float(gap if np.isfinite(gap) else 0.0))
        if gap <= tol * scale:
            continue
        if not _spectrum_symmetric(eig, max(tol, 1e-7)):
            continue
        counts = _classify_spectrum(eig, tol)
        if counts is None:
            continue
        k_e, k_h, k_f = counts
        expected = L.n - L.rank
        if k_e + k_h + 2 * k_f != expected or 2 * expected != m2:
            return DegenerateReport(attempts, best_gap, "eigenvalue counts inconsistent with rank")
        order = np.lexsort((eig.imag, eig.real))
        return WilliamsonType(L.rank, k_e, k_h, k_f, [complex(z) for z in eig[order]], c, float(gap))
    return DegenerateReport(attempts, best_gap, "no simple-spectrum combination found")


# ---------------------------------------------------------------------------
# Non-degeneracy verdict
# ---------------------------------------------------------------------------


@dataclass
class NonDegeneracyVerdict:
    verdict: str  # "nondegenerate" | "degenerate" | "inconclusive"
    williamson: WilliamsonType | None
    diagnostics: dict = field(default_factory=dict)


def _span_dimension(mats: list[np.ndarray], tol: float) -> int:
    stack = np.array([M.ravel() for M in mats])
    sv = np.linalg.svd(stack, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def is_nondegenerate(
    model: IntegrableModel,
    p,
    tol: float = DEFAULT_TOL,
    attempts: int = DEFAULT_ATTEMPTS,
    seed: int = DEFAULT_SEED,
) -> NonDegeneracyVerdict:
    """Decide non-degeneracy of a singular point.

    Nondegenerate iff the (reduced) linearizations commute, span a space
    of dimension n - r, and some combination has simple spectrum.
    """
    pt = _as_array(p)
    diag: dict = {}
    try:
        r = rank_at(model, pt, tol)
        diag["rank"] = r
        if r == model.n:
            return NonDegeneracyVerdict("inconclusive", None, {**diag, "note": "point is regular"})
        L = linearize(model, pt, tol) if r == 0 else reduce_at(model, pt, tol)
    except ClassifyError as exc:
        diag["error"] = str(exc)
        return NonDegeneracyVerdict("inconclusive", None, diag)

    diag["commutator_norm"] = L.commutator_norm
    diag["symplectic_residual"] = L.symplectic_residual
    if L.commutator_norm > 1e-6:
        return NonDegeneracyVerdict("inconclusive", None, {**diag, "note": "fields do not commute"})

    span = _span_dimension(L.matrices, tol)
    diag["span_dim"] = span
    if span < model.n - L.rank:
        return NonDegeneracyVerdict(
            "degenerate", None, {**diag, "note": "linearizations span too few directions"}
        )

    result = williamson_type(L, attempts=attempts, tol=tol, seed=seed)
    if isinstance(result, DegenerateReport):
        diag["attempts"] = result.attempts
        diag["best_gap"] = result.best_gap
        return NonDegeneracyVerdict("degenerate", None, {**diag, "note": result.reason})
    diag["spectral_gap"] = result.gap
    diag["attempts"] = attempts
    return NonDegeneracyVerdict("nondegenerate", result, diag)


def classify_point(
    model: IntegrableModel,
    p,
    tol: float = DEFAULT_TOL,
    attempts: int = DEFAULT_ATTEMPTS,
    seed: int = DEFAULT_SEED,
) -> dict:
    """One-stop classification used by the CLI: rank plus type or verdict."""
    pt = _as_array(p)
    out: dict = {"point": [float(v) for v in pt], "tol": tol, "seed": seed}
    r = rank_at(model, pt, tol)
    out["rank"] = r
    if r == model.n:
        out["status"] = "regular"
        return out
    verdict = is_nondegenerate(model, pt, tol, attempts, seed)
    out["status"] = verdict.verdict
    out["diagnostics"] = {
        k: (float(v) if isinstance(v, (int, float, np.floating)) and k != "rank" else v)
        for k, v in verdict.diagnostics.items()
    }
    if verdict.williamson is not None:
        w = verdict.williamson
        out["williamson"] = {
            "rank": w.rank,
            "k_e": w.k_e,
            "k_h": w.k_h,
            "k_f": w.k_f,
            "label": w.label(),
            "eigenvalues": [[z.real, z.imag] for z in w.eigenvalues],
            "coefficients": [float(c) for c in w.coefficients],
            "spectral_gap": w.gap,
        }
    return out
