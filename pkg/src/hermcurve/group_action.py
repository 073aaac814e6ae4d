"""Projective unitary groups acting on degree-(q+1) curves.

Curves are held as reduced 4 x 4 matrices F* and compared by fingerprint
(the sorted image of P^1(F_{q^4})).  Group elements are 4 x 4 matrices in
projective canonical form: first nonzero entry scaled to 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .field_tower import FieldCtx
from .hermitian_geometry import HermitianSurface, projective_points, rational_points
from .matrix_gf import (
    Mat,
    hermitian_decompose,
    vcanonical,
    vdet,
    vmatmul,
    vnormalize,
    vtranspose,
)
from .rational_curves import (
    ReducedCurveMatrix,
    b_from_gram,
    encode_points,
    fermat_curve,
    fingerprint_codes,
    j_matrix,
    phi_star,
    vphi_star,
)


class GroupError(RuntimeError):
    pass


# unitarity -----------------------------------------------------------------


def _scalar_of(M) -> int | None:
    """lam if M == lam * I with lam != 0, else None."""
    M = M.a if isinstance(M, Mat) else M
    lam = int(M[0, 0])
    if lam == 0 or np.any(M != np.eye(M.shape[0], dtype=np.int64) * lam):
        return None
    return lam


def unitary_check(Q: Mat, exp: int | None = None) -> int | None:
    """lam with Q^T Q^(exp) = lam I, else None.

    exp defaults to q for 4 x 4 matrices and q^2 for 2 x 2 ones."""
    if exp is None:
        exp = Q.ctx.q if Q.rows == 4 else Q.ctx.q**2
    return _scalar_of(Q.T @ Q.pow_entries(exp))


def automorphism_multiplier(Q: Mat, A: Mat) -> int | None:
    """lam with Q^T A Q^(q) = lam A, else None."""
    ctx = Q.ctx
    M = Q.T @ A @ Q.frob(1)
    k = next(i for i in range(16) if A.a.flat[i])
    lam = ctx.div(int(M.a.flat[k]), int(A.a.flat[k]))
    if lam == 0 or M != A.scale(lam):
        return None
    return lam


def vautomorphism_mask(ctx: FieldCtx, Qs, A: Mat):
    Qs = np.asarray(Qs, dtype=np.int64)
    M = vmatmul(ctx, vmatmul(ctx, vtranspose(Qs), A.a), ctx.vfrob(Qs, 1))
    k = int(np.flatnonzero(A.a)[0])
    lam = ctx.vmul(M.reshape(len(M), -1)[:, k], ctx.inv(int(A.a.flat[k])))
    return (lam != 0) & np.all(M == ctx.vmul(A.a[None], lam[:, None, None]), axis=(1, 2))


@dataclass(frozen=True)
class ProjectiveUnitary:
    Q: Mat
    lam: int

    @classmethod
    def from_matrix(cls, Q: Mat, A: Mat | None = None) -> ProjectiveUnitary:
        Q = Q.canonical()
        lam = unitary_check(Q) if A is None else automorphism_multiplier(Q, A)
        if lam is None:
            raise GroupError("matrix is not a projective automorphism")
        return cls(Q, lam)


def group_order(n: int, q: int) -> int:
    """|PGU_4(F_{q^2})| for n = 4, |PGU_2(F_{q^4})| for n = 2."""
    if n == 4:
        return q**6 * (q**4 - 1) * (q**3 + 1) * (q**2 - 1)
    if n == 2:
        return q**2 * (q**4 - 1)
    raise ValueError(f"unsupported n = {n}")


# generators --------------------------------------------------------------


def _perm_matrix(ctx, perm):
    m = np.zeros((4, 4), dtype=np.int64)
    for i, j in enumerate(perm):
        m[j, i] = 1
    return Mat(ctx, m)


def unitary_generators(ctx: FieldCtx) -> list[Mat]:
    """Generators of GU_4(F_{q^2}) for the form x^T y^(q), modulo scalars.

    Monomial part: a transposition, a 4-cycle and diag(theta, 1, 1, 1) with
    theta of order q + 1.  Non-monomial part: the quasi-reflection
    I + (theta - 1)/N v v^T^(q) for the first anisotropic v with two or more
    nonzero coordinates, N = v^T v^(q).
    """
    q = ctx.q
    gens = [_perm_matrix(ctx, (1, 0, 2, 3)), _perm_matrix(ctx, (1, 2, 3, 0))]
    theta = next(x for x in ctx.subfield_elements(2) if x and ctx.order_of(x) == q + 1)
    gens.append(Mat(ctx, np.diag([theta, 1, 1, 1])))
    for v in projective_points(ctx, 4, 2):
        if np.count_nonzero(v) < 2:
            continue
        norm = ctx.sum(ctx.pow(int(x), q + 1) for x in v)
        if norm:
            break
    c = ctx.div(ctx.sub(theta, 1), norm)
    col = Mat(ctx, v[:, None])
    refl = Mat.identity(ctx, 4) + (col @ col.T.frob(1)).scale(c)
    gens.append(refl)
    return gens


def surface_frame(S: HermitianSurface) -> Mat:
    """B with A = B^T B^(q); B^-1 maps the Fermat picture onto S."""
    return hermitian_decompose(S.A, S.q)


def generators(S: HermitianSurface) -> list[ProjectiveUnitary]:
    """Generators of Aut(S), conjugated from the Fermat surface."""
    if not S.hermitian_flag:
        raise GroupError("generators are available for Hermitian A only")
    ctx = S.ctx
    B = surface_frame(S)
    Binv = B.inv()
    return [ProjectiveUnitary.from_matrix(Binv @ g @ B, S.A) for g in unitary_generators(ctx)]


def _keys(arr):
    flat = np.ascontiguousarray(arr.reshape(len(arr), -1))
    return [r.tobytes() for r in flat]


def enumerate_group(gens: list[ProjectiveUnitary], limit: int = 100_000) -> np.ndarray:
    """Breadth-first closure of the generators; (n, 4, 4) canonical matrices."""
    ctx = gens[0].Q.ctx
    ident = np.eye(4, dtype=np.int64)[None]
    seen = {_keys(ident)[0]}
    elems = [ident]
    frontier = ident
    G = [g.Q.a for g in gens]
    while len(frontier):
        new = []
        for g in G:
            imgs = vcanonical(ctx, vmatmul(ctx, g, frontier))
            for key, img in zip(_keys(imgs), imgs):
                if key not in seen:
                    seen.add(key)
                    new.append(img)
        if len(seen) > limit:
            raise GroupError(f"group closure exceeds {limit} elements")
        frontier = np.array(new, dtype=np.int64).reshape(-1, 4, 4)
        elems.append(frontier)
    return np.concatenate(elems)


# curves under the group ----------------------------------------------------


def seed_curve(S: HermitianSurface) -> ReducedCurveMatrix:
    """The explicit Fermat curve moved onto S; its Gram matrix is D_J."""
    ctx = S.ctx
    Fj = fermat_curve(ctx).reduced.Fstar
    return ReducedCurveMatrix(surface_frame(S).inv() @ Fj, S.q)


def act(Q: ProjectiveUnitary, Fstar: ReducedCurveMatrix, S: HermitianSurface) -> ReducedCurveMatrix:
    out = ReducedCurveMatrix(Q.Q @ Fstar.Fstar, Fstar.q)
    if b_from_gram(out.gram(S.A)) is None:
        raise GroupError("image left the set M: Q is not an automorphism of S")
    return out


def fingerprint_key(Fstar: ReducedCurveMatrix) -> bytes:
    return fingerprint_codes(Fstar.ctx, Fstar.Fstar.a).tobytes()


def curves_equal(F1: ReducedCurveMatrix, F2: ReducedCurveMatrix) -> bool:
    return fingerprint_key(F1) == fingerprint_key(F2)


def curve_orbit(S: HermitianSurface, seed: ReducedCurveMatrix | None = None, gens=None):
    """Breadth-first orbit of a curve; returns (reduced matrices (n,4,4), fingerprint codes (n,K))."""
    ctx = S.ctx
    seed = seed or seed_curve(S)
    gens = gens or generators(S)
    V_codes = fingerprint_codes(ctx, seed.Fstar.a[None])
    seen = {V_codes[0].tobytes()}
    reps, codes = [seed.Fstar.a[None]], [V_codes]
    frontier = seed.Fstar.a[None]
    while len(frontier):
        new, new_codes = [], []
        for g in gens:
            imgs = vmatmul(ctx, g.Q.a, frontier)
            fps = fingerprint_codes(ctx, imgs)
            for img, fp in zip(imgs, fps):
                key = fp.tobytes()
                if key not in seen:
                    seen.add(key)
                    new.append(img)
                    new_codes.append(fp)
        frontier = np.array(new, dtype=np.int64).reshape(-1, 4, 4)
        if len(new):
            reps.append(frontier)
            codes.append(np.array(new_codes))
    return np.concatenate(reps), np.concatenate(codes)


# stabilizers ---------------------------------------------------------------


def pgu2_classes(ctx: FieldCtx, chunk: int = 1 << 20) -> np.ndarray:
    """Canonical g in GL_2(F_{q^4}) with g^T g^(q^2) = lam I, one per class mod scalars.

    Brute force over canonical matrices [[1, b], [c, d]] and [[0, 1], [c, d]].
    """
    N = ctx.order
    Q2 = ctx.q**2
    lead = np.array([[1, b] for b in range(N)] + [[0, 1]], dtype=np.int64)
    cd = np.indices((N, N)).reshape(2, -1).T
    found = []
    for start in range(0, len(lead), max(1, chunk // len(cd))):
        top = lead[start : start + max(1, chunk // len(cd))]
        g = np.empty((len(top), len(cd), 2, 2), dtype=np.int64)
        g[:, :, 0, :] = top[:, None, :]
        g[:, :, 1, :] = cd[None, :, :]
        g = g.reshape(-1, 2, 2)
        M = vmatmul(ctx, vtranspose(g), ctx.vpow(g, Q2))
        ok = (M[:, 0, 1] == 0) & (M[:, 1, 0] == 0) & (M[:, 0, 0] == M[:, 1, 1]) & (M[:, 0, 0] != 0)
        found.append(g[ok])
    return np.concatenate(found)


def reference_frame(S: HermitianSurface, seed: ReducedCurveMatrix | None = None) -> ReducedCurveMatrix:
    """A matrix F_I* for the seed curve with Gram matrix a scalar multiple of D_I.

    c J is Hermitian for the exponent q^2 once c^(q^2 - 1) = -1; decomposing
    it as h^T h^(q^2) and reparametrizing by h^-1 turns D_J into kappa D_I.
    A final rescaling by a (q+1)-th root of 1/kappa gives exactly D_I when
    such a root exists in F_{q^4}.
    """
    ctx = S.ctx
    q, Q2 = ctx.q, ctx.q**2
    seed = seed or seed_curve(S)
    c = next(x for x in range(1, ctx.order) if ctx.pow(x, Q2 - 1) == ctx.minus_one)
    h = hermitian_decompose(j_matrix(ctx).scale(c), Q2)
    F1 = seed.Fstar @ phi_star(h.inv(), q)
    B = b_from_gram(F1.T @ S.A @ F1.frob(1))
    kappa = _scalar_of(B)
    if kappa is None:
        raise GroupError("reparametrization did not reach a multiple of D_I")
    mu = ctx.power_root(ctx.inv(kappa), q + 1)
    if mu is not None:
        F1 = F1.scale(mu)
    return ReducedCurveMatrix(F1, q)


def stabilizer_via_pgu2(S: HermitianSurface, seed: ReducedCurveMatrix | None = None) -> np.ndarray:
    """Distinct canonical F_I* phi*(g) F_I*^-1 over unitary-up-to-scalar g that
    are automorphisms of S fixing the curve."""
    ctx = S.ctx
    seed = seed or seed_curve(S)
    FI = reference_frame(S, seed).Fstar
    gs = pgu2_classes(ctx)
    T = vcanonical(ctx, vmatmul(ctx, vmatmul(ctx, FI.a, vphi_star(ctx, gs, ctx.q)), FI.inv().a))
    T = np.unique(T.reshape(len(T), -1), axis=0).reshape(-1, 4, 4)
    T = T[vautomorphism_mask(ctx, T, S.A)]
    target = fingerprint_codes(ctx, seed.Fstar.a)
    fixes = np.all(fingerprint_codes(ctx, vmatmul(ctx, T, seed.Fstar.a)) == target, axis=-1)
    return T[fixes]


def stabilizer_by_scan(group: np.ndarray, seed: ReducedCurveMatrix, chunk: int = 4096) -> np.ndarray:
    ctx = seed.ctx
    target = fingerprint_codes(ctx, seed.Fstar.a)
    keep = []
    for i in range(0, len(group), chunk):
        part = group[i : i + chunk]
        fps = fingerprint_codes(ctx, vmatmul(ctx, part, seed.Fstar.a))
        keep.append(part[np.all(fps == target, axis=-1)])
    return np.concatenate(keep)


def stabilizer_order(
    S: HermitianSurface,
    seed: ReducedCurveMatrix | None = None,
    method: str = "via_pgu2",
    group: np.ndarray | None = None,
) -> int:
    seed = seed or seed_curve(S)
    if method == "via_pgu2":
        return len(stabilizer_via_pgu2(S, seed))
    if method == "scan_group":
        if group is None:
            if S.q != 2:
                raise GroupError("full group scan is limited to q = 2")
            group = enumerate_group(generators(S))
        return len(stabilizer_by_scan(group, seed))
    raise ValueError(f"unknown method {method!r}")


@dataclass
class OrbitReport:
    q: int
    orbit_size: int
    stabilizer_order: int
    group_order: int
    consistency: bool = field(init=False)

    def __post_init__(self):
        self.consistency = self.orbit_size * self.stabilizer_order == self.group_order


def orbit_count(S: HermitianSurface) -> OrbitReport:
    """Orbit of the seed curve under Aut(S) plus the orbit-stabilizer check."""
    if S.q not in (2, 3):
        raise GroupError("orbit enumeration is limited to q in {2, 3}")
    seed = seed_curve(S)
    reps, _ = curve_orbit(S, seed)
    rep = OrbitReport(S.q, len(reps), stabilizer_order(S, seed), group_order(4, S.q))
    if not rep.consistency:
        raise GroupError(f"orbit-stabilizer mismatch: {rep}")
    return rep


# identities ----------------------------------------------------------------


def random_invertible(ctx: FieldCtx, rng, n: int, size: int, i: int = 4) -> np.ndarray:
    """``size`` random invertible n x n matrices (n <= 4) over F_{q^i}."""
    elems = np.array(ctx.subfield_elements(i), dtype=np.int64)
    out = []
    have = 0
    while have < size:
        m = elems[rng.integers(0, len(elems), size=(size, n, n))]
        m = m[vdet(ctx, m) != 0]
        out.append(m)
        have += len(m)
    return np.concatenate(out)[:size]


def vd_matrix(ctx: FieldCtx, B):
    B = np.asarray(B, dtype=np.int64)
    D = np.zeros(B.shape[:-2] + (4, 4), dtype=np.int64)
    D[..., 0:2, 1] = B[..., :, 0]
    D[..., 0:2, 3] = B[..., :, 1]
    D[..., 2:4, 0] = ctx.vneg(B[..., :, 0])
    D[..., 2:4, 2] = ctx.vneg(B[..., :, 1])
    return D


def transform_lemma_failures(ctx: FieldCtx, trials: int, seed: int) -> int:
    """Count (g, B) over F_{q^4} violating
    phi*(g)^T D_B phi*(g)^(q) == det(g)^q D_{g^T B g^(q^2)}."""
    q = ctx.q
    rng = np.random.default_rng(seed)
    g = random_invertible(ctx, rng, 2, trials)
    B = random_invertible(ctx, rng, 2, trials)
    P = vphi_star(ctx, g, q)
    lhs = vmatmul(ctx, vmatmul(ctx, vtranspose(P), vd_matrix(ctx, B)), ctx.vfrob(P, 1))
    inner = vmatmul(ctx, vmatmul(ctx, vtranspose(g), B), ctx.vfrob(g, 2))
    rhs = ctx.vmul(ctx.vpow(vdet(ctx, g), q)[:, None, None], vd_matrix(ctx, inner))
    return int(np.sum(np.any(lhs != rhs, axis=(1, 2))))


def verify_transform_lemma(ctx: FieldCtx, trials: int = 1000, seed: int = 0) -> bool:
    if trials < 1:
        raise ValueError("trials must be positive")
    return transform_lemma_failures(ctx, trials, seed) == 0


def rescale_into_unitary(ctx: FieldCtx, classes: np.ndarray, seed: int = 0) -> np.ndarray:
    """For each class, scale by a random unit of F_{q^4}, then by xi with
    xi^(q+1) = 1/lam; return a mask of classes that land in GU_4(F_{q^2})
    (entries in F_{q^2} and Q'^T Q'^(q) = I)."""
    q = ctx.q
    rng = np.random.default_rng(seed)
    alpha = rng.integers(1, ctx.order, size=len(classes))
    Q1 = ctx.vmul(classes, alpha[:, None, None])
    M = vmatmul(ctx, vtranspose(Q1), ctx.vfrob(Q1, 1))
    lam = M[:, 0, 0]
    scalar = (lam != 0) & np.all(M == ctx.vmul(np.eye(4, dtype=np.int64)[None], lam[:, None, None]), axis=(1, 2))
    roots = np.zeros(ctx.order, dtype=np.int64)
    for x in range(ctx.order - 1, 0, -1):  # keep the smallest root
        roots[ctx.pow(x, q + 1)] = x
    xi = roots[ctx.vinv(np.where(lam == 0, 1, lam))]
    Q2 = ctx.vmul(Q1, xi[:, None, None])
    unit = vmatmul(ctx, vtranspose(Q2), ctx.vfrob(Q2, 1))
    in_f2 = np.all(ctx.vin_subfield(Q2, 2), axis=(1, 2))
    is_id = np.all(unit == np.eye(4, dtype=np.int64)[None], axis=(1, 2))
    return scalar & (xi != 0) & in_f2 & is_id


# incidence data for q = 2 --------------------------------------------------


@dataclass
class IncidenceProfile:
    curves: int
    points: int
    points_per_curve: list[int]
    histograms: list[dict[int, int]]  # per curve: intersection size -> number of other curves
    curves_per_point: list[int]
    point_orbit_size: int
    point_orbit_transitive: bool
    point_stabilizer_order: int
    partners: list[int]  # index of the unique other curve sharing all rational points, or -1


def incidence_profile(S: HermitianSurface, group: np.ndarray | None = None) -> IncidenceProfile:
    ctx = S.ctx
    if S.q != 2:
        raise GroupError("incidence data is computed for q = 2 only")
    reps, codes = curve_orbit(S)
    pts = rational_points(S)
    pt_codes = encode_points(ctx, np.array(pts, dtype=np.int64), axis=-1)
    # curves x points incidence over F_{q^2}
    inc = np.stack([np.isin(pt_codes, row) for row in codes]).astype(np.int64)
    meet = inc @ inc.T
    per_curve = inc.sum(axis=1)
    hists, partners = [], []
    for i in range(len(reps)):
        others = np.delete(meet[i], i)
        vals, counts = np.unique(others, return_counts=True)
        hists.append({int(v): int(c) for v, c in zip(vals, counts)})
        full = [j for j in np.flatnonzero(meet[i] == per_curve[i]) if j != i]
        partners.append(int(full[0]) if len(full) == 1 else -1)
    if group is None:
        group = enumerate_group(generators(S))
    p0 = np.array(pts[0], dtype=np.int64)
    imgs = vnormalize(ctx, vmatmul(ctx, group, p0[:, None])[..., 0])
    img_codes = encode_points(ctx, imgs, axis=-1)
    orbit = np.unique(img_codes)
    return IncidenceProfile(
        curves=len(reps),
        points=len(pts),
        points_per_curve=per_curve.tolist(),
        histograms=hists,
        curves_per_point=inc.sum(axis=0).tolist(),
        point_orbit_size=len(orbit),
        point_orbit_transitive=len(orbit) == len(pts) and bool(np.all(np.isin(pt_codes, orbit))),
        point_stabilizer_order=int(np.sum(img_codes == pt_codes[0])),
        partners=partners,
    )


__all__ = [
    "GroupError",
    "IncidenceProfile",
    "OrbitReport",
    "ProjectiveUnitary",
    "act",
    "automorphism_multiplier",
    "curve_orbit",
    "curves_equal",
    "enumerate_group",
    "generators",
    "group_order",
    "incidence_profile",
    "orbit_count",
    "pgu2_classes",
    "reference_frame",
    "rescale_into_unitary",
    "seed_curve",
    "stabilizer_order",
    "unitary_check",
    "unitary_generators",
    "verify_transform_lemma",
]
