"""Rational curves t(s, t) -> F (s^d, ..., t^d)^T in P^3 and their containment
in Hermitian surfaces.

A curve lies on X_A iff the form x^T A x^(q) vanishes identically along the
parametrization.  Writing b_ij for the Gram matrix F^T A F^(q), that form is
sum_ij b_ij s^(d-i+q(d-j)) t^(i+qj), so containment is the vanishing of the
Gram entries summed over each class of equal exponent i + qj.
"""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .field_tower import FieldCtx
from .hermitian_geometry import HermitianSurface, line_points
from .matrix_gf import Mat, MatrixError, vmatmul, vnormalize, vrank_at_least, vtranspose


class CurveError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CurveMatrix:
    """4 x (d+1) coefficient matrix of a rational curve of degree d."""

    F: Mat

    def __post_init__(self):
        if self.F.rows != 4 or self.F.cols < 2:
            raise CurveError("a curve matrix is 4 x (d+1) with d >= 1")
        if self.F.rank() < 2:
            raise CurveError("a curve matrix has rank >= 2")

    @property
    def d(self) -> int:
        return self.F.cols - 1

    @property
    def ctx(self) -> FieldCtx:
        return self.F.ctx


@dataclass(frozen=True, eq=False)
class ReducedCurveMatrix:
    """The invertible 4 x 4 matrix F* = (f_0, f_1, f_q, f_{q+1})."""

    Fstar: Mat
    q: int

    def __post_init__(self):
        if self.Fstar.shape != (4, 4) or self.Fstar.det() == 0:
            raise CurveError("F* must be an invertible 4 x 4 matrix")

    @property
    def ctx(self) -> FieldCtx:
        return self.Fstar.ctx

    def gram(self, A: Mat) -> Mat:
        return self.Fstar.T @ A @ self.Fstar.frob(1)

    def check_on(self, S: HermitianSurface) -> Mat:
        """Return B with F*^T A F*^(q) = D_B, or raise if the Gram leaves M."""
        B = b_from_gram(self.gram(S.A))
        if B is None:
            raise CurveError("Gram matrix is not of the form D_B")
        return B


@dataclass(frozen=True)
class FermatCurveParams:
    omega: int
    xi: int
    eta: int

    def violations(self, ctx: FieldCtx) -> list[str]:
        q = ctx.q
        bad = []
        for name, v in (("omega", self.omega), ("xi", self.xi), ("eta", self.eta)):
            if not ctx.in_subfield(v, 2):
                bad.append(f"{name} not in F_q^2")
        if ctx.pow(self.omega, q + 1) != ctx.minus_one:
            bad.append("omega^(q+1) != -1")
        if ctx.pow(self.xi, q + 1) != 1:
            bad.append("xi^(q+1) != 1")
        if ctx.pow(self.xi, 2) == ctx.minus_one:
            bad.append("xi^2 == -1")
        if ctx.pow(self.eta, q + 1) != ctx.add(ctx.frob(self.xi, 1), self.xi):
            bad.append("eta^(q+1) != xi^q + xi")
        if self.eta == 0:
            bad.append("eta == 0")
        return bad


@dataclass
class ContainmentReport:
    gram: Mat
    contained: bool
    pattern_class: str  # all_zero_forced | gram_shape | violation
    violations: list[tuple[int, int]] = field(default_factory=list)  # (t-exponent, coefficient)


@dataclass(frozen=True)
class FermatCurve:
    params: FermatCurveParams
    reduced: ReducedCurveMatrix
    curve: CurveMatrix


# D_B and the set M ----------------------------------------------------------


def d_matrix(B: Mat) -> Mat:
    """D_B = [[0, b1, 0, b2], [-b1, 0, -b2, 0]] in 2-row blocks, B = (b1, b2)."""
    ctx = B.ctx
    if B.shape != (2, 2):
        raise MatrixError("B must be 2 x 2")
    D = np.zeros((4, 4), dtype=np.int64)
    D[0:2, 1] = B.a[:, 0]
    D[0:2, 3] = B.a[:, 1]
    D[2:4, 0] = ctx.vneg(B.a[:, 0])
    D[2:4, 2] = ctx.vneg(B.a[:, 1])
    return Mat(ctx, D)


def b_from_gram(G: Mat) -> Mat | None:
    """B if G == D_B for an invertible B, else None."""
    B = Mat(G.ctx, G.a[0:2][:, [1, 3]])
    if B.det() == 0 or d_matrix(B) != G:
        return None
    return B


def j_matrix(ctx: FieldCtx) -> Mat:
    return Mat(ctx, [[0, ctx.minus_one], [1, 0]])


# Gram matrix and the containment criterion -------------------------------


def gram(F, A: Mat, q: int) -> Mat:
    """F^T A F^(q)."""
    F = F.F if isinstance(F, CurveMatrix) else F
    if A.shape != (4, 4) or F.rows != 4:
        raise MatrixError("gram needs a 4 x n curve matrix and a 4 x 4 A")
    return F.T @ A @ F.pow_entries(q)


def exponent_buckets(d: int, q: int) -> dict[int, list[tuple[int, int]]]:
    """Group index pairs (i, j) by the t-exponent i + q*j of their monomial."""
    buckets = defaultdict(list)
    for i in range(d + 1):
        for j in range(d + 1):
            buckets[i + q * j].append((i, j))
    return dict(sorted(buckets.items()))


def curve_on_surface(F, S: HermitianSurface) -> ContainmentReport:
    F = F if isinstance(F, CurveMatrix) else CurveMatrix(F)
    d, q = F.d, S.q
    if not 1 <= d <= q + 1:
        raise CurveError(f"degree {d} outside 1..{q + 1}")
    ctx = S.ctx
    G = gram(F, S.A, q)
    buckets = exponent_buckets(d, q)
    bad = []
    for exp, pairs in buckets.items():
        coeff = ctx.sum(G[i, j] for i, j in pairs)
        if coeff:
            bad.append((exp, coeff))
    if bad:
        return ContainmentReport(G, False, "violation", bad)
    forced = all(len(p) == 1 for p in buckets.values())
    return ContainmentReport(G, True, "all_zero_forced" if forced else "gram_shape")


def vcontained(ctx: FieldCtx, grams, q: int):
    """Containment mask for a stack of Gram matrices (..., d+1, d+1)."""
    grams = np.asarray(grams, dtype=np.int64)
    d = grams.shape[-1] - 1
    mask = np.ones(grams.shape[:-2], dtype=bool)
    for pairs in exponent_buckets(d, q).values():
        acc = grams[..., pairs[0][0], pairs[0][1]]
        for i, j in pairs[1:]:
            acc = ctx.vadd(acc, grams[..., i, j])
        mask &= acc == 0
    return mask


def gram_shape_ok(G: Mat, q: int) -> bool:
    """Does a (q+2) x (q+2) Gram matrix have the displayed degree-(q+1) shape."""
    ctx = G.ctx
    n = q + 2
    if G.shape != (n, n):
        return False
    free = {(0, 1), (0, q + 1), (1, 1), (1, q + 1)}
    tied = {(q, 0): (0, 1), (q, q): (0, q + 1), (q + 1, 0): (1, 1), (q + 1, q): (1, q + 1)}
    for i in range(n):
        for j in range(n):
            if (i, j) in free:
                continue
            if (i, j) in tied:
                if G[i, j] != ctx.neg(G[tied[i, j]]):
                    return False
            elif G[i, j]:
                return False
    return True


# F <-> F* ----------------------------------------------------------------


def _reduced_columns(q):
    return [0, 1, q, q + 1]


def reduce(F, q: int) -> ReducedCurveMatrix:
    F = F.F if isinstance(F, CurveMatrix) else F
    if F.cols != q + 2:
        raise CurveError("reduction needs degree q + 1")
    if F.a[:, 2:q].any():
        raise CurveError("interior columns 2..q-1 must vanish")
    return ReducedCurveMatrix(F.submatrix(range(4), _reduced_columns(q)), q)


def expand(Fstar, q: int) -> CurveMatrix:
    Fs = Fstar.Fstar if isinstance(Fstar, ReducedCurveMatrix) else Fstar
    out = np.zeros((4, q + 2), dtype=np.int64)
    out[:, _reduced_columns(q)] = Fs.a
    return CurveMatrix(Mat(Fs.ctx, out))


# reparametrizations ------------------------------------------------------


def _poly_mul(ctx, a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = ctx.add(out[i + j], ctx.mul(x, y))
    return out


def phi(g: Mat, d: int) -> Mat:
    """Action of g on degree-d monomials: phi(g) (s^d, .., t^d) = (u^d, .., v^d)
    with (u, v) = g (s, t).  Row i holds the coefficients of u^(d-i) v^i."""
    ctx = g.ctx
    if g.shape != (2, 2) or g.det() == 0:
        raise MatrixError("phi needs an invertible 2 x 2 matrix")
    u = [g[0, 0], g[0, 1]]
    v = [g[1, 0], g[1, 1]]
    rows = []
    for i in range(d + 1):
        poly = [1]
        for _ in range(d - i):
            poly = _poly_mul(ctx, poly, u)
        for _ in range(i):
            poly = _poly_mul(ctx, poly, v)
        rows.append(poly)
    return Mat(ctx, rows)


def phi_star(g: Mat, q: int) -> Mat:
    """Block matrix [[a^q g, b^q g], [c^q g, d^q g]] for g = [[a, b], [c, d]]."""
    ctx = g.ctx
    if g.shape != (2, 2) or g.det() == 0:
        raise MatrixError("phi_star needs an invertible 2 x 2 matrix")
    gq = g.pow_entries(q).a
    out = np.zeros((4, 4), dtype=np.int64)
    for bi in range(2):
        for bj in range(2):
            out[2 * bi : 2 * bi + 2, 2 * bj : 2 * bj + 2] = ctx.vmul(g.a, gq[bi, bj])
    return Mat(ctx, out)


def vphi_star(ctx: FieldCtx, g, q: int):
    """Batched phi_star for a stack (..., 2, 2)."""
    g = np.asarray(g, dtype=np.int64)
    gq = ctx.vpow(g, q)
    out = np.zeros(g.shape[:-2] + (4, 4), dtype=np.int64)
    for bi in range(2):
        for bj in range(2):
            out[..., 2 * bi : 2 * bi + 2, 2 * bj : 2 * bj + 2] = ctx.vmul(g, gq[..., bi, bj, None, None])
    return out


# explicit curves ----------------------------------------------------------


def fermat_params(ctx: FieldCtx) -> FermatCurveParams:
    """First admissible (omega, xi, eta) in canonical element order."""
    q = ctx.q
    f2 = ctx.subfield_elements(2)
    omega = next(w for w in f2 if w and ctx.pow(w, q + 1) == ctx.minus_one)
    xi = next(x for x in f2 if x and ctx.pow(x, q + 1) == 1 and ctx.pow(x, 2) != ctx.minus_one)
    eta = ctx.solve_norm(ctx.add(ctx.frob(xi, 1), xi), q)
    return FermatCurveParams(omega, xi, eta)


def fermat_curve(ctx: FieldCtx) -> FermatCurve:
    """An explicit curve of degree q + 1 on the Fermat surface x^T x^(q) = 0."""
    q = ctx.q
    prm = fermat_params(ctx)
    eta_q_inv = ctx.inv(ctx.pow(prm.eta, q))
    w_eta = ctx.mul(prm.omega, ctx.inv(prm.eta))
    Fs = Mat(
        ctx,
        [
            [ctx.mul(eta_q_inv, ctx.frob(prm.xi, 1)), 0, 0, ctx.neg(eta_q_inv)],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [ctx.mul(w_eta, prm.xi), 0, 0, w_eta],
        ],
    )
    red = ReducedCurveMatrix(Fs, q)
    return FermatCurve(prm, red, expand(red, q))


def c0_matrix(ctx: FieldCtx) -> CurveMatrix:
    """(e1, e2, 0, .., 0, e3, e4): the curve (s^(q+1), s^q t, s t^q, t^(q+1))."""
    return expand(Mat.identity(ctx, 4), ctx.q)


# fingerprints --------------------------------------------------------------


def parameter_points(ctx: FieldCtx) -> list[tuple[int, int]]:
    """P^1(F_{q^4}) as (1, t) for every t, then (0, 1)."""
    return [(1, t) for t in range(ctx.order)] + [(0, 1)]


def monomial_matrix(ctx: FieldCtx, d: int) -> np.ndarray:
    """(d+1) x K matrix of s^(d-j) t^j over P^1(F_{q^4})."""
    pts = np.array(parameter_points(ctx), dtype=np.int64)
    s, t = pts[:, 0], pts[:, 1]
    return np.stack([ctx.vmul(ctx.vpow(s, d - j), ctx.vpow(t, j)) for j in range(d + 1)])


def reduced_monomial_matrix(ctx: FieldCtx) -> np.ndarray:
    return monomial_matrix(ctx, ctx.q + 1)[_reduced_columns(ctx.q)]


def encode_points(ctx: FieldCtx, pts, axis: int = -2):
    """Integer codes of normalized points; code order is lexicographic order."""
    pts = np.moveaxis(np.asarray(pts, dtype=np.int64), axis, -1)
    code = np.zeros(pts.shape[:-1], dtype=np.int64)
    for k in range(pts.shape[-1]):
        code = code * ctx.order + pts[..., k]
    return code


def decode_point(ctx: FieldCtx, code: int, n: int = 4) -> tuple:
    out = []
    for _ in range(n):
        code, r = divmod(int(code), ctx.order)
        out.append(r)
    return tuple(reversed(out))


def fingerprint_codes(ctx: FieldCtx, Fs, V=None):
    """Sorted point codes of the curves in a stack of reduced matrices (..., 4, 4)."""
    if V is None:
        V = reduced_monomial_matrix(ctx)
    imgs = vnormalize(ctx, vmatmul(ctx, Fs, V), axis=-2)
    return np.sort(encode_points(ctx, imgs, axis=-2), axis=-1)


def curve_fingerprint(F, q: int | None = None) -> tuple:
    """Sorted normalized image points of P^1(F_{q^4}) under the curve."""
    if isinstance(F, ReducedCurveMatrix):
        F = expand(F, F.q)
    F = F if isinstance(F, CurveMatrix) else CurveMatrix(F)
    ctx = F.ctx
    if q is not None and F.d != q + 1:
        raise CurveError("fingerprints are defined for degree q + 1")
    if F.F.rank() < 4:
        raise CurveError("fingerprint needs a nonplanar (rank 4) curve")
    imgs = vnormalize(ctx, vmatmul(ctx, F.F.a, monomial_matrix(ctx, F.d)), axis=0)
    codes = np.unique(encode_points(ctx, imgs, axis=0))
    return tuple(decode_point(ctx, c) for c in codes)


# low-degree scanner -------------------------------------------------------


@dataclass
class ScanReport:
    q: int
    d: int
    mode: str
    examined: int
    contained: int  # every contained F, any rank
    violations: list  # contained F with rank >= 3
    gram_rank_ok: bool  # d == q: every contained F has rank(Gram) <= 2


def _vectors(ctx, i=2):
    from itertools import product

    elems = ctx.subfield_elements(i)
    return np.array(list(product(elems, repeat=4)), dtype=np.int64)


def _exhaustive_chunk(args):
    S, d, lo, hi = args
    ctx, q = S.ctx, S.q
    V = _vectors(ctx)
    n = len(V)
    H = S.form(V[:, None, :], V[None, :, :])
    rest = np.indices((n,) * (d)).reshape(d, -1)
    buckets = list(exponent_buckets(d, q).values())
    found = []
    for c0 in range(lo, hi):
        cols = np.vstack([np.full(rest.shape[1], c0), rest])
        mask = np.ones(rest.shape[1], dtype=bool)
        for pairs in buckets:
            acc = H[cols[pairs[0][0]], cols[pairs[0][1]]]
            for i, j in pairs[1:]:
                acc = ctx.vadd(acc, H[cols[i], cols[j]])
            mask &= acc == 0
        if mask.any():
            found.append(cols[:, mask].T)
    if not found:
        return np.zeros((0, d + 1), dtype=np.int64)
    return np.vstack(found)


def exhaustive_contained(S: HermitianSurface, d: int, workers: int = 1) -> np.ndarray:
    """Every 4 x (d+1) matrix over F_{q^2} whose curve lies on S, as (h, 4, d+1)."""
    ctx = S.ctx
    n = len(ctx.subfield_elements(2)) ** 4
    bounds = np.linspace(0, n, max(1, workers) * 4 + 1).astype(int)
    jobs = [(S, d, int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_exhaustive_chunk, jobs))
    else:
        parts = [_exhaustive_chunk(j) for j in jobs]
    idx = np.vstack(parts)
    V = _vectors(ctx)
    return vtranspose(V[idx])


def _finish_scan(S, d, mode, examined, hits):
    ctx, q = S.ctx, S.q
    high = vrank_at_least(ctx, hits, 3) if len(hits) else np.zeros(0, dtype=bool)
    gram_ok = True
    if d == q and len(hits):
        G = vmatmul(ctx, vmatmul(ctx, vtranspose(hits), S.A.a), ctx.vfrob(hits, 1))
        gram_ok = not bool(vrank_at_least(ctx, G, 3).any())
    violations = [Mat(ctx, F) for F in hits[high]]
    return ScanReport(q, d, mode, examined, len(hits), violations, gram_ok)


def scan_low_degree(
    S: HermitianSurface,
    d: int,
    mode: str = "random",
    trials: int = 10**6,
    seed: int = 42,
    workers: int = 1,
    chunk: int = 100_000,
) -> ScanReport:
    """Search for curves of degree d <= q and rank >= 3 on S over F_{q^2}."""
    ctx, q = S.ctx, S.q
    if not 2 <= d <= q:
        raise CurveError(f"degree {d} outside 2..q")
    if mode == "exhaustive":
        if q != 2:
            raise CurveError("exhaustive scan is limited to q = 2")
        hits = exhaustive_contained(S, d, workers)
        return _finish_scan(S, d, mode, len(ctx.subfield_elements(2)) ** (4 * (d + 1)), hits)
    if mode != "random":
        raise CurveError(f"unknown scan mode {mode!r}")
    rng = np.random.default_rng(seed)
    sub = np.array(ctx.subfield_elements(2), dtype=np.int64)
    Aa = S.A.a
    found = []
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        F = sub[rng.integers(0, len(sub), size=(n, 4, d + 1))]
        G = vmatmul(ctx, vmatmul(ctx, vtranspose(F), Aa), ctx.vfrob(F, 1))
        mask = vcontained(ctx, G, q)
        if mask.any():
            found.append(F[mask])
        done += n
    hits = np.vstack(found) if found else np.zeros((0, 4, d + 1), dtype=np.int64)
    return _finish_scan(S, d, mode, trials, hits)


def lines_by_scan(S: HermitianSurface) -> set:
    """Distinct lines among contained rank-2 matrices of degree 1 (exhaustive)."""
    ctx = S.ctx
    hits = exhaustive_contained(S, 1)
    rank2 = hits[vrank_at_least(ctx, hits, 2)]
    lines = set()
    for F in rank2:
        pts = line_points(ctx, F[:, 0], F[:, 1])
        lines.add((pts[0], pts[1]))
    return lines
