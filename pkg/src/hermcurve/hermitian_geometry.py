"""Hermitian surfaces in P^3: membership, rational points and lines."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .field_tower import FieldCtx
from .matrix_gf import Mat, MatrixError, is_hermitian, vmatmul, vnormalize

ProjPoint = tuple  # normalized coordinate tuple of reps, first nonzero entry 1


class SurfaceError(ValueError):
    pass


def normalize(ctx: FieldCtx, coords) -> ProjPoint:
    coords = [int(c) for c in coords]
    lead = next((c for c in coords if c), None)
    if lead is None:
        raise SurfaceError("the zero vector is not a projective point")
    li = ctx.inv(lead)
    return tuple(ctx.mul(li, c) for c in coords)


def projective_points(ctx: FieldCtx, n: int, i: int = 2) -> np.ndarray:
    """All points of P^{n-1}(F_{q^i}) as normalized rows, lexicographically sorted."""
    elems = ctx.subfield_elements(i)
    rows = []
    for lead in range(n):
        for tail in product(elems, repeat=n - lead - 1):
            rows.append((0,) * lead + (1,) + tail)
    rows.sort()
    return np.array(rows, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class HermitianSurface:
    """The surface x^T A x^(q) = 0 for an invertible 4 x 4 matrix A."""

    A: Mat
    q: int
    hermitian_flag: bool = field(init=False)

    def __post_init__(self):
        if self.A.shape != (4, 4):
            raise SurfaceError("A must be 4 x 4")
        if self.q != self.A.ctx.q:
            raise SurfaceError("q does not match the field context")
        if self.A.det() == 0:
            raise SurfaceError("A is singular: the surface is not smooth")
        object.__setattr__(self, "hermitian_flag", is_hermitian(self.A, self.q))

    @classmethod
    def fermat(cls, ctx: FieldCtx) -> HermitianSurface:
        return cls(Mat.identity(ctx, 4), ctx.q)

    @property
    def ctx(self) -> FieldCtx:
        return self.A.ctx

    def form(self, x, y):
        """Vectorized h(x, y) = x^T A y^(q) over the last axis of x and y."""
        ctx = self.ctx
        x = np.asarray(x, dtype=np.int64)
        yq = ctx.vfrob(np.asarray(y, dtype=np.int64), 1)
        Ay = vmatmul(ctx, self.A.a, yq[..., :, None])[..., 0]
        terms = ctx.vmul(x, Ay)
        acc = terms[..., 0]
        for k in range(1, terms.shape[-1]):
            acc = ctx.vadd(acc, terms[..., k])
        return acc


def contains_point(S: HermitianSurface, x) -> bool:
    return int(S.form(x, x)) == 0


def rational_points(S: HermitianSurface) -> list[ProjPoint]:
    """Points of P^3(F_{q^2}) on S, in canonical order."""
    pts = projective_points(S.ctx, 4, 2)
    on = S.form(pts, pts) == 0
    return [tuple(map(int, r)) for r in pts[on]]


def contains_line(S: HermitianSurface, u, v) -> bool:
    """The line through u and v lies on S iff its 2 x 2 Gram matrix vanishes."""
    F = Mat.from_columns(S.ctx, [list(u), list(v)])
    if F.rank() != 2:
        raise SurfaceError("u and v are linearly dependent")
    return (F.T @ S.A @ F.frob(1)).is_zero()


def line_points(ctx: FieldCtx, u, v, i: int = 2) -> list[ProjPoint]:
    """Sorted F_{q^i}-points of the line spanned by u and v."""
    pts = {normalize(ctx, v)}
    for a in ctx.subfield_elements(i):
        pts.add(normalize(ctx, [ctx.add(x, ctx.mul(a, y)) for x, y in zip(u, v)]))
    return sorted(pts)


def lines_on_surface(S: HermitianSurface) -> list[tuple[ProjPoint, ProjPoint]]:
    """Lines of P^3(F_{q^2}) on S, each as its two smallest points.

    Walks pairs of surface points (u, v), u < v, skipping pairs already known
    to share a line; each new pair spans a line that is kept when the Gram
    test passes.
    """
    ctx = S.ctx
    pts = rational_points(S)
    index = {p: k for k, p in enumerate(pts)}
    arr = np.array(pts, dtype=np.int64)
    lines = []
    covered = [set() for _ in pts]
    for k, u in enumerate(pts):
        # h(u, v) for every surface point v
        orth = np.nonzero(S.form(arr[k][None, :], arr) == 0)[0]
        for j in orth:
            if j <= k or j in covered[k]:
                continue
            if not contains_line(S, u, pts[j]):
                continue
            members = [index[p] for p in line_points(ctx, u, pts[j])]
            for a in members:
                covered[a].update(members)
            members.sort()
            if members[0] == k:
                lines.append((pts[members[0]], pts[members[1]]))
    return lines


def planes_on_surface(S: HermitianSurface) -> list[ProjPoint]:
    """Planes of P^3(F_{q^2}) (as normalized normal vectors n, plane n.x = 0)
    all of whose F_{q^2}-points lie on S."""
    ctx = S.ctx
    pts = projective_points(ctx, 4, 2)
    on = S.form(pts, pts) == 0
    normals = projective_points(ctx, 4, 2)
    # incidence n.x for every (n, x)
    dots = vmatmul(ctx, normals, pts.T)
    found = []
    for r, n in enumerate(normals):
        incident = dots[r] == 0
        if np.all(on[incident]):
            found.append(tuple(map(int, n)))
    return found


def change_coordinates(S: HermitianSurface, P: Mat) -> HermitianSurface:
    """The surface with matrix P^T A P^(q); x on S iff P^-1 x on the result."""
    if P.det() == 0:
        raise MatrixError("coordinate change must be invertible")
    return HermitianSurface(P.T @ S.A @ P.frob(1), S.q)


def normalize_rows(ctx: FieldCtx, arr) -> np.ndarray:
    return vnormalize(ctx, arr, axis=-1)
