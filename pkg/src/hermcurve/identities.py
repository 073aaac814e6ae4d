"""Seeded randomized checks of the algebraic identities the construction relies on.

Each ``*_failures`` function draws ``trials`` random instances and returns the
number that violate the identity.
"""

from __future__ import annotations

import numpy as np

from .field_tower import FieldCtx
from .group_action import random_invertible, transform_lemma_failures
from .matrix_gf import Mat, hermitian_decompose, vdet, vmatmul, vtranspose
from .rational_curves import fermat_curve, vphi_star


def vphi(ctx: FieldCtx, g, d: int):
    """Batched symmetric-power matrices phi(g) of degree d for a stack (..., 2, 2)."""
    g = np.asarray(g, dtype=np.int64)
    u = g[..., 0, :]
    v = g[..., 1, :]

    def polymul(a, b):
        out = np.zeros(a.shape[:-1] + (a.shape[-1] + b.shape[-1] - 1,), dtype=np.int64)
        for i in range(a.shape[-1]):
            for j in range(b.shape[-1]):
                out[..., i + j] = ctx.vadd(out[..., i + j], ctx.vmul(a[..., i], b[..., j]))
        return out

    rows = []
    for i in range(d + 1):
        poly = np.ones(g.shape[:-2] + (1,), dtype=np.int64)
        for _ in range(d - i):
            poly = polymul(poly, u)
        for _ in range(i):
            poly = polymul(poly, v)
        rows.append(poly)
    return np.stack(rows, axis=-2)


def _mismatches(a, b):
    return int(np.sum(np.any(a != b, axis=(-2, -1))))


def phi_hom_failures(ctx, trials, seed):
    rng = np.random.default_rng(seed)
    d = ctx.q + 1
    g, h = random_invertible(ctx, rng, 2, trials), random_invertible(ctx, rng, 2, trials)
    return _mismatches(vphi(ctx, vmatmul(ctx, h, g), d), vmatmul(ctx, vphi(ctx, h, d), vphi(ctx, g, d)))


def phi_star_hom_failures(ctx, trials, seed):
    rng = np.random.default_rng(seed)
    q = ctx.q
    g, h = random_invertible(ctx, rng, 2, trials), random_invertible(ctx, rng, 2, trials)
    return _mismatches(vphi_star(ctx, vmatmul(ctx, h, g), q), vmatmul(ctx, vphi_star(ctx, h, q), vphi_star(ctx, g, q)))


def det_identity_failures(ctx, trials, seed):
    """det(phi*(g)) == det(g)^(2q+2)."""
    rng = np.random.default_rng(seed)
    g = random_invertible(ctx, rng, 2, trials)
    lhs = vdet(ctx, vphi_star(ctx, g, ctx.q))
    rhs = ctx.vpow(vdet(ctx, g), 2 * ctx.q + 2)
    return int(np.sum(lhs != rhs))


def minor_failures(ctx, trials, seed):
    """phi*(g) is the {0, 1, q, q+1} minor of phi(g) in degree q + 1."""
    rng = np.random.default_rng(seed)
    q = ctx.q
    g = random_invertible(ctx, rng, 2, trials)
    idx = [0, 1, q, q + 1]
    full = vphi(ctx, g, q + 1)[..., idx, :][..., :, idx]
    return _mismatches(full, vphi_star(ctx, g, q))


def reduction_failures(ctx, trials, seed):
    """(F phi(g))* == F* phi*(g) for F on the Fermat surface and random g.

    Members of S are drawn as lam * F_J* phi*(h) for random lam, h."""
    rng = np.random.default_rng(seed)
    q = ctx.q
    idx = [0, 1, q, q + 1]
    h = random_invertible(ctx, rng, 2, trials)
    g = random_invertible(ctx, rng, 2, trials)
    lam = rng.integers(1, ctx.order, size=trials)
    Fj = fermat_curve(ctx).reduced.Fstar.a
    Fs = ctx.vmul(vmatmul(ctx, Fj, vphi_star(ctx, h, q)), lam[:, None, None])
    F = np.zeros((trials, 4, q + 2), dtype=np.int64)
    F[..., idx] = Fs
    moved = vmatmul(ctx, F, vphi(ctx, g, q + 1))
    interior_ok = ~np.any(moved[..., 2:q] != 0, axis=(-2, -1))
    same = ~np.any(moved[..., idx] != vmatmul(ctx, Fs, vphi_star(ctx, g, q)), axis=(-2, -1))
    return int(np.sum(~(interior_ok & same)))


def decompose_failures(ctx, trials, seed):
    """hermitian_decompose round trip on A = B^T B^(q), B random over F_{q^2}."""
    rng = np.random.default_rng(seed)
    q = ctx.q
    bad = 0
    for B in random_invertible(ctx, rng, 4, trials, i=2):
        B = Mat(ctx, B)
        A = B.T @ B.frob(1)
        C = hermitian_decompose(A, q)
        if C.T @ C.frob(1) != A or not C.entries_in(2):
            bad += 1
    return bad


SUITE = {
    "transform_lemma": transform_lemma_failures,
    "phi_homomorphism": phi_hom_failures,
    "phi_star_homomorphism": phi_star_hom_failures,
    "phi_star_det": det_identity_failures,
    "phi_star_minor": minor_failures,
    "reduction_compatibility": reduction_failures,
    "hermitian_decompose_roundtrip": decompose_failures,
}


def identity_suite(ctx: FieldCtx, trials: int = 1000, seed: int = 0) -> dict[str, int]:
    """Failure count per identity; every value should be 0."""
    return {name: fn(ctx, trials, seed + k) for k, (name, fn) in enumerate(SUITE.items())}
