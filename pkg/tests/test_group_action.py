import numpy as np
import pytest

from hermcurve.field_tower import ctx_for_q
from hermcurve.group_action import (
    GroupError,
    ProjectiveUnitary,
    act,
    curve_orbit,
    curves_equal,
    enumerate_group,
    generators,
    group_order,
    incidence_profile,
    orbit_count,
    pgu2_classes,
    random_invertible,
    rescale_into_unitary,
    seed_curve,
    stabilizer_order,
    unitary_check,
    verify_transform_lemma,
    vautomorphism_mask,
    vd_matrix,
)
from hermcurve.hermitian_geometry import HermitianSurface
from hermcurve.matrix_gf import Mat, vcanonical, vmatmul, vtranspose
from hermcurve.rational_curves import ReducedCurveMatrix, b_from_gram, d_matrix, phi_star


@pytest.fixture(scope="module")
def X2():
    return HermitianSurface.fermat(ctx_for_q(2))


@pytest.fixture(scope="module")
def group2(X2):
    return enumerate_group(generators(X2))


def test_group_orders():
    assert group_order(4, 2) == 25920
    assert group_order(2, 2) == 60
    assert group_order(4, 3) == 13_063_680
    assert group_order(2, 3) == 720


def test_unitary_check_examples(f2):
    assert unitary_check(Mat.identity(f2, 4)) == 1
    P = Mat(f2, np.eye(4, dtype=np.int64)[[2, 0, 3, 1]])
    assert unitary_check(P) == 1
    with pytest.raises(GroupError):
        ProjectiveUnitary.from_matrix(Mat(f2, [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))


def test_pgu2_matches_brute_force(f2):
    # every 2x2 matrix over F_16, tested with exponent q^2 = 4
    g = np.indices((16,) * 4).reshape(4, -1).T.reshape(-1, 2, 2)
    M = vmatmul(f2, vtranspose(g), f2.vpow(g, 4))
    ok = (M[:, 0, 1] == 0) & (M[:, 1, 0] == 0) & (M[:, 0, 0] == M[:, 1, 1]) & (M[:, 0, 0] != 0)
    assert ok.sum() == 900
    classes = np.unique(vcanonical(f2, g[ok]).reshape(-1, 4), axis=0)
    assert len(classes) == 60
    mine = np.unique(pgu2_classes(f2).reshape(-1, 4), axis=0)
    assert np.array_equal(mine, classes)
    # scalar check agrees with unitary_check on a sample
    for m, flag in zip(g[::997], ok[::997]):
        assert (unitary_check(Mat(f2, m)) is not None) == flag


def test_group_closure(X2, group2):
    assert len(group2) == 25920
    assert vautomorphism_mask(X2.ctx, group2, X2.A).all()
    keys = np.unique(group2.reshape(len(group2), -1), axis=0)
    assert len(keys) == 25920


def test_act_identity_and_pattern(X2, group2):
    f = X2.ctx
    F = seed_curve(X2)
    ident = ProjectiveUnitary.from_matrix(Mat.identity(f, 4))
    assert act(ident, F, X2).Fstar == F.Fstar
    rng = np.random.default_rng(0)
    for k in rng.integers(0, len(group2), size=500):
        Q = ProjectiveUnitary.from_matrix(Mat(f, group2[k]), X2.A)
        assert b_from_gram(act(Q, F, X2).gram(X2.A)) is not None


def test_act_associative(X2, group2):
    f = X2.ctx
    F = seed_curve(X2)
    rng = np.random.default_rng(1)
    for i, j in rng.integers(0, len(group2), size=(20, 2)):
        Q1 = ProjectiveUnitary.from_matrix(Mat(f, group2[i]), X2.A)
        Q2 = ProjectiveUnitary.from_matrix(Mat(f, group2[j]), X2.A)
        Q21 = ProjectiveUnitary.from_matrix(Q2.Q @ Q1.Q, X2.A)
        assert curves_equal(act(Q2, act(Q1, F, X2), X2), act(Q21, F, X2))


def test_act_rejects_non_automorphism(X2):
    f = X2.ctx
    Q = ProjectiveUnitary(Mat(f, [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]), 1)
    with pytest.raises(GroupError):
        act(Q, seed_curve(X2), X2)


@pytest.mark.parametrize("q", [2, 3])
def test_curves_equal(q):
    f = ctx_for_q(q)
    X = HermitianSurface.fermat(f)
    F = seed_curve(X)
    assert curves_equal(F, ReducedCurveMatrix(F.Fstar.scale(7), q))
    for g in pgu2_classes(f)[:: 37 if q == 2 else 401]:
        assert curves_equal(F, ReducedCurveMatrix(F.Fstar @ phi_star(Mat(f, g), q), q))
    moved = [act(g, F, X) for g in generators(X)]
    assert not all(curves_equal(F, m) for m in moved)


def test_stabilizer_q2(X2, group2):
    seed = seed_curve(X2)
    assert stabilizer_order(X2, seed, "scan_group", group2) == 60
    assert stabilizer_order(X2, seed, "via_pgu2") == 60


def test_stabilizer_q3():
    X = HermitianSurface.fermat(ctx_for_q(3))
    assert stabilizer_order(X, method="via_pgu2") == 720
    with pytest.raises(GroupError):
        stabilizer_order(X, method="scan_group")


def test_orbit_q2(X2):
    rep = orbit_count(X2)
    assert (rep.orbit_size, rep.stabilizer_order, rep.group_order) == (432, 60, 25920)
    assert rep.consistency


def test_orbit_under_coordinate_change(f2):
    # A = P^T P^(q) for a random P over F_4 gives the same counts
    rng = np.random.default_rng(11)
    P = Mat(f2, random_invertible(f2, rng, 4, 1, i=2)[0])
    S = HermitianSurface(P.T @ P.frob(1), 2)
    rep = orbit_count(S)
    assert (rep.orbit_size, rep.stabilizer_order) == (432, 60)
    assert len(enumerate_group(generators(S))) == 25920


def test_orbit_members_distinct_and_on_surface(X2):
    reps, codes = curve_orbit(X2)
    assert len(np.unique(codes, axis=0)) == len(reps) == 432
    f = X2.ctx
    G = vmatmul(f, vmatmul(f, vtranspose(reps), X2.A.a), f.vfrob(reps, 1))
    B = G[:, 0:2][:, :, [1, 3]]
    assert np.array_equal(G, vd_matrix(f, B))


def test_orbit_limits():
    with pytest.raises(GroupError):
        orbit_count(HermitianSurface.fermat(ctx_for_q(4)))


def test_transform_lemma_examples(f2):
    B = Mat(f2, [[3, 5], [0, 9]])
    I = Mat.identity(f2, 2)
    P = phi_star(I, 2)
    assert P.T @ d_matrix(B) @ P.frob(1) == d_matrix(B)
    a = 7
    g = I.scale(a)
    P = phi_star(g, 2)
    lhs = P.T @ d_matrix(B) @ P.frob(1)
    rhs = d_matrix(g.T @ B @ g.frob(2)).scale(f2.pow(g.det(), 2))
    assert lhs == rhs
    assert b_from_gram(lhs) is not None


@pytest.mark.parametrize("q", [2, 3])
def test_transform_lemma_random(q):
    assert verify_transform_lemma(ctx_for_q(q), 1000, seed=q)


def test_rescale_into_unitary(X2, group2):
    assert rescale_into_unitary(X2.ctx, group2, seed=5).all()


def test_incidence_q2(X2, group2):
    prof = incidence_profile(X2, group2)
    assert prof.curves == 432 and prof.points == 45
    assert set(prof.points_per_curve) == {5}
    assert all(h == {0: 240, 1: 150, 2: 40, 5: 1} for h in prof.histograms)
    assert set(prof.curves_per_point) == {48}
    assert 432 * 5 == 45 * 48 == sum(prof.curves_per_point)
    assert prof.point_orbit_transitive and prof.point_orbit_size == 45
    assert prof.point_stabilizer_order == 576 == 25920 // 45
    # the five-point partner relation is an involution without fixed points
    assert all(prof.partners[p] == i != p for i, p in enumerate(prof.partners))
