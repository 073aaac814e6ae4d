import numpy as np
import pytest

from hermcurve.field_tower import ctx_for_q
from hermcurve.group_action import random_invertible
from hermcurve.identities import SUITE, identity_suite, vphi
from hermcurve.matrix_gf import Mat
from hermcurve.rational_curves import phi


def test_vphi_matches_scalar(f3):
    rng = np.random.default_rng(0)
    gs = random_invertible(f3, rng, 2, 30)
    for d in (2, 4):
        batch = vphi(f3, gs, d)
        for g, P in zip(gs, batch):
            assert Mat(f3, P) == phi(Mat(f3, g), d)


@pytest.mark.parametrize("q", [2, 3])
def test_suite_has_no_failures(q):
    result = identity_suite(ctx_for_q(q), trials=1000, seed=17)
    assert set(result) == set(SUITE)
    assert result == {name: 0 for name in SUITE}


def test_counters_detect_a_broken_identity(f2, monkeypatch):
    # a wrong exponent in the det identity must be reported
    import hermcurve.identities as ident

    real = f2.vpow
    monkeypatch.setattr(f2, "vpow", lambda a, k: real(a, k + 1 if k == 6 else k))
    assert ident.det_identity_failures(f2, 200, 0) > 0
