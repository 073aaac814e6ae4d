import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermcurve.field_tower import FieldError, build_ctx, ctx_for_q

QS = [2, 3, 4, 5, 7, 8, 9]


def elems(ctx, nonzero=False):
    return st.integers(1 if nonzero else 0, ctx.order - 1)


def zeta(ctx):
    """A primitive cube root of unity, i.e. an element of F_4 outside F_2."""
    return next(x for x in ctx.subfield_elements(2) if x not in (0, 1))


def test_sizes():
    f = build_ctx(2, 1)
    assert (f.q, f.order) == (2, 16)
    assert len(f.subfield_elements(2)) == 4
    f = build_ctx(3, 1)
    assert f.order == 81
    assert sum(f.pow(x, 9) == x for x in range(81)) == 9
    f = build_ctx(2, 2)
    assert (f.q, f.order) == (4, 256)


def test_q2_tables():
    f = ctx_for_q(2)
    assert f.modulus == [1, 1, 0, 0, 1]  # x^4 + x + 1
    assert f.subfield_elements(2) == [0, 1, 6, 11]


@pytest.mark.parametrize("p,e", [(4, 1), (2, 4), (11, 1), (2, 0)])
def test_bad_params(p, e):
    with pytest.raises(FieldError):
        build_ctx(p, e)


def test_char2_add():
    f = ctx_for_q(2)
    assert f.add(1, 1) == 0


def test_zeta_arith():
    f = ctx_for_q(2)
    z = zeta(f)
    assert f.mul(z, z) == f.add(z, 1)
    assert f.frob(z, 1) == f.add(z, 1)
    assert f.frob(0, 1) == 0 and f.frob(1, 1) == 1


@pytest.mark.parametrize("q", QS)
def test_arith_matches_polynomial_oracle(q, oracle):
    f = ctx_for_q(q)
    o = oracle(f)
    rng = np.random.default_rng(q)
    for a, b in rng.integers(0, f.order, size=(300, 2)):
        a, b = int(a), int(b)
        assert f.add(a, b) == o.add(a, b)
        assert f.mul(a, b) == o.mul(a, b)


@pytest.mark.parametrize("q", QS)
def test_generator_has_full_order(q):
    f = ctx_for_q(q)
    assert f.order_of(2) == f.m


@pytest.mark.parametrize("q", [2, 3, 5])
def test_field_axioms(q):
    f = ctx_for_q(q)

    @settings(max_examples=150, deadline=None)
    @given(elems(f), elems(f), elems(f))
    def check(a, b, c):
        assert f.add(a, b) == f.add(b, a)
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        assert f.add(a, f.neg(a)) == 0
        assert f.sub(f.add(a, b), b) == a
        assert f.frob(f.add(a, b), 1) == f.add(f.frob(a, 1), f.frob(b, 1))
        assert f.frob(f.mul(a, b), 1) == f.mul(f.frob(a, 1), f.frob(b, 1))
        assert f.pow(a, f.order) == a
        assert f.frob(a, 4) == a
        if a:
            assert f.mul(a, f.inv(a)) == 1
            assert f.div(f.mul(a, b), a) == b

    check()


@pytest.mark.parametrize("q", [2, 3, 4])
def test_vectorized_twins(q):
    f = ctx_for_q(q)
    rng = np.random.default_rng(1)
    a = rng.integers(0, f.order, size=500)
    b = rng.integers(0, f.order, size=500)
    nz = rng.integers(1, f.order, size=500)
    assert list(f.vadd(a, b)) == [f.add(int(x), int(y)) for x, y in zip(a, b)]
    assert list(f.vmul(a, b)) == [f.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert list(f.vneg(a)) == [f.neg(int(x)) for x in a]
    assert list(f.vinv(nz)) == [f.inv(int(x)) for x in nz]
    assert list(f.vpow(a, 7)) == [f.pow(int(x), 7) for x in a]
    assert list(f.vfrob(a, 1)) == [f.frob(int(x), 1) for x in a]
    assert list(f.vin_subfield(a, 2)) == [f.in_subfield(int(x), 2) for x in a]


@pytest.mark.parametrize("q", QS)
@pytest.mark.parametrize("i", [1, 2, 4])
def test_subfields(q, i):
    f = ctx_for_q(q)
    sub = f.subfield_elements(i)
    assert len(sub) == q**i
    assert sub == sorted(sub)
    assert all(f.pow(x, q**i) == x for x in sub)


def test_small_subfields():
    assert ctx_for_q(2).subfield_elements(1) == [0, 1]
    f = ctx_for_q(3)
    f9 = set(f.subfield_elements(2))
    assert all(f.add(a, b) in f9 and f.mul(a, b) in f9 for a in f9 for b in f9)


def test_solve_norm_examples():
    f = ctx_for_q(2)
    assert f.solve_norm(1, 2) == 1
    f = ctx_for_q(3)
    x = f.solve_norm(f.minus_one, 3)
    assert f.pow(x, 4) == f.from_int(2) and f.in_subfield(x, 2)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_norm_fibres(q):
    f = ctx_for_q(q)
    for Q, i in ((q, 1), (q * q, 2)):
        for c in f.subfield_elements(i)[1:]:
            x = f.solve_norm(c, Q)
            assert f.pow(x, Q + 1) == c
        fibre = [x for x in f.subfield_elements(2 * i) if x and f.pow(x, Q + 1) == 1]
        assert len(fibre) == Q + 1
    assert len(f.roots_of_unity(q + 1)) == q + 1


def test_solve_norm_rejects():
    f = ctx_for_q(2)
    with pytest.raises(ValueError):
        f.solve_norm(0, 2)
    with pytest.raises(ValueError):
        f.solve_norm(6, 2)  # zeta is not in F_2
    with pytest.raises(ValueError):
        f.solve_norm(1, 8)


def test_context_pickles():
    import pickle

    f = ctx_for_q(3)
    assert pickle.loads(pickle.dumps(f)) is f
