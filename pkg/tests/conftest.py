import pytest
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_add, gf_mul, gf_rem

from hermcurve.field_tower import ctx_for_q


@pytest.fixture(scope="session")
def f2():
    return ctx_for_q(2)


@pytest.fixture(scope="session")
def f3():
    return ctx_for_q(3)


class PolyOracle:
    """Field arithmetic through sympy polynomial arithmetic, independent of
    the Zech tables.  Polynomials are sympy dense lists, leading coeff first."""

    def __init__(self, ctx):
        self.ctx = ctx
        self.p = ctx.p
        self.mod = list(reversed(ctx.modulus))

    def poly(self, rep):
        if rep == 0:
            return []
        code = self.ctx.exp_table[rep - 1]
        coeffs = []
        while code:
            code, r = divmod(code, self.p)
            coeffs.append(r)
        return list(reversed(coeffs))

    def rep(self, poly):
        code = 0
        for c in poly:
            code = code * self.p + c
        return 0 if code == 0 else self.ctx.log_table[code] + 1

    def add(self, a, b):
        return self.rep(gf_add(self.poly(a), self.poly(b), self.p, ZZ))

    def mul(self, a, b):
        prod = gf_mul(self.poly(a), self.poly(b), self.p, ZZ)
        return self.rep(gf_rem(prod, self.mod, self.p, ZZ))


@pytest.fixture(scope="session")
def oracle():
    return PolyOracle

