"""Exact arithmetic in F_{q^4} with the subfields F_q and F_{q^2}.

Elements are plain ints ("reps"): 0 is zero and k + 1 stands for g**k, where
g is a fixed generator of the multiplicative group.  Multiplication is
addition of logarithms, addition goes through a Zech table.  Every scalar
operation has a numpy twin prefixed with ``v`` that works elementwise on
integer arrays of reps.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

MAX_Q = 9


class FieldError(ValueError):
    pass


def _poly_mulmod(a, b, mod, p):
    # coefficient lists, lowest degree first; mod is monic
    n = len(mod) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    for k in range(len(out) - 1, n - 1, -1):
        c = out[k]
        if c:
            for i in range(n + 1):
                out[k - n + i] = (out[k - n + i] - c * mod[i]) % p
    return (out + [0] * n)[:n]


def _int_to_poly(x, p, n):
    coeffs = []
    for _ in range(n):
        x, r = divmod(x, p)
        coeffs.append(r)
    return coeffs


def _poly_to_int(coeffs, p):
    x = 0
    for c in reversed(coeffs):
        x = x * p + c
    return x


def _first_irreducible(p, n):
    # monic polys ordered by their base-p integer encoding (leading coeff first)
    for code in range(p**n, 2 * p**n):
        coeffs = _int_to_poly(code, p, n + 1)
        if gf_irreducible_p(list(reversed(coeffs)), p, ZZ):
            return coeffs
    raise FieldError(f"no irreducible polynomial of degree {n} over F_{p}")


class FieldCtx:
    """The field F_{q^4}, q = p**e, with discrete-log tables.

    Build through :func:`build_ctx`, which caches contexts.
    """

    def __init__(self, p: int, e: int):
        if not isprime(p):
            raise FieldError(f"{p} is not prime")
        if e < 1 or p**e > MAX_Q:
            raise FieldError(f"q = {p}**{e} is outside the supported range q <= {MAX_Q}")
        self.p = p
        self.e = e
        self.q = p**e
        self.degree = 4 * e
        self.order = p**self.degree
        self.modulus = _first_irreducible(p, self.degree)
        if not gf_irreducible_p(list(reversed(self.modulus)), p, ZZ):
            raise FieldError("reducible modulus")

        n = self.degree
        m = self.order - 1
        self.m = m
        prime_divs = list(factorint(m))

        def power(x, k):
            result = [1] + [0] * (n - 1)
            base = x
            while k:
                if k & 1:
                    result = _poly_mulmod(result, base, self.modulus, p)
                base = _poly_mulmod(base, base, self.modulus, p)
                k >>= 1
            return result

        one = [1] + [0] * (n - 1)
        for code in range(2, self.order):
            cand = _int_to_poly(code, p, n)
            if all(power(cand, m // r) != one for r in prime_divs):
                self.generator_poly = code
                break
        gen = _int_to_poly(self.generator_poly, p, n)

        # exp_table[k] = polynomial code of g**k; log_table[code] = k
        exp_table = [0] * m
        log_table = [-1] * self.order
        cur = one
        for k in range(m):
            code = _poly_to_int(cur, p)
            exp_table[k] = code
            log_table[code] = k
            cur = _poly_mulmod(cur, gen, self.modulus, p)
        if _poly_to_int(cur, p) != 1 or min(log_table[1:]) < 0:
            raise FieldError("generator tables are inconsistent")
        self.exp_table = exp_table
        self.log_table = log_table

        # zech[k] = rep of 1 + g**k
        zech = [0] * m
        for k in range(m):
            coeffs = _int_to_poly(exp_table[k], p, n)
            coeffs[0] = (coeffs[0] + 1) % p
            code = _poly_to_int(coeffs, p)
            zech[k] = 0 if code == 0 else log_table[code] + 1
        self.zech = zech
        self._zech_np = np.array(zech, dtype=np.int64)
        self.minus_one = 1 if p == 2 else m // 2 + 1
        self._subfields = {}

    def __repr__(self):
        return f"FieldCtx(p={self.p}, e={self.e}, |F|={self.order})"

    def __reduce__(self):
        return (build_ctx, (self.p, self.e))

    # scalar arithmetic -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        z = self.zech[(b - a) % self.m]
        if z == 0:
            return 0
        return (a + z - 2) % self.m + 1

    def neg(self, a: int) -> int:
        return self.mul(a, self.minus_one)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return (a + b - 2) % self.m + 1

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return (1 - a) % self.m + 1

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if k == 0 else 0
        return ((a - 1) * k) % self.m + 1

    def frob(self, a: int, i: int = 1) -> int:
        """``a ** (q ** i)``."""
        if i < 0:
            raise ValueError("Frobenius exponent must be non-negative")
        if a == 0:
            return 0
        return ((a - 1) * pow(self.q, i, self.m)) % self.m + 1

    def from_int(self, k: int) -> int:
        """Image of the integer ``k`` under Z -> F_p."""
        k %= self.p
        return 0 if k == 0 else self.log_table[k] + 1

    def sum(self, values) -> int:
        acc = 0
        for v in values:
            acc = self.add(acc, v)
        return acc

    def order_of(self, a: int) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        from math import gcd

        return self.m // gcd(self.m, a - 1)

    # subfields ---------------------------------------------------------

    def in_subfield(self, a: int, i: int) -> bool:
        """True iff ``a`` lies in F_{q^i}."""
        return self.frob(a, i) == a

    def subfield_elements(self, i: int) -> list[int]:
        """All elements of F_{q^i} (i in {1, 2, 4}) in canonical order."""
        if i not in (1, 2, 4):
            raise ValueError(f"unsupported subfield index {i}")
        if i not in self._subfields:
            step = self.m // (self.q**i - 1)
            self._subfields[i] = [0] + [k + 1 for k in range(0, self.m, step)]
        return list(self._subfields[i])

    def roots_of_unity(self, n: int) -> list[int]:
        return [x for x in range(1, self.order) if self.pow(x, n) == 1]

    def power_root(self, c: int, n: int, i: int = 4) -> int | None:
        """Smallest x in F_{q^i} with ``x**n == c``, or None."""
        for x in self.subfield_elements(i):
            if self.pow(x, n) == c:
                return x
        return None

    def solve_norm(self, c: int, Q: int) -> int:
        """Smallest x in F_{Q^2} with ``x**(Q+1) == c``, for Q in {q, q^2}."""
        if Q == self.q:
            i = 1
        elif Q == self.q**2:
            i = 2
        else:
            raise ValueError(f"Q must be q or q^2, got {Q}")
        if c == 0:
            raise ValueError("norm equation with zero right-hand side")
        if not self.in_subfield(c, i):
            raise ValueError(f"{c} does not lie in F_{Q}")
        x = self.power_root(c, Q + 1, 2 * i)
        if x is None:  # norm surjectivity makes this unreachable
            raise FieldError(f"no solution of x^{Q + 1} = {c}")
        return x

    # vectorised twins --------------------------------------------------

    def vadd(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        z = self._zech_np[(b - a) % self.m]
        s = np.where(z == 0, 0, (a + z - 2) % self.m + 1)
        return np.where(a == 0, b, np.where(b == 0, a, s))

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return np.where((a == 0) | (b == 0), 0, (a + b - 2) % self.m + 1)

    def vneg(self, a):
        if self.p == 2:
            return np.asarray(a, dtype=np.int64)
        return self.vmul(a, self.minus_one)

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vinv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in a finite field")
        return (1 - a) % self.m + 1

    def vpow(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        if k < 0 and np.any(a == 0):
            raise ZeroDivisionError("negative power of zero")
        zero_val = 1 if k == 0 else 0
        return np.where(a == 0, zero_val, ((a - 1) * k) % self.m + 1)

    def vfrob(self, a, i: int = 1):
        return self.vpow(a, pow(self.q, i, self.m) if i else 1)

    def vin_subfield(self, a, i: int):
        a = np.asarray(a, dtype=np.int64)
        return self.vfrob(a, i) == a


@lru_cache(maxsize=None)
def build_ctx(p: int, e: int = 1) -> FieldCtx:
    return FieldCtx(p, e)


def ctx_for_q(q: int) -> FieldCtx:
    """Context for the prime power ``q``."""
    f = factorint(q)
    if len(f) != 1:
        raise FieldError(f"{q} is not a prime power")
    (p, e), = f.items()
    return build_ctx(p, e)
