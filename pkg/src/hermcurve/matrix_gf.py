"""Dense matrices over F_{q^4}, entrywise Frobenius and Hermitian forms."""

from __future__ import annotations

from itertools import permutations, product

import numpy as np

from .field_tower import FieldCtx


class MatrixError(ValueError):
    pass


# batched kernels on integer arrays of reps ------------------------------


def vmatmul(ctx: FieldCtx, a, b):
    """Matrix product over the field, broadcasting over leading axes."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[-1] != b.shape[-2]:
        raise MatrixError(f"shape mismatch {a.shape} @ {b.shape}")
    acc = ctx.vmul(a[..., :, 0, None], b[..., None, 0, :])
    for k in range(1, a.shape[-1]):
        acc = ctx.vadd(acc, ctx.vmul(a[..., :, k, None], b[..., None, k, :]))
    return acc


def _perm_sign(perm):
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def vdet(ctx: FieldCtx, a):
    """Determinant of the trailing n x n block by the Leibniz formula (n <= 4)."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[-1]
    total = np.zeros(a.shape[:-2], dtype=np.int64)
    for perm in permutations(range(n)):
        term = a[..., 0, perm[0]]
        for i in range(1, n):
            term = ctx.vmul(term, a[..., i, perm[i]])
        if _perm_sign(perm) < 0:
            term = ctx.vneg(term)
        total = ctx.vadd(total, term)
    return total


def vrank_at_least(ctx: FieldCtx, a, r: int):
    """Boolean mask: does each trailing matrix have rank >= r (via r x r minors)."""
    a = np.asarray(a, dtype=np.int64)
    rows, cols = a.shape[-2:]
    mask = np.zeros(a.shape[:-2], dtype=bool)
    if r > min(rows, cols):
        return mask
    from itertools import combinations

    for ri in combinations(range(rows), r):
        for ci in combinations(range(cols), r):
            minor = a[..., list(ri), :][..., :, list(ci)]
            mask |= vdet(ctx, minor) != 0
    return mask


def vnormalize(ctx: FieldCtx, a, axis: int = -1):
    """Scale each vector along ``axis`` so its first nonzero entry is 1."""
    a = np.moveaxis(np.asarray(a, dtype=np.int64), axis, -1)
    nz = a != 0
    first = np.argmax(nz, axis=-1)
    lead = np.take_along_axis(a, first[..., None], axis=-1)
    lead = np.where(lead == 0, 1, lead)
    out = ctx.vmul(a, ctx.vinv(lead))
    return np.moveaxis(out, -1, axis)


def vcanonical(ctx: FieldCtx, a):
    """Projective canonical form of each trailing matrix (first nonzero entry 1)."""
    a = np.asarray(a, dtype=np.int64)
    flat = a.reshape(a.shape[:-2] + (-1,))
    return vnormalize(ctx, flat).reshape(a.shape)


def vtranspose(a):
    return np.swapaxes(np.asarray(a), -1, -2)


# the Mat value type ------------------------------------------------------


class Mat:
    """Immutable dense matrix over a :class:`FieldCtx`."""

    __slots__ = ("ctx", "a")

    def __init__(self, ctx: FieldCtx, entries):
        a = np.array(entries, dtype=np.int64)
        if a.ndim != 2:
            raise MatrixError("a Mat is two-dimensional")
        if a.size and (a.min() < 0 or a.max() >= ctx.order):
            raise MatrixError("entry outside the field")
        a.setflags(write=False)
        self.ctx = ctx
        self.a = a

    @classmethod
    def identity(cls, ctx, n):
        return cls(ctx, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, ctx, rows, cols):
        return cls(ctx, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def from_columns(cls, ctx, cols):
        return cls(ctx, np.array(cols, dtype=np.int64).T)

    @property
    def shape(self):
        return self.a.shape

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    def __getitem__(self, idx):
        v = self.a[idx]
        return int(v) if np.ndim(v) == 0 else v

    def tolist(self):
        return self.a.tolist()

    def __repr__(self):
        return f"Mat({self.a.tolist()})"

    def __eq__(self, other):
        return isinstance(other, Mat) and self.a.shape == other.a.shape and bool(np.all(self.a == other.a))

    def __hash__(self):
        return hash((self.a.shape, self.a.tobytes()))

    def _check(self, other):
        if other.ctx is not self.ctx:
            raise MatrixError("matrices over different fields")

    def __matmul__(self, other: Mat) -> Mat:
        self._check(other)
        return Mat(self.ctx, vmatmul(self.ctx, self.a, other.a))

    def __add__(self, other: Mat) -> Mat:
        self._check(other)
        if self.shape != other.shape:
            raise MatrixError("shape mismatch in addition")
        return Mat(self.ctx, self.ctx.vadd(self.a, other.a))

    def __neg__(self) -> Mat:
        return Mat(self.ctx, self.ctx.vneg(self.a))

    def __sub__(self, other: Mat) -> Mat:
        return self + (-other)

    def scale(self, c: int) -> Mat:
        return Mat(self.ctx, self.ctx.vmul(self.a, c))

    @property
    def T(self) -> Mat:
        return Mat(self.ctx, self.a.T)

    def frob(self, i: int = 1) -> Mat:
        """Entrywise ``x -> x**(q**i)``."""
        if i < 0:
            raise ValueError("Frobenius exponent must be non-negative")
        return Mat(self.ctx, self.ctx.vfrob(self.a, i))

    def pow_entries(self, k: int) -> Mat:
        """Entrywise ``x -> x**k`` (k a power of p gives a field automorphism)."""
        return Mat(self.ctx, self.ctx.vpow(self.a, k))

    def is_zero(self) -> bool:
        return not self.a.any()

    def entries_in(self, i: int) -> bool:
        return bool(np.all(self.ctx.vin_subfield(self.a, i)))

    def canonical(self) -> Mat:
        return Mat(self.ctx, vcanonical(self.ctx, self.a))

    def submatrix(self, rows, cols) -> Mat:
        return Mat(self.ctx, self.a[np.ix_(list(rows), list(cols))])

    # elimination-based ops -------------------------------------------

    def _echelon(self):
        """Row-reduce a copy; returns (rows, pivot columns, det factor)."""
        ctx = self.ctx
        m = [list(map(int, r)) for r in self.a]
        nrows, ncols = self.shape
        pivots = []
        det = 1
        r = 0
        for c in range(ncols):
            piv = next((i for i in range(r, nrows) if m[i][c]), None)
            if piv is None:
                continue
            if piv != r:
                m[r], m[piv] = m[piv], m[r]
                det = ctx.neg(det)
            lead = m[r][c]
            det = ctx.mul(det, lead)
            li = ctx.inv(lead)
            m[r] = [ctx.mul(li, x) for x in m[r]]
            for i in range(nrows):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == nrows:
                break
        return m, pivots, det

    def rank(self) -> int:
        return len(self._echelon()[1])

    def det(self) -> int:
        if self.rows != self.cols:
            raise MatrixError("determinant of a non-square matrix")
        _, pivots, det = self._echelon()
        return det if len(pivots) == self.rows else 0

    def inv(self) -> Mat:
        n = self.rows
        if n != self.cols:
            raise MatrixError("inverse of a non-square matrix")
        aug = Mat(self.ctx, np.hstack([self.a, np.eye(n, dtype=np.int64)]))
        m, pivots, _ = aug._echelon()
        if pivots[:n] != list(range(n)):
            raise MatrixError("singular matrix")
        return Mat(self.ctx, [row[n:] for row in m])


def transpose(m: Mat) -> Mat:
    return m.T


def entrywise_frob(m: Mat, i: int = 1) -> Mat:
    return m.frob(i)


def subfield_index(ctx: FieldCtx, Q: int) -> int:
    """i with Q = q**i, for Q in {q, q^2}."""
    if Q == ctx.q:
        return 1
    if Q == ctx.q**2:
        return 2
    raise ValueError(f"exponent {Q} is neither q nor q^2")


def sesquilinear(x: Mat, A: Mat, y: Mat, Q: int) -> Mat:
    """``x^T A y^(Q)`` for column blocks x, y."""
    return x.T @ A @ y.pow_entries(Q)


def is_hermitian(A: Mat, Q: int) -> bool:
    """Entries in F_{Q^2} and ``A^T == A^(Q)``."""
    if A.rows != A.cols:
        raise MatrixError("Hermitian test needs a square matrix")
    i = subfield_index(A.ctx, Q)
    return A.entries_in(2 * i) and A.T == A.pow_entries(Q)


def hermitian_decompose(A: Mat, Q: int) -> Mat:
    """Return B over F_{Q^2} with ``B^T B^(Q) == A``.

    Gram-Schmidt for the form h(x, y) = x^T A y^(Q): pick a vector of nonzero
    norm (basis vectors first, then w_i + a w_j), rescale it to norm 1 with a
    norm-equation solve, project it out of the remaining basis, and repeat.
    The collected vectors form P with ``P^T A P^(Q) = I``; B is P^-1.
    """
    ctx = A.ctx
    n = A.rows
    if not is_hermitian(A, Q):
        raise MatrixError("matrix is not Hermitian for the given exponent")
    if A.det() == 0:
        raise MatrixError("singular matrix")
    i = subfield_index(ctx, Q)
    scalars = ctx.subfield_elements(2 * i)
    Aq = [list(map(int, r)) for r in A.a]

    def h(x, y):
        yq = [ctx.pow(v, Q) for v in y]
        return ctx.sum(ctx.mul(x[r], ctx.mul(Aq[r][c], yq[c])) for r in range(n) for c in range(n) if x[r] and yq[c])

    def lin(x, a, y):
        return [ctx.add(u, ctx.mul(a, v)) for u, v in zip(x, y)]

    basis = [[1 if r == c else 0 for r in range(n)] for c in range(n)]
    found = []
    while basis:
        v = next((w for w in basis if h(w, w)), None)
        if v is None:
            v = next(
                (
                    cand
                    for a_i, b_j in product(range(len(basis)), repeat=2)
                    if a_i != b_j
                    for alpha in scalars[1:]
                    for cand in [lin(basis[a_i], alpha, basis[b_j])]
                    if h(cand, cand)
                ),
                None,
            )
            if v is None:
                raise MatrixError("degenerate form")
        s = h(v, v)
        v = [ctx.mul(ctx.solve_norm(ctx.inv(s), Q), x) for x in v]
        found.append(v)
        rest = []
        for w in basis:
            w2 = lin(w, ctx.neg(h(w, v)), v)
            if any(w2):
                rest.append(w2)
        # keep a basis of the orthogonal complement
        basis = _independent(ctx, rest, n - len(found))
    P = Mat.from_columns(ctx, found)
    return P.inv()


def _independent(ctx, vectors, want):
    chosen = []
    for v in vectors:
        if len(chosen) == want:
            break
        if not chosen or Mat.from_columns(ctx, chosen + [v]).rank() == len(chosen) + 1:
            chosen.append(v)
    return chosen
