"""Exact rational matrices and subspaces of ``Mat_n(Q)``.

Every subspace is stored through its reduced row-echelon basis, taken over
the row-major vectorisation of the ``n*n`` entries.  Two subspaces are equal
exactly when their canonical bases agree, and membership, coordinates and
residuals all fall out of the pivot structure.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionError(ValueError):
    """Operands live in different matrix spaces."""


def as_rational(x) -> Fraction:
    """Parse an exact scalar.  Accepts ints, Fractions and ``"p/q"`` strings.

    Floats are rejected; a float literal has already lost exactness.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# row reduction on plain lists


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row-echelon form over Q.

    Returns ``(reduced_rows, rank, pivot_columns)``; ``reduced_rows`` keeps the
    input shape, with zero rows at the bottom.
    """
    m = [[as_rational(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
        row = m[r]
        for i in range(len(m)):
            if i != r:
                f = m[i][c]
                if f != 0:
                    m[i] = [a - f * b for a, b in zip(m[i], row)]
        pivots.append(c)
        r += 1
    return m, r, pivots


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}`` where ``A`` has the given rows."""
    if not rows:
        return [[ONE if j == i else ZERO for j in range(ncols)] for i in range(ncols)]
    red, rank, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# matrices


class RationalMatrix:
    """Immutable square matrix with :class:`~fractions.Fraction` entries."""

    __slots__ = ("n", "rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(as_rational(x) for x in r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionError("matrix must be square")
        self.n = n
        self.rows = rows
        self._hash = None

    @classmethod
    def _raw(cls, n: int, rows: tuple) -> "RationalMatrix":
        obj = object.__new__(cls)
        obj.n = n
        obj.rows = rows
        obj._hash = None
        return obj

    # construction helpers
    @classmethod
    def zeros(cls, n: int) -> "RationalMatrix":
        return cls._raw(n, tuple((ZERO,) * n for _ in range(n)))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls._raw(n, tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def from_vec(cls, v: Sequence, n: int | None = None) -> "RationalMatrix":
        if n is None:
            n = int(round(len(v) ** 0.5))
        if n * n != len(v):
            raise DimensionError(f"vector of length {len(v)} is not a square matrix")
        v = tuple(as_rational(x) for x in v)
        return cls._raw(n, tuple(v[i * n:(i + 1) * n] for i in range(n)))

    @classmethod
    def diag(cls, d: Sequence) -> "RationalMatrix":
        d = [as_rational(x) for x in d]
        n = len(d)
        return cls._raw(n, tuple(tuple(d[i] if i == j else ZERO for j in range(n)) for i in range(n)))

    def vec(self) -> Vector:
        return tuple(x for r in self.rows for x in r)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def _check(self, other: "RationalMatrix"):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError(f"{self.n}x{self.n} vs {other.n}x{other.n}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return RationalMatrix._raw(self.n, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return RationalMatrix._raw(self.n, tuple(
            tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self):
        return RationalMatrix._raw(self.n, tuple(tuple(-a for a in r) for r in self.rows))

    def scale(self, c) -> "RationalMatrix":
        c = as_rational(c)
        return RationalMatrix._raw(self.n, tuple(tuple(c * a for a in r) for r in self.rows))

    def __mul__(self, c):
        if isinstance(c, RationalMatrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        cols = tuple(zip(*other.rows))
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append(tuple(sum((a * c[k] for k, a in nz), ZERO) for c in cols))
        return RationalMatrix._raw(self.n, tuple(out))

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix._raw(self.n, tuple(zip(*self.rows)))

    def jordan(self, other: "RationalMatrix") -> "RationalMatrix":
        """``AB + BA``."""
        return self @ other + other @ self

    def bracket(self, other: "RationalMatrix") -> "RationalMatrix":
        """``AB - BA``."""
        return self @ other - other @ self

    def __pow__(self, k: int) -> "RationalMatrix":
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = RationalMatrix.identity(self.n)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def row_sums(self) -> tuple:
        return tuple(sum(r, ZERO) for r in self.rows)

    def col_sums(self) -> tuple:
        return tuple(sum(c, ZERO) for c in zip(*self.rows))

    def offdiag(self):
        n = self.n
        return [(i, j, self.rows[i][j]) for i in range(n) for j in range(n) if i != j]

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def is_symmetric(self) -> bool:
        return self.rows == self.T.rows

    def is_antisymmetric(self) -> bool:
        return self.rows == (-self.T).rows

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self.rows)
        return f"RationalMatrix([{body}])"

    def to_json(self) -> list:
        return [[format_rational(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data) -> "RationalMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data)

    def to_float(self):
        import numpy as np

        return np.array([[float(x) for x in r] for r in self.rows], dtype=float)


def offdiag_inner(a: RationalMatrix, b: RationalMatrix) -> Fraction:
    """Sum of products of matching off-diagonal entries."""
    if a.n != b.n:
        raise DimensionError(f"{a.n} vs {b.n}")
    n = a.n
    return sum((a.rows[i][j] * b.rows[i][j] for i in range(n) for j in range(n) if i != j), ZERO)


# ---------------------------------------------------------------------------
# subspaces


class MatrixSubspace:
    """Linear subspace of ``Mat_n(Q)`` held by its canonical RREF basis."""

    __slots__ = ("n", "_vecs", "pivots", "_basis")

    def __init__(self, n: int, vecs: Sequence[Sequence] = (), *, _canonical: bool = False):
        self.n = n
        if _canonical:
            self._vecs = tuple(tuple(v) for v in vecs)
            self.pivots = tuple(next(i for i, x in enumerate(v) if x) for v in self._vecs)
        else:
            vecs = [v for v in vecs]
            if vecs and any(len(v) != n * n for v in vecs):
                raise DimensionError(f"expected vectors of length {n * n}")
            red, rank, piv = rref(vecs, n * n) if vecs else ([], 0, [])
            self._vecs = tuple(tuple(r) for r in red[:rank])
            self.pivots = tuple(piv)
        self._basis = None

    @classmethod
    def span(cls, matrices: Iterable[RationalMatrix], n: int | None = None) -> "MatrixSubspace":
        matrices = list(matrices)
        if n is None:
            if not matrices:
                raise ValueError("dimension required for an empty spanning set")
            n = matrices[0].n
        for m in matrices:
            if m.n != n:
                raise DimensionError(f"{m.n}x{m.n} matrix in a span of {n}x{n} matrices")
        return cls(n, [m.vec() for m in matrices])

    @classmethod
    def zero(cls, n: int) -> "MatrixSubspace":
        return cls(n, (), _canonical=True)

    @property
    def dim(self) -> int:
        return len(self._vecs)

    def __len__(self):
        return self.dim

    @property
    def basis(self) -> tuple:
        if self._basis is None:
            self._basis = tuple(RationalMatrix.from_vec(v, self.n) for v in self._vecs)
        return self._basis

    @property
    def vectors(self) -> tuple:
        return self._vecs

    def _vec_of(self, m) -> Vector:
        if isinstance(m, RationalMatrix):
            if m.n != self.n:
                raise DimensionError(f"{m.n}x{m.n} matrix tested against a subspace of Mat_{self.n}")
            return m.vec()
        v = tuple(m)
        if len(v) != self.n * self.n:
            raise DimensionError("vector length mismatch")
        return v

    def coordinates(self, m) -> tuple:
        """Coefficients on the canonical basis; only meaningful for members."""
        v = self._vec_of(m)
        return tuple(v[p] for p in self.pivots)

    def residual(self, m) -> Vector:
        """``m`` minus its reduction against the canonical basis (zero iff member)."""
        v = list(self._vec_of(m))
        for b, p in zip(self._vecs, self.pivots):
            c = v[p]
            if c:
                for k in range(p, len(v)):
                    bk = b[k]
                    if bk:
                        v[k] -= c * bk
        return tuple(v)

    def contains(self, m) -> bool:
        return not any(self.residual(m))

    __contains__ = contains

    def __add__(self, other: "MatrixSubspace") -> "MatrixSubspace":
        self._same_n(other)
        return MatrixSubspace(self.n, list(self._vecs) + list(other._vecs))

    def intersection(self, other: "MatrixSubspace") -> "MatrixSubspace":
        """Zassenhaus: rows ``[a|a]`` and ``[b|0]``; zero left halves carry the meet."""
        self._same_n(other)
        N = self.n * self.n
        if not self._vecs or not other._vecs:
            return MatrixSubspace.zero(self.n)
        zero = (ZERO,) * N
        rows = [a + a for a in self._vecs] + [b + zero for b in other._vecs]
        red, rank, piv = rref(rows, 2 * N)
        meet = [r[N:] for r, p in zip(red[:rank], piv) if p >= N]
        return MatrixSubspace(self.n, meet)

    def __and__(self, other):
        return self.intersection(other)

    def issubspace(self, other: "MatrixSubspace") -> bool:
        self._same_n(other)
        return all(other.contains(v) for v in self._vecs)

    def __le__(self, other):
        return self.issubspace(other)

    def __lt__(self, other):
        return self.issubspace(other) and self.dim < other.dim

    def _same_n(self, other):
        if self.n != other.n:
            raise DimensionError(f"subspaces of Mat_{self.n} and Mat_{other.n}")

    def __eq__(self, other):
        if not isinstance(other, MatrixSubspace):
            return NotImplemented
        return self.n == other.n and self._vecs == other._vecs

    def __hash__(self):
        return hash((self.n, self._vecs))

    def __repr__(self):
        return f"MatrixSubspace(n={self.n}, dim={self.dim})"

    def to_json(self) -> list:
        return [b.to_json() for b in self.basis]


def span_contains(S: MatrixSubspace, M: RationalMatrix) -> bool:
    return S.contains(M)


def subspace_sum(S1: MatrixSubspace, S2: MatrixSubspace) -> MatrixSubspace:
    return S1 + S2


def subspace_intersection(S1: MatrixSubspace, S2: MatrixSubspace) -> MatrixSubspace:
    return S1.intersection(S2)


def orthogonal_complement_within(S: MatrixSubspace, U: MatrixSubspace) -> MatrixSubspace:
    """``{X in U : <X, B> = 0 for every B in S}`` under :func:`offdiag_inner`."""
    if not S <= U:
        raise ValueError("S is not contained in U")
    ub = U.basis
    gram = [[offdiag_inner(u, s) for u in ub] for s in S.basis]
    kernel = nullspace(gram, len(ub))
    out = []
    for c in kernel:
        v = [ZERO] * (U.n * U.n)
        for ck, uv in zip(c, U.vectors):
            if ck:
                v = [a + ck * b for a, b in zip(v, uv)]
        out.append(v)
    return MatrixSubspace(U.n, out)


def solve_fixed_space(n: int, conditions) -> MatrixSubspace:
    """All ``X`` in ``Mat_n`` with ``f(X) = 0`` for each linear map ``f``.

    ``conditions`` are callables sending a RationalMatrix to a RationalMatrix.
    The system is assembled column by column from matrix units, so this is a
    brute-force oracle independent of any structured basis.
    """
    N = n * n
    units = [RationalMatrix.from_vec([ONE if k == e else ZERO for k in range(N)], n) for e in range(N)]
    rows = []
    for f in conditions:
        images = [f(u).vec() for u in units]
        for k in range(N):
            rows.append([images[e][k] for e in range(N)])
    return MatrixSubspace(n, nullspace(rows, N))


def load_matrix(path_or_text: str) -> RationalMatrix:
    """Read a matrix in the shared JSON literal format (file path or JSON text)."""
    text = path_or_text
    if not text.lstrip().startswith("["):
        with open(path_or_text) as fh:
            text = fh.read()
    return RationalMatrix.from_json(text)
