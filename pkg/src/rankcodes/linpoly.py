"""sigma-linearized polynomials of sigma-degree < n.

A polynomial ``sum_i a_i X^{sigma^i}`` is stored as the length-n tuple of its
coefficient indices.  Besides the :class:`LinearizedPoly` value type this
module exposes batch versions of the main operations acting on integer arrays
of shape ``(..., n)``, which the code and analysis layers use for whole
enumerations at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FieldMismatchError, ParameterError
from .field import FiniteField


# -- batch kernels ------------------------------------------------------------


def batch_evaluate(F: FiniteField, coeffs, x):
    """Evaluate polynomials ``coeffs[..., n]`` at ``x`` (broadcasting)."""
    coeffs = np.asarray(coeffs, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros(np.broadcast(coeffs[..., 0], x).shape, dtype=np.int64)
    for i in range(F.n):
        out = F.add(out, F.mul(coeffs[..., i], F.sigma(x, i)))
    return out


def batch_compose(F: FiniteField, a, b):
    """Coefficients of ``a o b`` for arrays of coefficient vectors."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n = F.n
    shape = np.broadcast(a, b).shape
    out = np.zeros(shape, dtype=np.int64)
    for i in range(n):
        bi = F.sigma(b, i)
        for j in range(n):
            k = (i + j) % n
            out[..., k] = F.add(out[..., k], F.mul(a[..., i], bi[..., j]))
    return out


def batch_adjoint(F: FiniteField, a):
    a = np.asarray(a, dtype=np.int64)
    n = F.n
    out = np.zeros_like(a)
    for i in range(n):
        out[..., (n - i) % n] = F.sigma(a[..., i], n - i)
    return out


def batch_rho(F: FiniteField, a, r: int):
    """Apply the automorphism ``x -> x^(p^r)`` to every coefficient."""
    return F.frobenius(np.asarray(a, dtype=np.int64), r)


def batch_dickson(F: FiniteField, a):
    """Dickson matrices, entry (r, c) = sigma^r(a_{(c - r) mod n})."""
    a = np.asarray(a, dtype=np.int64)
    n = F.n
    out = np.empty(a.shape[:-1] + (n, n), dtype=np.int64)
    for r in range(n):
        out[..., r, :] = F.sigma(np.roll(a, r, axis=-1), r)
    return out


def batch_eval_tuples(F: FiniteField, a):
    """Images ``(a(b_0), ..., a(b_{n-1}))`` of the basis B under each polynomial."""
    a = np.asarray(a, dtype=np.int64)
    conj = np.array([[F.sigma(b, i) for b in F.basis] for i in range(F.n)], dtype=np.int64)
    out = np.zeros(a.shape[:-1] + (F.n,), dtype=np.int64)
    for i in range(F.n):
        out = F.add(out, F.mul(a[..., i:i + 1], conj[i]))
    return out


def batch_matrix_rep(F: FiniteField, a):
    """F_q-matrices (as subfield indices); column j = B-coordinates of a(b_j)."""
    coords = F.coordinates(batch_eval_tuples(F, a))  # (..., j, coord)
    return np.swapaxes(coords, -1, -2)


def batch_rank(F: FiniteField, mats):
    """Row rank of each matrix in ``mats[..., r, c]`` over F.

    Rows are inserted one by one into a pivot-indexed echelon basis; every
    step is vectorised across the leading axes.  Rank does not change under
    field extension, so this is also the F_q-rank of subfield-valued matrices.
    """
    mats = np.asarray(mats, dtype=np.int64)
    lead = mats.shape[:-2]
    nr, nc = mats.shape[-2:]
    flat = mats.reshape((-1, nr, nc))
    N = flat.shape[0]
    basis = np.zeros((N, nc, nc), dtype=np.int64)
    have = np.zeros((N, nc), dtype=bool)
    rank = np.zeros(N, dtype=np.int64)
    for i in range(nr):
        v = flat[:, i, :].copy()
        live = np.ones(N, dtype=bool)
        for p in range(nc):
            coef = v[:, p]
            nz = (coef != 0) & live
            elim = nz & have[:, p]
            if elim.any():
                v[elim] = F.sub(v[elim], F.mul(coef[elim, None], basis[elim, p, :]))
            place = nz & ~have[:, p]
            if place.any():
                inv = F.pow(coef[place], -1)
                basis[place, p, :] = F.mul(v[place], inv[:, None])
                have[place, p] = True
                rank[place] += 1
                live &= ~place
    return rank.reshape(lead)


def batch_dickson_rank(F: FiniteField, a):
    return batch_rank(F, batch_dickson(F, a))


def batch_matrix_rank(F: FiniteField, a):
    return batch_rank(F, batch_matrix_rep(F, a))


# -- value types --------------------------------------------------------------


@dataclass(frozen=True)
class MatrixRep:
    """A matrix over F_q; entries are subfield indices of ``field``."""

    entries: np.ndarray
    field: FiniteField
    basis_tag: str = "powers-of-generator"

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def rank(self) -> int:
        return int(batch_rank(self.field, self.entries[None])[0])

    def key(self) -> tuple:
        return tuple(int(v) for v in self.entries.ravel())

    def __eq__(self, other):
        if not isinstance(other, MatrixRep):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    def __hash__(self):
        return hash((self.entries.shape, self.key()))


def puncture_matrix(M: MatrixRep, u: int) -> MatrixRep:
    """Delete the last ``u`` rows of ``M``; requires 1 <= u <= rows - 1."""
    if not 1 <= u <= M.rows - 1:
        raise ParameterError(f"puncturing needs 1 <= u <= {M.rows - 1}, got {u}")
    return MatrixRep(M.entries[: M.rows - u].copy(), M.field, M.basis_tag)


class LinearizedPoly:
    """An element ``sum_{i<n} a_i X^{sigma^i}`` of the algebra of sigma-polynomials."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FiniteField, coeffs):
        vals = tuple(int(c) for c in coeffs)
        if len(vals) != field.n:
            raise ParameterError(f"expected {field.n} coefficients, got {len(vals)}")
        if any(not 0 <= v < field.order for v in vals):
            raise ParameterError("coefficient index out of range")
        self.field = field
        self.coeffs = vals

    # constructors
    @classmethod
    def zero(cls, field):
        return cls(field, [0] * field.n)

    @classmethod
    def monomial(cls, field, i: int, c: int = 1):
        v = [0] * field.n
        v[i % field.n] = c
        return cls(field, v)

    @classmethod
    def identity(cls, field):
        return cls.monomial(field, 0)

    @classmethod
    def parse(cls, field, text: str):
        """Inverse of :meth:`serialize` (``"1,0,5"``)."""
        try:
            vals = [int(t) for t in text.strip().split(",")]
        except ValueError as exc:
            raise ParameterError(f"bad polynomial {text!r}") from exc
        return cls(field, vals)

    def serialize(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def _same(self, other):
        if not isinstance(other, LinearizedPoly):
            raise TypeError("expected a LinearizedPoly")
        if other.field.key != self.field.key:
            raise FieldMismatchError("polynomials over different field contexts")

    # algebra
    def __add__(self, other):
        self._same(other)
        return LinearizedPoly(self.field, self.field.add(self.array, other.array))

    def __sub__(self, other):
        self._same(other)
        return LinearizedPoly(self.field, self.field.sub(self.array, other.array))

    def __neg__(self):
        return LinearizedPoly(self.field, self.field.neg(self.array))

    def scale(self, lam: int):
        """Left multiplication ``lam * alpha``."""
        return LinearizedPoly(self.field, self.field.mul(self.array, int(lam)))

    def compose(self, other):
        self._same(other)
        return LinearizedPoly(self.field, batch_compose(self.field, self.array, other.array))

    __matmul__ = compose

    def evaluate(self, x):
        r = batch_evaluate(self.field, self.array, x)
        return int(r) if np.ndim(r) == 0 else r

    __call__ = evaluate

    def adjoint(self):
        return LinearizedPoly(self.field, batch_adjoint(self.field, self.array))

    def rho(self, r: int):
        return LinearizedPoly(self.field, batch_rho(self.field, self.array, r))

    # structure
    @property
    def sigma_degree(self):
        """Largest i with a_i != 0, or None for the zero polynomial."""
        nz = [i for i, c in enumerate(self.coeffs) if c]
        return nz[-1] if nz else None

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def dickson_matrix(self) -> np.ndarray:
        return batch_dickson(self.field, self.array)

    def rank(self) -> int:
        return int(batch_dickson_rank(self.field, self.array[None])[0])

    def matrix_rep(self) -> MatrixRep:
        return MatrixRep(batch_matrix_rep(self.field, self.array), self.field)

    def is_invertible(self) -> bool:
        return self.rank() == self.field.n

    def __eq__(self, other):
        if not isinstance(other, LinearizedPoly):
            return NotImplemented
        return self.field.key == other.field.key and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.key, self.coeffs))

    def __repr__(self):
        terms = [f"{c}*X^s{i}" for i, c in enumerate(self.coeffs) if c]
        return f"LinearizedPoly({' + '.join(terms) or '0'})"


def evaluate(alpha: LinearizedPoly, x):
    return alpha.evaluate(x)


def compose(alpha: LinearizedPoly, beta: LinearizedPoly) -> LinearizedPoly:
    return alpha.compose(beta)


def adjoint(alpha: LinearizedPoly) -> LinearizedPoly:
    return alpha.adjoint()


def dickson_matrix(alpha: LinearizedPoly) -> np.ndarray:
    return alpha.dickson_matrix()


def rank(alpha: LinearizedPoly) -> int:
    return alpha.rank()


def matrix_rep(alpha: LinearizedPoly) -> MatrixRep:
    return alpha.matrix_rep()


def is_invertible(alpha: LinearizedPoly) -> bool:
    return alpha.is_invertible()
