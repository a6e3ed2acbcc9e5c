"""Fast rank evaluation for large batches of sigma-polynomials.

A polynomial a is identified with its evaluation tuple
``(a(b_0), ..., a(b_{n-1}))`` on the basis B; its rank is the F_q-dimension of
the span of that tuple.  The tuple map is F_q-linear, so the rank of a
difference is the rank of the difference of tuples.  When ``Q**n`` is small
enough every possible tuple gets its rank precomputed once, which turns
pairwise distance scans into table lookups.  Otherwise the engine falls back
to vectorised elimination on the F_q-coordinate matrices.
"""

from __future__ import annotations

import numpy as np

from .field import FiniteField
from .linpoly import batch_eval_tuples, batch_rank

RANK_TABLE_LIMIT = 2**26
_CHUNK = 1 << 16


def build_rank_table(F: FiniteField) -> np.ndarray:
    """``table[idx]`` = F_q-rank of the tuple encoded by ``idx`` in base Q.

    Built one coordinate at a time: appending ``v`` to a prefix ``t`` raises
    the rank by one exactly when ``v`` lies outside the F_q-span of ``t``.
    """
    Q, n = F.order, F.n
    sub = np.array(F.subfield_elements(), dtype=np.int64)
    ranks = (np.arange(Q) != 0).astype(np.int8)
    for m in range(2, n + 1):
        P = Q ** (m - 1)
        new = np.empty(P * Q, dtype=np.int8)
        for lo in range(0, P, _CHUNK):
            hi = min(P, lo + _CHUNK)
            t = np.arange(lo, hi, dtype=np.int64)
            span = np.zeros((hi - lo, 1), dtype=np.int64)
            for j in range(m - 1):
                comp = (t // Q ** (m - 2 - j)) % Q
                scaled = F.mul(comp[:, None], sub[None, :])
                span = F.add(span[:, :, None], scaled[:, None, :]).reshape(hi - lo, -1)
            inside = np.zeros((hi - lo) * Q, dtype=bool)
            rows = np.arange(hi - lo, dtype=np.int64)[:, None] * Q
            inside[(rows + span).ravel()] = True
            base = np.repeat(ranks[lo:hi], Q)
            new[lo * Q:hi * Q] = base + (~inside).astype(np.int8)
        ranks = new
    return ranks


class RankEngine:
    """Rank oracle for one field context, shared by all code-level scans."""

    def __init__(self, F: FiniteField, table_limit: int = RANK_TABLE_LIMIT):
        self.F = F
        Q, n = F.order, F.n
        self.table = build_rank_table(F) if Q**n <= table_limit else None
        self._scale = np.array([Q ** (n - 1 - j) for j in range(n)], dtype=np.int64)
        self._sub_scaled = None
        if self.table is not None and F.p != 2:
            idx = np.arange(Q, dtype=np.int64)
            sub = F.sub(idx[:, None], idx[None, :])
            self._sub_scaled = [sub * w for w in self._scale]

    def tuples(self, coeffs) -> np.ndarray:
        return batch_eval_tuples(self.F, coeffs)

    def pack(self, tuples) -> np.ndarray:
        return np.asarray(tuples, dtype=np.int64) @ self._scale

    def ranks_of_tuples(self, tuples) -> np.ndarray:
        tuples = np.asarray(tuples, dtype=np.int64)
        if self.table is not None:
            return self.table[self.pack(tuples)].astype(np.int64)
        coords = self.F.coordinates(tuples)
        return batch_rank(self.F, coords)

    def ranks(self, coeffs) -> np.ndarray:
        return self.ranks_of_tuples(self.tuples(coeffs))

    def diff_ranks(self, e, E, packed=None) -> np.ndarray:
        """Ranks of ``e - E[i]`` for one tuple ``e`` against the rows of ``E``.

        ``packed`` may carry ``pack(E)``; it is only used in characteristic 2,
        where subtraction is XOR of the packed indices.
        """
        F = self.F
        if self.table is not None:
            if F.p == 2:
                pe = int(self.pack(e))
                pE = self.pack(E) if packed is None else packed
                return self.table[pe ^ pE]
            idx = self._sub_scaled[0][e[0]][E[:, 0]]
            for j in range(1, F.n):
                idx = idx + self._sub_scaled[j][e[j]][E[:, j]]
            return self.table[idx]
        return self.ranks_of_tuples(F.sub(np.asarray(e)[None, :], E))
