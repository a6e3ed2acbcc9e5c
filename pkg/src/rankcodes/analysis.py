"""Metrics and equivalence tools for rank-metric codes.

Covers minimum distance and distance distributions, the Singleton-like bound,
closure and affineness tests, puncturing, adjoint codes, equivalence maps and
their star product, idealisers, the census of Gabidulin-type subspaces, and an
invariant-based inequivalence report.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import multiprocessing

import numpy as np

from .codes import ExplicitCode, RankCode, encode_rows, product_grid
from .engine import RankEngine
from .errors import GuardError, ParameterError
from .field import FiniteField
from .linpoly import (
    LinearizedPoly,
    MatrixRep,
    batch_adjoint,
    batch_compose,
    batch_matrix_rep,
    batch_rank,
    batch_rho,
)

PAIR_GUARD = 2 * 10**9
IDEALISER_GUARD = 10**6
CENSUS_GUARD = 10**7

_ENGINES: dict = {}


def get_engine(F: FiniteField) -> RankEngine:
    eng = _ENGINES.get(F.key)
    if eng is None:
        eng = _ENGINES[F.key] = RankEngine(F)
    return eng


# -- matrix codes ---------------------------------------------------------------


class MatrixCode:
    """A set of m x c matrices over F_q (entries are subfield indices of ``field``)."""

    def __init__(self, field: FiniteField, mats, claimed_distance=None, label="matrix"):
        mats = np.asarray(mats, dtype=np.int64)
        if mats.ndim != 3:
            raise ParameterError("expected an array of shape (N, m, c)")
        N, m, c = mats.shape
        flat = np.unique(mats.reshape(N, m * c), axis=0)
        self.field = field
        self.shape = (m, c)
        self.mats = flat.reshape(-1, m, c)
        self.mats.setflags(write=False)
        self.claimed_distance = claimed_distance
        self.label = label
        self._keys = np.sort(encode_rows(flat, field.order))

    @classmethod
    def from_rank_code(cls, code: RankCode):
        mats = batch_matrix_rep(code.field, code.enumerate())
        return cls(code.field, mats, code.claimed_distance, code.describe())

    def __len__(self):
        return len(self.mats)

    def members(self, mats) -> np.ndarray:
        mats = np.asarray(mats, dtype=np.int64)
        keys = encode_rows(mats.reshape(mats.shape[:-2] + (-1,)), self.field.order)
        return np.isin(keys, self._keys)

    def matrices(self) -> list[MatrixRep]:
        return [MatrixRep(M.copy(), self.field) for M in self.mats]

    def describe(self) -> str:
        return f"MATRIX({self.label}; {self.shape[0]}x{self.shape[1]})"


def mat_mul(F: FiniteField, A, B):
    """Matrix product over F with numpy broadcasting on leading axes."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    out = None
    for l in range(A.shape[-1]):
        term = F.mul(A[..., :, l:l + 1], B[..., l:l + 1, :])
        out = term if out is None else F.add(out, term)
    return out


# -- Singleton bound and distances ---------------------------------------------


def singleton_bound(m: int, n: int, q: int, d: int) -> int:
    if not 1 <= d <= min(m, n):
        raise ParameterError(f"d must satisfy 1 <= d <= {min(m, n)}")
    return q ** (max(m, n) * (min(m, n) - d + 1))


@dataclass
class DistanceResult:
    min_distance: int
    distribution: dict
    mode: str
    exact: bool
    pairs: int

    def as_json(self):
        return {str(r): c for r, c in sorted(self.distribution.items())}


def _counts_to_dict(counts) -> dict:
    return {int(r): int(c) for r, c in enumerate(counts) if c and r > 0}


def _result(counts, mode, exact) -> DistanceResult:
    dist = _counts_to_dict(counts)
    pairs = sum(dist.values())
    return DistanceResult(min(dist) if dist else 0, dist, mode, exact, pairs)


_STATE: dict = {}


def _exhaustive_chunk(bounds):
    lo, hi = bounds
    st = _STATE
    eng, T, packed, width = st["engine"], st["tuples"], st["packed"], st["width"]
    counts = np.zeros(width, dtype=np.int64)
    for i in range(lo, hi):
        sub = packed[i + 1:] if packed is not None else None
        counts += np.bincount(eng.diff_ranks(T[i], T[i + 1:], sub), minlength=width)
    return counts


def _matrix_chunk(bounds):
    lo, hi = bounds
    st = _STATE
    F, M, width = st["field"], st["mats"], st["width"]
    counts = np.zeros(width, dtype=np.int64)
    for i in range(lo, hi):
        diffs = F.sub(M[i][None], M[i + 1:])
        counts += np.bincount(batch_rank(F, diffs), minlength=width)
    return counts


def _quotient_chunk(bounds):
    lo, hi = bounds
    st = _STATE
    eng, T, packed, starts, reps, weights, width = (
        st["engine"], st["tuples"], st["packed"], st["starts"], st["reps"], st["weights"], st["width"])
    counts = np.zeros(width, dtype=np.int64)
    for i in range(lo, hi):
        s, e = starts[i], starts[i + 1]
        sub = packed[s:] if packed is not None else None
        r = eng.diff_ranks(reps[i], T[s:], sub)
        own = np.bincount(r[: e - s], minlength=width)
        own[0] -= 1
        other = np.bincount(r[e - s:], minlength=width)
        w = weights[i]
        counts += w * other + (w * own) // 2
    return counts


def _run_chunks(fn, total, workers, state, pieces=None):
    """Deterministic chunked reduction; chunks are summed in index order."""
    _STATE.clear()
    _STATE.update(state)
    pieces = pieces or max(1, workers * 8)
    edges = np.linspace(0, total, pieces + 1).astype(int)
    bounds = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if workers <= 1 or len(bounds) <= 1:
        parts = [fn(b) for b in bounds]
    else:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as ex:
            parts = list(ex.map(fn, bounds))
    _STATE.clear()
    return sum(parts, np.zeros(state["width"], dtype=np.int64))


def default_workers() -> int:
    env = os.environ.get("RMF_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParameterError(f"RMF_THREADS={env!r} is not an integer") from None
    return 1


def is_fqn_closed(code: RankCode) -> bool:
    """True iff lambda * C = C for every lambda in F_{q^n}^* and 0 is a codeword."""
    F = code.field
    words = code.enumerate()
    zero = np.zeros((1, F.n), dtype=np.int64)
    return bool(code.members(zero)[0]) and bool(code.members(F.mul(F.generator, words)).all())


def orbit_order(F: FiniteField, words: np.ndarray):
    """Sort codewords by F_{q^n}^* orbit; returns (order, starts, reps).

    The representative of a nonzero orbit is its member whose first nonzero
    coefficient is 1; the zero word is an orbit of its own.
    """
    nz = words != 0
    first = np.where(nz.any(axis=1), np.argmax(nz, axis=1), 0)
    lead = words[np.arange(len(words)), first]
    inv = F.pow(np.where(lead == 0, 1, lead), -1)
    normed = F.mul(words, inv[:, None])
    keys = encode_rows(normed, F.order)
    uniq, inverse = np.unique(keys, return_inverse=True)
    order = np.argsort(inverse, kind="stable")
    counts = np.bincount(inverse, minlength=len(uniq))
    starts = np.concatenate([[0], np.cumsum(counts)])
    first_idx = order[starts[:-1]]
    reps = normed[first_idx]
    return order, starts, reps


def min_distance(code, mode: str = "exhaustive", seed: int = 0, samples: int = 10000,
                 workers: int | None = None, pair_guard: int = PAIR_GUARD) -> DistanceResult:
    """Minimum rank distance and the distribution of pairwise distances.

    ``exhaustive`` scans every unordered pair.  ``quotient`` requires that the
    code is closed under multiplication by F_{q^n}^* (checked here) and uses
    ``d(lA, lB) = d(A, B)`` to fix the first member of each pair to an orbit
    representative.  ``sampled`` draws random pairs from ``seed``; it is never
    exact.  Works for :class:`RankCode` and :class:`MatrixCode`.
    """
    workers = default_workers() if workers is None else max(1, int(workers))
    matrix = isinstance(code, MatrixCode)
    F = code.field
    words = code.mats if matrix else code.enumerate()
    N = len(words)
    if N < 2:
        raise ParameterError("a code needs at least two codewords")
    width = (min(code.shape) if matrix else F.n) + 1
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        i = rng.integers(0, N, size=samples)
        j = (i + rng.integers(1, N, size=samples)) % N
        if matrix:
            r = batch_rank(F, F.sub(words[i], words[j]))
        else:
            eng = get_engine(F)
            r = eng.ranks_of_tuples(F.sub(eng.tuples(words[i]), eng.tuples(words[j])))
        return _result(np.bincount(r, minlength=width), "sampled", False)
    if mode == "exhaustive":
        if N * (N - 1) // 2 > pair_guard:
            raise GuardError(f"{N * (N - 1) // 2} pairs exceed the pair guard {pair_guard}")
        if matrix:
            counts = _run_chunks(_matrix_chunk, N - 1, workers,
                                 {"field": F, "mats": words, "width": width})
        else:
            eng = get_engine(F)
            T = eng.tuples(words)
            packed = eng.pack(T) if (eng.table is not None and F.p == 2) else None
            counts = _run_chunks(_exhaustive_chunk, N - 1, workers,
                                 {"engine": eng, "tuples": T, "packed": packed, "width": width})
        return _result(counts, "exhaustive", True)
    if mode == "quotient":
        if matrix:
            raise ParameterError("quotient mode needs a polynomial code")
        if not is_fqn_closed(code):
            raise ParameterError("quotient mode requires verified closure under F_{q^n}-multiplication")
        order, starts, reps = orbit_order(F, words)
        weights = np.diff(starts)
        if len(reps) * N // 2 > pair_guard:
            raise GuardError("quotient scan exceeds the pair guard")
        eng = get_engine(F)
        T = eng.tuples(words[order])
        packed = eng.pack(T) if (eng.table is not None and F.p == 2) else None
        state = {"engine": eng, "tuples": T, "packed": packed, "starts": starts,
                 "reps": eng.tuples(reps), "weights": weights, "width": width}
        counts = _run_chunks(_quotient_chunk, len(reps), workers, state)
        return _result(counts, "quotient", True)
    raise ParameterError(f"unknown distance mode {mode!r}")


def distance_witness(code, below: int):
    """First pair (i < j in sorted order) at rank distance < ``below``, or None."""
    F = code.field
    if isinstance(code, MatrixCode):
        M = code.mats
        for i in range(len(M) - 1):
            r = batch_rank(F, F.sub(M[i][None], M[i + 1:]))
            hit = np.nonzero(r < below)[0]
            if len(hit):
                j = i + 1 + int(hit[0])
                return {"pair": [_ser(M[i]), _ser(M[j])], "rank": int(r[hit[0]])}
        return None
    words = code.enumerate()
    eng = get_engine(F)
    T = eng.tuples(words)
    packed = eng.pack(T) if (eng.table is not None and F.p == 2) else None
    for i in range(len(words) - 1):
        r = eng.diff_ranks(T[i], T[i + 1:], None if packed is None else packed[i + 1:])
        hit = np.nonzero(r < below)[0]
        if len(hit):
            j = i + 1 + int(hit[0])
            return {"pair": [_ser(words[i]), _ser(words[j])], "rank": int(r[hit[0]])}
    return None


def is_mrd(code, result: DistanceResult | None = None) -> bool:
    """Size meets the Singleton-like bound at the measured distance.

    Only exact distance results certify; the measured distance must also equal
    the claimed one when the code carries a claim.
    """
    result = result or min_distance(code)
    if not result.exact:
        return False
    m, n = code.shape if isinstance(code, MatrixCode) else (code.field.n, code.field.n)
    d = result.min_distance
    ok = len(code) == singleton_bound(m, n, code.field.q, d)
    if code.claimed_distance is not None:
        ok = ok and d == code.claimed_distance
    return ok


# -- closure flags -----------------------------------------------------------------


def _flat(code):
    return code.mats.reshape(len(code), -1) if isinstance(code, MatrixCode) else code.enumerate()


def additivity_witness(F: FiniteField, words: np.ndarray, member):
    """None if ``words`` is an additive group, else a pair (A, B) with A + B outside.

    The subgroup generated so far is grown one codeword at a time; every new
    element is tested, so the first failure yields A = s + (j-1) c and B = c,
    both already known to lie in the set.
    """
    words = np.asarray(words, dtype=np.int64)
    Q = F.order
    keys = encode_rows(words, Q)
    zero = np.zeros((1, words.shape[1]), dtype=np.int64)
    if not member(zero)[0]:
        c = words[0:1]
        prev = c
        while True:
            nxt = F.add(prev, c)
            if not member(nxt)[0]:
                return prev[0], c[0]
            prev = nxt
    span = zero
    span_keys = np.zeros(1, dtype=np.int64)
    for idx in range(len(words)):
        if np.isin(keys[idx], span_keys):
            continue
        c = words[idx]
        layer = span
        new = [span]
        for _ in range(1, F.p):
            nxt = F.add(layer, c[None, :])
            ok = member(nxt)
            if not ok.all():
                bad = int(np.argmax(~ok))
                return layer[bad], c
            new.append(nxt)
            layer = nxt
        span = np.concatenate(new)
        span_keys = np.sort(encode_rows(span, Q))
        if len(span) >= len(words):
            break
    return None


def scalar_witness(F: FiniteField, words, member, scalars):
    """First (word, scalar) in sorted order with scalar * word outside the set."""
    words = np.asarray(words, dtype=np.int64)
    for lam in scalars:
        ok = member(F.mul(lam, words))
        if not ok.all():
            return words[int(np.argmax(~ok))], int(lam)
    return None


def _ser(v) -> str:
    return ",".join(str(int(x)) for x in np.asarray(v).ravel())


def affineness_witness(F, words, member, translations="all"):
    """None if some translate ``C - c0`` (c0 in C) is additive.

    With ``translations="all"`` every codeword is tried as c0; ``"one"``
    uses only the first, which is already decisive because any additive translate
    of C equals C - c for every c in C.  Returns (c0, A, B) of the first translate
    tried otherwise.
    """
    words = np.asarray(words, dtype=np.int64)
    cands = range(len(words)) if translations == "all" else range(1)
    first = None
    for i in cands:
        c0 = words[i]
        shifted = F.sub(words, c0[None, :])

        def in_shift(x, c0=c0):
            return member(F.add(x, c0[None, :]))

        w = additivity_witness(F, shifted, in_shift)
        if w is None:
            return None
        if first is None:
            first = (c0, w[0], w[1])
    return first


def closure_flags(code, affine_translations: str | None = None) -> dict:
    """Additivity, F_q-linearity, scalar closures and affineness with witnesses."""
    F = code.field
    words = _flat(code)
    if isinstance(code, MatrixCode):
        def member(x):
            return code.members(x.reshape((-1,) + code.shape))
    else:
        member = code.members
    flags: dict = {}
    w = additivity_witness(F, words, member)
    flags["additive"] = w is None
    flags["additive_witness"] = None if w is None else [_ser(w[0]), _ser(w[1])]
    sub = F.subfield_elements()[1:]
    w = scalar_witness(F, words, member, sub)
    flags["fq_closed"] = w is None
    flags["fq_witness"] = None if w is None else {"word": _ser(w[0]), "scalar": w[1]}
    flags["fq_linear"] = flags["additive"] and flags["fq_closed"]
    if isinstance(code, MatrixCode):
        flags["fqn_closed"] = None
        flags["fqn_witness"] = None
    else:
        all_nz = list(range(1, F.order))
        w = scalar_witness(F, words, member, [F.generator]) if F.order > 2 else None
        if w is not None:
            w = scalar_witness(F, words, member, all_nz)
        flags["fqn_closed"] = w is None
        flags["fqn_witness"] = None if w is None else {"word": _ser(w[0]), "scalar": w[1]}
    if flags["additive"]:
        flags["affine"], flags["affine_witness"] = True, None
    else:
        mode = affine_translations or ("all" if len(words) <= 4096 else "one")
        w = affineness_witness(F, words, member, mode)
        flags["affine"] = w is None
        flags["affine_witness"] = None if w is None else {
            "translation": _ser(w[0]), "pair": [_ser(w[1]), _ser(w[2])], "scan": mode}
    return flags


# -- puncturing and adjoints -----------------------------------------------------------


def subgeometry_matrices(F: FiniteField, heads) -> np.ndarray:
    """m x n F_q-matrices of vectors in F_{q^n}^m, m = heads.shape[-1] <= n.

    A vector v is written as v = M c with M[i][j] = b_j^(sigma^i) (i, j < m) and
    row j of the matrix holds the B-coordinates of c_j.  Rank one matrices
    correspond exactly to the points (w, w^sigma, ..., w^(sigma^(m-1))) with w
    in the F_q-span of b_0, ..., b_{m-1}.
    """
    heads = np.asarray(heads, dtype=np.int64)
    m = heads.shape[-1]
    if m > F.n:
        raise ParameterError("vector length exceeds n")
    moore = np.array([[F.sigma(F.basis[j], i) for j in range(m)] for i in range(m)], dtype=np.int64)
    inv = _invert_matrix(F, moore)
    c = mat_mul(F, heads[:, None, :], inv.T[None])[:, 0, :]
    return F.coordinates(c)


def _invert_matrix(F: FiniteField, M):
    M = [list(map(int, row)) for row in M]
    m = len(M)
    aug = [row + [1 if i == j else 0 for j in range(m)] for i, row in enumerate(M)]
    for c in range(m):
        piv = next((r for r in range(c, m) if aug[r][c]), None)
        if piv is None:
            raise ParameterError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        iv = F.inv(aug[c][c])
        aug[c] = [F.mul(iv, x) for x in aug[c]]
        for r in range(m):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(aug[r], aug[c])]
    return np.array([row[m:] for row in aug], dtype=np.int64)


def puncture_code(code: RankCode, u: int, model: str = "subgeometry") -> MatrixCode:
    """The punctured code C^[u] as a set of (n-u) x n matrices over F_q.

    ``model="matrix_rows"`` deletes the last u rows of each ``matrix_rep``.
    ``model="subgeometry"`` (default) keeps the first n-u coefficients of every
    codeword and reads the resulting vectors through
    :func:`subgeometry_matrices`; this is the puncturing under which the cone
    code's punctured image lives on the base of the cone.
    """
    F = code.field
    n = F.n
    if not 1 <= u <= n - 1:
        raise ParameterError(f"puncturing needs 1 <= u <= {n - 1}, got {u}")
    words = code.enumerate()
    m = n - u
    if model == "matrix_rows":
        mats = batch_matrix_rep(F, words)[:, :m, :]
    elif model == "subgeometry":
        heads = np.unique(words[:, :m], axis=0)
        mats = subgeometry_matrices(F, heads)
    else:
        raise ParameterError(f"unknown puncturing model {model!r}")
    claimed = None if code.claimed_distance is None else code.claimed_distance
    return MatrixCode(F, mats, claimed, f"{code.describe()}^[{u}]")


def adjoint_code(code: RankCode) -> ExplicitCode:
    F = code.field
    return ExplicitCode(F, batch_adjoint(F, code.enumerate()), code.claimed_distance, f"adjoint({code.describe()})")


# -- equivalence maps ------------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceMap:
    """alpha -> f o alpha^rho o g + h, applied to the adjoint code first if flagged.

    rho is x -> x^(p^r) on coefficients; r is taken modulo a*n.
    """

    f: LinearizedPoly
    rho: int
    g: LinearizedPoly
    h: LinearizedPoly
    adjoint: bool = False

    def __post_init__(self):
        F = self.f.field
        if not (self.g.field.key == F.key == self.h.field.key):
            raise ParameterError("map components live in different fields")
        if not self.f.is_invertible() or not self.g.is_invertible():
            raise ParameterError("f and g must be invertible")
        object.__setattr__(self, "rho", self.rho % F.degree)

    @property
    def field(self):
        return self.f.field

    @classmethod
    def identity(cls, F):
        X = LinearizedPoly.identity(F)
        return cls(X, 0, X, LinearizedPoly.zero(F))

    def apply_words(self, words):
        F = self.field
        words = np.asarray(words, dtype=np.int64)
        if self.adjoint:
            words = batch_adjoint(F, words)
        inner = batch_rho(F, words, self.rho)
        out = batch_compose(F, self.f.array, batch_compose(F, inner, self.g.array))
        return F.add(out, self.h.array)

    def apply_poly(self, alpha: LinearizedPoly) -> LinearizedPoly:
        return LinearizedPoly(self.field, self.apply_words(alpha.array[None])[0])


def apply_equivalence(code: RankCode, E: EquivalenceMap) -> ExplicitCode:
    if code.field.key != E.field.key:
        raise ParameterError("map and code live in different fields")
    image = E.apply_words(code.enumerate())
    return ExplicitCode(code.field, image, code.claimed_distance, "image")


def compose_equivalences(E1: EquivalenceMap, E2: EquivalenceMap) -> EquivalenceMap:
    """The map "apply E1, then E2" (star product).

    For E2 without adjoint flag this is
    (f' o f^rho', rho rho', g^rho' o g', f' o h^rho' o g' + h').  If E2 is
    flagged, the adjoint of E1's image is the image of the adjoint code under
    (g1^, rho1, f1^, h1^), so E1 is rewritten that way and the flags add mod 2.
    """
    F = E1.field
    f1, g1, h1, t = E1.f, E1.g, E1.h, E1.adjoint
    if E2.adjoint:
        f1, g1, h1, t = g1.adjoint(), f1.adjoint(), h1.adjoint(), not t
    r2 = E2.rho
    f = E2.f.compose(f1.rho(r2))
    g = g1.rho(r2).compose(E2.g)
    h = E2.f.compose(h1.rho(r2)).compose(E2.g) + E2.h
    return EquivalenceMap(f, (E1.rho + r2) % F.degree, g, h, t)


def random_invertible(F: FiniteField, rng, max_tries=1000) -> LinearizedPoly:
    for _ in range(max_tries):
        p = LinearizedPoly(F, rng.integers(0, F.order, size=F.n))
        if p.is_invertible():
            return p
    raise RuntimeError("failed to draw an invertible polynomial")


def random_equivalence(F: FiniteField, rng, allow_adjoint=True) -> EquivalenceMap:
    f = random_invertible(F, rng)
    g = random_invertible(F, rng)
    h = LinearizedPoly(F, rng.integers(0, F.order, size=F.n))
    rho = int(rng.integers(0, F.degree))
    adj = bool(rng.integers(0, 2)) if allow_adjoint else False
    return EquivalenceMap(f, rho, g, h, adj)


# -- idealisers ----------------------------------------------------------------------


@dataclass
class Idealiser:
    side: str
    matrices: list
    size: int
    is_field: bool
    invertible: int

    def contains(self, M) -> bool:
        key = tuple(int(v) for v in np.asarray(M).ravel())
        return any(m.key() == key for m in self.matrices)


def _nonzero_invertible(F, mats):
    return batch_rank(F, mats) == mats.shape[-1]


def _is_matrix_field(F, mats, limit=2048) -> bool:
    if len(mats) < 2 or len(mats) > limit:
        return False
    m = mats.shape[-1]
    keys = set(encode_rows(mats.reshape(len(mats), -1), F.order).tolist())
    zero_key = 0
    if zero_key not in keys:
        return False
    if int(encode_rows(np.eye(m, dtype=np.int64).reshape(1, -1), F.order)[0]) not in keys:
        return False
    A = mats[:, None]
    B = mats[None, :]
    sums = encode_rows(F.add(A, B).reshape(len(mats) ** 2, -1), F.order)
    prods = mat_mul(F, A, B)
    prods_rev = mat_mul(F, B, A)
    if not set(sums.tolist()) <= keys:
        return False
    pk = encode_rows(prods.reshape(len(mats) ** 2, -1), F.order)
    if not set(pk.tolist()) <= keys:
        return False
    if not np.array_equal(prods, prods_rev):
        return False
    nz = encode_rows(mats.reshape(len(mats), -1), F.order) != 0
    return bool(_nonzero_invertible(F, mats[nz]).all())


def _idealiser(code, side, guard):
    mc = code if isinstance(code, MatrixCode) else MatrixCode.from_rank_code(code)
    F = mc.field
    m, c = mc.shape
    dim = m if side == "left" else c
    total = F.q ** (dim * dim)
    if total > guard:
        raise GuardError(f"{total} candidate matrices exceed the idealiser guard {guard}")
    sub = np.array(F.subfield_elements(), dtype=np.int64)
    cands = product_grid(sub, dim * dim).reshape(-1, dim, dim)
    for C in mc.mats:
        if not len(cands):
            break
        prod = mat_mul(F, cands, C[None]) if side == "left" else mat_mul(F, C[None], cands)
        cands = cands[mc.members(prod)]
    mats = [MatrixRep(M.copy(), F) for M in cands]
    inv = int(_nonzero_invertible(F, cands).sum()) if len(cands) else 0
    return Idealiser(side, mats, len(mats), _is_matrix_field(F, cands) if len(cands) else False, inv)


def left_idealiser(code, guard: int = IDEALISER_GUARD) -> Idealiser:
    """All P (invertible or not) with P C in the code for every codeword C."""
    return _idealiser(code, "left", guard)


def right_idealiser(code, guard: int = IDEALISER_GUARD) -> Idealiser:
    return _idealiser(code, "right", guard)


# -- census of Gabidulin-type subspaces ---------------------------------------------


def ambient_degree(code: RankCode) -> int:
    """Smallest K with code inside G_K (1 + largest index of a nonzero slot)."""
    used = np.flatnonzero(np.any(code.enumerate() != 0, axis=0))
    return int(used[-1]) + 1 if len(used) else 1


@dataclass
class CensusEntry:
    f: LinearizedPoly
    g: LinearizedPoly
    elements: tuple

    def contains(self, alpha) -> bool:
        key = int(encode_rows(np.asarray(alpha.coeffs if isinstance(alpha, LinearizedPoly) else alpha,
                                         dtype=np.int64)[None], self.f.field.order)[0])
        return key in set(self.elements)


def _polys_with_degree(F, t, lead_one):
    """Coefficient rows with sigma-degree exactly t (f_0 = 1 if ``lead_one``)."""
    n, Q = F.n, F.order
    elems = np.arange(Q, dtype=np.int64)
    if lead_one:
        if t == 0:
            rows = np.zeros((1, n), dtype=np.int64)
            rows[0, 0] = 1
            return rows
        mid = product_grid(elems, t - 1)
        last = elems[1:]
        rows = np.zeros((len(mid) * len(last), n), dtype=np.int64)
        rows[:, 0] = 1
        rows[:, 1:t] = np.repeat(mid, len(last), axis=0)
        rows[:, t] = np.tile(last, len(mid))
        return rows
    grid = product_grid(elems, t + 1)
    rows = np.zeros((len(grid), n), dtype=np.int64)
    rows[:, : t + 1] = grid
    return rows


def gabidulin_subspace_census(code: RankCode, r: int, K: int | None = None,
                              guard: int = CENSUS_GUARD) -> list[CensusEntry]:
    """All distinct W = {f o a o g : a in G_r} contained in the code.

    f has f_0 = 1 and sigma-degree t <= K - r, g has sigma-degree <= K - r - t,
    both invertible.  Each W is stored as the sorted tuple of its element keys.
    """
    F = code.field
    n, Q = F.n, F.order
    K = ambient_degree(code) if K is None else K
    if not 1 <= r < K or K > n:
        raise ParameterError(f"census needs 1 <= r < K <= n, got r={r}, K={K}")
    budget = 0
    for t in range(K - r + 1):
        budget += (Q - 1) * Q ** max(t - 1, 0) * Q ** (K - r - t + 1)
    if budget > guard:
        raise GuardError(f"census needs about {budget} (f, g) pairs, over the guard {guard}")
    eng = get_engine(F)
    gens = np.zeros((r * n, n), dtype=np.int64)
    for i in range(r):
        for j in range(n):
            gens[i * n + j, i] = F.basis[j]
    combos = product_grid(np.array(F.subfield_elements(), dtype=np.int64), r * n)
    found: dict[tuple, CensusEntry] = {}
    for t in range(K - r + 1):
        fs = _polys_with_degree(F, t, True)
        fs = fs[eng.ranks(fs) == n]
        gdeg = K - r - t
        gs = np.concatenate([_polys_with_degree(F, d, False) for d in range(gdeg + 1)])
        gs = np.unique(gs, axis=0)
        gs = gs[eng.ranks(gs) == n]
        if not len(fs) or not len(gs):
            continue
        inner = batch_compose(F, gens[None, :, :], gs[:, None, :])  # (G, rn, n)
        for f in fs:
            images = batch_compose(F, f[None, None, :], inner)
            ok = code.members(images).all(axis=1)
            for gi in np.flatnonzero(ok):
                basis = images[gi]
                span = np.zeros((len(combos), n), dtype=np.int64)
                for b in range(r * n):
                    span = F.add(span, F.mul(combos[:, b:b + 1], basis[b][None, :]))
                if not code.members(span).all():
                    continue
                key = tuple(np.unique(encode_rows(span, Q)).tolist())
                if key not in found:
                    found[key] = CensusEntry(LinearizedPoly(F, f), LinearizedPoly(F, gs[gi]), key)
    return [found[k] for k in sorted(found)]


def subspace_elements(F: FiniteField, f: LinearizedPoly, g: LinearizedPoly, r: int) -> np.ndarray:
    """All elements of {f o a o g : a in G_r}."""
    alphas = np.pad(product_grid(np.arange(F.order), r), ((0, 0), (0, F.n - r)))
    return batch_compose(F, f.array, batch_compose(F, alphas, g.array))


# -- reports ------------------------------------------------------------------------


def code_report(code, mode: str = "exhaustive", seed: int = 0, timing: bool = False,
                workers: int | None = None, flags: bool = True) -> dict:
    """The CodeReport record as a JSON-ready dict."""
    t0 = time.perf_counter()
    res = min_distance(code, mode=mode, seed=seed, workers=workers)
    if isinstance(code, MatrixCode):
        m, n = code.shape
        family, params = "EXPLICIT_MATRIX", {"label": code.label, "rows": m, "cols": n}
    else:
        m = n = code.field.n
        family, params = code.family.value, {k: v for k, v in code.params.items()}
    q = code.field.q
    d = res.min_distance
    report = {
        "family": family,
        "params": params,
        "field": code.field.spec,
        "size": len(code),
        "singleton_bound": singleton_bound(m, n, q, d) if d >= 1 else None,
        "claimed_distance": code.claimed_distance,
        "min_distance": d,
        "is_mrd": is_mrd(code, res),
        "distance_mode": res.mode,
        "distance_exact": res.exact,
        "distance_distribution": res.as_json(),
        "flags": closure_flags(code) if flags else {},
        "runtime": None,
        "seed": seed,
    }
    if not res.exact:
        report["is_mrd"] = False
    if report["singleton_bound"] is not None and m != n:
        report["shape"] = [m, n]
    if timing:
        report["runtime"] = round(time.perf_counter() - t0, 3)
    return report


def is_affine(code, translations: str = "all") -> bool:
    words = _flat(code)
    if additivity_witness(code.field, words, code.members) is None:
        return True
    return affineness_witness(code.field, words, code.members, translations) is None


def inequivalence_report(c1: RankCode, c2: RankCode, census_guard: int = CENSUS_GUARD,
                         idealiser_guard: int = 2**15) -> dict:
    """Compare equivalence invariants; never concludes equivalence.

    Invariants, checked in order: size, distance distribution, affineness, and
    the number of Gabidulin-type subspaces of dimension r = log_Q|C| - 1 in the
    common ambient G_K.  Closure flags and idealiser sizes are reported as
    non-invariant information only.
    """
    F = c1.field
    if F.key != c2.field.key:
        raise ParameterError("codes over different fields")
    inv: dict = {}
    inv["size"] = [len(c1), len(c2)]
    d1, d2 = min_distance(c1), min_distance(c2)
    inv["distance_distribution"] = [d1.as_json(), d2.as_json()]
    inv["affine"] = [is_affine(c1), is_affine(c2)]
    census_note = None
    r_vals = [round(math.log(len(c), F.order)) - 1 for c in (c1, c2)]
    if r_vals[0] == r_vals[1] and r_vals[0] >= 1 and F.order ** (r_vals[0] + 1) in (len(c1), len(c2)):
        K = max(ambient_degree(c1), ambient_degree(c2))
        try:
            counts = [len(gabidulin_subspace_census(c, r_vals[0], K, census_guard)) for c in (c1, c2)]
            inv["census"] = {"r": r_vals[0], "K": K, "counts": counts}
        except GuardError as exc:
            census_note = str(exc)
    else:
        census_note = "sizes are not powers Q^(r+1) with a common r"
    verdict = {"verdict": "INCONCLUSIVE"}
    for name in ("size", "distance_distribution", "affine", "census"):
        if name not in inv:
            continue
        vals = inv[name]["counts"] if name == "census" else inv[name]
        if vals[0] != vals[1]:
            verdict = {"verdict": "DISTINGUISHED", "invariant": name, "values": vals}
            if name == "census":
                verdict["basis"] = "Gabidulin-subspace count under equivalences of the two-sided composition type"
            break
    info: dict = {"label": "non-invariant, informational only"}
    info["closure"] = [
        {k: v for k, v in closure_flags(c, "one").items() if not k.endswith("witness")} for c in (c1, c2)]
    sizes = []
    for c in (c1, c2):
        try:
            sizes.append(left_idealiser(c, idealiser_guard).size)
        except GuardError:
            sizes.append(None)
    info["left_idealiser_size"] = sizes
    out = {
        "codes": [c1.describe(), c2.describe()],
        "field": F.spec,
        "invariants": inv,
        "informational": info,
        **verdict,
    }
    if census_note:
        out["census_note"] = census_note
    return out
