"""Projective geometry over F_{q^n} for the cone construction.

Points are stored as normalised coordinate rows (first nonzero entry 1), so
equal points have equal rows.  Point sets keep their rows sorted and unique
together with an integer key per row for fast membership.  All geometry is
over the coordinate field F_{q^n}; the field order used by the size formulas
is passed explicitly.
"""

from __future__ import annotations

import enum
import itertools

import numpy as np

from .codes import ExplicitCode, encode_rows, minus_one_power, product_grid, xi_exponents
from .analysis import get_engine
from .errors import ParameterError
from .field import FiniteField
from .linpoly import batch_rank


class Label(str, enum.Enum):
    SIGMA = "SIGMA"
    GAMMA = "GAMMA"
    X_COMPONENT = "X_COMPONENT"
    J_SET = "J_SET"
    E_SET = "E_SET"
    CONE = "CONE"
    GENERIC = "GENERIC"


def normalize(F: FiniteField, vecs) -> np.ndarray:
    """Scale each nonzero row so that its first nonzero entry is 1."""
    vecs = np.atleast_2d(np.asarray(vecs, dtype=np.int64))
    nz = vecs != 0
    if not nz.any(axis=1).all():
        raise ParameterError("the zero vector is not a projective point")
    first = np.argmax(nz, axis=1)
    lead = vecs[np.arange(len(vecs)), first]
    return F.mul(vecs, F.pow(lead, -1)[:, None])


class ProjPoint:
    """A point of PG(m-1, q^n) in normalised homogeneous coordinates."""

    __slots__ = ("field", "coords")

    def __init__(self, field: FiniteField, coords):
        self.field = field
        self.coords = tuple(int(c) for c in normalize(field, coords)[0])

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def array(self):
        return np.array(self.coords, dtype=np.int64)

    def serialize(self) -> str:
        return ":".join(str(c) for c in self.coords)

    @classmethod
    def parse(cls, field, text: str):
        return cls(field, [int(t) for t in text.strip().split(":")])

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.field.key == other.field.key and self.coords == other.coords

    def __hash__(self):
        return hash((self.field.key, self.coords))

    def __repr__(self):
        return f"ProjPoint({self.serialize()})"


class PointSet:
    """A finite set of points of equal dimension with a role label."""

    def __init__(self, field: FiniteField, points, label: Label = Label.GENERIC, dim: int | None = None):
        pts = np.asarray(points, dtype=np.int64)
        if pts.size == 0:
            if dim is None:
                raise ParameterError("an empty point set needs an explicit dim")
            pts = np.zeros((0, dim), dtype=np.int64)
        else:
            pts = np.unique(normalize(field, pts), axis=0)
        self.field = field
        self.points = pts
        self.points.setflags(write=False)
        self.label = Label(label)
        self.dim = pts.shape[1]
        self.keys = encode_rows(pts, field.order)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        for row in self.points:
            yield ProjPoint(self.field, row)

    def contains(self, vecs) -> np.ndarray:
        """Membership of (not necessarily normalised) nonzero rows."""
        vecs = np.atleast_2d(np.asarray(vecs, dtype=np.int64))
        return np.isin(encode_rows(normalize(self.field, vecs), self.field.order), self.keys)

    def __contains__(self, P):
        arr = P.array if isinstance(P, ProjPoint) else np.asarray(P)
        return bool(self.contains(arr[None])[0])

    def union(self, other, label=Label.GENERIC):
        return PointSet(self.field, np.concatenate([self.points, other.points]), label, self.dim)

    def difference(self, other, label=Label.GENERIC):
        keep = ~np.isin(self.keys, other.keys)
        return PointSet(self.field, self.points[keep], label, self.dim)

    def serialize(self) -> str:
        lines = [f"dim={self.dim} field={self.field.spec}"]
        lines += [":".join(str(int(c)) for c in row) for row in self.points]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, fields=None):
        from .field import parse_field_spec

        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = dict(tok.split("=", 1) for tok in lines[0].split())
        F = parse_field_spec(head["field"])
        dim = int(head["dim"])
        rows = [[int(t) for t in ln.split(":")] for ln in lines[1:]]
        return cls(F, rows, Label.GENERIC, dim)

    def __repr__(self):
        return f"PointSet({self.label.value}, {len(self)} points, dim={self.dim})"


class ProjSubspace:
    """The span of some vectors, kept as a reduced row echelon basis."""

    def __init__(self, field: FiniteField, vectors, dim: int):
        self.field = field
        self.dim = dim
        self.basis = _rref(field, np.asarray(vectors, dtype=np.int64).reshape(-1, dim), dim)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vecs) -> np.ndarray:
        vecs = np.atleast_2d(np.asarray(vecs, dtype=np.int64))
        if self.rank == 0:
            return np.all(vecs == 0, axis=1)
        stacked = np.concatenate([np.broadcast_to(self.basis, (len(vecs),) + self.basis.shape),
                                  vecs[:, None, :]], axis=1)
        return batch_rank(self.field, stacked) == self.rank

    def points(self) -> PointSet:
        F = self.field
        if self.rank == 0:
            return PointSet(F, [], Label.GENERIC, self.dim)
        combos = product_grid(np.arange(F.order), self.rank)[1:]
        vecs = np.zeros((len(combos), self.dim), dtype=np.int64)
        for i in range(self.rank):
            vecs = F.add(vecs, F.mul(combos[:, i:i + 1], self.basis[i][None, :]))
        return PointSet(F, vecs, Label.GENERIC, self.dim)

    def __repr__(self):
        return f"ProjSubspace(rank={self.rank}, dim={self.dim})"


def _rref(F: FiniteField, rows, dim: int) -> np.ndarray:
    rows = [list(map(int, r)) for r in rows]
    out = []
    for col in range(dim):
        piv = next((i for i, r in enumerate(rows) if r[col]), None)
        if piv is None:
            continue
        r = rows.pop(piv)
        iv = F.inv(r[col])
        r = [F.mul(iv, x) for x in r]
        rows = [[F.sub(x, F.mul(rr[col], y)) for x, y in zip(rr, r)] for rr in rows]
        out = [[F.sub(x, F.mul(o[col], y)) for x, y in zip(o, r)] for o in out]
        out.append(r)
    out.sort(key=lambda r: next(i for i, x in enumerate(r) if x))
    return np.array(out, dtype=np.int64).reshape(-1, dim)


# -- Sigma, sigma-hat and point types ---------------------------------------------


def conjugate_rows(F: FiniteField, x) -> np.ndarray:
    """Rows (x, x^sigma, ..., x^(sigma^(n-1)))."""
    x = np.asarray(x, dtype=np.int64)
    return np.stack([F.sigma(x, i) for i in range(F.n)], axis=-1)


def canonical_subgeometry(F: FiniteField) -> PointSet:
    return PointSet(F, conjugate_rows(F, np.arange(1, F.order)), Label.SIGMA)


def sigma_hat(F: FiniteField, P):
    """(X_0, ..., X_{n-1}) -> (X_{n-1}^sigma, X_0^sigma, ..., X_{n-2}^sigma)."""
    arr = P.array if isinstance(P, ProjPoint) else np.asarray(P, dtype=np.int64)
    if arr.shape[-1] != F.n:
        raise ParameterError("sigma_hat acts on PG(n-1, q^n)")
    img = F.sigma(np.roll(arr, 1, axis=-1), 1)
    return ProjPoint(F, img) if isinstance(P, ProjPoint) else img


def conjugate_matrix(F: FiniteField, vecs) -> np.ndarray:
    """Matrices with rows P, P^sigma-hat, ..., P^(sigma-hat^(n-1))."""
    vecs = np.asarray(vecs, dtype=np.int64)
    rows = [vecs]
    for _ in range(F.n - 1):
        rows.append(F.sigma(np.roll(rows[-1], 1, axis=-1), 1))
    return np.stack(rows, axis=-2)


def point_types(F: FiniteField, vecs, use_engine: bool = True) -> np.ndarray:
    """Type of each point with respect to Sigma, vectorised."""
    vecs = np.atleast_2d(np.asarray(vecs, dtype=np.int64))
    if vecs.shape[-1] != F.n:
        raise ParameterError("point types are defined in PG(n-1, q^n)")
    if use_engine:
        return get_engine(F).ranks(vecs)
    return batch_rank(F, conjugate_matrix(F, vecs))


def point_type(F: FiniteField, P) -> int:
    arr = P.array if isinstance(P, ProjPoint) else np.asarray(P)
    return int(point_types(F, arr[None], use_engine=False)[0])


# -- secant varieties and exterior sets ------------------------------------------


def span_points(F: FiniteField, basis) -> np.ndarray:
    """Normalised points of the span of the given rows (all combinations)."""
    basis = np.asarray(basis, dtype=np.int64)
    combos = product_grid(np.arange(F.order), len(basis))[1:]
    vecs = np.zeros((len(combos), basis.shape[1]), dtype=np.int64)
    for i in range(len(basis)):
        vecs = F.add(vecs, F.mul(combos[:, i:i + 1], basis[i][None, :]))
    vecs = vecs[np.any(vecs != 0, axis=1)]
    return np.unique(normalize(F, vecs), axis=0)


_SECANT_CACHE: dict = {}


def secant_variety(A: PointSet, h: int, guard: int = 10**6) -> PointSet:
    """Omega_h(A): union of the spans of at most h+1 points of A (brute force, cached)."""
    F = A.field
    key = (F.key, A.keys.tobytes(), h)
    hit = _SECANT_CACHE.get(key)
    if hit is not None:
        return hit
    full_rank = int(batch_rank(F, A.points[None])[0]) if len(A) else 0
    size = min(h + 1, full_rank)
    from math import comb

    if comb(len(A), size) > guard:
        raise ParameterError(f"secant enumeration over C({len(A)},{size}) subsets exceeds the guard")
    chunks = [A.points]
    for j in range(2, size + 1):
        for sub in itertools.combinations(range(len(A)), j):
            rows = A.points[list(sub)]
            if int(batch_rank(F, rows[None])[0]) == j:
                chunks.append(span_points(F, rows))
    out = PointSet(F, np.concatenate(chunks), Label.GENERIC, A.dim)
    _SECANT_CACHE[key] = out
    return out


def _is_full_sigma(A: PointSet) -> bool:
    F = A.field
    return A.dim == F.n and len(A) == (F.order - 1) // (F.q - 1) and A.label == Label.SIGMA


def in_secant(A: PointSet, h: int, vecs, fast: bool | None = None) -> np.ndarray:
    """Vectorised membership of nonzero rows in Omega_h(A)."""
    vecs = np.atleast_2d(np.asarray(vecs, dtype=np.int64))
    if fast is None:
        fast = _is_full_sigma(A)
    if fast:
        return point_types(A.field, vecs) <= h + 1
    return secant_variety(A, h).contains(vecs)


def secant_membership(P, A: PointSet, h: int, fast: bool | None = None) -> bool:
    """True iff P lies in the span of at most h+1 points of A.

    The brute-force path tries subsets in increasing size and stops at the
    first span containing P; for the full canonical subgeometry the fast path
    compares the point type with h+1.
    """
    arr = P.array if isinstance(P, ProjPoint) else np.asarray(P, dtype=np.int64)
    if h < 0:
        raise ParameterError("h must be >= 0")
    if fast is None:
        fast = _is_full_sigma(A)
    if fast:
        return bool(point_types(A.field, arr[None])[0] <= h + 1)
    F = A.field
    v = normalize(F, arr)
    if A.contains(v)[0]:
        return True
    for j in range(2, h + 2):
        for sub in itertools.combinations(range(len(A)), j):
            rows = A.points[list(sub)]
            r = int(batch_rank(F, rows[None])[0])
            if r == j and int(batch_rank(F, np.concatenate([rows, v])[None])[0]) == j:
                return True
    return False


def line_points(F: FiniteField, P, R) -> np.ndarray:
    """All Q + 1 points of the line PR: P itself and R + t P for t in F_{q^n}."""
    P = np.asarray(P, dtype=np.int64)
    R = np.asarray(R, dtype=np.int64)
    t = np.arange(F.order, dtype=np.int64)
    pts = F.add(R[None, :], F.mul(t[:, None], P[None, :]))
    return np.concatenate([P[None, :], pts])


def is_exterior_set(E: PointSet, A: PointSet, h: int, fast: bool | None = None):
    """Check that every line joining two points of E misses Omega_h(A).

    Lines include their endpoints, so E itself must avoid Omega_h(A).
    Returns (True, None) or (False, witness) with witness
    {"pair": [P, R], "point": X} as serialized points.
    """
    F = E.field
    if E.dim != A.dim:
        raise ParameterError("E and A live in different spaces")
    pts = E.points
    if len(pts) == 0:
        return True, None
    bad = in_secant(A, h, pts, fast)
    if bad.any():
        i = int(np.argmax(bad))
        j = (i + 1) % len(pts) if len(pts) > 1 else i
        X = _ser(pts[i])
        return False, {"pair": sorted([_ser(pts[i]), _ser(pts[j])]), "point": X}
    t = np.arange(1, F.order, dtype=np.int64)
    for i in range(len(pts) - 1):
        others = pts[i + 1:]
        cand = F.add(others[:, None, :], F.mul(t[None, :, None], pts[i][None, None, :]))
        flat = cand.reshape(-1, E.dim)
        hit = in_secant(A, h, flat, fast)
        if hit.any():
            k = int(np.argmax(hit))
            j = i + 1 + k // len(t)
            X = normalize(F, flat[k])[0]
            return False, {"pair": [_ser(pts[i]), _ser(pts[j])], "point": _ser(X)}
    return True, None


def _ser(row) -> str:
    return ":".join(str(int(c)) for c in np.asarray(row).ravel())


def exterior_bound(n: int, h: int, q: int) -> int:
    """(q^(n-h-1) - 1)/(q - 1), the largest size of an exterior set to Omega_h."""
    if not 0 <= h <= n - 1:
        raise ParameterError(f"need 0 <= h <= n-1, got h={h}")
    return (q ** (n - h - 1) - 1) // (q - 1)


def exterior_bound_in_cone(n: int, h: int, q: int, t: int) -> int:
    """Bound when A spans a PG(t-1, q): the h-bound up to h = t-1, then (q^(n-t)-1)/(q-1)."""
    if not 0 <= h <= n - 1:
        raise ParameterError(f"need 0 <= h <= n-1, got h={h}")
    if h <= t - 1:
        return exterior_bound(n, h, q)
    return (q ** (n - t) - 1) // (q - 1)


# -- cones, projections, embeddings ---------------------------------------------------


def cone(M: PointSet, N: PointSet, label=Label.CONE) -> PointSet:
    """All points on lines joining a point of M to a point of N (K(empty, N) = N)."""
    F = N.field
    if len(M) and M.dim != N.dim:
        raise ParameterError("vertex and base live in different spaces")
    if np.isin(M.keys, N.keys).any():
        raise ParameterError("vertex and base must be disjoint")
    if len(M) == 0:
        return PointSet(F, N.points, label, N.dim)
    t = np.arange(1, F.order, dtype=np.int64)
    joins = F.add(N.points[:, None, None, :], F.mul(t[None, None, :, None], M.points[None, :, None, :]))
    allp = np.concatenate([M.points, N.points, joins.reshape(-1, N.dim)])
    return PointSet(F, allp, label, N.dim)


def _solve(F: FiniteField, A, b):
    """Solve A x = b over F for square invertible A (Gauss-Jordan)."""
    m = len(A)
    aug = [list(map(int, A[i])) + [int(b[i])] for i in range(m)]
    for c in range(m):
        piv = next((r for r in range(c, m) if aug[r][c]), None)
        if piv is None:
            raise ParameterError("subspaces are not complementary")
        aug[c], aug[piv] = aug[piv], aug[c]
        iv = F.inv(aug[c][c])
        aug[c] = [F.mul(iv, x) for x in aug[c]]
        for r in range(m):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(aug[r], aug[c])]
    return [aug[i][m] for i in range(m)]


def project(P, Lstar: ProjSubspace, Lam: ProjSubspace) -> ProjPoint:
    """The point <Lstar, P> meet Lam, for complementary Lstar and Lam."""
    F = Lam.field
    arr = P.array if isinstance(P, ProjPoint) else np.asarray(P, dtype=np.int64)
    if Lstar.rank + Lam.rank != Lam.dim:
        raise ParameterError("rank(Lstar) + rank(Lambda) must equal the ambient rank")
    if Lstar.rank == 0:
        return ProjPoint(F, arr)
    B = np.concatenate([Lstar.basis, Lam.basis])
    x = _solve(F, B.T, arr)
    comp = np.zeros(Lam.dim, dtype=np.int64)
    for c, row in zip(x[Lstar.rank:], Lam.basis):
        comp = F.add(comp, F.mul(c, row))
    if not np.any(comp):
        raise ParameterError("P lies in the vertex; projection undefined")
    return ProjPoint(F, comp)


def is_embedding(Lstar: ProjSubspace, k: int | None = None):
    """Every vertex point has type >= n - rank(Lstar) + 1.

    Returns (ok, minimum type found, threshold); an empty vertex passes.  A
    vertex meeting Sigma simply fails the threshold.
    """
    F = Lstar.field
    threshold = F.n - Lstar.rank + 1
    if k is not None and Lstar.rank != k - 2:
        raise ParameterError(f"vertex rank {Lstar.rank} does not match k - 2 = {k - 2}")
    if Lstar.rank == 0:
        return True, None, threshold
    types = point_types(F, Lstar.points().points)
    low = int(types.min())
    return bool(low >= threshold), low, threshold


# -- the construction ----------------------------------------------------------------


def _check_k(F: FiniteField, k: int):
    if not 2 <= k <= F.n - 1:
        raise ParameterError(f"need 2 <= k <= n-1, got k={k}")


def vertex_subspace(F: FiniteField, k: int) -> ProjSubspace:
    """Lambda*: X_0 = ... = X_{n-k+1} = 0 (rank k-2)."""
    _check_k(F, k)
    eye = np.eye(F.n, dtype=np.int64)
    return ProjSubspace(F, eye[F.n - k + 2:], F.n)


def base_subspace(F: FiniteField, k: int) -> ProjSubspace:
    """Lambda: the last k-2 coordinates vanish (rank n-k+2)."""
    _check_k(F, k)
    eye = np.eye(F.n, dtype=np.int64)
    return ProjSubspace(F, eye[: F.n - k + 2], F.n)


def gamma_set(F: FiniteField, k: int) -> PointSet:
    """Gamma = {(x, x^sigma, ..., x^(sigma^(n-k+1)), 0, ..., 0)}."""
    _check_k(F, k)
    rows = conjugate_rows(F, np.arange(1, F.order))
    rows[:, F.n - k + 2:] = 0
    return PointSet(F, rows, Label.GAMMA)


def cf_vertices(F: FiniteField, k: int):
    _check_k(F, k)
    A = np.zeros(F.n, dtype=np.int64)
    A[F.n - k + 1] = 1
    B = np.zeros(F.n, dtype=np.int64)
    B[0] = 1
    return A, B


def _fiber(F, a):
    if a == 0 or not F.in_subfield(a):
        raise ParameterError("a must lie in F_q^*")
    return np.array(F.norm_fiber(a), dtype=np.int64)


def cf_sigma_set(F: FiniteField, k: int, a: int) -> PointSet:
    """X_a = {(1, t, t^(sigma+1), ..., t^(sigma^(n-k) + ... + 1), 0, ..., 0) : N(t) = a}."""
    _check_k(F, k)
    t = _fiber(F, a)
    m = F.n - k + 2
    exps = xi_exponents(F, m)
    rows = np.zeros((len(t), F.n), dtype=np.int64)
    for i in range(m):
        rows[:, i] = F.pow(t, exps[i])
    return PointSet(F, rows, Label.X_COMPONENT)


def j_set(F: FiniteField, k: int, a: int) -> PointSet:
    """J_a = {(1, 0, ..., 0, (-1)^(n-k) t, 0, ..., 0) : N(t) = a}, entry in slot n-k+1."""
    _check_k(F, k)
    t = _fiber(F, a)
    rows = np.zeros((len(t), F.n), dtype=np.int64)
    rows[:, 0] = 1
    rows[:, F.n - k + 1] = F.mul(minus_one_power(F, F.n - k), t)
    return PointSet(F, rows, Label.J_SET)


def cf_set(F: FiniteField, k: int) -> PointSet:
    """X = union of all X_a together with the vertices A and B."""
    A, B = cf_vertices(F, k)
    parts = [cf_sigma_set(F, k, a).points for a in F.subfield_elements()[1:]]
    return PointSet(F, np.concatenate(parts + [A[None], B[None]]), Label.GENERIC)


def _check_T(F, T):
    T = sorted({int(a) for a in T})
    if 1 not in T:
        raise ParameterError("T must contain 1")
    for a in T:
        if a == 0 or not F.in_subfield(a):
            raise ParameterError(f"T must be a subset of F_q^*; {a} is not")
    return T


def dondur_exterior_set(F: FiniteField, k: int, T) -> PointSet:
    """E = (X minus the X_a, a in T) together with the J_a, a in T."""
    T = _check_T(F, T)
    A, B = cf_vertices(F, k)
    parts = [A[None], B[None]]
    for a in F.subfield_elements()[1:]:
        parts.append((j_set if a in T else cf_sigma_set)(F, k, a).points)
    return PointSet(F, np.concatenate(parts), Label.E_SET)


def build_cone_construction(F: FiniteField, k: int, T) -> PointSet:
    """K(Lambda*, E)."""
    E = dondur_exterior_set(F, k, T)
    vertex = vertex_subspace(F, k).points()
    return cone(vertex, E)


def code_from_pointset(K: PointSet, claimed_distance: int | None = None) -> ExplicitCode:
    """All multiples lambda * P (P in K, lambda in F_{q^n}) read as polynomial coefficients."""
    F = K.field
    if K.dim != F.n:
        raise ParameterError("only square codes (dim = n) are supported")
    lam = np.arange(F.order, dtype=np.int64)
    words = F.mul(lam[None, :, None], K.points[:, None, :]).reshape(-1, F.n)
    return ExplicitCode(F, words, claimed_distance, "from point set")


def verify_construction(F: FiniteField, k: int, T) -> dict:
    """Run every check of the cone construction and collect the results."""
    n, Q = F.n, F.order
    h = n - k - 1
    out: dict = {"field": F.spec, "k": k, "T": sorted(int(t) for t in T), "h": h, "field_order": Q}
    Ls = vertex_subspace(F, k)
    ok, low, thr = is_embedding(Ls)
    out["vertex_rank"] = Ls.rank
    out["embedding"] = {"ok": ok, "min_type": low, "threshold": thr}
    E = dondur_exterior_set(F, k, T)
    out["E_size"] = {"value": len(E), "expected": Q + 1, "ok": len(E) == Q + 1}
    G = gamma_set(F, k)
    ok_e, wit = is_exterior_set(E, G, h, fast=False)
    out["E_exterior_gamma"] = {"ok": ok_e, "witness": wit}
    K = cone(Ls.points(), E)
    exp = (Q**k - 1) // (Q - 1)
    out["K_size"] = {"value": len(K), "expected": exp, "ok": len(K) == exp}
    S = canonical_subgeometry(F)
    ok_k, wit = is_exterior_set(K, S, h)
    out["K_exterior_sigma"] = {"ok": ok_k, "witness": wit}
    out["ok"] = all([out["embedding"]["ok"], out["E_size"]["ok"], ok_e, out["K_size"]["ok"], ok_k])
    return out
