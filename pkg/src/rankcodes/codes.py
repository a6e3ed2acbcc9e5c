"""Rank-metric code families as sets of sigma-linearized polynomials.

Every family has a vectorised closed-form membership predicate and an
enumerator returning a sorted, duplicate-free ``(size, n)`` array of
coefficient indices.  Subsets of F_q (the sets I and T) are passed to the
library as field element indices; the command line uses the integer labels of
:meth:`FiniteField.subfield_elements` instead (see :func:`parse_code_spec`).
"""

from __future__ import annotations

import enum
from functools import cached_property

import numpy as np

from .errors import GuardError, ParameterError
from .field import FiniteField
from .linpoly import LinearizedPoly

DEFAULT_GUARD = 2**22


class Family(str, enum.Enum):
    GABIDULIN = "GABIDULIN"
    TWISTED = "TWISTED"
    TROMBETTI_ZHOU = "TROMBETTI_ZHOU"
    OO_ADDITIVE = "OO_ADDITIVE"
    OO_NONLINEAR = "OO_NONLINEAR"
    C_SIGMA_T = "C_SIGMA_T"
    EXPLICIT = "EXPLICIT"


def product_grid(values, k: int) -> np.ndarray:
    """All k-tuples over ``values`` in lexicographic order, shape (len**k, k)."""
    values = np.asarray(values, dtype=np.int64)
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*([values] * k), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def minus_one_power(F: FiniteField, e: int) -> int:
    return 1 if e % 2 == 0 else F.neg(1)


def _exp_sum(base: int, s: int, terms: int, modulus: int) -> int:
    return sum(pow(base, s * i, modulus) for i in range(terms)) % modulus


def twisted_norm(F: FiniteField, eta) -> int:
    """``eta ** sum_{i<n} q^(s i)``; equals the usual norm because gcd(s, n) = 1."""
    return F.pow(eta, _exp_sum(F.q, F.s, F.n, F.order - 1) or (F.order - 1))


def _check_n(F: FiniteField):
    if F.n < 3:
        raise ParameterError("code constructions need n >= 3")


def _to_set(F: FiniteField, elems, name):
    out = sorted({int(x) for x in elems})
    for x in out:
        if not 0 <= x < F.order or not F.in_subfield(x):
            raise ParameterError(f"{name} must be a subset of F_q; {x} is not in F_q")
    return out


class RankCode:
    """A code of sigma-polynomials over ``field``.

    Subclasses implement :meth:`_enumerate` and :meth:`_members`.
    """

    family: Family = Family.EXPLICIT

    def __init__(self, field: FiniteField, params: dict, claimed_distance: int | None, k: int | None = None):
        self.field = field
        self.params = params
        self.claimed_distance = claimed_distance
        self.k = k

    # -- public API ---------------------------------------------------------

    @property
    def expected_size(self) -> int | None:
        return None if self.k is None else self.field.order**self.k

    def enumerate(self, guard: int = DEFAULT_GUARD) -> np.ndarray:
        exp = self.expected_size
        if exp is not None and exp > guard:
            raise GuardError(f"enumeration of {exp} codewords exceeds guard {guard}")
        return self._cached

    @cached_property
    def _cached(self) -> np.ndarray:
        words = np.unique(np.asarray(self._enumerate(), dtype=np.int64).reshape(-1, self.field.n), axis=0)
        exp = self.expected_size
        if exp is not None and len(words) != exp:
            raise AssertionError(f"{self.family.value} enumerated {len(words)} codewords, expected {exp}")
        words.setflags(write=False)
        return words

    def members(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=np.int64)
        return self._members(coeffs.reshape(-1, self.field.n)).reshape(coeffs.shape[:-1])

    def contains(self, alpha) -> bool:
        arr = alpha.array if isinstance(alpha, LinearizedPoly) else np.asarray(alpha, dtype=np.int64)
        return bool(self.members(arr[None])[0])

    def __contains__(self, alpha):
        return self.contains(alpha)

    def __len__(self):
        return len(self.enumerate())

    def polys(self):
        for row in self.enumerate():
            yield LinearizedPoly(self.field, row)

    def describe(self) -> str:
        inner = ",".join(f"{key}={_fmt(v)}" for key, v in self.params.items())
        return f"{self.family.value}({inner})"

    def __repr__(self):
        return f"<{self.describe()} over {self.field.spec}>"

    # -- hooks ----------------------------------------------------------------

    def _enumerate(self) -> np.ndarray:
        raise NotImplementedError

    def _members(self, arr: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _fmt(v):
    if isinstance(v, (list, tuple)):
        return "{" + ",".join(str(x) for x in v) + "}"
    return str(v)


def _zero_beyond(arr, k):
    return np.all(arr[:, k + 1:] == 0, axis=1)


class GabidulinCode(RankCode):
    family = Family.GABIDULIN

    def __init__(self, field, k):
        _check_n(field)
        if not 1 <= k <= field.n:
            raise ParameterError(f"Gabidulin codes need 1 <= k <= n, got k={k}")
        super().__init__(field, {"k": k}, field.n - k + 1, k)

    def _enumerate(self):
        head = product_grid(np.arange(self.field.order), self.k)
        return np.pad(head, ((0, 0), (0, self.field.n - self.k)))

    def _members(self, arr):
        return np.all(arr[:, self.k:] == 0, axis=1)


class TwistedGabidulinCode(RankCode):
    """Slots 0..k-1 free, slot k equal to ``eta * a_0^(q^h)``."""

    family = Family.TWISTED

    def __init__(self, field, k, eta, h=0):
        _check_n(field)
        n = field.n
        if not 1 <= k < n:
            raise ParameterError(f"twisted Gabidulin codes need 1 <= k < n, got k={k}")
        if not 0 <= eta < field.order:
            raise ParameterError("eta outside the field")
        if twisted_norm(field, eta) == minus_one_power(field, n * k):
            raise ParameterError(f"norm condition fails: N(eta) = (-1)^(nk) for eta={eta}")
        super().__init__(field, {"k": k, "eta": eta, "h": h}, n - k + 1, k)
        self.eta, self.h = eta, h

    def _twist(self, a0):
        F = self.field
        return F.mul(self.eta, F.frobenius(a0, F.a * self.h))

    def _enumerate(self):
        F, k = self.field, self.k
        head = product_grid(np.arange(F.order), k)
        out = np.pad(head, ((0, 0), (0, F.n - k)))
        out[:, k] = self._twist(head[:, 0])
        return out

    def _members(self, arr):
        return _zero_beyond(arr, self.k) & (arr[:, self.k] == self._twist(arr[:, 0]))


class TrombettiZhouCode(RankCode):
    """a_0 in F_{q^t}, slot k equal to ``xi * b`` with b in F_{q^t}, n = 2t."""

    family = Family.TROMBETTI_ZHOU

    def __init__(self, field, k, xi):
        _check_n(field)
        n = field.n
        if field.q % 2 == 0:
            raise ParameterError("Trombetti-Zhou codes need q odd")
        if n % 2:
            raise ParameterError("Trombetti-Zhou codes need n even")
        if not 1 <= k < n:
            raise ParameterError(f"Trombetti-Zhou codes need 1 <= k < n, got k={k}")
        if not 0 < xi < field.order:
            raise ParameterError("xi must be a nonzero field element")
        if field.is_square_in_subfield(field.norm(xi)):
            raise ParameterError(f"N(xi) is a square in F_q for xi={xi}")
        super().__init__(field, {"k": k, "xi": xi}, n - k + 1, k)
        self.xi = xi
        self.t = n // 2

    def _enumerate(self):
        F, k = self.field, self.k
        half = np.array(F.subfield_elements(self.t), dtype=np.int64)
        mid = product_grid(np.arange(F.order), k - 1)
        ends = product_grid(half, 2)
        i0 = np.repeat(np.arange(len(ends)), len(mid))
        i1 = np.tile(np.arange(len(mid)), len(ends))
        out = np.zeros((len(i0), F.n), dtype=np.int64)
        out[:, 0] = ends[i0, 0]
        out[:, 1:k] = mid[i1]
        out[:, k] = F.mul(self.xi, ends[i0, 1])
        return out

    def _members(self, arr):
        F = self.field
        b = F.mul(arr[:, self.k], F.inv(self.xi))
        return _zero_beyond(arr, self.k) & F.in_subfield(arr[:, 0], self.t) & F.in_subfield(b, self.t)


class OOAdditiveCode(RankCode):
    """F_{q0}-linear twist: slot k equal to ``eta * a_0^(q0^h)``, q = q0^u."""

    family = Family.OO_ADDITIVE

    def __init__(self, field, k, q0, eta, h=0):
        _check_n(field)
        n, p = field.n, field.p
        a0 = next((j for j in range(1, field.a + 1) if p**j == q0), None)
        if a0 is None or field.a % a0:
            raise ParameterError(f"q = {field.q} is not a power of q0 = {q0}")
        if not 1 <= k < n:
            raise ParameterError(f"need 1 <= k < n, got k={k}")
        if not 0 <= eta < field.order:
            raise ParameterError("eta outside the field")
        u = field.a // a0
        e = _exp_sum(q0, field.s, u * n, field.order - 1) or (field.order - 1)
        if field.pow(eta, e) == minus_one_power(field, n * k * u):
            raise ParameterError(f"norm condition fails for eta={eta}: value equals (-1)^(nku)")
        super().__init__(field, {"k": k, "q0": q0, "eta": eta, "h": h}, n - k + 1, k)
        self.q0, self.a0, self.u, self.eta, self.h = q0, a0, u, eta, h

    def _twist(self, a0):
        F = self.field
        return F.mul(self.eta, F.frobenius(a0, self.a0 * self.h))

    def _enumerate(self):
        F, k = self.field, self.k
        head = product_grid(np.arange(F.order), k)
        out = np.pad(head, ((0, 0), (0, F.n - k)))
        out[:, k] = self._twist(head[:, 0])
        return out

    def _members(self, arr):
        return _zero_beyond(arr, self.k) & (arr[:, self.k] == self._twist(arr[:, 0]))


class OONonlinearCode(RankCode):
    """Union of {deg < k, N(a_0) in I} and {a_0 = 0, deg <= k, N(a_k) not in sI}, s = (-1)^(n(k+1))."""

    family = Family.OO_NONLINEAR

    def __init__(self, field, k, I):
        _check_n(field)
        n = field.n
        if not 1 <= k <= n - 1:
            raise ParameterError(f"need 1 <= k <= n-1, got k={k}")
        I = _to_set(field, I, "I")
        super().__init__(field, {"k": k, "I": I}, n - k + 1, k)
        self.I = I
        sgn = minus_one_power(field, n * (k + 1))
        self.sI = sorted(field.mul(sgn, x) for x in I)

    def _norm_in(self, x, S):
        return np.isin(self.field.norm(x), np.array(S, dtype=np.int64))

    def _branches(self):
        F, k = self.field, self.k
        elems = np.arange(F.order, dtype=np.int64)
        first = elems[self._norm_in(elems, self.I)]
        last = elems[~self._norm_in(elems, self.sI)]
        mid = product_grid(elems, k - 1)
        c1 = np.zeros((len(first) * len(mid), F.n), dtype=np.int64)
        c1[:, 0] = np.repeat(first, len(mid))
        c1[:, 1:k] = np.tile(mid, (len(first), 1))
        c2 = np.zeros((len(last) * len(mid), F.n), dtype=np.int64)
        c2[:, 1:k] = np.tile(mid, (len(last), 1))
        c2[:, k] = np.repeat(last, len(mid))
        return c1, c2

    def _enumerate(self):
        c1, c2 = self._branches()
        return np.concatenate([c1, c2])

    def _members(self, arr):
        k = self.k
        in1 = _zero_beyond(arr, k - 1) & self._norm_in(arr[:, 0], self.I)
        in2 = _zero_beyond(arr, k) & (arr[:, 0] == 0) & ~self._norm_in(arr[:, k], self.sI)
        return in1 | in2


def xi_exponents(F: FiniteField, count: int) -> list[int]:
    """``e_i = (q^(s i) - 1)/(q^s - 1) = sum_{j<i} q^(s j)`` reduced mod Q - 1."""
    m = F.order - 1
    return [_exp_sum(F.q, F.s, i, m) for i in range(count)]


class CSigmaTCode(RankCode):
    """The four-branch code built on the cone over the exterior set E.

    Slots ``0 .. n-k+1`` (the head) carry a scalar multiple of a point of E,
    slots ``n-k+2 .. n-1`` (the tail) are free.
    """

    family = Family.C_SIGMA_T

    def __init__(self, field, k, T):
        _check_n(field)
        n = field.n
        if not 2 <= k <= n - 1:
            raise ParameterError(f"need 2 <= k <= n-1, got k={k}")
        T = _to_set(field, T, "T")
        if 0 in T:
            raise ParameterError("T must be a subset of F_q^*")
        if 1 not in T:
            raise ParameterError("T must contain 1")
        super().__init__(field, {"k": k, "T": T}, n - k + 1, k)
        self.T = T
        self.head_len = n - k + 2
        self.exps = xi_exponents(field, self.head_len)
        self.sign = minus_one_power(field, n - k + 2)

    @property
    def head_slots(self):
        return self.head_len

    def _norm_in_T(self, x):
        return np.isin(self.field.norm(x), np.array(self.T, dtype=np.int64))

    def heads(self) -> np.ndarray:
        """Distinct head vectors (all four branches plus zero); there are Q^2."""
        F, m = self.field, self.head_len
        elems = np.arange(F.order, dtype=np.int64)
        nz = elems[1:]
        nrm_in_t = self._norm_in_T(nz)
        xis, etas = nz[~nrm_in_t], nz[nrm_in_t]
        lam_alpha = product_grid(elems, 2)
        blocks = []
        # (a): lambda alpha^(sigma^i) xi^(e_i)
        if len(xis):
            idx_la = np.repeat(np.arange(len(lam_alpha)), len(xis))
            xi = np.tile(xis, len(lam_alpha))
            lam, alpha = lam_alpha[idx_la, 0], lam_alpha[idx_la, 1]
            b = np.zeros((len(xi), m), dtype=np.int64)
            for i in range(m):
                b[:, i] = F.mul(lam, F.mul(F.sigma(alpha, i), F.pow(xi, self.exps[i])))
            blocks.append(b)
        # (b): lambda alpha X + (-1)^(n-k+2) lambda alpha^sigma eta X^(sigma^(n-k+1))
        idx_la = np.repeat(np.arange(len(lam_alpha)), len(etas))
        eta = np.tile(etas, len(lam_alpha))
        lam, alpha = lam_alpha[idx_la, 0], lam_alpha[idx_la, 1]
        b = np.zeros((len(eta), m), dtype=np.int64)
        b[:, 0] = F.mul(lam, alpha)
        b[:, m - 1] = F.mul(self.sign, F.mul(lam, F.mul(F.sigma(alpha, 1), eta)))
        blocks.append(b)
        # (c) and (d): alpha X^(sigma^(n-k+1)) and alpha X
        b = np.zeros((F.order, m), dtype=np.int64)
        b[:, m - 1] = elems
        blocks.append(b)
        b = np.zeros((F.order, m), dtype=np.int64)
        b[:, 0] = elems
        blocks.append(b)
        heads = np.unique(np.concatenate(blocks), axis=0)
        if len(heads) != F.order**2:
            raise AssertionError(f"expected {F.order ** 2} heads, got {len(heads)}")
        return heads

    def _enumerate(self):
        F = self.field
        heads = self.heads()
        tails = product_grid(np.arange(F.order), F.n - self.head_len)
        out = np.zeros((len(heads) * len(tails), F.n), dtype=np.int64)
        out[:, : self.head_len] = np.repeat(heads, len(tails), axis=0)
        out[:, self.head_len:] = np.tile(tails, (len(heads), 1))
        return out

    def _members(self, arr):
        F, m = self.field, self.head_len
        h = arr[:, :m]
        h0 = h[:, 0]
        middle_zero = np.all(h[:, 1:m - 1] == 0, axis=1)
        ok = np.zeros(len(arr), dtype=bool)
        # zero head and branch (c): only slot n-k+1 may be nonzero
        ok |= (h0 == 0) & middle_zero
        nzr = h0 != 0
        inv0 = F.pow(np.where(nzr, h0, 1), -1)
        v = F.mul(h, inv0[:, None])
        # branches (b) and (d): (1, 0, .., 0, c) with c = 0 or N(sign' c) in T
        c = F.mul(minus_one_power(F, m), v[:, m - 1])
        ok |= nzr & middle_zero & ((v[:, m - 1] == 0) | self._norm_in_T(c))
        # branch (a): v_i = t^(e_i) with t = v_1 and N(t) not in T
        t = v[:, 1]
        good = nzr & (t != 0) & ~self._norm_in_T(t)
        for i in range(2, m):
            good &= v[:, i] == F.pow(t, self.exps[i])
        ok |= good
        return ok


def encode_rows(arr: np.ndarray, Q: int) -> np.ndarray:
    """Injective int64 key per row (base-Q digits); only used when Q^n < 2^63."""
    arr = np.asarray(arr, dtype=np.int64)
    key = np.zeros(arr.shape[:-1], dtype=np.int64)
    for j in range(arr.shape[-1]):
        key = key * Q + arr[..., j]
    return key


class ExplicitCode(RankCode):
    """A finite set of polynomials given by their coefficient rows."""

    family = Family.EXPLICIT

    def __init__(self, field, words, claimed_distance=None, label="explicit"):
        super().__init__(field, {"label": label}, claimed_distance, None)
        words = np.unique(np.asarray(words, dtype=np.int64).reshape(-1, field.n), axis=0)
        if words.size and (words.min() < 0 or words.max() >= field.order):
            raise ParameterError("coefficient index out of range")
        words.setflags(write=False)
        self._words = words
        self._keys = encode_rows(words, field.order)

    def _enumerate(self):
        return self._words

    def _members(self, arr):
        return np.isin(encode_rows(arr, self.field.order), self._keys)


def gabidulin(field, k):
    return GabidulinCode(field, k)


def twisted_gabidulin(field, k, eta, h=0):
    return TwistedGabidulinCode(field, k, eta, h)


def trombetti_zhou(field, k, xi):
    return TrombettiZhouCode(field, k, xi)


def oo_additive(field, k, q0, eta, h=0):
    return OOAdditiveCode(field, k, q0, eta, h)


def oo_nonlinear(field, k, I):
    return OONonlinearCode(field, k, I)


def c_sigma_t(field, k, T):
    return CSigmaTCode(field, k, T)


def membership(code: RankCode, alpha) -> bool:
    return code.contains(alpha)


# -- spec strings and files ----------------------------------------------------

_SPEC_KEYS = {
    "gab": ({"k"}, set()),
    "tw": ({"k", "eta"}, {"h"}),
    "tz": ({"k", "xi"}, set()),
    "ooadd": ({"k", "q0", "eta"}, {"h"}),
    "oonl": ({"k", "I"}, set()),
    "cst": ({"k", "T"}, set()),
}
_SET_KEYS = {"I", "T"}


def _parse_params(body: str) -> dict[str, list[str]]:
    params: dict[str, list[str]] = {}
    last = None
    for tok in body.split(","):
        tok = tok.strip()
        if "=" in tok:
            key, _, val = tok.partition("=")
            key = key.strip()
            if key in params:
                raise ParameterError(f"duplicate key {key!r}")
            params[key] = [val.strip()] if val.strip() else []
            last = key
        elif tok:
            if last is None:
                raise ParameterError(f"value {tok!r} without a key")
            params[last].append(tok)
    return params


def parse_code_spec(field: FiniteField, text: str) -> RankCode:
    """Build a code from a string such as ``"cst:k=2,T=1,2"``.

    Set-valued keys (I, T) take subfield labels; eta and xi take field
    element indices.
    """
    tag, sep, body = text.strip().partition(":")
    if not sep or tag not in _SPEC_KEYS:
        raise ParameterError(f"unknown code spec {text!r}")
    required, optional = _SPEC_KEYS[tag]
    raw = _parse_params(body)
    unknown = set(raw) - required - optional
    missing = required - set(raw)
    if unknown or missing:
        raise ParameterError(f"code spec {text!r}: unknown {sorted(unknown)}, missing {sorted(missing)}")

    def num(key, default=None):
        if key not in raw:
            return default
        vals = raw[key]
        if len(vals) != 1:
            raise ParameterError(f"{key} expects a single integer")
        try:
            return int(vals[0])
        except ValueError as exc:
            raise ParameterError(f"{key}={vals[0]!r} is not an integer") from exc

    def labels(key):
        try:
            return [field.from_label(int(v)) for v in raw[key]]
        except ValueError as exc:
            raise ParameterError(f"{key} expects integer labels") from exc

    if tag == "gab":
        return gabidulin(field, num("k"))
    if tag == "tw":
        return twisted_gabidulin(field, num("k"), num("eta"), num("h", 0))
    if tag == "tz":
        return trombetti_zhou(field, num("k"), num("xi"))
    if tag == "ooadd":
        return oo_additive(field, num("k"), num("q0"), num("eta"), num("h", 0))
    if tag == "oonl":
        return oo_nonlinear(field, num("k"), labels("I"))
    return c_sigma_t(field, num("k"), labels("T"))


def write_codewords(words: np.ndarray, fh) -> int:
    for row in words:
        fh.write(",".join(str(int(v)) for v in row) + "\n")
    return len(words)


def read_codewords(field: FiniteField, fh, claimed_distance=None, label="file") -> ExplicitCode:
    rows = []
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(LinearizedPoly.parse(field, line).coeffs)
    if not rows:
        raise ParameterError("code file contains no codewords")
    return ExplicitCode(field, rows, claimed_distance, label)
