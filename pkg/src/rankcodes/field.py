"""Exact arithmetic for the tower F_p <= F_q <= F_{q^n}.

A field context is built once per ``(p, a, n, s)`` and is immutable.  Elements
are plain integers in ``[0, p**(a*n))``: the base-p packing of the coordinate
vector with respect to the power basis of a root of the modulus (constant term
in the lowest digit).  ``0`` is zero and ``1`` is one.  Every arithmetic method
accepts either Python ints or numpy integer arrays, so hot loops can stay
vectorised.  :class:`FieldElement` wraps an index together with its field for
interactive use.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache

import numpy as np

from .errors import CapacityError, FieldMismatchError, ParameterError

MAX_ORDER = 2**32
TABLE_LIMIT = 2**20
ADD_TABLE_LIMIT = 2**11


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    r = 3
    while r * r <= p:
        if p % r == 0:
            return False
        r += 2
    return True


def prime_factors(m: int) -> list[int]:
    """Distinct prime divisors of ``m`` by trial division."""
    out = []
    r = 2
    while r * r <= m:
        if m % r == 0:
            out.append(r)
            while m % r == 0:
                m //= r
        r += 1
    if m > 1:
        out.append(m)
    return out


# -- polynomials over F_p, coefficient lists low -> high ---------------------


def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _polymod(f, g, p):
    f = list(f)
    inv_lead = pow(g[-1], -1, p)
    dg = len(g) - 1
    while len(_trim(f)) - 1 >= dg:
        c = f[-1] * inv_lead % p
        shift = len(f) - 1 - dg
        for i, gi in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gi) % p
    return f


def _polymulmod(f, g, m, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] = (out[i + j] + fi * gj) % p
    return _polymod(out, m, p)


def _polypowmod(f, e, m, p):
    result = [1]
    base = _polymod(f, m, p)
    while e:
        if e & 1:
            result = _polymulmod(result, base, m, p)
        base = _polymulmod(base, base, m, p)
        e >>= 1
    return result


def _polygcd(f, g, p):
    f, g = _trim(list(f)), _trim(list(g))
    while g:
        f, g = g, _trim(_polymod(f, g, p))
    return f


def is_irreducible(f, p: int) -> bool:
    """Rabin's test for a monic polynomial ``f`` (coefficients low -> high)."""
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    h = x
    powers = {}
    for j in range(1, d + 1):
        h = _polypowmod(h, p, f, p)
        powers[j] = h
    diff = _trim([(a - b) % p for a, b in zip(powers[d] + [0] * 2, x + [0] * len(powers[d]))])
    if diff:
        return False
    for r in prime_factors(d):
        hr = powers[d // r]
        g = _trim([(a - b) % p for a, b in zip(hr + [0] * 2, x + [0] * len(hr))])
        if len(_polygcd(f, g, p)) != 1:
            return False
    return True


def smallest_irreducible(p: int, d: int) -> tuple[int, ...]:
    """Monic irreducible of degree ``d`` with the smallest base-p encoding."""
    for tail in range(p**d):
        coeffs = [(tail // p**i) % p for i in range(d)] + [1]
        if d > 1 and coeffs[0] == 0:
            continue
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # unreachable


def _inverse_mod_p(mat: np.ndarray, p: int) -> np.ndarray:
    m = mat.shape[0]
    aug = np.concatenate([mat % p, np.eye(m, dtype=np.int64)], axis=1)
    for c in range(m):
        piv = next(r for r in range(c, m) if aug[r, c] % p)
        aug[[c, piv]] = aug[[piv, c]]
        aug[c] = aug[c] * pow(int(aug[c, c]), -1, p) % p
        for r in range(m):
            if r != c and aug[r, c]:
                aug[r] = (aug[r] - aug[r, c] * aug[c]) % p
    return aug[:, m:]


class FiniteField:
    """The field F_{q^n}, q = p^a, with the Frobenius ``sigma: x -> x^(q^s)``."""

    def __init__(self, p: int, a: int, n: int, s: int = 1):
        if not is_prime(p):
            raise ParameterError(f"{p} is not prime")
        if a < 1 or n < 1 or s < 1:
            raise ParameterError("a, n and s must be positive")
        if math.gcd(s, n) != 1:
            raise ParameterError(f"gcd(s, n) = gcd({s}, {n}) != 1")
        if p ** (a * n) > MAX_ORDER:
            raise CapacityError(f"{p}^{a * n} exceeds the element capacity 2^32")
        self.p, self.a, self.n, self.s = p, a, n, s
        self.q = p**a
        self.degree = a * n
        self.order = p**self.degree
        self.modulus = smallest_irreducible(p, self.degree)
        self._pw = [p**i for i in range(self.degree)]
        self._factors = prime_factors(self.order - 1)
        self._exp = self._log = self._add_tab = self._neg_tab = None
        self.generator = self._find_generator()
        if self.order <= TABLE_LIMIT:
            self._build_tables()
        self.basis = [self.pow(self.generator, j) for j in range(n)]
        self._init_subfield()

    # -- construction helpers -------------------------------------------------

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.p, self.a, self.n, self.s)

    @property
    def spec(self) -> str:
        return f"{self.p}^{self.a}:{self.n}:{self.s}"

    def __repr__(self):
        return f"FiniteField({self.spec}, modulus={self.modulus})"

    def _digits(self, x: int) -> list[int]:
        return [(x // w) % self.p for w in self._pw]

    def _pack(self, digits) -> int:
        return sum(int(c) * w for c, w in zip(digits, self._pw))

    def _poly_mul(self, x: int, y: int) -> int:
        f = _trim(self._digits(x))
        g = _trim(self._digits(y))
        return self._pack(_polymulmod(f, g, list(self.modulus), self.p))

    def _poly_pow(self, x: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._poly_mul(r, x)
            x = self._poly_mul(x, x)
            e >>= 1
        return r

    def _is_primitive(self, x: int) -> bool:
        if x == 0:
            return False
        m = self.order - 1
        return self._poly_pow(x, m) == 1 and all(self._poly_pow(x, m // r) != 1 for r in self._factors)

    def _find_generator(self) -> int:
        return next(x for x in range(1, self.order) if self._is_primitive(x))

    def _const_mul_matrix(self, c: int) -> np.ndarray:
        cols = [self._digits(self._poly_mul(c, w)) for w in self._pw]
        return np.array(cols, dtype=np.int64).T

    def _build_tables(self):
        Q = self.order
        pw = np.array(self._pw, dtype=np.int64)
        exp = np.zeros(2 * (Q - 1), dtype=np.int64)
        exp[0] = 1
        filled = 1
        while filled < Q - 1:
            take = min(filled, Q - 1 - filled)
            mat = self._const_mul_matrix(self._poly_pow(self.generator, filled))
            block = exp[:take]
            digits = (block[:, None] // pw[None, :]) % self.p
            exp[filled:filled + take] = ((digits @ mat.T) % self.p) @ pw
            filled += take
        exp[Q - 1:] = exp[:Q - 1]
        log = np.full(Q, -1, dtype=np.int64)
        log[exp[:Q - 1]] = np.arange(Q - 1)
        self._exp, self._log = exp, log
        idx = np.arange(Q, dtype=np.int64)
        if self.p == 2:
            self._neg_tab = idx
        else:
            self._neg_tab = self._add_digits(np.zeros(Q, dtype=np.int64), idx, -1)
            if Q <= ADD_TABLE_LIMIT:
                self._add_tab = self._add_digits(idx[:, None], idx[None, :], 1)

    def _init_subfield(self):
        q, Q = self.q, self.order
        step = (Q - 1) // (q - 1) if q > 1 else 1
        omega = self.pow(self.generator, step)
        self.subfield_generator = omega
        self._subfield = [0] + [self.pow(omega, j) for j in range(q - 1)]
        self._subfield_label = {x: i for i, x in enumerate(self._subfield)}
        # F_p-basis {omega^i g^j} of F_Q, used for F_q-coordinates in the basis g^j
        cols, self._omega_pows = [], [self.pow(omega, i) for i in range(self.a)]
        for j in range(self.n):
            for i in range(self.a):
                cols.append(self._digits(self.mul(self._omega_pows[i], self.basis[j])))
        bm = np.array(cols, dtype=np.int64).T
        self._coord_inv = _inverse_mod_p(bm, self.p)
        fq = []
        for lab in range(q):
            e = [(lab // self.p**i) % self.p for i in range(self.a)]
            v = 0
            for ei, w in zip(e, self._omega_pows):
                v = self.add(v, self.mul(ei, w))
            fq.append(v)
        self._fq_from_pdigits = np.array(fq, dtype=np.int64)

    # -- elementwise arithmetic ----------------------------------------------

    @staticmethod
    def _is_array(*xs) -> bool:
        return any(isinstance(x, np.ndarray) for x in xs)

    def _add_digits(self, x, y, sign):
        p = self.p
        res = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        for w in self._pw:
            res += (((x // w) % p + sign * ((y // w) % p)) % p) * w
        return res

    def add(self, x, y):
        if self.p == 2:
            return x ^ y
        if self._is_array(x, y):
            x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
            if self._add_tab is not None:
                return self._add_tab[x, y]
            return self._add_digits(x, y, 1)
        if self._add_tab is not None:
            return int(self._add_tab[x, y])
        return self._pack(a + b for a, b in zip(self._digits(x), self._digits(y)))

    def neg(self, x):
        if self.p == 2:
            return x
        if self._neg_tab is not None:
            return self._neg_tab[x] if self._is_array(x) else int(self._neg_tab[x])
        if self._is_array(x):
            return self._add_digits(np.zeros_like(x), x, -1)
        return self._pack(-c for c in self._digits(x))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if self._exp is None:
            if self._is_array(x, y):
                return np.frompyfunc(self._poly_mul, 2, 1)(x, y).astype(np.int64)
            return self._poly_mul(int(x), int(y))
        if self._is_array(x, y):
            x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
            r = self._exp[np.maximum(self._log[x], 0) + np.maximum(self._log[y], 0)]
            return np.where((x == 0) | (y == 0), 0, r)
        if x == 0 or y == 0:
            return 0
        return int(self._exp[self._log[x] + self._log[y]])

    def pow(self, x, e: int):
        m = self.order - 1
        if self._is_array(x):
            x = np.asarray(x, dtype=np.int64)
            if e < 0 and np.any(x == 0):
                raise ZeroDivisionError("inverse of zero")
            if self._exp is None:
                return np.frompyfunc(lambda v: self.pow(int(v), e), 1, 1)(x).astype(np.int64)
            r = self._exp[(np.maximum(self._log[x], 0) * (e % m)) % m]
            return np.where(x == 0, 0 if e else 1, r)
        x = int(x)
        if x == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return 0 if e else 1
        if self._exp is None:
            return self._poly_pow(x, e % m)
        return int(self._exp[(int(self._log[x]) * (e % m)) % m])

    def inv(self, x):
        if not self._is_array(x) and x == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self.pow(x, -1)

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def frobenius(self, x, j: int):
        """``x^(p^j)`` (absolute Frobenius power)."""
        j %= self.degree
        return self.pow(x, pow(self.p, j, self.order - 1) if self.order > 2 else 1)

    def sigma(self, x, i: int = 1):
        """``x^(q^(s*i))``; ``i`` is reduced modulo n."""
        return self.frobenius(x, self.a * ((self.s * i) % self.n))

    # -- subfields, norms, traces --------------------------------------------

    def _check_divisor(self, l: int):
        if l < 1 or self.n % l:
            raise ParameterError(f"{l} does not divide n = {self.n}")

    def norm(self, x, l: int = 1):
        """``N_{q^n/q^l}(x) = x^((q^n - 1)/(q^l - 1))``."""
        self._check_divisor(l)
        return self.pow(x, (self.order - 1) // (self.q**l - 1))

    def trace(self, x):
        """Absolute trace F_{q^n} -> F_q."""
        t = 0 if not self._is_array(x) else np.zeros_like(np.asarray(x, dtype=np.int64))
        for i in range(self.n):
            t = self.add(t, self.frobenius(x, self.a * i))
        return t

    def in_subfield(self, x, l: int = 1):
        self._check_divisor(l)
        r = self.frobenius(x, self.a * l) == x
        return r if self._is_array(x) else bool(r)

    def subfield_elements(self, l: int = 1) -> list[int]:
        """0 followed by g^(j (q^n-1)/(q^l-1)), j = 0 .. q^l - 2.

        The position in this list is the integer label used on the command
        line for subsets of F_q (l = 1).
        """
        self._check_divisor(l)
        if l == 1:
            return list(self._subfield)
        step = (self.order - 1) // (self.q**l - 1)
        return [0] + [self.pow(self.generator, j * step) for j in range(self.q**l - 1)]

    def subfield_label(self, x: int) -> int:
        return self._subfield_label[x]

    def from_label(self, label: int) -> int:
        if not 0 <= label < self.q:
            raise ParameterError(f"label {label} outside 0..{self.q - 1}")
        return self._subfield[label]

    def norm_fiber(self, a: int) -> list[int]:
        """All y with N_{q^n/q}(y) = a, for a in F_q^*."""
        if a == 0 or not self.in_subfield(a):
            raise ParameterError("norm fibers are defined for a in F_q^*")
        m = self.order - 1
        size = m // (self.q - 1)
        # N(g^i) = omega^i, so the fiber is a coset of <g^(q-1)>
        j0 = int(self._log_of(a))
        return sorted(self.pow(self.generator, j0 + (self.q - 1) * t) for t in range(size))

    def _log_of(self, x: int) -> int:
        """Discrete log of x in F_q^* with respect to omega = N(g)."""
        omega = self.subfield_generator
        v = 1
        for i in range(self.q - 1):
            if v == x:
                return i
            v = self.mul(v, omega)
        raise ParameterError(f"{x} is not in F_q^*")

    def is_square_in_subfield(self, x: int) -> bool:
        if x == 0:
            return True
        if self.q % 2 == 0:
            return True
        return self.pow(x, (self.q - 1) // 2) == 1

    # -- F_q-coordinates with respect to B = (1, g, ..., g^(n-1)) -------------

    def coordinates(self, x):
        """F_q-coordinates (as field indices) of x in the basis ``self.basis``.

        Works elementwise on arrays; the result gains a trailing axis of
        length n.
        """
        arr = np.asarray(x, dtype=np.int64)
        pw = np.array(self._pw, dtype=np.int64)
        digits = (arr[..., None] // pw) % self.p
        e = (digits @ self._coord_inv.T) % self.p  # index (j * a + i)
        e = e.reshape(arr.shape + (self.n, self.a))
        lab = (e * np.array([self.p**i for i in range(self.a)], dtype=np.int64)).sum(-1)
        return self._fq_from_pdigits[lab]

    def from_coordinates(self, coords):
        coords = np.asarray(coords, dtype=np.int64)
        out = np.zeros(coords.shape[:-1], dtype=np.int64)
        for j in range(self.n):
            out = self.add(out, self.mul(coords[..., j], self.basis[j]))
        return out

    # -- element wrappers -----------------------------------------------------

    def element(self, index: int) -> "FieldElement":
        return FieldElement(self, index)

    def elements(self) -> range:
        return range(self.order)

    def random_elements(self, rng: np.random.Generator, size, nonzero=False):
        lo = 1 if nonzero else 0
        return rng.integers(lo, self.order, size=size, dtype=np.int64)


class FieldElement:
    """An element of a :class:`FiniteField` with operator overloading."""

    __slots__ = ("field", "value")

    def __init__(self, field: FiniteField, value: int):
        value = int(value)
        if not 0 <= value < field.order:
            raise ParameterError(f"index {value} outside field of order {field.order}")
        self.field = field
        self.value = value

    def _other(self, other):
        if not isinstance(other, FieldElement):
            return None
        if other.field.key != self.field.key:
            raise FieldMismatchError(f"cannot mix elements of {self.field.spec} and {other.field.spec}")
        return other.value

    def _wrap(self, v):
        return FieldElement(self.field, v)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self._wrap(self.field.add(self.value, o))

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self._wrap(self.field.sub(self.value, o))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self._wrap(self.field.mul(self.value, o))

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self._wrap(self.field.div(self.value, o))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.value, e))

    def inverse(self):
        return self._wrap(self.field.inv(self.value))

    def sigma(self, i: int = 1):
        return self._wrap(self.field.sigma(self.value, i))

    def norm(self, l: int = 1):
        return self._wrap(self.field.norm(self.value, l))

    def trace(self):
        return self._wrap(self.field.trace(self.value))

    def in_subfield(self, l: int = 1) -> bool:
        return self.field.in_subfield(self.value, l)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.field._digits(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field.key == other.field.key and self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash((self.field.key, self.value))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FieldElement({self.field.spec}, {self.value})"


@lru_cache(maxsize=None)
def build_field(p: int, a: int, n: int, s: int = 1) -> FiniteField:
    """Return the (cached, deterministic) field context for ``p^a : n : s``."""
    return FiniteField(p, a, n, s)


_SPEC_RE = re.compile(r"^\s*(\d+)\^(\d+):(\d+):(\d+)\s*$")


def parse_field_spec(text: str) -> FiniteField:
    """Parse ``"p^a:n:s"``, e.g. ``"3^1:3:1"``."""
    m = _SPEC_RE.match(text)
    if not m:
        raise ParameterError(f"bad field spec {text!r}; expected p^a:n:s")
    return build_field(*(int(g) for g in m.groups()))
