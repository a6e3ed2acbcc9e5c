from __future__ import annotations

import numpy as np
import pytest

from rankcodes import build_field


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def F8():
    return build_field(2, 1, 3, 1)


@pytest.fixture(scope="session")
def F27():
    return build_field(3, 1, 3, 1)


@pytest.fixture(scope="session")
def F27s2():
    return build_field(3, 1, 3, 2)


@pytest.fixture(scope="session")
def F16():
    return build_field(2, 1, 4, 1)


@pytest.fixture(scope="session")
def F16s3():
    return build_field(2, 1, 4, 3)


def poly_mod_mul(x, y, modulus, p):
    """Reference product of two base-p digit encodings modulo ``modulus`` (low to high)."""
    d = len(modulus) - 1
    xs = [(x // p**i) % p for i in range(d)]
    ys = [(y // p**i) % p for i in range(d)]
    prod = [0] * (2 * d - 1)
    for i, a in enumerate(xs):
        for j, b in enumerate(ys):
            prod[i + j] = (prod[i + j] + a * b) % p
    for top in range(len(prod) - 1, d - 1, -1):
        c = prod[top]
        if c:
            for i in range(d + 1):
                prod[top - d + i] = (prod[top - d + i] - c * modulus[i]) % p
    return sum(prod[i] * p**i for i in range(d))


def power_evaluate(F, coeffs, xs):
    """sum_i a_i x^(q^(s i)) computed with plain powering, independent of the Frobenius code."""
    xs = np.asarray(xs, dtype=np.int64)
    out = np.zeros(xs.shape, dtype=np.int64)
    for i, c in enumerate(coeffs):
        e = pow(F.q, F.s * i, F.order - 1) if i else 1
        out = F.add(out, F.mul(int(c), F.pow(xs, e)))
    return out


def image_rank(F, coeffs):
    """Rank of a sigma-polynomial from the size of its image (|image| = q^rank)."""
    size = len(set(power_evaluate(F, coeffs, np.arange(F.order)).tolist()))
    r = 0
    while F.q**r < size:
        r += 1
    assert F.q**r == size
    return r
