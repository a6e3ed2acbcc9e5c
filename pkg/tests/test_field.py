from __future__ import annotations

import numpy as np
import pytest

from conftest import poly_mod_mul
from rankcodes import (
    CapacityError,
    FieldMismatchError,
    ParameterError,
    build_field,
    parse_field_spec,
)
from rankcodes.field import is_irreducible, smallest_irreducible


def test_f8_modulus_is_x3_x_1(F8):
    assert F8.modulus == (1, 1, 0, 1)
    assert F8.order == 8 and F8.q == 2


def test_f27_order_and_group(F27):
    assert F27.order == 27
    assert len([x for x in range(1, 27) if F27.pow(x, 26) == 1]) == 26


def test_same_modulus_different_s():
    a, b = build_field(2, 1, 3, 1), build_field(2, 1, 3, 2)
    assert a.modulus == b.modulus
    g = a.generator
    assert b.sigma(g, 1) == b.pow(g, 4)


def test_modulus_is_first_irreducible_in_scan():
    # brute-force: cubics over F_2 and F_3 with a root are reducible
    for p in (2, 3):
        mod = smallest_irreducible(p, 3)
        for c0 in range(1, p):
            for c1 in range(p):
                for c2 in range(p):
                    f = (c0, c1, c2)
                    has_root = any((c0 + c1 * x + c2 * x * x + x**3) % p == 0 for x in range(p))
                    assert is_irreducible(f + (1,), p) == (not has_root)
        assert is_irreducible(mod, p)


def test_f4_omega_squared():
    F4 = build_field(2, 1, 2, 1)
    assert F4.modulus == (1, 1, 1)
    w = 2  # the class of x
    assert F4.mul(w, w) == F4.add(w, 1)


@pytest.mark.parametrize("spec", [(2, 1, 3, 1), (3, 1, 3, 1), (2, 2, 3, 1), (5, 1, 2, 1)])
def test_mul_matches_reference(spec):
    F = build_field(*spec)
    xs = np.arange(F.order)
    table = F.mul(xs[:, None], xs[None, :])
    for x in range(F.order):
        for y in range(F.order):
            assert table[x, y] == poly_mod_mul(x, y, F.modulus, F.p)


def test_inverse_and_lagrange(F8):
    for x in range(1, 8):
        assert F8.mul(x, F8.inv(x)) == 1
    assert F8.pow(F8.generator, F8.order - 1) == 1
    with pytest.raises(ZeroDivisionError):
        F8.inv(0)


def test_sigma_basics(F8, F27s2, rng):
    assert F8.sigma(F8.generator, 1) == F8.pow(F8.generator, 2)
    xs = rng.integers(0, 27, size=100)
    assert np.array_equal(F27s2.sigma(xs, 0), xs)
    assert np.array_equal(F27s2.sigma(F27s2.sigma(xs, 1), F27s2.n - 1), xs)
    assert np.array_equal(F27s2.sigma(xs, 1), F27s2.pow(xs, 9))


def test_norm_values(F8, F27):
    assert F8.norm(1) == 1
    assert all(F8.norm(y) == 1 for y in range(1, 8))
    counts = {}
    for y in range(1, 27):
        counts[int(F27.norm(y))] = counts.get(int(F27.norm(y)), 0) + 1
    assert counts == {1: 13, 2: 13}


def test_norm_fibers():
    F27 = build_field(3, 1, 3, 1)
    n1, n2 = F27.norm_fiber(1), F27.norm_fiber(2)
    assert len(n1) == len(n2) == 13 and not set(n1) & set(n2)
    F8 = build_field(2, 1, 3, 1)
    assert sorted(F8.norm_fiber(1)) == list(range(1, 8))
    F125 = build_field(5, 1, 3, 1)
    assert sum(len(F125.norm_fiber(a)) for a in F125.subfield_elements()[1:]) == 124


def test_subfield_elements(F8, F27):
    assert F8.subfield_elements() == [0, 1]
    sub = F27.subfield_elements()
    assert len(sub) == 3 and all(F27.pow(x, 3) == x for x in sub)
    F64 = build_field(2, 2, 3, 1)
    sub2 = F64.subfield_elements()
    assert len(sub2) == 4 and all(F64.pow(x, 4) == x for x in sub2)


def test_subfield_labels_follow_generator_powers():
    F = build_field(5, 1, 3, 1)
    sub = F.subfield_elements()
    w = F.pow(F.generator, (F.order - 1) // (F.q - 1))
    assert sub == [0] + [F.pow(w, j) for j in range(F.q - 1)]
    for label, x in enumerate(sub):
        assert F.subfield_label(x) == label and F.from_label(label) == x


def test_coordinates_roundtrip(F27s2, rng):
    xs = rng.integers(0, 27, size=50)
    coords = F27s2.coordinates(xs)
    assert coords.shape == (50, 3)
    assert np.array_equal(F27s2.from_coordinates(coords), xs)


def test_validation():
    with pytest.raises(ParameterError):
        build_field(4, 1, 3, 1)
    with pytest.raises(ParameterError):
        build_field(2, 1, 4, 2)
    with pytest.raises(CapacityError):
        build_field(2, 1, 33, 1)
    with pytest.raises(ParameterError):
        parse_field_spec("3:3:1")
    assert parse_field_spec("3^1:3:2").key == (3, 1, 3, 2)


def test_field_element_mismatch(F8, F27):
    a, b = F8.element(3), F27.element(3)
    with pytest.raises(FieldMismatchError):
        a + b
    x = F27.element(5)
    assert int(x * x.inverse()) == 1
    assert int(x.sigma(3)) == 5
