from __future__ import annotations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from rankcodes import LinearizedPoly, build_field, c_sigma_t, gabidulin
from rankcodes.analysis import apply_equivalence, compose_equivalences, min_distance, random_equivalence
from rankcodes.geometry import ProjPoint, point_type, sigma_hat

SPECS = [(2, 1, 3, 1), (3, 1, 3, 1), (3, 1, 3, 2), (2, 1, 4, 3), (2, 2, 3, 1)]

spec_st = st.sampled_from(SPECS)


@st.composite
def field_and_poly(draw, count=1):
    F = build_field(*draw(spec_st))
    polys = [LinearizedPoly(F, draw(st.lists(st.integers(0, F.order - 1), min_size=F.n, max_size=F.n)))
             for _ in range(count)]
    return (F, *polys)


@st.composite
def field_and_elems(draw, count=3):
    F = build_field(*draw(spec_st))
    return (F, *[draw(st.integers(0, F.order - 1)) for _ in range(count)])


@settings(max_examples=200, deadline=None)
@given(field_and_elems())
def test_field_axioms(args):
    F, x, y, z = args
    assert F.add(x, y) == F.add(y, x) and F.mul(x, y) == F.mul(y, x)
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    assert F.mul(F.mul(x, y), z) == F.mul(x, F.mul(y, z))
    assert F.sub(F.add(x, y), y) == x
    assert F.sigma(F.mul(x, y), 1) == F.mul(F.sigma(x, 1), F.sigma(y, 1))
    assert F.sigma(F.add(x, y), 1) == F.add(F.sigma(x, 1), F.sigma(y, 1))
    assert F.in_subfield(F.norm(x)) and F.in_subfield(F.trace(x))


@settings(max_examples=200, deadline=None)
@given(field_and_poly(3))
def test_composition_is_associative_and_distributive(args):
    F, a, b, c = args
    assert (a @ b) @ c == a @ (b @ c)
    assert a @ (b + c) == (a @ b) + (a @ c)


@settings(max_examples=500, deadline=None)
@given(field_and_poly(2))
def test_adjoint_properties(args):
    F, a, b = args
    assert a.adjoint().adjoint() == a
    assert (a @ b).adjoint() == b.adjoint() @ a.adjoint()
    assert a.adjoint().rank() == a.rank()
    assert a.rank() == a.matrix_rep().rank()


@settings(max_examples=200, deadline=None)
@given(field_and_poly(1), st.integers(1, 10**6))
def test_scaling_and_rho_preserve_rank(args, lam_seed):
    F, a = args
    lam = 1 + lam_seed % (F.order - 1)
    assert a.scale(lam).rank() == a.rank()
    assert a.rho(lam_seed % F.degree).rank() == a.rank()


@settings(max_examples=100, deadline=None)
@given(field_and_poly(1))
def test_sigma_hat_cycle_and_type(args):
    F, a = args
    if a.is_zero():
        return
    P = ProjPoint(F, a.array)
    Q = P
    for _ in range(F.n):
        Q = sigma_hat(F, Q)
    assert Q == P
    assert point_type(F, P) == a.rank()
    assert point_type(F, sigma_hat(F, P)) == a.rank()


_CODES = {}


def _code(which):
    if which not in _CODES:
        if which == "gab23":
            _CODES[which] = gabidulin(build_field(2, 1, 3, 1), 2)
        else:
            _CODES[which] = c_sigma_t(build_field(3, 1, 3, 1), 2, [1])
    return _CODES[which]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["gab23", "cst33"]), st.integers(0, 2**32 - 1))
def test_equivalence_preserves_distribution(which, seed):
    C = _code(which)
    E = random_equivalence(C.field, np.random.default_rng(seed))
    assert min_distance(apply_equivalence(C, E)).distribution == min_distance(C).distribution


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_star_product_is_an_action(seed):
    C = _code("gab23")
    rng = np.random.default_rng(seed)
    E1, E2 = random_equivalence(C.field, rng), random_equivalence(C.field, rng)
    lhs = apply_equivalence(apply_equivalence(C, E1), E2).enumerate()
    rhs = apply_equivalence(C, compose_equivalences(E1, E2)).enumerate()
    assert np.array_equal(lhs, rhs)
