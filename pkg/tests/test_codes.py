from __future__ import annotations

import io

import numpy as np
import pytest

from rankcodes import (
    GuardError,
    LinearizedPoly,
    ParameterError,
    build_field,
    c_sigma_t,
    gabidulin,
    membership,
    oo_additive,
    oo_nonlinear,
    parse_code_spec,
    read_codewords,
    trombetti_zhou,
    twisted_gabidulin,
    write_codewords,
)
from rankcodes.analysis import closure_flags, is_mrd, min_distance
from rankcodes.codes import CSigmaTCode, Family, product_grid


def all_polys(F):
    return product_grid(np.arange(F.order), F.n)


def _members_agree(code):
    F = code.field
    allp = all_polys(F)
    mem = code.members(allp)
    words = code.enumerate()
    listed = np.zeros(len(allp), dtype=bool)
    idx = np.zeros(len(words), dtype=np.int64)
    for j in range(F.n):
        idx = idx * F.order + words[:, j]
    listed[idx] = True
    return np.array_equal(mem, listed)


def test_gabidulin_basic(F8):
    G = gabidulin(F8, 2)
    assert len(G.enumerate()) == 64
    assert G.claimed_distance == 2
    assert not membership(G, LinearizedPoly.monomial(F8, 2))
    full = gabidulin(F8, 3)
    assert len(full) == 512 and full.claimed_distance == 1
    assert min_distance(G).min_distance == 2


def test_enumerate_is_sorted_unique_readonly(F27):
    words = c_sigma_t(F27, 2, [1]).enumerate()
    assert len(np.unique(words, axis=0)) == len(words)
    assert not words.flags.writeable


@pytest.mark.parametrize("build", [
    lambda F: gabidulin(F, 2),
    lambda F: twisted_gabidulin(F, 2, 5),
    lambda F: oo_nonlinear(F, 2, [1]),
    lambda F: oo_nonlinear(F, 1, [1, 2]),
    lambda F: c_sigma_t(F, 2, [1]),
    lambda F: c_sigma_t(F, 2, [1, 2]),
])
@pytest.mark.parametrize("s", [1, 2])
def test_membership_matches_enumeration_f27(build, s):
    F = build_field(3, 1, 3, s)
    code = build(F)
    assert len(code) == F.order ** code.k
    assert _members_agree(code)


def test_membership_matches_enumeration_f16():
    for s in (1, 3):
        F = build_field(2, 1, 4, s)
        assert _members_agree(c_sigma_t(F, 3, [1]))
        assert _members_agree(c_sigma_t(F, 2, [1]))


def test_twisted_norm_condition(F27):
    n, k = 3, 2  # (-1)^(nk) = 1
    bad = [e for e in range(1, 27) if F27.norm(e) == 1]
    with pytest.raises(ParameterError):
        twisted_gabidulin(F27, k, bad[0])
    good = next(e for e in range(1, 27) if F27.norm(e) != 1)
    H = twisted_gabidulin(F27, k, good)
    assert H.family == Family.TWISTED
    assert min_distance(H).min_distance == n - k + 1
    zero = twisted_gabidulin(F27, 2, 0)
    assert np.array_equal(zero.enumerate(), gabidulin(F27, 2).enumerate())


def test_trombetti_zhou_q3_n4():
    F = build_field(3, 1, 4, 1)
    # 2 is the unique non-square in F_3^*
    sq = {F.mul(x, x) for x in F.subfield_elements()[1:]}
    assert 2 not in sq
    xi = next(x for x in range(1, F.order) if F.norm(x) == 2)
    D = trombetti_zhou(F, 1, xi)
    assert len(D) == 81
    res = min_distance(D)
    assert res.min_distance == 4 and is_mrd(D, res)
    with pytest.raises(ParameterError):
        trombetti_zhou(F, 1, next(x for x in range(1, F.order) if F.norm(x) == 1))


def test_oo_additive_reduces_to_twisted():
    F = build_field(3, 1, 3, 1)
    eta = next(e for e in range(1, 27) if F.norm(e) != 1)
    A = oo_additive(F, 2, 3, eta, 0)
    H = twisted_gabidulin(F, 2, eta, 0)
    assert np.array_equal(A.enumerate(), H.enumerate())


def test_oo_additive_q4_only_zero_twist():
    F = build_field(2, 2, 3, 1)
    accepted = []
    for eta in range(F.order):
        try:
            oo_additive(F, 1, 2, eta, 1)
            accepted.append(eta)
        except ParameterError:
            pass
    assert accepted == [0]
    A = oo_additive(F, 1, 2, 0, 1)
    assert len(A) == 64


def test_oo_additive_q9_is_additive_not_fq_linear():
    F = build_field(3, 2, 3, 1)
    eta = next(e for e in range(1, F.order) if _accepts(F, e))
    A = oo_additive(F, 1, 3, eta, 1)
    assert len(A) == 729
    flags = closure_flags(A, "one")
    assert flags["additive"] and not flags["fq_closed"]
    w = flags["fq_witness"]
    word = LinearizedPoly.parse(F, w["word"])
    assert A.contains(word) and not A.contains(word.scale(w["scalar"]))


def _accepts(F, eta):
    try:
        oo_additive(F, 1, 3, eta, 1)
        return True
    except ParameterError:
        return False


def test_oo_nonlinear(F27):
    C = oo_nonlinear(F27, 2, [1])
    assert len(C) == 729
    X = LinearizedPoly.identity(F27)
    assert C.contains(X)
    assert not oo_nonlinear(F27, 2, [2]).contains(X)


def test_c_sigma_t_properties(F27):
    C = c_sigma_t(F27, 2, [1])
    assert C.contains(LinearizedPoly.zero(F27))
    assert len(C.heads()) == 27**2
    assert C.family == Family.C_SIGMA_T
    with pytest.raises(ParameterError):
        c_sigma_t(F27, 2, [2])
    with pytest.raises(ParameterError):
        c_sigma_t(F27, 3, [1])
    with pytest.raises(ParameterError):
        c_sigma_t(F27, 2, [0, 1])


def test_random_membership_oracle(F27, rng):
    C = c_sigma_t(F27, 2, [1])
    words = C.enumerate()
    picks = words[rng.integers(0, len(words), size=1000)]
    assert C.members(picks).all()
    keys = set(map(tuple, words.tolist()))
    others = rng.integers(0, 27, size=(3000, 3))
    others = np.array([o for o in others if tuple(o) not in keys][:1000])
    assert len(others) == 1000 and not C.members(others).any()


def test_q2_c_sigma_t_needs_t_one(F8):
    C = c_sigma_t(F8, 2, [1])
    assert len(C) == 64 and min_distance(C).min_distance == 2


def test_parse_code_spec(F27):
    assert parse_code_spec(F27, "gab:k=2").k == 2
    cst = parse_code_spec(F27, "cst:k=2,T=1,2")
    assert isinstance(cst, CSigmaTCode)
    assert cst.T == sorted(F27.from_label(x) for x in (1, 2))
    assert parse_code_spec(F27, "oonl:k=2,I=1").I == [F27.from_label(1)]
    for bad in ["cst:k=2,T=", "cst:k=2", "foo:k=1", "gab:k=x", "gab:k=2,z=1", "gab"]:
        with pytest.raises(ParameterError):
            parse_code_spec(F27, bad)


def test_guard(F27):
    with pytest.raises(GuardError):
        gabidulin(F27, 2).enumerate(guard=100)


def test_codeword_file_roundtrip(F27):
    C = c_sigma_t(F27, 2, [1])
    buf = io.StringIO()
    assert write_codewords(C.enumerate(), buf) == 729
    buf.seek(0)
    E = read_codewords(F27, io.StringIO("# comment\n" + buf.getvalue()), 2)
    assert np.array_equal(E.enumerate(), C.enumerate())
    assert E.claimed_distance == 2
