import itertools

import pytest

from polyagent.errors import SizeGuardExceeded
from polyagent.hom import (count_lenses, curry, dual, enumerate_lenses, eval_lens,
                           internal_compose, internal_hom, uncurry, unit_hom_iso)
from polyagent.poly import (FinSet, Y, find_isomorphism, lens_compose, lens_identity,
                            monomial, parse_poly, tensor_poly)


def test_lens_counts(two_y, y2_plus_1):
    assert len(enumerate_lenses(two_y, two_y)) == 4
    # y -> y^2+1: forward to u with one of 2 backward choices; v is infeasible
    assert len(enumerate_lenses(Y, y2_plus_1)) == 2
    assert count_lenses(Y, y2_plus_1) == 2
    p = monomial(FinSet.range(2, "o"), FinSet.range(3, "a"))
    assert len(enumerate_lenses(p, Y)) == 3 ** 2


def test_count_matches_enumeration(rng):
    from polyagent.generators import random_polynomial
    for _ in range(50):
        p, q = random_polynomial(rng), random_polynomial(rng)
        assert count_lenses(p, q) == len(enumerate_lenses(p, q))


def test_enumeration_is_duplicate_free(y2_plus_1):
    ls = enumerate_lenses(y2_plus_1, y2_plus_1)
    assert len(set(ls)) == len(ls)


def test_guard():
    p = parse_poly("3y^3")
    with pytest.raises(SizeGuardExceeded) as info:
        enumerate_lenses(p, p, guard=10)
    assert info.value.cardinality == count_lenses(p, p)


def test_guard_env_override(monkeypatch):
    monkeypatch.setenv("POLYAGENT_GUARD", "3")
    with pytest.raises(SizeGuardExceeded):
        enumerate_lenses(parse_poly("2y"), parse_poly("2y"))


def test_internal_hom_shapes(two_y):
    h = internal_hom(two_y, two_y)
    assert len(h) == 4 and h.underlying.dir_counts() == (2, 2, 2, 2)
    p = monomial(FinSet.range(2, "o"), FinSet.range(3, "a"))
    assert internal_hom(p, Y).underlying.dir_counts() == (2,) * 9


def test_internal_hom_direction_layout(y2_plus_1, two_y):
    h = internal_hom(y2_plus_1, two_y)
    for k, lens in enumerate(h.position_lenses):
        assert len(h.underlying[k]) == sum(len(two_y[j]) for j in lens.fwd)
        assert h.position_of(lens) == k


def test_y_hom_iso(y2_plus_1, two_y):
    for p in (y2_plus_1, two_y, Y):
        h = internal_hom(Y, p)
        assert find_isomorphism(h.underlying, p) is not None
        iso = unit_hom_iso(p, h)
        assert iso.dom == p and iso.cod == h.underlying


def test_adjunction_example(two_y):
    pq = tensor_poly(two_y, two_y)
    h = internal_hom(two_y, two_y)
    left = enumerate_lenses(pq, two_y)
    right = enumerate_lenses(two_y, h.underlying)
    assert len(left) == len(right) == 16
    for phi in left:
        assert uncurry(curry(phi, two_y, two_y, h), h) == phi
    assert {curry(phi, two_y, two_y, h) for phi in left} == set(right)


def test_curry_singleton():
    yy = tensor_poly(Y, Y)
    (phi,) = enumerate_lenses(yy, Y)
    h = internal_hom(Y, Y)
    assert uncurry(curry(phi, Y, Y, h), h) == phi


def test_curry_of_projection_is_unit_iso(y2_plus_1):
    p = y2_plus_1
    proj = find_isomorphism(tensor_poly(p, Y), p)
    h = internal_hom(Y, p)
    assert curry(proj, p, Y, h) == unit_hom_iso(p, h)


def test_eval_triangle(two_y, y2_plus_1):
    for q, r in itertools.product([Y, two_y, y2_plus_1], repeat=2):
        h = internal_hom(q, r)
        assert curry(eval_lens(q, r, h), h.underlying, q, h) == lens_identity(h.underlying)


def test_eval_dual_reads_inputs():
    p = monomial(FinSet.range(2, "o"), FinSet.range(3, "a"))
    h = dual(p)
    ev = eval_lens(p, Y, h)
    for k, sigma in enumerate(h.position_lenses):
        for j in range(len(p)):
            row = ev.bwd[k * len(p) + j]
            # the single y-direction maps to (σ-direction at j, the q-input σ♯_j(•))
            a = row[0] // len(p[j])
            e = row[0] % len(p[j])
            assert h.direction_pairs(k)[a] == (j, 0)
            assert e == sigma.bwd[j][0]


def test_eval_with_y_and_unit_iso(two_y):
    r = two_y
    h = internal_hom(Y, r)
    ev = eval_lens(Y, r, h)
    iso = unit_hom_iso(r, h)
    back = find_isomorphism(r, tensor_poly(r, Y))
    from polyagent.poly import tensor_lens
    assert lens_compose(back, lens_compose(tensor_lens(iso, lens_identity(Y)), ev)) == lens_identity(r)


def test_internal_compose_matches_lens_compose(two_y):
    h = internal_hom(two_y, two_y)
    mu = internal_compose(two_y, two_y, two_y, (h, h, h))
    n = len(h)
    for a, b in itertools.product(range(n), repeat=2):
        got = h.position_lenses[mu.fwd[a * n + b]]
        assert got == lens_compose(h.position_lenses[a], h.position_lenses[b])


def test_internal_compose_y():
    mu = internal_compose(Y, Y, Y)
    assert mu.fwd == (0,) and mu.bwd == ((0,),)


def test_dual_shapes(y2_plus_1):
    p = monomial(FinSet.range(2, "o"), FinSet.range(3, "a"))
    d = dual(p)
    assert len(d) == 9 and d.underlying.dir_counts() == (2,) * 9
    assert find_isomorphism(dual(Y).underlying, Y) is not None
    assert len(dual(y2_plus_1)) == len(enumerate_lenses(y2_plus_1, Y)) == 0
    q = parse_poly("y^2 + y")
    assert len(dual(q)) == 2


def test_hom_polynomials_compare_by_value(two_y):
    assert internal_hom(two_y, two_y) == internal_hom(two_y, two_y)
