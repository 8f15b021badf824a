import itertools

import pytest

from polyagent.errors import InterfaceMismatch, InvalidCategory
from polyagent.hom import enumerate_lenses
from polyagent.poly import (EMPTY, FinCategory, FinSet, Lens, Polynomial, Y, category_to_poly,
                            discrete_category, find_isomorphism, is_unit, lens_compose,
                            lens_identity, lens_inverse, monomial, parse_poly, poly_apply,
                            poly_apply_map, swap_lens, tensor_lens, tensor_poly)


def test_finset_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        FinSet(("a", "b", "a"))


def test_finset_order_and_lookup():
    X = FinSet(("z", "a", "m"), "X")
    assert X.index("a") == 1
    assert list(X) == ["z", "a", "m"]
    assert "m" in X and "q" not in X
    assert X == FinSet(("z", "a", "m"))  # names do not matter


def test_finset_product_is_lexicographic():
    P = FinSet.product(FinSet(("a", "b")), FinSet(("0", "1")))
    assert P.elements == ("(a,0)", "(a,1)", "(b,0)", "(b,1)")


def test_monomial_examples():
    p = monomial(FinSet(("o1", "o2")), FinSet(("a1",)))
    assert len(p) == 2 and p.dir_counts() == (1, 1)
    assert str(p) == "2y"
    assert monomial(FinSet(("*",)), FinSet(("*",))) == Y
    assert is_unit(Y)
    empty = monomial(EMPTY, FinSet(("a",)))
    assert len(empty) == 0 and str(empty) == "0"


def test_is_monomial(y2_plus_1, two_y):
    assert two_y.is_monomial
    assert not y2_plus_1.is_monomial


def test_polynomial_needs_one_direction_set_per_position():
    with pytest.raises(ValueError):
        Polynomial(FinSet(("a", "b")), (FinSet(("x",)),))


def test_parse_poly():
    assert parse_poly("y^2 + 1").dir_counts() == (2, 0)
    assert parse_poly("2y^3").dir_counts() == (3, 3)
    assert parse_poly("y").dir_counts() == (1,)
    with pytest.raises(ValueError):
        parse_poly("2x")


def test_lens_validation(two_y):
    with pytest.raises(ValueError):
        Lens(two_y, Y, (0,), ((0,),))
    with pytest.raises(ValueError):
        Lens(two_y, Y, (0, 1), ((0,), (0,)))


def test_lens_from_and_to_labels(two_y, y2_plus_1):
    phi = Lens.from_labels(two_y, y2_plus_1, {"a": "u", "b": "u"},
                           {"a": {"l": "*", "r": "*"}, "b": {"l": "*", "r": "*"}})
    fwd, bwd = phi.to_labels()
    assert fwd == {"a": "u", "b": "u"}
    assert Lens.from_labels(two_y, y2_plus_1, fwd, bwd) == phi


def test_identity_laws(two_y):
    for phi in enumerate_lenses(two_y, two_y):
        assert lens_compose(lens_identity(two_y), phi) == phi
        assert lens_compose(phi, lens_identity(two_y)) == phi
    ident = lens_identity(two_y)
    assert lens_compose(ident, ident) == ident
    assert lens_identity(Y).fwd == (0,) and lens_identity(Y).bwd == ((0,),)


def test_identity_is_enumerated(two_y):
    assert lens_identity(two_y) in enumerate_lenses(two_y, two_y)


def test_swap_on_2y_is_an_involution(two_y):
    swap = Lens(two_y, two_y, (1, 0), ((0,), (0,)))
    assert lens_compose(swap, swap) == lens_identity(two_y)


def test_exhaustive_associativity_small():
    polys = [Y, parse_poly("2y"), parse_poly("y^2"), parse_poly("y + 1"), parse_poly("1")]
    for p, q, r, s in itertools.product(polys, repeat=4):
        for phi in enumerate_lenses(p, q):
            for psi in enumerate_lenses(q, r):
                for chi in enumerate_lenses(r, s)[:3]:
                    assert lens_compose(lens_compose(phi, psi), chi) == \
                        lens_compose(phi, lens_compose(psi, chi))


def test_compose_type_mismatch(two_y, y2_plus_1):
    with pytest.raises(InterfaceMismatch):
        lens_compose(lens_identity(two_y), lens_identity(y2_plus_1))


def test_tensor_examples(y2_plus_1, two_y):
    t = tensor_poly(y2_plus_1, two_y)
    assert t.dir_counts() == (2, 2, 0, 0)
    assert tensor_poly(two_y, two_y).dir_counts() == (1, 1, 1, 1)
    for p in (y2_plus_1, two_y):
        assert find_isomorphism(tensor_poly(p, Y), p) is not None
        assert find_isomorphism(tensor_poly(Y, p), p) is not None


def test_tensor_lens_unit(two_y, y2_plus_1):
    assert tensor_lens(lens_identity(two_y), lens_identity(y2_plus_1)) == \
        lens_identity(tensor_poly(two_y, y2_plus_1))


def test_tensor_functoriality_exhaustive(two_y):
    ls = enumerate_lenses(two_y, two_y)
    for a, a2, b, b2 in itertools.product(ls, repeat=4):
        assert tensor_lens(lens_compose(a, a2), lens_compose(b, b2)) == \
            lens_compose(tensor_lens(a, b), tensor_lens(a2, b2))


def test_swap_tensor_id_hand_expansion(two_y):
    swap = Lens(two_y, two_y, (1, 0), ((0,), (0,)))
    t = tensor_lens(swap, lens_identity(Y))
    # 2y ⊗ y has positions (a,*), (b,*); swapping the first coordinate exchanges them
    assert t.fwd == (1, 0)
    assert t.bwd == ((0,), (0,))


def test_swap_round_trip(two_y, y2_plus_1):
    s = lens_compose(swap_lens(two_y, y2_plus_1), swap_lens(y2_plus_1, two_y))
    assert s == lens_identity(tensor_poly(two_y, y2_plus_1))


def test_lens_inverse(two_y):
    swap = Lens(two_y, two_y, (1, 0), ((0,), (0,)))
    assert lens_compose(swap, lens_inverse(swap)) == lens_identity(two_y)
    with pytest.raises(ValueError):
        lens_inverse(Lens(two_y, two_y, (0, 0), ((0,), (0,))))


def test_poly_apply_calculator():
    K = ["k0", "k1", "k2"]
    p = Polynomial.from_dict({"+": ["l", "r"], "x": ["l", "r"], "-": ["a"], **{k: [] for k in K}})
    assert len(poly_apply(p, FinSet(("x",)))) == 6


def test_poly_apply_empty_and_unit(y2_plus_1):
    assert poly_apply(y2_plus_1, EMPTY).elements == ("v()",)
    X = FinSet(("p", "q", "r"))
    assert len(poly_apply(Y, X)) == len(X)


def test_poly_apply_map_functorial(y2_plus_1):
    X, Z, W = FinSet.range(2, "x"), FinSet.range(3, "z"), FinSet.range(2, "w")
    g, h = (2, 0), (1, 1, 0)
    gh = tuple(h[k] for k in g)
    pg = poly_apply_map(y2_plus_1, X, Z, g)
    ph = poly_apply_map(y2_plus_1, Z, W, h)
    assert tuple(ph[k] for k in pg) == poly_apply_map(y2_plus_1, X, W, gh)


def test_category_to_poly_walking_arrow(walking_arrow):
    p = category_to_poly(walking_arrow)
    assert p.positions.elements == ("X", "Y")
    assert p[0].elements == ("id_X", "f")
    assert p[1].elements == ("id_Y",)


def test_discrete_category_gives_ny():
    p = category_to_poly(discrete_category(FinSet.range(3, "o")))
    assert p.dir_counts() == (1, 1, 1)


def test_monoid_category():
    C = FinCategory(FinSet(("*",)), (("e", "*", "*"), ("m", "*", "*")), {"*": "e"},
                    {("m", "m"): "e"})
    assert category_to_poly(C).dir_counts() == (2,)


def test_invalid_category_rejected():
    C = FinCategory(FinSet(("*",)), (("e", "*", "*"), ("m", "*", "*")), {"*": "e"}, {})
    with pytest.raises(InvalidCategory, match="missing"):
        C.check_laws()
    bad = FinCategory(FinSet(("*",)), (("e", "*", "*"), ("m", "*", "*"), ("n", "*", "*")), {"*": "e"},
                      {("m", "m"): "n", ("m", "n"): "e", ("n", "m"): "m", ("n", "n"): "e"})
    with pytest.raises(InvalidCategory, match="associativity"):
        bad.check_laws()
