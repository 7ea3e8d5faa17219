import pytest
import sympy

from smtbench.errors import InvalidParameter, TheoremViolation
from smtbench.exactalg import Monomial, leading_monomial
from smtbench.degeneration import initial_piece, product_set, sagbi_degree_check, straight_lms
from smtbench.sections import class_polys, section_space, tableau_poly
from smtbench.tableaux import Shape, enumerate_straight
from smtbench.weyl import Word


def shape(n, word=None, mult=None):
    return Shape.of(n, word, mult)


def rref_pivot_keys(polys):
    """Leading monomials of the row space via sympy's reduced row echelon form."""
    keys = sorted({k for p in polys for k, _ in p.items()}, reverse=True)
    col = {k: a for a, k in enumerate(keys)}
    rows = []
    for p in polys:
        row = [0] * len(keys)
        for k, c in p.items():
            row[col[k]] = c
        rows.append(row)
    _, pivots = sympy.Matrix(rows).rref()
    return {keys[c] for c in pivots}


def test_straight_lms_small_shape():
    lms = straight_lms(shape(3))
    assert len(lms) == 13
    brute = {leading_monomial(tableau_poly(t))[0] for t in enumerate_straight(shape(3))}
    assert lms == brute


def test_single_block_lms_are_diagonal_products():
    s = shape(4, mult=(0, 0, 0, 1, 0, 0))
    K = (2, 3, 4)
    expect = {Monomial.from_exps(4, {(r, c): 1 for r, c in zip(R, K)}) for R in s.options(4)}
    assert straight_lms(s) == expect


def test_straight_lms_full_word_n4():
    assert len(straight_lms(shape(4))) == 394


def test_collision_is_reported(monkeypatch):
    import smtbench.degeneration as deg

    space = section_space(shape(3))

    class Fake:
        straight = [space.straight[0], space.straight[0]]

    monkeypatch.setattr(deg, "section_space", lambda s, reading="top": Fake)
    with pytest.raises(TheoremViolation):
        deg.straight_lms(shape(3))


@pytest.mark.parametrize("p", [1, 2])
def test_initial_piece_against_sympy(p):
    s = shape(3)
    piece = initial_piece(s, p)
    polys = [poly for _, poly in class_polys(s.scaled(p))]
    assert {m.key for m in piece.lm_set} == rref_pivot_keys(polys)
    assert piece.lm_set == straight_lms(s.scaled(p))


def test_initial_piece_empty_shape():
    piece = initial_piece(shape(3, mult=(0, 0, 0)), 1)
    assert piece.lm_set == {Monomial(3, 0)}
    with pytest.raises(InvalidParameter):
        initial_piece(shape(3), 0)


@pytest.mark.parametrize("p, dim", [(2, 51), (3, 130)])
def test_sagbi_small_shape(p, dim):
    rep = sagbi_degree_check(shape(3), p)
    assert rep.passed
    assert rep.dim == rep.lm_count == rep.product_count == dim


def test_sagbi_single_block_is_equality():
    s = shape(4, mult=(0, 0, 0, 0, 1, 0))
    rep = sagbi_degree_check(s, 2)
    prods = product_set(initial_piece(s, 1).lm_set, 2)
    assert prods == {m.key for m in initial_piece(s, 2).lm_set}
    assert rep.passed


def test_sagbi_zero_shape():
    rep = sagbi_degree_check(shape(3, mult=(0, 0, 0)), 2)
    assert rep.passed and rep.dim == 1


def test_sagbi_subword_shape():
    s = Shape(Word(4, (1, 0, 0, 0, 2, 1)), (1, 0, 0, 0, 1, 1))
    rep = sagbi_degree_check(s, 2)
    assert rep.passed


def test_sagbi_rejects_p1():
    with pytest.raises(InvalidParameter):
        sagbi_degree_check(shape(3), 1)
