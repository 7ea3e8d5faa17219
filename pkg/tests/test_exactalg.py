import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from smtbench.errors import InvalidParameter, NotInSpan, UndefinedLeadingTerm
from smtbench.exactalg import (
    ExactMatrix,
    Monomial,
    Polynomial,
    bareiss_rank,
    evaluate_at,
    exact_rank,
    express_in_basis,
    fraction_rank,
    leading_monomial,
    minor_poly,
    minor_poly_cofactor,
    pivot_monomials,
    rank_of_span,
)


def x(n, r, c):
    return Polynomial.variable(n, r, c)


def mono(n, *cells):
    exps = {}
    for cell in cells:
        exps[cell] = exps.get(cell, 0) + 1
    return Monomial.from_exps(n, exps)


def sympy_rank(ps):
    """Coefficient matrix rank via sympy: an independent elimination."""
    keys = sorted({k for p in ps for k, _ in p.items()})
    col = {k: a for a, k in enumerate(keys)}
    rows = []
    for p in ps:
        row = [0] * len(keys)
        for k, c in p.items():
            row[col[k]] = c
        rows.append(row)
    return sympy.Matrix(rows).rank() if rows and keys else 0


def test_minor_examples():
    assert minor_poly((1, 2), (1, 2), 2) == x(2, 1, 1) * x(2, 2, 2) - x(2, 1, 2) * x(2, 2, 1)
    assert minor_poly((1,), (3,), 3) == x(3, 1, 3)
    big = minor_poly((1, 2, 4, 5), (1, 3, 4, 6), 6)
    assert len(big) == 24
    assert leading_monomial(big) == (mono(6, (1, 1), (2, 3), (4, 4), (5, 6)), 1)
    with pytest.raises(InvalidParameter):
        minor_poly((1, 2), (1,), 3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_minor_matches_cofactor_expansion(n):
    for d in range(1, n + 1):
        for R in itertools.combinations(range(1, n + 1), d):
            for C in itertools.combinations(range(1, n + 1), d):
                assert minor_poly(R, C, n) == minor_poly_cofactor(R, C, n)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_diagonal_property(n):
    for d in range(1, n + 1):
        for R in itertools.combinations(range(1, n + 1), d):
            for C in itertools.combinations(range(1, n + 1), d):
                m, c = leading_monomial(minor_poly(R, C, n))
                assert c == 1
                assert m == mono(n, *zip(R, C))


def test_leading_monomial_examples():
    p = x(2, 1, 1) * x(2, 2, 2) - x(2, 1, 2) * x(2, 2, 1)
    assert leading_monomial(p) == (mono(2, (1, 1), (2, 2)), 1)
    q = x(3, 2, 3) * 5
    assert leading_monomial(q) == (mono(3, (2, 3)), 5)
    prod = minor_poly((1,), (2,), 3) * minor_poly((1, 2), (2, 3), 3)
    assert leading_monomial(prod)[0] == mono(3, (1, 2), (1, 2), (2, 3))
    with pytest.raises(UndefinedLeadingTerm):
        leading_monomial(Polynomial(3))


def test_term_order_precedence():
    n = 3
    order = [Monomial.var(n, r, c) for r in range(1, 4) for c in range(1, 4)]
    assert all(a > b for a, b in zip(order, order[1:]))
    assert str(mono(3, (1, 1), (1, 1), (2, 3))) == "x[1,1]^2*x[2,3]"


monomials = st.dictionaries(
    st.tuples(st.integers(1, 3), st.integers(1, 3)), st.integers(1, 4), max_size=4
).map(lambda e: Monomial.from_exps(3, e))


@given(monomials, monomials, monomials)
def test_term_order_is_multiplicative(u, v, w):
    if u > v:
        assert u * w > v * w


def lex_key(m: Monomial):
    e = m.exps()
    return tuple(e.get((r, c), 0) for r in range(1, 4) for c in range(1, 4))


@given(monomials, monomials)
def test_packed_order_is_lexicographic(u, v):
    assert (u > v) == (lex_key(u) > lex_key(v))


polys = st.dictionaries(monomials, st.integers(-5, 5), max_size=5).map(lambda t: Polynomial.from_terms(3, t))


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Polynomial(3)


@given(polys)
def test_text_round_trip(p):
    assert Polynomial.from_text(3, p.to_text()) == p


def test_text_form():
    p = x(2, 1, 1) * x(2, 2, 2) - x(2, 1, 2) * x(2, 2, 1)
    assert p.to_text() == "+1·x[1,1]*x[2,2] -1·x[1,2]*x[2,1]"


def test_rank_examples():
    n = 2
    assert rank_of_span([x(n, 1, 1), x(n, 1, 2), x(n, 1, 1) + x(n, 1, 2)]) == 2
    assert rank_of_span([]) == 0
    assert pivot_monomials([x(n, 1, 1) + x(n, 1, 2), x(n, 1, 2)]) == {Monomial.var(n, 1, 1), Monomial.var(n, 1, 2)}
    assert pivot_monomials([minor_poly((1, 2), (1, 2), 2)]) == {mono(2, (1, 1), (2, 2))}


def test_rank_rejects_mixed_universes():
    with pytest.raises(InvalidParameter):
        rank_of_span([x(2, 1, 1), x(3, 1, 1)])


def random_polys(rng, count, n=3, deg=3):
    out = []
    cells = [(r, c) for r in range(1, n + 1) for c in range(1, n + 1)]
    for _ in range(count):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            m = Monomial.from_exps(n, {cell: 1 for cell in rng.sample(cells, deg)})
            terms[m] = rng.randint(-3, 3)
        out.append(Polynomial.from_terms(n, terms))
    return out


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_rank_invariances(seed):
    rng = random.Random(seed)
    ps = random_polys(rng, 8)
    # add dependent combinations
    ps += [ps[0] * 2 - ps[1], ps[2] + ps[3] + ps[4]]
    r = rank_of_span(ps)
    assert r == sympy_rank(ps)
    shuffled = ps[:]
    rng.shuffle(shuffled)
    assert rank_of_span(shuffled) == r
    # invertible integer recombination: add multiples of earlier entries
    mixed = [ps[0]] + [p + ps[a - 1] * rng.randint(-2, 2) for a, p in enumerate(ps[1:], start=1)]
    assert rank_of_span(mixed) == r
    piv = pivot_monomials(ps)
    assert len(piv) == r
    top = max(piv)
    assert all(leading_monomial(p)[0] <= top for p in ps if not p.is_zero())
    # every element of the span has its leading monomial among the pivots
    assert all(leading_monomial(p)[0] in piv for p in ps if not p.is_zero())


def test_express_in_basis():
    n = 2
    a, b = x(n, 1, 1), x(n, 1, 2)
    assert express_in_basis(a + b, [a, b]) == [1, 1]
    basis = [a, b, a * b]
    for k in range(3):
        assert express_in_basis(basis[k], basis) == [int(k == t) for t in range(3)]
    with pytest.raises(NotInSpan):
        express_in_basis(x(n, 2, 2), [a, b])
    with pytest.raises(InvalidParameter):
        express_in_basis(a, [a, a * 2])
    # non-monic basis elements need rational coefficients
    assert express_in_basis(a, [a * 2 + b, b]) == [Fraction(1, 2), Fraction(-1, 2)]


def test_evaluate_at():
    I = ExactMatrix.identity(3)
    assert evaluate_at(minor_poly((1, 2), (1, 2), 3), I) == 1
    Z = ExactMatrix.zeros(3, 3)
    assert evaluate_at(minor_poly((1, 3), (2, 3), 3), Z) == 0
    X = ExactMatrix([[7, 1, 2], [3, 4, 5], [6, 8, 9]])
    assert evaluate_at(x(3, 1, 1), X) == 7
    assert evaluate_at(minor_poly((1, 2, 3), (1, 2, 3), 3), X) == sympy.Matrix(X.rows).det()
    with pytest.raises(InvalidParameter):
        evaluate_at(x(3, 1, 1), ExactMatrix.identity(2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 7), st.integers(1, 7))
def test_dense_rank_matches_sympy(seed, r, c):
    rng = random.Random(seed)
    base = [[rng.randint(-3, 3) for _ in range(c)] for _ in range(max(1, r // 2))]
    rows = [[sum(rng.randint(-2, 2) * b[k] for b in base) for k in range(c)] for _ in range(r)]
    expect = sympy.Matrix(rows).rank()
    assert exact_rank(rows) == expect
    assert fraction_rank(rows) == expect
    assert bareiss_rank(rows) in (None, expect)
    frac = [[Fraction(v, 3) for v in row] for row in rows]
    assert ExactMatrix(frac).rank() == expect
