"""Acceptance suite: one group of tests per numbered criterion.

Golden values were produced by the independent oracles in the unit tests
(sympy ranks, sampling ranks, brute-force enumeration) before being frozen here.
"""

import itertools
import random
import time

import pytest

from smtbench import cli, exactalg, sections, tableaux
from smtbench.degeneration import initial_piece, product_set, sagbi_degree_check, straight_lms
from smtbench.fiberprod import RichardsonRing, coproduct_piece
from smtbench.sections import (
    SamplePlan,
    dim_sections,
    flag_space_dim,
    restriction_kernel_dim,
    richardson_dim_oracle,
    richardson_monomials,
    schubert_dim_oracle,
    schubert_monomials,
    standard_monomials,
)
from smtbench.tableaux import Shape, enumerate_tableaux, involution, mask_mult
from smtbench.weyl import Permutation, Word, all_permutations, bruhat_leq, longest_word, subwords

SEEDS = (1, 2, 3)


def cold():
    """Drop every cache so timings include the full computation."""
    sections._SPACES.clear()
    exactalg.minor_poly.cache_clear()
    tableaux.dominated_sets.cache_clear()
    flag_space_dim.cache_clear()


def criterion(number, label):
    return pytest.mark.criterion(number, label)


def full_shape(n):
    i = longest_word(n)
    return Shape(i, (1,) * len(i))


def subword_shapes(n):
    i = longest_word(n)
    return [Shape(j, mask_mult(j, (1,) * len(i))) for j in subwords(i)]


# 1 -------------------------------------------------------------------------


@criterion(1, "straight tableaux form a basis")
def test_straight_basis_n3():
    cold()
    start = time.perf_counter()
    cert = dim_sections(full_shape(3))
    elapsed = time.perf_counter() - start
    assert cert.generator_count == 18
    assert cert.straight_count == cert.rank == 13
    assert elapsed < 1.0


@criterion(1, "straight tableaux form a basis")
def test_straight_basis_n4():
    cold()
    start = time.perf_counter()
    cert = dim_sections(full_shape(4))
    elapsed = time.perf_counter() - start
    assert cert.generator_count == 1728
    assert cert.straight_count == cert.rank == 394
    assert elapsed <= 300


# 2 -------------------------------------------------------------------------

J2 = Word(4, (1, 0, 0, 0, 2, 1))


@criterion(2, "subword restriction")
def test_restriction_condition_instantiation():
    rep = restriction_kernel_dim((1,) * 6, J2)
    conds = {c["block"]: c for c in rep.conditions}
    assert conds[1]["void"]
    assert not conds[5]["void"]
    assert tuple(conds[5]["K_i"]) == (3, 4) and tuple(conds[5]["K_j"]) == (2, 3)


@criterion(2, "subword restriction")
def test_restriction_rank_nullity():
    cold()
    start = time.perf_counter()
    rep = restriction_kernel_dim((1,) * 6, J2)
    assert rep.well_defined
    assert rep.rank_nullity
    assert (rep.dim_i, rep.kernel_dim, rep.dim_j) == (40, 27, 13)
    assert time.perf_counter() - start <= 300


@criterion(2, "subword restriction")
def test_restriction_straight_with_condition_count():
    rep = restriction_kernel_dim((1,) * 6, J2)
    assert rep.straight_i_dominated == rep.dim_j


# 3 -------------------------------------------------------------------------


def ssyt_21_le3():
    return sum(1 for a, b, c in itertools.product(range(1, 4), repeat=3) if a <= b and a < c)


@criterion(3, "Schubert standard monomials")
def test_flag_space_dimension():
    assert ssyt_21_le3() == 8
    assert len(standard_monomials(3, (1, 1))) == flag_space_dim(3, (1, 1)) == 8


@criterion(3, "Schubert standard monomials")
def test_schubert_filter_vs_oracle():
    start = time.perf_counter()
    bad = []
    for w in all_permutations(3):
        count = len(schubert_monomials(w, (1, 1)))
        for seed in SEEDS:
            res = schubert_dim_oracle(w, (1, 1), SamplePlan(seed))
            assert res.stable
            if res.value != count:
                bad.append((str(w), seed, count, res.value))
    assert time.perf_counter() - start < 30
    assert not bad, f"filtered count != oracle: {bad}"


# 4 -------------------------------------------------------------------------

RICH_MULTS = [(1, 0), (0, 1), (1, 1)]


@criterion(4, "Richardson sandwich")
def test_richardson_s3():
    start = time.perf_counter()
    perms = all_permutations(3)
    comparable = [(w, v) for w in perms for v in perms if bruhat_leq(v, w)]
    assert len(comparable) == 19
    bad = []
    for w, v in itertools.product(perms, repeat=2):
        for m in RICH_MULTS:
            count = len(richardson_monomials(w, v, m))
            res = richardson_dim_oracle(w, v, m, SamplePlan(1))
            assert res.stable
            if not bruhat_leq(v, w):
                assert count == res.value == 0
            elif count != res.value:
                bad.append((str(w), str(v), m, count, res.value))
    assert time.perf_counter() - start <= 600
    assert not bad, f"sandwich count != oracle: {bad}"


def s4_spot_pairs():
    perms = all_permutations(4)
    pairs = sorted((w, v) for w in perms for v in perms if bruhat_leq(v, w))
    return random.Random(20261016).sample(pairs, 3)


@criterion(4, "Richardson sandwich")
@pytest.mark.slow
@pytest.mark.parametrize("w, v", s4_spot_pairs(), ids=lambda p: str(p))
def test_richardson_s4_spot(w, v):
    m = (1, 1, 1)
    res = richardson_dim_oracle(w, v, m, SamplePlan(1))
    assert res.stable
    assert len(richardson_monomials(w, v, m)) == res.value


# 5 -------------------------------------------------------------------------


def involution_shapes():
    return subword_shapes(3) + [Shape(longest_word(3), (2, 1, 1)), full_shape(4)]


@criterion(5, "involution")
@pytest.mark.parametrize("shape", involution_shapes(), ids=str)
def test_involution_bijection(shape):
    primal = list(enumerate_tableaux(shape))
    opposite = set(enumerate_tableaux(shape.flipped()))
    images = [involution(t) for t in primal]
    assert set(images) == opposite and len(set(images)) == len(primal)
    assert all(involution(s) == t for s, t in zip(images, primal))
    assert dim_sections(shape.flipped()).rank == dim_sections(shape).rank


# 6 -------------------------------------------------------------------------


def degeneration_shapes():
    return subword_shapes(3) + [full_shape(4), Shape(J2, mask_mult(J2, (1,) * 6))]


@criterion(6, "degeneration")
@pytest.mark.parametrize("shape", degeneration_shapes(), ids=str)
def test_leading_monomials_distinct(shape):
    lms = straight_lms(shape)
    assert len(lms) == dim_sections(shape).rank


@criterion(6, "degeneration")
@pytest.mark.parametrize("shape", degeneration_shapes(), ids=str)
def test_initial_piece_is_straight(shape):
    powers = (1, 2, 3) if shape.n == 3 else (1, 2)
    for p in powers:
        assert initial_piece(shape, p).lm_set == straight_lms(shape.scaled(p))


@criterion(6, "degeneration")
def test_sagbi_n3():
    cold()
    start = time.perf_counter()
    for shape in subword_shapes(3):
        for p in (2, 3):
            rep = sagbi_degree_check(shape, p)
            assert rep.contained and rep.hilbert_match, rep.to_dict()
    assert sagbi_degree_check(full_shape(3), 2).dim == 51
    assert time.perf_counter() - start < 60


@criterion(6, "degeneration")
@pytest.mark.slow
def test_sagbi_n4():
    cold()
    start = time.perf_counter()
    rep = sagbi_degree_check(full_shape(4), 2)
    assert rep.passed and rep.dim == 7497
    deg1 = initial_piece(full_shape(4), 1).lm_set
    assert len(product_set(deg1, 2)) == rep.dim
    assert time.perf_counter() - start <= 900


# 7 -------------------------------------------------------------------------


@criterion(7, "fiber product")
def test_fiber_product_pieces():
    i = longest_word(3)
    m = (1, 1, 1)
    start = time.perf_counter()
    a1 = len(RichardsonRing.for_words(i, i, m).basis())
    one = coproduct_piece(i, i, m, 1)
    assert one.phi_j_rank == one.phi_k_rank == one.a1_dim == a1 == 8
    assert one.dim == one.dims_r[1] + one.dims_s[1] - one.a1_dim == 18
    two = coproduct_piece(i, i, m, 2)
    assert two.stability_pass, two.to_dict()
    assert two.dim == 100
    assert time.perf_counter() - start <= 600


# 8 -------------------------------------------------------------------------

DETERMINISM_RUNS = [
    ["verify", "bs", "--n", "4"],
    ["verify", "schubert", "--n", "3", "--w", "3,2,1", "--mult", "1,1"],
    ["verify", "richardson", "--n", "3", "--w", "3,2,1", "--v", "2,1,3", "--mult", "1,1"],
    ["verify", "sagbi", "--n", "3", "--powers", "2,3"],
    ["verify", "restriction", "--n", "4", "--j", "1,0,0,0,2,1", "--mult", "1,1,1,1,1,1"],
    ["fiber", "dim", "--n", "3", "--powers", "0,1,2"],
]


@criterion(8, "determinism")
@pytest.mark.parametrize("argv", DETERMINISM_RUNS, ids=lambda a: " ".join(a[:2]))
def test_reports_are_byte_identical(capsys, argv):
    outs = []
    for extra in ([], [], ["--jobs", "4"], ["--jobs", "2"]):
        cold()
        cli.main([*argv, "--no-timing", *extra])
        outs.append(capsys.readouterr().out)
    assert outs[0]
    assert len(set(outs)) == 1
