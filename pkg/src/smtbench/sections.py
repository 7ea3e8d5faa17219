"""Section spaces spanned by tableau polynomials, restriction to subwords,
flag standard monomials on Schubert and Richardson varieties, and straightening.

Tableau polynomials live on the triangular part of the matrix: primal shapes
use ``x[r,c]`` with ``r <= c`` and opposite shapes use ``r >= c``.  Flag
monomials use the generic matrix.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import InvalidParameter, NotInSpan, TheoremViolation, UnstableSample
from .exactalg import (
    Echelon,
    ExactMatrix,
    Polynomial,
    SpanBasis,
    echelon_of_span,
    exact_rank,
    minor_poly,
    rank_of_span,
)
from .tableaux import (
    Shape,
    Tableau,
    column_sets,
    dominated_sets,
    enumerate_classes,
    enumerate_straight,
    mask_mult,
    straight_arrangements,
)
from .weyl import IndexSet, Permutation, Word, all_permutations, bruhat_leq, dominates, longest_word, uparrow

# ---------------------------------------------------------------------------
# tableau polynomials


def tableau_poly(t: Tableau) -> Polynomial:
    n, support = t.n, t.shape.support
    out = Polynomial.constant(n)
    for K, R in t.pairs():
        out = out * minor_poly(R, K, n, support)
    return out


def _block_poly(K: IndexSet, rows: Sequence[IndexSet], n: int, support: str) -> Polynomial:
    out = Polynomial.constant(n)
    for R in rows:
        out = out * minor_poly(R, K, n, support)
    return out


def class_polys(shape: Shape, columns: Sequence[IndexSet] | None = None) -> Iterator[tuple[tuple, Polynomial]]:
    """(class key, polynomial) for every row multiset of the shape.

    ``columns`` overrides the column set used for each block; rows are still
    drawn from the shape's own options.  Prefix products are shared.
    """
    n, support = shape.n, shape.support
    cols = list(columns) if columns is not None else [K for K, _ in shape.blocks]
    levels = []
    for s, (_, m) in enumerate(shape.blocks, start=1):
        if not m:
            continue
        opts = []
        for ms in itertools.combinations_with_replacement(shape.options(s), m):
            opts.append((s, ms, _block_poly(cols[s - 1], ms, n, support)))
        levels.append(opts)
    nblocks = len(shape.blocks)

    def rec(depth: int, prefix: Polynomial, chosen: list):
        if depth == len(levels):
            key = [()] * nblocks
            for s, ms in chosen:
                key[s - 1] = ms
            yield tuple(key), prefix
            return
        for s, ms, p in levels[depth]:
            chosen.append((s, ms))
            yield from rec(depth + 1, prefix * p, chosen)
            chosen.pop()

    yield from rec(0, Polynomial.constant(n), [])


@dataclass
class SectionCertificate:
    shape: str
    generator_count: int
    class_count: int
    straight_count: int
    rank: int

    @property
    def passed(self) -> bool:
        return self.rank == self.straight_count

    def to_dict(self) -> dict:
        return {
            "shape": self.shape,
            "generator_count": self.generator_count,
            "class_count": self.class_count,
            "straight_count": self.straight_count,
            "rank": self.rank,
            "pass": self.passed,
        }


@dataclass
class SectionSpace:
    """Graded piece M(j, m): generators, straight basis and their polynomials."""

    shape: Shape
    generator_count: int
    class_count: int
    straight: list[Tableau]
    dim: int
    pivots: frozenset[int] = frozenset()
    _basis: SpanBasis | None = field(default=None, repr=False)

    @property
    def straight_polys(self) -> list[Polynomial]:
        return [tableau_poly(t) for t in self.straight]

    @property
    def basis(self) -> SpanBasis:
        if self._basis is None:
            self._basis = SpanBasis(self.straight_polys)
        return self._basis

    def certificate(self) -> SectionCertificate:
        return SectionCertificate(
            str(self.shape), self.generator_count, self.class_count, len(self.straight), self.dim
        )


_SPACES: dict[tuple[Shape, str], SectionSpace] = {}


def section_space(shape: Shape, reading: str = "top") -> SectionSpace:
    key = (shape, reading)
    if key not in _SPACES:
        polys = [p for _, p in class_polys(shape)]
        echelons = echelon_of_span(polys)
        _SPACES[key] = SectionSpace(
            shape=shape,
            generator_count=shape.ordered_count(),
            class_count=len(polys),
            straight=enumerate_straight(shape, reading),
            dim=sum(len(e) for e in echelons),
            pivots=frozenset(k for e in echelons for k in e.rows),
        )
    return _SPACES[key]


def dim_sections(shape: Shape, reading: str = "top") -> SectionCertificate:
    """Rank of all tableau polynomials, with the straight count alongside."""
    return section_space(shape, reading).certificate()


def straighten(t: Tableau, space: SectionSpace | None = None) -> list[Fraction]:
    """Coefficients of t's polynomial over the straight basis of its shape."""
    space = space or section_space(t.shape)
    return straighten_poly(tableau_poly(t), space)


def straighten_poly(p: Polynomial, space: SectionSpace) -> list[Fraction]:
    try:
        return space.basis.express(p)
    except NotInSpan as exc:
        raise TheoremViolation(
            f"polynomial not in the span of the straight tableaux of {space.shape}",
            {"shape": str(space.shape)},
        ) from exc


# ---------------------------------------------------------------------------
# restriction to a subword


class _ZeroImage:
    """Marker for a tableau sent to zero by the restriction map."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "ZERO"

    def __bool__(self) -> bool:
        return False


ZERO = _ZeroImage()


def phi(t: Tableau, j: Word) -> Tableau | _ZeroImage:
    """Restrict an i-tableau to the subword j.

    Rows in blocks whose letter is omitted are dropped (the factor becomes 1);
    the remaining rows keep their row sets and take the column sets K_j.  The
    image is zero when a kept row is not dominated by its new column set.
    """
    i = longest_word(t.n)
    if t.shape.word != i or t.shape.opposite:
        raise InvalidParameter("phi expects a primal tableau on the full word")
    if j.n != t.n:
        raise InvalidParameter("subword over a different n")
    target = Shape(j, mask_mult(j, t.shape.mult))
    kj = column_sets(j)
    rows = []
    for s, R in t.rows:
        if j[s - 1] == 0:
            continue
        if not dominates(kj[s - 1], R):
            return ZERO
        rows.append((s, R))
    return Tableau(target, tuple(rows))


@dataclass
class RestrictionReport:
    word_i: str
    word_j: str
    mult: tuple[int, ...]
    dim_i: int
    dim_j: int
    graph_rank: int
    image_rank: int
    flagged_rank: int
    conditions: list[dict]
    straight_j_grid: int
    straight_i_dominated: int

    @property
    def kernel_dim(self) -> int:
        return self.graph_rank - self.image_rank

    @property
    def well_defined(self) -> bool:
        return self.graph_rank == self.dim_i

    @property
    def rank_nullity(self) -> bool:
        return self.dim_i == self.kernel_dim + self.dim_j

    @property
    def kernel_spanned_by_flagged(self) -> bool:
        return self.flagged_rank == self.kernel_dim

    def to_dict(self) -> dict:
        return {
            "i": self.word_i,
            "j": self.word_j,
            "m": list(self.mult),
            "dim_i": self.dim_i,
            "dim_j": self.dim_j,
            "kernel_dim": self.kernel_dim,
            "graph_rank": self.graph_rank,
            "image_rank": self.image_rank,
            "flagged_rank": self.flagged_rank,
            "well_defined": self.well_defined,
            "rank_nullity": self.rank_nullity,
            "kernel_spanned_by_flagged": self.kernel_spanned_by_flagged,
            "conditions": self.conditions,
            "straight_j_grid": self.straight_j_grid,
            "straight_i_dominated": self.straight_i_dominated,
        }


def kernel_conditions(j: Word, mult: Sequence[int]) -> list[dict]:
    """Per kept block: the condition R not<= K_j^(r), and whether it is void.

    A condition is void when every row admissible for K_i^(r) is already
    dominated by K_j^(r), i.e. no tableau can violate it.
    """
    i = longest_word(j.n)
    ki, kj = column_sets(i), column_sets(j)
    mm = mask_mult(j, mult)
    out = []
    for r in range(len(i)):
        if j[r] == 0 or mm[r] == 0:
            continue
        violators = [R for R in dominated_sets(ki[r], j.n) if not dominates(kj[r], R)]
        out.append(
            {
                "block": r + 1,
                "K_i": list(ki[r]),
                "K_j": list(kj[r]),
                "void": not violators,
                "violating_rows": [list(R) for R in violators],
            }
        )
    return out


def _row_content(n: int, key: tuple) -> tuple[int, ...]:
    c = [0] * n
    for block in key:
        for R in block:
            for r in R:
                c[r - 1] += 1
    return tuple(c)


def flagged_rank(j: Word, mult: Sequence[int], blocks: Sequence[int] | None = None) -> int:
    """Rank of the i-tableaux having a row R not<= K_j^(r) in one of ``blocks``."""
    i = longest_word(j.n)
    shape_i = Shape(i, mask_mult(j, mult))
    kj = column_sets(j)
    allowed = set(blocks) if blocks is not None else {r + 1 for r in range(len(i)) if j[r]}
    polys = []
    for key, p in class_polys(shape_i):
        if any(not dominates(kj[s - 1], R) for s, ms in enumerate(key, start=1) if s in allowed for R in ms):
            polys.append(p)
    return rank_of_span(polys)


def restriction_kernel_dim(mult: Sequence[int], j: Word, reading: str = "top") -> RestrictionReport:
    """Compare M(i, m) with M(j, m) through the restriction map.

    Multiplicities on omitted letters are zeroed on both sides so that the map
    is defined on the spanning tableaux.  The kernel dimension comes from the
    graph of the map: rank{(f, phi f)} - rank{phi f}.
    """
    n = j.n
    i = longest_word(n)
    mm = mask_mult(j, mult)
    shape_i, shape_j = Shape(i, mm), Shape(j, mm)
    kj = column_sets(j)
    kept_cols = [K if a else ()
                 for K, a in zip(kj, j.letters)]

    # Build the graph vectors in disjoint coordinate sets; the map preserves
    # row content, so the echelon splits along it.
    graph: dict[tuple, Echelon] = {}
    image: dict[tuple, Echelon] = {}
    src: dict[tuple, Echelon] = {}
    flagged: dict[tuple, Echelon] = {}
    img_iter = class_polys(shape_i, columns=kept_cols)
    for (key, f), (_, g) in zip(class_polys(shape_i), img_iter):
        w = _row_content(n, key)
        vec = {(k << 1) | 1: c for k, c in f.items()}
        vec.update({k << 1: c for k, c in g.items()})
        graph.setdefault(w, Echelon()).add(vec)
        src.setdefault(w, Echelon()).add(dict(f.items()))
        if not g.is_zero():
            image.setdefault(w, Echelon()).add(dict(g.items()))
        if any(not dominates(kj[s - 1], R) for s, ms in enumerate(key, start=1) if j[s - 1] for R in ms):
            flagged.setdefault(w, Echelon()).add(dict(f.items()))

    dim_j = section_space(shape_j, reading).dim
    straight_j = len(section_space(shape_j, reading).straight)
    straight_i_dom = sum(
        1
        for t in enumerate_straight(shape_i, reading)
        if all(dominates(kj[s - 1], R) for s, R in t.rows if j[s - 1])
    )
    return RestrictionReport(
        word_i=str(i),
        word_j=str(j),
        mult=mm,
        dim_i=sum(len(e) for e in src.values()),
        dim_j=dim_j,
        graph_rank=sum(len(e) for e in graph.values()),
        image_rank=sum(len(e) for e in image.values()),
        flagged_rank=sum(len(e) for e in flagged.values()),
        conditions=kernel_conditions(j, mm),
        straight_j_grid=straight_j,
        straight_i_dominated=straight_i_dom,
    )


# ---------------------------------------------------------------------------
# flag monomials, Schubert and Richardson filters


def _check_flag_mult(n: int, m: Sequence[int]) -> tuple[int, ...]:
    m = tuple(int(x) for x in m)
    if len(m) != n - 1:
        raise InvalidParameter(f"flag multiplicity needs {n - 1} entries, got {len(m)}")
    if any(x < 0 for x in m):
        raise InvalidParameter(f"flag multiplicities must be nonnegative: {m}")
    return m


@dataclass(frozen=True, order=True)
class FlagMonomial:
    """Product of minors [R | 1..d]; ``rows[d-1]`` is the sorted multiset of size-d row sets."""

    n: int
    rows: tuple[tuple[IndexSet, ...], ...]

    @property
    def mult(self) -> tuple[int, ...]:
        return tuple(len(x) for x in self.rows)

    def all_rows(self) -> list[IndexSet]:
        return [R for block in self.rows for R in block]

    def poly(self) -> Polynomial:
        out = Polynomial.constant(self.n)
        for R in self.all_rows():
            out = out * minor_poly(R, tuple(range(1, len(R) + 1)), self.n, "full")
        return out

    def is_semistandard(self) -> bool:
        """Rows as columns of a Young tableau: longer first, then weakly increasing rows."""
        cols = sorted(self.all_rows(), key=lambda R: (-len(R), R))
        return all(all(a <= b for a, b in zip(p, q)) for p, q in zip(cols, cols[1:]))

    def __str__(self) -> str:
        return " ".join("[" + ",".join(map(str, R)) + "]" for R in self.all_rows()) or "1"


def flag_monomials(n: int, m: Sequence[int]) -> list[FlagMonomial]:
    """Every product of flag minors with multiplicity m (as multisets)."""
    m = _check_flag_mult(n, m)
    per = [
        list(itertools.combinations_with_replacement(list(itertools.combinations(range(1, n + 1), d)), m[d - 1]))
        for d in range(1, n)
    ]
    return [FlagMonomial(n, tuple(c)) for c in itertools.product(*per)]


def standard_monomials(n: int, m: Sequence[int]) -> list[FlagMonomial]:
    return [f for f in flag_monomials(n, m) if f.is_semistandard()]


RULES = ("row", "chain")


@lru_cache(maxsize=None)
def _prefix_classes(n: int) -> dict[IndexSet, tuple[Permutation, ...]]:
    """Permutations grouped by the set of their first d images, for every d."""
    out: dict[IndexSet, list[Permutation]] = {}
    for s in all_permutations(n):
        for d in range(1, n):
            out.setdefault(tuple(sorted(s.images[:d])), []).append(s)
    return {k: tuple(v) for k, v in out.items()}


def _chain_exists(cols: Sequence[IndexSet], lower: Permutation, upper: Permutation) -> bool:
    """Is there lower <= s_1 <= ... <= s_k <= upper with s_t a lift of column t?"""
    classes = _prefix_classes(lower.n)
    cur = [lower]
    for R in cols:
        cur = [s for s in classes[R] if any(bruhat_leq(t, s) for t in cur)]
        if not cur:
            return False
    return any(bruhat_leq(s, upper) for s in cur)


def _columns(f: FlagMonomial) -> list[IndexSet]:
    return sorted(f.all_rows(), key=lambda R: (-len(R), R))


def _check_rule(rule: str):
    if rule not in RULES:
        raise InvalidParameter(f"rule must be one of {RULES}, got {rule!r}")


def schubert_monomials(w: Permutation, m: Sequence[int], rule: str = "row") -> list[FlagMonomial]:
    """Standard monomials kept on X_w.

    ``row`` bounds every row by w's sorted prefix of the same size. ``chain``
    asks for a Bruhat chain of lifts of the columns, read left to right, below w.
    """
    _check_rule(rule)
    n = w.n
    if rule == "chain":
        e = Permutation.identity(n)
        return [f for f in standard_monomials(n, m) if _chain_exists(_columns(f), e, w)]
    ups = [uparrow(w, d) for d in range(1, n)]
    return [f for f in standard_monomials(n, m) if all(dominates(ups[len(R) - 1], R) for R in f.all_rows())]


def richardson_monomials(w: Permutation, v: Permutation, m: Sequence[int], rule: str = "row") -> list[FlagMonomial]:
    """Standard monomials kept on the Richardson variety X_w^v (empty unless v <= w).

    With ``chain`` the upper and lower bounds get separate chains: one from the
    identity up to w and one from v up to the longest element.
    """
    _check_rule(rule)
    if w.n != v.n:
        raise InvalidParameter("permutations of different size")
    if not bruhat_leq(v, w):
        _check_flag_mult(w.n, m)
        return []
    n = w.n
    if rule == "chain":
        e, w0 = Permutation.identity(n), Permutation.longest(n)
        return [
            f
            for f in standard_monomials(n, m)
            if _chain_exists(_columns(f), e, w) and _chain_exists(_columns(f), v, w0)
        ]
    up = [uparrow(w, d) for d in range(1, n)]
    lo = [uparrow(v, d) for d in range(1, n)]
    return [
        f
        for f in standard_monomials(n, m)
        if all(dominates(up[len(R) - 1], R) and dominates(R, lo[len(R) - 1]) for R in f.all_rows())
    ]


@lru_cache(maxsize=None)
def flag_space_dim(n: int, m: tuple[int, ...]) -> int:
    """dim V_m: rank of all flag monomial polynomials on the generic matrix."""
    return rank_of_span([f.poly() for f in flag_monomials(n, m)])


# ---------------------------------------------------------------------------
# sampling oracles


@dataclass(frozen=True)
class SamplePlan:
    seed: int
    count: int | None = None
    bound: int = 50

    def resolve(self, ambient_dim: int) -> int:
        n = self.count if self.count is not None else ambient_dim + 25
        if n < ambient_dim:
            raise InvalidParameter(f"sample count {n} below ambient dimension {ambient_dim}")
        return n


def permutation_matrix(w: Permutation) -> list[list[int]]:
    """Column k is the basis vector e_{w(k)}."""
    n = w.n
    P = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        P[w(k) - 1][k - 1] = 1
    return P


def _unitriangular(n: int, rng: random.Random, bound: int, upper: bool) -> list[list[int]]:
    M = [[0] * n for _ in range(n)]
    for a in range(n):
        M[a][a] = 1
        for b in range(n):
            if (upper and b > a) or (not upper and b < a):
                M[a][b] = rng.randint(-bound, bound)
    return M


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def sample_schubert_matrix(w: Permutation, rng: random.Random, bound: int = 50) -> ExactMatrix:
    """U * P_w with U random upper unitriangular."""
    return ExactMatrix(_matmul(_unitriangular(w.n, rng, bound, True), permutation_matrix(w)))


def sample_opposite_matrix(v: Permutation, rng: random.Random, bound: int = 50) -> ExactMatrix:
    """L * P_v with L random lower unitriangular."""
    return ExactMatrix(_matmul(_unitriangular(v.n, rng, bound, False), permutation_matrix(v)))


def _det(M: list[list[int]]) -> int:
    """Integer determinant by Bareiss elimination."""
    m = [row[:] for row in M]
    d = len(m)
    sign, prev = 1, 1
    for c in range(d):
        piv = next((i for i in range(c, d) if m[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        for i in range(c + 1, d):
            for k in range(c + 1, d):
                m[i][k] = (m[c][c] * m[i][k] - m[i][c] * m[c][k]) // prev
        prev = m[c][c]
    return sign * m[d - 1][d - 1]


def flag_minor_values(X: ExactMatrix) -> dict[IndexSet, int]:
    """All minors [R | 1..d] of X."""
    n = X.nrows
    out = {}
    for d in range(1, n):
        for R in itertools.combinations(range(1, n + 1), d):
            out[R] = _det([[int(X.rows[r - 1][c]) for c in range(d)] for r in R])
    return out


def evaluation_matrix(monomials: Sequence[FlagMonomial], samples: Sequence[ExactMatrix]) -> list[list[int]]:
    """Rows: monomials; columns: samples."""
    vals = [flag_minor_values(X) for X in samples]
    out = []
    for f in monomials:
        rows = f.all_rows()
        line = []
        for v in vals:
            x = 1
            for R in rows:
                x *= v[R]
                if not x:
                    break
            line.append(x)
        out.append(line)
    return out


def _samples(kind: str, perm: Permutation, rng: random.Random, count: int, bound: int) -> list[ExactMatrix]:
    f = sample_schubert_matrix if kind == "schubert" else sample_opposite_matrix
    return [f(perm, rng, bound) for _ in range(count)]


def _hstack(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    return [x + y for x, y in zip(a, b)]


@dataclass
class OracleResult:
    value: int
    seed: int
    samples: int
    stable: bool = True

    def to_dict(self) -> dict:
        return {"value": self.value, "seed": self.seed, "samples": self.samples, "stable": self.stable}


def schubert_dim_oracle(w: Permutation, m: Sequence[int], plan: SamplePlan) -> OracleResult:
    """Rank of all flag monomials evaluated at random points of the Schubert cell."""
    m = _check_flag_mult(w.n, m)
    mons = flag_monomials(w.n, m)
    N = plan.resolve(flag_space_dim(w.n, m))
    rng = random.Random(plan.seed)
    first = evaluation_matrix(mons, _samples("schubert", w, rng, N, plan.bound))
    more = evaluation_matrix(mons, _samples("schubert", w, rng, N, plan.bound))
    r1 = exact_rank(first)
    r2 = exact_rank(_hstack(first, more))
    if r1 != r2:
        raise UnstableSample(f"rank {r1} at N={N} but {r2} at N={2 * N} (seed {plan.seed})")
    return OracleResult(r1, plan.seed, N)


def _richardson_value(E_w, E_v) -> int:
    return exact_rank(E_w) + exact_rank(E_v) - exact_rank(_hstack(E_w, E_v))


def richardson_dim_oracle(w: Permutation, v: Permutation, m: Sequence[int], plan: SamplePlan) -> OracleResult:
    """dim V_m - dim(K_w + K^v), from evaluations at Schubert and opposite samples."""
    m = _check_flag_mult(w.n, m)
    if not bruhat_leq(v, w):
        return OracleResult(0, plan.seed, 0)
    mons = flag_monomials(w.n, m)
    N = plan.resolve(flag_space_dim(w.n, m))
    rng = random.Random(plan.seed)
    ew = evaluation_matrix(mons, _samples("schubert", w, rng, N, plan.bound))
    ev = evaluation_matrix(mons, _samples("opposite", v, rng, N, plan.bound))
    d1 = _richardson_value(ew, ev)
    ew2 = _hstack(ew, evaluation_matrix(mons, _samples("schubert", w, rng, N, plan.bound)))
    ev2 = _hstack(ev, evaluation_matrix(mons, _samples("opposite", v, rng, N, plan.bound)))
    d2 = _richardson_value(ew2, ev2)
    if d1 != d2:
        raise UnstableSample(f"dimension {d1} at N={N} but {d2} at N={2 * N} (seed {plan.seed})")
    return OracleResult(d1, plan.seed, N)


def straight_lms_keys(space: SectionSpace) -> set[int]:
    """Packed leading monomials of the straight basis polynomials."""
    return {p.leading_key() for p in space.basis.basis}
