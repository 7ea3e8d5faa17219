"""Graded pieces of the tensor product of two section rings over a Richardson ring.

The left ring R is built on the subword j (primal, upper-triangular model), the
right ring S on the subword k (opposite side, lower-triangular model).  The
Richardson ring A for w = w_j and v = w0 * w_k acts on both through the maps
``varphi_j`` and ``varphi_k``.  Everything is graded by total degree: the piece
of degree p is

    (sum_q R_q (x) S_{p-q}) / span{ phi_j(a) u (x) v' - u (x) phi^k(a) v' }

with a running over the degree-1 Richardson basis and deg u + deg v' = p - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import EmptyFiber, InvalidParameter
from .exactalg import Echelon, Polynomial, minor_poly
from .sections import (
    FlagMonomial,
    SectionSpace,
    richardson_monomials,
    section_space,
    straight_lms_keys,
    straighten_poly,
)
from .tableaux import Shape, column_sets, mask_mult
from .weyl import Permutation, Word, bruhat_leq, longest_word, tilde, word_to_perm


def m_zero(m: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    """The last n-1 entries of m; entry t pairs with the Grassmannian of rank n-t."""
    m = tuple(int(x) for x in m)
    if n is None:
        n = 2
        while n * (n - 1) // 2 < len(m):
            n += 1
    ell = n * (n - 1) // 2
    if len(m) != ell:
        raise InvalidParameter(f"multiplicity needs {ell} entries for n={n}, got {len(m)}")
    return m[ell - n + 1:]


def flag_mult_of(m0: Sequence[int]) -> tuple[int, ...]:
    """Reindex m0 by minor size d = 1..n-1 (entry t of m0 has size n-t)."""
    return tuple(reversed(tuple(m0)))


@dataclass
class RichardsonRing:
    w: Permutation
    v: Permutation
    m0: tuple[int, ...]

    @classmethod
    def for_words(cls, j: Word, k: Word, m: Sequence[int]) -> RichardsonRing:
        n = j.n
        return cls(word_to_perm(j), Permutation.longest(n) * word_to_perm(k), m_zero(m, n))

    @property
    def n(self) -> int:
        return self.w.n

    @property
    def nonempty(self) -> bool:
        return bruhat_leq(self.v, self.w)

    def basis(self, p: int = 1) -> list[FlagMonomial]:
        fm = tuple(p * x for x in flag_mult_of(self.m0))
        return richardson_monomials(self.w, self.v, fm)


def _lift_poly(T: FlagMonomial, word: Word, m: Sequence[int], p: int, opposite: bool) -> Polynomial:
    """Polynomial of the tableau with R^0 rows in the leading blocks and T in the last n-1."""
    n = word.n
    ell = len(word)
    ks = column_sets(word)
    mm = mask_mult(word, m)
    rows: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for r in range(ell - n + 1):
        K = ks[r]
        rows.extend([(tuple(range(1, len(K) + 1)), K)] * (p * mm[r]))
    by_size: dict[int, list[tuple[int, ...]]] = {}
    for R in T.all_rows():
        by_size.setdefault(len(R), []).append(R)
    for t in range(1, n):
        r = ell - n + t
        K = ks[r]
        got = by_size.pop(n - t, [])
        if len(got) != p * mm[r] or (got and len(K) != n - t):
            raise InvalidParameter(
                f"block {r + 1} has column set {K} and multiplicity {p * mm[r]}, "
                f"but the flag monomial supplies {len(got)} rows of size {n - t}"
            )
        rows.extend((R, K) for R in got)
    if any(by_size.values()):
        raise InvalidParameter(f"flag monomial rows of sizes {sorted(by_size)} have no block")
    out = Polynomial.constant(n)
    for R, K in rows:
        if opposite:
            out = out * minor_poly(tilde(R, n), tilde(K, n), n, "lower")
        else:
            out = out * minor_poly(R, K, n, "upper")
    return out


def varphi_j(T: FlagMonomial, j: Word, m: Sequence[int], p: int = 1) -> list[Fraction]:
    """Image of a Richardson monomial in R_p, as coefficients over the straight basis."""
    space = section_space(Shape(j, tuple(p * x for x in mask_mult(j, m))))
    return straighten_poly(_lift_poly(T, j, m, p, opposite=False), space)


def varphi_k(T: FlagMonomial, k: Word, m: Sequence[int], p: int = 1) -> list[Fraction]:
    """Involuted image on the k side, over the straight basis of the opposite shape."""
    space = section_space(Shape(k, tuple(p * x for x in mask_mult(k, m)), opposite=True))
    return straighten_poly(_lift_poly(T, k, m, p, opposite=True), space)


def _as_ints(vec: dict[int, Fraction]) -> dict[int, int]:
    den = 1
    for c in vec.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    return {k: int(c * den) for k, c in vec.items() if c}


def _rank(vectors: Sequence[dict[int, int]]) -> int:
    e = Echelon()
    for v in vectors:
        if v:
            e.add(v)
    return len(e)


@dataclass
class CoproductPiece:
    j: str
    k: str
    m: tuple[int, ...]
    p: int
    numerator: int
    relation_count: int
    relation_rank: int
    a1_dim: int
    phi_j_rank: int
    phi_k_rank: int
    dims_r: list[int]
    dims_s: list[int]
    stability_rank: int | None = None
    shadow_dim: int | None = None
    shadow_closed: bool | None = None
    extras: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.numerator - self.relation_rank

    @property
    def stability_pass(self) -> bool | None:
        if self.stability_rank is None:
            return None
        return self.stability_rank == self.relation_rank

    @property
    def injective(self) -> bool:
        return self.phi_j_rank == self.a1_dim == self.phi_k_rank

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "k": self.k,
            "m": list(self.m),
            "p": self.p,
            "grading": "total",
            "numerator": self.numerator,
            "relation_count": self.relation_count,
            "relation_rank": self.relation_rank,
            "dim": self.dim,
            "a1_dim": self.a1_dim,
            "phi_j_rank": self.phi_j_rank,
            "phi_k_rank": self.phi_k_rank,
            "dims_r": self.dims_r,
            "dims_s": self.dims_s,
            "stability_pass": self.stability_pass,
            "shadow_dim": self.shadow_dim,
            "shadow_closed": self.shadow_closed,
        }


class _Side:
    """Graded pieces of one factor, with cached products against A-images."""

    def __init__(self, word: Word, m: Sequence[int], opposite: bool):
        self.word, self.opposite = word, opposite
        self.mm = mask_mult(word, m)
        self.m = tuple(m)
        self._spaces: dict[int, SectionSpace] = {}
        self._prod: dict[tuple, dict[int, int]] = {}

    def space(self, q: int) -> SectionSpace:
        if q not in self._spaces:
            self._spaces[q] = section_space(Shape(self.word, tuple(q * x for x in self.mm), self.opposite))
        return self._spaces[q]

    def dim(self, q: int) -> int:
        return len(self.space(q).straight)

    def image_poly(self, T: FlagMonomial, deg: int) -> Polynomial:
        return _lift_poly(T, self.word, self.m, deg, self.opposite)

    def times(self, tag, poly: Polynomial, deg: int, q: int, idx: int) -> dict[int, int]:
        """Coefficients of poly * basis_q[idx] over the basis of degree q + deg."""
        key = (tag, q, idx)
        if key not in self._prod:
            u = self.space(q).basis.basis[idx]
            coeffs = straighten_poly(poly * u, self.space(q + deg))
            self._prod[key] = _as_ints({a: c for a, c in enumerate(coeffs) if c})
        return self._prod[key]


def coproduct_piece(j: Word, k: Word, m: Sequence[int], p: int, stability: bool = True, shadow: bool = True) -> CoproductPiece:
    n = j.n
    if k.n != n:
        raise InvalidParameter("j and k over different n")
    if p < 0:
        raise InvalidParameter(f"degree must be nonnegative, got {p}")
    ring = RichardsonRing.for_words(j, k, m)
    if not ring.nonempty:
        raise EmptyFiber(f"v = {ring.v} is not below w = {ring.w}; the Richardson variety is empty")
    left, right = _Side(j, m, False), _Side(k, m, True)
    a1 = ring.basis(1)

    dims_r = [left.dim(q) for q in range(p + 1)]
    dims_s = [right.dim(q) for q in range(p + 1)]
    offsets, total = [], 0
    for q in range(p + 1):
        offsets.append(total)
        total += dims_r[q] * dims_s[p - q]

    def coord(q: int, a: int, b: int) -> int:
        return offsets[q] + a * dims_s[p - q] + b

    def relations(gens: list[tuple[Polynomial, Polynomial]], deg: int, tag) -> list[dict[int, int]]:
        out = []
        for g, (pj, pk) in enumerate(gens):
            for q in range(p - deg + 1):
                qq = p - deg - q
                for a in range(dims_r[q]):
                    lhs = left.times((tag, g), pj, deg, q, a)
                    for b in range(dims_s[qq]):
                        rhs = right.times((tag, g), pk, deg, qq, b)
                        vec: dict[int, int] = {}
                        for a2, c in lhs.items():
                            vec[coord(q + deg, a2, b)] = c
                        for b2, c in rhs.items():
                            key = coord(q, a, b2)
                            vec[key] = vec.get(key, 0) - c
                        out.append({x: c for x, c in vec.items() if c})
        return out

    gens1 = [(left.image_poly(T, 1), right.image_poly(T, 1)) for T in a1]
    phi_j_rank = _rank([_as_ints(dict(enumerate(straighten_poly(pj, left.space(1))))) for pj, _ in gens1])
    phi_k_rank = _rank([_as_ints(dict(enumerate(straighten_poly(pk, right.space(1))))) for _, pk in gens1])

    rel1 = relations(gens1, 1, "a1") if p >= 1 else []
    rank1 = _rank(rel1)
    piece = CoproductPiece(
        j=str(j), k=str(k), m=tuple(m), p=p, numerator=total,
        relation_count=len(rel1), relation_rank=rank1, a1_dim=len(a1),
        phi_j_rank=phi_j_rank, phi_k_rank=phi_k_rank, dims_r=dims_r, dims_s=dims_s,
    )
    if stability and p >= 2:
        gens2 = [(left.image_poly(T, 2), right.image_poly(T, 2)) for T in ring.basis(2)]
        piece.stability_rank = _rank(rel1 + relations(gens2, 2, "a2"))
    if shadow:
        piece.shadow_dim, piece.shadow_closed = _shadow_dim(left, right, gens1, p)
    return piece


def _shadow_dim(left: _Side, right: _Side, gens1, p: int) -> tuple[int, bool]:
    """Same construction with every polynomial replaced by its leading monomial."""
    lms_r = [sorted(straight_lms_keys(left.space(q))) for q in range(p + 1)]
    lms_s = [sorted(straight_lms_keys(right.space(q))) for q in range(p + 1)]
    index_r = [{key: a for a, key in enumerate(x)} for x in lms_r]
    index_s = [{key: b for b, key in enumerate(x)} for x in lms_s]
    offsets, total = [], 0
    for q in range(p + 1):
        offsets.append(total)
        total += len(lms_r[q]) * len(lms_s[p - q])
    closed = True
    extra: dict[tuple, int] = {}

    def coord(q: int, kr: int, ks: int) -> int:
        nonlocal closed
        a, b = index_r[q].get(kr), index_s[p - q].get(ks)
        if a is None or b is None:
            closed = False
            return extra.setdefault((q, kr, ks), total + len(extra))
        return offsets[q] + a * len(lms_s[p - q]) + b

    vecs = []
    for pj, pk in gens1:
        # a generator lifting to zero on one side leaves a one-sided relation
        lj = None if pj.is_zero() else pj.leading_key()
        lk = None if pk.is_zero() else pk.leading_key()
        if lj is None and lk is None:
            continue
        for q in range(p):
            qq = p - 1 - q
            for kr in lms_r[q]:
                for ks in lms_s[qq]:
                    if lk is None:
                        vecs.append({coord(q + 1, lj + kr, ks): 1})
                    elif lj is None:
                        vecs.append({coord(q, kr, lk + ks): -1})
                    else:
                        x, y = coord(q + 1, lj + kr, ks), coord(q, kr, lk + ks)
                        if x != y:
                            vecs.append({x: 1, y: -1})
    return total + len(extra) - _rank(vecs), closed
