"""Degree-wise checks of the toric degeneration: leading monomials of straight
tableaux, initial spaces of graded pieces, and semigroup generation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InvalidParameter, TheoremViolation
from .exactalg import Monomial
from .sections import section_space, tableau_poly
from .tableaux import Shape


def _text_list(ms) -> list[str]:
    return [str(m) for m in sorted(ms, reverse=True)]


def straight_lms(shape: Shape, reading: str = "top") -> set[Monomial]:
    """Leading monomials of the straight tableaux; they must be pairwise distinct."""
    straight = section_space(shape, reading).straight
    seen: dict[int, object] = {}
    for t in straight:
        key = tableau_poly(t).leading_key()
        if key in seen:
            raise TheoremViolation(
                f"two straight tableaux of {shape} share a leading monomial",
                {"monomial": str(Monomial(shape.n, key)), "tableaux": [str(seen[key]), str(t)]},
            )
        seen[key] = t
    return {Monomial(shape.n, k) for k in seen}


@dataclass
class InitialPiece:
    shape: Shape
    power: int
    lm_set: set[Monomial]
    dim: int

    def to_dict(self) -> dict:
        return {"shape": str(self.shape), "p": self.power, "dim": self.dim, "lm_set": _text_list(self.lm_set)}


def initial_piece(shape: Shape, p: int) -> InitialPiece:
    """Echelon pivots over all tableaux of shape (j, p*m): the degree-p initial space."""
    if p < 1:
        raise InvalidParameter(f"power must be >= 1, got {p}")
    space = section_space(shape.scaled(p))
    lms = {Monomial(shape.n, k) for k in space.pivots}
    return InitialPiece(shape, p, lms, space.dim)


@dataclass
class SagbiReport:
    shape: str
    power: int
    dim: int
    lm_count: int
    straight_lm_count: int
    product_count: int
    matches_straight: bool
    missing: list[str]

    @property
    def contained(self) -> bool:
        return not self.missing

    @property
    def hilbert_match(self) -> bool:
        return self.lm_count == self.dim == self.product_count

    @property
    def passed(self) -> bool:
        return self.contained and self.hilbert_match and self.matches_straight

    def to_dict(self) -> dict:
        return {
            "shape": self.shape,
            "p": self.power,
            "dim": self.dim,
            "lm_count": self.lm_count,
            "straight_lm_count": self.straight_lm_count,
            "product_count": self.product_count,
            "contained": self.contained,
            "hilbert_match": self.hilbert_match,
            "matches_straight": self.matches_straight,
            "missing": self.missing,
            "pass": self.passed,
        }


def product_set(lms: set[Monomial], p: int) -> set[int]:
    """Packed keys of all p-fold products (keys add under multiplication)."""
    keys = sorted(m.key for m in lms)
    return {sum(c) for c in itertools.combinations_with_replacement(keys, p)}


def sagbi_degree_check(shape: Shape, p: int) -> SagbiReport:
    """Degree-p initial space vs the p-fold products of degree-1 leading monomials.

    Products of leading monomials are always leading monomials of products, so
    containment of the initial space in the product set, together with equal
    sizes, is the generation statement in degree p.
    """
    if p < 2:
        raise InvalidParameter(f"sagbi check needs p >= 2, got {p}")
    deg1 = initial_piece(shape, 1).lm_set
    piece = initial_piece(shape, p)
    prods = product_set(deg1, p)
    have = {m.key for m in piece.lm_set}
    missing = sorted(have - prods, reverse=True)
    straight_p = straight_lms(shape.scaled(p))
    return SagbiReport(
        shape=str(shape),
        power=p,
        dim=piece.dim,
        lm_count=len(piece.lm_set),
        straight_lm_count=len(straight_p),
        product_count=len(prods),
        matches_straight=straight_p == piece.lm_set,
        missing=[str(Monomial(shape.n, k)) for k in missing],
    )
