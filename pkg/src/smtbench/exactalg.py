"""Exact polynomial arithmetic in the entries x[r,c] of an n x n matrix.

Monomials are packed into a single Python int: the exponent of ``x[r,c]``
occupies a 16-bit field, with ``x[1,1]`` in the most significant field and
``x[n,n]`` in the least.  Integer comparison of packed keys is then exactly the
row-major lexicographic term order ``x11 > x12 > ... > x1n > x21 > ... > xnn``,
and multiplying monomials is adding keys.  This order is a diagonal term order:
every minor's leading monomial is the product of its diagonal entries.

All coefficients are Python ints; rationals appear only inside elimination.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InvalidParameter, NotInSpan, UndefinedLeadingTerm

FIELD_BITS = 16
_FIELD_MASK = (1 << FIELD_BITS) - 1

# weight sentinel: not yet computed
_UNSET = object()


def _shift(n: int, r: int, c: int) -> int:
    return (n * n - 1 - ((r - 1) * n + (c - 1))) * FIELD_BITS


@lru_cache(maxsize=None)
def _var_key(n: int, r: int, c: int) -> int:
    if not (1 <= r <= n and 1 <= c <= n):
        raise InvalidParameter(f"variable x[{r},{c}] outside a {n}x{n} matrix")
    return 1 << _shift(n, r, c)


def decode(n: int, key: int) -> dict[tuple[int, int], int]:
    """Exponent map of a packed monomial key."""
    out = {}
    pos = n * n - 1
    while key:
        e = key & _FIELD_MASK
        if e:
            out[(pos // n + 1, pos % n + 1)] = e
        key >>= FIELD_BITS
        pos -= 1
    return out


class TermOrder:
    """Row-major lexicographic order on monomials in x[r,c].

    Variables are ranked x[1,1] > x[1,2] > ... > x[n,n]; two monomials are
    compared by their exponent sequences in that precedence.
    """

    name = "lex-rowmajor"

    @staticmethod
    def variables(n: int) -> list[tuple[int, int]]:
        return [(r, c) for r in range(1, n + 1) for c in range(1, n + 1)]

    @staticmethod
    def key(m: Monomial) -> int:
        return m.key

    @staticmethod
    def greater(u: Monomial, v: Monomial) -> bool:
        return u.key > v.key


class Monomial:
    __slots__ = ("n", "key")

    def __init__(self, n: int, key: int = 0):
        self.n = n
        self.key = key

    @classmethod
    def from_exps(cls, n: int, exps: Mapping[tuple[int, int], int]) -> Monomial:
        key = 0
        for (r, c), e in exps.items():
            if e < 0 or e > _FIELD_MASK:
                raise InvalidParameter(f"exponent {e} out of range")
            key += e * _var_key(n, r, c)
        return cls(n, key)

    @classmethod
    def var(cls, n: int, r: int, c: int) -> Monomial:
        return cls(n, _var_key(n, r, c))

    def exps(self) -> dict[tuple[int, int], int]:
        return decode(self.n, self.key)

    @property
    def degree(self) -> int:
        return sum(self.exps().values())

    def __mul__(self, other: Monomial) -> Monomial:
        return Monomial(self.n, self.key + other.key)

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.n == other.n and self.key == other.key

    def __hash__(self) -> int:
        return hash((self.n, self.key))

    def __lt__(self, other: Monomial) -> bool:
        return self.key < other.key

    def __le__(self, other: Monomial) -> bool:
        return self.key <= other.key

    def __gt__(self, other: Monomial) -> bool:
        return self.key > other.key

    def __ge__(self, other: Monomial) -> bool:
        return self.key >= other.key

    def __str__(self) -> str:
        return monomial_text(self.n, self.key)

    def __repr__(self) -> str:
        return f"Monomial({self})"


def monomial_text(n: int, key: int) -> str:
    parts = []
    for (r, c), e in sorted(decode(n, key).items()):
        parts.append(f"x[{r},{c}]" if e == 1 else f"x[{r},{c}]^{e}")
    return "*".join(parts) if parts else "1"


class Polynomial:
    """Immutable polynomial with integer coefficients over an n x n matrix.

    ``_terms`` maps packed monomial keys to nonzero ints.  ``_weight`` caches the
    row/column content (a tuple of 2n counts) when the polynomial is homogeneous
    for that bigrading, and ``None`` when it is not.
    """

    __slots__ = ("n", "_terms", "_weight")

    def __init__(self, n: int, terms: Mapping[int, int] | None = None, weight=_UNSET, _trusted=False):
        self.n = n
        if _trusted:
            self._terms = terms
        else:
            self._terms = {k: int(c) for k, c in (terms or {}).items() if c}
        self._weight = weight

    @classmethod
    def constant(cls, n: int, c: int = 1) -> Polynomial:
        return cls(n, {0: c} if c else {}, weight=(0,) * (2 * n) if c else _UNSET)

    @classmethod
    def variable(cls, n: int, r: int, c: int) -> Polynomial:
        w = [0] * (2 * n)
        w[r - 1] += 1
        w[n + c - 1] += 1
        return cls(n, {_var_key(n, r, c): 1}, weight=tuple(w))

    @classmethod
    def from_terms(cls, n: int, terms: Mapping[Monomial, int]) -> Polynomial:
        out: dict[int, int] = {}
        for m, c in terms.items():
            out[m.key] = out.get(m.key, 0) + c
        return cls(n, out)

    @property
    def terms(self) -> dict[Monomial, int]:
        return {Monomial(self.n, k): c for k, c in self._terms.items()}

    def items(self) -> Iterator[tuple[int, int]]:
        """Raw (packed key, coefficient) pairs."""
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def weight(self):
        """Row/column content as a 2n-tuple, or None if not bihomogeneous."""
        if self._weight is _UNSET:
            self._weight = _compute_weight(self.n, self._terms)
        return self._weight

    def _check(self, other: Polynomial):
        if self.n != other.n:
            raise InvalidParameter(f"polynomials over different matrix sizes {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(self.n, other)
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Polynomial(self.n, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, {k: -c for k, c in self._terms.items()}, weight=self._weight, _trusted=True)

    def __sub__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return Polynomial(self.n)
            return Polynomial(self.n, {k: c * other for k, c in self._terms.items()}, weight=self._weight, _trusted=True)
        self._check(other)
        out: dict[int, int] = {}
        for a, x in self._terms.items():
            for b, y in other._terms.items():
                k = a + b
                v = out.get(k, 0) + x * y
                if v:
                    out[k] = v
                else:
                    del out[k]
        w = _UNSET
        if self._weight is not _UNSET and other._weight is not _UNSET:
            if self._weight is None or other._weight is None:
                w = None
            else:
                w = tuple(p + q for p, q in zip(self._weight, other._weight))
        return Polynomial(self.n, out, weight=w if out else _UNSET, _trusted=True)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Polynomial.constant(self.n, other)
        return isinstance(other, Polynomial) and self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self._terms.items())))

    def leading_key(self) -> int:
        if not self._terms:
            raise UndefinedLeadingTerm("zero polynomial has no leading term")
        return max(self._terms)

    def substitute(self, mapping) -> Polynomial:
        """Rename variables: ``mapping(r, c) -> (r', c')`` must be a bijection."""
        out: dict[int, int] = {}
        for k, c in self._terms.items():
            nk = 0
            for (r, cc), e in decode(self.n, k).items():
                nk += e * _var_key(self.n, *mapping(r, cc))
            out[nk] = out.get(nk, 0) + c
        return Polynomial(self.n, out)

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms, reverse=True):
            c = self._terms[k]
            sign = "+" if c > 0 else "-"
            parts.append(f"{sign}{abs(c)}·{monomial_text(self.n, k)}")
        return " ".join(parts)

    @classmethod
    def from_text(cls, n: int, text: str) -> Polynomial:
        text = text.strip()
        if text == "0":
            return cls(n)
        out: dict[int, int] = {}
        for tok in text.split():
            m = re.fullmatch(r"([+-])(\d+)·(.+)", tok)
            if not m:
                raise InvalidParameter(f"malformed term {tok!r}")
            coeff = int(m.group(2)) * (1 if m.group(1) == "+" else -1)
            key = 0
            if m.group(3) != "1":
                for factor in m.group(3).split("*"):
                    fm = re.fullmatch(r"x\[(\d+),(\d+)\](?:\^(\d+))?", factor)
                    if not fm:
                        raise InvalidParameter(f"malformed factor {factor!r}")
                    e = int(fm.group(3) or 1)
                    key += e * _var_key(n, int(fm.group(1)), int(fm.group(2)))
            out[key] = out.get(key, 0) + coeff
        return cls(n, out)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Polynomial(n={self.n}, {self.to_text()})"


def _compute_weight(n: int, terms: Mapping[int, int]):
    w0 = None
    for k in terms:
        w = [0] * (2 * n)
        for (r, c), e in decode(n, k).items():
            w[r - 1] += e
            w[n + c - 1] += e
        w = tuple(w)
        if w0 is None:
            w0 = w
        elif w != w0:
            return None
    return w0


def _perm_sign(p: Sequence[int]) -> int:
    inv = sum(1 for a in range(len(p)) for b in range(a + 1, len(p)) if p[a] > p[b])
    return -1 if inv % 2 else 1


@lru_cache(maxsize=None)
def minor_poly(R: tuple[int, ...], C: tuple[int, ...], n: int | None = None, support: str = "full") -> Polynomial:
    """Determinant of the submatrix on rows R and columns C.

    ``support`` restricts the matrix: ``"upper"`` keeps x[r,c] with r <= c,
    ``"lower"`` keeps r >= c, ``"full"`` keeps everything.
    """
    R, C = tuple(R), tuple(C)
    if len(R) != len(C) or not R:
        raise InvalidParameter(f"minor needs |R| = |C| >= 1, got {R} and {C}")
    if n is None:
        n = max(R + C)
    keep = {"full": lambda r, c: True, "upper": lambda r, c: r <= c, "lower": lambda r, c: r >= c}[support]
    d = len(R)
    terms: dict[int, int] = {}
    for perm in itertools.permutations(range(d)):
        if not all(keep(R[a], C[perm[a]]) for a in range(d)):
            continue
        key = sum(_var_key(n, R[a], C[perm[a]]) for a in range(d))
        terms[key] = terms.get(key, 0) + _perm_sign(perm)
    w = [0] * (2 * n)
    for r in R:
        w[r - 1] += 1
    for c in C:
        w[n + c - 1] += 1
    terms = {k: v for k, v in terms.items() if v}
    return Polynomial(n, terms, weight=tuple(w) if terms else _UNSET, _trusted=True)


def minor_poly_cofactor(R: Sequence[int], C: Sequence[int], n: int) -> Polynomial:
    """Independent route: Laplace expansion along the first row."""
    R, C = tuple(R), tuple(C)
    if len(R) == 1:
        return Polynomial.variable(n, R[0], C[0])
    total = Polynomial(n)
    for a, c in enumerate(C):
        sub = minor_poly_cofactor(R[1:], C[:a] + C[a + 1:], n)
        term = Polynomial.variable(n, R[0], c) * sub
        total = total + (term if a % 2 == 0 else -term)
    return total


def leading_monomial(p: Polynomial) -> tuple[Monomial, int]:
    k = p.leading_key()
    return Monomial(p.n, k), p._terms[k]


# ---------------------------------------------------------------------------
# sparse exact elimination over polynomial spans


def _primitive(terms: dict[int, int], lead: int) -> dict[int, int]:
    g = 0
    for v in terms.values():
        g = math.gcd(g, v)
        if g == 1:
            break
    if terms[lead] < 0:
        g = -g
    if g != 1:
        terms = {k: v // g for k, v in terms.items()}
    return terms


class Echelon:
    """Row-echelon basis of a span of sparse integer vectors.

    Rows are keyed by their leading (largest) key and kept primitive with a
    positive leading coefficient.  Reduction is fraction-free: ``p <- b*p - c*row``
    followed by division by the content, so coefficients stay integral.
    """

    def __init__(self):
        self.rows: dict[int, dict[int, int]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce_leading(self, terms: dict[int, int]) -> dict[int, int]:
        """Reduce until the leading key is not a pivot (or the vector vanishes)."""
        rows = self.rows
        while terms:
            lead = max(terms)
            row = rows.get(lead)
            if row is None:
                return terms
            c, b = terms[lead], row[lead]
            if b == 1:
                new = dict(terms)
                for k, v in row.items():
                    nv = new.get(k, 0) - c * v
                    if nv:
                        new[k] = nv
                    else:
                        del new[k]
            else:
                g = math.gcd(b, c)
                bb, cc = b // g, c // g
                new = {k: v * bb for k, v in terms.items()}
                for k, v in row.items():
                    nv = new.get(k, 0) - cc * v
                    if nv:
                        new[k] = nv
                    else:
                        del new[k]
            terms = new
        return terms

    def add(self, terms: Mapping[int, int]) -> bool:
        rem = self.reduce_leading(dict(terms))
        if not rem:
            return False
        lead = max(rem)
        self.rows[lead] = _primitive(rem, lead)
        return True

    def pivots(self) -> set[int]:
        return set(self.rows)


def _groups(ps: Sequence[Polynomial]) -> list[list[Polynomial]]:
    """Split by bigrading when every input is bihomogeneous; spans then split too."""
    nonzero = [p for p in ps if not p.is_zero()]
    if not nonzero:
        return []
    buckets: dict[tuple, list[Polynomial]] = {}
    for p in nonzero:
        w = p.weight
        if w is None:
            return [nonzero]
        buckets.setdefault(w, []).append(p)
    return [buckets[w] for w in sorted(buckets)]


def _check_universe(ps: Sequence[Polynomial]) -> int | None:
    ns = {p.n for p in ps}
    if len(ns) > 1:
        raise InvalidParameter(f"polynomials over different variable sets: n in {sorted(ns)}")
    return ns.pop() if ns else None


def echelon_of_span(ps: Sequence[Polynomial]) -> list[Echelon]:
    _check_universe(ps)
    out = []
    for group in _groups(ps):
        e = Echelon()
        for p in group:
            e.add(p._terms)
        out.append(e)
    return out


def rank_of_span(ps: Sequence[Polynomial]) -> int:
    """Dimension of the rational span of the given polynomials."""
    return sum(len(e) for e in echelon_of_span(ps))


def pivot_monomials(ps: Sequence[Polynomial]) -> set[Monomial]:
    """Leading monomials of an echelon basis of span(ps).

    This set equals {in(f) : f in span(ps), f != 0}.
    """
    n = _check_universe(ps)
    out: set[Monomial] = set()
    for e in echelon_of_span(ps):
        out.update(Monomial(n, k) for k in e.rows)
    return out


class SpanBasis:
    """A linearly independent list of polynomials prepared for repeated solves.

    When the basis already has pairwise distinct leading monomials with
    coefficient 1 (the case for straight tableaux) no transformation is needed
    and expansion is integral back-substitution.
    """

    def __init__(self, basis: Sequence[Polynomial]):
        self.basis = list(basis)
        self.size = len(self.basis)
        self._rows: dict[int, tuple[dict[int, Fraction | int], dict[int, Fraction | int]]] = {}
        for idx, p in enumerate(self.basis):
            vec: dict[int, Fraction | int] = dict(p._terms)
            combo: dict[int, Fraction | int] = {idx: 1}
            vec, combo = self._reduce(vec, combo, stop_at_new_lead=True)
            if not vec:
                raise InvalidParameter(f"basis element {idx} is linearly dependent on earlier ones")
            lead = max(vec)
            lc = vec[lead]
            if lc != 1:
                vec = {k: Fraction(v) / lc for k, v in vec.items()}
                combo = {k: Fraction(v) / lc for k, v in combo.items()}
            self._rows[lead] = (vec, combo)

    def _reduce(self, vec, combo, stop_at_new_lead: bool):
        rows = self._rows
        while vec:
            lead = max(vec)
            hit = rows.get(lead)
            if hit is None:
                if stop_at_new_lead:
                    return vec, combo
                raise NotInSpan(f"leading monomial {lead} has no pivot")
            row, rcombo = hit
            c = vec[lead]
            vec = dict(vec)
            for k, v in row.items():
                nv = vec.get(k, 0) - c * v
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            combo = dict(combo)
            for k, v in rcombo.items():
                nv = combo.get(k, 0) - c * v
                if nv:
                    combo[k] = nv
                else:
                    combo.pop(k, None)
        return vec, combo

    def express(self, target: Polynomial) -> list[Fraction]:
        vec: dict[int, Fraction | int] = dict(target._terms)
        _, combo = self._reduce(vec, {}, stop_at_new_lead=False)
        # combo holds -(coefficients) because we subtracted from the target
        return [Fraction(-combo.get(i, 0)) for i in range(self.size)]


def express_in_basis(target: Polynomial, basis: Sequence[Polynomial]) -> list[Fraction]:
    """Coefficients c with target = sum c_i basis_i; raises NotInSpan otherwise."""
    return SpanBasis(basis).express(target)


# ---------------------------------------------------------------------------
# dense exact matrices


class ExactMatrix:
    """Dense matrix of ints or Fractions."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[int | Fraction]]):
        self.rows = tuple(tuple(r) for r in rows)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise InvalidParameter("ragged matrix")

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> ExactMatrix:
        return cls([[0] * c for _ in range(r)])

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        if self.ncols != other.nrows:
            raise InvalidParameter("dimension mismatch in product")
        cols = list(zip(*other.rows))
        return ExactMatrix([[sum(a * b for a, b in zip(r, col)) for col in cols] for r in self.rows])

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def vstack(self, other: ExactMatrix) -> ExactMatrix:
        if self.nrows and other.nrows and self.ncols != other.ncols:
            raise InvalidParameter("column mismatch in vstack")
        return ExactMatrix(self.rows + other.rows)

    def rank(self) -> int:
        return exact_rank(self.rows)

    def __repr__(self) -> str:
        return f"ExactMatrix({[list(r) for r in self.rows]})"


def _integer_rows(rows: Sequence[Sequence[int | Fraction]]) -> list[list[int]]:
    out = []
    for r in rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in r])
    return out


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int | None:
    """Fraction-free elimination; returns None if an exact division fails."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][c]
        prow = m[rank]
        for i in range(rank + 1, len(m)):
            row = m[i]
            a = row[c]
            for k in range(c + 1, ncols):
                num = p * row[k] - a * prow[k]
                q, rem = divmod(num, prev)
                if rem:
                    return None
                row[k] = q
            row[c] = 0
        prev = p
        rank += 1
        if rank == len(m):
            break
    return rank


def fraction_rank(rows: Sequence[Sequence[int | Fraction]]) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][c]
        for i in range(rank + 1, len(m)):
            f = m[i][c] / p
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def exact_rank(rows: Sequence[Sequence[int | Fraction]]) -> int:
    """Rank over Q: Bareiss on integer-scaled rows, rational fallback."""
    if not rows:
        return 0
    r = bareiss_rank(_integer_rows(rows))
    return r if r is not None else fraction_rank(rows)


def evaluate_at(p: Polynomial, X: ExactMatrix) -> Fraction | int:
    if X.nrows != p.n or X.ncols != p.n:
        raise InvalidParameter(f"need a {p.n}x{p.n} matrix, got {X.nrows}x{X.ncols}")
    total = 0
    for k, c in p._terms.items():
        v = c
        for (r, cc), e in decode(p.n, k).items():
            v *= X.rows[r - 1][cc - 1] ** e
            if not v:
                break
        total += v
    return total
