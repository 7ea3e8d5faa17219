"""Column sets, tableaux of shape (j, m), straightness, and the involution.

A tableau is a stack of rows.  Row ``(block, R)`` stands for the minor with row
set ``R`` and column set ``K^(block)``; rows are listed bottom to top and blocks
weakly increase upward.  The *opposite* side of a shape is what the involution
produces: block order reversed, every set replaced by its reflection
``x -> n+1-x``, and dominance flipped (rows dominate their column set).

Straightness is tested on the rendered grid.  For two occupied cells in the same
column holding a strict descent, one of the two rows must carry a weakly larger
witness one column to the left.  ``reading="top"`` (the default) asks it of the
upper row; ``reading="bottom"`` asks it of the lower row.  Only the top reading
yields as many straight tableaux as the rank of the polynomial span.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

from .errors import GridParseError, InvalidParameter
from .weyl import (
    IndexSet,
    Word,
    dominates,
    is_reduced,
    is_subword,
    longest_word,
    prefix_perms,
    tilde,
)

READINGS = ("top", "bottom")

Row = tuple[int, IndexSet]


def column_sets(j: Word) -> list[IndexSet]:
    """K_j^(r): the r-th partial product applied to {1..j_r}; empty when j_r = 0."""
    i = longest_word(j.n)
    if not is_subword(j, i):
        raise InvalidParameter(f"{j} is not a subword of {i}")
    out = []
    for a, perm in zip(j.letters, prefix_perms(j)):
        out.append(perm.apply_to_set(range(1, a + 1)) if a else ())
    return out


@lru_cache(maxsize=None)
def dominated_sets(K: IndexSet, n: int, below: bool = True) -> tuple[IndexSet, ...]:
    """All R with |R| = |K| and R <= K componentwise (or R >= K when below=False)."""
    out = []
    for R in itertools.combinations(range(1, n + 1), len(K)):
        if (dominates(K, R) if below else dominates(R, K)):
            out.append(R)
    return tuple(out)


def mask_mult(j: Word, mult: Sequence[int]) -> tuple[int, ...]:
    """Zero out multiplicities on omitted letters."""
    return tuple(0 if a == 0 else int(x) for a, x in zip(j.letters, mult))


@dataclass(frozen=True)
class Shape:
    word: Word
    mult: tuple[int, ...]
    opposite: bool = False

    def __post_init__(self):
        mult = tuple(int(x) for x in self.mult)
        object.__setattr__(self, "mult", mult)
        if len(mult) != len(self.word):
            raise InvalidParameter(f"multiplicity length {len(mult)} != word length {len(self.word)}")
        if any(x < 0 for x in mult):
            raise InvalidParameter(f"multiplicities must be nonnegative: {mult}")
        for r, (a, x) in enumerate(zip(self.word.letters, mult), start=1):
            if a == 0 and x:
                raise InvalidParameter(f"m_{r} = {x} but letter {r} is omitted; set it to 0")
        if self.word.n >= 2:
            if not is_subword(self.word, longest_word(self.word.n)):
                raise InvalidParameter(f"{self.word} is not a subword of {longest_word(self.word.n)}")
        if not is_reduced(self.word):
            raise InvalidParameter(f"{self.word} is not reduced")

    @classmethod
    def of(cls, n: int, word: Sequence[int] | None = None, mult: Sequence[int] | None = None) -> Shape:
        w = longest_word(n) if word is None else Word(n, tuple(word))
        m = (1,) * len(w) if mult is None else tuple(mult)
        return cls(w, m)

    @property
    def n(self) -> int:
        return self.word.n

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def support(self) -> str:
        return "lower" if self.opposite else "upper"

    @cached_property
    def blocks(self) -> tuple[tuple[IndexSet, int], ...]:
        """(column set, multiplicity) per block in bottom-to-top display order."""
        ks = column_sets(self.word)
        pairs = list(zip(ks, self.mult))
        if self.opposite:
            return tuple((tilde(K, self.n), m) for K, m in reversed(pairs))
        return tuple(pairs)

    @cached_property
    def row_blocks(self) -> tuple[int, ...]:
        """Block index (1-based) of each grid row, bottom to top."""
        return tuple(s for s, (_, m) in enumerate(self.blocks, start=1) for _ in range(m))

    def options(self, s: int) -> tuple[IndexSet, ...]:
        K = self.blocks[s - 1][0]
        return dominated_sets(K, self.n, below=not self.opposite)

    def admissible(self, s: int, R: IndexSet) -> bool:
        K = self.blocks[s - 1][0]
        if len(R) != len(K):
            return False
        return dominates(R, K) if self.opposite else dominates(K, R)

    def scaled(self, p: int) -> Shape:
        if p < 0:
            raise InvalidParameter(f"power must be nonnegative, got {p}")
        return Shape(self.word, tuple(p * x for x in self.mult), self.opposite)

    def flipped(self) -> Shape:
        return Shape(self.word, self.mult, not self.opposite)

    @property
    def height(self) -> int:
        return sum(self.mult)

    def ordered_count(self) -> int:
        out = 1
        for s, (_, m) in enumerate(self.blocks, start=1):
            if m:
                out *= len(self.options(s)) ** m
        return out

    def header(self) -> str:
        text = f"shape: j={self.word}; m={','.join(map(str, self.mult))}"
        return text + "; side=opposite" if self.opposite else text

    def __str__(self) -> str:
        return self.header()[len("shape: "):]


@dataclass(frozen=True)
class Tableau:
    shape: Shape
    rows: tuple[Row, ...]

    def __post_init__(self):
        rows = tuple((int(s), tuple(R)) for s, R in self.rows)
        object.__setattr__(self, "rows", rows)
        if tuple(s for s, _ in rows) != self.shape.row_blocks:
            raise InvalidParameter(
                f"row blocks {[s for s, _ in rows]} do not match shape layout {list(self.shape.row_blocks)}"
            )
        for s, R in rows:
            if any(a >= b for a, b in zip(R, R[1:])):
                raise InvalidParameter(f"row {R} is not strictly increasing")
            if R and (R[0] < 1 or R[-1] > self.shape.n):
                raise InvalidParameter(f"row {R} has entries outside 1..{self.shape.n}")
            if not self.shape.admissible(s, R):
                K = self.shape.blocks[s - 1][0]
                raise InvalidParameter(f"row {R} is not admissible for column set {K}")

    @classmethod
    def _trusted(cls, shape: Shape, rows: tuple[Row, ...]) -> Tableau:
        t = object.__new__(cls)
        object.__setattr__(t, "shape", shape)
        object.__setattr__(t, "rows", rows)
        return t

    @property
    def n(self) -> int:
        return self.shape.n

    def pairs(self) -> list[tuple[IndexSet, IndexSet]]:
        """(column set, row set) for every row, bottom to top."""
        blocks = self.shape.blocks
        return [(blocks[s - 1][0], R) for s, R in self.rows]

    def grid(self) -> list[dict[int, int]]:
        return [dict(zip(K, R)) for K, R in self.pairs()]

    @property
    def class_key(self) -> tuple[tuple[IndexSet, ...], ...]:
        """Row multiset per block: the data a product of commuting minors sees."""
        return class_key(self.shape, self.rows)

    def __str__(self) -> str:
        return render(self)


def class_key(shape: Shape, rows: Sequence[Row]) -> tuple[tuple[IndexSet, ...], ...]:
    per: list[list[IndexSet]] = [[] for _ in shape.blocks]
    for s, R in rows:
        per[s - 1].append(R)
    return tuple(tuple(sorted(x)) for x in per)


def enumerate_tableaux(shape: Shape) -> Iterator[Tableau]:
    """Every ordered filling of the shape (within-block orderings included)."""
    choices = [shape.options(s) for s in shape.row_blocks]
    for combo in itertools.product(*choices):
        yield Tableau._trusted(shape, tuple(zip(shape.row_blocks, combo)))


def enumerate_classes(shape: Shape) -> Iterator[tuple[tuple[IndexSet, ...], ...]]:
    """Per-block row multisets, i.e. the distinct products of minors."""
    per_block = [
        list(itertools.combinations_with_replacement(shape.options(s), m)) if m else [()]
        for s, (_, m) in enumerate(shape.blocks, start=1)
    ]
    return itertools.product(*per_block)


def rows_of_class(key: Sequence[Sequence[IndexSet]]) -> tuple[Row, ...]:
    """Lexicographically smallest arrangement of a class."""
    return tuple((s, R) for s, block in enumerate(key, start=1) for R in block)


def _pair_ok(a: dict[int, int], b: dict[int, int]) -> bool:
    """Row a may exceed row b in a column only with a weakly larger entry of a to its left."""
    for k, x in a.items():
        y = b.get(k)
        if y is not None and x > y:
            left = a.get(k - 1)
            if left is None or left < y:
                return False
    return True


def _check_reading(reading: str):
    if reading not in READINGS:
        raise InvalidParameter(f"reading must be one of {READINGS}, got {reading!r}")


def is_straight(t: Tableau, reading: str = "top") -> bool:
    _check_reading(reading)
    if t.shape.opposite:
        return is_straight(involution(t), reading)
    grid = t.grid()
    for lo in range(len(grid)):
        for hi in range(lo + 1, len(grid)):
            ok = _pair_ok(grid[hi], grid[lo]) if reading == "top" else _pair_ok(grid[lo], grid[hi])
            if not ok:
                return False
    return True


def straight_arrangements(shape: Shape, reading: str = "top") -> dict[tuple, list[tuple[Row, ...]]]:
    """Straight orderings grouped by class, found by depth-first search.

    Rows are placed bottom to top and each new row is checked against every row
    below it, so non-straight prefixes are pruned early.
    """
    _check_reading(reading)
    if shape.opposite:
        primal = straight_arrangements(shape.flipped(), reading)
        out: dict[tuple, list[tuple[Row, ...]]] = {}
        for arrs in primal.values():
            for rows in arrs:
                t = involution(Tableau._trusted(shape.flipped(), rows))
                out.setdefault(t.class_key, []).append(t.rows)
        return out

    layout = shape.row_blocks
    cols = [shape.blocks[s - 1][0] for s in layout]
    opts = [shape.options(s) for s in layout]
    top = reading == "top"
    found: dict[tuple, list[tuple[Row, ...]]] = {}
    placed: list[IndexSet] = []
    cells: list[dict[int, int]] = []

    def dfs(pos: int):
        if pos == len(layout):
            rows = tuple(zip(layout, placed))
            found.setdefault(class_key(shape, rows), []).append(rows)
            return
        K = cols[pos]
        for R in opts[pos]:
            g = dict(zip(K, R))
            if top:
                ok = all(_pair_ok(g, c) for c in cells)
            else:
                ok = all(_pair_ok(c, g) for c in cells)
            if ok:
                placed.append(R)
                cells.append(g)
                dfs(pos + 1)
                placed.pop()
                cells.pop()

    dfs(0)
    return found


def enumerate_straight(shape: Shape, reading: str = "top") -> list[Tableau]:
    """One straight tableau per class that has one, in enumeration order."""
    return [Tableau._trusted(shape, arrs[0]) for arrs in straight_arrangements(shape, reading).values()]


def canonical(t: Tableau, reading: str = "top") -> Tableau:
    """Straight arrangement of t's class when there is one, else the sorted one."""
    key = t.class_key
    arrs = straight_arrangements(t.shape, reading).get(key)
    if arrs:
        return Tableau._trusted(t.shape, arrs[0])
    return Tableau._trusted(t.shape, rows_of_class(key))


def involution(t: Tableau) -> Tableau:
    """Rotate the grid by 180 degrees and reflect entries r -> n+1-r."""
    n = t.n
    ell = len(t.shape.blocks)
    rows = tuple((ell + 1 - s, tilde(R, n)) for s, R in reversed(t.rows))
    return Tableau._trusted(t.shape.flipped(), rows)


def render_rows(n: int, pairs: Sequence[tuple[IndexSet, IndexSet]]) -> list[str]:
    """Grid lines, top row first, for (column set, row set) pairs listed bottom-up."""
    lines = []
    for K, R in reversed(list(pairs)):
        cells = ["."] * n
        for k, r in zip(K, R):
            cells[k - 1] = str(r)
        lines.append(" ".join(cells))
    return lines


def render(t: Tableau) -> str:
    return "\n".join([t.shape.header()] + render_rows(t.n, t.pairs()))


_HEADER = re.compile(r"shape:\s*j=([0-9,\s]*);\s*m=([0-9,\s]*)(;\s*side=(opposite|primal))?\s*$")


def _n_from_length(ell: int) -> int:
    n = 2
    while n * (n - 1) // 2 < ell:
        n += 1
    if n * (n - 1) // 2 != ell:
        raise GridParseError(f"word length {ell} is not n(n-1)/2 for any n")
    return n


def parse(text: str) -> Tableau:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise GridParseError("empty input: expected a 'shape:' header line")
    m = _HEADER.match(lines[0])
    if not m:
        raise GridParseError(f"line 1: malformed header {lines[0]!r}")
    letters = [int(x) for x in m.group(1).replace(" ", "").split(",") if x]
    mult = [int(x) for x in m.group(2).replace(" ", "").split(",") if x]
    n = _n_from_length(len(letters))
    try:
        shape = Shape(Word(n, tuple(letters)), tuple(mult), m.group(4) == "opposite")
    except InvalidParameter as exc:
        raise GridParseError(f"line 1: {exc}") from exc
    body = lines[1:]
    if len(body) != shape.height:
        raise GridParseError(f"expected {shape.height} grid rows, found {len(body)}")
    rows: list[Row] = []
    for pos, s in enumerate(shape.row_blocks):
        lineno = 1 + len(body) - pos
        cells = body[len(body) - 1 - pos].split()
        if len(cells) != n:
            raise GridParseError(f"line {lineno}: expected {n} cells, found {len(cells)}")
        K = shape.blocks[s - 1][0]
        occupied = tuple(k for k, c in enumerate(cells, start=1) if c != ".")
        if occupied != K:
            raise GridParseError(f"line {lineno}: occupied columns {occupied} differ from column set {K}")
        try:
            R = tuple(int(cells[k - 1]) for k in K)
        except ValueError as exc:
            raise GridParseError(f"line {lineno}: non-integer entry") from exc
        if any(not 1 <= r <= n for r in R):
            raise GridParseError(f"line {lineno}: entry outside 1..{n}")
        rows.append((s, R))
    try:
        return Tableau(shape, tuple(rows))
    except InvalidParameter as exc:
        raise GridParseError(str(exc)) from exc
