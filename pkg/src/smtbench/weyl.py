"""Permutations, words in simple reflections, and the Bruhat order on S_n.

Permutations are stored in one-line notation ``(w(1), ..., w(n))``.  A word
``(a_1, ..., a_l)`` denotes the product ``s_{a_1} s_{a_2} ... s_{a_l}`` composed
as functions, so the rightmost letter acts first.  The letter ``0`` stands for
an omitted reflection (the identity); subwords of a fixed word keep their full
length and carry zeros in the omitted slots.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import InvalidParameter

IndexSet = tuple[int, ...]


def index_set(elems: Iterable[int], n: int | None = None) -> IndexSet:
    """Validate and return a strictly increasing tuple of positive integers."""
    t = tuple(int(x) for x in elems)
    if any(a >= b for a, b in zip(t, t[1:])):
        raise InvalidParameter(f"index set must be strictly increasing: {t}")
    if t and t[0] < 1:
        raise InvalidParameter(f"index set entries must be >= 1: {t}")
    if n is not None and t and t[-1] > n:
        raise InvalidParameter(f"index set entries must be <= {n}: {t}")
    return t


def tilde(elems: Sequence[int], n: int) -> IndexSet:
    """Reflect a subset of 1..n through x -> n+1-x (result sorted)."""
    return tuple(sorted(n + 1 - x for x in elems))


@dataclass(frozen=True, order=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(x) for x in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise InvalidParameter(f"not a permutation of 1..{len(imgs)}: {imgs}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def longest(cls, n: int) -> Permutation:
        return cls(tuple(range(n, 0, -1)))

    @classmethod
    def simple(cls, k: int, n: int) -> Permutation:
        if not 1 <= k < n:
            raise InvalidParameter(f"simple reflection s_{k} undefined for n={n}")
        imgs = list(range(1, n + 1))
        imgs[k - 1], imgs[k] = imgs[k], imgs[k - 1]
        return cls(tuple(imgs))

    @classmethod
    def parse(cls, text: str) -> Permutation:
        body = text.strip()
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1]
        try:
            return cls(tuple(int(x) for x in body.replace(" ", "").split(",") if x))
        except ValueError as exc:
            raise InvalidParameter(f"cannot parse permutation {text!r}") from exc

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: Permutation) -> Permutation:
        """Composition as functions: ``(self * other)(x) = self(other(x))``."""
        if self.n != other.n:
            raise InvalidParameter("cannot compose permutations of different size")
        return Permutation(tuple(self.images[y - 1] for y in other.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, y in enumerate(self.images, start=1):
            inv[y - 1] = i
        return Permutation(tuple(inv))

    def length(self) -> int:
        """Number of inversions."""
        w = self.images
        return sum(1 for a in range(len(w)) for b in range(a + 1, len(w)) if w[a] > w[b])

    def apply_to_set(self, elems: Iterable[int]) -> IndexSet:
        return tuple(sorted(self(x) for x in elems))

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.images)) + "]"


@dataclass(frozen=True)
class Word:
    n: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter(f"board size must be positive, got {self.n}")
        letters = tuple(int(a) for a in self.letters)
        for a in letters:
            if not 0 <= a < self.n:
                raise InvalidParameter(f"letter {a} out of range 0..{self.n - 1}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str, n: int) -> Word:
        try:
            letters = tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
        except ValueError as exc:
            raise InvalidParameter(f"cannot parse word {text!r}") from exc
        return cls(n, letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, r: int) -> int:
        return self.letters[r]

    def nonzero_count(self) -> int:
        return sum(1 for a in self.letters if a)

    def __str__(self) -> str:
        return ",".join(map(str, self.letters))


def longest_word(n: int) -> Word:
    """The fixed reduced word (1)(2,1)(3,2,1)...(n-1,...,1) of the longest element."""
    if n < 2:
        raise InvalidParameter(f"longest_word needs n >= 2, got {n}")
    letters: list[int] = []
    for k in range(1, n):
        letters.extend(range(k, 0, -1))
    return Word(n, tuple(letters))


def prefix_perms(j: Word) -> list[Permutation]:
    """Partial products s_{j_1}...s_{j_r} for r = 1..len(j)."""
    out = []
    cur = Permutation.identity(j.n)
    for a in j.letters:
        if a:
            cur = cur * Permutation.simple(a, j.n)
        out.append(cur)
    return out


def word_to_perm(j: Word) -> Permutation:
    cur = Permutation.identity(j.n)
    for a in j.letters:
        if a:
            cur = cur * Permutation.simple(a, j.n)
    return cur


def is_reduced(j: Word) -> bool:
    return j.nonzero_count() == word_to_perm(j).length()


def uparrow(w: Permutation, d: int) -> IndexSet:
    """Sorted first-d images {w(1), ..., w(d)}."""
    if not 1 <= d <= w.n:
        raise InvalidParameter(f"d={d} out of range 1..{w.n}")
    return tuple(sorted(w.images[:d]))


def dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    """Component-wise comparison a_i >= b_i of two equal-size sorted sets."""
    if len(a) != len(b):
        raise InvalidParameter(f"size mismatch: {tuple(a)} vs {tuple(b)}")
    return all(x >= y for x, y in zip(a, b))


def bruhat_leq(w2: Permutation, w1: Permutation) -> bool:
    """True iff w2 <= w1 in the Bruhat-Chevalley order."""
    if w1.n != w2.n:
        raise InvalidParameter("permutations of different size")
    return all(dominates(uparrow(w1, d), uparrow(w2, d)) for d in range(1, w1.n))


def is_subword(j: Word, i: Word) -> bool:
    if len(j) != len(i):
        raise InvalidParameter(f"length mismatch: {len(j)} vs {len(i)}")
    return all(a == b or a == 0 for a, b in zip(j.letters, i.letters))


def subwords(i: Word, reduced_only: bool = True) -> Iterator[Word]:
    """All subwords of i in the zero-padded convention."""
    for mask in itertools.product((0, 1), repeat=len(i)):
        j = Word(i.n, tuple(a if keep else 0 for a, keep in zip(i.letters, mask)))
        if not reduced_only or is_reduced(j):
            yield j


def all_permutations(n: int) -> list[Permutation]:
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]
