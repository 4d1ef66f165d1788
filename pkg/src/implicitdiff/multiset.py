"""Multi-index (multiset) arithmetic over the index set {1, ..., N}.

A :class:`Multiset` stores one non-negative multiplicity per index.  Index
``i`` (1-based, as in the usual notation ``x_1, ..., x_N``) lives at position
``i - 1`` of :attr:`Multiset.mults`.  All counts are Python ints, so factorials
and binomials never overflow.

Two text notations are accepted by :func:`parse_multiset`::

    "1,1,3"      comma list of indices with repetition
    "x1^2 x3"    exponent form

Both denote the multiset {1, 1, 3}.  ``""`` and ``"{}"`` denote the empty one.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple


@dataclass(frozen=True)
class Multiset:
    """Multiplicity vector over the indices 1..N."""

    mults: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.mults, tuple):
            object.__setattr__(self, "mults", tuple(self.mults))
        if not self.mults:
            raise ValueError("a multiset needs at least one index (N >= 1)")
        if any(m < 0 for m in self.mults):
            raise ValueError(f"negative multiplicity in {self.mults}")

    @classmethod
    def empty(cls, n_indices: int) -> Multiset:
        return cls((0,) * n_indices)

    @classmethod
    def from_indices(cls, indices: Iterable[int], n_indices: int) -> Multiset:
        """Build from a list of 1-based indices with repetition."""
        mults = [0] * n_indices
        for i in indices:
            if not 1 <= i <= n_indices:
                raise ValueError(f"index {i} outside 1..{n_indices}")
            mults[i - 1] += 1
        return cls(tuple(mults))

    @classmethod
    def unit(cls, i: int, n_indices: int) -> Multiset:
        return cls.from_indices([i], n_indices)

    @property
    def n_indices(self) -> int:
        return len(self.mults)

    def __len__(self) -> int:
        return sum(self.mults)

    def __iter__(self) -> Iterator[int]:
        """Iterate over the indices with repetition, in increasing order."""
        for i, m in enumerate(self.mults, start=1):
            for _ in range(m):
                yield i

    def __getitem__(self, i: int) -> int:
        """Multiplicity of the 1-based index ``i``."""
        return self.mults[i - 1]

    def __contains__(self, i: object) -> bool:
        return isinstance(i, int) and 1 <= i <= self.n_indices and self.mults[i - 1] > 0

    def __add__(self, other: Multiset) -> Multiset:
        return msum(self, other)

    def __sub__(self, other: Multiset) -> Multiset:
        return mdiff(self, other)

    def __lt__(self, other: Multiset) -> bool:
        return self.sort_key() < other.sort_key()

    def plus(self, i: int) -> Multiset:
        """The multiset ``I + i``."""
        mults = list(self.mults)
        mults[i - 1] += 1
        return Multiset(tuple(mults))

    def minus(self, i: int) -> Multiset:
        """The multiset ``I \\ i``; ``i`` must be present."""
        if self.mults[i - 1] == 0:
            raise ValueError(f"index {i} not in {self}")
        mults = list(self.mults)
        mults[i - 1] -= 1
        return Multiset(tuple(mults))

    def is_set(self) -> bool:
        return all(m <= 1 for m in self.mults)

    def sort_key(self) -> tuple:
        return (len(self), self.mults)

    def permuted(self, perm: tuple[int, ...]) -> Multiset:
        """Relabel index ``i`` as ``perm[i - 1]`` (a permutation of 1..N)."""
        mults = [0] * self.n_indices
        for i, m in enumerate(self.mults, start=1):
            mults[perm[i - 1] - 1] += m
        return Multiset(tuple(mults))

    def __str__(self) -> str:
        return format_multiset(self)

    def __repr__(self) -> str:
        return f"Multiset({format_multiset(self)!r}, N={self.n_indices})"


class PartVec(NamedTuple):
    """A pair ``[J; r]``: a multiset of x-indices plus a count of y-derivatives."""

    J: Multiset
    r: int

    def weight(self) -> int:
        return len(self.J) + self.r

    def sort_key(self) -> tuple:
        return (len(self.J) + self.r, self.r, self.J.sort_key())


def _check_dims(a: Multiset, b: Multiset) -> None:
    if a.n_indices != b.n_indices:
        raise ValueError(f"dimension mismatch: N={a.n_indices} vs N={b.n_indices}")


def size(m: Multiset) -> int:
    return len(m)


def msum(a: Multiset, b: Multiset) -> Multiset:
    _check_dims(a, b)
    return Multiset(tuple(x + y for x, y in zip(a.mults, b.mults)))


def contains(a: Multiset, b: Multiset) -> bool:
    """True iff ``b`` is contained in ``a``."""
    _check_dims(a, b)
    return all(y <= x for x, y in zip(a.mults, b.mults))


def mdiff(a: Multiset, b: Multiset) -> Multiset:
    if not contains(a, b):
        raise ValueError(f"{b} is not contained in {a}")
    return Multiset(tuple(x - y for x, y in zip(a.mults, b.mults)))


def mbinom(J: Multiset, K: Multiset) -> int:
    """Product of ordinary binomials; zero when ``K`` is not inside ``J``."""
    _check_dims(J, K)
    out = 1
    for eta, kappa in zip(J.mults, K.mults):
        out *= math.comb(eta, kappa)
    return out


def mfact(J: Multiset) -> int:
    out = 1
    for eta in J.mults:
        out *= math.factorial(eta)
    return out


def tbinom(t: int, K: Multiset) -> int:
    """Multinomial ``t! / (K! (t - |K|)!)``, zero unless ``t >= |K|``."""
    k = len(K)
    if t < k:
        return 0
    return math.factorial(t) // (mfact(K) * math.factorial(t - k))


def multinomial(total: int, parts: Iterable[int]) -> int:
    """``total! / (prod parts! * (total - sum parts)!)``; zero if the parts overflow."""
    parts = list(parts)
    rest = total - sum(parts)
    if rest < 0 or any(p < 0 for p in parts):
        return 0
    out = math.factorial(total) // math.factorial(rest)
    for p in parts:
        out //= math.factorial(p)
    return out


def submultisets(J: Multiset) -> list[Multiset]:
    """All K contained in J, sorted by (size, multiplicities)."""
    subs = [Multiset(c) for c in itertools.product(*(range(m + 1) for m in J.mults))]
    subs.sort(key=Multiset.sort_key)
    return subs


def multisets_of_size(n: int, n_indices: int) -> list[Multiset]:
    """Every multiset of size ``n`` over 1..N, in canonical order."""
    out = [
        Multiset.from_indices(c, n_indices)
        for c in itertools.combinations_with_replacement(range(1, n_indices + 1), n)
    ]
    out.sort(key=Multiset.sort_key)
    return out


def index_permutations_fixing(I: Multiset) -> list[tuple[int, ...]]:
    """Permutations of 1..N (as tuples ``perm[i-1] = image of i``) that fix I."""
    n = I.n_indices
    return [
        p
        for p in itertools.permutations(range(1, n + 1))
        if I.permuted(p) == I
    ]


_EXP_TOKEN = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_multiset(text: str, n_indices: int | None = None) -> Multiset:
    """Parse comma-list (``"1,1,3"``) or exponent (``"x1^2 x3"``) notation.

    When ``n_indices`` is omitted it is taken as the largest index mentioned
    (at least 1).
    """
    text = text.strip()
    indices: list[int] = []
    if text in ("", "{}"):
        pass
    elif "x" in text:
        for tok in text.replace("*", " ").split():
            match = _EXP_TOKEN.match(tok)
            if match is None:
                raise ValueError(f"bad multiset token {tok!r} in {text!r}")
            power = int(match.group(2)) if match.group(2) else 1
            indices.extend([int(match.group(1))] * power)
    else:
        try:
            indices = [int(tok) for tok in text.split(",")]
        except ValueError:
            raise ValueError(f"bad multiset notation {text!r}") from None
    if n_indices is None:
        n_indices = max(indices, default=1)
    return Multiset.from_indices(indices, n_indices)


def format_multiset(m: Multiset) -> str:
    """Comma-list notation; the empty multiset prints as ``{}``."""
    if len(m) == 0:
        return "{}"
    return ",".join(str(i) for i in m)
