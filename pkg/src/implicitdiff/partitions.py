"""Constrained partitions of ``[I; h-1]`` indexing the implicit-derivative formulas.

An :class:`Alpha` is a multiplicity function ``m_{J,r}`` on pairs ``[J; r]``
with ``|J| + r >= 2``, such that the parts sum to ``I`` and
``sum (r - 1) m_{J,r} = -1``.  A :class:`Gamma` is the same kind of object
for the raw-derivative formula, where singleton parts ``[{i}; 0]`` (the
first derivatives ``f_i``) are also allowed.

Both are stored sparsely as a sorted tuple of ``(PartVec, multiplicity)``
pairs, so they hash and compare as values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .multiset import Multiset, PartVec, format_multiset, parse_multiset, submultisets


@dataclass(frozen=True)
class _PartCounts:
    parts: tuple[tuple[PartVec, int], ...]

    def __post_init__(self):
        merged: dict[PartVec, int] = {}
        for pv, m in self.parts:
            pv = PartVec(pv[0], int(pv[1]))
            merged[pv] = merged.get(pv, 0) + m
        if any(m < 0 for m in merged.values()):
            raise ValueError("negative part multiplicity")
        items = tuple(
            sorted(((pv, m) for pv, m in merged.items() if m), key=lambda it: it[0].sort_key())
        )
        object.__setattr__(self, "parts", items)
        self._validate_keys()

    def _validate_keys(self):
        raise NotImplementedError

    @classmethod
    def from_mapping(cls, mapping: Mapping[PartVec, int]):
        return cls(tuple(mapping.items()))

    def as_dict(self) -> dict[PartVec, int]:
        return dict(self.parts)

    def __getitem__(self, pv: tuple[Multiset, int]) -> int:
        for key, m in self.parts:
            if key == pv:
                return m
        return 0

    def __iter__(self):
        return iter(self.parts)

    @property
    def n_indices(self) -> int:
        return self.parts[0][0].J.n_indices

    def num_parts(self) -> int:
        return sum(m for _, m in self.parts)

    def total(self) -> Multiset:
        """The multiset sum ``sum m_{J,r} J``."""
        mults = [0] * self.n_indices
        for (J, _), m in self.parts:
            for i, eta in enumerate(J.mults):
                mults[i] += m * eta
        return Multiset(tuple(mults))

    def y_total(self) -> int:
        """``sum r m_{J,r}``."""
        return sum(pv.r * m for pv, m in self.parts)

    def excess(self) -> int:
        """``sum (r - 1) m_{J,r}``; equals -1 for a valid element."""
        return sum((pv.r - 1) * m for pv, m in self.parts)

    def sort_key(self) -> tuple:
        return (self.num_parts(), tuple((pv.sort_key(), m) for pv, m in self.parts))

    def permuted(self, perm: tuple[int, ...]):
        return type(self)(tuple((PartVec(pv.J.permuted(perm), pv.r), m) for pv, m in self.parts))

    def shape(self) -> tuple:
        """Label-free signature: sorted ``(|J|, r, m)`` triples."""
        return tuple(sorted((len(pv.J), pv.r, m) for pv, m in self.parts))

    def to_records(self) -> list[dict]:
        return [{"J": format_multiset(pv.J), "r": pv.r, "m": m} for pv, m in self.parts]

    @classmethod
    def from_records(cls, records: Iterable[Mapping], n_indices: int):
        return cls(
            tuple(
                (PartVec(parse_multiset(rec["J"], n_indices), int(rec["r"])), int(rec["m"]))
                for rec in records
            )
        )

    def __str__(self) -> str:
        body = ", ".join(f"[{format_multiset(pv.J)};{pv.r}]^{m}" for pv, m in self.parts)
        return "{" + body + "}"


class Alpha(_PartCounts):
    """An element of ``A_I``: every part has ``|J| + r >= 2``."""

    def _validate_keys(self):
        if not self.parts:
            raise ValueError("an element of A_I has at least one part")
        for pv, _ in self.parts:
            if pv.weight() < 2:
                raise ValueError(f"part [{pv.J};{pv.r}] has |J|+r < 2")

    @property
    def h(self) -> int:
        return self.num_parts()

    def is_valid_for(self, I: Multiset) -> bool:
        return self.total() == I and self.excess() == -1

    def to_gamma(self) -> Gamma:
        return Gamma(self.parts)


class Gamma(_PartCounts):
    """An element of ``B_I``; singleton parts ``[{i}; 0]`` are allowed."""

    def _validate_keys(self):
        if not self.parts:
            raise ValueError("an element of B_I has at least one part")
        for pv, _ in self.parts:
            if len(pv.J) == 0 and pv.r <= 1:
                raise ValueError("parts [{};0] and [{};1] are not allowed")

    @property
    def g(self) -> int:
        return self.num_parts()

    def is_valid_for(self, I: Multiset) -> bool:
        return self.total() == I and self.excess() == -1

    def singleton_counts(self) -> tuple[int, ...]:
        """``(s_{1,0}, ..., s_{N,0})``."""
        counts = [0] * self.n_indices
        for pv, m in self.parts:
            if pv.r == 0 and len(pv.J) == 1:
                counts[next(iter(pv.J)) - 1] += m
        return tuple(counts)

    def heavy_parts(self) -> tuple[tuple[PartVec, int], ...]:
        """Parts with ``|H| + t >= 2``."""
        return tuple((pv, m) for pv, m in self.parts if pv.weight() >= 2)

    def to_alpha(self) -> Alpha:
        if any(pv.weight() < 2 for pv, _ in self.parts):
            raise ValueError(f"{self} has singleton parts and is not in A_I")
        return Alpha(self.parts)


@dataclass(frozen=True)
class TildeAlpha:
    """An element of ``A~_I``: an Alpha completed by the count of ``[{}; 1]`` parts."""

    alpha: Alpha
    m_empty_1: int

    def num_parts(self) -> int:
        return self.alpha.h + self.m_empty_1

    def y_total(self) -> int:
        return self.alpha.y_total() + self.m_empty_1


def to_tilde(a: Alpha, I: Multiset) -> TildeAlpha:
    if not a.is_valid_for(I):
        raise ValueError(f"{a} is not an element of A_I for I={I}")
    fill = len(I) - 1 - a.h
    if fill < 0:
        raise ValueError(f"{a} has too many parts for |I|={len(I)}")
    return TildeAlpha(a, fill)


def from_tilde(ta: TildeAlpha) -> Alpha:
    return ta.alpha


def _search(I: Multiset, candidates: list[PartVec], singleton_ok: bool) -> list[tuple]:
    """Backtracking over non-increasing candidate positions.

    Each part is picked at a position ``>=`` the previous one, so every
    multiset of parts is produced exactly once.  The running excess
    ``sum (r-1) m`` must finish at -1; since only parts with ``r = 0`` lower
    it, and each of those consumes at least 2 (or 1 with singletons) of the
    remaining budget, the search is cut as soon as -1 is out of reach.
    """
    found = []
    chosen: list[int] = []
    min_cost = 1 if singleton_ok else 2
    cands = [(pv.J.mults, len(pv.J), pv.r - 1) for pv in candidates]
    dims = range(I.n_indices)

    def rec(start: int, remaining: tuple[int, ...], left: int, excess: int):
        if left == 0 and excess == -1:
            found.append(tuple(candidates[c] for c in chosen))
            return
        for pos in range(start, len(cands)):
            mults, k, dr = cands[pos]
            new_left = left - k
            new_excess = excess + dr
            if new_left < 0 or new_excess - new_left // min_cost > -1:
                continue
            if any(mults[i] > remaining[i] for i in dims):
                continue
            chosen.append(pos)
            rec(pos, tuple(remaining[i] - mults[i] for i in dims), new_left, new_excess)
            chosen.pop()

    rec(0, I.mults, len(I), 0)
    return found


def _collect(raw: list[tuple], cls):
    out = []
    for parts in raw:
        counts: dict[PartVec, int] = {}
        for pv in parts:
            counts[pv] = counts.get(pv, 0) + 1
        out.append(cls.from_mapping(counts))
    out.sort(key=lambda x: x.sort_key())
    return out


def enumerate_A(I: Multiset) -> list[Alpha]:
    """All of ``A_I`` in canonical order."""
    n = len(I)
    if n < 2:
        raise ValueError(f"A_I needs |I| >= 2, got |I|={n}")
    candidates = [
        PartVec(J, r)
        for J in submultisets(I)
        for r in range(0, n - 1)
        if len(J) + r >= 2
    ]
    candidates.sort(key=PartVec.sort_key)
    return _collect(_search(I, candidates, singleton_ok=False), Alpha)


def enumerate_A_h(I: Multiset, h: int) -> list[Alpha]:
    n = len(I)
    if n < 2:
        raise ValueError(f"A_I needs |I| >= 2, got |I|={n}")
    if not 1 <= h <= n - 1:
        raise ValueError(f"h={h} outside 1..{n - 1}")
    return [a for a in enumerate_A(I) if a.h == h]


def enumerate_B(I: Multiset) -> list[Gamma]:
    """All of ``B_I`` in canonical order."""
    n = len(I)
    if n < 1:
        raise ValueError("B_I is empty for the empty multiset")
    candidates = [
        PartVec(H, t)
        for H in submultisets(I)
        for t in range(0, 2 * n - 1)
        if not (len(H) == 0 and t <= 1)
    ]
    candidates.sort(key=PartVec.sort_key)
    return _collect(_search(I, candidates, singleton_ok=True), Gamma)


def enumerate_B_g(I: Multiset, g: int) -> list[Gamma]:
    n = len(I)
    if n < 1:
        raise ValueError("B_I is empty for the empty multiset")
    if not 1 <= g <= 2 * n - 1:
        raise ValueError(f"g={g} outside 1..{2 * n - 1}")
    return [c for c in enumerate_B(I) if c.g == g]
