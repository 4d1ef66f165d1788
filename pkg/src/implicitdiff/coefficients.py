"""Combinatorial coefficients of the implicit-derivative formulas.

The closed forms are factorial quotients::

    C_alpha = (sum r m)! * I! / prod( r!^m * m! * J!^m )
    D_gamma = (sum t s)! * I! / prod( t!^s * s! * H!^s )

with signed versions ``(-1)^h C_alpha`` and ``(-1)^g D_gamma``.  Besides the
closed forms this module carries three independent routes to the same
numbers: the level-by-level recursion obtained by differentiating once more,
the unsigned four-term identity behind it, and a brute-force count of ball
placements into identical boxes.
"""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .multiset import Multiset, PartVec, mfact
from .partitions import Alpha, Gamma, _PartCounts, enumerate_A


def _exact_div(num: int, den: int) -> int:
    q, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"{num} is not divisible by {den}")
    return q


def _factorial_quotient(parts: _PartCounts, I: Multiset) -> int:
    den = 1
    for (J, r), m in parts:
        den *= math.factorial(r) ** m * math.factorial(m) * mfact(J) ** m
    return _exact_div(math.factorial(parts.y_total()) * mfact(I), den)


def C_alpha(a: Alpha, I: Multiset) -> int:
    if not a.is_valid_for(I):
        raise ValueError(f"{a} is not an element of A_I for I={I}")
    return _factorial_quotient(a, I)


def c_alpha(a: Alpha, I: Multiset) -> int:
    """Signed coefficient ``(-1)^h C_alpha`` of the Delta-form formula."""
    return (-1) ** a.h * C_alpha(a, I)


def D_gamma(g: Gamma, I: Multiset) -> int:
    if not g.is_valid_for(I):
        raise ValueError(f"{g} is not an element of B_I for I={I}")
    return _factorial_quotient(g, I)


def d_gamma(g: Gamma, I: Multiset) -> int:
    """Signed coefficient ``(-1)^g D_gamma`` of the raw-derivative formula."""
    return (-1) ** g.g * D_gamma(g, I)


# --- recursion on |I| ------------------------------------------------------


def _shifted(beta: Alpha, changes: Mapping[PartVec, int]) -> Alpha:
    counts = beta.as_dict()
    for pv, delta in changes.items():
        counts[pv] = counts.get(pv, 0) + delta
    return Alpha.from_mapping(counts)


def recursion_terms(I: Multiset, k: int, beta: Alpha) -> list[tuple[str, int, Alpha]]:
    """Predecessors of ``beta`` in ``A_I`` when passing from ``I`` to ``I + k``.

    Returns ``(kind, multiplier, alpha)`` triples.  ``kind`` is one of

    * ``"grow"``: the ``k``-ball joined a part that already had 2+ balls;
    * ``"swap"``: the ``k``-ball sits in a ``[{j,k}; 0]`` part and a red
      ball was moved out of ``[J; r]`` (multiplier ``(eta_j+1)(mu+1)``);
    * ``"pair"`` / ``"red"``: the two multiples of the element with one
      ``[{k}; 1]`` part removed.

    Guards are evaluated before any predecessor is built, so elements
    outside ``A_I`` never arise.
    """
    N = I.n_indices
    if not beta.is_valid_for(I.plus(k)):
        raise ValueError(f"{beta} is not an element of A_(I+k)")
    unit_k = Multiset.unit(k, N)
    k_red = PartVec(unit_k, 1)
    pair = {j: PartVec(Multiset.unit(j, N).plus(k), 0) for j in range(1, N + 1)}
    terms: list[tuple[str, int, Alpha]] = []

    for (J, r), mu in beta:
        if J[k] and len(J) + r >= 3:
            smaller = PartVec(J.minus(k), r)
            mult = beta[smaller] + 1
            terms.append(("grow", mult, _shifted(beta, {PartVec(J, r): -1, smaller: +1})))

    for (J, r), mu in beta:
        if r == 0 or (J, r) == k_red:
            continue
        for j in range(1, N + 1):
            if beta[pair[j]] == 0:
                continue
            merged = PartVec(J.plus(j), r - 1)
            mult = (J[j] + 1) * (beta[merged] + 1)
            alpha = _shifted(beta, {PartVec(J, r): -1, pair[j]: -1, merged: +1})
            terms.append(("swap", mult, alpha))

    if beta[k_red]:
        alpha = _shifted(beta, {k_red: -1})
        pair_mult = sum((1 + (j == k)) * beta[pair[j]] for j in range(1, N + 1))
        if pair_mult:
            terms.append(("pair", pair_mult, alpha))
        terms.append(("red", beta.y_total(), alpha))
    return terms


def c_beta_recursive(I: Multiset, k: int, beta: Alpha, prior: Mapping[Alpha, int]) -> int:
    """Signed coefficient of ``beta`` in ``A_(I+k)`` from the coefficients of ``A_I``."""
    total = 0
    for kind, mult, alpha in recursion_terms(I, k, beta):
        if alpha not in prior:
            raise KeyError(f"no prior coefficient for {alpha}")
        sign = 1 if kind == "grow" else -1
        total += sign * mult * prior[alpha]
    return total


@lru_cache(maxsize=None)
def _recursive_table(I: Multiset) -> tuple[tuple[Alpha, int], ...]:
    n = len(I)
    if n == 2:
        return tuple((a, -1) for a in enumerate_A(I))
    k = max(i for i in range(1, I.n_indices + 1) if I[i])
    base = I.minus(k)
    prior = dict(_recursive_table(base))
    return tuple((b, c_beta_recursive(base, k, b, prior)) for b in enumerate_A(I))


def recursive_coefficients(I: Multiset) -> dict[Alpha, int]:
    """Signed coefficients for all of ``A_I``, built upward from ``|I| = 2``.

    Never touches the closed form: each level is fed only by the level below.
    """
    if len(I) < 2:
        raise ValueError(f"A_I needs |I| >= 2, got |I|={len(I)}")
    return dict(_recursive_table(I))


def indcomb_sum(I: Multiset, k: int, beta: Alpha) -> int:
    """Unsigned four-term sum of closed-form coefficients over the predecessors."""
    return sum(mult * C_alpha(alpha, I) for _, mult, alpha in recursion_terms(I, k, beta))


def indcomb_check(I: Multiset, k: int, beta: Alpha) -> bool:
    return indcomb_sum(I, k, beta) == C_alpha(beta, I.plus(k))


# --- ball placements ---------------------------------------------------------

MAX_BALLS = 10


def _set_partitions(n: int, blocks: int) -> Iterator[list[list[int]]]:
    """Partitions of ``range(n)`` into exactly ``blocks`` non-empty blocks."""
    current: list[list[int]] = []

    def rec(i: int):
        if n - i < blocks - len(current):
            return
        if i == n:
            yield [list(b) for b in current]
            return
        for b in current:
            b.append(i)
            yield from rec(i + 1)
            b.pop()
        if len(current) < blocks:
            current.append([i])
            yield from rec(i + 1)
            current.pop()

    yield from rec(0)


def count_ball_placements(a: Alpha, I: Multiset) -> int:
    """Count placements of marked balls into ``h`` identical boxes with ``a``'s profile.

    There are ``nu_i`` marked balls of colour ``i`` and ``h - 1`` marked red
    balls.  A placement is a set partition of all balls into ``h`` blocks; it
    counts when the multiset of block contents ``(colour counts, red count)``
    equals the parts of ``a``.
    """
    if not a.is_valid_for(I):
        raise ValueError(f"{a} is not an element of A_I for I={I}")
    h = a.h
    colours: list[int] = list(I) + [0] * (h - 1)  # 0 marks a red ball
    if len(colours) > MAX_BALLS:
        raise ValueError(f"{len(colours)} balls exceeds the brute-force limit {MAX_BALLS}")
    N = I.n_indices
    target = Counter({(pv.J.mults, pv.r): m for pv, m in a})
    count = 0
    for partition in _set_partitions(len(colours), h):
        profile: Counter = Counter()
        for block in partition:
            mults = [0] * N
            reds = 0
            for ball in block:
                c = colours[ball]
                if c:
                    mults[c - 1] += 1
                else:
                    reds += 1
            profile[(tuple(mults), reds)] += 1
        if profile == target:
            count += 1
    return count


# --- fundamental part and collapse count ------------------------------------


def collapse_decomposition(a: _PartCounts, I: Multiset) -> tuple[int, int]:
    """Split ``C_alpha`` (or ``D_gamma``) as ``fundamental * collapse``.

    ``fundamental`` is the value the coefficient would take if all indices of
    ``I`` were distinct.  ``collapse`` counts the labelled set partitions
    that become this marked multiset partition once indices are identified,
    ``I! / prod_{J nonempty} m! J!^m``.
    """
    if not a.is_valid_for(I):
        raise ValueError(f"{a} is not a partition element for I={I}")
    den = 1
    for (J, r), m in a:
        den *= math.factorial(r) ** m
        if len(J) == 0:
            den *= math.factorial(m)
    fundamental = _exact_div(math.factorial(a.num_parts() - 1), den)
    den = 1
    for (J, _), m in a:
        if len(J):
            den *= math.factorial(m) * mfact(J) ** m
    collapse = _exact_div(mfact(I), den)
    full = _factorial_quotient(a, I)
    if fundamental * collapse != full:
        raise ArithmeticError(f"{fundamental} * {collapse} != {full} for {a}")
    return fundamental, collapse


def coefficient_table(items: Sequence[_PartCounts], I: Multiset) -> list[tuple]:
    """Rows ``(element, parts, unsigned, signed)`` for Alphas or Gammas."""
    rows = []
    for it in items:
        unsigned = _factorial_quotient(it, I)
        rows.append((it, it.num_parts(), unsigned, (-1) ** it.num_parts() * unsigned))
    return rows
