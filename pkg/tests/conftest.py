"""Shared corpus builders and independent oracles.

The oracles deliberately avoid the library's sparse-histogram machinery:
they enumerate tuples (with equality/distinctness pruning) over explicit
pair lists grouped by sorting, so agreement with the library is a genuine
dual-route check.
"""

from __future__ import annotations

import itertools
import random

import pytest

from sidonkit import AmbientSpec, GroundSet, integer_set


# ---------------------------------------------------------------------------
# Random corpora

def random_integer_set(rng: random.Random, max_size: int = 10,
                       lo: int = 0, hi: int = 60) -> GroundSet:
    size = rng.randint(1, max_size)
    pool = range(lo, hi + 1)
    return integer_set(rng.sample(pool, min(size, len(pool))))


def random_field_set(rng: random.Random, p: int = 13, max_size: int = 10) -> GroundSet:
    size = rng.randint(1, min(max_size, p))
    return GroundSet.from_iterable(AmbientSpec.prime_field(p),
                                   rng.sample(range(p), size))


def mixed_corpus(seed: int, count: int, max_size: int = 10) -> list[GroundSet]:
    """Seeded mixture of integer sets (dense and spread) and F_13 sets."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        which = i % 4
        if which == 0:
            out.append(random_integer_set(rng, max_size, 0, 60))
        elif which == 1:
            out.append(random_integer_set(rng, max_size, 0, 10**6))
        elif which == 2:
            out.append(random_integer_set(rng, max_size, -30, 30))
        else:
            out.append(random_field_set(rng, 13, max_size))
    return out


# ---------------------------------------------------------------------------
# Energy oracles

def _compose_fn(ambient: AmbientSpec, mode: str):
    from sidonkit import compose_value
    return lambda a, b: compose_value(ambient, mode, a, b)


def oracle_energy_full(A: GroundSet, k: int, mode: str = "difference") -> int:
    """Literal 2k-tuple enumeration with an equality filter; tiny sets only."""
    comp = _compose_fn(A.ambient, mode)
    elems = A.elements
    total = 0
    for tup in itertools.product(elems, repeat=2 * k):
        vals = [comp(tup[2 * i], tup[2 * i + 1]) for i in range(k)]
        if all(v == vals[0] for v in vals):
            total += 1
    return total


def _sorted_groups(values: list) -> list[int]:
    """Run lengths of equal values after sorting (no hashing involved)."""
    from sidonkit.ambient import value_sort_key
    ordered = sorted(values, key=value_sort_key)
    groups = []
    run = 0
    prev = object()
    for v in ordered:
        if v == prev:
            run += 1
        else:
            if run:
                groups.append(run)
            prev, run = v, 1
    if run:
        groups.append(run)
    return groups


def _count_tuples(r: int, k: int) -> int:
    if k == 0:
        return 1
    return sum(_count_tuples(r, k - 1) for _ in range(r))


def oracle_energy_grouped(A: GroundSet, k: int, mode: str = "difference") -> int:
    """Enumerate ordered k-tuples of equal-valued pairs, pruned by grouping
    the pair list through sorting."""
    comp = _compose_fn(A.ambient, mode)
    values = [comp(a, b) for a in A.elements for b in A.elements]
    return sum(_count_tuples(r, k) for r in _sorted_groups(values))


def oracle_energy_prime(A: GroundSet, k: int) -> int:
    """Distinct-entry tuple enumeration: ordered k-tuples of index pairs
    with one common difference and all 2k indices distinct."""
    from sidonkit.ambient import value_sort_key
    comp = _compose_fn(A.ambient, "difference")
    elems = A.elements
    n = len(elems)
    zero = A.ambient.identity("difference")
    tagged = []
    for i in range(n):
        for j in range(n):
            if i != j:
                d = comp(elems[i], elems[j])
                if d != zero:
                    tagged.append((value_sort_key(d), i, j))
    tagged.sort(key=lambda t: t[0])
    total = 0
    start = 0
    while start < len(tagged):
        stop = start
        while stop < len(tagged) and tagged[stop][0] == tagged[start][0]:
            stop += 1
        group = [(i, j) for _, i, j in tagged[start:stop]]
        total += _count_disjoint(group, set(), k)
        start = stop
    return total


def _count_disjoint(group, used: set, k: int) -> int:
    if k == 0:
        return 1
    total = 0
    for i, j in group:
        if i not in used and j not in used:
            used.add(i)
            used.add(j)
            total += _count_disjoint(group, used, k - 1)
            used.discard(i)
            used.discard(j)
    return total


# ---------------------------------------------------------------------------
# Independent family/graph oracles

def cayley_rectangle_found(S: GroundSet, k: int, g: int) -> bool:
    """Direct bipartite search over the full shift-by-element incidence of
    Z/N: is there a (g+1) x k all-ones rectangle?"""
    N = S.ambient.modulus
    members = S.members
    for Y in itertools.combinations(range(N), k):
        rows = 0
        for t in range(N):
            if all((y + t) % N in members for y in Y):
                rows += 1
                if rows >= g + 1:
                    return True
    return False


def bfamily_shift_oracle_violation(S: GroundSet, k: int, g: int) -> bool:
    """Definitional check: some g distinct nonzero shifts whose common
    intersection with S has at least k elements.  Tiny supports only."""
    from sidonkit import intersection_size
    from sidonkit.counting import difference_histogram
    zero = S.ambient.identity("difference")
    support = [v for v in difference_histogram(S).values() if v != zero]
    for shifts in itertools.combinations(support, g):
        if intersection_size(S, shifts) >= k:
            return True
    return False


@pytest.fixture(scope="session")
def corpus_small():
    return mixed_corpus(20260809, 200, max_size=10)
