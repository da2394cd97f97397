"""Exact representation-function histograms and energy functionals.

Histograms are sparse (value -> count) and exact.  Large instances over
scalar ambients run through numpy int64 broadcasting when the element
magnitudes make that provably overflow-free; everything else uses plain
dictionaries with Python integers.  Energies are computed from the
count-of-counts compression with arbitrary-precision arithmetic, so no
value is ever approximated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ambient import (
    DIFFERENCE,
    INTEGERS,
    MOD_N,
    PLANE,
    PRIME_FIELD,
    PRODUCT,
    RATIO,
    SUM,
    AmbientSpec,
    canonical_element,
    compose_value,
    negate,
    value_sort_key,
)
from .errors import AmbientMismatch, CapExceeded, DivisionByZero, UnsupportedMode
from .groundset import GroundSet

# numpy is used only when int64 arithmetic provably cannot overflow.
_NP_ADD_LIMIT = 2**62
_NP_MUL_LIMIT = 3_037_000_499  # floor(sqrt(2^63 - 1))
_NP_PAIR_THRESHOLD = 8192      # below this, plain dicts win


class RepHistogram:
    """Multiplicity map r_{A o B} for one binary composition.

    `total_pairs` counts composed ordered pairs; ratio pairs skipped for a
    non-invertible right element are tallied in `skipped_pairs`.  Large
    scalar instances are backed by sorted numpy arrays and decoded lazily;
    both backings expose the same exact-integer interface.
    """

    def __init__(self, ambient: AmbientSpec, mode: str, entries: dict | None,
                 total_pairs: int, skipped_pairs: int = 0,
                 left_label: str | None = None, right_label: str | None = None,
                 arrays: tuple | None = None, plane_modulus: int | None = None):
        self.ambient = ambient
        self.mode = mode
        self._dict = entries
        self._vals, self._cnts = arrays if arrays is not None else (None, None)
        self._plane_modulus = plane_modulus
        self.total_pairs = total_pairs
        self.skipped_pairs = skipped_pairs
        self.left_label = left_label
        self.right_label = right_label

    # -- encoding helpers for the array backing ---------------------------
    def _encode(self, value):
        if self._plane_modulus is not None:
            if isinstance(value, list):
                value = tuple(value)
            if not isinstance(value, tuple):
                return None
            return value[0] * self._plane_modulus + value[1]
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, Fraction) and value.denominator == 1:
            return int(value)
        return None

    def _decode(self, raw: int):
        if self._plane_modulus is not None:
            return (raw // self._plane_modulus, raw % self._plane_modulus)
        return raw

    def count(self, value) -> int:
        if isinstance(value, list):
            value = tuple(value)
        if self._dict is not None:
            return self._dict.get(value, 0)
        enc = self._encode(value)
        if enc is None:
            return 0
        pos = int(np.searchsorted(self._vals, enc))
        if pos < self._vals.size and int(self._vals[pos]) == enc:
            return int(self._cnts[pos])
        return 0

    def iter_items(self):
        """(value, count) pairs in canonical value order, lazily."""
        if self._dict is not None:
            for v in sorted(self._dict, key=value_sort_key):
                yield v, self._dict[v]
        else:
            for raw, c in zip(self._vals.tolist(), self._cnts.tolist()):
                yield self._decode(raw), c

    def items(self):
        return list(self.iter_items())

    def values(self):
        return (v for v, _ in self.iter_items())

    def to_counts_dict(self) -> dict:
        if self._dict is not None:
            return dict(self._dict)
        return {self._decode(raw): c
                for raw, c in zip(self._vals.tolist(), self._cnts.tolist())}

    @property
    def support_size(self) -> int:
        return len(self._dict) if self._dict is not None else int(self._vals.size)

    def identity_value(self):
        return self.ambient.identity(self.mode)

    def _excluded_counts(self, exclude_values) -> list[int]:
        return [c for v in exclude_values if (c := self.count(v)) > 0]

    def count_multiset(self, exclude_values=()) -> dict:
        """Map count -> number of values attaining it."""
        if self._dict is not None:
            excl = set(exclude_values)
            out: dict[int, int] = {}
            for v, c in self._dict.items():
                if v in excl:
                    continue
                out[c] = out.get(c, 0) + 1
            return out
        bins = np.bincount(self._cnts)
        out = {int(c): int(m) for c, m in enumerate(bins) if m and c}
        for c in self._excluded_counts(exclude_values):
            out[c] -= 1
            if out[c] == 0:
                del out[c]
        return out

    def energy(self, k: int, exclude_values=()) -> int:
        """Sum of count^k over the support, exactly."""
        total = 0
        for c, mult in self.count_multiset(exclude_values).items():
            total += mult * c**k
        return total

    def values_with_count_in(self, lo: int, hi: int) -> list:
        """Values whose count c satisfies lo < c <= hi."""
        if self._dict is not None:
            return [v for v, c in self._dict.items() if lo < c <= hi]
        mask = (self._cnts > lo) & (self._cnts <= hi)
        return [self._decode(r) for r in self._vals[mask].tolist()]

    def values_with_count_at_least(self, theta: int) -> list:
        if self._dict is not None:
            return [v for v, c in self._dict.items() if c >= theta]
        mask = self._cnts >= theta
        return [self._decode(r) for r in self._vals[mask].tolist()]

    def max_count(self, exclude_values=()):
        """(value, count) with the largest count outside the excluded values,
        ties broken by canonical value order; None on empty support."""
        excl = set(exclude_values)
        if self._dict is not None:
            best = None
            for v, c in self._dict.items():
                if v in excl:
                    continue
                if best is None or c > best[1] or (
                    c == best[1] and value_sort_key(v) < value_sort_key(best[0])
                ):
                    best = (v, c)
            return best
        if not self._vals.size:
            return None
        if not excl:
            idx = int(np.argmax(self._cnts))  # first max = smallest value
            return self._decode(int(self._vals[idx])), int(self._cnts[idx])
        order = np.argsort(-self._cnts, kind="stable")
        for idx in order.tolist():
            v = self._decode(int(self._vals[idx]))
            if v not in excl:
                return v, int(self._cnts[idx])
        return None

    def to_dict(self, max_entries: int = 100_000) -> dict:
        if self.support_size > max_entries:
            raise CapExceeded(f"histogram support {self.support_size} exceeds {max_entries}")
        entries = []
        for v, c in self.iter_items():
            if isinstance(v, Fraction):
                key = f"{v.numerator}/{v.denominator}"
            elif isinstance(v, tuple):
                key = f"{v[0]},{v[1]}"
            else:
                key = str(v)
            entries.append([key, c])
        return {
            "mode": self.mode,
            "total_pairs": self.total_pairs,
            "skipped_pairs": self.skipped_pairs,
            "support_size": self.support_size,
            "entries": entries,
        }


def _numpy_eligible(A: GroundSet, B: GroundSet, mode: str) -> bool:
    amb = A.ambient
    if mode == RATIO or len(A) * len(B) < _NP_PAIR_THRESHOLD:
        return False
    if amb.kind == INTEGERS:
        limit = _NP_MUL_LIMIT if mode == PRODUCT else _NP_ADD_LIMIT
        return all(abs(x) <= limit for s in (A, B) for x in s.elements)
    if amb.kind in (MOD_N, PRIME_FIELD):
        limit = _NP_MUL_LIMIT if mode == PRODUCT else _NP_ADD_LIMIT
        return amb.modulus <= limit
    return amb.modulus <= 2**31  # plane: encoded pairs must fit int64


def _numpy_entries(A: GroundSet, B: GroundSet, mode: str):
    amb = A.ambient
    if amb.kind == PLANE:
        p = amb.modulus
        ax = np.fromiter((e[0] for e in A.elements), dtype=np.int64, count=len(A))
        ay = np.fromiter((e[1] for e in A.elements), dtype=np.int64, count=len(A))
        bx = np.fromiter((e[0] for e in B.elements), dtype=np.int64, count=len(B))
        by = np.fromiter((e[1] for e in B.elements), dtype=np.int64, count=len(B))
        if mode == DIFFERENCE:
            cx = (ax[:, None] - bx[None, :]) % p
            cy = (ay[:, None] - by[None, :]) % p
        else:
            cx = (ax[:, None] + bx[None, :]) % p
            cy = (ay[:, None] + by[None, :]) % p
        flat = (cx * p + cy).ravel()
        return np.unique(flat, return_counts=True)
    va = np.fromiter(A.elements, dtype=np.int64, count=len(A))
    vb = np.fromiter(B.elements, dtype=np.int64, count=len(B))
    if mode == DIFFERENCE:
        flat = (va[:, None] - vb[None, :]).ravel()
    elif mode == SUM:
        flat = (va[:, None] + vb[None, :]).ravel()
    else:
        flat = (va[:, None] * vb[None, :]).ravel()
    if amb.kind in (MOD_N, PRIME_FIELD):
        flat = flat % amb.modulus
    return np.unique(flat, return_counts=True)


def rep_histogram(A: GroundSet, B: GroundSet, mode: str,
                  skip_noninvertible: bool = False) -> RepHistogram:
    """Exact multiset of ordered compositions a o b over A x B."""
    if A.ambient != B.ambient:
        raise AmbientMismatch(f"{A.ambient} vs {B.ambient}")
    amb = A.ambient
    if mode not in amb.modes:
        raise UnsupportedMode(f"mode {mode!r} undefined for {amb.kind}")
    skipped = 0
    if _numpy_eligible(A, B, mode):
        vals, counts = _numpy_entries(A, B, mode)
        return RepHistogram(amb, mode, None, len(A) * len(B), 0,
                            A.label, B.label, arrays=(vals, counts),
                            plane_modulus=amb.modulus if amb.kind == PLANE else None)
    entries: dict = {}
    for a in A:
        for b in B:
            try:
                v = compose_value(amb, mode, a, b)
            except DivisionByZero:
                if not skip_noninvertible:
                    raise
                skipped += 1
                continue
            entries[v] = entries.get(v, 0) + 1
    return RepHistogram(amb, mode, entries, len(A) * len(B) - skipped, skipped,
                        A.label, B.label)


def difference_histogram(A: GroundSet) -> RepHistogram:
    return rep_histogram(A, A, DIFFERENCE)


@dataclass(frozen=True)
class EnergyReport:
    k: int
    mode: str
    value: int
    kappa: float | None
    set_size: int
    distinct_variant_value: int | None = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "mode": self.mode,
            "value": self.value,
            "kappa": self.kappa,
            "set_size": self.set_size,
            "distinct_variant_value": self.distinct_variant_value,
        }


def kappa_of(value: int, size: int, k: int) -> float | None:
    """log_|A|(value) - k; defined for |A| >= 2 and value > 0."""
    if size < 2 or value <= 0:
        return None
    return math.log(value) / math.log(size) - k


def energy_k(A: GroundSet, k: int, mode: str = DIFFERENCE,
             include_distinct_variant: bool = False) -> EnergyReport:
    """k-th moment of the composition histogram of A with itself."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(A) < 1:
        raise ValueError("energy of the empty set is undefined")
    if mode not in (DIFFERENCE, SUM, PRODUCT):
        raise UnsupportedMode(f"energy mode must be difference/sum/product, got {mode!r}")
    hist = rep_histogram(A, A, mode)
    value = hist.energy(k)
    distinct = energy_prime_k(A, k) if include_distinct_variant and mode == DIFFERENCE else None
    return EnergyReport(k, mode, value, kappa_of(value, len(A), k), len(A), distinct)


# ---------------------------------------------------------------------------
# Distinct-tuple energy E'_k

def _comb0(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


def _path_matchings(m: int, kmax: int) -> list[int]:
    """Coefficients [#j-matchings in a path with m edges] for j = 0..kmax."""
    return [_comb0(m - j + 1, j) for j in range(kmax + 1)]


def _cycle_matchings(m: int, kmax: int) -> list[int]:
    """Same for a cycle with m edges (m >= 3)."""
    return [1] + [_comb0(m - j, j) + _comb0(m - j - 1, j - 1) for j in range(1, kmax + 1)]


def _poly_mul(a: list[int], b: list[int], kmax: int) -> list[int]:
    out = [0] * (kmax + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if i + j > kmax:
                break
            out[i + j] += ai * bj
    return out


def _pair_components(members: frozenset, amb: AmbientSpec, d) -> list[tuple[str, int]]:
    """Decompose the pair graph x -> x + d on `members` into paths and
    cycles, returning (kind, edge_count) per component."""
    step = lambda x: compose_value(amb, SUM, x, d)
    back = negate(amb, d)
    stepb = lambda x: compose_value(amb, SUM, x, back)
    comps = []
    visited = set()
    for x in members:
        if x in visited or step(x) not in members:
            continue
        # walk backwards to the chain start (or detect a cycle)
        start = x
        is_cycle = False
        y = stepb(start)
        while y in members:
            if y == x:
                is_cycle = True
                break
            start = y
            y = stepb(start)
        edges = 0
        cur = start
        while cur not in visited and step(cur) in members:
            visited.add(cur)
            edges += 1
            cur = step(cur)
            if is_cycle and cur == start:
                break
        if edges:
            comps.append(("cycle" if is_cycle else "path", edges))
    return comps


def max_disjoint_pairs(members: frozenset, amb: AmbientSpec, d) -> int:
    """Largest number of vertex-disjoint pairs {x, x+d}; exact via the
    chain decomposition (greedy matching is optimal on paths and cycles)."""
    total = 0
    for kind, m in _pair_components(members, amb, d):
        total += (m + 1) // 2 if kind == "path" else m // 2
    return total


def energy_prime_k(A: GroundSet, k: int, method: str = "auto",
                   cap: int = 12, within_pairs_only: bool = False) -> int:
    """Ordered 2k-tuples (x_1, x'_1, ..., x_k, x'_k) in A^{2k} with all
    entries pairwise distinct and equal differences x_j - x'_j.

    The default algorithm counts, per difference, ordered k-tuples of
    vertex-disjoint pairs through the matching polynomial of the chain
    decomposition; it is exact at every size.  `method="enumerate"` is a
    direct backtracking enumeration, capped at |A| <= cap.

    `within_pairs_only` switches to the weaker reading that only requires
    x_j != x'_j inside each pair, i.e. the sum of r^k over nonzero
    differences.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    amb = A.ambient
    hist = difference_histogram(A)
    zero = amb.identity(DIFFERENCE)
    if within_pairs_only:
        return hist.energy(k, exclude_values=(zero,))
    if method == "enumerate":
        if len(A) > cap:
            raise CapExceeded(f"|A| = {len(A)} exceeds the enumeration cap {cap}")
        return _energy_prime_enumerate(A, k)
    if method != "auto":
        raise UnsupportedMode(f"unknown energy_prime_k method {method!r}")
    total = 0
    kfact = math.factorial(k)
    for d in hist.values_with_count_at_least(k):
        if d == zero:
            continue
        poly = [1]
        for kind, m in _pair_components(A.members, amb, d):
            part = _path_matchings(m, k) if kind == "path" else _cycle_matchings(m, k)
            poly = _poly_mul(poly, part, k)
        if len(poly) > k:
            total += kfact * poly[k]
    return total


def _energy_prime_enumerate(A: GroundSet, k: int) -> int:
    amb = A.ambient
    elems = list(A.elements)
    n = len(elems)
    zero = amb.identity(DIFFERENCE)
    by_diff: dict = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = compose_value(amb, DIFFERENCE, elems[i], elems[j])
            if d == zero:
                continue
            by_diff.setdefault(d, []).append((i, j))

    def extend(pairs, used, depth):
        if depth == k:
            return 1
        total = 0
        for i, j in pairs:
            if i not in used and j not in used:
                used.add(i)
                used.add(j)
                total += extend(pairs, used, depth + 1)
                used.discard(i)
                used.discard(j)
        return total

    return sum(extend(pairs, set(), 0) for pairs in by_diff.values())


# ---------------------------------------------------------------------------
# Intersections, common energy, popularity levels

def intersection_size(A: GroundSet, shifts) -> int:
    """|A  intersect  (A+s_1)  intersect ... | exactly."""
    amb = A.ambient
    shifts = [canonical_element(amb, s) for s in shifts]
    count = 0
    for x in A:
        if all(compose_value(amb, DIFFERENCE, x, s) in A.members for s in shifts):
            count += 1
    return count


def common_energy(A: GroundSet, B: GroundSet) -> int:
    """Number of quadruples a_1 + b_1 = a_2 + b_2, computed as the inner
    product of the two difference histograms."""
    if A.ambient != B.ambient:
        raise AmbientMismatch(f"{A.ambient} vs {B.ambient}")
    ha = difference_histogram(A)
    hb = difference_histogram(B)
    small, big = (ha, hb) if ha.support_size <= hb.support_size else (hb, ha)
    return sum(c * big.count(v) for v, c in small.iter_items())


def popular_level_set(A: GroundSet, delta: int, include_zero: bool = True) -> GroundSet:
    """Values x with delta < r_{A-A}(x) <= 2*delta; x = 0 kept iff the flag
    is set.  Over the integers the values must fit the element budget."""
    if delta < 1:
        raise ValueError("delta must be >= 1")
    hist = difference_histogram(A)
    zero = A.ambient.identity(DIFFERENCE)
    vals = [v for v in hist.values_with_count_in(delta, 2 * delta)
            if include_zero or v != zero]
    return GroundSet.from_iterable(A.ambient, vals)


def dyadic_best_level(A: GroundSet, l: int) -> tuple[int, GroundSet]:
    """Among dyadic classes delta in {1, 2, 4, ...}, the class maximizing
    delta^(l+1) * |P_delta| with P_delta = {x : delta < r(x) <= 2 delta}.

    Ties break toward the smaller delta.  A singleton set has its whole
    mass at multiplicity 1, below every class, and returns (1, {0}).
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if len(A) == 0:
        raise ValueError("empty set has no dyadic level")
    if len(A) == 1:
        return 1, GroundSet.from_iterable(A.ambient, [A.ambient.identity(DIFFERENCE)])
    hist = difference_histogram(A)
    best = None
    delta = 1
    while delta <= len(A):
        members = hist.values_with_count_in(delta, 2 * delta)
        score = delta ** (l + 1) * len(members)
        if members and (best is None or score > best[0]):
            best = (score, delta, members)
        delta *= 2
    score, delta, members = best  # nonempty: r(0) = |A| >= 2 lands in some class
    return delta, GroundSet.from_iterable(A.ambient, members)
