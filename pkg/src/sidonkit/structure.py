"""Energy-gap decomposition with self-verifying certificates, the popular
shift set, the heuristic rigid-structure extractor, and the end-to-end
additive-vs-multiplicative extraction pipeline.

Certificates store only recomputable facts: exact energies, exact
threshold comparisons (rational exponents cleared by cross-multiplied
integer powers), and explicit sets.  Heuristic quantities (everything
downstream of the popularity-graph clustering) are labelled measured and
carry no guarantee beyond recomputability and translate disjointness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .ambient import (
    DIFFERENCE,
    INTEGERS,
    MOD_N,
    PRIME_FIELD,
    PRODUCT,
    SUM,
    AmbientSpec,
    canonical_element,
    compose_value,
)
from .counting import (
    difference_histogram,
    dyadic_best_level,
    kappa_of,
    rep_histogram,
)
from .errors import EmptyCore, PreconditionFailed, UnsupportedMode
from .groundset import GroundSet
from .sidon import ExtractionResult, extract_random, verify_multiplicity

FORMAT_VERSION = 1

SMALL_ENERGY = "small-energy"
POPULAR_CORE = "popular-core"
RIGID_STRUCTURE = "rigid-structure"

ADDITIVE_BRANCH = "additive-small-energy"
MULTIPLICATIVE_BRANCH = "multiplicative-after-structure"


def as_fraction(x) -> Fraction:
    """Exact parameter normalization; floats are read as their shortest
    decimal form (0.25 -> 1/4)."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def ceil_power(n: int, expo: Fraction) -> int:
    """ceil(n ** expo) for n >= 1 and a nonnegative rational exponent."""
    num, den = expo.numerator, expo.denominator
    x = n**num
    r = _iroot(x, den)
    return r if r**den == x else r + 1


def _iroot(x: int, r: int) -> int:
    if x in (0, 1) or r == 1:
        return x
    guess = 1 << -(-x.bit_length() // r)
    while True:
        nxt = ((r - 1) * guess + x // guess ** (r - 1)) // r
        if nxt >= guess:
            return guess
        guess = nxt


def power_at_most(value: int, base: int, expo: Fraction) -> bool:
    """Exact test value <= base ** expo via cross-multiplied integer powers."""
    num, den = expo.numerator, expo.denominator
    return value**den <= base**num


def _jsonable(v):
    return list(v) if isinstance(v, tuple) else v


def _elements_list(elements) -> list:
    return [_jsonable(x) for x in elements]


def _as_elements(ambient: AmbientSpec, raw) -> tuple:
    return tuple(canonical_element(ambient, tuple(x) if isinstance(x, list) else x)
                 for x in raw)


@dataclass(frozen=True)
class StructureCertificate:
    variant: str
    parameters: dict
    trace: tuple
    small: dict | None = None
    core: dict | None = None
    rigid: dict | None = None

    def to_json_dict(self) -> dict:
        d = {
            "format_version": FORMAT_VERSION,
            "kind": "structure-certificate",
            "variant": self.variant,
            "parameters": dict(self.parameters),
            "trace": [dict(step) for step in self.trace],
        }
        for name, payload in (("small", self.small), ("core", self.core),
                              ("rigid", self.rigid)):
            if payload is not None:
                d[name] = dict(payload)
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "StructureCertificate":
        if d.get("kind") != "structure-certificate":
            raise ValueError("not a structure certificate")
        return cls(
            variant=d["variant"],
            parameters=dict(d["parameters"]),
            trace=tuple(dict(s) for s in d.get("trace", [])),
            small=dict(d["small"]) if d.get("small") else None,
            core=dict(d["core"]) if d.get("core") else None,
            rigid=dict(d["rigid"]) if d.get("rigid") else None,
        )


def _energy_table(A: GroundSet, l_top: int) -> dict[int, int]:
    """E_l for l = 1..l_top from one histogram's count multiset."""
    hist = difference_histogram(A)
    multiset = hist.count_multiset()
    return {l: sum(mult * c**l for c, mult in multiset.items())
            for l in range(1, l_top + 1)}


def _masses(A: GroundSet, P: GroundSet) -> dict:
    """mass(a) = |A  intersect  (P + a)| = r_{A-P}(a) for every a in A."""
    hist = rep_histogram(A, P, DIFFERENCE)
    return {a: hist.count(a) for a in A}


def energy_gap_decompose(A: GroundSet, delta, eps) -> StructureCertificate:
    """Iterate l = 2, 3, ...: stop with a small-energy certificate as soon
    as E_l <= |A|^(l+delta) exactly; otherwise, when one extra factor of
    |A|/M is gained (M E_{l+1} >= |A| E_l, M = ceil(|A|^(eps/2))), take the
    best dyadic difference band P, threshold the translate masses at half
    their average, and return the popular core.  The loop is capped at
    ceil(2/eps) + 2 steps, after which the small-energy comparison is
    provable; the certificate stores the evaluated comparison either way.
    """
    delta = as_fraction(delta)
    eps = as_fraction(eps)
    if not (0 < delta <= 1 and 0 < eps <= 1):
        raise PreconditionFailed("delta and eps must lie in (0, 1]")
    if eps > delta:
        raise PreconditionFailed("eps must not exceed delta")
    n = len(A)
    if n < 4:
        raise PreconditionFailed("decomposition needs |A| >= 4")
    M = ceil_power(n, eps / 2)
    l_max = math.ceil(Fraction(2) / eps) + 2
    energies = _energy_table(A, l_max + 1)
    parameters = {
        "delta": str(delta),
        "eps": str(eps),
        "M": M,
        "l_max": l_max,
        "set_size": n,
    }
    trace = []
    for l in range(2, l_max + 1):
        e_l, e_next = energies[l], energies[l + 1]
        if power_at_most(e_l, n, l + delta):
            trace.append(_trace_step(l, e_l, e_next, n, fired=False, small=True))
            return StructureCertificate(
                SMALL_ENERGY, parameters, tuple(trace),
                small={"k": l, "energy": e_l, "below_threshold": True,
                       "kappa": kappa_of(e_l, n, l)})
        fired = M * e_next >= n * e_l
        trace.append(_trace_step(l, e_l, e_next, n, fired=fired, small=False))
        if fired:
            return StructureCertificate(
                POPULAR_CORE, parameters, tuple(trace),
                core=_build_core(A, l, M))
    e_k = energies[l_max]
    return StructureCertificate(
        SMALL_ENERGY, parameters, tuple(trace),
        small={"k": l_max, "energy": e_k,
               "below_threshold": power_at_most(e_k, n, l_max + delta),
               "kappa": kappa_of(e_k, n, l_max)})


def _trace_step(l: int, e_l: int, e_next: int, n: int, fired: bool, small: bool) -> dict:
    return {"l": l, "energy": e_l, "energy_next": e_next,
            "kappa": kappa_of(e_l, n, l), "fired": fired, "small": small}


def _build_core(A: GroundSet, l: int, M: int) -> dict:
    n = len(A)
    delta_class, P = dyadic_best_level(A, l)
    masses = _masses(A, P)
    mass_total = sum(masses.values())
    core = [a for a in A if 2 * n * masses[a] >= mass_total]
    core_mass = sum(masses[a] for a in core)
    return {
        "l": l,
        "delta_class": delta_class,
        "band": _elements_list(P.elements),
        "theta": str(Fraction(mass_total, 2 * n)),
        "core": _elements_list(core),
        "mass_total": mass_total,
        "core_mass": core_mass,
        "min_core_mass": min(masses[a] for a in core),
    }


def popular_symmetry_set(A: GroundSet, theta: int) -> GroundSet:
    """Nonzero shifts t with |A  intersect  (A+t)| >= theta."""
    if theta < 1:
        raise ValueError("theta must be >= 1")
    hist = difference_histogram(A)
    zero = A.ambient.identity(DIFFERENCE)
    return GroundSet.from_iterable(
        A.ambient, (v for v in hist.values_with_count_at_least(theta) if v != zero))


# ---------------------------------------------------------------------------
# Rigid structure

def _popularity_edges(P: GroundSet, M: int) -> set:
    """Difference values v with 4 M^2 r_{P-P}(v) >= |P|, excluding zero."""
    hist = difference_histogram(P)
    zero = P.ambient.identity(DIFFERENCE)
    threshold = -(-len(P) // (4 * M * M))  # smallest integer count passing 4 M^2 c >= |P|
    return {v for v in hist.values_with_count_at_least(threshold) if v != zero}


def _numpy_scalar_ok(amb: AmbientSpec, elements) -> bool:
    if amb.kind == INTEGERS:
        return all(abs(x) <= 2**62 for x in elements)
    if amb.kind in (MOD_N, PRIME_FIELD):
        return amb.modulus <= 2**62
    return False


def _max_degree_vertex(P: GroundSet, good: set):
    """Vertex of the popularity graph with the most neighbors; ties go to
    the smallest element (elements are scanned in canonical order)."""
    amb = P.ambient
    if len(P) >= 64 and _numpy_scalar_ok(amb, P.elements):
        import numpy as np
        arr = np.fromiter(P.elements, dtype=np.int64, count=len(P))
        good_arr = np.fromiter(sorted(good), dtype=np.int64, count=len(good))
        degs = np.zeros(arr.size, dtype=np.int64)
        chunk = max(1, 2**22 // arr.size)
        for i in range(0, arr.size, chunk):
            d = arr[i:i + chunk, None] - arr[None, :]
            if amb.kind != INTEGERS:
                d %= amb.modulus
            degs[i:i + chunk] = np.isin(d, good_arr).sum(axis=1)
        idx = int(np.argmax(degs))  # first maximum = smallest element
        return P.elements[idx], int(degs[idx])
    best = None
    best_deg = -1
    for p in P.elements:
        deg = sum(1 for q in P.elements
                  if q != p and compose_value(amb, DIFFERENCE, p, q) in good)
        if deg > best_deg:
            best, best_deg = p, deg
    return best, best_deg


def _greedy_disjoint_translates(W, H: GroundSet) -> list:
    """Scan W in canonical order, keeping z whenever H+z avoids every
    translate already kept."""
    amb = H.ambient
    if len(W) * len(H) >= 200_000 and _numpy_scalar_ok(amb, H.elements):
        import numpy as np
        h = np.fromiter(H.elements, dtype=np.int64, count=len(H))
        covered = np.empty(0, dtype=np.int64)
        Z = []
        for z in W:
            t = h + z
            if amb.kind != INTEGERS:
                t %= amb.modulus
            if covered.size:
                pos = np.searchsorted(covered, t)
                inside = pos < covered.size
                if np.any(covered[np.minimum(pos, covered.size - 1)][inside] == t[inside]):
                    continue
            Z.append(z)
            covered = np.sort(np.concatenate([covered, t]))
        return Z
    covered_set: set = set()
    Z = []
    for z in W:
        translate = [compose_value(amb, SUM, x, z) for x in H]
        if all(t not in covered_set for t in translate):
            Z.append(z)
            covered_set.update(translate)
    return Z


def rigid_structure(A: GroundSet, delta, eps,
                    certificate: StructureCertificate | None = None) -> StructureCertificate:
    """Popularity-graph clustering of the dyadic band: H is the closed
    neighborhood of a maximum-degree vertex, Z a greedy maximal family of
    disjoint translates of H drawn from the heavy-mass elements W.  All
    resulting statistics are measured, and translate disjointness is the
    one hard guarantee; a small-energy certificate passes through
    unchanged."""
    cert = certificate if certificate is not None else energy_gap_decompose(A, delta, eps)
    if cert.variant == SMALL_ENERGY:
        return cert
    amb = A.ambient
    P = GroundSet.from_iterable(amb, _as_elements(amb, cert.core["band"]))
    if len(P) < 2:
        raise EmptyCore("dyadic band has fewer than 2 elements")
    M = cert.parameters["M"]
    n = len(A)
    good = _popularity_edges(P, M)
    center, _ = _max_degree_vertex(P, good)
    H = GroundSet.from_iterable(
        amb, [center] + [q for q in P.elements
                         if q != center and compose_value(amb, DIFFERENCE, center, q) in good])
    masses = _masses(A, H)
    mass_total = sum(masses.values())
    W = [a for a in A if 2 * n * masses[a] >= mass_total]
    Z = _greedy_disjoint_translates(W, H)
    covered_mass = sum(masses[z] for z in Z)
    doubling = Fraction(rep_histogram(H, H, SUM).support_size, len(H))
    rigid = {
        "edge_threshold": str(Fraction(len(P), 4 * M * M)),
        "center": _jsonable(center),
        "H": _elements_list(H.elements),
        "Z": _elements_list(Z),
        "W_size": len(W),
        "theta_H": str(Fraction(mass_total, 2 * n)),
        "mass_total_H": mass_total,
        "doubling": str(doubling),
        "zh_product": len(Z) * len(H),
        "covered_mass": covered_mass,
    }
    return StructureCertificate(RIGID_STRUCTURE, cert.parameters, cert.trace,
                                core=cert.core, rigid=rigid)


def rigid_core_set(A: GroundSet, cert: StructureCertificate) -> GroundSet:
    """(H directly-summed-with Z)  intersect  A, the union of the disjoint
    translate intersections A ^ (H+z)."""
    amb = A.ambient
    H = _as_elements(amb, cert.rigid["H"])
    Z = _as_elements(amb, cert.rigid["Z"])
    out = []
    for z in Z:
        for h in H:
            x = compose_value(amb, SUM, h, z)
            if x in A.members:
                out.append(x)
    return GroundSet.from_iterable(amb, out)


# ---------------------------------------------------------------------------
# Pipeline

@dataclass(frozen=True)
class PipelineReport:
    branch: str
    certificate: StructureCertificate | None
    subset: GroundSet
    extraction: ExtractionResult | None
    core_set: GroundSet | None = None
    zero_removed: bool = False
    kappa_table: dict = field(default_factory=dict)
    chosen_l: int | None = None
    sqrt_target: int = 0
    degenerate: bool = False
    parameters: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.extraction.verified if self.extraction else True

    @property
    def meets_sqrt_target(self) -> bool:
        return len(self.subset) >= self.sqrt_target

    def to_json_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": "pipeline-report",
            "branch": self.branch,
            "parameters": dict(self.parameters),
            "certificate": self.certificate.to_json_dict() if self.certificate else None,
            "core_set": self.core_set.to_dict() if self.core_set else None,
            "zero_removed": self.zero_removed,
            "kappa_table": {str(l): v for l, v in self.kappa_table.items()},
            "chosen_l": self.chosen_l,
            "extraction": self.extraction.to_dict() if self.extraction else None,
            "subset": self.subset.to_dict(),
            "subset_size": len(self.subset),
            "sqrt_target": self.sqrt_target,
            "meets_sqrt_target": self.meets_sqrt_target,
            "verified": self.verified,
            "degenerate": self.degenerate,
        }


def _ceil_sqrt(x: int) -> int:
    s = math.isqrt(x)
    return s if s * s == x else s + 1


def sum_product_pipeline(A: GroundSet, eps=Fraction(1, 16), seed: int = 0,
                         trials: int = 20, core_variant: str = "rigid",
                         l_max: int = 6) -> PipelineReport:
    """Either the additive energy collapses at some order k, in which case
    the difference-mode extraction already yields a large verified subset,
    or the set carries a popular rigid structure; then the multiplicative
    energy of the structured core is measured at orders 2..l_max and the
    product-mode extraction runs at the order with the smallest
    multiplicative kappa.  The delta parameter is fixed at 1/4.
    """
    if A.ambient.kind not in (INTEGERS, PRIME_FIELD):
        raise UnsupportedMode("pipeline runs over the integers or a prime field")
    if core_variant not in ("rigid", "popular"):
        raise ValueError("core_variant must be 'rigid' or 'popular'")
    if A.ambient.kind == PRIME_FIELD and len(A) ** 2 >= A.ambient.modulus:
        raise PreconditionFailed("prime-field pipeline requires |A| < sqrt(p)")
    eps = as_fraction(eps)
    params = {"delta": "1/4", "eps": str(eps), "seed": seed, "trials": trials,
              "core_variant": core_variant, "l_max": l_max}
    target = _ceil_sqrt(len(A))
    if len(A) < 4:
        return PipelineReport("degenerate", None, A, None, sqrt_target=target,
                              degenerate=True, parameters=params)
    cert = energy_gap_decompose(A, Fraction(1, 4), eps)
    if cert.variant == SMALL_ENERGY:
        k = cert.small["k"]
        ext = extract_random(A, k, DIFFERENCE, seed=seed, trials=trials)
        return PipelineReport(ADDITIVE_BRANCH, cert, ext.subset, ext,
                              sqrt_target=target, parameters=params)
    if core_variant == "rigid":
        try:
            cert = rigid_structure(A, Fraction(1, 4), eps, certificate=cert)
            core = rigid_core_set(A, cert)
        except EmptyCore:
            # degenerate one-element band: fall back to the heavy-mass core
            core = GroundSet.from_iterable(A.ambient, _as_elements(A.ambient, cert.core["core"]))
    else:
        core = GroundSet.from_iterable(A.ambient, _as_elements(A.ambient, cert.core["core"]))
    zero = A.ambient.identity(DIFFERENCE)
    zero_removed = zero in core.members
    if zero_removed:
        core = core.restrict(lambda x: x != zero)
    if len(core) < 2:
        return PipelineReport(MULTIPLICATIVE_BRANCH, cert, core, None, core_set=core,
                              zero_removed=zero_removed, sqrt_target=target,
                              degenerate=True, parameters=params)
    hist = rep_histogram(core, core, PRODUCT)
    multiset = hist.count_multiset()
    kappa_table = {}
    for l in range(2, l_max + 1):
        e_l = sum(mult * c**l for c, mult in multiset.items())
        kappa_table[l] = kappa_of(e_l, len(core), l)
    chosen_l = min(kappa_table, key=lambda l: (kappa_table[l], l))
    ext = extract_random(core, chosen_l, PRODUCT, seed=seed, trials=trials)
    return PipelineReport(MULTIPLICATIVE_BRANCH, cert, ext.subset, ext,
                          core_set=core, zero_removed=zero_removed,
                          kappa_table=kappa_table, chosen_l=chosen_l,
                          sqrt_target=target, parameters=params)


# ---------------------------------------------------------------------------
# Verification

def verify_certificate(A: GroundSet, cert: StructureCertificate) -> list[str]:
    """Recompute every stored statistic from (A, certificate); returns the
    list of mismatches (empty = certificate verifies)."""
    issues: list[str] = []
    try:
        delta = Fraction(cert.parameters["delta"])
        eps = Fraction(cert.parameters["eps"])
    except (KeyError, ValueError) as exc:
        return [f"unreadable parameters: {exc}"]
    n = len(A)
    if cert.parameters.get("set_size") != n:
        issues.append(f"set_size {cert.parameters.get('set_size')} != |A| = {n}")
    M = ceil_power(n, eps / 2) if n else 0
    if cert.parameters.get("M") != M:
        issues.append(f"M {cert.parameters.get('M')} != recomputed {M}")
    l_max = math.ceil(Fraction(2) / eps) + 2
    if cert.parameters.get("l_max") != l_max:
        issues.append(f"l_max {cert.parameters.get('l_max')} != recomputed {l_max}")
    if len(cert.trace) > l_max - 1:
        issues.append(f"trace length {len(cert.trace)} exceeds the loop bound")
    energies = _energy_table(A, l_max + 1) if n else {}
    for step in cert.trace:
        l = step["l"]
        e_l, e_next = energies[l], energies[l + 1]
        if step["energy"] != e_l or step["energy_next"] != e_next:
            issues.append(f"trace energies at l={l} do not recompute")
        if step["kappa"] != kappa_of(e_l, n, l):
            issues.append(f"trace kappa at l={l} does not recompute")
        if step["fired"] != (not step["small"] and M * e_next >= n * e_l):
            issues.append(f"trace fired flag at l={l} does not recompute")
        if step["small"] != power_at_most(e_l, n, l + delta):
            issues.append(f"trace small flag at l={l} does not recompute")
    if cert.variant == SMALL_ENERGY:
        issues += _verify_small(cert, energies, n, delta)
    elif cert.variant in (POPULAR_CORE, RIGID_STRUCTURE):
        issues += _verify_core(A, cert, energies, M, n)
        if cert.variant == RIGID_STRUCTURE:
            issues += _verify_rigid(A, cert, M, n)
    else:
        issues.append(f"unknown variant {cert.variant!r}")
    return issues


def _verify_small(cert: StructureCertificate, energies: dict, n: int,
                  delta: Fraction) -> list[str]:
    issues = []
    small = cert.small or {}
    k = small.get("k")
    if k not in energies:
        return [f"small-energy order k={k!r} out of range"]
    e_k = energies[k]
    if small.get("energy") != e_k:
        issues.append(f"E_{k} = {e_k} != stored {small.get('energy')}")
    if small.get("below_threshold") != power_at_most(e_k, n, k + delta):
        issues.append("below_threshold flag does not recompute")
    if small.get("kappa") != kappa_of(e_k, n, k):
        issues.append("small-energy kappa does not recompute")
    return issues


def _verify_core(A: GroundSet, cert: StructureCertificate, energies: dict,
                 M: int, n: int) -> list[str]:
    issues = []
    core_data = cert.core or {}
    amb = A.ambient
    l = core_data.get("l")
    if not isinstance(l, int) or l + 1 not in energies:
        return [f"core level l={l!r} out of range"]
    if M * energies[l + 1] < n * energies[l]:
        issues.append(f"ratio condition did not fire at stored l={l}")
    delta_class, P = dyadic_best_level(A, l)
    if delta_class != core_data.get("delta_class"):
        issues.append(f"dyadic class {core_data.get('delta_class')} != recomputed {delta_class}")
    if _as_elements(amb, core_data.get("band", ())) != P.elements:
        issues.append("dyadic band does not recompute")
        return issues
    masses = _masses(A, P)
    mass_total = sum(masses.values())
    if mass_total != core_data.get("mass_total"):
        issues.append(f"mass total {core_data.get('mass_total')} != recomputed {mass_total}")
    theta = Fraction(mass_total, 2 * n)
    if str(theta) != core_data.get("theta"):
        issues.append("theta does not recompute")
    core_elems = _as_elements(amb, core_data.get("core", ()))
    recomputed = tuple(a for a in A if 2 * n * masses[a] >= mass_total)
    if core_elems != recomputed:
        issues.append("core element set does not recompute")
        return issues
    core_mass = sum(masses[a] for a in core_elems)
    if core_mass != core_data.get("core_mass"):
        issues.append("core mass does not recompute")
    if core_elems and min(masses[a] for a in core_elems) != core_data.get("min_core_mass"):
        issues.append("minimum core mass does not recompute")
    if 2 * core_mass < mass_total:
        issues.append("half-mass property fails")
    return issues


def _verify_rigid(A: GroundSet, cert: StructureCertificate, M: int, n: int) -> list[str]:
    issues = []
    rigid = cert.rigid or {}
    amb = A.ambient
    P = GroundSet.from_iterable(amb, _as_elements(amb, (cert.core or {}).get("band", ())))
    if len(P) < 2:
        return ["rigid variant with a degenerate band"]
    if str(Fraction(len(P), 4 * M * M)) != rigid.get("edge_threshold"):
        issues.append("edge threshold does not recompute")
    good = _popularity_edges(P, M)
    center, _ = _max_degree_vertex(P, good)
    stored_center = rigid.get("center")
    stored_center = tuple(stored_center) if isinstance(stored_center, list) else stored_center
    if center != stored_center:
        issues.append(f"max-degree center {stored_center!r} != recomputed {center!r}")
    H = GroundSet.from_iterable(
        amb, [center] + [q for q in P.elements
                         if q != center and compose_value(amb, DIFFERENCE, center, q) in good])
    if _as_elements(amb, rigid.get("H", ())) != H.elements:
        issues.append("H does not recompute")
        return issues
    masses = _masses(A, H)
    mass_total = sum(masses.values())
    if mass_total != rigid.get("mass_total_H"):
        issues.append("H mass total does not recompute")
    if str(Fraction(mass_total, 2 * n)) != rigid.get("theta_H"):
        issues.append("theta_H does not recompute")
    W = [a for a in A if 2 * n * masses[a] >= mass_total]
    if len(W) != rigid.get("W_size"):
        issues.append("W size does not recompute")
    Z_stored = _as_elements(amb, rigid.get("Z", ()))
    Z = _greedy_disjoint_translates(W, H)
    if tuple(Z) != Z_stored:
        issues.append("Z does not recompute")
        return issues
    seen: set = set()
    for z in Z:
        translate = {compose_value(amb, SUM, h, z) for h in H}
        if seen & translate:
            issues.append("translates of H are not pairwise disjoint")
            break
        seen |= translate
    if rigid.get("doubling") != str(Fraction(rep_histogram(H, H, SUM).support_size, len(H))):
        issues.append("doubling does not recompute")
    if rigid.get("zh_product") != len(Z) * len(H):
        issues.append("|Z||H| does not recompute")
    if rigid.get("covered_mass") != sum(masses[z] for z in Z):
        issues.append("covered mass does not recompute")
    return issues


def verify_pipeline_report(A: GroundSet, report_dict: dict) -> list[str]:
    """Recompute a serialized pipeline report's checkable facts: the
    embedded certificate, the branch decision, the extraction subset's
    certified bound, and the size comparison."""
    issues: list[str] = []
    branch = report_dict.get("branch")
    cert_dict = report_dict.get("certificate")
    subset_dict = report_dict.get("subset")
    if subset_dict is None:
        return ["missing subset"]
    from .groundset import GroundSet as GS
    from .ambient import AmbientSpec as AS
    amb = AS.from_dict(subset_dict["ambient"])
    subset = GS.from_iterable(amb, _as_elements(amb, subset_dict["elements"]))
    if report_dict.get("subset_size") != len(subset):
        issues.append("subset size mismatch")
    if report_dict.get("sqrt_target") != _ceil_sqrt(len(A)):
        issues.append("sqrt target mismatch")
    if report_dict.get("meets_sqrt_target") != (len(subset) >= _ceil_sqrt(len(A))):
        issues.append("sqrt comparison mismatch")
    if branch == "degenerate":
        return issues
    if cert_dict is None:
        return issues + ["missing certificate"]
    cert = StructureCertificate.from_json_dict(cert_dict)
    issues += verify_certificate(A, cert)
    expected_branch = ADDITIVE_BRANCH if cert.variant == SMALL_ENERGY else MULTIPLICATIVE_BRANCH
    if branch != expected_branch:
        issues.append(f"branch {branch!r} inconsistent with certificate variant")
    ext = report_dict.get("extraction")
    if ext is not None:
        mode = ext.get("mode")
        bound = ext.get("bound")
        from .sidon import certified_bound
        if bound != certified_bound(ext.get("k", 0), mode):
            issues.append("extraction bound inconsistent with k and mode")
        witness = verify_multiplicity(subset, bound, mode,
                                      exempt_identity=(mode == DIFFERENCE))
        if witness is not None:
            issues.append("extraction subset fails its certified bound")
    if not subset.members <= A.members:
        issues.append("subset is not contained in A")
    return issues
