"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from conftest import (
    cayley_rectangle_found,
    mixed_corpus,
    oracle_energy_grouped,
    oracle_energy_prime,
)
from sidonkit import (
    AmbientSpec,
    EmptyCore,
    BFamilyParams,
    GroundSet,
    bfamily_size_upper,
    dense_core_extract,
    diffset_bounds,
    energy_gap_decompose,
    energy_k,
    energy_prime_k,
    extract_random,
    geometric_sumproduct_example,
    hyperbola_family,
    integer_range,
    integer_set,
    linstrom_like,
    rigid_structure,
    sid_k_exact,
    sidon_base,
    sidon_slice_audit,
    sum_product_pipeline,
    verify_bfamily,
    verify_certificate,
    verify_multiplicity,
    verify_pipeline_report,
)


def _report(num: int, label: str, ok: bool, elapsed: float | None = None) -> None:
    stamp = f" [{elapsed:.1f}s]" if elapsed is not None else ""
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {label}{stamp}")
    assert ok, f"criterion {num} failed: {label}"


@pytest.fixture(scope="module")
def corpus200():
    return mixed_corpus(20260809, 200, max_size=10)


def test_c01_oracle_equivalence(corpus200):
    t0 = time.monotonic()
    for A in corpus200:
        for k in (2, 3, 4):
            assert energy_k(A, k, "difference").value == oracle_energy_grouped(A, k)
            assert energy_prime_k(A, k) == oracle_energy_prime(A, k)
    elapsed = time.monotonic() - t0
    _report(1, f"histogram and distinct-tuple energies match enumeration on "
               f"200 sets, k in 2..4, runtime < 30 s", elapsed < 30, elapsed)


def test_c02_identity_suite(corpus200):
    from sidonkit.counting import difference_histogram
    violations = 0
    for A in corpus200:
        hist = difference_histogram(A)
        zero = A.ambient.identity("difference")
        if sum(c for _, c in hist.iter_items()) != len(A) ** 2:
            violations += 1
        if any(hist.count(v) != c for v, c in hist.iter_items()):
            violations += 1
        from sidonkit.ambient import negate
        if any(hist.count(negate(A.ambient, v)) != c for v, c in hist.iter_items()):
            violations += 1
        e = {k: energy_k(A, k).value for k in (1, 2, 3, 4)}
        if energy_k(A, 2, "sum").value != e[2]:
            violations += 1
        if any(e[k + 1] > len(A) * e[k] for k in (1, 2, 3)):
            violations += 1
        if any(e[k] ** 2 > e[k - 1] * e[k + 1] for k in (2, 3)):
            violations += 1
        assert zero is not None
    _report(2, "sum identity, symmetry, E2 = sum-variant E2, monotonicity, "
               "log-convexity on 200 sets", violations == 0)


def test_c03_verifier_cross_equivalence():
    rng = random.Random(333)
    disagreements = 0
    for _ in range(200):
        if rng.random() < 0.5:
            S = integer_set(rng.sample(range(60), rng.randint(1, 14)))
        else:
            N = rng.choice([15, 24, 36, 45, 60])
            S = GroundSet.from_iterable(AmbientSpec.mod(N),
                                        rng.sample(range(N), rng.randint(1, 14)))
        for g in (1, 2, 3, 4):
            mult = verify_multiplicity(S, g)
            fam = verify_bfamily(S, BFamilyParams(2, g))
            if (mult is None) != (fam is None):
                disagreements += 1
    cayley_checked = 0
    for _ in range(30):
        N = rng.choice([12, 20, 30, 45, 60])
        S = GroundSet.from_iterable(AmbientSpec.mod(N),
                                    rng.sample(range(N), rng.randint(2, 10)))
        for g in (1, 2, 3, 4):
            fam = verify_bfamily(S, BFamilyParams(2, g))
            if (fam is not None) != cayley_rectangle_found(S, 2, g):
                disagreements += 1
            cayley_checked += 1
    _report(3, f"intersection-family vs multiplicity on 200 sets and vs the "
               f"bipartite-rectangle search on {cayley_checked} modular instances",
            disagreements == 0)


def test_c04_extraction_contract():
    t0 = time.monotonic()
    A = integer_range(0, 1024)
    n = 1024
    e2_closed = (2 * n**3 + n) // 3
    assert energy_k(A, 2).value == e2_closed
    for m in range(1, 11):
        S = integer_range(0, m)
        brute = sum(1 for a in range(m) for b in range(m) for c in range(m)
                    for d in range(m) if a - b == c - d)
        assert brute == (2 * m**3 + m) // 3
    ok = True
    for k in (2, 3):
        for mode, bound in (("difference", 3 * k - 3), ("sum", 2 * k - 2)):
            res = extract_random(A, k, mode, seed=420, trials=20)
            energy = res.energy
            target = 0.1 * (n ** (2 * k) / energy) ** (1 / (2 * k - 1))
            sizes = sorted(res.trial_sizes)
            median = sizes[len(sizes) // 2]
            exempt = mode == "difference"
            if verify_multiplicity(res.subset, bound, mode, exempt_identity=exempt) is not None:
                ok = False
            if median < target:
                ok = False
    elapsed = time.monotonic() - t0
    _report(4, "20-trial extraction verified at 3k-3 / 2k-2 with median size "
               "above the 0.1 floor, runtime < 60 s", ok and elapsed < 60, elapsed)


def test_c05_exact_small_cases():
    assert sid_k_exact(integer_range(1, 6), 1)[0] == 3
    assert sid_k_exact(integer_range(1, 6), 2)[0] == 4
    rng = random.Random(55)
    ok = True
    for _ in range(20):
        A = integer_set(rng.sample(range(10**5), rng.randint(2, 10)))
        if sid_k_exact(A, len(A) - 1)[0] != len(A):
            ok = False
    _report(5, "exact small maxima 3 and 4 on [1..5]; full set at k = |A|-1", ok)


def _segment_bound_holds(S, g: int) -> bool:
    lo = min(S.elements)
    assert lo >= 0
    N = max(S.elements) + 1
    bound = bfamily_size_upper(N, 2, g, "segment").bound
    return len(S) < bound


def test_c06_size_bound_audit():
    from sidonkit import sid_k_greedy
    ok = True
    produced = []
    for N in (50, 200, 1000):
        produced.append((sidon_base(N), 1))
    for g, N in ((2, 100), (3, 300)):
        rep = linstrom_like(g, N)
        if verify_multiplicity(rep.output, g) is None:
            produced.append((rep.output, g))
    res = extract_random(integer_range(0, 1024), 2, seed=11, trials=5)
    produced.append((res.subset, 3))
    for g in (1, 2, 3):
        produced.append((sid_k_greedy(integer_range(0, 300), g, seed=g), g))
    produced.append((sid_k_exact(integer_range(0, 31), 2, cap=31)[1], 2))
    for S, g in produced:
        if len(S) >= 2 and not _segment_bound_holds(S, g):
            ok = False
    group_checked = 0
    for N, g in ((13, 1), (21, 1), (31, 1), (13, 2), (21, 2)):
        amb = AmbientSpec.mod(N)
        full = GroundSet.from_iterable(amb, range(N))
        size, witness = sid_k_exact(full, g, cap=N)
        assert verify_multiplicity(witness, g) is None
        bound = bfamily_size_upper(N, 2, g, "finite-group").bound
        if not size < bound:
            ok = False
        group_checked += 1
    _report(6, f"segment bound on every produced bounded-multiplicity set; "
               f"group bound sqrt(gN)+1 on {group_checked} exact searches", ok)


def test_c07_constructions():
    t0 = time.monotonic()
    ok = True
    for base in (2, 3):
        for n in (1, 2, 3):
            rep = geometric_sumproduct_example(base, n)
            if len(rep.output) != n * (n + 1) ** 2 or rep.status != "pass":
                ok = False
    for p, k in ((13, 2), (101, 3)):
        rep = hyperbola_family(p, k)  # search mode
        if len(rep.output) != k * p - k + 1:
            ok = False
        if not rep.stats["pairwise_intersections_trivial"]:
            ok = False
        if rep.stats["max_multiplicity"] > k * k + 5 * k**1.5:
            ok = False
    for g in (2, 3):
        for N in (100, 1000):
            rep = linstrom_like(g, N)
            if rep.stats["max_multiplicity_far"] > g:
                ok = False
            if rep.status == "fail":
                ok = False
            if rep.stats["max_multiplicity_overall"] > g and rep.status != "anomalous":
                ok = False
    elapsed = time.monotonic() - t0
    _report(7, "geometric sizes n(n+1)^2, parabola sizes kp-k+1 within the "
               "k^2+5k^1.5 ceiling, dilated-base far-range bound with anomaly "
               "flag, runtime < 60 s", ok and elapsed < 60, elapsed)


def _varied_inputs() -> list[GroundSet]:
    rng = random.Random(888)
    sets = []
    for n in (8, 16, 33, 64, 128):
        sets.append(integer_range(0, n))
        sets.append(integer_set(range(0, 3 * n, 3)))
        sets.append(integer_set(range(7, 7 + 11 * n, 11)))
    for N in (100, 400, 1600, 2500):
        sets.append(sidon_base(N))
    for _ in range(10):
        m = rng.randint(8, 40)
        sets.append(integer_set(rng.sample(range(2000), m)))
    for _ in range(8):
        ap = list(range(0, rng.randint(16, 40)))
        far = rng.sample(range(10**5, 2 * 10**5), rng.randint(4, 12))
        sets.append(integer_set(ap + far))
    for _ in range(8):
        step = rng.choice([5, 9, 17])
        sets.append(integer_set([step * i for i in range(rng.randint(10, 30))]
                                + rng.sample(range(3000, 4000), 6)))
    p = 4099
    amb = AmbientSpec.prime_field(p)
    for _ in range(5):
        sets.append(GroundSet.from_iterable(amb, rng.sample(range(p), rng.randint(8, 60))))
    return sets


def test_c08_certificate_self_verification():
    inputs = _varied_inputs()
    assert len(inputs) >= 50
    ok = True
    eps = Fraction(1, 8)
    l_max = math.ceil(2 / eps) + 2
    for A in inputs:
        cert = energy_gap_decompose(A, Fraction(1, 4), eps)
        if verify_certificate(A, cert):
            ok = False
        if len(cert.trace) > l_max - 1:
            ok = False
        if cert.variant == "popular-core":
            if 2 * cert.core["core_mass"] < cert.core["mass_total"]:
                ok = False
        try:
            rigid = rigid_structure(A, Fraction(1, 4), eps, certificate=cert)
        except EmptyCore:
            rigid = None  # singleton band: no rigid output exists
        if rigid is not None and verify_certificate(A, rigid):
            ok = False
        if A.ambient.kind == "prime-field" and len(A) ** 2 >= A.ambient.modulus:
            continue
        pipe = sum_product_pipeline(A, eps=eps, seed=77, trials=4)
        if verify_pipeline_report(A, pipe.to_json_dict()):
            ok = False
    _report(8, f"decompose/rigid/pipeline certificates recompute exactly on "
               f"{len(inputs)} varied inputs; loop bound and half-mass hold", ok)


def test_c09_dense_core_floor():
    rng = random.Random(999)
    ok = True
    for _ in range(50):
        A = integer_set(rng.sample(range(500), rng.randint(2, 30)))
        for g in (1, 2):
            _, rep = dense_core_extract(A, g)
            if rep["energy_core"] * 4 ** ((g + 1) ** 2) < rep["energy_input"]:
                ok = False
    _report(9, "dense-core energy floor 4^-(g+1)^2 on 50 random sets, g in {1,2}", ok)


def test_c10_heritability():
    t0 = time.monotonic()
    ok = True
    size, witness = sid_k_exact(integer_range(0, 41), 2, cap=41)
    assert verify_multiplicity(witness, 2) is None
    for S in (witness, integer_set([0, 1, 3, 7, 8, 12])):
        rep = sidon_slice_audit(S)
        if rep.verdict != "holds":
            ok = False
    elapsed = time.monotonic() - t0
    _report(10, f"every slice of the exact-search witness (size {size}) and "
                f"the hand set is Sidon", ok, elapsed)


def test_c11_diffset_proof_facts():
    rng = random.Random(111)
    ok = True
    for _ in range(100):
        A = integer_set(rng.sample(range(300), rng.randint(1, 12)))
        rep = diffset_bounds(A, rng.randint(1, 3))
        if not rep.details["facts_hold"]:
            ok = False
    _report(11, "r_(D-D) >= |A| on D and r_(D+S) >= |A| on S for 100 random sets", ok)


def test_c12_pipeline_end_to_end():
    t0 = time.monotonic()
    ok = True
    powers = integer_set([2**i for i in range(40)])
    rep_add = sum_product_pipeline(powers, seed=12)
    if rep_add.branch != "additive-small-energy":
        ok = False
    if len(rep_add.subset) < 0.9 * len(powers):
        ok = False
    if not rep_add.verified or verify_pipeline_report(powers, rep_add.to_json_dict()):
        ok = False
    segment = integer_range(1, 4097)
    rep_mult = sum_product_pipeline(segment, seed=12)
    if rep_mult.branch != "multiplicative-after-structure":
        ok = False
    if not rep_mult.verified:
        ok = False
    l = rep_mult.chosen_l
    core_n = len(rep_mult.core_set)
    energy = rep_mult.extraction.energy
    target = 0.25 * (core_n ** (2 * l) / energy) ** (1 / (2 * l - 1))
    if len(rep_mult.subset) < target:
        ok = False
    assert isinstance(rep_mult.meets_sqrt_target, bool)  # informational comparison
    if verify_pipeline_report(segment, rep_mult.to_json_dict()):
        ok = False
    elapsed = time.monotonic() - t0
    _report(12, f"additive branch keeps >= 0.9|A| on the power set; "
                f"multiplicative branch extracts {len(rep_mult.subset)} >= "
                f"{target:.1f} at l = {l} (sqrt target {rep_mult.sqrt_target}: "
                f"{rep_mult.meets_sqrt_target}), runtime < 120 s",
            ok and elapsed < 120, elapsed)
