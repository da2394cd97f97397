import pytest

from sidonkit import (
    OverflowBudgetExceeded,
    fp_mult_example,
    geometric_sumproduct_example,
    hyperbola_family,
    integer_set,
    linstrom_like,
    parse_set,
    serialize_set,
    sid_k_exact,
    sidon_base,
    verify_multiplicity,
)
from sidonkit.constructions import reverify
from sidonkit.counting import difference_histogram
from sidonkit.errors import BadOrder, BadShift


def test_sidon_base_example_n50():
    S = sidon_base(50)
    assert S.elements == (0, 11, 24, 34, 41)
    assert verify_multiplicity(S, 1) is None


def test_sidon_base_sizes_and_verification():
    for N in (4, 50, 500, 5000):
        S = sidon_base(N)
        assert verify_multiplicity(S, 1) is None
        assert all(0 <= x <= N for x in S)
    assert sidon_base(4).elements == (0, 1, 3)
    assert len(sidon_base(5000)) >= 0.6 * (5000 / 2) ** 0.5


def test_linstrom_hand_base_example():
    base = integer_set([0, 1, 3, 7])
    rep = linstrom_like(2, 32, base=base)
    assert rep.output.elements == (0, 1, 2, 3, 6, 7, 14, 15)
    hist = difference_histogram(rep.output)
    assert hist.count(1) == 5
    assert rep.stats["max_multiplicity_far"] == 2
    assert rep.stats["far_bound_holds"]
    assert rep.status == "anomalous"  # r(1) = 5 > g = 2 inside the short range


def test_linstrom_generated_bases():
    for (g, N) in ((2, 100), (3, 200)):
        rep = linstrom_like(g, N)
        assert rep.stats["size_equals_g_base"]
        assert rep.stats["max_multiplicity_far"] <= g
        assert rep.status in ("pass", "anomalous")
    rep1 = linstrom_like(1, 40)
    assert rep1.status == "pass"
    assert rep1.output == rep1.extra_sets["base"]


def test_geometric_example_base2_n2():
    rep = geometric_sumproduct_example(2, 2)
    assert rep.extra_sets["gamma"].elements == (1, 2, 4)
    assert rep.extra_sets["H"].elements == (8, 64)
    assert len(rep.output) == 18 == 2 * 3**2
    assert rep.stats["cover_holds"]
    assert rep.status == "pass"
    # additive bound min(6 sqrt 3 + 3, 3 sqrt 6 + 6) = 13.348... so max subset <= 13
    bound = float(rep.stats["additive_subset_bound"])
    assert abs(bound - 13.3485) < 1e-3
    size, _ = sid_k_exact(rep.output, 1)
    assert size <= 13


def test_geometric_sizes_grid():
    for base in (2, 3):
        for n in (1, 2, 3):
            rep = geometric_sumproduct_example(base, n)
            assert len(rep.output) == n * (n + 1) ** 2
            assert rep.status == "pass"
    assert len(geometric_sumproduct_example(2, 1).output) == 4


def test_geometric_budget():
    with pytest.raises(OverflowBudgetExceeded):
        geometric_sumproduct_example(2, 8)


def test_hyperbola_examples():
    rep = hyperbola_family(13, 2, t=3)
    assert len(rep.output) == 2 * 13 - 1
    assert rep.stats["pairwise_intersections_trivial"]
    single = hyperbola_family(13, 1, t=0)  # u = 1
    assert len(single.output) == 13
    with pytest.raises(BadShift):
        hyperbola_family(13, 2, t=12)  # u = 13 = 0 mod 13


def test_hyperbola_brute_force_multiplicity():
    rep = hyperbola_family(13, 1, t=0)
    A = rep.output
    counts = {}
    for a in A:
        for b in A:
            d = ((a[0] - b[0]) % 13, (a[1] - b[1]) % 13)
            counts[d] = counts.get(d, 0) + 1
    brute = max(c for v, c in counts.items() if v != (0, 0))
    assert rep.stats["max_multiplicity"] == brute


def test_hyperbola_search_mode():
    rep = hyperbola_family(13, 2)
    assert rep.stats["searched"]
    assert rep.stats["max_multiplicity"] <= 2 * 2**2  # trivial per-pair bound
    # search result is no worse than an arbitrary fixed shift
    fixed = hyperbola_family(13, 2, t=3)
    assert rep.stats["max_multiplicity"] <= fixed.stats["max_multiplicity"]


def test_fp_mult_example():
    rep = fp_mult_example(31, 3, seed=2)
    assert rep.extra_sets["gamma"].elements == (1, 5, 25)
    assert rep.stats["HG_direct"]
    assert rep.stats["identity_holds"]
    assert len(rep.output) <= 27
    assert rep.status == "pass"
    degenerate = fp_mult_example(31, 1, seed=0)
    assert len(degenerate.output) == 1
    with pytest.raises(BadOrder):
        fp_mult_example(31, 4, seed=0)  # 4 does not divide 30
    with pytest.raises(BadOrder):
        fp_mult_example(31, 6, seed=0)  # 36 > 30 cosets exhausted


def test_fp_mult_seeded_determinism():
    a = fp_mult_example(101, 5, seed=9)
    b = fp_mult_example(101, 5, seed=9)
    c = fp_mult_example(101, 5, seed=10)
    assert a.output == b.output
    assert a.extra_sets["H"] == b.extra_sets["H"]
    assert c.extra_sets["H"] != a.extra_sets["H"]


def test_reports_reverify_from_serialized_output():
    reps = [
        linstrom_like(2, 100),
        geometric_sumproduct_example(2, 2),
        hyperbola_family(13, 2, t=3),
        fp_mult_example(31, 3, seed=2),
    ]
    for rep in reps:
        round_tripped = parse_set(serialize_set(rep.output))
        assert round_tripped == rep.output
        again = reverify(rep)
        assert again.stats["recheck_size"] == len(rep.output)
