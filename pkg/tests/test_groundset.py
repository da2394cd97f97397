import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sidonkit import (
    AmbientMismatch,
    AmbientSpec,
    DuplicateElement,
    GroundSet,
    MalformedInput,
    NonCanonicalElement,
    UnsupportedMode,
    affine_image,
    co_sidon_check,
    integer_range,
    integer_set,
    parse_set,
    serialize_set,
    set_compose,
    shift_set,
)


def test_set_compose_examples():
    assert set_compose(integer_set([0, 1]), integer_set([0, 2]), "sum").elements == (0, 1, 2, 3)
    A = integer_set([0, 1, 3])
    assert set_compose(A, A, "difference").elements == (-3, -2, -1, 0, 1, 2, 3)
    G = integer_set([1, 2, 4])
    assert set_compose(G, G, "product").elements == (1, 2, 4, 8, 16)


def test_set_compose_identities():
    A = integer_set([3, 5, 9])
    assert set_compose(A, integer_set([0]), "sum") == A
    assert affine_image(A, 1, 0) == A


def test_set_compose_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        set_compose(integer_set([1]), GroundSet.from_iterable(AmbientSpec.mod(5), [1]), "sum")


def test_set_compose_ratio():
    F = AmbientSpec.prime_field(7)
    A = GroundSet.from_iterable(F, [1, 2, 3])
    B = GroundSet.from_iterable(F, [0, 2])
    from sidonkit import DivisionByZero
    with pytest.raises(DivisionByZero):
        set_compose(A, B, "ratio")
    ok = set_compose(A, B, "ratio", skip_noninvertible=True)
    assert ok.elements == (1, 4, 5)  # {1,2,3} / {2} mod 7
    with pytest.raises(UnsupportedMode):
        set_compose(integer_set([1, 2]), integer_set([1, 2]), "ratio")


def test_affine_image_examples():
    A = integer_set([0, 1, 3])
    assert affine_image(A, 2, 0).elements == (0, 2, 6)
    assert affine_image(A, 1, 5).elements == (5, 6, 8)
    assert affine_image(A, 2, 1).elements == (1, 3, 7)
    with pytest.raises(NonCanonicalElement):
        affine_image(A, 0, 1)
    with pytest.raises(UnsupportedMode):
        affine_image(GroundSet.from_iterable(AmbientSpec.plane(5), [(1, 2)]), 2, 0)


def test_shift_set_plane():
    P = AmbientSpec.plane(5)
    A = GroundSet.from_iterable(P, [(0, 0), (1, 2)])
    assert shift_set(A, (4, 4)).elements == ((0, 1), (4, 4))


def test_parse_json_example():
    A = parse_set('{"ambient": {"kind": "integers"}, "elements": [3, 1, 0]}', dedupe=True)
    assert A.elements == (0, 1, 3)
    with pytest.raises(NonCanonicalElement):
        parse_set('{"ambient": {"kind": "prime-field", "p": 13}, "elements": [13]}')


def test_parse_duplicates():
    text = '{"ambient": {"kind": "integers"}, "elements": [1, 1]}'
    with pytest.raises(DuplicateElement):
        parse_set(text)
    with pytest.warns(UserWarning, match="duplicate"):
        assert parse_set(text, dedupe=True).elements == (1,)


def test_parse_text_format():
    A = parse_set("# ambient: integers\n# label: demo\n3\n1\n0\n")
    assert A.elements == (0, 1, 3)
    assert A.label == "demo"
    B = parse_set("# ambient: prime-square-plane p=5\n0,0\n4,3\n")
    assert B.elements == ((0, 0), (4, 3))
    with pytest.raises(MalformedInput):
        parse_set("3\n1\n")  # header missing
    with pytest.raises(MalformedInput) as err:
        parse_set("# ambient: integers\nx\n")
    assert err.value.line == 2
    with pytest.raises(MalformedInput):
        parse_set("{not json")
    with pytest.raises(MalformedInput):
        parse_set("")


def test_round_trip_both_formats():
    sets = [
        integer_set([-5, 0, 7], label="ints"),
        GroundSet.from_iterable(AmbientSpec.mod(12), [0, 3, 11]),
        GroundSet.from_iterable(AmbientSpec.prime_field(13), [0, 1, 12]),
        GroundSet.from_iterable(AmbientSpec.plane(5), [(0, 0), (4, 3)], label="pl"),
    ]
    for A in sets:
        for fmt in ("json", "text"):
            B = parse_set(serialize_set(A, fmt))
            assert B == A
            assert B.label == A.label


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(min_value=-(2**62), max_value=2**62), min_size=0, max_size=30),
       st.sampled_from(["json", "text"]))
def test_round_trip_random_integers(elems, fmt):
    A = integer_set(elems)
    assert parse_set(serialize_set(A, fmt)) == A


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(min_value=0, max_value=12), max_size=13),
       st.sets(st.integers(min_value=0, max_value=12), max_size=13))
def test_sumset_cardinality_bounds(xs, ys):
    F = AmbientSpec.prime_field(13)
    X = GroundSet.from_iterable(F, xs)
    Y = GroundSet.from_iterable(F, ys)
    if not xs or not ys:
        return
    S = set_compose(X, Y, "sum")
    assert max(len(X), len(Y)) <= len(S) <= len(X) * len(Y)
    assert (len(S) == len(X) * len(Y)) == co_sidon_check(X, Y)


def test_sorted_distinct_enforced():
    with pytest.raises(NonCanonicalElement):
        GroundSet(AmbientSpec.integers(), (3, 1))
    with pytest.raises(NonCanonicalElement):
        GroundSet(AmbientSpec.integers(), (1, 1))


def test_serialize_is_json():
    A = integer_range(0, 4)
    obj = json.loads(serialize_set(A))
    assert obj["elements"] == [0, 1, 2, 3]
