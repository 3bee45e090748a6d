import itertools

import pytest

from oracles import schmidt_rank_float
from trinonlocal.field import OMEGA, ONE, ZERO, CycNum
from trinonlocal.states import (
    CUTS,
    DimensionError,
    Dims,
    Ket,
    NonOrthogonalError,
    StateSet,
    build_lemma1_set,
    build_product_basis,
    build_set,
    build_theorem1_set,
    build_theorem2_set,
    check_pairwise_orthogonal,
    classify_state,
    inner_product,
    random_local_permutation,
    require_orthogonal,
    schmidt_rank,
    stateset_from_json,
    stateset_to_json,
)

W2 = OMEGA * OMEGA
D333 = Dims(3, 3, 3)
D345 = Dims(3, 4, 5)


def amp_map(s, skip_stopper=True):
    return {lab: k.amps for n, (lab, k) in enumerate(s.states) if not (skip_stopper and n == s.stopper)}


def test_literal_333_amplitudes():
    s = build_lemma1_set()
    assert len(s) == 10
    assert s.ket("phi22").amps == {(2, 2, 2): ONE, (1, 1, 1): -ONE}
    assert s.ket("phi00").amps == {(2, 0, 0): ONE, (0, 0, 2): OMEGA, (0, 2, 0): W2}
    assert s.ket("phi11").amps == {(2, 1, 1): ONE, (1, 1, 2): OMEGA, (1, 2, 1): W2}
    assert s.ket("phi12").amps == {(2, 1, 2): ONE, (1, 2, 0): -ONE}
    assert s.ket("S1").amps == {idx: ONE for idx in itertools.product(range(3), repeat=3)}
    assert s.stopper_label == "S1"


@pytest.mark.parametrize("d", [3, 4, 5, 6, 7, 8])
def test_cube_size_and_orthogonality(d):
    s = build_theorem1_set(d)
    assert len(s) == d * d + 1
    assert check_pairwise_orthogonal(s) == (True, None)
    assert len(set(s.labels)) == len(s)


def test_cube_construction_matches_literal_set_at_three():
    lit, gen = build_lemma1_set(), build_theorem1_set(3)
    assert amp_map(lit) == amp_map(gen)
    assert lit.states[lit.stopper][1] == gen.states[gen.stopper][1]
    assert gen.stopper_label == "S2"


@pytest.mark.parametrize("d,counts", [
    (3, {"A0": 1, "A1": 2, "A2": 2, "A3": 2, "A4": 1, "A5": 1}),
    (5, {"A0": 1, "A1": 4, "A2": 4, "A3": 4, "A4": 6, "A5": 6}),
])
def test_family_counts(d, counts):
    s = build_theorem1_set(d)
    for fam, n in counts.items():
        assert len(s.family_members(fam)) == n


def test_d5_w_like_coordinates():
    s = build_theorem1_set(5)
    assert sorted(s.family_members("A4")) == ["phi13", "phi22", "phi23", "phi31", "phi32", "phi33"]


# transcription of the 3 x 4 x 5 set (beyond the 3 x 3 x 3 core)
LEMMA2_EXTRA = {
    "phi03": ((2, 0, 3), (0, 2, 3)), "phi13": ((2, 1, 3), (1, 2, 3)),
    "phi04": ((2, 0, 4), (0, 2, 4)), "phi14": ((2, 1, 4), (1, 2, 4)),
    "phi23": ((2, 2, 3), (0, 0, 1)), "phi24": ((2, 2, 4), (0, 0, 3)),
    "phi30": ((2, 3, 0), (0, 3, 2)), "phi31": ((2, 3, 1), (1, 3, 2)),
    "phi32": ((2, 3, 2), (0, 1, 0)), "phi33": ((2, 3, 3), (0, 1, 3)),
    "phi34": ((2, 3, 4), (0, 1, 4)),
}


def test_general_construction_equals_345_transcription():
    s = build_theorem2_set(3, 4, 5)
    assert len(s) == 21
    core = amp_map(build_lemma1_set())
    expected = dict(core)
    for lab, (a, b) in LEMMA2_EXTRA.items():
        expected[lab] = {a: ONE, b: -ONE}
    assert amp_map(s) == expected
    assert s.states[s.stopper][1].amps == {idx: ONE for idx in itertools.product(range(3), range(4), range(5))}


@pytest.mark.parametrize("dims", [
    t for t in itertools.combinations_with_replacement(range(3, 8), 3)
])
def test_general_sizes(dims):
    s = build_theorem2_set(*dims)
    d1, d2, d3 = dims
    assert len(s) == d2 * d3 + 1
    assert check_pairwise_orthogonal(s)[0]
    # non-stopper supports are disjoint: each slot in the A=d1-1 layer used once
    seen = set()
    for n, (_, k) in enumerate(s.states):
        if n == s.stopper:
            continue
        assert not (k.support() & seen)
        seen |= k.support()


@pytest.mark.parametrize("d", [3, 4, 5])
def test_equal_dims_reduce_to_cube_construction(d):
    assert amp_map(build_theorem2_set(d, d, d)) == amp_map(build_theorem1_set(d))


def test_optional_families():
    s = build_theorem2_set(3, 3, 4)
    assert s.family_members("A12") == []
    assert s.family_members("A10") == []
    assert len(s.family_members("A7")) == 1
    s = build_theorem2_set(3, 4, 4)
    assert len(s.family_members("A7")) == 1
    assert len(s.family_members("A12")) == 1
    assert build_theorem2_set(4, 5, 5).family_members("A8") == []


def test_build_set_dispatch():
    assert build_set(4, 4, 4).stopper_label == "S2"
    assert build_set(3, 4, 5).stopper_label == "S"


@pytest.mark.parametrize("bad", [(2, 3, 3), (3, 5, 4), (4, 3, 5)])
def test_bad_dims(bad):
    with pytest.raises(DimensionError):
        build_theorem2_set(*bad)


def test_cube_rejects_small_d():
    with pytest.raises(DimensionError):
        build_theorem1_set(2)
    with pytest.raises(DimensionError):
        Dims(1, 3, 3)


def test_inner_product_examples():
    s = build_lemma1_set()
    assert inner_product(s.ket("phi22"), s.ket("phi22")) == 2
    assert inner_product(s.ket("phi00"), s.ket("phi00")) == 3
    assert inner_product(s.ket("phi00"), s.ket("S1")) == ONE + OMEGA + W2 == ZERO
    x = Ket(D333, {(0, 0, 0): OMEGA})
    y = Ket(D333, {(0, 0, 0): ONE})
    assert inner_product(x, y) == OMEGA.conj()


def test_non_orthogonal_detected():
    s = StateSet(D333, (("a", Ket(D333, {(0, 0, 0): 1})),
                        ("b", Ket(D333, {(0, 0, 0): 1, (1, 1, 1): 1}))))
    ok, pair = check_pairwise_orthogonal(s)
    assert not ok and pair == ("a", "b")
    with pytest.raises(NonOrthogonalError):
        require_orthogonal(s)


def test_classify_examples():
    s = build_theorem2_set(3, 4, 5)
    assert classify_state(s.ket("phi03")).rank_tuple() == (2, 2, 1)
    assert classify_state(s.ket("phi30")).rank_tuple() == (2, 1, 2)
    assert classify_state(s.ket("phi22")).category == "genuinely_entangled"
    assert classify_state(s.ket("phi03")).category == "entangled"
    assert classify_state(s.ket("S")).category == "product"


@pytest.mark.parametrize("s", [build_lemma1_set(), build_theorem1_set(4), build_theorem2_set(3, 4, 5)],
                         ids=["333", "444", "345"])
def test_schmidt_rank_matches_float_reshape(s):
    for _, k in s.states:
        for cut in CUTS:
            assert schmidt_rank(k, cut) == schmidt_rank_float(k, cut)


def test_schmidt_rank_with_complex_phases():
    k = Ket(D333, {(0, 0, 0): ONE, (1, 1, 0): OMEGA})
    assert [schmidt_rank(k, c) for c in CUTS] == [2, 2, 1]
    prod = Ket(D333, {(0, 0, 0): ONE, (0, 1, 0): OMEGA, (1, 0, 0): CycNum(2), (1, 1, 0): 2 * OMEGA})
    assert [schmidt_rank(prod, c) for c in CUTS] == [1, 1, 1]


def test_json_round_trip():
    for s in (build_lemma1_set(), build_theorem2_set(3, 4, 5), build_product_basis(2, 2, 2)):
        back = stateset_from_json(stateset_to_json(s))
        assert back.dims == s.dims
        assert back.states == s.states
        assert back.stopper == s.stopper


def test_permutation_preserves_orthogonality():
    import random
    rng = random.Random(7)
    s = build_theorem2_set(3, 4, 5)
    p = s.permuted(random_local_permutation(s.dims, rng))
    assert check_pairwise_orthogonal(p)[0]
    assert len(p) == len(s)
