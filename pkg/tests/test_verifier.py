import itertools
import random

import numpy as np
import pytest

from oracles import as_matrix, oplm_nullity
from trinonlocal.bipartition import ALL_CUTS
from trinonlocal.field import OMEGA, ONE, CycNum
from trinonlocal.states import (
    Dims,
    Ket,
    NonOrthogonalError,
    StateSet,
    build_lemma1_set,
    build_product_basis,
    build_theorem1_set,
    build_theorem2_set,
    random_local_permutation,
)
from trinonlocal.verifier import (
    DEFAULT_PRIMES,
    PRIMES_ENV,
    build_system,
    check_meets_bound,
    constraint_row,
    default_primes,
    float_nullity,
    float_system,
    lower_bound,
    nullity_exact,
    nullity_float,
    nullity_modp,
    verify_strongest,
)

ABC, BCA, CAB = ALL_CUTS
L1 = build_lemma1_set()


def is_prime(n):
    return n > 1 and all(n % k for k in range(2, int(n ** 0.5) + 1))


def test_default_primes_are_prime():
    assert all(is_prime(p) for p in DEFAULT_PRIMES)
    assert len(set(DEFAULT_PRIMES)) == 3


def test_primes_env_override(monkeypatch):
    monkeypatch.setenv(PRIMES_ENV, "101, 103")
    assert default_primes() == (101, 103)


def test_constraint_row_ghz_pair():
    # <phi20| I (x) E |phi12> = m[20,12] + m[02,20]
    row = constraint_row(L1.ket("phi20"), L1.ket("phi12"), ABC)
    assert row == {((0, 2), (2, 0)): ONE, ((2, 0), (1, 2)): ONE}


def test_constraint_row_single_match():
    row = constraint_row(L1.ket("phi02"), L1.ket("phi11"), ABC)
    # phi02 = |202> - |021>, phi11 = |211> + w|112> + w^2|121>; only row 2 matches
    assert row == {((0, 2), (1, 1)): ONE}


def test_constraint_row_with_stopper_sums_to_inner_product():
    # with E = I the row reduces to the plain overlap, zero for orthogonal states
    for lab in L1.labels[:-1]:
        row = constraint_row(L1.ket(lab), L1.ket("S1"), ABC)
        assert sum((c for (p, q), c in row.items() if p == q), CycNum(0)) == 0


@pytest.mark.parametrize("s,nrows,ncols", [(L1, 90, 81), (build_theorem1_set(4), 272, 256),
                                           (build_theorem2_set(3, 4, 5), 420, 400)])
def test_system_size(s, nrows, ncols):
    cs = build_system(s, ABC)
    assert len(cs.rows) == nrows
    assert cs.ncols == ncols
    assert cs.identity_in_kernel()


def test_system_size_other_cuts():
    s = build_theorem2_set(3, 4, 5)
    assert build_system(s, BCA).ncols == 15 ** 2
    assert build_system(s, CAB).ncols == 12 ** 2


CASES = [
    ("literal333", L1, 1),
    ("literal333-no-stopper", L1.without("S1"), 9),
    ("product222", build_product_basis(2, 2, 2), 4),
    ("product333", build_product_basis(3, 3, 3), 9),
    ("d4", build_theorem1_set(4), 1),
    ("345", build_theorem2_set(3, 4, 5), 1),
    ("334", build_theorem2_set(3, 3, 4), 1),
]


@pytest.mark.parametrize("name,s,expected", CASES, ids=[c[0] for c in CASES])
def test_modes_agree(name, s, expected):
    for b in ALL_CUTS:
        cs = build_system(s, b)
        ex = nullity_exact(cs).nullity
        mp = nullity_modp(cs).nullity
        fl = nullity_float(cs).nullity
        assert ex == mp == fl == oplm_nullity(s, b.tag) == expected
        # soundness ordering: mod-p nullity never below the exact one
        for p, n in nullity_modp(cs, [5, 7, 11]).per_prime.items():
            assert n >= ex


def test_bareiss_matches_sparse():
    for s in (L1, build_product_basis(2, 2, 2), L1.without("S1")):
        cs = build_system(s, BCA)
        assert nullity_exact(cs, method="bareiss").nullity == nullity_exact(cs).nullity


def test_both_orientations_same_nullity():
    for s in (L1, L1.without("S1")):
        for b in ALL_CUTS:
            single, both = build_system(s, b), build_system(s, b, orientations="both")
            assert len(both.rows) == 2 * len(single.rows)
            assert nullity_exact(single).nullity == nullity_exact(both).nullity


def test_relabeling_invariance():
    rng = random.Random(11)
    s = build_theorem2_set(3, 3, 4)
    base = [nullity_exact(build_system(s, b)).nullity for b in ALL_CUTS]
    for _ in range(3):
        p = s.permuted(random_local_permutation(s.dims, rng))
        assert [nullity_exact(build_system(p, b)).nullity for b in ALL_CUTS] == base
    rev = StateSet(s.dims, tuple(reversed(s.states)))
    assert [nullity_exact(build_system(rev, b)).nullity for b in ALL_CUTS] == base


def test_kernel_gives_orthogonality_preserving_perturbation():
    """A nontrivial kernel vector is a genuine nontrivial OPLM element."""
    s = build_product_basis(2, 2, 2)
    cs = build_system(s, ABC)
    rep = nullity_exact(cs, emit_kernel=True)
    assert rep.nullity == 4 and len(rep.kernel) == 4
    from trinonlocal.linalg import IntEchelon
    ech = IntEchelon(cs.ncols)
    for r in cs.rows:
        ech.add(r)
    ident = np.eye(cs.layout.n)
    found_nontrivial = False
    for vec in ech.kernel_basis():
        H = cs.layout.hermitian_from_vector(vec)
        H = H / np.linalg.norm(H, 2)
        E = ident + 0.25 * H
        assert np.all(np.linalg.eigvalsh(E) > 0)
        mats = [as_matrix(k, "A|BC") for _, k in s.states]
        for X, Y in itertools.combinations(mats, 2):
            assert abs(np.sum(np.conj(X) * (Y @ E.T))) < 1e-12
        if not np.allclose(E, E[0, 0] * ident):
            found_nontrivial = True
    assert found_nontrivial


def test_kernel_of_trivial_set_is_identity():
    cs = build_system(L1, CAB)
    rep = nullity_exact(cs, emit_kernel=True)
    assert rep.nullity == 1
    assert set(rep.kernel[0].values()) == {"1"}
    assert len(rep.kernel[0]) == 9


def test_modp_rejects_small_and_duplicate_primes():
    cs = build_system(L1, ABC)
    with pytest.raises(ValueError):
        nullity_modp(cs, [3])
    with pytest.raises(ValueError):
        nullity_modp(cs, [101, 101])


def test_modp_inconclusive_not_refutation():
    rep = nullity_modp(build_system(L1.without("S1"), ABC), [101])
    assert rep.verdict == "inconclusive"


def test_non_orthogonal_input_rejected():
    d = Dims(2, 2, 2)
    s = StateSet(d, (("a", Ket(d, {(0, 0, 0): ONE})), ("b", Ket(d, {(0, 0, 0): OMEGA}))))
    with pytest.raises(NonOrthogonalError):
        build_system(s, ABC)
    with pytest.raises(NonOrthogonalError):
        verify_strongest(s)


def test_float_system_matches_integer_rows():
    cs = build_system(L1, BCA)
    M = float_system(L1, BCA)
    assert M.shape == (len(cs.rows), cs.ncols)
    # row spaces coincide: stacking does not raise the rank
    A = np.array(cs.dense(), dtype=float)
    r = np.linalg.matrix_rank
    assert r(np.vstack([A, M])) == r(A) == r(M)
    assert float_nullity(np.zeros((0, 5))) == 5


def test_float_tolerance_validation():
    with pytest.raises(ValueError):
        nullity_float(build_system(L1, ABC), tol=0)


@pytest.mark.parametrize("dims,expected", [((3, 3, 3), 10), ((4, 4, 4), 17), ((3, 4, 5), 21),
                                           ((3, 3, 4), 13), ((2, 2, 2), 5), ((2, 3, 7), 22)])
def test_lower_bound(dims, expected):
    assert lower_bound(*dims) == expected


def test_verify_strongest_verdicts():
    assert verify_strongest(L1).overall == "strongest"
    assert verify_strongest(build_product_basis(2, 2, 2)).overall == "not_strongest"
    assert verify_strongest(L1.without("S1"), mode="modp").overall == "inconclusive"
    rep = verify_strongest(L1, workers=3)
    assert set(rep.reports) == {"A|BC", "B|CA", "C|AB"}
    assert check_meets_bound(L1)
