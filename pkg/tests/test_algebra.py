from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jordanmarkov.algebra import (
    NotAModuleError,
    aggregate_stability,
    classify_sn_jordan_modules,
    irrep_characters,
    irrep_multiplicities,
    is_g_module,
    jordan_closed,
    lie_closed,
    matrix_algebra_closed,
    minimality_check,
    power_closure_probe,
    table1,
    uniformization_stable_linear,
)
from jordanmarkov.catalog import (
    J,
    anti_subspace,
    build_family,
    conical_generators,
    elementary,
    gm_generators,
    gtr_generators,
    gtr_subspace,
    hky_fixture,
    nonminimal_example,
    parse_model_spec,
    sample_pis,
    tn_fixture,
)
from jordanmarkov.linalg import MatrixSubspace, RationalMatrix
from jordanmarkov.perms import conjugacy_classes, parse_group, symmetric_group

PI = (Fraction(1, 8), Fraction(1, 4), Fraction(1, 4), Fraction(3, 8))


def fam(text):
    return build_family(parse_model_spec(text))


def random_l3_subspace():
    gens = gm_generators(3)
    coeff = st.lists(st.integers(-2, 2), min_size=len(gens), max_size=len(gens))

    def build(rows):
        mats = []
        for r in rows:
            M = RationalMatrix.zeros(3)
            for c, g in zip(r, gens):
                M = M + g.scale(c)
            mats.append(M)
        return MatrixSubspace.span(mats, n=3)

    return st.lists(coeff, min_size=1, max_size=3).map(build)


def test_symm4_jordan_not_lie():
    S = fam("Symm@4")
    assert jordan_closed(S).closed
    assert not lie_closed(S).closed


def test_anti4_lie_not_jordan_with_checkable_witness():
    S = anti_subspace(4)
    assert lie_closed(S).closed
    v = jordan_closed(S)
    assert not v.closed
    assert not S.contains(v.product)
    assert v.product.is_symmetric()
    diag = [v.product[i, i] for i in range(4)]
    assert len(set(diag)) > 1
    # residual is the product minus its projection, so it is also outside S
    assert not S.contains(v.residual)


def test_hky_square_witness():
    A, B = hky_fixture(PI)
    S = MatrixSubspace.span([A, B])
    v = jordan_closed(S)
    assert not v.closed
    assert not S.contains(A @ A)
    assert not S.contains(v.product)


def test_matrix_algebra_examples():
    assert matrix_algebra_closed(fam("EI@4")).closed
    assert matrix_algebra_closed(fam("GM@5")).closed
    S = fam("EI+Symm@4")
    assert jordan_closed(S).closed and not matrix_algebra_closed(S).closed
    assert lie_closed(fam("DS@4")).closed


@settings(max_examples=40, deadline=None)
@given(random_l3_subspace())
def test_matrix_iff_jordan_and_lie(S):
    assert matrix_algebra_closed(S).closed == (jordan_closed(S).closed and lie_closed(S).closed)


@settings(max_examples=30, deadline=None)
@given(random_l3_subspace())
def test_power_probe_agrees_with_jordan(S):
    if jordan_closed(S).closed:
        assert power_closure_probe(S, 4, samples=3)


def test_power_probe_examples():
    assert power_closure_probe(fam("EI@4"), 5)
    A, B = hky_fixture(PI)
    assert not power_closure_probe(MatrixSubspace.span([A, B]), 2)
    for k in range(1, 6):
        assert J(4) ** k == J(4).scale((-1) ** (k - 1))
    with pytest.raises(ValueError):
        power_closure_probe(fam("EI@4"), 1)


def test_ei_square_is_multiple():
    # EI rates (1, 2, 0, 0): column j off-diagonals all equal the j-th rate
    rates = [1, 2, 0, 0]
    Q = RationalMatrix.zeros(4)
    for i in range(4):
        for j in range(4):
            if i != j and rates[j]:
                Q = Q + elementary(i, j, 4).scale(rates[j])
    assert fam("EI@4").contains(Q)
    assert Q @ Q == Q.scale(-sum(rates))


def test_g_module_examples():
    assert is_g_module(fam("DS@4"), symmetric_group(4)).closed
    A, B, C = tn_fixture(PI)
    v = is_g_module(MatrixSubspace.span([A, B, C]), parse_group("(13)", 4))
    assert not v.closed
    assert is_g_module(fam("GroupBased[(123)]@3"), symmetric_group(3)).closed


def test_minimality_examples():
    r = minimality_check(fam("CI@5"))
    assert r.minimal and fam("CI@5").contains(r.certificate)
    assert all(x > 0 for _, _, x in r.certificate.offdiag())
    r = minimality_check(gtr_subspace(PI), gtr_generators(PI))
    assert r.minimal
    assert minimality_check(nonminimal_example().subspace).status == "inconclusive"


def test_minimality_lp_fallback():
    # no basis element or hint is a rate matrix, the LP has to find one
    a = elementary(0, 1, 3) - elementary(1, 0, 3)
    b = elementary(1, 0, 3).scale(2) + elementary(0, 2, 3) - elementary(2, 0, 3)
    c = elementary(2, 0, 3).scale(2) + elementary(1, 2, 3).scale(2) + elementary(2, 1, 3) - elementary(0, 1, 3)
    S = MatrixSubspace.span([a, b, c])
    r = minimality_check(S)
    assert r.minimal and r.method == "lp" and S.contains(r.certificate)


def test_minimality_rejects_non_rate_subspace():
    with pytest.raises(ValueError):
        minimality_check(MatrixSubspace.span([RationalMatrix.identity(3)]))


def test_stability_examples():
    assert uniformization_stable_linear(fam("EI@4"), conical_generators(parse_model_spec("EI@4"))).stable
    for pi in sample_pis(4, 3, seed=11):
        tn = list(tn_fixture(pi))
        assert uniformization_stable_linear(MatrixSubspace.span(tn), tn).stable is True
        hky = list(hky_fixture(pi))
        assert uniformization_stable_linear(MatrixSubspace.span(hky), hky).stable is False
    v = uniformization_stable_linear(nonminimal_example().subspace)
    assert v.stable is None


def test_aggregate_any_fail():
    class V:
        def __init__(self, s):
            self.stable = s

    assert aggregate_stability([V(True), V(True)]) is True
    assert aggregate_stability([V(True), V(None), V(False)]) is False
    assert aggregate_stability([V(True), V(None)]) is None


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_character_orthogonality(n):
    # the four characters are orthonormal over S_n (independent check of the formulas)
    classes = conjugacy_classes(n)
    order = sum(c.size for c in classes)
    chis = [[irrep_characters(c.cycle_type)[k] for c in classes] for k in range(4)]
    ks = [0, 1, 3] if n == 3 else [0, 1, 2, 3]
    for a in ks:
        for b in ks:
            ip = sum(c.size * x * y for c, x, y in zip(classes, chis[a], chis[b])) / order
            assert ip == (1 if a == b else 0)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_ln_multiplicities(n):
    m = irrep_multiplicities(fam(f"GM@{n}"))
    assert m.as_tuple() == (1, 2, 1, 1)
    assert m.dimension() == n * (n - 1)


def test_small_multiplicities():
    assert irrep_multiplicities(fam("GM@3")).as_tuple() == (1, 2, 1)
    assert irrep_multiplicities(fam("Symm@4")).as_tuple() == (1, 1, 1, 0)
    assert irrep_multiplicities(anti_subspace(5)).as_tuple() == (0, 0, 0, 1)
    assert irrep_multiplicities(fam("EI@5")).as_tuple() == (1, 1, 0, 0)
    assert irrep_multiplicities(fam("DS@6")).as_tuple() == (1, 1, 1, 1)


def test_multiplicities_reject_non_module():
    with pytest.raises(NotAModuleError):
        irrep_multiplicities(gtr_subspace(PI))
    with pytest.raises(ValueError):
        irrep_multiplicities(fam("GM@2"))


@pytest.mark.parametrize("n,count", [(2, 2), (3, 8), (4, 8), (5, 6)])
def test_classification_counts(n, count):
    models = classify_sn_jordan_modules(n)
    assert len(models) == count
    assert all(jordan_closed(m.subspace).closed for m in models)
    assert all(m.name != "unnamed" for m in models)


def test_classification_names():
    assert {m.name for m in classify_sn_jordan_modules(4)} == {
        "CI", "EI", "Symm", "EI+Symm", "DS", "GM", "K3ST", "K3ST+F81"}
    assert {m.name for m in classify_sn_jordan_modules(3)} == {
        "CI", "EI", "Symm", "EI+Symm", "DS", "GM", "L_C3", "L_C3+EI"}
    with pytest.raises(ValueError):
        classify_sn_jordan_modules(8)


def test_table1_rows():
    rows = table1(sample_pis(4, 2, seed=5))
    assert len(rows) == 11
    assert all(r.matches for r in rows)
    by_model = {(r.subgroup, r.model): r.stable for r in rows}
    assert by_model[("S2", "TIM")] is False
    assert by_model[("S3", "M24")] is True
    assert by_model[("S4", "F81 (EI)")] is True
