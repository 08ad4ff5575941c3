from fractions import Fraction

import pytest

from jordanmarkov.catalog import (
    G_HKY,
    G_TN,
    J,
    R,
    SpecError,
    anti_subspace,
    build_family,
    display_name,
    elementary,
    equivariant_subspace,
    equivariant_tr_generators,
    equivariant_tr_subspace,
    gtr_generators,
    gtr_subspace,
    hky_fixture,
    in_nonlinear_cone,
    nonlinear_example,
    nonminimal_example,
    parse_model_spec,
    sample_pis,
    standard_generators,
    tn_fixture,
)
from jordanmarkov.linalg import MatrixSubspace, RationalMatrix, solve_fixed_space
from jordanmarkov.perms import conjugate_action, parse_group, perm_matrix, symmetric_group
from jordanmarkov.uniformization import detailed_balance_check, is_rate_matrix

PI = (Fraction(1, 8), Fraction(1, 4), Fraction(1, 4), Fraction(3, 8))


def fam(text):
    return build_family(parse_model_spec(text))


def test_elementary():
    assert elementary(0, 2, 3) == RationalMatrix([[-1, 0, 1], [0, 0, 0], [0, 0, 0]])
    # L_ii is the zero matrix by convention
    assert elementary(1, 1, 3).is_zero()


def test_standard_generators():
    g = standard_generators(3)
    assert g.J == J(3)
    assert J(3) == RationalMatrix([
        [Fraction(-2, 3), Fraction(1, 3), Fraction(1, 3)],
        [Fraction(1, 3), Fraction(-2, 3), Fraction(1, 3)],
        [Fraction(1, 3), Fraction(1, 3), Fraction(-2, 3)]])
    assert R(0, 3) == RationalMatrix([[0, 0, 0], [1, -1, 0], [1, 0, -1]])


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_family_dimensions_closed_forms(n):
    assert fam(f"CI@{n}").dim == 1
    assert fam(f"EI@{n}").dim == n
    assert fam(f"Symm@{n}").dim == n * (n - 1) // 2
    assert fam(f"EI+Symm@{n}").dim == n * (n - 1) // 2 + n - 1
    assert fam(f"DS@{n}").dim == (n - 1) ** 2
    assert fam(f"GM@{n}").dim == n * (n - 1)
    assert anti_subspace(n).dim == (n - 1) * (n - 2) // 2


def test_spec_dimension_examples():
    assert fam("K3ST@4").dim == 3
    assert fam("K3ST+F81@4").dim == 6
    assert fam("GroupBased[(123)]@3").dim == 2
    assert fam("DS@5").dim == 16


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ds_equals_zero_row_and_column_sums(n):
    ones = RationalMatrix([[1] * n for _ in range(n)])
    oracle = solve_fixed_space(n, [lambda X: X @ ones, lambda X: ones @ X])
    assert fam(f"DS@{n}") == oracle


def test_anti_is_antisymmetric_part_of_ds():
    n = 4
    ds = fam("DS@4")
    A = anti_subspace(n)
    assert A <= ds
    assert all(B.is_antisymmetric() for B in A.basis)


def test_gtr_is_reversible_and_minimal_sized():
    S = gtr_subspace(PI)
    assert S.dim == 6
    for B in gtr_generators(PI):
        assert is_rate_matrix(B) and detailed_balance_check(B, PI)
    # oracle: all zero-row-sum matrices with D(pi) X symmetric
    D = RationalMatrix.diag(PI)
    ones = RationalMatrix([[1] * 4 for _ in range(4)])
    oracle = solve_fixed_space(4, [lambda X: X @ ones, lambda X: D @ X - (D @ X).T])
    assert S == oracle


def test_tn_and_hky_are_orbit_constructions():
    for pi in sample_pis(4, 3, seed=7):
        assert MatrixSubspace.span(tn_fixture(pi)) == equivariant_tr_subspace(pi, parse_group(G_TN, 4))
        assert MatrixSubspace.span(hky_fixture(pi)) == equivariant_tr_subspace(pi, parse_group(G_HKY, 4))


@pytest.mark.parametrize("gens", ["(12),(34)", "(1324),(12)", "(12)(34)", "(123)"])
def test_equivariance_moves_pi(gens):
    # conjugating by s in G maps TR_(pi,G) onto TR_(pi K_s, G)
    G = parse_group(gens, 4)
    for s in G.generators:
        K = perm_matrix(s)
        moved_pi = tuple(sum(PI[i] * K[i, j] for i in range(4)) for j in range(4))
        image = MatrixSubspace.span([conjugate_action(s, X) for X in equivariant_tr_generators(PI, G)])
        assert image == equivariant_tr_subspace(moved_pi, G)


def test_conjugating_tn_by_double_transposition():
    # K^T Q(s, pi) K for (12)(34) swaps the pi entries pairwise
    s = parse_group("(12)(34)", 4).generators[0]
    A, B, C = tn_fixture(PI)
    Q = A.scale(2) + B.scale(3) + C.scale(5)
    A2, B2, C2 = tn_fixture((PI[1], PI[0], PI[3], PI[2]))
    assert conjugate_action(s, Q) == A2.scale(2) + B2.scale(3) + C2.scale(5)


def test_sn_equivariant_space_is_CI():
    # brute-force fixed space of L_4 under S_4: only span(J)
    S4 = symmetric_group(4)
    ones = RationalMatrix([[1] * 4 for _ in range(4)])
    conds = [lambda X: X @ ones] + [lambda X, s=s: conjugate_action(s, X) - X for s in S4.generators]
    fixed = solve_fixed_space(4, conds)
    assert fixed.dim == 1
    assert equivariant_subspace(S4) == fixed == MatrixSubspace.span([J(4)])


def test_nonminimal_example_dimensions():
    ex = nonminimal_example()
    assert ex.subspace.dim == 2
    assert ex.cone_span.dim == 1


def test_nonlinear_example():
    ex = nonlinear_example()
    assert ex.cone_span == build_family(parse_model_spec("GM@2"))
    assert is_rate_matrix(ex.excluded)
    assert ex.subspace.contains(ex.excluded)
    assert not in_nonlinear_cone(ex.excluded)
    assert in_nonlinear_cone(RationalMatrix([[-1, 1], [3, -3]]))


def test_random_pi_is_seeded_and_valid():
    a = sample_pis(4, 5, seed=3)
    assert a == sample_pis(4, 5, seed=3)
    assert all(sum(p) == 1 and min(p) > 0 for p in a)


@pytest.mark.parametrize("text", ["Foo@4", "GTR@4", "TN[pi=random]@5", "GTR[pi=1/2,1/2]@4",
                                  "GroupBased@4", "EI@1", "GTR[pi=1,0,0,0]@4"])
def test_bad_specs(text):
    with pytest.raises(SpecError):
        parse_model_spec(text)


def test_aliases_and_names():
    assert parse_model_spec("F81@4").family == "EI"
    assert display_name(parse_model_spec("K3ST@4")) == "K3ST"
    assert display_name(parse_model_spec("K3ST+F81@4")) == "K3ST+F81"
    assert display_name(parse_model_spec("TN93[pi=random]@4")) == "TN93"
    assert parse_model_spec("EqTR[pi=random]@4").group == "e"
    spec = parse_model_spec("GTR[pi=1/8,1/4,1/4,3/8]@4")
    assert parse_model_spec(spec.text()) == spec
