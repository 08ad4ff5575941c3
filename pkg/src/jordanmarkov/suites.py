"""Named identity suites.  Each returns a list of :class:`Check` results.

Every check is exact unless its name says otherwise; a failing check carries
the offending matrices so the failure can be reproduced by hand.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import jordan_closed, matrix_algebra_closed, uniformization_stable_linear
from .catalog import (
    C,
    J,
    R,
    build_family,
    elementary,
    gm_generators,
    hky_fixture,
    L_perm,
    parse_model_spec,
    sample_pis,
    tn_fixture,
)
from .linalg import MatrixSubspace, RationalMatrix, format_rational, rref
from .perms import Permutation
from .uniformization import detailed_balance_check, expm_reference, expm_uniformization, stationary_distribution


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        if self.witness:
            out["witness"] = self.witness
        return out


def _eq_check(name: str, lhs: RationalMatrix, rhs: RationalMatrix) -> Check:
    if lhs == rhs:
        return Check(name, True)
    return Check(name, False, "mismatch", {"lhs": lhs.to_json(), "rhs": rhs.to_json()})


def _collapse(name: str, checks: list) -> Check:
    """Fold many sub-checks into one line, keeping the first failure."""
    bad = [c for c in checks if not c.passed]
    if not bad:
        return Check(name, True, f"{len(checks)} cases")
    return Check(name, False, f"{len(bad)}/{len(checks)} failed; first: {bad[0].name}", bad[0].witness)


# ---------------------------------------------------------------------------
# rate-matrix algebra


def _has_left_identity(n: int) -> bool:
    """Solve ``L X = X`` for all basis ``X`` with ``L`` in ``L_n``, exactly."""
    basis = gm_generators(n)
    unknowns = len(basis)
    rows = []
    for X in basis:
        prods = [E @ X for E in basis]
        for a in range(n):
            for b in range(n):
                rows.append([P[a, b] for P in prods] + [X[a, b]])
    _, rank, pivots = rref(rows, unknowns + 1)
    return unknowns not in pivots


def rate_algebra_suite(ns=(2, 3, 4, 5)) -> list:
    out = []
    for n in ns:
        L = build_family(parse_model_spec(f"GM@{n}"))
        out.append(Check(f"L_{n} closed under matrix products", matrix_algebra_closed(L).closed))
        # constant-column matrices 1 b^T with sum(b) = 0 lie in L_n
        bs = [[Fraction(1) if c == k else Fraction(-1) if c == k + 1 else Fraction(0) for c in range(n)]
              for k in range(n - 1)]
        Bs = [RationalMatrix([b for _ in range(n)]) for b in bs]
        ann, ident = [], []
        for Q in L.basis:
            for k, B in enumerate(Bs):
                ann.append(_eq_check(f"Q B_{k} = 0", Q @ B, RationalMatrix.zeros(n)))
                ident.append(_eq_check(f"Q (-J + B_{k}) = Q", Q @ (B - J(n)), Q))
        out.append(_collapse(f"L_{n}: Q B = 0 for constant-column B", ann))
        out.append(_collapse(f"L_{n}: -J + B is a right identity", ident))
        out.append(Check(f"L_{n} has no left identity", not _has_left_identity(n),
                         "L X = X for all basis X has no solution L in L_n"))
    return out


# ---------------------------------------------------------------------------
# products of elementary generators


def elementary_jordan_rhs(i, j, k, l, n, label=None) -> RationalMatrix:
    """Right side of the delta formula, with ``L_aa`` read as zero.

    ``label(a, b)`` builds the matrix called ``L_ab``; the default is the
    transposed labelling (1 at ``(b, a)``, -1 at ``(b, b)``) under which the
    formula holds as written.
    """
    if label is None:
        label = lambda a, b: elementary(b, a, n)
    L = lambda a, b: RationalMatrix.zeros(n) if a == b else label(a, b)
    out = RationalMatrix.zeros(n)
    if j == l:
        out = out - (L(i, j) + L(k, l))
    if j == k:
        out = out + (L(i, l) - L(k, l))
    if i == l:
        out = out + (L(k, j) - L(i, j))
    return out


def elementary_jordan_suite(ns=(2, 3, 4, 5)) -> list:
    """The delta formula for ``L_ij (.) L_kl`` over every index tuple.

    Checked under the transposed labelling, where it holds, and in the
    row-oriented form ``-d_ik(L_ij + L_kl) + d_il(L_kj - L_kl) + d_jk(L_il - L_ij)``.
    The literal row-labelled reading is reported as a finding.
    """
    out = []
    for n in ns:
        col, row, literal = [], [], 0
        pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
        E = lambda a, b: elementary(a, b, n)
        for (i, j), (k, l) in itertools.product(pairs, repeat=2):
            name = f"L_{i+1}{j+1} . L_{k+1}{l+1}"
            lhs_t = E(j, i).jordan(E(l, k))
            col.append(_eq_check(name, lhs_t, elementary_jordan_rhs(i, j, k, l, n)))
            lhs = E(i, j).jordan(E(k, l))
            # row form is the column form with every index pair reversed
            row.append(_eq_check(name, lhs, elementary_jordan_rhs(j, i, l, k, n)))
            literal += lhs == elementary_jordan_rhs(i, j, k, l, n, label=E)
        out.append(_collapse(f"elementary Jordan formula, transposed labels, n={n}", col))
        out.append(_collapse(f"elementary Jordan formula, row form, n={n}", row))
        out.append(Check(f"finding: literal row-labelled formula, n={n}", True,
                         f"holds for {literal}/{len(pairs) ** 2} tuples"))
    return out


def prods1_suite(ns=(3, 4, 5, 6)) -> list:
    out = []
    for n in ns:
        Jm = J(n)
        rr, rc, cc = [], [], []
        for i in range(n):
            for j in range(n):
                Ri, Rj, Ci, Cj = R(i, n), R(j, n), C(i, n), C(j, n)
                if i != j:
                    rr.append(_eq_check(f"R_{i+1} . R_{j+1}", Ri.jordan(Rj), -(Ri + Rj)))
                delta = n if i == j else 0
                rc.append(_eq_check(f"R_{i+1} . C_{j+1}", Ri.jordan(Cj), (Jm - Rj).scale(delta) - Cj.scale(2)))
                if i == j:
                    cc.append(_eq_check(f"C_{i+1} . C_{i+1}", Ci.jordan(Ci), Ci.scale(-2 * (n - 1))))
                else:
                    rhs = Ci + Cj - (elementary(i, j, n) + elementary(j, i, n)).scale(n)
                    cc.append(_eq_check(f"C_{i+1} . C_{j+1}", Ci.jordan(Cj), rhs))
        out.append(_collapse(f"R_i . R_j = -(R_i + R_j), n={n}", rr))
        out.append(_collapse(f"R_i . C_j = n delta_ij (J - R_j) - 2 C_j, n={n}", rc))
        out.append(_collapse(f"C_i . C_j identities, n={n}", cc))
    return out


def four_cycle_suite(ns=(4, 5)) -> list:
    """``Q . Q = 4 L_{(ik)(jl)}`` for ``Q = L_s - L_{s^3}``, ``s`` a 4-cycle."""
    out = []
    for n in ns:
        checks = []
        for quad in itertools.permutations(range(1, n + 1), 4):
            if quad[0] != min(quad):
                continue
            i, j, k, l = quad
            s = Permutation.from_cycles([[i, j, k, l]], n)
            Q = L_perm(s) - L_perm(s * s * s)
            rhs = L_perm(Permutation.from_cycles([[i, k], [j, l]], n)).scale(4)
            checks.append(_eq_check(f"s=({i}{j}{k}{l})", Q.jordan(Q), rhs))
        out.append(_collapse(f"four-cycle squares, n={n}", checks))
    return out


def constant_input_suite(ns=(2, 3, 4, 5), ts=(0.0, 0.1, 1.0, 5.0)) -> list:
    out = []
    for n in ns:
        Jm = J(n)
        out.append(_eq_check(f"J^2 = -J, n={n}", Jm @ Jm, -Jm))
        Jf = Jm.to_float()
        err = 0.0
        for t in ts:
            closed = np.eye(n) + (1 - math.exp(-t)) * Jf
            M, _ = expm_uniformization(Jf, t, 1e-14)
            err = max(err, float(np.abs(M - closed).max()), float(np.abs(expm_reference(Jf, t) - closed).max()))
        out.append(Check(f"e^(Jt) = I + (1 - e^-t) J, n={n} (float, 1e-12)", err <= 1e-12, f"max error {err:.2e}"))
    return out


# ---------------------------------------------------------------------------
# time-reversible fixtures


def _pi_str(pi) -> str:
    return "(" + ", ".join(format_rational(x) for x in pi) + ")"


def tn_products_suite(samples: int = 5, seed: int = 0) -> list:
    """Products of the Tamura-Nei basis, including the two disputed formulas.

    The printed ``BC = (-p1 + p2) B`` is tested alongside ``-(p1 + p2) B``;
    ``C^2`` is tested in the printed form.  The disputed forms are reported
    as findings and do not fail the suite.
    """
    out = []
    findings = {"BC = (-p1+p2)B": [], "BC = -(p1+p2)B": [], "C^2 = (p3+p4)A + (p1+p2)B - C": []}
    for pi in sample_pis(4, samples, seed):
        p1, p2, p3, p4 = pi
        A, B, Cm = tn_fixture(pi)
        Z = RationalMatrix.zeros(4)
        tag = _pi_str(pi)
        checks = [
            _eq_check("A^2 = -(p1+p2)A", A @ A, A.scale(-(p1 + p2))),
            _eq_check("B^2 = -(p3+p4)B", B @ B, B.scale(-(p3 + p4))),
            _eq_check("AB = 0", A @ B, Z),
            _eq_check("BA = 0", B @ A, Z),
            _eq_check("AC = -(p3+p4)A", A @ Cm, A.scale(-(p3 + p4))),
            _eq_check("CA = -(p3+p4)A", Cm @ A, A.scale(-(p3 + p4))),
            _eq_check("CB = BC", Cm @ B, B @ Cm),
        ]
        out.append(_collapse(f"TN products at pi={tag}", checks))
        findings["BC = (-p1+p2)B"].append(B @ Cm == B.scale(-p1 + p2))
        findings["BC = -(p1+p2)B"].append(B @ Cm == B.scale(-(p1 + p2)))
        findings["C^2 = (p3+p4)A + (p1+p2)B - C"].append(Cm @ Cm == A.scale(p3 + p4) + B.scale(p1 + p2) - Cm)
        S = MatrixSubspace.span([A, B, Cm])
        v = uniformization_stable_linear(S, [A, B, Cm])
        out.append(Check(f"TN span Jordan-closed and certified stable at pi={tag}", v.stable is True))
    for formula, hits in findings.items():
        out.append(Check(f"finding: {formula}", True, f"holds for {sum(hits)}/{len(hits)} samples"))
    out.append(Check("C (.) C = 2 C^2", all(
        (lambda A, B, Cm: Cm.jordan(Cm) == (Cm @ Cm).scale(2))(*tn_fixture(pi)) for pi in sample_pis(4, samples, seed))))
    return out


def hky_a2_in_span(pi) -> bool:
    A, B = hky_fixture(pi)
    return MatrixSubspace.span([A, B]).contains(A @ A)


def hky_refute_suite(samples: int = 5, seed: int = 0) -> list:
    out = []
    for pi in sample_pis(4, samples, seed):
        A, B = hky_fixture(pi)
        S = MatrixSubspace.span([A, B])
        generic = pi[0] + pi[1] != pi[2] + pi[3]
        escape = not S.contains(A @ A)
        closed = jordan_closed(S).closed
        out.append(Check(f"HKY A^2 escapes at pi={_pi_str(pi)}", escape and not closed and generic,
                         "" if generic else "sample is degenerate",
                         {"A^2": (A @ A).to_json()} if escape else {}))
    for pi in ((Fraction(1, 8), Fraction(3, 8), Fraction(1, 5), Fraction(3, 10)),
               (Fraction(1, 4),) * 4):
        out.append(Check(f"degenerate pi={_pi_str(pi)} (p1+p2 = p3+p4): A^2 in span", hky_a2_in_span(pi)))
    return out


def gtr_witness():
    """The 3-state pair whose sum leaves every reversible family."""
    Q = RationalMatrix([[-3, 1, 2], [1, -3, 2], [1, 1, -2]])
    Qp = RationalMatrix([[-1, 0, 1], [0, 0, 0], [1, 0, -1]])
    pi = (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2))
    return Q, Qp, pi


def gtr_witness_suite() -> list:
    Q, Qp, pi = gtr_witness()
    Qh = Q + Qp
    st = stationary_distribution(Qh)
    expected = (Fraction(7, 24), Fraction(6, 24), Fraction(11, 24))
    out = [
        Check("Q is reversible for pi=(1/4,1/4,1/2)", detailed_balance_check(Q, pi)),
        Check("Q' is reversible for pi'=(1/3,1/3,1/3)", detailed_balance_check(Qp, (Fraction(1, 3),) * 3)),
        Check("stationary(Q + Q') = (7,6,11)/24", st.pi == expected,
              "got " + (_pi_str(st.pi) if st.pi else "non-unique")),
        Check("Q + Q' fails detailed balance", st.pi is not None and not detailed_balance_check(Qh, st.pi)),
    ]
    # block embedding into n = 4 leaves the stationary vector non-unique
    emb = RationalMatrix([list(r) + [0] for r in Qh.rows] + [[0, 0, 0, 0]])
    out.append(Check("embedded witness has a non-unique stationary vector", not stationary_distribution(emb).unique))
    return out


SUITES = {
    "rate-algebra": rate_algebra_suite,
    "elementary-jordan": elementary_jordan_suite,
    "prods1": prods1_suite,
    "tn-products": tn_products_suite,
    "hky-refute": hky_refute_suite,
    "gtr-witness": gtr_witness_suite,
    "four-cycles": four_cycle_suite,
    "constant-input": constant_input_suite,
}


def run_suite(name: str, **kwargs) -> list:
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn(**kwargs)
