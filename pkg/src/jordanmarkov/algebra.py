"""Exact closure decisions, module checks and irreducible multiplicities.

Everything here runs over Q, so a failure witness is a proof: the reported
product really does leave the subspace, and anyone can recheck it with
:meth:`MatrixSubspace.contains`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .catalog import (
    C as C_gen,
    G_K3ST,
    J,
    ModelSpec,
    R as R_gen,
    anti_subspace,
    build_family,
    conical_generators,
    display_name,
    elementary,
    equivariant_tr_generators,
    parse_model_spec,
    sample_pis,
    symm_generators,
)
from .linalg import ZERO, MatrixSubspace, RationalMatrix, orthogonal_complement_within
from .perms import (
    PermGroup,
    Permutation,
    are_conjugate,
    conjugacy_classes,
    conjugate_action,
    enumerate_subgroups_up_to_conjugacy,
    parse_group,
)


class NotAModuleError(ValueError):
    """The subspace is not closed under the group action."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


@dataclass
class ClosureVerdict:
    closed: bool
    pair: tuple | None = None
    product: RationalMatrix | None = None
    residual: RationalMatrix | None = None
    kind: str = ""

    def __bool__(self):
        return self.closed

    def to_json(self) -> dict:
        out = {"closed": self.closed}
        if not self.closed:
            out["witness"] = {
                "pair": list(self.pair),
                "product": self.product.to_json(),
                "residual": self.residual.to_json(),
            }
        return out


def _closure(S: MatrixSubspace, op: Callable, kind: str, symmetric: bool) -> ClosureVerdict:
    basis = S.basis
    d = len(basis)
    for i in range(d):
        for j in range(i if symmetric else 0, d):
            if kind == "lie" and i == j:
                continue
            P = op(basis[i], basis[j])
            res = S.residual(P)
            if any(res):
                return ClosureVerdict(False, (i, j), P, RationalMatrix.from_vec(res, S.n), kind)
    return ClosureVerdict(True, kind=kind)


def jordan_closed(S: MatrixSubspace) -> ClosureVerdict:
    """Closure under ``AB + BA``; basis pairs ``i <= j`` scanned lexicographically."""
    return _closure(S, lambda a, b: a.jordan(b), "jordan", symmetric=True)


def lie_closed(S: MatrixSubspace) -> ClosureVerdict:
    return _closure(S, lambda a, b: a.bracket(b), "lie", symmetric=True)


def matrix_algebra_closed(S: MatrixSubspace) -> ClosureVerdict:
    return _closure(S, lambda a, b: a @ b, "matrix", symmetric=False)


def power_closure_probe(S: MatrixSubspace, k_max: int, samples: int = 0, seed: int = 0) -> bool:
    """True iff ``X^k`` stays in ``S`` for ``2 <= k <= k_max``.

    ``X`` runs over the canonical basis plus ``samples`` random integer
    combinations of it.  This is a cross-check, not a decision procedure.
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    probes = list(S.basis)
    rng = random.Random(seed)
    for _ in range(samples):
        X = RationalMatrix.zeros(S.n)
        for b in S.basis:
            X = X + b.scale(rng.randint(-5, 5))
        probes.append(X)
    for X in probes:
        P = X
        for _ in range(2, k_max + 1):
            P = P @ X
            if not S.contains(P):
                return False
    return True


def is_g_module(S: MatrixSubspace, G) -> ClosureVerdict:
    """Closed iff ``s . B`` lies in ``S`` for every generator ``s`` and basis element ``B``.

    ``G`` is a :class:`PermGroup` or just a sequence of generators.
    """
    gens = tuple(G.generators) if isinstance(G, PermGroup) else tuple(G)
    for s in gens:
        if s.n != S.n:
            raise ValueError(f"permutation {s} of [{s.n}] acting on Mat_{S.n}")
    for gi, s in enumerate(gens):
        for bi, B in enumerate(S.basis):
            X = conjugate_action(s, B)
            res = S.residual(X)
            if any(res):
                return ClosureVerdict(False, (gi, bi), X, RationalMatrix.from_vec(res, S.n), f"module:{s}")
    return ClosureVerdict(True, kind="module")


# ---------------------------------------------------------------------------
# minimality


@dataclass
class MinimalityResult:
    status: str  # "minimal" | "inconclusive"
    certificate: RationalMatrix | None = None
    method: str = ""

    @property
    def minimal(self) -> bool:
        return self.status == "minimal"

    def to_json(self) -> dict:
        out = {"status": self.status, "method": self.method}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def _support(S: MatrixSubspace) -> set:
    n = S.n
    return {(i, j) for B in S.basis for i, j, x in B.offdiag() if x}


def _is_certificate(S: MatrixSubspace, Q: RationalMatrix, support: set) -> bool:
    if not S.contains(Q):
        return False
    for i, j, x in Q.offdiag():
        if x < 0 or ((i, j) in support and x == 0):
            return False
    return True


def minimality_check(S: MatrixSubspace, hints: Sequence[RationalMatrix] = ()) -> MinimalityResult:
    """Certify ``S == span(S ∩ rate cone)`` or report inconclusive.

    A certificate is a rate matrix ``Q*`` in ``S`` that is strictly positive on
    every off-diagonal position not identically zero on ``S``.  Then any
    ``X`` in ``S`` equals ``(X + cQ*) - cQ*`` with both terms rate matrices for
    large ``c``.  Search order: the sum of the supplied non-negative hints, the
    sum of the rate-matrix basis elements, then a float LP whose optimum is
    rationalised and rechecked exactly.
    """
    if any(any(B.row_sums()) for B in S.basis):
        raise ValueError("subspace is not inside the zero row sum matrices")
    if S.dim == 0:
        return MinimalityResult("minimal", RationalMatrix.zeros(S.n), "zero subspace")
    support = _support(S)
    candidates = []
    nonneg = [h for h in hints if all(x >= 0 for _, _, x in h.offdiag())]
    if nonneg:
        candidates.append(("generator sum", nonneg))
    basis_nonneg = [B for B in S.basis if all(x >= 0 for _, _, x in B.offdiag())]
    if basis_nonneg:
        candidates.append(("basis sum", basis_nonneg))
    for method, mats in candidates:
        Q = mats[0]
        for m in mats[1:]:
            Q = Q + m
        if _is_certificate(S, Q, support):
            return MinimalityResult("minimal", Q, method)
    Q = _lp_certificate(S, support)
    if Q is not None:
        return MinimalityResult("minimal", Q, "lp")
    return MinimalityResult("inconclusive", None, "no certificate found")


def _lp_certificate(S: MatrixSubspace, support: set) -> RationalMatrix | None:
    import numpy as np
    from scipy.optimize import linprog

    pos = sorted(support)
    if not pos:
        return None
    basis = S.basis
    d = len(basis)
    A = np.array([[float(B[i, j]) for B in basis] for i, j in pos])
    # variables (c_1..c_d, t); maximise t subject to A c >= t, |c| <= 1, t <= 1
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([-A, np.ones((len(pos), 1))])
    b_ub = np.zeros(len(pos))
    bounds = [(-1.0, 1.0)] * d + [(None, 1.0)]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success or -res.fun <= 1e-9:
        return None
    for limit in (10**3, 10**6, 10**9):
        coeffs = [Fraction(float(c)).limit_denominator(limit) for c in res.x[:d]]
        Q = RationalMatrix.zeros(S.n)
        for c, B in zip(coeffs, basis):
            if c:
                Q = Q + B.scale(c)
        if _is_certificate(S, Q, support):
            return Q
    return None


# ---------------------------------------------------------------------------
# stability


@dataclass
class StabilityVerdict:
    linear: bool
    minimal: MinimalityResult
    jordan: ClosureVerdict

    @property
    def stable(self) -> bool | None:
        """Jordan closure, asserted only once minimality is certified."""
        return self.jordan.closed if self.minimal.minimal else None

    def to_json(self) -> dict:
        return {
            "linear": self.linear,
            "minimal": self.minimal.to_json(),
            "jordan": self.jordan.to_json(),
            "stable": self.stable,
        }


def uniformization_stable_linear(S: MatrixSubspace, hints: Sequence[RationalMatrix] = ()) -> StabilityVerdict:
    return StabilityVerdict(True, minimality_check(S, hints), jordan_closed(S))


def aggregate_stability(verdicts: Sequence[StabilityVerdict]) -> bool | None:
    """Union over distributions: stable iff stable at every sampled distribution.

    Any exact failure is conclusive; an inconclusive sample makes the
    aggregate inconclusive unless another sample already failed.
    """
    if any(v.stable is False for v in verdicts):
        return False
    if any(v.stable is None for v in verdicts):
        return None
    return True


# ---------------------------------------------------------------------------
# irreducible decomposition under S_n


@dataclass(frozen=True)
class MultiplicityVector:
    n: int
    a1: int
    a2: int
    a3: int | None
    a4: int

    def as_tuple(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4) if self.a3 is not None else (self.a1, self.a2, self.a4)

    def labels(self) -> list:
        n = self.n
        if n == 3:
            return ["{3}", "{2,1}", "{1^3}"]
        return ["{%d}" % n, "{%d,1}" % (n - 1), "{%d,2}" % (n - 2), "{%d,1^2}" % (n - 2)]

    def dimension(self) -> int:
        n = self.n
        total = self.a1 + self.a2 * (n - 1) + self.a4 * (n - 1) * (n - 2) // 2
        if self.a3 is not None:
            total += self.a3 * n * (n - 3) // 2
        return total

    def to_json(self) -> dict:
        return dict(zip(self.labels(), self.as_tuple()))


def irrep_characters(ct: dict) -> tuple:
    """Characters of ``{n}``, ``{n-1,1}``, ``{n-2,2}``, ``{n-2,1^2}`` on a cycle type."""
    r1 = ct.get(1, 0)
    r2 = ct.get(2, 0)
    return (
        1,
        r1 - 1,
        Fraction(r1 * (r1 - 3), 2) + r2,
        Fraction((r1 - 1) * (r1 - 2), 2) - r2,
    )


def module_character(S: MatrixSubspace, sigma) -> Fraction:
    """Trace of the conjugation action on ``S``.

    The canonical basis is in RREF, so the coordinate of a member on basis
    element ``k`` is its entry at pivot ``k``.
    """
    tr = ZERO
    for k, B in enumerate(S.basis):
        X = conjugate_action(sigma, B)
        tr += X.vec()[S.pivots[k]]
    return tr


def irrep_multiplicities(S: MatrixSubspace, n: int | None = None) -> MultiplicityVector:
    n = S.n if n is None else n
    if n != S.n:
        raise ValueError("n does not match the subspace")
    if not 3 <= n <= 8:
        raise ValueError("decomposition is implemented for 3 <= n <= 8")
    verdict = is_g_module(S, sn_generators(n))
    if not verdict.closed:
        raise NotAModuleError(f"not an S_{n}-module; generator {verdict.kind.split(':', 1)[1]} escapes", verdict)
    order = math.factorial(n)
    sums = [ZERO] * 4
    for cls in conjugacy_classes(n):
        chi_s = module_character(S, cls.representative)
        for k, chi in enumerate(irrep_characters(cls.cycle_type)):
            sums[k] += cls.size * chi_s * chi
    mult = [s / order for s in sums]
    for m in mult:
        if m.denominator != 1 or m < 0:
            raise ArithmeticError(f"non-integral multiplicity {m}: character bookkeeping is wrong")
    a = [int(m) for m in mult]
    out = MultiplicityVector(n, a[0], a[1], None if n == 3 else a[2], a[3])
    if n == 3 and a[2] != 0:
        raise ArithmeticError("the {1,2} slot must vanish for n = 3")
    if out.dimension() != S.dim:
        raise ArithmeticError(f"dimension audit failed: {out.dimension()} != {S.dim}")
    return out


def sn_generators(n: int) -> list:
    return [Permutation.from_cycles([list(range(1, n + 1))], n), Permutation.from_cycles([[1, 2]], n)]


# ---------------------------------------------------------------------------
# classification of S_n-symmetric Jordan models


@dataclass
class ClassifiedModel:
    name: str
    subspace: MatrixSubspace
    multiplicities: tuple
    pencil: tuple | None = None
    spec: ModelSpec | None = None

    @property
    def dim(self) -> int:
        return self.subspace.dim


def _named_sn_models(n: int) -> list:
    names = [("CI", "CI@%d"), ("EI", "EI@%d"), ("Symm", "Symm@%d"), ("EI+Symm", "EI+Symm@%d"),
             ("DS", "DS@%d"), ("GM", "GM@%d")]
    out = [(name, parse_model_spec(t % n)) for name, t in names]
    if n == 3:
        out += [("L_C3", parse_model_spec("GroupBased[(123)]@3")),
                ("L_C3+EI", parse_model_spec("EI+GroupBased[(123)]@3"))]
    if n == 4:
        out += [("K3ST", parse_model_spec(f"GroupBased[{G_K3ST}]@4")),
                ("K3ST+F81", parse_model_spec(f"EI+GroupBased[{G_K3ST}]@4"))]
    return out


PENCIL_GRID = tuple(sorted({Fraction(p, q) for p in range(-6, 7) for q in (1, 2, 3, 4)}))


def isotypic_pieces(n: int) -> dict:
    """The summands used to assemble candidate submodules of ``L_n``."""
    Jm = J(n)
    Rs = [R_gen(i, n) for i in range(n)]
    Cs = [C_gen(i, n) for i in range(n)]
    symm = MatrixSubspace.span(symm_generators(n), n=n)
    rc = MatrixSubspace.span([r + c for r, c in zip(Rs, Cs)], n=n)
    return {
        "J": MatrixSubspace.span([Jm]),
        "RC": MatrixSubspace.span(Rs + Cs, n=n),
        "W3": orthogonal_complement_within(rc, symm),
        "W4": anti_subspace(n),
        "R": Rs,
        "C": Cs,
    }


def classify_sn_jordan_modules(n: int) -> list:
    """All Jordan-closed ``S_n``-submodules of ``L_n`` containing ``J``, named.

    Candidates are ``span(J)`` plus a choice of {n-1,1} part (none, both
    copies, or the single copy ``span(mu R_i + nu C_i)`` for each (mu:nu) on
    a fixed rational grid), optionally plus the {n-2,2} and {n-2,1^2}
    summands.  Every closed single-copy candidate must come from (1:0) or
    (1:1); anything else raises.
    """
    if not 2 <= n <= 7:
        raise ValueError("classification is implemented for 2 <= n <= 7")
    named = [(name, spec, build_family(spec)) for name, spec in _named_sn_models(n)]

    def name_of(S):
        for name, spec, T in named:
            if T == S:
                return name, spec
        return None, None

    if n == 2:
        cands = [(MatrixSubspace.span([J(2)]), (1, 0), None),
                 (build_family(parse_model_spec("GM@2")), (1, 1), None)]
        found = []
        for (S, mult, pencil), name in zip(cands, ("CI", "GM")):
            # EI_2, GM_2 and L_2 coincide; GM is the conventional label
            if jordan_closed(S).closed:
                found.append(ClassifiedModel(name, S, mult, pencil, parse_model_spec(f"{name}@2")))
        return found

    p = isotypic_pieces(n)
    pencils = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))] + [(Fraction(1), g) for g in PENCIL_GRID if g]
    twos = [(0, None, MatrixSubspace.zero(n)), (2, None, p["RC"])]
    for mu, nu in pencils:
        twos.append((1, (mu, nu), MatrixSubspace.span([r.scale(mu) + c.scale(nu) for r, c in zip(p["R"], p["C"])], n=n)))
    threes = [(0, MatrixSubspace.zero(n))] + ([(1, p["W3"])] if p["W3"].dim else [])
    fours = [(0, MatrixSubspace.zero(n))] + ([(1, p["W4"])] if p["W4"].dim else [])

    found: dict = {}
    for a2, pencil, P2 in twos:
        for a3, P3 in threes:
            for a4, P4 in fours:
                S = p["J"] + P2 + P3 + P4
                if S in found:
                    continue
                if not jordan_closed(S).closed:
                    continue
                if a2 == 1 and pencil not in ((1, 0), (1, 1)):
                    raise AssertionError(f"pencil {pencil} gave a Jordan module, contradicting the R/C dichotomy")
                mult = (1, a2, a3, a4) if n > 3 else (1, a2, a4)
                name, spec = name_of(S)
                found[S] = ClassifiedModel(name or "unnamed", S, mult, pencil, spec)
    return sorted(found.values(), key=lambda m: (m.dim, m.name))


# ---------------------------------------------------------------------------
# Table 1: G-equivariant time-reversible models on four states


TABLE1_ROWS = (
    ("Trivial", "e", "GTR", True),
    ("S2", "(12)", "TIM3", True),
    ("S2", "(12)(34)", "TIM", False),
    ("C4", "(1234)", "M12", False),
    ("V4", "(12)(34),(13)(24),(14)(23)", "K81u (K3STu)", False),
    ("V4", "(12),(34),(12)(34)", "TN93", True),
    ("D4", "(1324),(12)", "HKY", False),
    ("A3", "(132),(123)", "M24", True),
    ("S3", "(12),(123)", "M24", True),
    ("A4", "(123),(12)(34)", "F81 (EI)", True),
    ("S4", "(1234),(12)", "F81 (EI)", True),
)


@dataclass
class Table1Row:
    subgroup: str
    generators: str
    model: str
    stable: bool | None
    expected: bool
    order: int
    dimension: int
    witness: dict | None = None

    @property
    def matches(self) -> bool:
        return self.stable is self.expected

    def to_json(self) -> dict:
        out = {
            "subgroup": self.subgroup,
            "generators": self.generators,
            "model": self.model,
            "order": self.order,
            "dimension": self.dimension,
            "stable": self.stable,
            "expected": self.expected,
            "matches": self.matches,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def tr_model_verdict(G: PermGroup, pis: Sequence) -> tuple:
    """Aggregate stability of the G-equivariant reversible model over the sampled distributions."""
    verdicts = []
    dims = set()
    witness = None
    for pi in pis:
        gens = equivariant_tr_generators(pi, G)
        S = MatrixSubspace.span(gens, n=G.n)
        dims.add(S.dim)
        v = uniformization_stable_linear(S, gens)
        verdicts.append(v)
        if v.stable is False and witness is None:
            witness = {"pi": [str(x) for x in pi], **v.jordan.to_json()["witness"]}
    if len(dims) != 1:
        raise AssertionError(f"dimension depends on the sampled distribution: {dims}")
    return aggregate_stability(verdicts), dims.pop(), witness


def table1(pis: Sequence) -> list:
    """One row per conjugacy class of subgroups of S_4, labelled by the matching reference row."""
    rows = []
    reference = [(lab, parse_group(gens, 4), model, exp) for lab, gens, model, exp in TABLE1_ROWS]
    for G in enumerate_subgroups_up_to_conjugacy(4):
        match = [r for r in reference if are_conjugate(G, r[1])]
        if len(match) != 1:
            raise AssertionError(f"subgroup {G} matches {len(match)} reference rows")
        label, H, model, expected = match[0]
        stable, dim, witness = tr_model_verdict(H, pis)
        # the enumerated class representative must give the same verdict
        rep_stable, rep_dim, _ = tr_model_verdict(G, pis)
        if (rep_stable, rep_dim) != (stable, dim):
            raise AssertionError(f"verdict differs between conjugate subgroups {G} and {H}")
        rows.append(Table1Row(label, "<" + H.generator_string() + ">", model, stable, expected,
                              H.order, dim, witness))
    order = {r[1]: k for k, r in enumerate(TABLE1_ROWS)}
    rows.sort(key=lambda r: order[_reference_generators(r)])
    return rows


def _reference_generators(row: Table1Row) -> str:
    for lab, gens, model, exp in TABLE1_ROWS:
        if model == row.model and lab == row.subgroup:
            return gens
    raise KeyError(row.model)


def default_table1(samples: int = 5, seed: int = 0) -> list:
    return table1(sample_pis(4, samples, seed))


def table1_model_name(G: PermGroup) -> str | None:
    """Conventional name of the G-equivariant reversible model on four states."""
    if G.n != 4:
        return None
    for lab, gens, model, exp in TABLE1_ROWS:
        if are_conjugate(G, parse_group(gens, 4)):
            return model
    return None
