"""Generator matrices and model families.

Indices are 0-based in this API; cycle strings and model-spec text use
1-based labels.  Each family is described by a list of *conical generators*
(rate matrices whose span is the family) where such a list exists, so the
same data feeds span construction, minimality certificates and random draws.
"""

from __future__ import annotations

import itertools
import json
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import ONE, ZERO, MatrixSubspace, RationalMatrix, as_rational, format_rational
from .perms import (
    PermGroup,
    Permutation,
    conjugate_action,
    parse_group,
    perm_matrix,
    symmetric_group,
)

NUCLEOTIDES = ("A", "G", "C", "T")
PI_DENOMINATOR = 10_000


class SpecError(ValueError):
    """A model spec that cannot be parsed or resolved."""


# ---------------------------------------------------------------------------
# single generators


def elementary(i: int, j: int, n: int) -> RationalMatrix:
    """``L_ij``: +1 at (i, j), -1 at (i, i); the zero matrix when ``i == j``."""
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"({i}, {j}) outside a {n}x{n} matrix")
    rows = [[ZERO] * n for _ in range(n)]
    if i != j:
        rows[i][j] = ONE
        rows[i][i] = -ONE
    return RationalMatrix(rows)


def J(n: int) -> RationalMatrix:
    """Constant-input generator ``(1/n) 11^T - I``."""
    h = Fraction(1, n)
    return RationalMatrix([[h - 1 if i == j else h for j in range(n)] for i in range(n)])


def H(n: int) -> RationalMatrix:
    h = Fraction(1, n)
    return RationalMatrix([[h] * n for _ in range(n)])


def R(i: int, n: int) -> RationalMatrix:
    """Equal-input generator: ones on the off-diagonal of column ``i``."""
    return _sum(elementary(k, i, n) for k in range(n) if k != i) if n > 1 else RationalMatrix.zeros(n)


def C(i: int, n: int) -> RationalMatrix:
    """Ones on the off-diagonal of row ``i``."""
    return _sum(elementary(i, k, n) for k in range(n) if k != i) if n > 1 else RationalMatrix.zeros(n)


def L_perm(sigma: Permutation) -> RationalMatrix:
    """``K_sigma - I``."""
    return perm_matrix(sigma) - RationalMatrix.identity(sigma.n)


def _sum(ms) -> RationalMatrix:
    ms = list(ms)
    out = ms[0]
    for m in ms[1:]:
        out = out + m
    return out


@dataclass(frozen=True)
class StandardGenerators:
    n: int
    J: RationalMatrix
    H: RationalMatrix
    R: tuple
    C: tuple

    def L(self, i: int, j: int) -> RationalMatrix:
        return elementary(i, j, self.n)

    def L_perm(self, sigma: Permutation | str) -> RationalMatrix:
        if isinstance(sigma, str):
            sigma = Permutation.parse(sigma, self.n)
        return L_perm(sigma)


def standard_generators(n: int) -> StandardGenerators:
    if n < 2:
        raise ValueError("need n >= 2")
    return StandardGenerators(n, J(n), H(n), tuple(R(i, n) for i in range(n)), tuple(C(i, n) for i in range(n)))


# ---------------------------------------------------------------------------
# distributions


def validate_pi(pi: Sequence) -> tuple:
    pi = tuple(as_rational(x) for x in pi)
    if any(x <= 0 for x in pi):
        raise SpecError(f"distribution must be strictly positive: {[format_rational(x) for x in pi]}")
    if sum(pi) != 1:
        raise SpecError(f"distribution must sum to 1, got {format_rational(sum(pi))}")
    return pi


def sample_pi(n: int, rng: random.Random, denominator: int = PI_DENOMINATOR) -> tuple:
    """Exact generic distribution: uniform rationals ``k/denominator`` normalised to sum 1."""
    raw = [Fraction(rng.randint(1, denominator), denominator) for _ in range(n)]
    total = sum(raw)
    return tuple(x / total for x in raw)


def sample_pis(n: int, k: int, seed: int) -> list:
    rng = random.Random(seed)
    return [sample_pi(n, rng) for _ in range(k)]


def D(pi: Sequence) -> RationalMatrix:
    return RationalMatrix.diag(pi)


# ---------------------------------------------------------------------------
# time-reversible families


def L_hat(i: int, j: int, pi: Sequence) -> RationalMatrix:
    """``pi_j L_ij + pi_i L_ji``: the reversible generator on the pair {i, j}."""
    n = len(pi)
    return elementary(i, j, n).scale(pi[j]) + elementary(j, i, n).scale(pi[i])


def gtr_generators(pi: Sequence) -> list:
    pi = validate_pi(pi)
    n = len(pi)
    return [L_hat(i, j, pi) for i, j in itertools.combinations(range(n), 2)]


def gtr_subspace(pi: Sequence) -> MatrixSubspace:
    pi = validate_pi(pi)
    return MatrixSubspace.span(gtr_generators(pi), n=len(pi))


def equivariant_tr_generators(pi: Sequence, G: PermGroup) -> list:
    """One generator per orbit of ``G`` on unordered pairs: the orbit sum of ``L_hat``."""
    pi = validate_pi(pi)
    if G.n != len(pi):
        raise SpecError(f"group on {G.n} points with a length-{len(pi)} distribution")
    return [_sum(L_hat(i, j, pi) for i, j in orbit) for orbit in G.orbits_on_pairs()]


def equivariant_tr_subspace(pi: Sequence, G: PermGroup) -> MatrixSubspace:
    return MatrixSubspace.span(equivariant_tr_generators(pi, G), n=G.n)


def tn_fixture(pi: Sequence) -> tuple:
    """The Tamura-Nei basis ``(A, B, C)`` written out entry by entry (A,G,C,T order)."""
    p1, p2, p3, p4 = validate_pi(pi)
    z = ZERO
    A = RationalMatrix([[-p2, p2, z, z], [p1, -p1, z, z], [z, z, z, z], [z, z, z, z]])
    B = RationalMatrix([[z, z, z, z], [z, z, z, z], [z, z, -p4, p4], [z, z, p3, -p3]])
    Cm = RationalMatrix([
        [-(p3 + p4), z, p3, p4],
        [z, -(p3 + p4), p3, p4],
        [p1, p2, -(p1 + p2), z],
        [p1, p2, z, -(p1 + p2)],
    ])
    return A, B, Cm


def hky_fixture(pi: Sequence) -> tuple:
    """The HKY basis ``(A, B)``: transitions share one rate, transversions another."""
    A, B, Cm = tn_fixture(pi)
    return A + B, Cm


G_TN = "(12),(34)"
G_HKY = "(1324),(12)"
G_K3ST = "(12)(34),(13)(24)"


# ---------------------------------------------------------------------------
# fully symmetric families


def symm_generators(n: int) -> list:
    return [elementary(i, j, n) + elementary(j, i, n) for i, j in itertools.combinations(range(n), 2)]


def anti_generators(n: int) -> list:
    """``L_s - L_{s^-1}`` over 3-cycles ``s = (i j k)``, ``i < j, k``.

    Antisymmetric zero-row-sum matrices form an irreducible module, so the
    3-cycle class already spans it.
    """
    out = []
    for i, j, k in itertools.combinations(range(n), 3):
        for a, b in ((j, k), (k, j)):
            s = Permutation.from_cycles([[i + 1, a + 1, b + 1]], n)
            out.append(L_perm(s) - L_perm(s.inverse()))
    return out


def anti_subspace(n: int) -> MatrixSubspace:
    """Antisymmetric part of the doubly stochastic space; zero for ``n < 3``."""
    return MatrixSubspace.span(anti_generators(n), n=n)


def ds_generators(n: int) -> list:
    """``K_s - I`` for transpositions and 3-cycles (these span all ``K_s - I``)."""
    out = symm_generators(n)
    for i, j, k in itertools.combinations(range(n), 3):
        for a, b in ((j, k), (k, j)):
            out.append(L_perm(Permutation.from_cycles([[i + 1, a + 1, b + 1]], n)))
    return out


def gm_generators(n: int) -> list:
    return [elementary(i, j, n) for i in range(n) for j in range(n) if i != j]


def group_based_generators(G: PermGroup) -> list:
    return [L_perm(s) for s in G.elements if not s.is_identity()]


def equivariant_generators(G: PermGroup) -> list:
    """Orbit sums of ``L_ij`` under ``G`` acting on ordered pairs."""
    return [_sum(elementary(i, j, G.n) for i, j in orbit) for orbit in G.orbits_on_ordered_pairs()]


def equivariant_subspace(G: PermGroup, n: int | None = None) -> MatrixSubspace:
    if n is not None and n != G.n:
        raise SpecError(f"group acts on {G.n} points, not {n}")
    return MatrixSubspace.span(equivariant_generators(G), n=G.n)


# ---------------------------------------------------------------------------
# worked examples


@dataclass(frozen=True)
class ExampleFixture:
    name: str
    subspace: MatrixSubspace
    cone_span: MatrixSubspace
    excluded: RationalMatrix | None = None
    notes: str = ""


def nonminimal_example() -> ExampleFixture:
    """Subspace of ``L_3`` whose rate-matrix part spans only a line."""
    a = RationalMatrix([[0, 0, 0], [1, -2, 1], [1, 1, -2]])
    b = RationalMatrix([[0, 1, -1], [0, 0, 0], [0, 0, 0]])
    S = MatrixSubspace.span([a, b])
    return ExampleFixture("nonminimal", S, MatrixSubspace.span([a]),
                          notes="rate matrices in S are the non-negative multiples of the alpha generator")


def nonlinear_example() -> ExampleFixture:
    """The cone ``{alpha*X + beta*Y : alpha, beta >= 0}`` in ``L_2``.

    ``X = [[-1, 1], [1, -1]]`` and ``Y = [[0, 0], [1, -1]]``; the rate matrix
    ``L_12`` lies in the span of the cone yet outside it.
    """
    X = RationalMatrix([[-1, 1], [1, -1]])
    Y = RationalMatrix([[0, 0], [1, -1]])
    excluded = RationalMatrix([[-1, 1], [0, 0]])
    return ExampleFixture("nonlinear", MatrixSubspace.span([X, Y]), MatrixSubspace.span([X, Y]),
                          excluded=excluded)


def in_nonlinear_cone(M: RationalMatrix) -> bool:
    """Exact membership in the cone of :func:`nonlinear_example`."""
    if M.n != 2 or any(M.row_sums()):
        return False
    alpha = M[0, 1]
    beta = M[1, 0] - alpha
    return alpha >= 0 and beta >= 0 and M[0, 0] == -alpha


# ---------------------------------------------------------------------------
# model specs


FAMILY_ALIASES = {
    "CI": "CI", "JC": "CI", "JC69": "CI",
    "EI": "EI", "F81": "EI",
    "SYMM": "Symm",
    "ANTI": "Anti",
    "DS": "DS",
    "GM": "GM",
    "GROUPBASED": "GroupBased",
    "EI+SYMM": "EI+Symm",
    "EI+GROUPBASED": "EI+GroupBased",
    "GTR": "GTR",
    "TN": "TN", "TN93": "TN",
    "HKY": "HKY",
    "EQTR": "EqTR",
    "EQUIVARIANT": "Equivariant",
    "CUSTOM": "Custom",
    "K3ST": "K3ST",
    "K3ST+F81": "K3ST+F81",
}

PI_FAMILIES = {"GTR", "TN", "HKY", "EqTR"}
GROUP_FAMILIES = {"GroupBased", "EI+GroupBased", "EqTR", "Equivariant"}


@dataclass(frozen=True)
class ModelSpec:
    family: str
    n: int
    pi: tuple | None = None
    random_pi: bool = False
    group: str | None = None
    basis: tuple | None = field(default=None, compare=False)

    def text(self) -> str:
        args = []
        if self.group is not None:
            args.append(f"G={self.group}")
        if self.random_pi:
            args.append("pi=random")
        elif self.pi is not None:
            args.append("pi=" + ",".join(format_rational(x) for x in self.pi))
        inner = f"[{';'.join(args)}]" if args else ""
        return f"{self.family}{inner}@{self.n}"

    def with_pi(self, pi) -> "ModelSpec":
        return ModelSpec(self.family, self.n, tuple(pi), False, self.group, self.basis)

    def group_obj(self) -> PermGroup:
        if self.group is None:
            raise SpecError(f"{self.family} needs a group")
        return parse_group(self.group, self.n)


_SPEC_RE = re.compile(r"^\s*(?P<fam>[A-Za-z0-9_+]+)\s*(?:\[(?P<args>.*)\])?\s*@\s*(?P<n>\d+)\s*$")


def parse_model_spec(text: str, basis_file: str | None = None) -> ModelSpec:
    """Parse ``Family[args]@n``; see the README for the grammar."""
    m = _SPEC_RE.match(text)
    if not m:
        raise SpecError(f"cannot parse model spec {text!r}")
    fam_key = m.group("fam").upper()
    if fam_key not in FAMILY_ALIASES:
        raise SpecError(f"unknown family {m.group('fam')!r}")
    family = FAMILY_ALIASES[fam_key]
    n = int(m.group("n"))
    if n < 2:
        raise SpecError("n must be at least 2")
    pi = None
    random_pi = False
    group = None
    args = (m.group("args") or "").strip()
    if args:
        parts = [p.strip() for p in args.split(";") if p.strip()]
        for p in parts:
            if "=" in p:
                key, val = (s.strip() for s in p.split("=", 1))
                key = key.lower()
            else:
                key, val = ("g" if family in GROUP_FAMILIES else "pi"), p
            if key == "pi":
                if val.lower() == "random":
                    random_pi = True
                else:
                    try:
                        pi = tuple(Fraction(x.strip()) for x in val.split(","))
                    except (ValueError, ZeroDivisionError) as exc:
                        raise SpecError(f"bad distribution {val!r}") from exc
            elif key == "g":
                group = val
            else:
                raise SpecError(f"unknown argument {key!r}")
    if family == "K3ST":
        family, group = "GroupBased", G_K3ST
    elif family == "K3ST+F81":
        family, group = "EI+GroupBased", G_K3ST
    basis = None
    if family == "Custom":
        if basis_file is None:
            raise SpecError("Custom@n needs a JSON basis file")
        with open(basis_file) as fh:
            data = json.load(fh)
        basis = tuple(RationalMatrix(b) for b in data)
        if any(b.n != n for b in basis):
            raise SpecError("basis matrices do not match n")
    if family in PI_FAMILIES and pi is None and not random_pi:
        raise SpecError(f"{family} needs pi=... or pi=random")
    if family in ("GroupBased", "EI+GroupBased", "Equivariant", "EqTR") and group is None:
        if family == "EqTR":
            group = "e"
        else:
            raise SpecError(f"{family} needs a group")
    if family in ("TN", "HKY") and n != 4:
        raise SpecError(f"{family} is a 4-state model")
    spec = ModelSpec(family, n, pi, random_pi, group, basis)
    if pi is not None:
        if len(pi) != n:
            raise SpecError(f"distribution has {len(pi)} entries for n={n}")
        validate_pi(pi)
    if group is not None:
        try:
            spec.group_obj()
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
    return spec


def spanning_set(spec: ModelSpec, pi: Sequence | None = None) -> list:
    """Matrices spanning the family; conical generators wherever the family has them."""
    n = spec.n
    fam = spec.family
    if fam in PI_FAMILIES:
        pi = pi if pi is not None else spec.pi
        if pi is None:
            raise SpecError(f"{spec.text()} needs a concrete distribution here")
        pi = validate_pi(pi)
        if len(pi) != n:
            raise SpecError("distribution length does not match n")
    if fam == "CI":
        return [J(n)]
    if fam == "EI":
        return [R(i, n) for i in range(n)]
    if fam == "Symm":
        return symm_generators(n)
    if fam == "Anti":
        return anti_generators(n)
    if fam == "DS":
        return ds_generators(n)
    if fam == "GM":
        return gm_generators(n)
    if fam == "GroupBased":
        return group_based_generators(spec.group_obj())
    if fam == "EI+Symm":
        return [R(i, n) for i in range(n)] + symm_generators(n)
    if fam == "EI+GroupBased":
        return [R(i, n) for i in range(n)] + group_based_generators(spec.group_obj())
    if fam == "GTR":
        return gtr_generators(pi)
    if fam == "TN":
        return list(tn_fixture(pi))
    if fam == "HKY":
        return list(hky_fixture(pi))
    if fam == "EqTR":
        return equivariant_tr_generators(pi, spec.group_obj())
    if fam == "Equivariant":
        return equivariant_generators(spec.group_obj())
    if fam == "Custom":
        return list(spec.basis or ())
    raise SpecError(f"unresolvable family {fam!r}")


def conical_generators(spec: ModelSpec, pi: Sequence | None = None) -> list:
    """The members of :func:`spanning_set` that are rate matrices."""
    return [g for g in spanning_set(spec, pi) if all(x >= 0 for _, _, x in g.offdiag())]


def build_family(spec: ModelSpec, pi: Sequence | None = None) -> MatrixSubspace:
    return MatrixSubspace.span(spanning_set(spec, pi), n=spec.n)


def display_name(spec: ModelSpec) -> str:
    """Conventional label for a spec (K3ST, TN93, F81, ...), falling back to the spec text."""
    fam = spec.family
    base = {"CI": "CI", "EI": "EI", "Symm": "Symm", "Anti": "Anti", "DS": "DS", "GM": "GM",
            "EI+Symm": "EI+Symm", "GTR": "GTR", "TN": "TN93", "HKY": "HKY"}
    if fam in base:
        return base[fam]
    if fam in ("GroupBased", "EI+GroupBased"):
        G = spec.group_obj()
        if spec.n == 4 and G == parse_group(G_K3ST, 4):
            label = "K3ST"
        elif spec.n == 3 and G.order == 3:
            label = "L_C3"
        else:
            label = f"L<{G.generator_string()}>"
        return label if fam == "GroupBased" else (
            "K3ST+F81" if label == "K3ST" else f"{label}+EI")
    return spec.text()


# nucleotide helpers for reports


def nucleotide_label(i: int) -> str:
    return NUCLEOTIDES[i]


def full_symmetric_group(n: int) -> PermGroup:
    return symmetric_group(n)


def orbit_sum(G: PermGroup, X: RationalMatrix) -> RationalMatrix:
    """``sum_{s in G} s . X``; fixed by every element of ``G``."""
    return _sum(conjugate_action(s, X) for s in G.elements)
