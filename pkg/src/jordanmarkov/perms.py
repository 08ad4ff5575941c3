"""Permutations of ``[n]``, permutation matrices and small permutation groups.

Conventions: labels are 1-based in cycle strings and 0-based internally.
Permutation matrices follow the row-vector rule ``e_i K = e_{sigma(i)}``, so
``K_sigma @ K_tau == K_{sigma * tau}`` where ``sigma * tau`` applies ``sigma``
first.  With this product the conjugation action ``sigma . X = K^T X K`` is a
right action: ``sigma . (tau . X) == (tau * sigma) . X``.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .linalg import ONE, ZERO, DimensionError, RationalMatrix

MAX_SUBGROUP_N = 5
MAX_CLASS_N = 8


@dataclass(frozen=True, order=True)
class Permutation:
    images: tuple  # images[i] = sigma(i), 0-based

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> "Permutation":
        img = list(range(n))
        seen = set()
        for cyc in cycles:
            for x in cyc:
                if not 1 <= x <= n:
                    raise ValueError(f"label {x} outside [1, {n}]")
                if x in seen:
                    raise ValueError(f"label {x} repeated in cycle notation")
                seen.add(x)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a - 1] = b - 1
        return cls(tuple(img))

    @classmethod
    def parse(cls, text: str, n: int) -> "Permutation":
        """Read ``"e"``, ``"(12)(34)"`` or ``"(1,2)(3,4)"``."""
        s = text.strip()
        if s in ("e", "()", ""):
            return cls.identity(n)
        if not re.fullmatch(r"(\([0-9,\s]+\))+", s):
            raise ValueError(f"bad cycle notation: {text!r}")
        cycles = []
        for body in re.findall(r"\(([^)]*)\)", s):
            if "," in body:
                cyc = [int(t) for t in body.split(",")]
            else:
                cyc = [int(ch) for ch in body if not ch.isspace()]
            cycles.append(cyc)
        return cls.from_cycles(cycles, n)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """``self`` first, then ``other``."""
        if other.n != self.n:
            raise DimensionError("permutations of different degree")
        o = other.images
        return Permutation(tuple(o[x] for x in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, x in enumerate(self.images):
            inv[x] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def cycles(self, include_fixed: bool = False) -> list:
        seen = [False] * self.n
        out = []
        for i in range(self.n):
            if seen[i]:
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = self.images[j]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return math.lcm(*[len(c) for c in self.cycles(include_fixed=True)])

    def sign(self) -> int:
        return -1 if sum(len(c) - 1 for c in self.cycles()) % 2 else 1

    def __str__(self):
        cyc = self.cycles()
        if not cyc:
            return "e"
        sep = "," if self.n > 9 else ""
        return "".join("(" + sep.join(str(x + 1) for x in c) + ")" for c in cyc)


def cycle_type(sigma: Permutation) -> dict:
    """``{k: r_k}``, the number of ``k``-cycles, fixed points counted as 1-cycles."""
    return dict(sorted(Counter(len(c) for c in sigma.cycles(include_fixed=True)).items()))


def perm_matrix(sigma: Permutation) -> RationalMatrix:
    n = sigma.n
    return RationalMatrix._raw(n, tuple(
        tuple(ONE if j == sigma.images[i] else ZERO for j in range(n)) for i in range(n)))


def conjugate_action(sigma: Permutation, X: RationalMatrix) -> RationalMatrix:
    """``K_sigma^T X K_sigma``, computed by relabelling: entry (i, j) moves to (sigma(i), sigma(j))."""
    if X.n != sigma.n:
        raise DimensionError(f"permutation of degree {sigma.n} acting on {X.n}x{X.n}")
    inv = sigma.inverse().images
    r = X.rows
    n = X.n
    return RationalMatrix._raw(n, tuple(tuple(r[inv[a]][inv[b]] for b in range(n)) for a in range(n)))


class PermGroup:
    """A finite group of permutations, stored with its full element list."""

    def __init__(self, n: int, generators: Sequence[Permutation], elements: Iterable[Permutation] | None = None):
        self.n = n
        self.generators = tuple(g for g in generators if not g.is_identity()) or ()
        for g in generators:
            if g.n != n:
                raise ValueError(f"generator {g} is not a permutation of [{n}]")
        if elements is None:
            elements = _closure(n, self.generators)
        self.elements = tuple(sorted(elements))
        self._set = frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, sigma):
        return sigma in self._set

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return isinstance(other, PermGroup) and self._set == other._set

    def __hash__(self):
        return hash(self._set)

    def conjugate(self, g: Permutation) -> "PermGroup":
        gi = g.inverse()
        return PermGroup(self.n, [gi * h * g for h in self.generators],
                         elements=[gi * h * g for h in self.elements])

    def generator_string(self) -> str:
        if not self.generators:
            return "e"
        return ",".join(str(g) for g in self.generators)

    def orbits_on_pairs(self) -> list:
        """Orbits on unordered pairs ``{i, j}``, each a sorted list of ``(i, j)`` with ``i < j``."""
        pairs = list(itertools.combinations(range(self.n), 2))
        seen = set()
        out = []
        for p in pairs:
            if p in seen:
                continue
            orb = set()
            for s in self.elements:
                a, b = s.images[p[0]], s.images[p[1]]
                orb.add((min(a, b), max(a, b)))
            seen |= orb
            out.append(sorted(orb))
        return out

    def orbits_on_ordered_pairs(self) -> list:
        seen = set()
        out = []
        for p in itertools.permutations(range(self.n), 2):
            if p in seen:
                continue
            orb = {(s.images[p[0]], s.images[p[1]]) for s in self.elements}
            seen |= orb
            out.append(sorted(orb))
        return out

    def __repr__(self):
        return f"PermGroup(n={self.n}, order={self.order}, <{self.generator_string()}>)"


def _tuple_closure(n: int, gens: Sequence[tuple]) -> set:
    e = tuple(range(n))
    elems = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(g[i] for i in x)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return elems


def _closure(n: int, generators: Sequence[Permutation]) -> set:
    return {Permutation(t) for t in _tuple_closure(n, [g.images for g in generators])}


def generate_group(n: int, generators: Iterable[Permutation | str]) -> PermGroup:
    gens = [Permutation.parse(g, n) if isinstance(g, str) else g for g in generators]
    return PermGroup(n, gens)


def parse_group(text: str, n: int) -> PermGroup:
    """``"(12),(34)"`` or ``"<(1234),(12)>"``; cycles may be comma-separated inside."""
    s = text.strip().strip("<>").strip()
    # commas inside parentheses separate labels, commas outside separate generators
    tokens = [t.strip() for t in re.split(r",(?![^(]*\))", s) if t.strip()]
    return generate_group(n, tokens or ["e"])


def symmetric_group(n: int) -> PermGroup:
    elems = [Permutation(p) for p in itertools.permutations(range(n))]
    if n < 2:
        return PermGroup(n, [], elements=elems)
    gens = [Permutation.from_cycles([list(range(1, n + 1))], n), Permutation.from_cycles([[1, 2]], n)]
    return PermGroup(n, gens, elements=elems)


def _small_generating_set(n: int, elements: frozenset) -> list:
    """Greedy generating set, scanning elements in sorted order."""
    gens: list = []
    current = {Permutation.identity(n)}
    for x in sorted(elements, key=lambda p: (-p.order(), p.images)):
        if x not in current:
            gens.append(x)
            current = _closure(n, gens)
            if len(current) == len(elements):
                break
    return gens


def enumerate_subgroups(n: int) -> list:
    """Every subgroup of ``S_n`` as a frozenset of elements (``n <= MAX_SUBGROUP_N``)."""
    if n > MAX_SUBGROUP_N:
        raise ValueError(f"subgroup enumeration is limited to n <= {MAX_SUBGROUP_N}")
    sym = list(itertools.permutations(range(n)))
    cyclic: dict = {}
    for t in sym:
        cyclic.setdefault(frozenset(_tuple_closure(n, [t])), t)
    found = {C: [g] for C, g in cyclic.items()}
    frontier = list(found)
    while frontier:
        nxt = []
        for H in frontier:
            for C, c in cyclic.items():
                if c in H:
                    continue
                gens = found[H] + [c]
                K = frozenset(_tuple_closure(n, gens))
                if K not in found:
                    found[K] = gens
                    nxt.append(K)
        frontier = nxt
    groups = [frozenset(Permutation(t) for t in H) for H in found]
    return sorted(groups, key=lambda H: (len(H), sorted(H)))


def _relabel(h: tuple, g: tuple) -> tuple:
    out = [0] * len(h)
    for i, x in enumerate(h):
        out[g[i]] = g[x]
    return tuple(out)


def enumerate_subgroups_up_to_conjugacy(n: int) -> list:
    """One :class:`PermGroup` per conjugacy class of subgroups of ``S_n``.

    The representative is the class member with the lexicographically least
    sorted element list; classes are ordered by (order, representative).
    """
    subs = enumerate_subgroups(n)
    sym = list(itertools.permutations(range(n)))
    classes: dict = {}
    seen: set = set()
    for H in subs:
        if H in seen:
            continue
        raw = [h.images for h in H]
        orbit = set()
        for g in sym:
            # g^-1 h g relabels h's cycles through g
            orbit.add(frozenset(_relabel(h, g) for h in raw))
        seen |= {frozenset(Permutation(t) for t in K) for K in orbit}
        canon = min(tuple(sorted(K)) for K in orbit)
        classes[canon] = orbit
    reps = []
    for canon in sorted(classes, key=lambda k: (len(k), k)):
        elems = frozenset(Permutation(t) for t in canon)
        reps.append(PermGroup(n, _small_generating_set(n, elems), elements=elems))
    return reps


def are_conjugate(G: PermGroup, H: PermGroup) -> bool:
    if G.n != H.n or G.order != H.order:
        return False
    target = H._set
    return any(frozenset(g.inverse() * h * g for h in G.elements) == target
               for g in symmetric_group(G.n).elements)


def partitions(n: int, largest: int | None = None):
    """Integer partitions of ``n`` in reverse lexicographic order."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


@dataclass(frozen=True)
class ConjugacyClass:
    cycle_type: dict
    size: int
    representative: Permutation

    @property
    def partition(self) -> tuple:
        return tuple(sorted((k for k, r in self.cycle_type.items() for _ in range(r)), reverse=True))


def conjugacy_classes(n: int) -> list:
    """Classes of ``S_n`` by cycle type, with sizes ``n! / prod(k^r_k r_k!)``."""
    if n > MAX_CLASS_N:
        raise ValueError(f"conjugacy class listing is limited to n <= {MAX_CLASS_N}")
    out = []
    for part in sorted(partitions(n)):
        cycles = []
        start = 1
        for k in part:
            cycles.append(list(range(start, start + k)))
            start += k
        rep = Permutation.from_cycles([c for c in cycles if len(c) > 1], n)
        ct = cycle_type(rep)
        denom = 1
        for k, r in ct.items():
            denom *= k ** r * math.factorial(r)
        out.append(ConjugacyClass(ct, math.factorial(n) // denom, rep))
    return out
