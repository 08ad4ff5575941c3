"""Structured reports: model analyses, hierarchy graphs and Table 1 rendering."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from . import __version__
from .algebra import (
    NotAModuleError,
    aggregate_stability,
    classify_sn_jordan_modules,
    irrep_multiplicities,
    is_g_module,
    jordan_closed,
    lie_closed,
    matrix_algebra_closed,
    sn_generators,
    table1_model_name,
    uniformization_stable_linear,
)
from .catalog import (
    PI_FAMILIES,
    ModelSpec,
    conical_generators,
    display_name,
    sample_pis,
    spanning_set,
)
from .linalg import MatrixSubspace, format_rational
from .perms import parse_group

SCHEMA = "jm/1"


def _yes(v) -> str:
    return {True: "yes", False: "no", None: "inconclusive"}[v]


@dataclass
class AnalysisReport:
    spec: str
    name: str
    n: int
    dimension: int
    verdicts: dict
    witnesses: dict = field(default_factory=dict)
    multiplicities: dict | None = None
    pi_samples: list | None = None
    seed: int | None = None
    version: str = __version__
    schema: str = SCHEMA

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data: dict) -> "AnalysisReport":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(**data)

    @classmethod
    def loads(cls, text: str) -> "AnalysisReport":
        return cls.from_json(json.loads(text))

    def to_markdown(self) -> str:
        lines = [f"# {self.name} (`{self.spec}`)", "", f"- n: {self.n}", f"- dimension: {self.dimension}"]
        for key, val in self.verdicts.items():
            lines.append(f"- {key}: {val}")
        if self.multiplicities:
            mult = ", ".join(f"{k}: {v}" for k, v in self.multiplicities.items())
            lines.append(f"- multiplicities: {mult}")
        if self.pi_samples:
            lines.append(f"- pi samples ({len(self.pi_samples)}, seed {self.seed}):")
            lines += [f"  - ({', '.join(p)})" for p in self.pi_samples]
        for key, w in self.witnesses.items():
            lines.append(f"- witness for {key}: pair {w.get('pair')}, product {w.get('product')}")
        return "\n".join(lines) + "\n"


def _module_group(spec: ModelSpec, group: str | None) -> tuple:
    """(label, generators) of the group used for the module check."""
    if group is not None:
        G = parse_group(group, spec.n)
        return G.generator_string(), G.generators
    if spec.group is not None and spec.family in ("EqTR", "Equivariant"):
        G = spec.group_obj()
        return G.generator_string(), G.generators
    return f"S_{spec.n}", sn_generators(spec.n)


def analyze(spec: ModelSpec, group: str | None = None, samples: int = 5, seed: int = 0) -> AnalysisReport:
    """Every verdict for one model spec; distributions are sampled when ``pi=random``."""
    if spec.family in PI_FAMILIES and spec.random_pi:
        pis = sample_pis(spec.n, samples, seed)
    elif spec.family in PI_FAMILIES:
        pis = [spec.pi]
    else:
        pis = [None]
    G_label, G = _module_group(spec, group)
    closures = {"jordan": [], "lie": [], "matrix_algebra": [], "g_module": []}
    stab = []
    witnesses = {}
    dims = set()
    S = None
    for pi in pis:
        S = MatrixSubspace.span(spanning_set(spec, pi), n=spec.n)
        dims.add(S.dim)
        for key, fn in (("jordan", jordan_closed), ("lie", lie_closed), ("matrix_algebra", matrix_algebra_closed)):
            v = fn(S)
            closures[key].append(v.closed)
            if not v.closed and key not in witnesses:
                witnesses[key] = _witness(v, pi)
        v = is_g_module(S, G)
        closures["g_module"].append(v.closed)
        if not v.closed and "g_module" not in witnesses:
            witnesses["g_module"] = _witness(v, pi)
        stab.append(uniformization_stable_linear(S, conical_generators(spec, pi)))
    if len(dims) != 1:
        raise AssertionError(f"dimension varies with the distribution: {sorted(dims)}")
    minimal = "minimal" if all(s.minimal.minimal for s in stab) else "inconclusive"
    verdicts = {
        "jordan": _yes(all(closures["jordan"])),
        "lie": _yes(all(closures["lie"])),
        "matrix_algebra": _yes(all(closures["matrix_algebra"])),
        f"g_module({G_label})": _yes(all(closures["g_module"])),
        "minimality": minimal,
        "uniformization_stable": _yes(aggregate_stability(stab)),
    }
    mult = None
    if len(pis) == 1 and 3 <= spec.n <= 8:
        try:
            mult = irrep_multiplicities(S).to_json()
        except NotAModuleError:
            mult = None
    return AnalysisReport(
        spec=spec.text(),
        name=_name(spec),
        n=spec.n,
        dimension=dims.pop(),
        verdicts=verdicts,
        witnesses=witnesses,
        multiplicities=mult,
        pi_samples=[[format_rational(x) for x in p] for p in pis] if spec.random_pi else None,
        seed=seed if spec.random_pi else None,
    )


def _name(spec: ModelSpec) -> str:
    if spec.family == "EqTR":
        return table1_model_name(spec.group_obj()) or display_name(spec)
    return display_name(spec)


def _witness(v, pi) -> dict:
    w = v.to_json().get("witness", {})
    if pi is not None:
        w = {"pi": [format_rational(x) for x in pi], **w}
    return w


# ---------------------------------------------------------------------------
# hierarchy


@dataclass
class HierarchyGraph:
    n: int
    nodes: list  # (name, dimension)
    edges: list  # (smaller, larger) covering pairs

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "n": self.n,
            "nodes": [{"name": a, "dimension": d} for a, d in self.nodes],
            "edges": [list(e) for e in self.edges],
        }

    def to_dot(self) -> str:
        lines = [f"digraph hierarchy_{self.n} {{", "  rankdir=BT;"]
        for name, dim in self.nodes:
            lines.append(f'  "{name}" [label="{name}\\ndim {dim}"];')
        for a, b in self.edges:
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def transitive_reduction(names: list, subspaces: list) -> list:
    """Covering pairs of strict inclusion, in node order."""
    k = len(names)
    below = {(a, b) for a in range(k) for b in range(k) if a != b and subspaces[a] < subspaces[b]}
    edges = []
    for a, b in sorted(below):
        if not any((a, c) in below and (c, b) in below for c in range(k)):
            edges.append((names[a], names[b]))
    return edges


def hierarchy(n: int) -> HierarchyGraph:
    models = classify_sn_jordan_modules(n)
    names = [m.name for m in models]
    if len(set(names)) != len(names):
        raise AssertionError(f"duplicate model names {names}")
    return HierarchyGraph(n, [(m.name, m.dim) for m in models],
                          transitive_reduction(names, [m.subspace for m in models]))


# ---------------------------------------------------------------------------
# Table 1


def table1_json(rows: list, pis: list, seed: int) -> dict:
    return {
        "schema": SCHEMA,
        "seed": seed,
        "pi_samples": [[format_rational(x) for x in p] for p in pis],
        "rows": [r.to_json() for r in rows],
        "yes": sum(r.stable is True for r in rows),
        "no": sum(r.stable is False for r in rows),
        "all_match": all(r.matches for r in rows),
    }


def table1_text(rows: list) -> str:
    head = f"{'G':<8} {'generators':<30} {'model':<14} {'dim':>3}  stable  expected"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(f"{r.subgroup:<8} {r.generators:<30} {r.model:<14} {r.dimension:>3}  "
                     f"{_yes(r.stable):<6}  {_yes(r.expected)}{'' if r.matches else '  MISMATCH'}")
    yes = sum(r.stable is True for r in rows)
    lines.append(f"{yes} yes, {len(rows) - yes} no")
    return "\n".join(lines) + "\n"
