"""Network computation models: a DAG with sources, one sink, and a target function.

A :class:`NetworkModel` bundles a finite directed acyclic multigraph, an
ordered list of source nodes, a single sink node, a finite alphabet
``{0, ..., q-1}`` shared by all sources, the target function as a flat value
table over source tuples, and a strictly positive joint source distribution.
Symbols observed at the sources are i.i.d. across shots, so a block of k
observations is a k-row matrix with one column per source.

The cut machinery lives here as well: for an edge set C,
:func:`analyze_cut` computes which sources can feed C, which sources are
disconnected from the sink once C is removed, and the side-information
remainder.  :func:`enumerate_strong_partitions` lists the partitions of a
cut set whose blocks each disconnect at least one source while staying
pairwise non-interfering; those partitions are what the bound machinery
iterates over.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

import networkx as nx

from .errors import (
    BadDistribution,
    ConstantFunction,
    CycleDetected,
    NotACutSet,
    SinkHasOutEdge,
    SourceHasInEdge,
    TooLarge,
    UnknownEdgeId,
    UnreachableNode,
    UsageError,
)

Assignment = tuple[tuple[int, ...], ...]
"""One k-shot observation block: a k-tuple of symbols per source, source-major."""


class Edge(NamedTuple):
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class NetworkModel:
    """Immutable network description.

    ``function_table`` lists the target value for every source tuple in
    lexicographic order with the first source most significant.
    ``distribution`` is aligned the same way and must be strictly positive.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    sources: tuple[str, ...]
    sink: str
    alphabet_size: int
    function_table: tuple[Hashable, ...]
    distribution: tuple[float, ...]

    @property
    def num_sources(self) -> int:
        return len(self.sources)

    @property
    def symbols(self) -> range:
        return range(self.alphabet_size)

    def edge_by_id(self, edge_id: str) -> Edge:
        try:
            return _edge_map(self)[edge_id]
        except KeyError:
            raise UnknownEdgeId(edge_id) from None

    def in_edges(self, node: str) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.head == node)

    def out_edges(self, node: str) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.tail == node)

    def arg_index(self, xs: Sequence[int]) -> int:
        """Row index of a full source tuple, first source most significant."""
        idx = 0
        for x in xs:
            idx = idx * self.alphabet_size + x
        return idx

    def f_of(self, by_source: Mapping[str, int]) -> Hashable:
        """Target value for one shot, arguments keyed by source id."""
        return self.function_table[self.arg_index([by_source[s] for s in self.sources])]

    def f_rows(self, columns: Mapping[str, tuple[int, ...]], k: int) -> tuple[Hashable, ...]:
        """Row-wise target values for a k-shot block keyed by source id."""
        cols = [columns[s] for s in self.sources]
        return tuple(
            self.function_table[self.arg_index([c[r] for c in cols])] for r in range(k)
        )

    def prob_of(self, xs: Sequence[int]) -> float:
        return self.distribution[self.arg_index(xs)]

    def distribution_fractions(self) -> tuple[Fraction, ...]:
        """The joint distribution lifted to exact rationals."""
        return tuple(Fraction(p) for p in self.distribution)


@dataclass(frozen=True)
class CutAnalysis:
    """Source sets attached to an edge set C.

    ``k_set`` holds the sources with a directed path (possibly of length
    zero) to the tail of some edge of C, ``i_set`` the sources disconnected
    from the sink once C is deleted, and ``j_set`` their difference: sources
    that can feed C but still reach the sink without it.
    """

    cut: tuple[str, ...]
    k_set: frozenset[str]
    i_set: frozenset[str]
    j_set: frozenset[str]
    is_global: bool

    @property
    def is_cut_set(self) -> bool:
        return bool(self.i_set)


@dataclass(frozen=True)
class StrongPartition:
    """A partition of a cut set into pairwise non-interfering blocks.

    Every block disconnects at least one source on its own, and no source
    disconnected by one block can feed a different block.  ``i_sets`` is
    aligned with ``blocks``; ``l_set`` collects the sources disconnected by
    the whole cut but by none of the blocks individually.
    """

    cut: CutAnalysis
    blocks: tuple[tuple[str, ...], ...]
    i_sets: tuple[frozenset[str], ...]
    l_set: frozenset[str]

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def is_trivial(self) -> bool:
        return len(self.blocks) == 1


# -- construction and serialization ------------------------------------------


def model_from_dict(doc: Mapping) -> NetworkModel:
    """Build a model from its JSON document form.  Schema errors raise UsageError."""
    try:
        q = int(doc["alphabet"])
        nodes = tuple(str(n) for n in doc["nodes"])
        edges = tuple(Edge(str(e["id"]), str(e["tail"]), str(e["head"])) for e in doc["edges"])
        sources = tuple(str(s) for s in doc["sources"])
        sink = str(doc["sink"])
        table = tuple(doc["function"])
        dist = tuple(float(p) for p in doc["distribution"])
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed model document: {exc}") from exc

    if q < 2:
        raise UsageError("alphabet size must be at least 2")
    if len(set(nodes)) != len(nodes):
        raise UsageError("duplicate node names")
    if len({e.id for e in edges}) != len(edges):
        raise UsageError("duplicate edge ids")
    known = set(nodes)
    for e in edges:
        if e.tail not in known or e.head not in known:
            raise UsageError(f"edge {e.id} references unknown node")
    if not sources:
        raise UsageError("at least one source is required")
    if len(set(sources)) != len(sources):
        raise UsageError("duplicate sources")
    if any(s not in known for s in sources) or sink not in known:
        raise UsageError("sources and sink must be nodes")
    if sink in sources:
        raise UsageError("the sink cannot be a source")
    size = q ** len(sources)
    if len(table) != size:
        raise UsageError(f"function table must have {size} entries, got {len(table)}")
    if len(dist) != size:
        raise UsageError(f"distribution must have {size} entries, got {len(dist)}")
    return NetworkModel(nodes, edges, sources, sink, q, table, dist)


def model_to_dict(model: NetworkModel) -> dict:
    return {
        "alphabet": model.alphabet_size,
        "nodes": list(model.nodes),
        "edges": [{"id": e.id, "tail": e.tail, "head": e.head} for e in model.edges],
        "sources": list(model.sources),
        "sink": model.sink,
        "function": list(model.function_table),
        "distribution": list(model.distribution),
    }


def load_model(path: str) -> NetworkModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from exc
    return model_from_dict(doc)


# -- validation ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _digraph(model: NetworkModel) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    g.add_nodes_from(model.nodes)
    for e in model.edges:
        g.add_edge(e.tail, e.head, key=e.id)
    return g


@lru_cache(maxsize=None)
def _descendants(model: NetworkModel) -> dict[str, frozenset[str]]:
    g = _digraph(model)
    return {n: frozenset(nx.descendants(g, n)) for n in model.nodes}


def reaches(model: NetworkModel, u: str, v: str) -> bool:
    """True when there is a directed path from u to v, length zero included."""
    return u == v or v in _descendants(model)[u]


def validate(model: NetworkModel) -> NetworkModel:
    """Check the structural and probabilistic invariants; return the model.

    Check order matters for documented diagnostics: sink out-edges are
    reported before source in-edges, cycles, and reachability.
    """
    if model.sink in model.sources:
        raise UsageError("the sink cannot be a source")
    for e in model.edges:
        if e.tail == model.sink:
            raise SinkHasOutEdge(e.id)
    for e in model.edges:
        if e.head in model.sources:
            raise SourceHasInEdge(f"{e.id} enters source {e.head}")
    g = _digraph(model)
    if not nx.is_directed_acyclic_graph(g):
        cyc = nx.find_cycle(g)
        raise CycleDetected(" -> ".join(str(a) for a, _, _ in cyc))
    for n in model.nodes:
        if n != model.sink and not reaches(model, n, model.sink):
            raise UnreachableNode(n)
    total = 0.0
    for p in model.distribution:
        if not p > 0.0:
            raise BadDistribution(f"mass {p} is not strictly positive")
        total += p
    if abs(total - 1.0) > 1e-12:
        raise BadDistribution(f"mass sums to {total!r}")
    if len(set(model.function_table)) < 2:
        raise ConstantFunction("target function takes a single value")
    return model


# -- cut analysis -------------------------------------------------------------


def analyze_cut(model: NetworkModel, cut: Iterable[str]) -> CutAnalysis:
    """Classify the sources relative to the edge set ``cut``."""
    ids = tuple(sorted(set(cut)))
    for eid in ids:
        model.edge_by_id(eid)
    return _analyze(model, ids)


@lru_cache(maxsize=None)
def _analyze(model: NetworkModel, ids: tuple[str, ...]) -> CutAnalysis:
    edges = [model.edge_by_id(eid) for eid in ids]
    k_set = frozenset(
        s for s in model.sources if any(reaches(model, s, e.tail) for e in edges)
    )
    pruned = _digraph(model).copy()
    for e in edges:
        pruned.remove_edge(e.tail, e.head, key=e.id)
    i_set = frozenset(
        s for s in model.sources if not nx.has_path(pruned, s, model.sink)
    )
    return CutAnalysis(
        cut=ids,
        k_set=k_set,
        i_set=i_set,
        j_set=k_set - i_set,
        is_global=i_set == frozenset(model.sources),
    )


def enumerate_cut_sets(
    model: NetworkModel, max_size: int | None = None, *, edge_cap: int = 20
) -> list[CutAnalysis]:
    """All cut sets up to ``max_size`` edges, in lexicographic edge-id order.

    Enumeration is exponential in the edge count, so models with more than
    ``edge_cap`` edges are refused, and 26 edges is a hard ceiling.
    """
    m = len(model.edges)
    if m > 26:
        raise TooLarge(f"{m} edges; cut enumeration is capped at 26")
    if m > edge_cap:
        raise TooLarge(f"{m} edges exceeds the cap of {edge_cap}; raise edge_cap to proceed")
    if max_size is None:
        max_size = m
    if not 1 <= max_size <= m:
        raise UsageError(f"max_size must be in 1..{m}")
    ids = sorted(e.id for e in model.edges)
    combos: list[tuple[str, ...]] = []
    for r in range(1, max_size + 1):
        combos.extend(itertools.combinations(ids, r))
    combos.sort()
    out = []
    for c in combos:
        analysis = _analyze(model, c)
        if analysis.is_cut_set:
            out.append(analysis)
    return out


def _restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """All restricted growth strings of length n, lexicographically."""
    rgs = [0] * n

    def rec(i: int, top: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(rgs)
            return
        for v in range(top + 2):
            rgs[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0) if n > 0 else iter(())


def enumerate_strong_partitions(
    model: NetworkModel, cut: CutAnalysis | Iterable[str]
) -> list[StrongPartition]:
    """All strong partitions of a cut set, the one-block partition first.

    Partitions are generated in restricted-growth-string order over the
    sorted edge ids, which is a canonical total order; within a partition the
    blocks are ordered by their least edge id.
    """
    if not isinstance(cut, CutAnalysis):
        cut = analyze_cut(model, cut)
    if not cut.is_cut_set:
        raise NotACutSet(",".join(cut.cut))
    ids = cut.cut
    out: list[StrongPartition] = []
    for rgs in _restricted_growth_strings(len(ids)):
        nblocks = max(rgs) + 1
        blocks = tuple(
            tuple(ids[i] for i in range(len(ids)) if rgs[i] == b) for b in range(nblocks)
        )
        analyses = [_analyze(model, b) for b in blocks]
        if any(not a.is_cut_set for a in analyses):
            continue
        ok = True
        for a, b in itertools.permutations(analyses, 2):
            if a.i_set & b.k_set:
                ok = False
                break
        if not ok:
            continue
        covered: set[str] = set()
        for a in analyses:
            covered |= a.i_set
        out.append(
            StrongPartition(
                cut=cut,
                blocks=blocks,
                i_sets=tuple(a.i_set for a in analyses),
                l_set=cut.i_set - covered,
            )
        )
    return out


# -- assignment helpers shared by the equivalence and graph layers ------------


def enumerate_assignments(q: int, n_sources: int, k: int) -> Iterator[Assignment]:
    """All k-shot blocks over ``n_sources`` sources, lexicographically.

    The flattened symbol string is source-major (all k symbols of the first
    source, then the second, and so on), which fixes the canonical order used
    everywhere: vertex enumeration, class members, serialized labels.
    """
    width = n_sources * k
    for flat in itertools.product(range(q), repeat=width):
        yield tuple(flat[i * k : (i + 1) * k] for i in range(n_sources))


def assignment_count(q: int, n_sources: int, k: int) -> int:
    return q ** (n_sources * k)


def restrict_sources(model: NetworkModel, subset: Iterable[str]) -> tuple[str, ...]:
    """The subset of sources in model source order; unknown names raise."""
    subset = set(subset)
    unknown = subset - set(model.sources)
    if unknown:
        raise UsageError(f"unknown sources: {sorted(unknown)}")
    return tuple(s for s in model.sources if s in subset)


def assemble(
    parts: Mapping[str, tuple[int, ...]], order: Sequence[str]
) -> Assignment:
    """Pick the columns named by ``order`` out of a source-keyed mapping."""
    return tuple(parts[s] for s in order)


def format_assignment(assignment: Assignment, q: int) -> str:
    """Canonical string form of a block: flattened symbols, source-major."""
    if q <= 10:
        return "".join(str(sym) for col in assignment for sym in col)
    return ",".join(str(sym) for col in assignment for sym in col)


@lru_cache(maxsize=None)
def _edge_map(model: NetworkModel) -> dict[str, Edge]:
    return {e.id: e for e in model.edges}
