"""Shared generators and brute-force oracles.

Everything here recomputes results straight from first principles, without
touching the package's fast paths: cut classification by hand-rolled BFS,
the strong-partition filter over all set partitions, the characteristic
graph's edge predicate by explicit quantification over completions, maximum
cliques and independent sets by subset enumeration, and minimum-entropy
colorings by partition enumeration.  Tests compare the library against
these oracles on small random instances.
"""

from __future__ import annotations

import itertools
import math
import random

from netfuncomp.netmodel import Edge, NetworkModel, validate
from netfuncomp.pgraph import ProbGraph


# -- random instances ----------------------------------------------------------


def random_model(rng: random.Random, max_sources: int = 3, max_edges: int = 8) -> NetworkModel:
    """A random valid binary model: every node reaches the sink, f nonconstant."""
    n_sources = rng.randint(1, max_sources)
    n_mid = rng.randint(0, 2)
    sources = [f"s{i + 1}" for i in range(n_sources)]
    mids = [f"v{i + 1}" for i in range(n_mid)]
    nodes = sources + mids + ["t"]
    later = {node: nodes[i + 1 :] for i, node in enumerate(nodes)}

    edges: list[tuple[str, str]] = []
    for node in sources + mids:
        heads = [h for h in later[node] if h not in sources]
        edges.append((node, rng.choice(heads)))
    while len(edges) < max_edges and rng.random() < 0.6:
        tail = rng.choice(sources + mids)
        heads = [h for h in later[tail] if h not in sources]
        edges.append((tail, rng.choice(heads)))

    size = 2**n_sources
    table = [rng.randrange(2) for _ in range(size)]
    while len(set(table)) < 2:
        table = [rng.randrange(2) for _ in range(size)]
    weights = [rng.uniform(0.2, 1.0) for _ in range(size)]
    total = sum(weights)
    dist = [w / total for w in weights]
    dist[-1] = 1.0 - sum(dist[:-1])

    return validate(
        NetworkModel(
            nodes=tuple(nodes),
            edges=tuple(Edge(f"e{i + 1}", t, h) for i, (t, h) in enumerate(edges)),
            sources=tuple(sources),
            sink="t",
            alphabet_size=2,
            function_table=tuple(table),
            distribution=tuple(dist),
        )
    )


def random_graph(rng: random.Random, max_n: int = 8, min_n: int = 1) -> ProbGraph:
    """A random graph on 1..max_n vertices with a strictly positive distribution."""
    n = rng.randint(min_n, max_n)
    density = rng.uniform(0.1, 0.9)
    vertices = [f"z{i}" for i in range(n)]
    edges = [
        (vertices[i], vertices[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    ]
    weights = [rng.uniform(0.1, 1.0) for _ in range(n)]
    total = sum(weights)
    dist = [w / total for w in weights]
    dist[-1] = 1.0 - sum(dist[:-1])
    return ProbGraph(vertices, edges, dist)


# -- cut machinery oracles -----------------------------------------------------


def _reachable(model: NetworkModel, start: str, removed: frozenset[str]) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for e in model.edges:
            if e.id not in removed and e.tail == u and e.head not in seen:
                seen.add(e.head)
                stack.append(e.head)
    return seen


def brute_cut_sets(model: NetworkModel, cut_ids) -> tuple[set[str], set[str], set[str]]:
    """(K, I, J) for an edge set, from scratch."""
    ids = frozenset(cut_ids)
    tails = {model.edge_by_id(eid).tail for eid in ids}
    k_set = {
        s
        for s in model.sources
        if tails & _reachable(model, s, frozenset())
    }
    i_set = {
        s for s in model.sources if model.sink not in _reachable(model, s, ids)
    }
    return k_set, i_set, k_set - i_set


def set_partitions(items: list):
    """All partitions of ``items`` into nonempty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def brute_strong_partitions(model: NetworkModel, cut_ids) -> set[frozenset[frozenset[str]]]:
    """The strong partitions of a cut set, by filtering every set partition."""
    out = set()
    for blocks in set_partitions(sorted(cut_ids)):
        analyses = [brute_cut_sets(model, b) for b in blocks]
        if any(not i for _, i, _ in analyses):
            continue
        clash = False
        for a in range(len(blocks)):
            for b in range(len(blocks)):
                if a != b and analyses[a][1] & analyses[b][0]:
                    clash = True
        if not clash:
            out.add(frozenset(frozenset(b) for b in blocks))
    return out


# -- characteristic graph oracle -----------------------------------------------


def _columns(q: int, k: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(q), repeat=k))


def _f_rows(model: NetworkModel, cols: dict, k: int) -> tuple:
    return tuple(
        model.function_table[model.arg_index([cols[s][r] for s in model.sources])]
        for r in range(k)
    )


def brute_i_equivalent(model, i_tuple, j_tuple, b, b_prime, a_j, k) -> bool:
    """Interchangeability of two I-blocks under every completion."""
    fixed = set(i_tuple) | set(j_tuple)
    rest = [s for s in model.sources if s not in fixed]
    for d in itertools.product(_columns(model.alphabet_size, k), repeat=len(rest)):
        cols = dict(zip(i_tuple, b)) | dict(zip(j_tuple, a_j)) | dict(zip(rest, d))
        cols_p = dict(zip(i_tuple, b_prime)) | dict(zip(j_tuple, a_j)) | dict(zip(rest, d))
        if _f_rows(model, cols, k) != _f_rows(model, cols_p, k):
            return False
    return True


def brute_block_equivalent(model, partition, ell, b, b_prime, a_l, a_j, k) -> bool:
    """Block-level interchangeability: other blocks range freely, L pinned."""
    cut = partition.cut
    i_tuple = [s for s in model.sources if s in cut.i_set]
    j_tuple = [s for s in model.sources if s in cut.j_set]
    ell_tuple = [s for s in model.sources if s in partition.i_sets[ell]]
    l_tuple = [s for s in model.sources if s in partition.l_set]
    others = [
        s for s in i_tuple if s not in set(ell_tuple) and s not in set(l_tuple)
    ]
    q = model.alphabet_size
    for c in itertools.product(_columns(q, k), repeat=len(others)):
        base = dict(zip(l_tuple, a_l)) | dict(zip(others, c))
        full = {**base, **dict(zip(ell_tuple, b))}
        full_p = {**base, **dict(zip(ell_tuple, b_prime))}
        bi = tuple(full[s] for s in i_tuple)
        bi_p = tuple(full_p[s] for s in i_tuple)
        if not brute_i_equivalent(model, i_tuple, j_tuple, bi, bi_p, a_j, k):
            return False
    return True


def brute_char_edges(model, partition, k) -> set[frozenset]:
    """Edge set of the characteristic graph straight from the definition.

    Vertices are assignments over I then J in model source order; returned
    edges are frozensets of assignment pairs.
    """
    cut = partition.cut
    i_tuple = [s for s in model.sources if s in cut.i_set]
    j_tuple = [s for s in model.sources if s in cut.j_set]
    order = [s for s in model.sources if s in cut.i_set | cut.j_set]
    l_tuple = [s for s in model.sources if s in partition.l_set]
    q = model.alphabet_size
    verts = list(itertools.product(_columns(q, k), repeat=len(order)))

    def split(v):
        cols = dict(zip(order, v))
        x_i = tuple(cols[s] for s in i_tuple)
        x_j = tuple(cols[s] for s in j_tuple)
        x_l = tuple(cols[s] for s in l_tuple)
        per_block = [
            tuple(cols[s] for s in model.sources if s in partition.i_sets[ell])
            for ell in range(partition.m)
        ]
        return x_i, x_j, x_l, per_block

    edges = set()
    for u, v in itertools.combinations(verts, 2):
        ui, uj, ul, ub = split(u)
        vi, vj, vl, vb = split(v)
        if uj != vj:
            continue
        if not brute_i_equivalent(model, i_tuple, j_tuple, ui, vi, uj, k):
            edges.add(frozenset((u, v)))
        elif ul == vl and any(
            not brute_block_equivalent(model, partition, ell, ub[ell], vb[ell], ul, uj, k)
            for ell in range(partition.m)
        ):
            edges.add(frozenset((u, v)))
    return edges


# -- graph oracles --------------------------------------------------------------


def brute_clique_number(g: ProbGraph) -> int:
    best = 1
    verts = list(g.vertices)
    for size in range(2, g.n + 1):
        found = False
        for combo in itertools.combinations(verts, size):
            if all(g.adjacent(u, v) for u, v in itertools.combinations(combo, 2)):
                found = True
                break
        if not found:
            break
        best = size
    return best


def brute_max_weight_independent_set(g: ProbGraph, weights: dict) -> float:
    best = 0.0
    verts = list(g.vertices)
    for size in range(0, g.n + 1):
        for combo in itertools.combinations(verts, size):
            if any(g.adjacent(u, v) for u, v in itertools.combinations(combo, 2)):
                continue
            best = max(best, sum(weights[v] for v in combo))
    return best


def brute_chromatic_entropy(g: ProbGraph) -> float:
    """Minimum coloring entropy over every partition into independent sets."""
    ids = [v for v, p in zip(g.vertices, g.dist) if p > 0]
    best = math.inf
    for blocks in set_partitions(ids):
        if any(
            g.adjacent(u, v)
            for blk in blocks
            for u, v in itertools.combinations(blk, 2)
        ):
            continue
        h = 0.0
        for blk in blocks:
            mass = float(g.mass(blk))
            h -= mass * math.log2(mass)
        best = min(best, h)
    return best
