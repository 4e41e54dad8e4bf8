"""Independent oracles the tests check the library against.

Everything here recomputes quantities by a different route than the package
does: faces by union-find instead of boundary splicing, pairings by list
recursion instead of the linked-list engine, trace invariants by the full
multi-index sum, melonic recognition by exploring every contraction order.
"""

from __future__ import annotations

import math
from itertools import product

from tensorwick.graphs import ColoredGraph, Matching, random_colored_graph


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def dsu_cycle_count(pairs_a, pairs_b, two_n: int) -> int:
    """Components of the union multigraph, via union-find (not walking)."""
    parent = list(range(two_n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = two_n
    for u, v in list(pairs_a) + list(pairs_b):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[rv] = ru
            count -= 1
    return count


def all_matchings(two_n: int):
    """Every perfect matching on 0..two_n-1 as a list of pairs."""
    if two_n == 0:
        yield []
        return
    verts = list(range(two_n))

    def rec(remaining):
        if not remaining:
            yield []
            return
        u = remaining[0]
        for i in range(1, len(remaining)):
            v = remaining[i]
            rest = remaining[1:i] + remaining[i + 1 :]
            for tail in rec(rest):
                yield [(u, v)] + tail

    yield from rec(verts)


def faces_of(G: ColoredGraph, m0_pairs) -> int:
    two_n = 2 * G.n
    return sum(dsu_cycle_count(m.pairs, m0_pairs, two_n) for m in G.matchings)


def joined_connected(G: ColoredGraph, m0_pairs) -> bool:
    two_n = 2 * G.n
    all_pairs = [p for m in G.matchings for p in m.pairs] + list(m0_pairs)
    return dsu_cycle_count(all_pairs, [], two_n) == 1


def brute_histogram(G: ColoredGraph, connected_only: bool = False) -> dict[int, int]:
    counts: dict[int, int] = {}
    for m0 in all_matchings(2 * G.n):
        if connected_only and not joined_connected(G, m0):
            continue
        f = faces_of(G, m0)
        counts[f] = counts.get(f, 0) + 1
    return counts


def naive_trace(G: ColoredGraph, entries) -> float:
    """The literal multi-index sum: one D-tuple of indices per vertex, one
    delta per colored edge.  Exponentially slow; only for tiny N."""
    N = entries.shape[0]
    two_n = 2 * G.n
    D = G.D
    total = 0.0
    for assign in product(range(N), repeat=two_n * D):
        idx = [assign[v * D : (v + 1) * D] for v in range(two_n)]
        ok = True
        for c in range(D):
            for u, v in G.matchings[c].pairs:
                if idx[u][c] != idx[v][c]:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        term = 1.0
        for v in range(two_n):
            term *= entries[idx[v]]
        total += term
    return total


def melonic_all_orders(G: ColoredGraph) -> frozenset[bool]:
    """Verdicts reachable by every possible contraction order."""
    D = G.D
    init = (
        frozenset(range(2 * G.n)),
        tuple(frozenset(m.pairs) for m in G.matchings),
    )
    memo: dict = {}

    def partner_in(mat, u):
        for x, y in mat:
            if x == u:
                return y
            if y == u:
                return x
        raise AssertionError("vertex not matched")

    def verdicts(state) -> frozenset[bool]:
        if state in memo:
            return memo[state]
        alive, mats = state
        if not alive:
            return frozenset({True})
        mult: dict = {}
        for mat in mats:
            for p in mat:
                mult[p] = mult.get(p, 0) + 1
        moves = [(p, k) for p, k in mult.items() if k in (D, D - 1)]
        if not moves:
            memo[state] = frozenset({False})
            return memo[state]
        out: set[bool] = set()
        for (u, v), k in moves:
            new_alive = alive - {u, v}
            new_mats = []
            for mat in mats:
                if (u, v) in mat:
                    new_mats.append(mat - {(u, v)})
                else:
                    a = partner_in(mat, u)
                    b = partner_in(mat, v)
                    pair = (a, b) if a < b else (b, a)
                    new_mats.append(
                        (mat - {tuple(sorted((u, a))), tuple(sorted((v, b)))})
                        | {pair}
                    )
            out |= verdicts((new_alive, tuple(new_mats)))
        memo[state] = frozenset(out)
        return memo[state]

    return verdicts(init)


def random_connected_graph(D: int, n: int, seed: int) -> ColoredGraph:
    """Rejection-sample a uniform graph conditioned on connectedness."""
    for attempt in range(10_000):
        g = random_colored_graph(D, n, seed * 131_071 + attempt)
        if g.is_connected:
            return g
    raise RuntimeError("no connected graph found")


def spec_quartic_melon() -> ColoredGraph:
    return ColoredGraph(
        [
            Matching([(0, 1), (2, 3)], 4),
            Matching([(0, 2), (1, 3)], 4),
            Matching([(0, 1), (2, 3)], 4),
        ]
    )


def six_vertex_cyclic() -> ColoredGraph:
    """Connected, non-melonic, non-planar: no vertex pair shares two colors."""
    return ColoredGraph(
        [
            Matching([(0, 1), (2, 3), (4, 5)], 6),
            Matching([(1, 2), (3, 4), (5, 0)], 6),
            Matching([(0, 2), (1, 4), (3, 5)], 6),
        ]
    )


def two_color_cycle(n: int) -> ColoredGraph:
    """The connected 2-colored graph on 2n vertices: one alternating cycle."""
    m1 = Matching([(i, i + 1) for i in range(0, 2 * n, 2)], 2 * n)
    m2 = Matching([(i, (i + 1) % (2 * n)) for i in range(1, 2 * n, 2)], 2 * n)
    return ColoredGraph([m1, m2])
