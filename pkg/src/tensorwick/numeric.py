"""Dense evaluation of trace invariants on sampled Gaussian tensors.

This is the floating-point cross-check of the exact combinatorics: sample
i.i.d. Gaussian tensors, evaluate the invariant of a graph by contracting
one tensor copy per vertex along the colored edges, and compare Monte Carlo
moments against the exact polynomials evaluated at the same N.  Exact
results stay in integer or rational arithmetic elsewhere; the two worlds
only ever meet inside statistical tolerances.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .graphs import ColoredGraph

DEFAULT_BATCH = 1 << 14


@dataclass(frozen=True, eq=False)
class TensorData:
    """A dense real tensor with D axes of length N; no index symmetry assumed."""

    N: int
    D: int
    entries: np.ndarray


def sample_gaussian_tensor(N: int, D: int, nu, seed) -> TensorData:
    """I.i.d. centered normal entries with variance N**(-nu); seed-deterministic."""
    if N < 1 or D < 1:
        raise ValueError("need N >= 1 and D >= 1")
    sigma = float(N) ** (-float(Fraction(nu)) / 2.0)
    rng = np.random.default_rng(seed)
    return TensorData(N, D, rng.normal(0.0, sigma, size=(N,) * D))


def _edge_labels(G: ColoredGraph) -> list[tuple[int, ...]]:
    """Per vertex, the edge id occupying each of its D index slots."""
    labels = [[-1] * G.D for _ in range(2 * G.n)]
    eid = 0
    for ci, m in enumerate(G.matchings):
        for u, v in m.pairs:
            labels[u][ci] = eid
            labels[v][ci] = eid
            eid += 1
    return [tuple(l) for l in labels]


def _contract(fragments: list[tuple[np.ndarray, tuple[int, ...]]], batched: bool):
    """Greedy pairwise contraction, merging the pair with the smallest result rank.

    Fragment labels are edge ids; the batch axis, when present, is axis 0 of
    every fragment and survives the whole contraction.  Components without
    shared labels reduce to scalars that are multiplied at the end.
    """
    letters = string.ascii_letters
    frags = list(fragments)
    while True:
        best = None
        for i in range(len(frags)):
            li = frags[i][1]
            si = set(li)
            for j in range(i + 1, len(frags)):
                lj = frags[j][1]
                shared = si.intersection(lj)
                if not shared:
                    continue
                rank = len(li) + len(lj) - 2 * len(shared)
                if best is None or rank < best[0]:
                    best = (rank, i, j, shared)
        if best is None:
            break
        _, i, j, shared = best
        ai, li = frags[i]
        aj, lj = frags[j]
        out_labels = tuple(l for l in li if l not in shared) + tuple(
            l for l in lj if l not in shared
        )
        sym: dict[int, str] = {}

        def s(label: int) -> str:
            if label not in sym:
                if len(sym) + (1 if batched else 0) >= len(letters):
                    raise ValueError("graph too large for dense evaluation")
                sym[label] = letters[len(sym)]
            return sym[label]

        sub_i = "".join(s(l) for l in li)
        sub_j = "".join(s(l) for l in lj)
        sub_o = "".join(s(l) for l in out_labels)
        if batched:
            z = letters[-1] if letters[-1] not in sym.values() else None
            if z is None:
                raise ValueError("graph too large for dense evaluation")
            sub_i, sub_j, sub_o = z + sub_i, z + sub_j, z + sub_o
        merged = np.einsum(f"{sub_i},{sub_j}->{sub_o}", ai, aj)
        frags = [f for k, f in enumerate(frags) if k not in (i, j)]
        frags.append((merged, out_labels))
    if batched:
        out = None
        for a, _ in frags:
            out = a if out is None else out * a
        return out
    result = 1.0
    for a, _ in frags:
        result *= float(a)
    return result


def evaluate_trace_invariant(G: ColoredGraph, T: TensorData) -> float:
    """Contract one copy of T per vertex along G's colored edges.

    Slot c of vertex k is identified with slot c of its color-c partner;
    contraction proceeds pairwise, never materializing the full multi-index
    sum.
    """
    if T.D != G.D:
        raise ValueError(f"tensor order {T.D} does not match graph colors {G.D}")
    labels = _edge_labels(G)
    frags = [(T.entries, labels[v]) for v in range(2 * G.n)]
    return _contract(frags, batched=False)


def _trace_batch(G: ColoredGraph, batch: np.ndarray) -> np.ndarray:
    labels = _edge_labels(G)
    frags = [(batch, labels[v]) for v in range(2 * G.n)]
    return _contract(frags, batched=True)


def orthogonal_invariance_check(
    G: ColoredGraph, N: int, seed, max_retries: int = 5
) -> float:
    """Rotate every index slot by an independent orthogonal matrix and compare.

    Returns |Tr(T') - Tr(T)| / |Tr(T)| for a Gaussian T, resampling in the
    (measure-zero) event that the invariant is numerically degenerate.
    """
    rng = np.random.default_rng(seed)
    D = G.D
    for _ in range(max_retries):
        T = TensorData(N, D, rng.standard_normal((N,) * D))
        base = evaluate_trace_invariant(G, T)
        if abs(base) < 1e-30:
            continue
        rotated = T.entries
        for axis in range(D):
            q, r = np.linalg.qr(rng.standard_normal((N, N)))
            q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
            rotated = np.moveaxis(np.tensordot(q, rotated, axes=(1, axis)), 0, axis)
        turned = evaluate_trace_invariant(G, TensorData(N, D, rotated))
        return abs(turned - base) / abs(base)
    raise RuntimeError("invariant degenerate on every retry")


@dataclass(frozen=True)
class MomentEstimate:
    """Sample mean of a product of trace invariants over Gaussian tensors."""

    mean: float
    standard_error: float
    sample_count: int
    nu: Fraction
    seed: Optional[int]

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean,
            "standard_error": self.standard_error,
            "samples": self.sample_count,
            "nu": str(self.nu),
            "seed": self.seed,
        }


def mc_moment(
    graphs: Sequence[ColoredGraph],
    N: int,
    nu,
    samples: int,
    seed,
    batch_size: int = DEFAULT_BATCH,
) -> MomentEstimate:
    """Monte Carlo estimate of < product of Tr over the graphs > at dimension N.

    All graphs are evaluated on the same tensor draw per sample, so the
    estimate targets the joint moment.  Batches use independent child
    streams of the seed; results do not depend on scheduling.
    """
    if not graphs:
        raise ValueError("need at least one graph")
    D = graphs[0].D
    for i, g in enumerate(graphs, start=1):
        if g.D != D:
            raise ValueError(f"graph {i} has {g.D} colors, expected {D}")
    if samples < 2:
        raise ValueError("need at least two samples for a standard error")
    nu = Fraction(nu)
    sigma = float(N) ** (-float(nu) / 2.0)
    root = np.random.SeedSequence(seed)
    n_batches = (samples + batch_size - 1) // batch_size
    children = root.spawn(n_batches)
    total = 0.0
    total_sq = 0.0
    done = 0
    for b in range(n_batches):
        size = min(batch_size, samples - done)
        rng = np.random.default_rng(children[b])
        draw = rng.normal(0.0, sigma, size=(size,) + (N,) * D)
        vals = np.ones(size)
        for g in graphs:
            vals = vals * _trace_batch(g, draw)
        total += float(vals.sum())
        total_sq += float(vals @ vals)
        done += size
    mean = total / samples
    var = max(total_sq - samples * mean * mean, 0.0) / (samples - 1)
    return MomentEstimate(mean, math.sqrt(var / samples), samples, nu, seed)
