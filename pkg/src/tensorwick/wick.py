"""Exact Gaussian expectations of trace invariants via pairing enumeration.

The Gaussian expectation of the invariant of a D-colored graph is a sum
over all perfect pairings M0 of its 2n vertices of N**F(M0), where F is the
total face count of M0 against the D colors, divided by N**(nu*n).  The
connected part (classical cumulant) restricts the sum to pairings that join
all graph components into one piece.  Everything here is exact integer or
rational arithmetic; N never becomes a float.

The enumeration engine walks pairings in canonical order (smallest free
vertex first, partners ascending), keeping per-color alternating-path
endpoints as flat partner arrays so each extension costs O(D).  The
branch-and-bound maximizer prunes with the admissible bound
closed + D * remaining_pairs and therefore never misses ties, which lets it
count every optimal pairing and report the lexicographically least witness.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Optional, Sequence

from .faces import scaling_defect
from .graphs import ColoredGraph, Matching, count_matchings, disjoint_union

DEFAULT_HISTOGRAM_CAP = 10  # refuse exhaustive sums past |M_10| = 654,729,075
DEFAULT_NODE_BUDGET = 20_000_000


class BudgetExceeded(RuntimeError):
    """An exact computation was refused or truncated because of its size."""


# ---------------------------------------------------------------------------
# enumeration engine


def _histogram_scan(
    partners: Sequence[Sequence[int]],
    comp_ids: Sequence[int],
    q: int,
    connected_only: bool,
) -> dict[int, int]:
    """Face-count histogram over all perfect pairings, one DFS with undo."""
    D = len(partners)
    two_n = len(partners[0])
    track = connected_only and q > 1
    bnd = [list(p) for p in partners]
    S = two_n  # sentinel of the doubly linked free list
    nxt = list(range(1, two_n + 1)) + [0]
    prv = [S] + list(range(two_n - 1)) + [two_n - 1]
    par = list(range(q))
    sz = [1] * q
    counts: dict[int, int] = {}

    def rec(remaining: int, closed: int, live: int) -> None:
        if remaining == 0:
            if not track or live == 1:
                counts[closed] = counts.get(closed, 0) + 1
            return
        u = nxt[S]
        u_next = nxt[u]
        nxt[S] = u_next
        prv[u_next] = S
        v = u_next
        while v != S:
            pv_, nv_ = prv[v], nxt[v]
            nxt[pv_] = nv_
            prv[nv_] = pv_
            dclosed = 0
            saves = []
            for bc in bnd:
                a, b = bc[u], bc[v]
                if a == v:
                    dclosed += 1
                else:
                    bc[a] = b
                    bc[b] = a
                    saves.append((bc, a, b))
            merged = -1
            lv = live
            if track and lv > 1:
                ru = comp_ids[u]
                while par[ru] != ru:
                    ru = par[ru]
                rv = comp_ids[v]
                while par[rv] != rv:
                    rv = par[rv]
                if ru != rv:
                    if sz[ru] < sz[rv]:
                        ru, rv = rv, ru
                    par[rv] = ru
                    sz[ru] += sz[rv]
                    merged = rv
                    lv -= 1
            rec(remaining - 1, closed + dclosed, lv)
            if merged >= 0:
                rp = par[merged]
                sz[rp] -= sz[merged]
                par[merged] = merged
            for bc, a, b in saves:
                bc[a] = u
                bc[b] = v
            nxt[pv_] = v
            prv[nv_] = v
            v = nv_
        nxt[S] = u
        prv[u_next] = u

    rec(two_n // 2, 0, q)
    return counts


def _maximize_scan(
    partners: Sequence[Sequence[int]],
    comp_ids: Sequence[int],
    q: int,
    connected_only: bool,
    node_budget: int,
    first_pair: Optional[tuple[int, int]] = None,
) -> tuple[int, int, Optional[list[tuple[int, int]]], bool]:
    """Branch-and-bound maximum of the face count over perfect pairings.

    Returns (best, optimal_count, witness_pairs, exact).  Ties with the
    incumbent are never pruned, so optimal_count is the full number of
    maximizing pairings and the witness is the lexicographically least one
    (the DFS emits pairings in lexicographic order).  When the node budget
    runs out the best found so far is returned with exact=False.
    """
    D = len(partners)
    two_n = len(partners[0])
    track = connected_only and q > 1
    bnd = [list(p) for p in partners]
    S = two_n
    nxt = list(range(1, two_n + 1)) + [0]
    prv = [S] + list(range(two_n - 1)) + [two_n - 1]
    par = list(range(q))
    sz = [1] * q
    state = {"best": -1, "count": 0, "witness": None, "nodes": 0, "exact": True}
    stack: list[tuple[int, int]] = []

    def union(u: int, v: int) -> int:
        ru = comp_ids[u]
        while par[ru] != ru:
            ru = par[ru]
        rv = comp_ids[v]
        while par[rv] != rv:
            rv = par[rv]
        if ru == rv:
            return -1
        if sz[ru] < sz[rv]:
            ru, rv = rv, ru
        par[rv] = ru
        sz[ru] += sz[rv]
        return rv

    def rec(remaining: int, closed: int, live: int) -> None:
        state["nodes"] += 1
        if state["nodes"] > node_budget:
            state["exact"] = False
            return
        if closed + D * remaining < state["best"]:
            return
        if remaining == 0:
            if track and live != 1:
                return
            if closed > state["best"]:
                state["best"] = closed
                state["count"] = 1
                state["witness"] = stack.copy()
            elif closed == state["best"]:
                state["count"] += 1
                if state["witness"] is None:
                    state["witness"] = stack.copy()
            return
        u = nxt[S]
        u_next = nxt[u]
        nxt[S] = u_next
        prv[u_next] = S
        v = u_next
        while v != S:
            pv_, nv_ = prv[v], nxt[v]
            nxt[pv_] = nv_
            prv[nv_] = pv_
            dclosed = 0
            saves = []
            for bc in bnd:
                a, b = bc[u], bc[v]
                if a == v:
                    dclosed += 1
                else:
                    bc[a] = b
                    bc[b] = a
                    saves.append((bc, a, b))
            merged = -1
            lv = live
            if track and lv > 1:
                merged = union(u, v)
                if merged >= 0:
                    lv -= 1
            stack.append((u, v))
            rec(remaining - 1, closed + dclosed, lv)
            stack.pop()
            if merged >= 0:
                rp = par[merged]
                sz[rp] -= sz[merged]
                par[merged] = merged
            for bc, a, b in saves:
                bc[a] = u
                bc[b] = v
            nxt[pv_] = v
            prv[nv_] = v
            v = nv_
        nxt[S] = u
        prv[u_next] = u

    remaining = two_n // 2
    closed0 = 0
    live0 = q
    if first_pair is not None:
        u, v = first_pair
        for w in (u, v):
            nxt[prv[w]] = nxt[w]
            prv[nxt[w]] = prv[w]
        for bc in bnd:
            a, b = bc[u], bc[v]
            if a == v:
                closed0 += 1
            else:
                bc[a] = b
                bc[b] = a
        if track:
            if union(u, v) >= 0:
                live0 -= 1
        stack.append((u, v))
        remaining -= 1
    rec(remaining, closed0, live0)
    return state["best"], state["count"], state["witness"], state["exact"]


def _max_scaling_worker(args):
    partners, comp_ids, q, connected_only, node_budget, first_pair = args
    return _maximize_scan(
        partners, comp_ids, q, connected_only, node_budget, first_pair
    )


# ---------------------------------------------------------------------------
# histograms and polynomials


@dataclass(frozen=True)
class FaceHistogram:
    """How many pairings attain each total face count F.

    With connected_only the count only includes pairings joining all graph
    components, so the totals sum to at most the number of pairings.
    """

    counts: dict[int, int]
    connected_only: bool
    n: int
    D: int

    @property
    def total_pairings(self) -> int:
        return sum(self.counts.values())

    @property
    def max_faces(self) -> int:
        return max(self.counts)

    def to_json_dict(self) -> dict:
        return {
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "connected_only": self.connected_only,
            "n": self.n,
            "D": self.D,
        }


def enumerate_histogram(
    G: ColoredGraph,
    connected_only: bool = False,
    budget: int = DEFAULT_HISTOGRAM_CAP,
) -> FaceHistogram:
    """Exact face-count histogram by exhaustive enumeration over pairings."""
    if G.n > budget:
        raise BudgetExceeded(
            f"exhaustive enumeration over {count_matchings(G.n)} pairings "
            f"(n={G.n}) exceeds the configured budget n <= {budget}"
        )
    comp_ids, q = G.component_ids()
    counts = _histogram_scan(G.partner_arrays(), comp_ids, q, connected_only)
    return FaceHistogram(counts, connected_only, G.n, G.D)


class ExpectationPoly:
    """Integer-coefficient Laurent polynomial in N with exact exponents.

    Terms map exponents F - nu*n (stored as Fractions) to integer
    coefficients.  Addition requires matching nu and n; multiplication adds
    the n's, which mirrors taking products of invariants on disjoint graphs.
    """

    __slots__ = ("nu", "n", "terms")

    def __init__(self, nu, n: int, terms: dict):
        object.__setattr__(self, "nu", Fraction(nu))
        object.__setattr__(self, "n", int(n))
        clean = {}
        for e, c in terms.items():
            c = int(c)
            if c:
                clean[Fraction(e)] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("ExpectationPoly is immutable")

    @classmethod
    def from_histogram(cls, hist: FaceHistogram, nu) -> "ExpectationPoly":
        nu = Fraction(nu)
        shift = nu * hist.n
        return cls(nu, hist.n, {Fraction(F) - shift: c for F, c in hist.counts.items()})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def leading_exponent(self) -> Fraction:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms)

    def leading_coefficient(self) -> int:
        return self.terms[self.leading_exponent()]

    def evaluate(self, x):
        """Exact Fraction for rational x and integral exponents, else float."""
        if isinstance(x, (int, Fraction)) and all(
            e.denominator == 1 for e in self.terms
        ):
            x = Fraction(x)
            return sum(
                (c * x ** int(e) for e, c in self.terms.items()), Fraction(0)
            )
        return sum(c * float(x) ** float(e) for e, c in self.terms.items())

    def _compatible(self, other: "ExpectationPoly"):
        if self.nu != other.nu:
            raise ValueError("cannot combine polynomials with different nu")

    def __add__(self, other):
        if not isinstance(other, ExpectationPoly):
            return NotImplemented
        self._compatible(other)
        if self.n != other.n:
            raise ValueError("cannot add polynomials of different half-order")
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return ExpectationPoly(self.nu, self.n, terms)

    def __sub__(self, other):
        if not isinstance(other, ExpectationPoly):
            return NotImplemented
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, int):
            return ExpectationPoly(
                self.nu, self.n, {e: other * c for e, c in self.terms.items()}
            )
        if not isinstance(other, ExpectationPoly):
            return NotImplemented
        self._compatible(other)
        terms: dict[Fraction, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                terms[e] = terms.get(e, 0) + c1 * c2
        return ExpectationPoly(self.nu, self.n + other.n, terms)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExpectationPoly)
            and self.nu == other.nu
            and self.n == other.n
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nu, self.n, tuple(sorted(self.terms.items()))))

    def to_triples(self) -> list[list[int]]:
        """[[exponent_numerator, exponent_denominator, coefficient], ...], leading first."""
        return [
            [e.numerator, e.denominator, self.terms[e]]
            for e in sorted(self.terms, reverse=True)
        ]

    def __repr__(self) -> str:
        if not self.terms:
            return "ExpectationPoly(0)"
        bits = [
            f"{c}*N^{e}" for e, c in sorted(self.terms.items(), reverse=True)
        ]
        return "ExpectationPoly(" + " + ".join(bits) + ")"


def _default_nu(G: ColoredGraph, nu) -> Fraction:
    return Fraction(G.D - 1) if nu is None else Fraction(nu)


def expectation_poly(
    G: ColoredGraph, nu=None, budget: int = DEFAULT_HISTOGRAM_CAP
) -> ExpectationPoly:
    """Exact Gaussian expectation of the invariant of G as a polynomial in N."""
    hist = enumerate_histogram(G, connected_only=False, budget=budget)
    return ExpectationPoly.from_histogram(hist, _default_nu(G, nu))


def cumulant_poly(
    G: ColoredGraph, nu=None, budget: int = DEFAULT_HISTOGRAM_CAP
) -> ExpectationPoly:
    """Connected part of the expectation: only component-joining pairings count."""
    hist = enumerate_histogram(G, connected_only=True, budget=budget)
    return ExpectationPoly.from_histogram(hist, _default_nu(G, nu))


# ---------------------------------------------------------------------------
# scaling maximization


@dataclass(frozen=True)
class ScalingReport:
    """Maximum face count over pairings, with multiplicity and witness.

    omega_min translates F_max into the defect from the scaling bound when
    a formula applies (always for connected graphs; for disconnected ones
    only under the connected-pairing restriction).  exact=False marks a
    truncated search whose F_max is merely a lower bound.
    """

    F_max: int
    num_optimal: int
    witness: Matching
    omega_min: Optional[int]
    connected_only: bool
    exact: bool

    def to_json_dict(self) -> dict:
        return {
            "F_max": self.F_max,
            "num_optimal": self.num_optimal,
            "witness": [list(p) for p in self.witness.pairs],
            "omega_min": self.omega_min,
            "connected_only": self.connected_only,
            "exact": self.exact,
        }


def max_scaling(
    G: ColoredGraph,
    connected_only: bool = False,
    threads: int = 1,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> ScalingReport:
    """Exact maximum of the face count over perfect pairings of G's vertices.

    Works past the histogram budget thanks to pruning; practical up to
    roughly 20 vertices.  With threads > 1 the search splits over the
    possible partners of vertex 0 and merges deterministically, so parallel
    and sequential runs produce identical reports.
    """
    partners = G.partner_arrays()
    comp_ids, q = G.component_ids()
    two_n = 2 * G.n
    if threads <= 1 or two_n < 4:
        best, count, witness, exact = _maximize_scan(
            partners, comp_ids, q, connected_only, node_budget
        )
    else:
        jobs = [
            (
                [list(p) for p in partners],
                list(comp_ids),
                q,
                connected_only,
                node_budget,
                (0, v),
            )
            for v in range(1, two_n)
        ]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_max_scaling_worker, jobs))
        best, count, witness, exact = -1, 0, None, True
        for b, c, w, e in results:
            exact = exact and e
            if b > best:
                best, count, witness = b, c, w
            elif b == best:
                count += c
                if witness is None:
                    witness = w
    if witness is None:
        raise BudgetExceeded(
            f"node budget {node_budget} exhausted before any pairing completed"
        )
    g_conn = connected_only or q == 1
    omega = scaling_defect(G, best, g_conn) if g_conn else None
    return ScalingReport(
        best, count, Matching(witness, two_n), omega, connected_only, exact
    )


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class LemmaReport:
    """Whether the maximal face count clears D*n/2, the factorization threshold."""

    holds: bool
    F_max: int
    bound: Fraction

    def to_json_dict(self) -> dict:
        return {"holds": self.holds, "F_max": self.F_max, "bound": str(self.bound)}


def lemma_condition(
    G: ColoredGraph, node_budget: int = DEFAULT_NODE_BUDGET
) -> LemmaReport:
    """Check max F > D*n/2 for a connected graph.

    Large-N factorization of multi-trace expectations is equivalent to this
    bound holding for every connected graph, so a single violator is a
    counterexample to factorization in general.
    """
    if not G.is_connected:
        raise ValueError("the threshold condition is stated for connected graphs")
    rep = max_scaling(G, node_budget=node_budget)
    if not rep.exact:
        raise BudgetExceeded("scaling search truncated; verdict would be unsound")
    bound = Fraction(G.D * G.n, 2)
    return LemmaReport(rep.F_max > bound, rep.F_max, bound)


@dataclass(frozen=True)
class SubadditivityReport:
    """Connected-pairing scaling of a union versus the sum of part scalings."""

    lhs: int
    rhs: int
    strict_subadditive: bool
    self_pairing_bound: Optional[int]
    union_report: ScalingReport
    part_reports: tuple[ScalingReport, ...]

    def to_json_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "strict_subadditive": self.strict_subadditive,
            "self_pairing_bound": self.self_pairing_bound,
            "union": self.union_report.to_json_dict(),
            "parts": [r.to_json_dict() for r in self.part_reports],
        }


def subadditivity_check(
    graphs: Sequence[ColoredGraph], node_budget: int = DEFAULT_NODE_BUDGET
) -> SubadditivityReport:
    """Compare the connected scaling of a disjoint union against its parts.

    lhs is the maximal face count over pairings that join the union into one
    piece; rhs sums the unrestricted maxima of the parts.  Strict
    subadditivity (lhs < rhs) is what large-N factorization needs.  For a
    pair (G, G) the vertex-to-copy pairing forces lhs >= D*n, which is
    reported as self_pairing_bound.
    """
    if len(graphs) < 2:
        raise ValueError("need at least two graphs")
    D = graphs[0].D
    for i, g in enumerate(graphs, start=1):
        if g.D != D:
            raise ValueError(f"graph {i} has {g.D} colors, expected {D}")
        if not g.is_connected:
            raise ValueError(f"graph {i} is not connected")
    union = reduce(disjoint_union, graphs)
    union_rep = max_scaling(union, connected_only=True, node_budget=node_budget)
    part_reps = tuple(max_scaling(g, node_budget=node_budget) for g in graphs)
    if not union_rep.exact or not all(r.exact for r in part_reps):
        raise BudgetExceeded("scaling search truncated; verdict would be unsound")
    lhs = union_rep.F_max
    rhs = sum(r.F_max for r in part_reps)
    self_bound = None
    if len(graphs) == 2 and graphs[0] == graphs[1]:
        self_bound = D * graphs[0].n
    return SubadditivityReport(
        lhs, rhs, lhs < rhs, self_bound, union_rep, part_reps
    )


@dataclass(frozen=True)
class FactorizationReport:
    """Leading-exponent comparison: connected square versus squared expectation.

    factorizes is True when the connected part of <Tr^2> is strictly smaller
    in scaling than <Tr>^2.  The leading exponents are F_max - nu*n shifts of
    the corresponding polynomials; only maxima are needed, so the search
    engine is used instead of full histograms.
    """

    factorizes: bool
    cumulant_leading: Fraction
    product_leading: Fraction
    pair_connected_F_max: int
    single_F_max: int
    nu: Fraction

    def to_json_dict(self) -> dict:
        return {
            "factorizes": self.factorizes,
            "cumulant_leading": str(self.cumulant_leading),
            "product_leading": str(self.product_leading),
            "pair_connected_F_max": self.pair_connected_F_max,
            "single_F_max": self.single_F_max,
            "nu": str(self.nu),
        }


def factorization_verdict(
    G: ColoredGraph, nu=None, node_budget: int = DEFAULT_NODE_BUDGET
) -> FactorizationReport:
    """Does <Tr^2> factorize into <Tr><Tr> at leading order in N?"""
    if not G.is_connected:
        raise ValueError("factorization verdicts are stated for connected graphs")
    nu = _default_nu(G, nu)
    single = max_scaling(G, node_budget=node_budget)
    pair = max_scaling(
        disjoint_union(G, G), connected_only=True, node_budget=node_budget
    )
    if not (single.exact and pair.exact):
        raise BudgetExceeded("scaling search truncated; verdict would be unsound")
    cum_lead = Fraction(pair.F_max) - nu * (2 * G.n)
    prod_lead = 2 * (Fraction(single.F_max) - nu * G.n)
    return FactorizationReport(
        cum_lead < prod_lead, cum_lead, prod_lead, pair.F_max, single.F_max, nu
    )
