"""Cobar complex of a properad: decorated directed graphs and Eq.-style
vertex-splitting differential.

A graph is stored with explicit vertex indices; every edge carries a fresh
label with the reserved "~" prefix which also appears in the two adjacent
vertex decorations, so a vertex decoration is a properad basis element on
the corolla (legs + edge labels).  Elements of the complex are Fraction
combinations keyed by canonical representatives; the wedge ordering of the
degree-1 vertex markers is the vertex order, and reorderings fold their sign
into the coefficient.
"""

from fractions import Fraction
from itertools import permutations, product

from .graded import add_to, koszul_sign


class CapacityError(RuntimeError):
    """Vertex cap exceeded during canonicalization."""


EDGE_PREFIX = "~"


def edge_label(i):
    return "%s%02d" % (EDGE_PREFIX, i)


class DecoratedGraph:
    """Directed graph with decorated vertices, no directed circuits.

    edges: tuple of (src_vertex, dst_vertex, edge_id), oriented from an
    output of src to an input of dst.  out_legs/in_legs: tuples of
    (label, vertex).  decorations: one properad basis key per vertex, listed
    in wedge order.
    """

    __slots__ = ("decorations", "edges", "out_legs", "in_legs", "_key")

    def __init__(self, decorations, edges, out_legs, in_legs):
        self.decorations = tuple(decorations)
        self.edges = tuple(sorted(edges))
        self.out_legs = tuple(sorted(out_legs))
        self.in_legs = tuple(sorted(in_legs))
        self._key = (self.decorations_key(), self.edges, self.out_legs, self.in_legs)

    def decorations_key(self):
        out = []
        for dec in self.decorations:
            out.append(dec.key() if hasattr(dec, "key") else dec)
        return tuple(out)

    @property
    def n_vertices(self):
        return len(self.decorations)

    def __eq__(self, other):
        return isinstance(other, DecoratedGraph) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        return "DecoratedGraph(%d vertices, %d edges)" % (
            self.n_vertices, len(self.edges))


def has_directed_circuit(n_vertices, edges):
    """Standard reachability: true iff a directed cycle of edges exists."""
    adj = {v: [] for v in range(n_vertices)}
    for src, dst, _ in edges:
        adj[src].append(dst)
        if src == dst:
            return True
    state = {v: 0 for v in range(n_vertices)}  # 0 new, 1 active, 2 done
    for root in range(n_vertices):
        if state[root]:
            continue
        stack = [(root, iter(adj[root]))]
        state[root] = 1
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if state[w] == 1:
                    return True
                if state[w] == 0:
                    state[w] = 1
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                state[v] = 2
                stack.pop()
    return False


def is_connected(n_vertices, edges):
    if n_vertices <= 1:
        return True
    seen = {0}
    frontier = [0]
    adj = {v: set() for v in range(n_vertices)}
    for src, dst, _ in edges:
        adj[src].add(dst)
        adj[dst].add(src)
    while frontier:
        v = frontier.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return len(seen) == n_vertices


def graph_genus(P, graph):
    """dim H_1 + sum of vertex genera = (E - V + 1) + sum G_i."""
    if not is_connected(graph.n_vertices, graph.edges):
        raise ValueError("genus of a disconnected graph")
    total = len(graph.edges) - graph.n_vertices + 1
    for dec in graph.decorations:
        C, D = P.corolla(dec)
        chi = P.chi(dec)
        g2 = chi - len(C) - len(D) + 2
        if g2 < 0 or g2 % 2:
            raise ValueError("vertex genus is not a nonnegative integer")
        total += g2 // 2
    return total


def validate_graph(P, graph, generalized=None):
    if has_directed_circuit(graph.n_vertices, graph.edges):
        raise ValueError("graph has a directed circuit")
    if not is_connected(graph.n_vertices, graph.edges):
        raise ValueError("graph is disconnected")
    for v, dec in enumerate(graph.decorations):
        C, D = P.corolla(dec)
        expect_out = {e[2] for e in graph.edges if e[0] == v} | \
            {lab for lab, w in graph.out_legs if w == v}
        expect_in = {e[2] for e in graph.edges if e[1] == v} | \
            {lab for lab, w in graph.in_legs if w == v}
        if set(C) != expect_out or set(D) != expect_in:
            raise ValueError("decoration corolla does not match vertex %d" % v)
        if P.chi(dec) <= 0:
            raise ValueError("unstable vertex %d" % v)
    return graph


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

def _act_on_key(P, key, relabel):
    """Relabel a decoration along an edge-id bijection; must stay a basis
    element up to sign."""
    C, D = P.corolla(key)
    rho = {c: relabel.get(c, c) for c in C}
    sigma = {d: relabel.get(d, d) for d in D}
    combo = P.act(rho, sigma, key)
    if len(combo) != 1:
        raise ValueError("relabeling does not preserve the chosen basis")
    (key2, coeff), = combo.items()
    if coeff not in (1, -1):
        raise ValueError("relabeling coefficient is not a sign")
    return key2, int(coeff)


def canonicalize(P, graph, coeff=Fraction(1), vertex_cap=5):
    """Deterministic representative of the iso-class, sign folded into coeff.

    Isomorphisms permute vertices (with the wedge Koszul sign) and rename
    parallel edges; legs and directions are fixed.  Returns (graph, coeff)
    or None when the class is zero (an automorphism acts by -1).
    """
    n = graph.n_vertices
    if n > vertex_cap:
        raise CapacityError("graph has %d vertices, cap is %d" % (n, vertex_cap))
    degs = [1 + P.degree(dec) for dec in graph.decorations]
    best = None
    best_sign = None
    zero = False
    for pi in permutations(range(n)):
        wsign = koszul_sign(pi, degs)
        new_decs = [None] * n
        for v in range(n):
            new_decs[pi[v]] = graph.decorations[v]
        edges = [(pi[src], pi[dst], eid) for src, dst, eid in graph.edges]
        groups = {}
        for src, dst, eid in edges:
            groups.setdefault((src, dst), []).append(eid)
        pairs = sorted(groups)
        # canonical ids are assigned blockwise in sorted (src, dst) order;
        # parallel edges within a block are tried in every order
        base = {}
        start = 0
        for key in pairs:
            base[key] = start
            start += len(groups[key])
        for assignment in product(*[permutations(groups[key]) for key in pairs]):
            relabel = {}
            for key, perm in zip(pairs, assignment):
                for off, eid in enumerate(perm):
                    relabel[eid] = edge_label(base[key] + off)
            sign = wsign
            decs2 = []
            for dec in new_decs:
                key2, s = _act_on_key(P, dec, relabel)
                decs2.append(key2)
                sign *= s
            cand = DecoratedGraph(
                decs2,
                [(src, dst, relabel[eid]) for src, dst, eid in edges],
                [(lab, pi[v]) for lab, v in graph.out_legs],
                [(lab, pi[v]) for lab, v in graph.in_legs])
            if best is None or cand._key < best._key:
                best, best_sign = cand, sign
            elif cand._key == best._key and sign != best_sign:
                zero = True
    if zero:
        return None
    return best, coeff * best_sign


def add_canonical(P, acc, graph, coeff, vertex_cap=5):
    res = canonicalize(P, graph, coeff, vertex_cap)
    if res is not None:
        add_to(acc, res[0], res[1])
    return acc


# ---------------------------------------------------------------------------
# grafting
# ---------------------------------------------------------------------------

def graft(P, left, right, eta, vertex_cap=5):
    """Attach in-legs of `left` to out-legs of `right` as new edges.

    Returns a canonical combo {graph: Fraction}; a pairing that would create
    a directed circuit contributes zero.  Wedge orders concatenate left then
    right.
    """
    in_map = dict(left.in_legs)
    out_map = dict(right.out_legs)
    if not eta:
        raise ValueError("gluing sets must be nonempty")
    for b, a in eta.items():
        if b not in in_map or a not in out_map:
            raise ValueError("gluing legs not present: %r -> %r" % (b, a))
    nl = left.n_vertices
    # rename all edge ids consecutively: left's, right's, then the new ones
    relabel_l = {eid: edge_label(i) for i, (_, _, eid) in enumerate(left.edges)}
    off = len(left.edges)
    relabel_r = {eid: edge_label(off + i) for i, (_, _, eid) in enumerate(right.edges)}
    off += len(right.edges)
    new_ids = {}
    for i, b in enumerate(sorted(eta)):
        new_ids[b] = edge_label(off + i)
    sign = 1
    decs = []
    for dec in left.decorations:
        rel = dict(relabel_l)
        rel.update({b: new_ids[b] for b in eta})
        key2, s = _act_on_key(P, dec, rel)
        decs.append(key2)
        sign *= s
    for dec in right.decorations:
        rel = dict(relabel_r)
        rel.update({eta[b]: new_ids[b] for b in eta})
        key2, s = _act_on_key(P, dec, rel)
        decs.append(key2)
        sign *= s
    edges = [(src, dst, relabel_l[eid]) for src, dst, eid in left.edges]
    edges += [(src + nl, dst + nl, relabel_r[eid]) for src, dst, eid in right.edges]
    edges += [(out_map[eta[b]] + nl, in_map[b], new_ids[b]) for b in eta]
    if has_directed_circuit(len(decs), edges):
        return {}
    out_legs = [(lab, v) for lab, v in left.out_legs]
    out_legs += [(lab, v + nl) for lab, v in right.out_legs if lab not in set(eta.values())]
    in_legs = [(lab, v) for lab, v in left.in_legs if lab not in eta]
    in_legs += [(lab, v + nl) for lab, v in right.in_legs]
    graph = DecoratedGraph(decs, edges, out_legs, in_legs)
    res = canonicalize(P, graph, Fraction(sign), vertex_cap)
    return {res[0]: res[1]} if res else {}


# ---------------------------------------------------------------------------
# the differential
# ---------------------------------------------------------------------------

def single_vertex_graph(P, key):
    C, D = P.corolla(key)
    return DecoratedGraph([key], [], [(lab, 0) for lab in C], [(lab, 0) for lab in D])


def _subsets(items):
    items = sorted(items)
    for mask in range(1 << len(items)):
        yield frozenset(items[i] for i in range(len(items)) if mask >> i & 1)


def split_vertex_terms(P, key, max_edges=None):
    """All quadratic splittings of a single vertex, as in the one-vertex
    differential: pairs (q1, q2, ids) with q1 composed into by q2 along the
    identity pairing on fresh edge ids, each contributing the coefficient of
    `key` in the composition.

    Summing over all bijections eta with the 1/|A|! weight equals summing
    over the identity pairing with weight 1: the eta-orbit is absorbed by
    relabeling the second factor, which the graph canonicalization merges.
    """
    from math import factorial
    C, D = P.corolla(key)
    chi = P.chi(key)
    terms = []
    kmax = max_edges if max_edges is not None else chi + 1
    for k in range(1, kmax + 1):
        ids_b = [edge_label(90 + i) for i in range(k)]
        ids_a = [edge_label(80 + i) for i in range(k)]
        eta = dict(zip(ids_b, ids_a))
        back = dict(zip(ids_a, ids_b))
        # one fixed pairing eta per |A|, weighted 1/|A|!; the canonical merge
        # then stores every iso class with coefficient 1/|stabilizer|, which
        # is what makes the differential square to zero on parallel bundles
        weight = Fraction(1, factorial(k))
        for C1 in _subsets(C):
            C2 = frozenset(C) - C1
            for D1 in _subsets(D):
                D2 = frozenset(D) - D1
                for chi1, chi2 in P.split_chi_pairs(chi, k):
                    for q1 in P.basis(C1, D1 | frozenset(ids_b), chi1):
                        for q2 in P.basis(C2 | frozenset(ids_a), D2, chi2):
                            c = P.compose(q1, q2, eta).get(key)
                            if c:
                                # carry the edge ids on both endpoint corollas
                                q2b, s = _act_on_key(P, q2, back)
                                terms.append((q1, q2b, tuple(ids_b), c * s * weight))
    return terms


def cobar_differential(P, combo, vertex_cap=5, max_edges=None):
    """The cobar differential, extended to several vertices by the Leibniz
    rule; the new vertex (the second tensor factor of the splitting) is
    wedged in directly before the vertex being split."""
    out = {}
    for graph, coeff in combo.items():
        prefix = 0
        for v in range(graph.n_vertices):
            key = graph.decorations[v]
            lsign = -1 if prefix % 2 else 1
            for dkey, dc in P.differential(key).items():
                decs = list(graph.decorations)
                decs[v] = dkey
                g2 = DecoratedGraph(decs, graph.edges, graph.out_legs, graph.in_legs)
                add_canonical(P, out, g2, coeff * dc * lsign, vertex_cap)
            for q1, q2, ids, c in split_vertex_terms(P, key, max_edges):
                sgn = lsign * c * coeff
                if (P.degree(q1) % 2) and (P.degree(q2) % 2):
                    sgn = -sgn
                g2 = _splice_split(graph, v, q1, q2, ids)
                add_canonical(P, out, g2, sgn, vertex_cap)
            prefix += 1 + P.degree(key)
    return out


def _splice_split(graph, v, q1, q2, ids):
    """Replace vertex v by [q2 at v, q1 at v+1] with edges q2 -> q1."""
    def shift(w):
        return w + 1 if w > v else w

    decs = list(graph.decorations[:v]) + [q2, q1] + list(graph.decorations[v + 1:])
    edges = []
    for src, dst, eid in graph.edges:
        if src == v:
            new_src = v + 1 if _owns_out(q1, eid) else v
            edges.append((new_src, shift(dst), eid))
        elif dst == v:
            new_dst = v + 1 if _owns_in(q1, eid) else v
            edges.append((shift(src), new_dst, eid))
        else:
            edges.append((shift(src), shift(dst), eid))
    edges += [(v, v + 1, eid) for eid in ids]
    out_legs = []
    for lab, w in graph.out_legs:
        if w == v:
            out_legs.append((lab, v + 1 if _owns_out(q1, lab) else v))
        else:
            out_legs.append((lab, shift(w)))
    in_legs = []
    for lab, w in graph.in_legs:
        if w == v:
            in_legs.append((lab, v + 1 if _owns_in(q1, lab) else v))
        else:
            in_legs.append((lab, shift(w)))
    return DecoratedGraph(decs, edges, out_legs, in_legs)


_COROLLA_CACHE = {}


def _owns_out(key, lab):
    C, _ = _corolla_of(key)
    return lab in C


def _owns_in(key, lab):
    _, D = _corolla_of(key)
    return lab in D


def _corolla_of(key):
    if hasattr(key, "outputs"):
        return key.outputs, key.inputs
    # endomorphism-style tuple keys
    return frozenset(key[0]), frozenset(key[1])


def verify_d_squared(P, out_sizes, in_sizes, chi_max, vertex_cap=5,
                     max_edges=None, out_pool=None, in_pool=None):
    """Check that the differential squares to zero on every single-vertex
    generator within the bounds; stops at the first violation."""
    out_pool = out_pool or tuple("c%d" % i for i in range(1, 9))
    in_pool = in_pool or tuple("d%d" % i for i in range(1, 9))
    checked = 0
    for nc in out_sizes:
        for nd in in_sizes:
            C = frozenset(out_pool[:nc])
            D = frozenset(in_pool[:nd])
            for chi in range(1, chi_max + 1):
                for key in P.basis(C, D, chi):
                    start = {single_vertex_graph(P, key): Fraction(1)}
                    once = cobar_differential(P, start, vertex_cap, max_edges)
                    twice = cobar_differential(P, once, vertex_cap, max_edges)
                    checked += 1
                    if twice:
                        witness = next(iter(sorted(twice)))
                        return {"ok": False, "checked": checked,
                                "generator": key,
                                "witness": witness,
                                "coefficient": twice[witness]}
    return {"ok": True, "checked": checked}


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------

def to_dot(P, graph, name="cobar"):
    lines = ["digraph %s {" % name, "  rankdir=TB;"]
    for v, dec in enumerate(graph.decorations):
        C, D = P.corolla(dec)
        chi = P.chi(dec)
        g2 = chi - len(C) - len(D) + 2
        lines.append('  v%d [shape=circle, label="V%d\\nG=%d"];' % (v, v, g2 // 2))
    for src, dst, eid in graph.edges:
        lines.append('  v%d -> v%d [label="%s"];' % (src, dst, eid))
    for lab, v in graph.out_legs:
        lines.append('  out_%s [shape=none, label="%s"];' % (lab, lab))
        lines.append('  v%d -> out_%s;' % (v, lab))
    for lab, v in graph.in_legs:
        lines.append('  in_%s [shape=none, label="%s"];' % (lab, lab))
        lines.append('  in_%s -> v%d;' % (lab, v))
    lines.append("}")
    return "\n".join(lines) + "\n"
