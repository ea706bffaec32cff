"""The set Emb(G) of embeddings into G up to domain isomorphism.

Elements are encoded in a normal form: either a host edge, or a region
(S, Z) where S is the nonempty vertex image and Z the set of internal edges
of S that stay uncut (an internal edge outside Z is clutched: the domain
carries two dangling half-edges over it).  The encoding is validated against
a brute-force enumeration of embeddings elsewhere in the test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import fail
from .etale import EtaleMap, enumerate_etale
from .graphs import DGraph, UGraph, is_connected


@dataclass(frozen=True)
class EmbEdge:
    host: object
    edge: object

    @property
    def vertex_set(self):
        return frozenset()

    def sort_key(self):
        return (0, (), (str(self.edge),), ())

    def __repr__(self):
        return f"[edge {self.edge}]"


@dataclass(frozen=True)
class EmbRegion:
    host: object
    vertices: frozenset
    glued: frozenset  # internal edges kept intact

    @property
    def vertex_set(self):
        return self.vertices

    def sort_key(self):
        return (
            1,
            (len(self.vertices),),
            tuple(sorted(map(str, self.vertices))),
            tuple(sorted(map(str, self.glued))),
        )

    def __repr__(self):
        vs = " ".join(sorted(map(str, self.vertices)))
        zs = " ".join(sorted(map(str, self.glued)))
        return f"[vertices {vs}; uncut {zs}]" if zs else f"[vertices {vs}]"


def host_edges(g):
    return g.edges() if isinstance(g, UGraph) else g.edges


def edge_ends(g, e):
    """Vertices attached to the two ends of e (None for boundary ends)."""
    if isinstance(g, UGraph):
        a, b = e
        return (g.t.get(a), g.t.get(b))
    return (g.inputs.get(e), g.outputs.get(e))


def internal_edges_of(g, vertex_set):
    """Edges with both ends attached inside vertex_set."""
    out = set()
    for e in host_edges(g):
        x, y = edge_ends(g, e)
        if x is not None and y is not None and x in vertex_set and y in vertex_set:
            out.add(e)
    return frozenset(out)


def incident_edges(g, vertex_set):
    out = set()
    for e in host_edges(g):
        x, y = edge_ends(g, e)
        if (x in vertex_set) or (y in vertex_set):
            out.add(e)
    return frozenset(out)


def region_connected(g, vertices, glued):
    verts = sorted(vertices)
    if len(verts) <= 1:
        return True
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in glued:
        x, y = edge_ends(g, e)
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry
    return len({find(v) for v in verts}) == 1


def region(g, vertices, glued):
    vertices = frozenset(vertices)
    glued = frozenset(glued)
    if not vertices:
        fail("EmptySubgraph", "a region needs at least one vertex")
    if not glued <= internal_edges_of(g, vertices):
        fail("UnknownEdge", "glued edges must be internal to the region")
    if not region_connected(g, vertices, glued):
        fail("NotClosed", "region does not realize a connected graph")
    return EmbRegion(g, vertices, glued)


def edge_element(g, e):
    if e not in set(host_edges(g)):
        fail("UnknownEdge", f"{e!r}")
    return EmbEdge(g, e)


def vertex_element(g, v):
    return region(g, [v], [])


def id_element(g):
    if g.vertices:
        return EmbRegion(g, frozenset(g.vertices), internal_edges_of(g, set(g.vertices)))
    (e,) = host_edges(g)
    return EmbEdge(g, e)


def enumerate_emb_pieces(g):
    """Edge and connected-region classes without the host connectivity
    check; the CLI uses this to report on disconnected inputs."""
    return _enumerate_pieces(g)


@lru_cache(maxsize=None)
def enumerate_emb(g):
    """All of Emb(G) in the deterministic (kind, |S|, S, Z) order."""
    if not is_connected(g):
        fail("NotConnected", "Emb is defined for connected hosts")
    return _enumerate_pieces(g)


@lru_cache(maxsize=None)
def _enumerate_pieces(g):
    out = [EmbEdge(g, e) for e in sorted(host_edges(g))]
    verts = sorted(g.vertices)
    for k in range(1, len(verts) + 1):
        for s in itertools.combinations(verts, k):
            sset = frozenset(s)
            internal = internal_edges_of(g, sset)
            for z in _subsets(internal):
                if region_connected(g, sset, z):
                    out.append(EmbRegion(g, sset, frozenset(z)))
    out.sort(key=lambda x: x.sort_key())
    return tuple(out)


def _subsets(items):
    items = sorted(items)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def check_host(x, y):
    if x.host != y.host:
        fail("HostMismatch", f"{x!r} vs {y!r}")


# ---------------------------------------------------------------------------
# realization


def realize(x):
    """Canonical representative embedding of the class x.

    Returns (abstract graph H, EtaleMap H -> host).  Cut internal edges give
    two dangling pieces whose arcs map non-injectively onto the host edge.
    """
    g = x.host
    if isinstance(g, UGraph):
        return _realize_u(x)
    return _realize_d(x)


def _realize_u(x):
    g = x.host
    if isinstance(x, EmbEdge):
        a, b = x.edge
        h = UGraph(f"{g.name}|{a}", {a: b, b: a}, {}, [])
        return h, EtaleMap(h, g, {a: a, b: b}, {})
    dagger, t, comp = {}, {}, {}
    for a, v in g.t.items():
        if v not in x.vertices:
            continue
        e = g.edge_key(a)
        partner = g.dagger[a]
        if e in x.glued:
            dagger[a] = partner
            t[a] = v
            comp[a] = a
        else:
            tip = f"{a}~"
            dagger[a], dagger[tip] = tip, a
            t[a] = v
            comp[a] = a
            comp[tip] = partner
    h = UGraph(f"{g.name}|{len(x.vertices)}v", dagger, t, sorted(x.vertices))
    return h, EtaleMap(h, g, comp, {v: v for v in x.vertices})


def _realize_d(x):
    g = x.host
    if isinstance(x, EmbEdge):
        e = x.edge
        h = DGraph(f"{g.name}|{e}", [e], {}, {}, [])
        return h, EtaleMap(h, g, {e: e}, {})
    edges, inputs, outputs, comp = [], {}, {}, {}
    for e in sorted(incident_edges(g, x.vertices)):
        tail, head = g.outputs.get(e), g.inputs.get(e)  # flows tail -> head
        head_in = head in x.vertices if head is not None else False
        tail_in = tail in x.vertices if tail is not None else False
        if e in x.glued:
            edges.append(e)
            inputs[e] = head
            outputs[e] = tail
            comp[e] = e
        else:
            if head_in:
                name = f"{e}>in"
                edges.append(name)
                inputs[name] = head
                comp[name] = e
            if tail_in:
                name = f"{e}>out"
                edges.append(name)
                outputs[name] = tail
                comp[name] = e
    h = DGraph(f"{g.name}|{len(x.vertices)}v", edges, inputs, outputs, sorted(x.vertices))
    return h, EtaleMap(h, g, comp, {v: v for v in x.vertices})


# ---------------------------------------------------------------------------
# order, unions, disjointness


def leq(x, y) -> bool:
    """x <= y iff realize(x) factors through realize(y)."""
    check_host(x, y)
    if isinstance(x, EmbEdge):
        if isinstance(y, EmbEdge):
            return x.edge == y.edge
        if x.edge in y.glued:
            return True
        a, b = edge_ends(y.host, x.edge)
        return (a in y.vertices) or (b in y.vertices)
    if isinstance(y, EmbEdge):
        return False
    return x.vertices <= y.vertices and x.glued <= y.glued


def vertex_disjoint(x, y) -> bool:
    check_host(x, y)
    return not (x.vertex_set & y.vertex_set)


def unions(x, y):
    """All unions of x and y: common upper bounds whose vertex set is the
    union of the two vertex sets.  May be empty or contain several elements."""
    check_host(x, y)
    g = x.host
    s = x.vertex_set | y.vertex_set
    if not s:
        return (x,) if x.edge == y.edge else ()
    base = set()
    for z in (x, y):
        if isinstance(z, EmbRegion):
            base |= z.glued
    internal = internal_edges_of(g, s)
    out = []
    extra = sorted(internal - base)
    for addition in _subsets(extra):
        glued = frozenset(base | set(addition))
        if not region_connected(g, s, glued):
            continue
        cand = EmbRegion(g, s, glued)
        if leq(x, cand) and leq(y, cand):
            out.append(cand)
    out.sort(key=lambda z: z.sort_key())
    return tuple(out)


# ---------------------------------------------------------------------------
# boundary


def boundary(x):
    """Boundary multiset of the class, as a sorted tuple of host arcs."""
    g = x.host
    if not isinstance(g, UGraph):
        fail("HostMismatch", "boundary is the undirected notion; use in_out")
    if isinstance(x, EmbEdge):
        return tuple(sorted(x.edge))
    out = []
    for a, v in g.t.items():
        if v in x.vertices and g.edge_key(a) not in x.glued:
            out.append(g.dagger[a])
    return tuple(sorted(out))


def in_out(x):
    """(inputs, outputs) of the class for a directed host, as sorted tuples."""
    g = x.host
    if not isinstance(g, DGraph):
        fail("HostMismatch", "in_out needs a directed host")
    if isinstance(x, EmbEdge):
        return (x.edge,), (x.edge,)
    ins = [
        e
        for e, v in g.inputs.items()
        if v in x.vertices and e not in x.glued
    ]
    outs = [
        e
        for e, v in g.outputs.items()
        if v in x.vertices and e not in x.glued
    ]
    return tuple(sorted(ins)), tuple(sorted(outs))


def boundary_profile(x):
    """Flavor-independent boundary data used for boundary-compatibility."""
    if isinstance(x.host, UGraph):
        return boundary(x)
    return in_out(x)


def boundary_via_realize(x):
    """Independent boundary computation through the realization."""
    h, m = realize(x)
    if isinstance(h, UGraph):
        return tuple(sorted(m.component[a] for a in h.boundary))
    ins = tuple(sorted(m.component[e] for e in h.graph_inputs))
    outs = tuple(sorted(m.component[e] for e in h.graph_outputs))
    return ins, outs


# ---------------------------------------------------------------------------
# pushforward along an embedding (composition at the level of classes)


def class_of_embedding(m: EtaleMap):
    """The Emb element of an embedding, recovered from its image data."""
    g = m.target
    h = m.source
    if not h.vertices:
        if isinstance(h, UGraph):
            (e,) = h.edges()
            return EmbEdge(g, g.edge_key(m.component[e[0]]))
        (e,) = h.edges
        return EmbEdge(g, m.component[e])
    vset = frozenset(m.vertex_map.values())
    if isinstance(h, UGraph):
        covered = {}
        for e in h.edges():
            img = g.edge_key(m.component[e[0]])
            covered[img] = covered.get(img, 0) + 1
        glued = {
            e
            for e in internal_edges_of(g, vset)
            if covered.get(e, 0) == 1 and _edge_intact(h, g, m, e)
        }
    else:
        covered = {}
        for e in h.edges:
            covered[m.component[e]] = covered.get(m.component[e], 0) + 1
        glued = {
            e
            for e in internal_edges_of(g, vset)
            if covered.get(e, 0) == 1 and _edge_intact(h, g, m, e)
        }
    return EmbRegion(g, vset, frozenset(glued))


def _edge_intact(h, g, m, e):
    """True when the single preimage edge of e has both of its ends attached."""
    if isinstance(h, UGraph):
        for he in h.edges():
            if g.edge_key(m.component[he[0]]) == e:
                return all(a in h.t for a in he)
    else:
        for he in h.edges:
            if m.component[he] == e:
                return he in h.inputs and he in h.outputs
    return False


def pushforward(m: EtaleMap, x):
    """Image of x in Emb(target) along the embedding m with source = x.host."""
    if x.host != m.source:
        fail("HostMismatch", "pushforward needs x on the embedding's source")
    g = m.target
    h = m.source
    if isinstance(x, EmbEdge):
        if isinstance(h, UGraph):
            return EmbEdge(g, g.edge_key(m.component[x.edge[0]]))
        return EmbEdge(g, m.component[x.edge])
    vset = frozenset(m.vertex_map[v] for v in x.vertices)
    if isinstance(h, UGraph):
        glued = frozenset(g.edge_key(m.component[e[0]]) for e in x.glued)
    else:
        glued = frozenset(m.component[e] for e in x.glued)
    return EmbRegion(g, vset, glued)


# ---------------------------------------------------------------------------
# structured subgraphs of acyclic directed graphs


def is_structured(x) -> bool:
    """Unique lifting of directed paths whose end edges land in the class.

    Length-zero paths force injectivity over edges (no cut internal edges);
    longer paths force closure under directed paths between region edges.
    """
    g = x.host
    if not isinstance(g, DGraph):
        fail("NotAcyclic", "structured subgraphs live in directed graphs")
    from .graphs import shape

    s = shape(g)
    if not s.is_acyclic:
        fail("NotAcyclic", f"{g.name} is not acyclic")
    if isinstance(x, EmbEdge):
        return True
    if x.glued != internal_edges_of(g, x.vertices):
        return False
    edges = incident_edges(g, x.vertices)
    forward = _reach(g, edges, x.vertices, direction="fwd")
    backward = _reach(g, edges, x.vertices, direction="bwd")
    return not (forward & backward)


def _reach(g, region_edges, region_vertices, direction):
    """Vertices outside the region reachable by a directed path leaving
    (direction fwd) or entering (bwd) the region's edges."""
    seen = set()
    frontier = []
    for e in region_edges:
        v = g.inputs.get(e) if direction == "fwd" else g.outputs.get(e)
        if v is not None and v not in region_vertices:
            frontier.append(v)
    while frontier:
        v = frontier.pop()
        if v in seen:
            continue
        seen.add(v)
        nxt = g.out_of(v) if direction == "fwd" else g.in_of(v)
        for e in nxt:
            w = g.inputs.get(e) if direction == "fwd" else g.outputs.get(e)
            if w is not None and w not in region_vertices and w not in seen:
                frontier.append(w)
    return seen


def enumerate_ssb(g):
    return tuple(x for x in enumerate_emb(g) if is_structured(x))


# ---------------------------------------------------------------------------
# subtree intersection (tree hosts)


def intersect_subtrees(x, y):
    """Intersection of two subtree classes in a tree host; None if disjoint."""
    check_host(x, y)
    g = x.host
    ex = _covered_edges(x)
    ey = _covered_edges(y)
    common_v = x.vertex_set & y.vertex_set
    common_e = ex & ey
    if common_v:
        return EmbRegion(g, frozenset(common_v), internal_edges_of(g, common_v))
    if len(common_e) == 1:
        (e,) = common_e
        return EmbEdge(g, e)
    if not common_e:
        return None
    fail("NotTrees", "multiple common edges without common vertices")


def _covered_edges(x):
    if isinstance(x, EmbEdge):
        return frozenset({x.edge})
    return incident_edges(x.host, x.vertex_set)


def overlap(x, y) -> bool:
    check_host(x, y)
    return bool(_covered_edges(x) & _covered_edges(y)) or bool(
        x.vertex_set & y.vertex_set
    )


# ---------------------------------------------------------------------------
# brute-force oracle: embeddings modulo domain isomorphism


def oracle_embedding_classes(g):
    """Enumerate embeddings into g modulo domain iso, from first principles:
    generate candidate domains from degree profiles, enumerate etale maps,
    keep the vertex-injective ones, and quotient by triangle isomorphism."""
    from .graphs import make_edge, make_edge_dir

    classes = []

    def add(m):
        for rep in classes:
            if _equivalent_over(rep, m):
                return
        classes.append(m)

    lone = make_edge() if isinstance(g, UGraph) else make_edge_dir()
    for m in enumerate_etale(lone, g):
        add(m)
    for h in _candidate_domains(g):
        for m in enumerate_etale(h, g):
            if m.vertex_injective and is_connected(m.source):
                add(m)
    return classes


def _equivalent_over(m1, m2):
    """Does a domain iso sigma with m2 . sigma = m1 exist?"""
    if m1.target != m2.target:
        return False
    h1, h2 = m1.source, m2.source
    if isinstance(h1, UGraph) != isinstance(h2, UGraph):
        return False
    if len(h1.vertices) != len(h2.vertices):
        return False
    if isinstance(h1, UGraph):
        if len(h1.arcs) != len(h2.arcs):
            return False
    elif len(h1.edges) != len(h2.edges):
        return False
    for sigma in enumerate_etale(h1, h2):
        if not sigma.vertex_injective or len(set(sigma.component.values())) != len(
            sigma.component
        ):
            continue
        composed_comp = {a: m2.component[b] for a, b in sigma.component.items()}
        composed_v = {v: m2.vertex_map[w] for v, w in sigma.vertex_map.items()}
        if composed_comp == m1.component and composed_v == m1.vertex_map:
            return True
    return False


def _candidate_domains(g):
    """Connected domains with vertex count at most |V_G|, assembled from
    injectively matched degree profiles: internal edges are partial matchings
    on attachment slots, unmatched slots become boundary legs."""
    from .graphs import canonical_signature

    verts = sorted(g.vertices)
    seen = set()
    for k in range(1, len(verts) + 1):
        for combo in itertools.combinations(verts, k):
            for h in _domains_for_profile(g, combo):
                sig = canonical_signature(h)[0]
                if sig not in seen:
                    seen.add(sig)
                    yield h


def _domains_for_profile(g, combo):
    if isinstance(g, UGraph):
        slots = []
        for i, v in enumerate(combo):
            slots.extend((i, n) for n in range(g.degree(v)))
        for matching in _partial_matchings(slots):
            yield _domain_u(len(combo), [g.degree(v) for v in combo], matching)
    else:
        in_slots, out_slots = [], []
        for i, v in enumerate(combo):
            in_slots.extend((i, n) for n in range(len(g.in_of(v))))
            out_slots.extend((i, n) for n in range(len(g.out_of(v))))
        for matching in _bipartite_matchings(out_slots, in_slots):
            yield _domain_d(
                len(combo),
                [len(g.in_of(v)) for v in combo],
                [len(g.out_of(v)) for v in combo],
                matching,
            )


def _partial_matchings(slots):
    if not slots:
        yield []
        return
    first, rest = slots[0], slots[1:]
    for m in _partial_matchings(rest):
        yield m  # first unmatched
    for idx in range(len(rest)):
        pair = (first, rest[idx])
        for m in _partial_matchings(rest[:idx] + rest[idx + 1 :]):
            yield [pair] + m


def _bipartite_matchings(outs, ins):
    if not outs:
        yield []
        return
    first, rest = outs[0], outs[1:]
    for m in _bipartite_matchings(rest, ins):
        yield m
    for idx in range(len(ins)):
        pair = (first, ins[idx])
        for m in _bipartite_matchings(rest, ins[:idx] + ins[idx + 1 :]):
            yield [pair] + m


def _domain_u(k, degrees, matching):
    dagger, t = {}, {}
    matched = set()
    idx = 0
    for (i1, n1), (i2, n2) in matching:
        a, b = f"m{idx}", f"m{idx}*"
        dagger[a], dagger[b] = b, a
        t[a] = f"v{i1}"
        t[b] = f"v{i2}"
        matched.add((i1, n1))
        matched.add((i2, n2))
        idx += 1
    for i, d in enumerate(degrees):
        for n in range(d):
            if (i, n) in matched:
                continue
            a, b = f"p{i}.{n}", f"p{i}.{n}*"
            dagger[a], dagger[b] = b, a
            t[a] = f"v{i}"
    return UGraph(f"dom{k}", dagger, t, [f"v{i}" for i in range(k)])


def _domain_d(k, in_deg, out_deg, matching):
    edges, inputs, outputs = [], {}, {}
    matched_out, matched_in = set(), set()
    idx = 0
    for (i1, n1), (i2, n2) in matching:
        e = f"m{idx}"
        edges.append(e)
        outputs[e] = f"v{i1}"
        inputs[e] = f"v{i2}"
        matched_out.add((i1, n1))
        matched_in.add((i2, n2))
        idx += 1
    for i, d in enumerate(in_deg):
        for n in range(d):
            if (i, n) not in matched_in:
                e = f"pi{i}.{n}"
                edges.append(e)
                inputs[e] = f"v{i}"
    for i, d in enumerate(out_deg):
        for n in range(d):
            if (i, n) not in matched_out:
                e = f"po{i}.{n}"
                edges.append(e)
                outputs[e] = f"v{i}"
    return DGraph(f"dom{k}", edges, inputs, outputs, [f"v{i}" for i in range(k)])
