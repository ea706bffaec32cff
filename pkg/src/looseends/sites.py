"""Finite truncations of the graph categories.

A site holds iso-class representatives within size bounds, complete hom-sets
between them, and composition by lookup.  Sites are closed under the middle
objects of active-inert factorizations (those can exceed the edge bound) and
always contain the elementary objects their stars need.

The category of elements of the orientation presheaf is materialized as a
directed site whose objects are (undirected object, orientation) pairs; that
construction is the bridge for the restriction / left Kan extension tests.
"""

from __future__ import annotations

import itertools

from .config import DEFAULT_BOUNDS, DEFAULT_BUDGET
from .emb import EmbEdge, EmbRegion, id_element, realize
from .errors import fail
from .gen import gen_connected_dgraphs, gen_connected_ugraphs
from .gmaps import (
    GraphMap,
    compose,
    enumerate_graph_maps,
    identity_map,
    object_in_category,
)
from .graphs import (
    DGraph,
    UGraph,
    canonical_signature,
    isomorphic,
    shape,
)

UNDIRECTED_TAGS = ("U", "U0", "Ucyc")
DIRECTED_TAGS = ("O", "O0", "Omega", "Delta", "G")


class Site:
    def __init__(self, tag, objects, homs):
        self.tag = tag
        self.objects = list(objects)
        self.homs = dict(homs)
        self._locate = {}
        for (i, j), maps in self.homs.items():
            for pos, m in enumerate(maps):
                self._locate[(i, j, m._key)] = pos
        self._sig_index = {}
        for i, g in enumerate(self.objects):
            self._sig_index.setdefault(canonical_signature(g)[0], []).append(i)

    def __repr__(self):
        n_maps = sum(len(v) for v in self.homs.values())
        return f"Site({self.tag}, {len(self.objects)} objects, {n_maps} maps)"

    def hom(self, i, j):
        return self.homs.get((i, j), ())

    def morph(self, ref):
        i, j, pos = ref
        return self.homs[(i, j)][pos]

    def all_refs(self):
        for (i, j), maps in sorted(self.homs.items()):
            for pos in range(len(maps)):
                yield (i, j, pos)

    def locate(self, i, j, m: GraphMap):
        pos = self._locate.get((i, j, m._key))
        if pos is None:
            fail("SiteTooSmall", f"morphism {m!r} missing from hom({i},{j})")
        return (i, j, pos)

    def identity_ref(self, i):
        return self.locate(i, i, identity_map(self.objects[i]))

    def compose_refs(self, ref2, ref1):
        """ref1 : i -> j then ref2 : j -> k, as a located reference."""
        i, j, pos1 = ref1
        j2, k, pos2 = ref2
        if j != j2:
            fail("SourceTargetMismatch", "composition of non-adjacent refs")
        m = compose(self.morph(ref2), self.morph(ref1))
        return self.locate(i, k, m)

    def find_object(self, g):
        """Index of the object isomorphic to g, or None."""
        for i in self._sig_index.get(canonical_signature(g)[0], []):
            if isomorphic(self.objects[i], g):
                return i
        return None


def _object_pool(tag, bounds):
    if tag in UNDIRECTED_TAGS:
        pool = gen_connected_ugraphs(bounds)
    else:
        pool = gen_connected_dgraphs(bounds)
    return [g for g in pool if object_in_category(g, tag)]


def build_site(tag, bounds=DEFAULT_BOUNDS, budget=DEFAULT_BUDGET, close=True):
    """Site with one object per iso class within bounds, full hom-sets, and
    factorization-middle closure."""
    objects = _object_pool(tag, bounds)
    objects = [_rename(g, f"{tag}{i}") for i, g in enumerate(objects)]
    homs = {}
    _fill_homs(tag, objects, homs, budget)
    if close:
        _close_under_middles(tag, objects, homs, budget)
    return Site(tag, objects, homs)


def _rename(g, name):
    if isinstance(g, UGraph):
        return UGraph(name, g.dagger, g.t, g.vertices)
    return DGraph(name, g.edges, g.inputs, g.outputs, g.vertices)


def _fill_homs(tag, objects, homs, budget):
    for i, g in enumerate(objects):
        for j, h in enumerate(objects):
            if (i, j) not in homs:
                homs[(i, j)] = tuple(enumerate_graph_maps(g, h, tag=tag, budget=budget))


def _close_under_middles(tag, objects, homs, budget):
    from .gmaps import factorize

    while True:
        missing = None
        for (i, j), maps in sorted(homs.items()):
            for m in maps:
                mid, _ = realize(m.phi_hat[id_element(m.source)])
                if any(isomorphic(g, mid) for g in objects):
                    continue
                missing = mid
                break
            if missing is not None:
                break
        if missing is None:
            return
        objects.append(_rename(missing, f"{tag}{len(objects)}"))
        _fill_homs(tag, objects, homs, budget)


# ---------------------------------------------------------------------------
# orientations


def orientations(g: UGraph):
    """All orientations as frozensets of +1 arcs (one arc per edge)."""
    orbits = sorted({g.edge_key(a) for a in g.arcs})
    out = []
    for picks in itertools.product(*[e for e in orbits]):
        out.append(frozenset(picks))
    return out


def restrict_orientation(x, phi0, source: UGraph):
    """Precompose an orientation with the arc component of a map."""
    return frozenset(a for a in source.arcs if phi0[a] in x)


def orient(g: UGraph, x, name=None) -> DGraph:
    """Directed structure from an orientation: an arc a with x(a) = +1 and
    t(a) = v makes its edge an input of v.  Edges are named by +1 arcs."""
    if not x <= set(g.arcs) or len(x) != len(set(g.edges())):
        fail("NotBoundaryArc", "not an orientation: needs one +1 arc per edge")
    inputs, outputs = {}, {}
    for a in x:
        if g.dagger[a] in x:
            fail("NotBoundaryArc", "both arcs of one edge set to +1")
        if a in g.t:
            inputs[a] = g.t[a]
        if g.dagger[a] in g.t:
            outputs[a] = g.t[g.dagger[a]]
    return DGraph(name or f"{g.name}@{len(x)}", sorted(x), inputs, outputs, g.vertices)


def canonical_orientation(d: DGraph):
    """The +1 arcs of underlying(d): the e+ side."""
    return frozenset(f"{e}+" for e in d.edges)


def root_orientation(g: UGraph, r):
    """Orientation of a tree pointing every edge toward the boundary arc r."""
    if r not in g.boundary:
        fail("NotBoundaryArc", f"{r!r}")
    if not shape(g).is_tree:
        fail("NotATree", g.name)
    # walk inward from r; an edge's +1 arc is the one nearer the root edge
    plus = {r}
    root_edge = g.edge_key(r)
    dist = {root_edge: 0}
    frontier = [root_edge]
    while frontier:
        e = frontier.pop(0)
        for a in e:
            v = g.t.get(a)
            if v is None:
                continue
            for b in g.nbhd(v):
                e2 = g.edge_key(b)
                if e2 in dist:
                    continue
                dist[e2] = dist[e] + 1
                # b attaches to v which is nearer the root: flow enters v,
                # so b itself is the +1 arc of e2
                plus.add(b)
                frontier.append(e2)
    return frozenset(plus)


def root(g: UGraph, r, name=None) -> DGraph:
    return orient(g, root_orientation(g, r), name=name)


def is_rooted_orientation(g: UGraph, x) -> bool:
    """Does the orientation make g a rooted tree: one output per vertex."""
    if not shape(g).is_tree:
        return False
    d = orient(g, x)
    return all(len(d.out_of(v)) == 1 for v in d.vertices)


# ---------------------------------------------------------------------------
# the category of elements of the orientation presheaf, materialized


class ElementsSite:
    """Directed site whose objects are (base object, orientation) pairs.

    directed.objects[k] is orient(base, x); functor data maps directed
    object/morphism references to the base site's.
    """

    def __init__(self, base: Site, pairs, directed_site: Site, obj_map, mor_map):
        self.base = base
        self.pairs = pairs  # list of (base index, orientation)
        self.directed = directed_site
        self.obj_map = obj_map  # directed object index -> base object index
        self.mor_map = mor_map  # directed ref -> base ref

    def __repr__(self):
        return f"ElementsSite({self.directed!r} over {self.base!r})"


def build_elements_site(base: Site, rooted_only=False):
    """Materialize el(orientation presheaf) over a U-flavored site.

    With rooted_only (for trees) only root orientations are kept, producing
    the rooted-tree site over a tree site.
    """
    pairs = []
    for i, g in enumerate(base.objects):
        for x in sorted(orientations(g), key=sorted):
            if rooted_only and not is_rooted_orientation(g, x):
                continue
            pairs.append((i, x))
    dobjects = [
        orient(base.objects[i], x, name=f"{base.objects[i].name}x{k}")
        for k, (i, x) in enumerate(pairs)
    ]
    homs = {}
    mor_map = {}
    for a, (i, x) in enumerate(pairs):
        for b, (j, y) in enumerate(pairs):
            lifted = []
            for pos, m in enumerate(base.hom(i, j)):
                if restrict_orientation(y, m.phi0, base.objects[i]) != x:
                    continue
                dm = lift_map_to_oriented(m, dobjects[a], dobjects[b], x, y)
                mor_map[(a, b, len(lifted))] = (i, j, pos)
                lifted.append(dm)
            homs[(a, b)] = tuple(lifted)
    dsite = Site("el", dobjects, homs)
    return ElementsSite(base, pairs, dsite, {k: i for k, (i, x) in enumerate(pairs)}, mor_map)


def translate_emb_to_oriented(x_elem, g: UGraph, d: DGraph):
    """Emb element of the undirected base as an element over orient(g, x);
    directed edges are named by their +1 arcs."""
    def edge_name(e):
        a, b = e
        return a if a in set(d.edges) else b

    if isinstance(x_elem, EmbEdge):
        return EmbEdge(d, edge_name(x_elem.edge))
    return EmbRegion(
        d, x_elem.vertices, frozenset(edge_name(e) for e in x_elem.glued)
    )


def lift_map_to_oriented(m: GraphMap, d_src: DGraph, d_dst: DGraph, x, y) -> GraphMap:
    """The directed map over a base map compatible with the orientations."""
    g, gp = m.source, m.target
    phi0 = {e: m.phi0[e] for e in d_src.edges}  # +1 arcs map to +1 arcs
    phi_hat = {}
    for a, b in m.phi_hat.items():
        phi_hat[translate_emb_to_oriented(a, g, d_src)] = translate_emb_to_oriented(
            b, gp, d_dst
        )
    return GraphMap(d_src, d_dst, phi0, phi_hat, check=False)
