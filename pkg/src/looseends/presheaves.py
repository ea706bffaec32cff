"""Set-valued presheaves on truncated graph categories.

Covers the Segal condition (limits over elementary inert covers), the
orientation presheaf, restriction and left Kan extension along the
direction-forgetting functors, the comma-category colimit oracle, and the
category-of-elements equivalence checks.
"""

from __future__ import annotations

import itertools

from .emb import EmbRegion, enumerate_emb, realize
from .errors import fail
from .etale import EtaleMap, compose_etale
from .gmaps import is_inert, map_from_embedding
from .graphs import UGraph, iso
from .sites import (
    ElementsSite,
    Site,
    orientations,
    restrict_orientation,
)


class Presheaf:
    """Total tables: a value tuple per object, an action per morphism."""

    def __init__(self, site: Site, values, action, name="X"):
        self.site = site
        self.values = {i: tuple(v) for i, v in values.items()}
        self.action = {ref: dict(a) for ref, a in action.items()}
        self.name = name

    def __repr__(self):
        total = sum(len(v) for v in self.values.values())
        return f"Presheaf({self.name}, {total} elements)"

    def value(self, i):
        return self.values[i]

    def act(self, ref, elem):
        return self.action[ref][elem]

    def validate(self):
        for (i, j), maps in self.site.homs.items():
            for pos in range(len(maps)):
                table = self.action.get((i, j, pos))
                if table is None:
                    fail("SiteTooSmall", f"missing action at {(i, j, pos)}")
                for elem in self.values[j]:
                    if elem not in table:
                        fail("SiteTooSmall", f"partial action at {(i, j, pos)}")
                    if table[elem] not in self.values[i]:
                        fail("SiteTooSmall", "action leaves the value set")
        for i in range(len(self.site.objects)):
            ref = self.site.identity_ref(i)
            for elem in self.values[i]:
                if self.act(ref, elem) != elem:
                    fail("SiteTooSmall", f"identity acts nontrivially at {i}")
        by_source = {}
        for ref in self.site.all_refs():
            by_source.setdefault(ref[0], []).append(ref)
        for ref1 in self.site.all_refs():
            i, j, p1 = ref1
            for ref2 in by_source.get(j, ()):
                _, k, p2 = ref2
                ref = self.site.compose_refs(ref2, ref1)
                for elem in self.values[k]:
                    direct = self.act(ref, elem)
                    stepwise = self.act(ref1, self.act(ref2, elem))
                    if direct != stepwise:
                        fail(
                            "SiteTooSmall",
                            f"functoriality fails through {ref1} {ref2}",
                        )
        return self


def presheaf_from_values(site, values_fn, action_fn, name="X"):
    values = {i: tuple(values_fn(i)) for i in range(len(site.objects))}
    action = {}
    for ref in site.all_refs():
        i, j, pos = ref
        action[ref] = {elem: action_fn(ref, elem) for elem in values[j]}
    return Presheaf(site, values, action, name=name)


def terminal_presheaf(site):
    return presheaf_from_values(site, lambda i: ("*",), lambda ref, e: "*", name="1")


def representable(site, k):
    """C(-, object k): values are hom tuples, action is precomposition."""

    def values(i):
        return [(i, k, pos) for pos in range(len(site.hom(i, k)))]

    def action(ref, elem):
        return site.compose_refs(elem, ref)

    return presheaf_from_values(site, values, action, name=f"y({k})")


def orientation_presheaf(site):
    """Involutive plus/minus labelings of arcs, one free choice per edge."""
    for g in site.objects:
        if not isinstance(g, UGraph):
            fail("FlavorMismatch", "the orientation presheaf lives on undirected sites")

    def values(i):
        return sorted(orientations(site.objects[i]), key=sorted)

    def action(ref, x):
        i, j, pos = ref
        m = site.morph(ref)
        return restrict_orientation(x, m.phi0, m.source)

    return presheaf_from_values(site, values, action, name="orientation")


def nerve_presheaf(P, site):
    """The nerve of an operad presentation on a matching site."""
    from .operads import enumerate_decorations, nerve_action

    directed_site = not isinstance(site.objects[0], UGraph)
    if directed_site != P.directed:
        fail("FlavorMismatch", f"{P.flavor} against a {site.tag} site")

    def values(i):
        return enumerate_decorations(P, site.objects[i])

    def action(ref, d):
        return nerve_action(P, site.morph(ref), d)

    return presheaf_from_values(site, values, action, name=f"N({P.name})")


# ---------------------------------------------------------------------------
# elementary covers and the Segal condition


def elementary_over(site: Site, i):
    """The category of elementary inert covers of object i.

    Objects: one canonical inert cover per edge / vertex class of Emb(G_i),
    located in the site.  Morphisms: inert site morphisms commuting over G_i.
    Returns (covers, arrows): covers maps x -> (k, cover_ref); arrows lists
    (x, y, connecting_ref).
    """
    g = site.objects[i]
    covers = {}
    for x in enumerate_emb(g):
        if isinstance(x, EmbRegion) and (len(x.vertices) != 1 or x.glued):
            continue
        h, incl = realize(x)
        k = site.find_object(h)
        if k is None:
            fail("SiteTooSmall", f"no site object for an elementary cover of {g.name}")
        rep = site.objects[k]
        w = iso(rep, h)
        if w is None:
            fail("SiteTooSmall", "iso lookup failed")
        comp_map, vmap = w
        rho = EtaleMap(rep, h, comp_map, vmap, check=False)
        cover = map_from_embedding(compose_etale(incl, rho))
        covers[x] = site.locate(k, i, cover)
    arrows = []
    for x, ref_x in covers.items():
        for y, ref_y in covers.items():
            if x == y:
                continue
            kx, ky = ref_x[0], ref_y[0]
            for pos in range(len(site.hom(kx, ky))):
                m = site.morph((kx, ky, pos))
                if not is_inert(m):
                    continue
                if site.compose_refs(ref_y, (kx, ky, pos)) == ref_x:
                    arrows.append((x, y, (kx, ky, pos)))
    return covers, arrows


def segal_map(X: Presheaf, i):
    """(the Segal map as a dict, whether it is a bijection).

    The limit is computed as compatible families over the elementary cover
    category; an independent brute-force product filter cross-checks it."""
    covers, arrows = elementary_over(X.site, i)
    keys = sorted(covers, key=lambda x: x.sort_key())
    limit = _limit_families(X, covers, arrows, keys)
    mapping = {}
    for elem in X.value(i):
        image = tuple(X.act(covers[x], elem) for x in keys)
        mapping[elem] = image
    image_set = set(mapping.values())
    injective = len(image_set) == len(X.value(i))
    surjective = image_set == set(limit)
    if not image_set <= set(limit):
        fail("SiteTooSmall", "Segal map leaves the limit; presheaf not functorial")
    return mapping, injective and surjective


def _limit_families(X, covers, arrows, keys):
    """Backtracking construction of all compatible families."""
    by_target = {}
    for x, y, ref in arrows:
        by_target.setdefault(y, []).append((x, ref))
    families = [()]
    for pos, y in enumerate(keys):
        new = []
        for fam in families:
            for val in X.value(covers[y][0]):
                ok = True
                for x, ref in by_target.get(y, []):
                    if x in keys[:pos]:
                        if fam[keys.index(x)] != X.act(ref, val):
                            ok = False
                            break
                if ok:
                    new.append(fam + (val,))
        families = new
    # filter by arrows pointing at earlier keys
    out = []
    for fam in families:
        ok = True
        for x, y, ref in arrows:
            if fam[keys.index(x)] != X.act(ref, fam[keys.index(y)]):
                ok = False
                break
        if ok:
            out.append(fam)
    return out


def limit_families_bruteforce(X: Presheaf, i):
    """Independent generic-limit computation: full product, then filter."""
    covers, arrows = elementary_over(X.site, i)
    keys = sorted(covers, key=lambda x: x.sort_key())
    pools = [X.value(covers[y][0]) for y in keys]
    out = []
    for fam in itertools.product(*pools):
        ok = True
        for x, y, ref in arrows:
            if fam[keys.index(x)] != X.act(ref, fam[keys.index(y)]):
                ok = False
                break
        if ok:
            out.append(fam)
    return out


def is_segal(X: Presheaf):
    """(verdict, first violation report or None)."""
    for i in range(len(X.site.objects)):
        _, bij = segal_map(X, i)
        if not bij:
            return False, {"object": i, "name": X.site.objects[i].name}
    return True, None


# ---------------------------------------------------------------------------
# restriction and left Kan extension along the forgetful functors


def restrict_presheaf(els: ElementsSite, X: Presheaf) -> Presheaf:
    """f*X on the directed side: value at (G, x) is X_G."""
    if X.site is not els.base:
        fail("SiteTooSmall", "presheaf lives on the wrong site")
    dsite = els.directed

    def values(k):
        return X.value(els.obj_map[k])

    def action(ref, elem):
        return X.act(els.mor_map[ref], elem)

    return presheaf_from_values(dsite, values, action, name=f"f*{X.name}")


def left_kan_formula(els: ElementsSite, Z: Presheaf) -> Presheaf:
    """f_!Z on the base site: tagged coproduct over orientations (rootings),
    with action by orientation restriction plus the lifted morphism."""
    if Z.site is not els.directed:
        fail("SiteTooSmall", "presheaf lives on the wrong site")
    base = els.base
    pair_index = {pair: k for k, pair in enumerate(els.pairs)}

    def values(i):
        out = []
        for x in sorted(orientations(base.objects[i]), key=sorted):
            k = pair_index.get((i, x))
            if k is None:
                continue  # rooted-only sites: skip non-rootings
            for z in Z.value(k):
                out.append((tuple(sorted(x)), z))
        return out

    def action(ref, elem):
        i, j, pos = ref
        xs, z = elem
        x = frozenset(xs)
        m = base.morph(ref)
        x_src = restrict_orientation(x, m.phi0, m.source)
        k_src = pair_index.get((i, x_src))
        k_dst = pair_index[(j, x)]
        if k_src is None:
            fail("SiteTooSmall", "restriction left the directed site")
        dref = _locate_lift(els, ref, k_src, k_dst)
        return (tuple(sorted(x_src)), Z.act(dref, z))

    return presheaf_from_values(base, values, action, name=f"f!{Z.name}")


def _locate_lift(els, base_ref, k_src, k_dst):
    for pos in range(len(els.directed.hom(k_src, k_dst))):
        if els.mor_map[(k_src, k_dst, pos)] == base_ref:
            return (k_src, k_dst, pos)
    fail("SiteTooSmall", "no lift of a base morphism")


def left_kan_oracle(els: ElementsSite, Z: Presheaf, i):
    """Pointwise left Kan extension as a colimit over the comma category:
    elements (directed object k, u : G_i -> f(k), z in Z_k) modulo zig-zags,
    glued by union-find."""
    base = els.base
    nodes = []
    for k in range(len(els.directed.objects)):
        j = els.obj_map[k]
        for pos in range(len(base.hom(i, j))):
            for z in Z.value(k):
                nodes.append((k, (i, j, pos), z))
    index = {n: t for t, n in enumerate(nodes)}
    parent = list(range(len(nodes)))

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for (k, k2, pos), base_ref in els.mor_map.items():
        jk, jk2 = els.obj_map[k], els.obj_map[k2]
        for upos in range(len(base.hom(i, jk))):
            u_ref = (i, jk, upos)
            u2_ref = base.compose_refs(base_ref, u_ref)
            for z2 in Z.value(k2):
                z = Z.act((k, k2, pos), z2)
                union(index[(k, u_ref, z)], index[(k2, u2_ref, z2)])

    classes = {}
    for n, t in index.items():
        classes.setdefault(find(t), []).append(n)
    return [sorted(v, key=repr) for v in sorted(classes.values(), key=lambda v: repr(sorted(v, key=repr)))]


def kan_formula_matches_oracle(els: ElementsSite, Z: Presheaf, i):
    """The formula's tagged sum must hit each comma-colimit class once."""
    base = els.base
    pair_index = {pair: k for k, pair in enumerate(els.pairs)}
    classes = left_kan_oracle(els, Z, i)
    locate = {}
    for t, cls in enumerate(classes):
        for node in cls:
            locate[node] = t
    id_ref = base.identity_ref(i)
    hit = {}
    count = 0
    for x in sorted(orientations(base.objects[i]), key=sorted):
        k = pair_index.get((i, x))
        if k is None:
            continue
        for z in Z.value(k):
            count += 1
            cls = locate.get((k, id_ref, z))
            if cls is None:
                return False
            if cls in hit:
                return False
            hit[cls] = (k, z)
    return count == len(classes)


# ---------------------------------------------------------------------------
# category-of-elements equivalence (criterion: hom bijections)


def elements_equivalence_check(els: ElementsSite, budget=None):
    """Directly enumerate directed homs and compare with the lifted ones."""
    from .config import DEFAULT_BUDGET
    from .gmaps import enumerate_graph_maps

    budget = budget or DEFAULT_BUDGET
    report = {"objects": len(els.pairs), "hom_pairs": 0, "mismatches": []}
    d = els.directed
    for a in range(len(d.objects)):
        for b in range(len(d.objects)):
            direct = enumerate_graph_maps(d.objects[a], d.objects[b], budget=budget)
            lifted = list(d.hom(a, b))
            report["hom_pairs"] += 1
            if set(direct) != set(lifted):
                report["mismatches"].append((a, b, len(direct), len(lifted)))
    return report


# ---------------------------------------------------------------------------
# Segal transfer and the slice argument


def _site_automorphism_refs(site, i):
    """Refs of invertible endomorphisms of object i."""
    autos = set()
    endos = site.hom(i, i)
    identity = site.identity_ref(i)
    for pos in range(len(endos)):
        for pos2 in range(len(endos)):
            left = site.compose_refs((i, i, pos), (i, i, pos2))
            right = site.compose_refs((i, i, pos2), (i, i, pos))
            if left == identity and right == identity:
                autos.add((i, i, pos))
    return autos


def perturb_presheaf(X: Presheaf, i, name=None):
    """Double one value at object i.

    The new element is fixed by automorphisms of i and falls onto the image
    of a base value along every other map; this is functorial whenever i is
    not a retract of another site object (the caller should validate)."""
    values = dict(X.values)
    v0 = X.value(i)[0]
    extra = ("dup", v0)
    values[i] = X.value(i) + (extra,)
    autos = _site_automorphism_refs(X.site, i)
    action = {}
    for ref, table in X.action.items():
        t2 = dict(table)
        if ref[1] == i:
            t2[extra] = extra if ref in autos else table[v0]
        action[ref] = t2
    return Presheaf(X.site, values, action, name=name or f"{X.name}+dup")


def doubled_value_fixture(site, want_internal=True):
    """A functorial presheaf with a doubled value at a non-elementary object,
    found by search; returns (presheaf, object index)."""
    base = terminal_presheaf(site)
    for i, g in enumerate(site.objects):
        internal = any(
            g.is_internal_edge(e)
            for e in (g.edges() if isinstance(g, UGraph) else g.edges)
        )
        if want_internal and not internal:
            continue
        cand = perturb_presheaf(base, i)
        try:
            cand.validate()
        except Exception:
            continue
        return cand, i
    fail("SiteTooSmall", "no object supports a doubled value")


def slice_restriction(els: ElementsSite, X: Presheaf, aug):
    """Restrict an orientation-augmented presheaf along the equivalence: the
    directed-side value at (G, x) is the fiber of aug over x."""
    base = els.base
    dsite = els.directed

    def values(k):
        i, x = els.pairs[k]
        return [e for e in X.value(i) if aug[i][e] == x]

    def action(ref, elem):
        return X.act(els.mor_map[ref], elem)

    return presheaf_from_values(dsite, values, action, name=f"{X.name}|fiber")


def orientation_augmentation(site, X: Presheaf, orient_presheaf: Presheaf, picker):
    """aug[i][elem] = orientation; picker builds the natural transformation."""
    aug = {}
    for i in range(len(site.objects)):
        aug[i] = {e: picker(i, e) for e in X.value(i)}
    # naturality
    for ref in site.all_refs():
        i, j, pos = ref
        m = site.morph(ref)
        for e in X.value(j):
            lhs = aug[i][X.act(ref, e)]
            rhs = restrict_orientation(aug[j][e], m.phi0, m.source)
            if lhs != rhs:
                fail("SiteTooSmall", "augmentation is not natural")
    return aug
