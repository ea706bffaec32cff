"""Acceptance suite: one criterion per test, one printed verdict line each.

Wherever a criterion leaves arity or edge counts open, the desk-scale
bounds apply (vertex arity at most 3, at most 6 edges per graph);
hom-set-heavy sites use the smaller defaults documented in the README.
"""

import os

import pytest

from looseends.config import OperadCaps, SiteBounds
from looseends import emb as E
from looseends import gmaps as GM
from looseends.gen import gen_connected_dgraphs, gen_connected_ugraphs, gen_trees_u
from looseends.graphs import UGraph, isomorphic, underlying
from looseends.operads import (
    free_cyclic,
    io_presentation,
    monoid_dioperad,
    operad_homs,
    hom_to_tree_map,
    terminal_presentation,
    validate_presentation,
)
from looseends.presheaves import (
    doubled_value_fixture,
    elements_equivalence_check,
    is_segal,
    kan_formula_matches_oracle,
    left_kan_formula,
    nerve_presheaf,
    orientation_presheaf,
    representable,
    restrict_presheaf,
    terminal_presheaf,
)
from looseends.sites import build_elements_site, build_site
from looseends.textio import parse_graphs

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def load_fixture(name):
    with open(os.path.join(FIXTURES, name)) as fh:
        return parse_graphs(fh.read())


def verdict(number, ok, detail):
    line = f"ACCEPTANCE {number:02d} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def sites():
    data = {}
    data["U"] = build_site("U", SiteBounds(2, 3, 3))
    data["U0"] = build_site("U0", SiteBounds(2, 4, 3))
    data["Ucyc"] = build_site("Ucyc", SiteBounds(2, 4, 3))
    data["Delta"] = build_site("Delta", SiteBounds(4, 5, 2))
    data["G"] = build_site("G", SiteBounds(2, 3, 3))
    data["elsU"] = build_elements_site(data["U"])
    data["elsU0"] = build_elements_site(data["U0"])
    data["elsOmega"] = build_elements_site(data["Ucyc"], rooted_only=True)
    return data


def test_a01_boundaries_of_the_figure_graph():
    g = load_fixture("example18.graph")["example18"]
    ok = set(g.boundary) == {"1", "2", "2*", "3", "7*", "9*"}
    star_w = E.vertex_element(g, "w")
    ok = ok and set(E.boundary(star_w)) == {"4", "6*", "5", "5*"}
    ok = ok and E.boundary(star_w) == E.boundary_via_realize(star_w)
    verdict(1, ok, "graph boundary and the star boundary at w match the text")


def test_a02_union_counts():
    four = load_fixture("four_cycle.graph")["four_cycle"]
    left = E.region(four, ["a", "b"], [four.edge_key("ab")])
    right = E.region(four, ["c", "d"], [four.edge_key("cd")])
    us = E.unions(left, right)
    ok = len(us) == 3 and E.id_element(four) in us
    theta = load_fixture("theta.graph")["theta"]
    x = E.region(theta, ["u", "v"], [theta.edge_key("g")])
    self_us = E.unions(x, x)
    ok = ok and len(self_us) == 4 and E.id_element(theta) in self_us
    loop = load_fixture("loop_star.graph")["loop_star"]
    ok = ok and len(E.enumerate_emb(loop)) == 5
    verdict(2, ok, "3 unions on the square, 4 self-unions on the theta graph")


def test_a03_emb_encoding_oracle():
    bounds = SiteBounds(3, 6, 3)
    mismatches = 0
    hosts = 0
    for g in gen_connected_ugraphs(bounds) + gen_connected_dgraphs(bounds):
        hosts += 1
        classes = E.oracle_embedding_classes(g)
        encoded = set(E.enumerate_emb(g))
        recovered = {E.class_of_embedding(m) for m in classes}
        if len(classes) != len(encoded) or recovered != encoded:
            mismatches += 1
    verdict(3, mismatches == 0, f"Emb oracle bijection on {hosts} hosts, {mismatches} discrepancies")


def test_a04_tree_map_extension_bijection():
    trees = gen_trees_u(SiteBounds(4, 6, 3))
    pairs = failures = maps_total = 0
    for h in trees:
        h_elems = E.enumerate_emb(h)
        overlapping = [
            (s, t)
            for s in h_elems
            for t in h_elems
            if E.overlap(s, t)
        ]
        for g in trees:
            pairs += 1
            maps = GM.enumerate_graph_maps(h, g)
            maps_total += len(maps)
            data = set()
            for m in maps:
                phi0, phi1 = GM.restrict_tree_map(m)
                rebuilt = GM.extend_tree_map(h, g, phi0, phi1)
                if rebuilt != m:
                    failures += 1
                key = (tuple(sorted(phi0.items())), tuple(sorted(phi1.items(), key=repr)))
                data.add(key)
                for s, t in overlapping:
                    common = E.intersect_subtrees(s, t)
                    image = E.intersect_subtrees(m.phi_hat[s], m.phi_hat[t])
                    if image is None or m.phi_hat[common] != image:
                        failures += 1
            if len(data) != len(maps):
                failures += 1
    verdict(
        4,
        failures == 0,
        f"extension bijection and intersections on {pairs} tree pairs"
        f" ({maps_total} maps), {failures} failures",
    )


OBJECT_CLASS = {
    "U": "U",
    "U0": "U0",
    "Ucyc": "Ucyc",
    "Delta": "Delta",
    "G": "G",
    "elsU": "O",
    "elsU0": "O0",
    "elsOmega": "Omega",
}


def test_a05_factorization(sites):
    failures = checked = 0
    for key in ("U", "U0", "Ucyc", "Delta", "G", "elsU", "elsU0", "elsOmega"):
        tag = OBJECT_CLASS[key]
        site = sites[key].directed if key.startswith("els") else sites[key]
        for ref in site.all_refs():
            m = site.morph(ref)
            checked += 1
            alpha, iota = GM.factorize(m)
            if GM.compose(iota, alpha, check=True) != m:
                failures += 1
            if not (GM.is_active(alpha) and GM.is_inert(iota)):
                failures += 1
            if not GM.object_in_category(alpha.target, tag):
                failures += 1
    # uniqueness up to iso, by exhaustive matching on the two smallest sites
    for key in ("U", "Delta"):
        site = sites[key]
        for ref in list(site.all_refs()):
            i, j, pos = ref
            m = site.morph(ref)
            alpha, _ = GM.factorize(m)
            for h in range(len(site.objects)):
                for a_pos in range(len(site.hom(i, h))):
                    a = site.morph((i, h, a_pos))
                    if not GM.is_active(a):
                        continue
                    for i_pos in range(len(site.hom(h, j))):
                        emb_map = site.morph((h, j, i_pos))
                        if not GM.is_inert(emb_map):
                            continue
                        if GM.compose(emb_map, a) == m:
                            if not isomorphic(site.objects[h], alpha.target):
                                failures += 1
    verdict(5, failures == 0, f"{checked} morphisms factor as active then inert, middles in class")


def test_a06_operad_bridge(sites):
    trees = [g for g in sites["U0"].objects if isinstance(g, UGraph)]
    caps = OperadCaps(max_arity=4, max_ops_per_profile=64)
    pres = {t: free_cyclic(t, caps=caps) for t in trees}
    pairs = failures = 0
    for h in trees:
        for g in trees:
            pairs += 1
            homs = operad_homs(pres[h], h, pres[g], g)
            maps = GM.enumerate_graph_maps(h, g)
            if len(homs) != len(maps):
                failures += 1
                continue
            witnesses = {hom_to_tree_map(hom, h, g, pres[g]) for hom in homs}
            if witnesses != set(maps):
                failures += 1
    verdict(6, failures == 0, f"operad homs match tree maps with witnesses on {pairs} pairs")


def test_a07_nerve_battery(sites):
    batch = [
        (terminal_presentation("modular", caps=OperadCaps(6, 16)), sites["U"]),
        (io_presentation(caps=OperadCaps(4, 16)), sites["U0"]),
        (monoid_dioperad(), sites["elsU0"].directed),
        (
            terminal_presentation("wheeledProperad", caps=OperadCaps(6, 16)),
            sites["elsU"].directed,
        ),
        (monoid_dioperad(), sites["Delta"]),
    ]
    tree = sites["U0"].objects[-1]
    batch.append((free_cyclic(tree, caps=OperadCaps(6, 24)), sites["U0"]))
    cyc_tree = next(g for g in sites["Ucyc"].objects if g.vertices)
    C = free_cyclic(cyc_tree, caps=OperadCaps(6, 24))
    C.flavor = "cyclic"
    batch.append((C, sites["Ucyc"]))
    failures = 0
    flavors = set()
    for P, site in batch:
        validate_presentation(P)
        flavors.add(P.flavor)
        n = nerve_presheaf(P, site)
        if not is_segal(n)[0]:
            failures += 1
    # the linear chain: X_n against the iterated fiber product for n <= 4
    delta = sites["Delta"]
    X = nerve_presheaf(monoid_dioperad(), delta)
    chain_ok = _delta_chain_matches(delta, X)
    verdict(
        7,
        failures == 0 and chain_ok and len(flavors) >= 5,
        f"{len(batch)} nerves over {len(flavors)} flavors are Segal;"
        " linear objects reproduce the iterated fiber product",
    )


def _delta_chain_matches(delta, X):
    by_len = {len(g.vertices): i for i, g in enumerate(delta.objects)}
    l0, l1 = by_len[0], by_len[1]
    # the two edge inclusions into the one-vertex object, told apart by
    # whether they hit its input edge
    tops = bottoms = None
    g1 = delta.objects[l1]
    for pos in range(len(delta.hom(l0, l1))):
        m = delta.morph((l0, l1, pos))
        image = m.phi_hat[E.id_element(m.source)].edge
        if image in g1.graph_inputs:
            tops = (l0, l1, pos)
        else:
            bottoms = (l0, l1, pos)
    for n in range(2, 5):
        ln = by_len[n]
        gn = delta.objects[ln]
        vertex_covers = []
        for v in sorted(gn.vertices, key=lambda v: sorted(gn.in_of(v))):
            h, incl = E.realize(E.vertex_element(gn, v))
            cover = GM.map_from_embedding(incl)
            w = None
            from looseends.graphs import iso as iso_w
            from looseends.etale import EtaleMap, compose_etale

            witness = iso_w(delta.objects[l1], h)
            rho = EtaleMap(delta.objects[l1], h, witness[0], witness[1], check=False)
            located = delta.locate(l1, ln, GM.compose(cover, GM.map_from_embedding(rho)))
            vertex_covers.append(located)
        tuples = [()]
        for k in range(n):
            new = []
            for tup in tuples:
                for x in X.value(l1):
                    if k and X.act(tops, x) != X.act(bottoms, tup[-1]):
                        continue
                    new.append(tup + (x,))
            tuples = new
        images = {
            tuple(X.act(ref, x) for ref in vertex_covers) for x in X.value(ln)
        }
        if len(images) != len(X.value(ln)) or images != set(tuples):
            return False
    return True


def test_a08_kan_extension(sites):
    failures = 0
    cases = []
    for key, nerve_P in (
        ("elsU0", monoid_dioperad()),
        ("elsU", terminal_presentation("wheeledProperad", caps=OperadCaps(6, 16))),
        ("elsOmega", monoid_dioperad()),
    ):
        els = sites[key]
        battery = [terminal_presheaf(els.directed), representable(els.directed, 0)]
        battery.append(nerve_presheaf(nerve_P, els.directed))
        cases.append((els, battery))
    for els, battery in cases:
        for Z in battery:
            for i in range(len(els.base.objects)):
                if not kan_formula_matches_oracle(els, Z, i):
                    failures += 1
    # terminal Kan extension is the orientation presheaf, naturally
    for key in ("elsU0", "elsU"):
        els = sites[key]
        f1 = left_kan_formula(els, terminal_presheaf(els.directed))
        o = orientation_presheaf(els.base)
        for i in range(len(els.base.objects)):
            if len(f1.value(i)) != len(o.value(i)):
                failures += 1
        for ref in els.base.all_refs():
            for xs, star in f1.value(ref[1]):
                lhs, _ = f1.act(ref, (xs, star))
                if frozenset(lhs) != o.act(ref, frozenset(xs)):
                    failures += 1
    els = sites["elsOmega"]
    f1 = left_kan_formula(els, terminal_presheaf(els.directed))
    for i, g in enumerate(els.base.objects):
        if len(f1.value(i)) != len(g.boundary):
            failures += 1
    # Segal transfer: restriction in both directions, and along f!
    for key in ("elsU0", "elsU", "elsOmega"):
        els = sites[key]
        o = orientation_presheaf(els.base)
        if not (is_segal(o)[0] and is_segal(restrict_presheaf(els, o))[0]):
            failures += 1
        bad, _ = doubled_value_fixture(els.base)
        if is_segal(bad)[0] or is_segal(restrict_presheaf(els, bad))[0]:
            failures += 1
    for els, battery in cases:
        for Z in battery:
            if not is_segal(Z)[0]:
                continue
            if not is_segal(left_kan_formula(els, Z))[0]:
                failures += 1
    verdict(8, failures == 0, "Kan formula matches the comma oracle; transfer holds")


def test_a09_structured_subgraphs(sites):
    failures = objects = 0
    from looseends.graphs import shape

    directed_objs = list(sites["elsU0"].directed.objects) + [
        d for d in sites["elsU"].directed.objects if shape(d).is_simply_connected
    ]
    for d in directed_objs:
        objects += 1
        if E.enumerate_ssb(d) != E.enumerate_emb(d):
            failures += 1
    diamond = load_fixture("diamond.graph")["diamond"]
    cut = E.region(diamond, ["u", "v"], ["e1"])
    ok = failures == 0 and not E.is_structured(cut)
    ok = ok and E.enumerate_ssb(diamond) != E.enumerate_emb(diamond)
    verdict(9, ok, f"sSb = Emb on {objects} simply-connected objects; diamond cut rejected")


def test_a10_elements_equivalence():
    failures = 0
    reports = []
    for tag, bounds, rooted in (
        ("U0", SiteBounds(2, 3, 3), False),
        ("U", SiteBounds(2, 2, 3), False),
        ("Ucyc", SiteBounds(2, 3, 3), True),
    ):
        base = build_site(tag, bounds)
        els = build_elements_site(base, rooted_only=rooted)
        report = elements_equivalence_check(els)
        reports.append((tag, report["objects"], report["hom_pairs"]))
        if report["mismatches"]:
            failures += 1
        for k, (i, x) in enumerate(els.pairs):
            if not isomorphic(underlying(els.directed.objects[k]), base.objects[i]):
                failures += 1
    verdict(
        10,
        failures == 0,
        "object and hom bijections on paired sites " + repr(reports),
    )
