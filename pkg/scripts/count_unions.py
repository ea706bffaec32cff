#!/usr/bin/env python3
"""Survey union multiplicities across small hosts.

Unions of embedding classes need not be unique; this prints the spectrum of
union counts per host so the non-uniqueness is easy to see at a glance."""

import argparse
from collections import Counter

from looseends.config import SiteBounds
from looseends.emb import enumerate_emb, unions
from looseends.gen import gen_connected_ugraphs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--vertices", type=int, default=2)
    ap.add_argument("--edges", type=int, default=4)
    ap.add_argument("--arity", type=int, default=3)
    args = ap.parse_args()
    bounds = SiteBounds(args.vertices, args.edges, args.arity)
    for g in gen_connected_ugraphs(bounds):
        spectrum = Counter()
        elems = enumerate_emb(g)
        for x in elems:
            for y in elems:
                spectrum[len(unions(x, y))] += 1
        shown = " ".join(f"{k}:{v}" for k, v in sorted(spectrum.items()))
        marker = " *" if any(k > 1 for k in spectrum) else ""
        print(f"{g.name}  |Emb|={len(elems)}  unions {shown}{marker}")


if __name__ == "__main__":
    main()
