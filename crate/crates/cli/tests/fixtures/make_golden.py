"""Regenerates five_derived.csv (single block, weighted policy) with
networkx/numpy, independently of the Rust code."""
import csv
import itertools
import sys

import networkx as nx
import numpy as np

rows = list(csv.DictReader(open(sys.argv[1])))
g = nx.DiGraph()
for r in rows:
    u, v = r["Source IP"], r["Destination IP"]
    w = g[u][v]["weight"] + 1 if g.has_edge(u, v) else 1
    g.add_edge(u, v, weight=w)
nodes = list(g.nodes)
n = len(nodes)

indeg = dict(g.in_degree(weight="weight"))
outdeg = dict(g.out_degree(weight="weight"))
# outgoing distances: closeness of the reversed graph
close = nx.closeness_centrality(g.reverse(), distance="weight", wf_improved=True)
# nodes that reach nothing carry the -10 sentinel
close = {v: (c if g.out_degree(v) else -10.0) for v, c in close.items()}
between = nx.betweenness_centrality(g, weight="weight", normalized=True)

a = nx.to_numpy_array(g, nodelist=nodes, weight="weight")
vals, vecs = np.linalg.eig(a.T + np.eye(n))
lead = np.abs(vecs[:, np.argmax(vals.real)].real)
eig = dict(zip(nodes, lead / lead.max()))

und = g.to_undirected()


def cc(v):
    nb = list(und.neighbors(v))
    if len(nb) < 2:
        return 0.0, 0.0
    h = und.copy()
    h.remove_node(v)
    one = two = 0
    for a_, b_ in itertools.combinations(nb, 2):
        try:
            d = nx.shortest_path_length(h, a_, b_)
        except nx.NetworkXNoPath:
            continue
        one += d == 1
        two += d == 2
    pairs = len(nb) * (len(nb) - 1) / 2
    return one / pairs, two / pairs


def fmt(x):
    x = float("%.11e" % x)
    return str(int(x)) if x == int(x) else repr(x)


def feats(v):
    c1, c2 = cc(v)
    return [indeg[v] + outdeg[v], indeg[v], outdeg[v], close[v], between[v], eig[v], c1, c2]


out = csv.writer(sys.stdout, lineterminator="\n")
out.writerow(["src", "dst", "label"] + [f"{s}_{m}" for s in ("src", "dst") for m in
             ("dc", "in_dc", "out_dc", "closeness", "betweenness", "eigenvector", "cc1", "cc2")])
for r in rows:
    u, v = r["Source IP"], r["Destination IP"]
    out.writerow([u, v, r["Label"]] + [fmt(x) for x in feats(u) + feats(v)])
