"""Generate the bundled email-network stand-in (data/email_surrogate.edges).

The graph mimics a departmental e-mail network: 1133 nodes, 5452 undirected
edges, one connected component, heavy-tailed degrees with maximum degree 71,
and most edges inside departments. Output is deterministic.
"""
import argparse
import random

import networkx as nx

N_NODES = 1133
N_EDGES = 5452
MAX_DEGREE = 71
N_DEPTS = 24
INTRA_FRACTION = 0.8


def build(seed: int) -> nx.Graph:
    rng = random.Random(seed)
    dept = [rng.randrange(N_DEPTS) for _ in range(N_NODES)]
    members = [[v for v in range(N_NODES) if dept[v] == k] for k in range(N_DEPTS)]
    weight = [min(MAX_DEGREE - 1, rng.paretovariate(2.2) * 4.0) for _ in range(N_NODES)]
    hub = max(range(N_NODES), key=lambda v: weight[v])

    g = nx.Graph()
    g.add_nodes_from(range(N_NODES))

    def pick(pool):
        total = sum(weight[v] for v in pool)
        x = rng.random() * total
        for v in pool:
            x -= weight[v]
            if x <= 0:
                return v
        return pool[-1]

    everyone = list(range(N_NODES))
    while g.number_of_edges() < N_EDGES - 200:
        u = pick(everyone)
        pool = members[dept[u]] if rng.random() < INTRA_FRACTION else everyone
        v = pick(pool)
        if u == v or g.has_edge(u, v):
            continue
        if max(g.degree(u), g.degree(v)) >= MAX_DEGREE - 1 and hub not in (u, v):
            continue
        g.add_edge(u, v)

    comps = sorted(nx.connected_components(g), key=len, reverse=True)
    for comp in comps[1:]:
        u = min(comp)
        v = pick(members[dept[u]])
        while v in comp:
            v = pick(everyone)
        g.add_edge(u, v)

    while g.degree(hub) < MAX_DEGREE:
        v = pick(members[dept[hub]] if rng.random() < 0.5 else everyone)
        if v != hub and g.degree(v) < MAX_DEGREE - 1:
            g.add_edge(hub, v)

    while g.number_of_edges() < N_EDGES:
        u = pick(everyone)
        v = pick(members[dept[u]])
        if u == v or g.has_edge(u, v) or u == hub or v == hub:
            continue
        if max(g.degree(u), g.degree(v)) >= MAX_DEGREE - 1:
            continue
        g.add_edge(u, v)

    assert g.number_of_edges() == N_EDGES
    assert nx.is_connected(g)
    assert max(d for _, d in g.degree()) == MAX_DEGREE
    return g


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=20240517)
    ap.add_argument("--out", default="data/email_surrogate.edges")
    args = ap.parse_args()
    g = build(args.seed)
    edges = sorted((min(u, v), max(u, v)) for u, v in g.edges())
    with open(args.out, "w") as f:
        f.write("% synthetic departmental e-mail network stand-in\n")
        f.write(f"% nodes {N_NODES} edges {N_EDGES} max_degree {MAX_DEGREE} (1-indexed)\n")
        for u, v in edges:
            f.write(f"{u + 1} {v + 1}\n")


if __name__ == "__main__":
    main()
