"""Shared test helpers: exhaustive DAG enumeration and random typed graphs."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from causalbell.graph import Dag, NodeKind

# labeled acyclic digraph counts, used to sanity-check the enumerator
DAG_COUNTS = {0: 1, 1: 1, 2: 3, 3: 25, 4: 543, 5: 29281}


def all_dags(n: int, card: int = 2, kind: str = "outcome"):
    """Yield every labeled DAG on n nodes (3^C(n,2) candidates, acyclic kept).

    Each unordered node pair independently carries no edge or one of the
    two orientations; orientations along a fixed global order can never
    all be cyclic, so candidates are filtered by a cheap cycle check.
    """
    names = [f"N{i}" for i in range(n)]
    nodes = [(nm, kind, card) for nm in names]
    pairs = list(itertools.combinations(range(n), 2))
    for states in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (i, j), s in zip(pairs, states):
            if s == 1:
                edges.append((names[i], names[j]))
            elif s == 2:
                edges.append((names[j], names[i]))
        if _acyclic(n, pairs, states):
            yield Dag(nodes, edges)


def _acyclic(n: int, pairs, states) -> bool:
    children = [[] for _ in range(n)]
    indeg = [0] * n
    for (i, j), s in zip(pairs, states):
        if s == 1:
            children[i].append(j)
            indeg[j] += 1
        elif s == 2:
            children[j].append(i)
            indeg[i] += 1
    ready = [v for v in range(n) if indeg[v] == 0]
    emitted = 0
    while ready:
        v = ready.pop()
        emitted += 1
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    return emitted == n


def random_typed_dag(rng: np.random.Generator, n_nodes: int = 5,
                     edge_prob: float = 0.45, max_card: int = 3) -> Dag:
    """Random DAG with random kinds; latent nodes only ever appear as roots."""
    kinds = [str(rng.choice(["setting", "outcome", "latent"])) for _ in range(n_nodes)]
    names = [f"V{i}" for i in range(n_nodes)]
    cards = [int(rng.integers(2, max_card + 1)) for _ in range(n_nodes)]
    order = rng.permutation(n_nodes)
    edges = []
    for a in range(n_nodes):
        for b in range(a + 1, n_nodes):
            tail, head = order[a], order[b]
            if kinds[head] == "latent":
                continue
            if rng.random() < edge_prob:
                edges.append((names[tail], names[head]))
    return Dag(list(zip(names, kinds, cards)), edges)


def subsets(items):
    items = list(items)
    for mask in range(1 << len(items)):
        yield frozenset(it for i, it in enumerate(items) if mask >> i & 1)


@pytest.fixture
def bell5():
    from causalbell.bell import bell_dag

    return bell_dag()
