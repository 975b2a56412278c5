"""Graphical separation criteria over typed DAGs.

Two per-path predicates are implemented: the classical blocking rule
(chain/fork middles in Z block; colliders block unless activated by Z or
a descendant in Z) and the typed setting/outcome rule whose three clauses
only ever consult the *outcome* members of Z. The set-level classical
decider runs as a reachability sweep over (node, travel-direction)
states; exhaustive path enumeration is kept in-tree both as the oracle
the sweep is tested against and as the witness finder when a query comes
back "not separated".

All functions are pure over immutable graphs and safe to call
concurrently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .graph import CondQuery, Dag, GraphError, NodeKind


@dataclass(frozen=True)
class UndirectedPath:
    """A simple path recorded with the direction of each traversed edge.

    ``forward[i]`` is True when the graph edge runs nodes[i] -> nodes[i+1]
    and False when it runs nodes[i+1] -> nodes[i].
    """

    nodes: tuple[str, ...]
    forward: tuple[bool, ...]

    def __post_init__(self) -> None:
        if len(self.nodes) < 2 or len(self.forward) != len(self.nodes) - 1:
            raise GraphError("path needs >= 1 edge and one direction per edge")
        if len(set(self.nodes)) != len(self.nodes):
            raise GraphError("path repeats a node")

    def __str__(self) -> str:
        parts = [self.nodes[0]]
        for fwd, node in zip(self.forward, self.nodes[1:]):
            parts.append("->" if fwd else "<-")
            parts.append(node)
        return "".join(parts)

    def reversed(self) -> "UndirectedPath":
        return UndirectedPath(
            tuple(reversed(self.nodes)),
            tuple(not f for f in reversed(self.forward)),
        )

    def check_in(self, g: Dag) -> None:
        """Raise GraphError unless every step is an actual edge of ``g``."""
        for a, fwd, b in zip(self.nodes, self.forward, self.nodes[1:]):
            tail, head = (a, b) if fwd else (b, a)
            if head not in g.ordered_children(tail):
                raise GraphError(f"path step {a}{'->' if fwd else '<-'}{b} is not an edge")

    def colliders(self) -> tuple[str, ...]:
        """Interior nodes receiving arrowheads from both path neighbours."""
        out = []
        for i in range(1, len(self.nodes) - 1):
            if self.forward[i - 1] and not self.forward[i]:
                out.append(self.nodes[i])
        return tuple(out)


@dataclass(frozen=True)
class SeparationVerdict:
    separated: bool
    witness: UndirectedPath | None = None


def enumerate_paths(g: Dag, u: str, v: str) -> list[UndirectedPath]:
    """All simple undirected paths from ``u`` to ``v``, in DFS order.

    Neighbour expansion follows node declaration order, so the output
    order is a deterministic function of the graph.
    """
    g.index(u)
    g.index(v)
    if u == v:
        raise GraphError("path endpoints must differ")
    adjacency = {
        w: tuple(sorted(
            [(c, True) for c in g.ordered_children(w)]
            + [(p, False) for p in g.ordered_parents(w)],
            key=lambda t: g.index(t[0]),
        ))
        for w in g.names
    }
    out: list[UndirectedPath] = []
    nodes: list[str] = [u]
    dirs: list[bool] = []
    on_path = {u}

    def extend(cur: str) -> None:
        for nxt, fwd in adjacency[cur]:
            if nxt in on_path:
                continue
            nodes.append(nxt)
            dirs.append(fwd)
            if nxt == v:
                out.append(UndirectedPath(tuple(nodes), tuple(dirs)))
            else:
                on_path.add(nxt)
                extend(nxt)
                on_path.discard(nxt)
            nodes.pop()
            dirs.pop()

    extend(u)
    return out


def path_d_blocked(g: Dag, p: UndirectedPath, z: frozenset[str] | set[str]) -> bool:
    """Classical per-path blocking rule.

    Blocked iff some interior node m is (a) a chain or fork middle with
    m in Z, or (b) a collider with m not in Z and no descendant of m in Z.
    """
    p.check_in(g)
    z = frozenset(z)
    for i in range(1, len(p.nodes) - 1):
        m = p.nodes[i]
        is_collider = p.forward[i - 1] and not p.forward[i]
        if not is_collider:
            if m in z:
                return True
        elif m not in z and not (g.descendants(m) & z):
            return True
    return False


def _nodes_with_descendant_in(g: Dag, z: frozenset[str]) -> set[str]:
    # z itself plus every ancestor of a member of z
    out = set(z)
    stack = list(z)
    while stack:
        v = stack.pop()
        for p in g.ordered_parents(v):
            if p not in out:
                out.add(p)
                stack.append(p)
    return out


def _d_connected_targets(g: Dag, xs: frozenset[str], z: frozenset[str]) -> set[str]:
    """Nodes reachable from ``xs`` along trails left active by ``z``.

    Standard sweep over (node, direction) states: "up" means the node was
    entered against an edge (from a child) or is a start node, "down"
    means it was entered along an edge (from a parent). A collider state
    (v, down) may bounce back to parents only when v is in z or has a
    descendant in z.
    """
    anc_z = _nodes_with_descendant_in(g, z)
    reachable: set[str] = set()
    seen: set[tuple[str, bool]] = set()
    agenda: list[tuple[str, bool]] = [(x, True) for x in xs]  # True = "up"
    parents = g.ordered_parents
    children = g.ordered_children
    while agenda:
        state = agenda.pop()
        if state in seen:
            continue
        seen.add(state)
        v, up = state
        in_z = v in z
        if not in_z:
            reachable.add(v)
        if up:
            if not in_z:
                for p in parents(v):
                    agenda.append((p, True))
                for c in children(v):
                    agenda.append((c, False))
        else:
            if not in_z:
                for c in children(v):
                    agenda.append((c, False))
            if v in anc_z:
                for p in parents(v):
                    agenda.append((p, True))
    return reachable


def _find_witness(g, q, blocked) -> UndirectedPath:
    order = g.index
    for x in sorted(q.x, key=order):
        for y in sorted(q.y, key=order):
            for p in enumerate_paths(g, x, y):
                if not blocked(p):
                    return p
    raise AssertionError("reachability sweep and path oracle disagree")


def d_separated(g: Dag, q: CondQuery) -> SeparationVerdict:
    """Decide whether Z blocks every path between X and Y.

    The verdict comes from the reachability sweep; when the sets are
    connected, the witness is the first active path in enumeration order
    (and its existence cross-checks the sweep on every negative answer).
    """
    q.validate(g.names)
    if _d_connected_targets(g, q.x, q.z) & q.y:
        witness = _find_witness(g, q, lambda p: path_d_blocked(g, p, q.z))
        return SeparationVerdict(False, witness)
    return SeparationVerdict(True)


def path_q_inactive(g: Dag, p: UndirectedPath, z: frozenset[str] | set[str]) -> bool:
    """Typed per-path rule; only outcome-kind members of Z ever matter.

    A path is inactive iff one of:
      (i)   both endpoints are settings and at least one of them has no
            directed path to any outcome in Z;
      (ii)  one endpoint is a setting, the other an outcome, and there is
            no directed path from the setting to that outcome nor to any
            outcome in Z;
      (iii) the path has a collider m that is not an outcome in Z and has
            no directed path to any outcome in Z.
    """
    p.check_in(g)
    u, v = p.nodes[0], p.nodes[-1]
    ku, kv = g.kind(u), g.kind(v)
    if NodeKind.LATENT in (ku, kv):
        raise GraphError("q-separation is undefined for latent endpoints")
    z_outcomes = frozenset(m for m in z if g.kind(m) is NodeKind.OUTCOME)

    def reaches_z_outcome(node: str) -> bool:
        return bool(g.descendants(node) & z_outcomes)

    if ku is NodeKind.SETTING and kv is NodeKind.SETTING:
        if not reaches_z_outcome(u) or not reaches_z_outcome(v):
            return True
    elif NodeKind.SETTING in (ku, kv):
        setting, outcome = (u, v) if ku is NodeKind.SETTING else (v, u)
        if outcome not in g.descendants(setting) and not reaches_z_outcome(setting):
            return True
    for m in p.colliders():
        if m not in z_outcomes and not reaches_z_outcome(m):
            return True
    return False


def q_separated(g: Dag, q: CondQuery) -> SeparationVerdict:
    """Typed separation: every path between X and Y must be inactive.

    X and Y may contain only setting/outcome nodes. Z may contain nodes
    of any kind; non-outcome members are simply invisible to the rule.
    """
    q.validate(g.names)
    for name in sorted(q.x | q.y, key=g.index):
        if g.kind(name) is NodeKind.LATENT:
            raise GraphError(f"latent node {name!r} not allowed in a q-separation query")
    active: UndirectedPath | None = None
    for x in sorted(q.x, key=g.index):
        for y in sorted(q.y, key=g.index):
            for p in enumerate_paths(g, x, y):
                if not path_q_inactive(g, p, q.z):
                    active = p
                    break
            if active:
                break
        if active:
            break
    if active is not None:
        return SeparationVerdict(False, active)
    return SeparationVerdict(True)


MAX_COMPARE_NODES = 12


@dataclass(frozen=True)
class CompareRow:
    x: str
    y: str
    z: tuple[str, ...]
    d_sep: bool
    q_sep: bool

    @property
    def disagree(self) -> bool:
        return self.d_sep != self.q_sep


@dataclass(frozen=True)
class CompareReport:
    rows: tuple[CompareRow, ...]

    @property
    def disagreements(self) -> tuple[CompareRow, ...]:
        return tuple(r for r in self.rows if r.disagree)

    def to_text(self) -> str:
        table = [("X", "Y", "Z", "d_sep", "q_sep", "disagree")]
        for r in self.rows:
            table.append((
                r.x, r.y, "{" + " ".join(r.z) + "}",
                "yes" if r.d_sep else "no",
                "yes" if r.q_sep else "no",
                "DISAGREE" if r.disagree else "",
            ))
        widths = [max(len(row[i]) for row in table) for i in range(6)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["X,Y,Z,d_sep,q_sep,disagree"]
        for r in self.rows:
            z = " ".join(r.z)
            lines.append(
                f"{r.x},{r.y},{z},{str(r.d_sep).lower()},"
                f"{str(r.q_sep).lower()},{str(r.disagree).lower()}"
            )
        return "\n".join(lines) + "\n"


def compare_criteria(g: Dag) -> CompareReport:
    """Tabulate both criteria over all singleton X/Y pairs of
    setting/outcome nodes, with Z ranging over every subset of the
    remaining nodes (latent nodes included, so that rows like
    conditioning on a hidden common cause expose d/q disagreements).
    """
    if len(g) > MAX_COMPARE_NODES:
        raise GraphError(
            f"compare_criteria supports at most {MAX_COMPARE_NODES} nodes, got {len(g)}"
        )
    endpoints = [v for v in g.names if g.kind(v) is not NodeKind.LATENT]
    rows: list[CompareRow] = []
    for x, y in itertools.combinations(endpoints, 2):
        rest = [w for w in g.names if w not in (x, y)]
        for mask in range(1 << len(rest)):
            z = tuple(w for i, w in enumerate(rest) if mask >> i & 1)
            query = CondQuery({x}, {y}, z)
            d = d_separated(g, query).separated
            qv = q_separated(g, query).separated
            rows.append(CompareRow(x, y, z, d, qv))
    return CompareReport(tuple(rows))
