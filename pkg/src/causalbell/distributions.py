"""Exact discrete joint distributions and independence audits.

A JointTable is a dense array of probabilities over named finite
variables. Conditional independence is tested in the division-free form

    | P(x,y,z) * P(z) - P(x,z) * P(y,z) | <= eps   for all assignments,

which stays exact near zero-probability conditioning events. On top of
the basic test sit the graph audits (local Markov, ancestor screening,
common-cause screening) and a randomized audit of the five closure
axioms of conditional independence. Everything here is pure and
deterministic per seed; tables are write-locked after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import CondQuery, Dag, GraphError
from .report import Assignment, AuditReport, CheckResult

MAX_TABLE_CELLS = 1 << 20
_SUM_TOL = 1e-12


def _lock(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class JointTable:
    """Dense joint distribution over an ordered list of (name, cardinality).

    Entries must be non-negative and sum to 1 within 1e-12; the array
    shape must equal the tuple of cardinalities.
    """

    variables: tuple[tuple[str, int], ...]
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        variables = tuple((str(n), int(c)) for n, c in self.variables)
        names = [n for n, _ in variables]
        if len(set(names)) != len(names):
            raise GraphError("duplicate variable names")
        if any(c < 1 for _, c in variables):
            raise GraphError("cardinalities must be positive")
        shape = tuple(c for _, c in variables)
        size = int(np.prod(shape, dtype=np.int64)) if shape else 1
        if size > MAX_TABLE_CELLS:
            raise GraphError(f"table of {size} cells exceeds the {MAX_TABLE_CELLS} cap")
        probs = np.asarray(self.probabilities, dtype=np.float64)
        if probs.shape != shape:
            raise GraphError(f"probability array shape {probs.shape} != {shape}")
        if (probs < 0).any():
            raise GraphError("negative probability entry")
        total = float(probs.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise GraphError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "probabilities", _lock(probs))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.variables)

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(c for _, c in self.variables)

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.variables):
            if n == name:
                return i
        raise KeyError(f"unknown variable {name!r}")

    def card(self, name: str) -> int:
        return self.variables[self.index(name)][1]

    def marginal(self, names: Sequence[str]) -> np.ndarray:
        """Marginal array with axes in the requested order."""
        idx = [self.index(n) for n in names]
        if len(set(idx)) != len(idx):
            raise GraphError("duplicate variable in marginal request")
        drop = tuple(i for i in range(len(self.variables)) if i not in set(idx))
        m = self.probabilities.sum(axis=drop) if drop else self.probabilities
        if m.ndim > 1:
            ascending = sorted(idx)
            m = np.transpose(m, [ascending.index(i) for i in idx])
        return m


@dataclass(frozen=True)
class ConditionalTable:
    """P(child | parents) with one simplex slice per parent assignment.

    ``entries`` has shape parent_cards + (child_card,), axes following
    ``parent_names`` order.
    """

    child: str
    parent_names: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self) -> None:
        parent_names = tuple(self.parent_names)
        if len(set(parent_names)) != len(parent_names) or self.child in parent_names:
            raise GraphError(f"invalid parent list for {self.child!r}")
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != len(parent_names) + 1:
            raise GraphError(
                f"table for {self.child!r}: rank {entries.ndim} != {len(parent_names) + 1}"
            )
        if (entries < 0).any():
            raise GraphError(f"table for {self.child!r}: negative entry")
        sums = entries.sum(axis=-1)
        if np.abs(sums - 1.0).max(initial=0.0) > _SUM_TOL:
            raise GraphError(f"table for {self.child!r}: a conditional slice does not sum to 1")
        object.__setattr__(self, "parent_names", parent_names)
        object.__setattr__(self, "entries", _lock(entries))

    @property
    def child_card(self) -> int:
        return self.entries.shape[-1]

    @property
    def parent_cards(self) -> tuple[int, ...]:
        return self.entries.shape[:-1]


@dataclass(frozen=True)
class CiReport:
    """Outcome of one conditional-independence test."""

    query: CondQuery
    holds: bool
    max_violation: float
    witness: Assignment | None = None


def _aligned(entries: np.ndarray, axes: Sequence[int], n_axes: int,
             shape: Sequence[int]) -> np.ndarray:
    """Reshape ``entries`` (axes at positions ``axes``) to broadcast
    against an ``n_axes``-dimensional joint of the given shape."""
    order = np.argsort(axes)
    arr = entries.transpose(order)
    full = [1] * n_axes
    for ax in axes:
        full[ax] = shape[ax]
    return arr.reshape(full)


def joint_from_tables(g: Dag, cpts: Iterable[ConditionalTable]) -> JointTable:
    """Multiply one conditional table per node into the joint it defines.

    Each table's parent set must equal the node's graph parents and all
    cardinalities must match the graph. The result is compatible with the
    graph by construction.
    """
    by_child: dict[str, ConditionalTable] = {}
    for t in cpts:
        if t.child in by_child:
            raise GraphError(f"two tables for node {t.child!r}")
        by_child[t.child] = t
    missing = set(g.names) - set(by_child)
    extra = set(by_child) - set(g.names)
    if missing or extra:
        raise GraphError(f"missing tables {sorted(missing)}, extra tables {sorted(extra)}")
    shape = tuple(g.cardinality(v) for v in g.names)
    joint = np.ones(shape)
    for v in g.names:
        t = by_child[v]
        if set(t.parent_names) != g.parents(v):
            raise GraphError(
                f"table for {v!r} conditions on {sorted(t.parent_names)}, "
                f"graph parents are {sorted(g.parents(v))}"
            )
        if t.child_card != g.cardinality(v):
            raise GraphError(f"table for {v!r}: child cardinality mismatch")
        for p, c in zip(t.parent_names, t.parent_cards):
            if c != g.cardinality(p):
                raise GraphError(f"table for {v!r}: cardinality mismatch on parent {p!r}")
        axes = [g.index(p) for p in t.parent_names] + [g.index(v)]
        joint = joint * _aligned(t.entries, axes, len(shape), shape)
    return JointTable(tuple((v, g.cardinality(v)) for v in g.names), joint)


def chain_factorize(p: JointTable, order: Sequence[str]) -> list[ConditionalTable]:
    """Decompose ``p`` into conditionals along ``order``.

    The k-th table conditions the k-th variable on all earlier ones;
    multiplying the tables back in order reproduces ``p`` entrywise.
    Conditionals on zero-probability contexts are set to uniform.
    """
    order = list(order)
    if sorted(order) != sorted(p.names):
        raise GraphError("order is not a permutation of the table's variables")
    out: list[ConditionalTable] = []
    for j, v in enumerate(order):
        context = order[:j]
        m = p.marginal(context + [v])
        denom = m.sum(axis=-1, keepdims=True)
        card = p.card(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = np.where(denom > 0, m / np.where(denom > 0, denom, 1.0), 1.0 / card)
        out.append(ConditionalTable(v, tuple(context), cond))
    return out


def _ordered(p: JointTable, names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(names, key=p.index))


def ci_holds(p: JointTable, q: CondQuery, eps: float = 1e-9) -> CiReport:
    """Test (X independent of Y given Z) in the division-free product form."""
    if eps <= 0:
        raise GraphError("eps must be positive")
    q.validate(p.names)
    xs, ys, zs = _ordered(p, q.x), _ordered(p, q.y), _ordered(p, q.z)
    m = p.marginal(list(xs + ys + zs))
    nx = int(np.prod([p.card(v) for v in xs], dtype=np.int64))
    ny = int(np.prod([p.card(v) for v in ys], dtype=np.int64))
    nz = int(np.prod([p.card(v) for v in zs], dtype=np.int64)) if zs else 1
    m3 = m.reshape(nx, ny, nz)
    pz = m3.sum(axis=(0, 1))
    pxz = m3.sum(axis=1)
    pyz = m3.sum(axis=0)
    viol = np.abs(m3 * pz[None, None, :] - pxz[:, None, :] * pyz[None, :, :])
    flat = int(viol.argmax())
    max_violation = float(viol.reshape(-1)[flat])
    holds = max_violation <= eps
    witness: Assignment | None = None
    if not holds:
        ix, iy, iz = np.unravel_index(flat, viol.shape)
        witness = _decode(xs, int(ix), p) + _decode(ys, int(iy), p) + _decode(zs, int(iz), p)
    return CiReport(q, holds, max_violation, witness)


def _decode(names: tuple[str, ...], flat: int, p: JointTable) -> Assignment:
    # row-major decode: first name is the most significant digit
    values: list[int] = []
    for name in reversed(names):
        card = p.card(name)
        values.append(flat % card)
        flat //= card
    return tuple(zip(names, reversed(values)))


def _check_same_variables(p: JointTable, g: Dag) -> None:
    if set(p.names) != set(g.names):
        raise GraphError(
            f"variable mismatch: table has {sorted(p.names)}, graph has {sorted(g.names)}"
        )
    for v in g.names:
        if p.card(v) != g.cardinality(v):
            raise GraphError(f"cardinality mismatch on {v!r}")


def _fmt_set(names: Iterable[str], g: Dag) -> str:
    ordered = sorted(names, key=g.index)
    return "{" + " ".join(ordered) + "}"


def _screening_audit(p: JointTable, g: Dag, eps: float, title: str,
                     conditioning: str) -> AuditReport:
    _check_same_variables(p, g)
    checks: list[CheckResult] = []
    for v in g.names:
        z = g.parents(v) if conditioning == "parents" else g.ancestors(v)
        others = set(g.names) - g.descendants(v) - {v} - z
        name = f"{v} _||_ {_fmt_set(others, g)} | {_fmt_set(z, g)}"
        if not others:
            checks.append(CheckResult(name, True, 0.0, detail={"trivial": True}))
            continue
        rep = ci_holds(p, CondQuery({v}, others, z), eps)
        checks.append(CheckResult(name, rep.holds, rep.max_violation, rep.witness))
    return AuditReport(title, tuple(checks))


def causal_markov_check(p: JointTable, g: Dag, eps: float = 1e-9) -> AuditReport:
    """Each node must be independent of its non-descendants given its parents."""
    return _screening_audit(p, g, eps, "local Markov audit", "parents")


def compatible(p: JointTable, g: Dag, eps: float = 1e-9) -> AuditReport:
    """Graph compatibility, decided through the local Markov property.

    Equivalent to the existence of a conditional-table factorization
    along the graph; the equivalence itself is exercised in the tests.
    """
    return _screening_audit(p, g, eps, "compatibility audit", "parents")


def causal_completeness_check(p: JointTable, g: Dag, eps: float = 1e-9) -> AuditReport:
    """Each node must be independent of its non-descendants given its ancestors."""
    return _screening_audit(p, g, eps, "ancestor screening audit", "ancestors")


UNCORRELATED = "uncorrelated"
SCREENED = "screened_by_common_past"
VIOLATES_RPCC = "violates_rpcc"
DIRECT_CAUSE = "direct_cause_relation"


@dataclass(frozen=True)
class RpccReport:
    x: str
    y: str
    verdict: str
    common_past: tuple[str, ...]
    marginal: CiReport | None
    screened: CiReport | None

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        lines.append("common past: {" + " ".join(self.common_past) + "}")
        if self.marginal is not None:
            lines.append(f"marginal dependence: {self.marginal.max_violation:.9f}")
        if self.screened is not None:
            lines.append(f"residual dependence given common past: "
                         f"{self.screened.max_violation:.9f}")
        return "\n".join(lines) + "\n"


def reichenbach_check(p: JointTable, g: Dag, x: str, y: str,
                      eps: float = 1e-9) -> RpccReport:
    """Classify a pair: uncorrelated, screened by the shared causal past
    (the intersection of the two ancestor sets), a direct cause/effect
    relation, or a violation of common-cause screening.
    """
    _check_same_variables(p, g)
    if x == y:
        raise GraphError("x and y must differ")
    common = tuple(sorted(g.ancestors(x) & g.ancestors(y), key=g.index))
    if x in g.ancestors(y) or y in g.ancestors(x):
        return RpccReport(x, y, DIRECT_CAUSE, common, None, None)
    marginal = ci_holds(p, CondQuery({x}, {y}), eps)
    if marginal.holds:
        return RpccReport(x, y, UNCORRELATED, common, marginal, None)
    screened = ci_holds(p, CondQuery({x}, {y}, common), eps)
    verdict = SCREENED if screened.holds else VIOLATES_RPCC
    return RpccReport(x, y, verdict, common, marginal, screened)


GRAPHOID_AXIOMS = ("symmetry", "decomposition", "weak_union", "contraction", "intersection")


def _sample_roles(rng: np.random.Generator, names: tuple[str, ...],
                  need_w: bool) -> tuple[frozenset, frozenset, frozenset, frozenset]:
    for _ in range(1000):
        roles = rng.integers(0, 5, size=len(names))
        x = frozenset(n for n, r in zip(names, roles) if r == 0)
        y = frozenset(n for n, r in zip(names, roles) if r == 1)
        z = frozenset(n for n, r in zip(names, roles) if r == 2)
        w = frozenset(n for n, r in zip(names, roles) if r == 3)
        if x and y and (w or not need_w):
            return x, y, z, w
    raise RuntimeError("role sampling failed")  # unreachable for >= 2 variables


def graphoid_audit(p: JointTable, eps: float = 1e-9, trials: int = 1000,
                   seed: int = 0) -> AuditReport:
    """Randomized audit of the closure axioms of conditional independence.

    Per trial, disjoint sets (X, Y, Z, W) are sampled over the table's
    variables; whenever an axiom's antecedent independences hold within
    ``eps`` the consequent is asserted at 10*eps. The intersection axiom
    is only asserted on strictly positive tables; fired instances on
    tables with zeros are counted as gated, never as failures, and the
    gate is surfaced in the report.
    """
    if trials <= 0:
        raise GraphError("trials must be positive")
    if eps <= 0:
        raise GraphError("eps must be positive")
    if len(p.names) < 2:
        raise GraphError("need at least two variables")
    rng = np.random.default_rng(seed)
    positive = bool((p.probabilities > 0).all())
    names = p.names
    need_w = len(names) >= 3
    derived = 10.0 * eps

    stats = {a: {"fired": 0, "passed": 0, "failed": 0} for a in GRAPHOID_AXIOMS}
    stats["intersection"]["gated"] = 0
    worst: dict[str, float] = {a: 0.0 for a in GRAPHOID_AXIOMS}
    witnesses: dict[str, Assignment | None] = {a: None for a in GRAPHOID_AXIOMS}
    examples: dict[str, str] = {}

    def ci(x, y, z):
        return ci_holds(p, CondQuery(x, y, z), eps)

    def record(axiom: str, consequent: CiReport, sets: str) -> None:
        st = stats[axiom]
        st["fired"] += 1
        ok = consequent.max_violation <= derived
        if ok:
            st["passed"] += 1
        else:
            st["failed"] += 1
            if consequent.max_violation > worst[axiom]:
                worst[axiom] = consequent.max_violation
                witnesses[axiom] = consequent.witness
                examples[axiom] = sets

    for _ in range(trials):
        x, y, z, w = _sample_roles(rng, names, need_w)
        sets = (f"X={sorted(x)} Y={sorted(y)} Z={sorted(z)} W={sorted(w)}")
        if ci(x, y, z).holds:
            record("symmetry", ci(y, x, z), sets)
        if w:
            if ci(x, y | w, z).holds:
                record("decomposition", ci(x, y, z), sets)
                record("weak_union", ci(x, y, z | w), sets)
            if ci(x, y, z | w).holds and ci(x, w, z).holds:
                record("contraction", ci(x, y | w, z), sets)
            if ci(x, w, z | y).holds and ci(x, y, z | w).holds:
                if positive:
                    record("intersection", ci(x, y | w, z), sets)
                else:
                    st = stats["intersection"]
                    st["fired"] += 1
                    st["gated"] += 1

    checks: list[CheckResult] = []
    for axiom in GRAPHOID_AXIOMS:
        st = dict(stats[axiom])
        if axiom == "intersection":
            st["positivity_gate"] = "off" if positive else "on"
        if axiom in examples:
            st["counterexample"] = examples[axiom]
        checks.append(CheckResult(
            name=axiom,
            passed=stats[axiom]["failed"] == 0,
            violation=worst[axiom],
            witness=witnesses[axiom],
            detail=st,
        ))
    return AuditReport("graphoid audit", tuple(checks))


def random_conditional_tables(g: Dag, rng: np.random.Generator) -> list[ConditionalTable]:
    """One conditional table per node, each slice drawn uniformly from the
    probability simplex (normalized unit-exponential draws). Iteration
    follows declaration order, so the output is a function of the
    generator state alone."""
    out = []
    for v in g.names:
        parents = g.ordered_parents(v)
        shape = tuple(g.cardinality(u) for u in parents) + (g.cardinality(v),)
        draws = rng.exponential(1.0, size=shape)
        out.append(ConditionalTable(v, parents, draws / draws.sum(axis=-1, keepdims=True)))
    return out


def random_compatible(g: Dag, seed: int) -> JointTable:
    """A random joint distribution compatible with ``g``, deterministic per seed."""
    rng = np.random.default_rng(seed)
    return joint_from_tables(g, random_conditional_tables(g, rng))


# --- distribution file format -----------------------------------------------

def format_distribution(p: JointTable) -> str:
    """Serialize: a ``vars`` header, then one nonzero assignment per line."""
    header = "vars " + " ".join(f"{n}:{c}" for n, c in p.variables)
    lines = [header]
    flat = p.probabilities.reshape(-1)
    cards = p.cards
    for flat_idx in np.flatnonzero(flat):
        values = np.unravel_index(int(flat_idx), cards) if cards else ()
        cells = " ".join(str(int(v)) for v in values)
        lines.append(f"{cells} {flat[flat_idx]:.17g}")
    return "\n".join(lines) + "\n"


def parse_distribution(text: str) -> JointTable:
    """Parse the distribution file format; omitted assignments are zero.

    The entry sum must land within 1e-9 of 1; the table is then
    renormalized so downstream arithmetic sees an exact distribution.
    """
    variables: list[tuple[str, int]] | None = None
    probs: np.ndarray | None = None
    seen: set[tuple[int, ...]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if variables is None:
            if tokens[0] != "vars":
                raise GraphError(f"line {lineno}: expected 'vars' header")
            variables = []
            for tok in tokens[1:]:
                if ":" not in tok:
                    raise GraphError(f"line {lineno}: expected name:cardinality, got {tok!r}")
                name, _, card_word = tok.partition(":")
                try:
                    card = int(card_word)
                except ValueError:
                    raise GraphError(f"line {lineno}: bad cardinality in {tok!r}") from None
                if not name.isidentifier() or card < 1:
                    raise GraphError(f"line {lineno}: bad variable declaration {tok!r}")
                variables.append((name, card))
            if not variables:
                raise GraphError(f"line {lineno}: empty variable list")
            probs = np.zeros(tuple(c for _, c in variables))
            continue
        if len(tokens) != len(variables) + 1:
            raise GraphError(f"line {lineno}: expected {len(variables)} values and a probability")
        try:
            values = tuple(int(t) for t in tokens[:-1])
            prob = float(tokens[-1])
        except ValueError:
            raise GraphError(f"line {lineno}: malformed row") from None
        for v, (name, card) in zip(values, variables):
            if not 0 <= v < card:
                raise GraphError(f"line {lineno}: value {v} out of range for {name!r}")
        if prob < 0:
            raise GraphError(f"line {lineno}: negative probability")
        if values in seen:
            raise GraphError(f"line {lineno}: duplicate assignment")
        seen.add(values)
        probs[values] = prob
    if variables is None or probs is None:
        raise GraphError("missing 'vars' header")
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-9:
        raise GraphError(f"probabilities sum to {total!r}, outside 1 +/- 1e-9")
    return JointTable(tuple(variables), probs / total)
