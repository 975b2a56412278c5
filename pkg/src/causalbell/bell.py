"""Two-party binary measurement scenario: local models and their violation.

The scenario has settings X, Y and outcomes A, B, all binary, with one
latent common cause. A behavior is the conditional table P(a,b|x,y). A
local model mixes per-wing response functions over a hidden value; the 16
deterministic strategies are the extreme points, so membership in the
local set is a 16-weight feasibility problem. The complete facet family
for this scenario is the 8-fold symmetry orbit of one correlator
inequality with local bound 2, and the facet check and the feasibility
solve are kept as two independent routes that must agree.

Quantum correlations enter through the closed-form singlet correlator
E(x,y) = -cos(theta_x - phi_y); no state or operator machinery is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import CiReport, JointTable, ci_holds
from .graph import CondQuery, Dag, GraphError
from .report import AuditReport, CheckResult
from .simplex import OPTIMAL, solve_lp

DEFAULT_LAMBDA_CARD = 16

# settings for the maximal singlet violation: theta_x = (0, pi/2), phi_y = (pi/4, -pi/4)
CHSH_ANGLES = (0.0, math.pi / 2, math.pi / 4, -math.pi / 4)

_SUM_TOL = 1e-12


def _lock(arr: np.ndarray, shape: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if arr.shape != shape:
        raise GraphError(f"{what}: expected shape {shape}, got {arr.shape}")
    if (arr < 0).any():
        raise GraphError(f"{what}: negative entry")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Behavior:
    """Conditional table P(a,b|x,y), indexed [a, b, x, y], binary throughout."""

    table: np.ndarray

    def __post_init__(self) -> None:
        table = _lock(np.asarray(self.table), (2, 2, 2, 2), "behavior")
        sums = table.sum(axis=(0, 1))
        if np.abs(sums - 1.0).max() > _SUM_TOL:
            raise GraphError("behavior: a setting pair's outcome table does not sum to 1")
        object.__setattr__(self, "table", table)


@dataclass(frozen=True)
class LhvModel:
    """Hidden-value mixture of local response functions.

    ``lambda_weights`` is a distribution over hidden values; ``response_a``
    is P(a|x,lambda) indexed [lambda, x, a] and ``response_b`` is
    P(b|y,lambda) indexed [lambda, y, b].
    """

    lambda_weights: np.ndarray
    response_a: np.ndarray
    response_b: np.ndarray

    def __post_init__(self) -> None:
        w = np.ascontiguousarray(self.lambda_weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise GraphError("lambda_weights must be a nonempty vector")
        if (w < 0).any() or abs(float(w.sum()) - 1.0) > _SUM_TOL:
            raise GraphError("lambda_weights must be a probability vector")
        n = w.size
        ra = _lock(np.asarray(self.response_a), (n, 2, 2), "response_a")
        rb = _lock(np.asarray(self.response_b), (n, 2, 2), "response_b")
        for name, r in (("response_a", ra), ("response_b", rb)):
            if np.abs(r.sum(axis=-1) - 1.0).max() > _SUM_TOL:
                raise GraphError(f"{name}: a response slice does not sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "lambda_weights", w)
        object.__setattr__(self, "response_a", ra)
        object.__setattr__(self, "response_b", rb)


def bell_dag(lambda_card: int = DEFAULT_LAMBDA_CARD) -> Dag:
    """The two-wing DAG: X -> A <- Lambda -> B <- Y, with free settings."""
    return Dag(
        nodes=[
            ("X", "setting", 2),
            ("Y", "setting", 2),
            ("A", "outcome", 2),
            ("B", "outcome", 2),
            ("Lambda", "latent", lambda_card),
        ],
        edges=[("X", "A"), ("Lambda", "A"), ("Lambda", "B"), ("Y", "B")],
    )


def behavior_from_lhv(m: LhvModel) -> Behavior:
    """P(a,b|x,y) = sum_l w(l) P(a|x,l) P(b|y,l)."""
    table = np.einsum("l,lxa,lyb->abxy", m.lambda_weights, m.response_a, m.response_b)
    return Behavior(table)


def deterministic_strategies() -> list[LhvModel]:
    """The 16 deterministic strategies a = f(x), b = g(y), as point-mass models.

    Strategy index i = 4*fa + fb where bit x of fa is a(x) and bit y of
    fb is b(y).
    """
    out = []
    for fa in range(4):
        for fb in range(4):
            ra = np.zeros((1, 2, 2))
            rb = np.zeros((1, 2, 2))
            for x in range(2):
                ra[0, x, (fa >> x) & 1] = 1.0
            for y in range(2):
                rb[0, y, (fb >> y) & 1] = 1.0
            out.append(LhvModel(np.ones(1), ra, rb))
    return out


def strategy_responses(i: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """(a(0), a(1)), (b(0), b(1)) for deterministic strategy ``i``."""
    fa, fb = divmod(i, 4)
    return ((fa >> 0) & 1, (fa >> 1) & 1), ((fb >> 0) & 1, (fb >> 1) & 1)


def _deterministic_tables() -> np.ndarray:
    """All 16 deterministic behaviors stacked on a leading strategy axis."""
    tables = np.zeros((16, 2, 2, 2, 2))
    for i in range(16):
        (a0, a1), (b0, b1) = strategy_responses(i)
        a_of = (a0, a1)
        b_of = (b0, b1)
        for x in range(2):
            for y in range(2):
                tables[i, a_of[x], b_of[y], x, y] = 1.0
    return tables


_DET_TABLES = _deterministic_tables()

_SIGN = np.array([[1.0, -1.0], [-1.0, 1.0]])  # (-1)^(a xor b)

# variant v in 0..3 puts the single negative sign at (x, y) =
# (1,1), (1,0), (0,1), (0,0); variants 4..7 are the global negations.
_VARIANT_COEFFS = np.empty((8, 2, 2))
for _v, (_x, _y) in enumerate(((1, 1), (1, 0), (0, 1), (0, 0))):
    _VARIANT_COEFFS[_v] = 1.0
    _VARIANT_COEFFS[_v, _x, _y] = -1.0
    _VARIANT_COEFFS[_v + 4] = -_VARIANT_COEFFS[_v]


def correlators(b: Behavior) -> np.ndarray:
    """E(x,y) = sum_ab (-1)^(a xor b) P(a,b|x,y), as a (2, 2) array."""
    return np.einsum("ab,abxy->xy", _SIGN, b.table)


def chsh_value(b: Behavior, variant: int = 0) -> float:
    """Signed correlator sum for one of the 8 facet variants."""
    if not 0 <= variant <= 7:
        raise GraphError(f"variant must be in 0..7, got {variant}")
    return float(np.sum(_VARIANT_COEFFS[variant] * correlators(b)))


def singlet_behavior(theta0: float, theta1: float, phi0: float, phi1: float) -> Behavior:
    """Singlet-statistics behavior for the given analyzer angles.

    P(a,b|x,y) = (1 + (-1)^(a xor b) E(x,y)) / 4 with E(x,y) = -cos(theta_x - phi_y).
    Outcome marginals are exactly one half, so the table never signals.
    """
    thetas = (theta0, theta1)
    phis = (phi0, phi1)
    e = np.array([[-math.cos(tx - py) for py in phis] for tx in thetas])
    table = (1.0 + _SIGN[:, :, None, None] * e[None, None, :, :]) / 4.0
    return Behavior(table)


def pr_box() -> Behavior:
    """The extremal no-signalling table: P(a,b|x,y) = 1/2 iff a xor b = x.y."""
    table = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    if a ^ b == x * y:
                        table[a, b, x, y] = 0.5
    return Behavior(table)


def no_signalling_check(b: Behavior, eps: float = 1e-9) -> AuditReport:
    """Assert each wing's outcome marginal ignores the far setting."""
    if eps <= 0:
        raise GraphError("eps must be positive")
    checks = []
    marg_a = b.table.sum(axis=1)  # [a, x, y]
    marg_b = b.table.sum(axis=0)  # [b, x, y]
    for a in range(2):
        for x in range(2):
            dev = abs(float(marg_a[a, x, 0] - marg_a[a, x, 1]))
            checks.append(CheckResult(
                f"P(a={a}|x={x}) independent of y", dev <= eps, dev,
                witness=(("a", a), ("x", x)) if dev > eps else None,
            ))
    for bb in range(2):
        for y in range(2):
            dev = abs(float(marg_b[bb, 0, y] - marg_b[bb, 1, y]))
            checks.append(CheckResult(
                f"P(b={bb}|y={y}) independent of x", dev <= eps, dev,
                witness=(("b", bb), ("y", y)) if dev > eps else None,
            ))
    return AuditReport("no-signalling audit", tuple(checks))


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of the local-set membership decision.

    Exactly one of ``model`` (when local) and the violated facet fields
    (when not) is populated. ``residual`` is the best achievable maximum
    entrywise reconstruction error over the local set.
    """

    local: bool
    model: LhvModel | None
    violated_variant: int | None
    violated_value: float | None
    residual: float

    def to_text(self) -> str:
        if self.local:
            assert self.model is not None
            lines = ["local"]
            for i, w in enumerate(self.model.lambda_weights):
                (a0, a1), (b0, b1) = strategy_responses(i)
                lines.append(
                    f"w[{i:2d}] = {w:.9f}  a(0)={a0} a(1)={a1} b(0)={b0} b(1)={b1}"
                )
            return "\n".join(lines) + "\n"
        return f"not local: variant {self.violated_variant}, S = {self.violated_value:.9f}\n"


def _membership_residual(b: Behavior) -> tuple[float, np.ndarray]:
    """Min over mixture weights of the max entrywise error, via one LP.

    Variables are the 16 weights plus the error bound t; the constraints
    sandwich each table entry within t of the mixture.
    """
    d = _DET_TABLES.reshape(16, 16)
    p = b.table.reshape(16)
    n = 17  # w0..w15, t
    a_ub = np.zeros((32, n))
    b_ub = np.zeros(32)
    a_ub[:16, :16] = d.T
    a_ub[:16, 16] = -1.0
    b_ub[:16] = p
    a_ub[16:, :16] = -d.T
    a_ub[16:, 16] = -1.0
    b_ub[16:] = -p
    a_eq = np.zeros((1, n))
    a_eq[0, :16] = 1.0
    c = np.zeros(n)
    c[16] = 1.0
    result = solve_lp(c, a_ub, b_ub, a_eq, [1.0])
    if result.status != OPTIMAL:
        raise RuntimeError(f"membership solve returned {result.status}")
    weights = np.clip(result.x[:16], 0.0, None)
    weights = weights / weights.sum()
    return float(result.objective), weights


def lhv_membership(b: Behavior, eps: float = 1e-9) -> MembershipVerdict:
    """Decide whether the behavior mixes the 16 deterministic strategies.

    The feasibility solve and the facet sweep are evaluated
    independently; in this scenario they decide the same set, so any
    disagreement is an internal error, never a verdict.
    """
    ns = no_signalling_check(b, eps)
    if not ns.passed:
        raise GraphError(
            f"membership is posed inside the no-signalling set "
            f"(worst marginal deviation {ns.worst_violation:.9f})"
        )
    values = [chsh_value(b, v) for v in range(8)]
    best_variant = int(np.argmax(values))
    facet_violated = values[best_variant] > 2.0 + eps

    residual, weights = _membership_residual(b)
    feasible = residual <= eps

    if feasible == facet_violated:
        raise RuntimeError(
            "internal inconsistency: feasibility solve and facet check disagree "
            f"(residual={residual!r}, max facet={values[best_variant]!r})"
        )
    if feasible:
        strategies = deterministic_strategies()
        ra = np.stack([s.response_a[0] for s in strategies])
        rb = np.stack([s.response_b[0] for s in strategies])
        model = LhvModel(weights, ra, rb)
        return MembershipVerdict(True, model, None, None, residual)
    return MembershipVerdict(False, None, best_variant, values[best_variant], residual)


def behavior_joint(b: Behavior) -> JointTable:
    """Joint over (A, B, X, Y) with uniform setting priors."""
    return JointTable(
        (("A", 2), ("B", 2), ("X", 2), ("Y", 2)),
        b.table * 0.25,
    )


def lhv_joint_table(m: LhvModel) -> JointTable:
    """Joint over (A, B, X, Y, Lambda) with uniform setting priors."""
    probs = 0.25 * np.einsum(
        "l,lxa,lyb->abxyl", m.lambda_weights, m.response_a, m.response_b
    )
    lam = m.lambda_weights.size
    return JointTable(
        (("A", 2), ("B", 2), ("X", 2), ("Y", 2), ("Lambda", lam)),
        probs,
    )


def quantum_causality_audit(b: Behavior, eps: float = 1e-9) -> AuditReport:
    """Check the outcome-independence pattern the typed criterion demands.

    Under uniform setting priors the joint must satisfy (A indep Y),
    (B indep X) and (X indep Y) unconditionally. (A indep B) is exempt,
    the two outcomes share the hidden common cause, so its status is
    reported but never asserted.
    """
    joint = behavior_joint(b)

    def check(x: str, y: str, required: bool) -> CheckResult:
        rep: CiReport = ci_holds(joint, CondQuery({x}, {y}), eps)
        name = f"{x} _||_ {y} | {{}}"
        detail = None if required else {"asserted": False, "reason": "shared common cause"}
        return CheckResult(name, rep.holds, rep.max_violation, rep.witness,
                           required=required, detail=detail)

    checks = (
        check("A", "Y", True),
        check("B", "X", True),
        check("X", "Y", True),
        check("A", "B", False),
    )
    return AuditReport("outcome-independence audit", checks)


def random_lhv(seed: int, lambda_card: int = DEFAULT_LAMBDA_CARD) -> LhvModel:
    """Random local model, every slice uniform on the simplex; per-seed stable."""
    rng = np.random.default_rng(seed)
    w = rng.exponential(1.0, size=lambda_card)
    ra = rng.exponential(1.0, size=(lambda_card, 2, 2))
    rb = rng.exponential(1.0, size=(lambda_card, 2, 2))
    return LhvModel(
        w / w.sum(),
        ra / ra.sum(axis=-1, keepdims=True),
        rb / rb.sum(axis=-1, keepdims=True),
    )


# --- behavior file format -----------------------------------------------------

def format_behavior(b: Behavior) -> str:
    """16 lines ``a b x y prob`` in row-major (a, b, x, y) order."""
    lines = []
    for a in range(2):
        for bb in range(2):
            for x in range(2):
                for y in range(2):
                    lines.append(f"{a} {bb} {x} {y} {b.table[a, bb, x, y]:.17g}")
    return "\n".join(lines) + "\n"


def parse_behavior(text: str) -> Behavior:
    """Parse a behavior file; every one of the 16 assignments must appear once.

    Each setting pair's outcome table must sum to 1 within 1e-9 and is
    then renormalized exactly.
    """
    table = np.full((2, 2, 2, 2), np.nan)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 5:
            raise GraphError(f"line {lineno}: expected 'a b x y prob'")
        try:
            a, bb, x, y = (int(t) for t in tokens[:4])
            prob = float(tokens[4])
        except ValueError:
            raise GraphError(f"line {lineno}: malformed row") from None
        if not all(v in (0, 1) for v in (a, bb, x, y)):
            raise GraphError(f"line {lineno}: outcome/setting values must be 0 or 1")
        if prob < 0:
            raise GraphError(f"line {lineno}: negative probability")
        if not np.isnan(table[a, bb, x, y]):
            raise GraphError(f"line {lineno}: duplicate assignment")
        table[a, bb, x, y] = prob
    if np.isnan(table).any():
        raise GraphError("behavior file is missing assignments")
    sums = table.sum(axis=(0, 1))
    if np.abs(sums - 1.0).max() > 1e-9:
        raise GraphError("a setting pair's outcome table sums outside 1 +/- 1e-9")
    return Behavior(table / sums[None, None, :, :])
