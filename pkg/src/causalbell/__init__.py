"""Causal networks, graphical separation criteria and two-party correlations.

The package splits into graph structure (`graph`), graphical separation
rules (`separation`), exact discrete distributions and their audits
(`distributions`), the two-party measurement scenario (`bell`) and the
command-line front end (`cli`).
"""

from .bell import (
    CHSH_ANGLES,
    Behavior,
    LhvModel,
    MembershipVerdict,
    behavior_from_lhv,
    behavior_joint,
    bell_dag,
    chsh_value,
    correlators,
    deterministic_strategies,
    format_behavior,
    lhv_joint_table,
    lhv_membership,
    no_signalling_check,
    parse_behavior,
    pr_box,
    quantum_causality_audit,
    random_lhv,
    singlet_behavior,
)
from .distributions import (
    CiReport,
    ConditionalTable,
    JointTable,
    RpccReport,
    causal_completeness_check,
    causal_markov_check,
    chain_factorize,
    ci_holds,
    compatible,
    format_distribution,
    graphoid_audit,
    joint_from_tables,
    parse_distribution,
    random_compatible,
    random_conditional_tables,
    reichenbach_check,
)
from .graph import CondQuery, CycleError, Dag, DagParseError, GraphError, NodeKind, parse_dag
from .report import AuditReport, CheckResult
from .separation import (
    CompareReport,
    SeparationVerdict,
    UndirectedPath,
    compare_criteria,
    d_separated,
    enumerate_paths,
    path_d_blocked,
    path_q_inactive,
    q_separated,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "Behavior",
    "CHSH_ANGLES",
    "CheckResult",
    "CiReport",
    "CompareReport",
    "CondQuery",
    "ConditionalTable",
    "CycleError",
    "Dag",
    "DagParseError",
    "GraphError",
    "JointTable",
    "LhvModel",
    "MembershipVerdict",
    "NodeKind",
    "RpccReport",
    "SeparationVerdict",
    "UndirectedPath",
    "behavior_from_lhv",
    "behavior_joint",
    "bell_dag",
    "causal_completeness_check",
    "causal_markov_check",
    "chain_factorize",
    "chsh_value",
    "ci_holds",
    "compare_criteria",
    "compatible",
    "correlators",
    "d_separated",
    "deterministic_strategies",
    "enumerate_paths",
    "format_behavior",
    "format_distribution",
    "graphoid_audit",
    "joint_from_tables",
    "lhv_joint_table",
    "lhv_membership",
    "no_signalling_check",
    "parse_behavior",
    "parse_dag",
    "parse_distribution",
    "path_d_blocked",
    "path_q_inactive",
    "pr_box",
    "q_separated",
    "quantum_causality_audit",
    "random_compatible",
    "random_conditional_tables",
    "random_lhv",
    "reichenbach_check",
    "singlet_behavior",
]
