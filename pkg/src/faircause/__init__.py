"""Causal fairness auditing toolkit.

Quantifies six fairness notions on structural causal models (exactly)
or from observational data plus a causal graph (plug-in estimation),
checks the testable assumptions behind those numbers, discloses the
untestable ones, and renders audit reports aligned with the disparate
impact, disparate treatment, and business necessity doctrines.
"""

from .checks import (
    CheckReport,
    CITestResult,
    check_faithfulness,
    check_linearity,
    check_markov,
    check_positivity,
    ci_test,
    untestable_disclosures,
)
from .dataio import (
    CATEGORICAL,
    NUMERIC,
    NUMERIC_TYPE,
    ColumnType,
    Dataset,
    categorical,
    dumps_csv,
    from_values,
    load_csv,
    loads_csv,
    save_csv,
)
from .errors import *  # noqa: F401,F403 -- pure exception module
from .estimators import (
    BACKEND_EXACT,
    BACKEND_PLUGIN,
    METRIC_ATE,
    METRIC_NDE,
    METRIC_NIE,
    METRIC_PSE,
    METRIC_TE,
    METRIC_TV,
    ConfidenceInterval,
    EffectEstimate,
    EffectQuery,
    MediationSpec,
    average_treatment_effect,
    bootstrap_ci,
    natural_direct_effect,
    natural_indirect_effect,
    path_specific_effect,
    total_effect,
    total_variation,
)
from .graph import (
    AdjustmentSet,
    CausalGraph,
    ClassifiedPath,
    IndependenceStatement,
    Path,
    all_simple_paths,
    backdoor_paths,
    build_graph,
    causal_paths,
    classify_paths,
    d_separated,
    implied_independencies,
    minimal_adjustment_set,
)
from .report import (
    EQUATION_TAGS,
    SCHEMA_VERSION,
    TOOL_VERSION,
    AuditConfig,
    AuditReport,
    render_json,
    render_markdown,
    run_audit,
    validate_report,
)
from .scenarios import Scenario, get_scenario, path_selection_via, scenario_ids
from .scm import (
    DiscreteScm,
    Exogenous,
    Intervention,
    JointDistribution,
    LinearEffects,
    LinearGaussianScm,
    PathSelection,
    bernoulli_mechanism,
    constant_mechanism,
    counterfactual_prob,
    interventional_mean,
    interventional_prob,
    joint_distribution,
    linear_path_effects,
    path_specific_prob,
    sample,
    unit_counterfactual,
)
from .specfile import ParsedSpec, export_graph_spec, parse_graph_spec

__version__ = TOOL_VERSION
