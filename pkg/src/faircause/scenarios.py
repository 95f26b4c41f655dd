"""Documented scenario fixtures: small binary SCMs with stored ground truths.

Each builder returns a Scenario whose .scm is a DiscreteScm over binary
nodes.  Outcome mechanisms are linear in the parents on the probability
scale, so direct, indirect, and path-specific effects equal simple
coefficient expressions; the stored ground-truth values are exact and
regenerate from the enumeration backend.  Stored values apply to the
default parameters only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParameterRangeError
from .estimators import EffectQuery
from .graph import CausalGraph, build_graph, causal_paths
from .scm import DiscreteScm, Exogenous, PathSelection, bernoulli_mechanism

ROLE_EXPLAINING = "explaining"
ROLE_PROXY = "proxy"


@dataclass(frozen=True)
class Scenario:
    """A fixture: model, audit query, role tags, and default ground truths.

    ground_truth holds exact metric values for the default parameters
    (None when parameters were overridden); 'pse' maps 'A->...->Y' path
    strings to the per-path effect.  selection optionally names a
    (column, value) filter demonstrating selection bias.
    """

    id: str
    title: str
    story: str
    scm: DiscreteScm
    query: EffectQuery
    roles: dict = field(default_factory=dict)
    selection: tuple | None = None
    params: dict = field(default_factory=dict)
    ground_truth: dict | None = None

    @property
    def graph(self) -> CausalGraph:
        return self.scm.graph


def _merge_params(defaults: dict, params) -> dict:
    merged = dict(defaults)
    for key, value in dict(params or {}).items():
        if key not in defaults:
            raise ParameterRangeError(f"unknown scenario parameter {key!r}")
        merged[key] = float(value)
    return merged


def _rate(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise ParameterRangeError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def _binary_scm(nodes, edges, rates) -> DiscreteScm:
    """rates: node -> P(node=1 | parents), a float for roots or a callable
    taking parent values in sorted parent order."""
    graph = build_graph(nodes, edges)
    domains = {n: (0, 1) for n in graph.nodes}
    exogenous, mechanisms = {}, {}
    for node in graph.nodes:
        rate = rates[node]
        fn = rate if callable(rate) else (lambda p=rate: p)
        k = len(graph.parents(node))
        support, probs, table = bernoulli_mechanism([(0, 1)] * k, fn)
        exogenous[node] = Exogenous(f"U_{node}", support, probs)
        mechanisms[node] = table
    return DiscreteScm(graph, domains, exogenous, mechanisms)


def path_selection_via(graph: CausalGraph, a, y, node) -> PathSelection:
    """Union of edges over the causal a-to-y paths passing through node."""
    edges = set()
    for path in causal_paths(graph, a, y):
        if node in path.nodes:
            edges.update(path.edges)
    if not edges:
        raise ParameterRangeError(f"no causal path {a} to {y} passes through {node}")
    return PathSelection(a, y, frozenset(edges))


# --- visa ---

VISA_DEFAULTS = {
    "age_rate": 0.5,
    "nationality_age0": 0.7,
    "nationality_age1": 0.3,
    "skill_nat0": 0.80,
    "skill_nat1": 0.35,
    "family_nat0": 0.15,
    "family_nat1": 0.65,
    "visa_base": 0.40,
    "visa_age": 0.15,
    "visa_family": -0.20,
    "visa_nationality": -0.12,
    "visa_skill": 0.30,
}


def visa_scenario(params=None) -> Scenario:
    """Work-visa decisions: Age confounds Nationality, which acts on Visa
    directly and through Skill and FamilyStatus."""
    p = _merge_params(VISA_DEFAULTS, params)
    for key in ("age_rate", "nationality_age0", "nationality_age1",
                "skill_nat0", "skill_nat1", "family_nat0", "family_nat1"):
        _rate(key, p[key])
    scm = _binary_scm(
        nodes=("Age", "FamilyStatus", "Nationality", "Skill", "Visa"),
        edges=(
            ("Age", "Nationality"),
            ("Age", "Visa"),
            ("Nationality", "FamilyStatus"),
            ("Nationality", "Skill"),
            ("Nationality", "Visa"),
            ("FamilyStatus", "Visa"),
            ("Skill", "Visa"),
        ),
        rates={
            "Age": p["age_rate"],
            "Nationality": lambda age: (
                p["nationality_age1"] if age else p["nationality_age0"]
            ),
            "Skill": lambda nat: p["skill_nat1"] if nat else p["skill_nat0"],
            "FamilyStatus": lambda nat: p["family_nat1"] if nat else p["family_nat0"],
            # sorted parents: Age, FamilyStatus, Nationality, Skill
            "Visa": lambda age, fam, nat, skill: (
                p["visa_base"] + p["visa_age"] * age + p["visa_family"] * fam
                + p["visa_nationality"] * nat + p["visa_skill"] * skill
            ),
        },
    )
    truth = None
    if p == VISA_DEFAULTS:
        truth = {
            "tv": -0.415,
            "te": -0.355,
            "ate": -0.355,
            "nde": -0.12,
            "nie": -0.235,
            "pse": {
                "Nationality->Visa": -0.12,
                "Nationality->Skill->Visa": -0.135,
                "Nationality->FamilyStatus->Visa": -0.10,
            },
        }
    return Scenario(
        id="visa",
        title="Work visa approvals",
        story=(
            "A country is accused of nationality discrimination in work-visa "
            "decisions.  Applicant age differs by country and independently "
            "affects approval, so the raw approval gap overstates the causal "
            "effect; skill is a defensible requirement while family status "
            "functions as a proxy."
        ),
        scm=scm,
        query=EffectQuery(a="Nationality", a0=0, a1=1, y="Visa", y_pos=1),
        roles={"Skill": ROLE_EXPLAINING, "FamilyStatus": ROLE_PROXY},
        params=p,
        ground_truth=truth,
    )


# --- hiring ---

HIRING_DEFAULTS = {
    "race_rate": 0.5,
    "skill_race0": 0.70,
    "skill_race1": 0.35,
    "lastname_race0": 0.10,
    "lastname_race1": 0.80,
    "hired_base": 0.32,
    "hired_skill": 0.33,
    "hired_lastname": -0.15,
    "hired_race": -0.12,
}


def hiring_scenario(params=None) -> Scenario:
    """Hiring decisions reached directly from Race and through two
    mediators: Skill (a defensible requirement) and LastName (a proxy)."""
    p = _merge_params(HIRING_DEFAULTS, params)
    for key in ("race_rate", "skill_race0", "skill_race1",
                "lastname_race0", "lastname_race1"):
        _rate(key, p[key])
    scm = _binary_scm(
        nodes=("Hired", "LastName", "Race", "Skill"),
        edges=(
            ("Race", "Hired"),
            ("Race", "LastName"),
            ("Race", "Skill"),
            ("LastName", "Hired"),
            ("Skill", "Hired"),
        ),
        rates={
            "Race": p["race_rate"],
            "Skill": lambda race: p["skill_race1"] if race else p["skill_race0"],
            "LastName": lambda race: (
                p["lastname_race1"] if race else p["lastname_race0"]
            ),
            # sorted parents: LastName, Race, Skill
            "Hired": lambda ln, race, skill: (
                p["hired_base"] + p["hired_lastname"] * ln
                + p["hired_race"] * race + p["hired_skill"] * skill
            ),
        },
    )
    truth = None
    if p == HIRING_DEFAULTS:
        truth = {
            "tv": -0.3405,
            "te": -0.3405,
            "ate": -0.3405,
            "nde": -0.12,
            "nie": -0.2205,
            "pse": {
                "Race->Hired": -0.12,
                "Race->Skill->Hired": -0.1155,
                "Race->LastName->Hired": -0.105,
            },
        }
    return Scenario(
        id="hiring",
        title="Hiring with a proxy mediator",
        story=(
            "Hiring outcomes depend on race directly, on skill, and on last "
            "name.  Skill mediates part of the disparity and can be argued as "
            "a business necessity; last name carries no job-relevant "
            "information and operates as a proxy for race."
        ),
        scm=scm,
        query=EffectQuery(a="Race", a0=0, a1=1, y="Hired", y_pos=1),
        roles={"Skill": ROLE_EXPLAINING, "LastName": ROLE_PROXY},
        params=p,
        ground_truth=truth,
    )


# --- district ---

DISTRICT_DEFAULTS = {
    "district_rate": 0.5,
    "race_district0": 0.15,
    "race_district1": 0.75,
    "rating_district0": 0.75,
    "rating_district1": 0.25,
    "ability_rating0": 0.30,
    "ability_rating1": 0.75,
}


def district_scenario(params=None) -> Scenario:
    """Confounding only: District drives both Race and SchoolRating, and
    predicted ability follows the school rating.  Race has no causal route
    to the prediction, yet the two are observationally associated."""
    p = _merge_params(DISTRICT_DEFAULTS, params)
    for key in sorted(p):
        _rate(key, p[key])
    scm = _binary_scm(
        nodes=("District", "PredictedAbility", "Race", "SchoolRating"),
        edges=(
            ("District", "Race"),
            ("District", "SchoolRating"),
            ("SchoolRating", "PredictedAbility"),
        ),
        rates={
            "District": p["district_rate"],
            "Race": lambda d: p["race_district1"] if d else p["race_district0"],
            "SchoolRating": lambda d: (
                p["rating_district1"] if d else p["rating_district0"]
            ),
            "PredictedAbility": lambda r: (
                p["ability_rating1"] if r else p["ability_rating0"]
            ),
        },
    )
    truth = None
    if p == DISTRICT_DEFAULTS:
        truth = {
            # tv = 0.45 - 12.9/22 = -3/22, from the confounding route alone
            "tv": -3 / 22,
            "te": 0.0,
            "ate": 0.0,
            "nde": 0.0,
            "nie": 0.0,
            "pse": {},
        }
    return Scenario(
        id="district",
        title="District confounding",
        story=(
            "School ratings predict ability, and district composition links "
            "race to school rating without any causal path from race to the "
            "prediction.  The observational gap is entirely spurious: "
            "intervening on race would change nothing."
        ),
        scm=scm,
        query=EffectQuery(a="Race", a0=0, a1=1, y="PredictedAbility", y_pos=1),
        params=p,
        ground_truth=truth,
    )


# --- banknote collider ---

BANKNOTE_DEFAULTS = {
    "gender_rate": 0.5,
    "talent_rate": 0.5,
    "fame_g0t0": 0.30,
    "fame_g0t1": 0.70,
    "fame_g1t0": 0.05,
    "fame_g1t1": 0.60,
}


def banknote_collider_scenario(params=None) -> Scenario:
    """Collider: Gender and Talent independently cause Fame.  Restricting
    attention to famous people manufactures a gender-talent association."""
    p = _merge_params(BANKNOTE_DEFAULTS, params)
    for key in sorted(p):
        _rate(key, p[key])
    scm = _binary_scm(
        nodes=("Fame", "Gender", "Talent"),
        edges=(("Gender", "Fame"), ("Talent", "Fame")),
        rates={
            "Gender": p["gender_rate"],
            "Talent": p["talent_rate"],
            # sorted parents: Gender, Talent
            "Fame": lambda g, t: p[f"fame_g{g}t{t}"],
        },
    )
    truth = None
    if p == BANKNOTE_DEFAULTS:
        truth = {
            "tv": -0.175,
            "te": -0.175,
            "ate": -0.175,
            "nde": -0.175,
            "nie": 0.0,
            "pse": {"Gender->Fame": -0.175},
        }
    return Scenario(
        id="banknote-collider",
        title="Banknote selection bias",
        story=(
            "Candidates for banknote portraits are drawn from famous figures. "
            "Gender and talent are independent in the population, but fame "
            "responds to both, so selecting on fame creates a spurious "
            "association between them."
        ),
        scm=scm,
        query=EffectQuery(a="Gender", a0=0, a1=1, y="Fame", y_pos=1),
        selection=("Fame", 1),
        params=p,
        ground_truth=truth,
    )


# --- love confounder ---

LOVE_DEFAULTS = {
    "love_rate": 0.4,
    "behavior_love0": 0.2,
    "behavior_love1": 0.7,
    "glow_love0": 0.3,
    "glow_love1": 0.8,
}


def love_confounder_scenario(params=None) -> Scenario:
    """Three-node confounder: being in love drives both compulsive behavior
    and glowing happiness; the behavior itself does nothing to the glow."""
    p = _merge_params(LOVE_DEFAULTS, params)
    for key in sorted(p):
        _rate(key, p[key])
    scm = _binary_scm(
        nodes=("Behavior", "Glow", "Love"),
        edges=(("Love", "Behavior"), ("Love", "Glow")),
        rates={
            "Love": p["love_rate"],
            "Behavior": lambda l: p["behavior_love1"] if l else p["behavior_love0"],
            "Glow": lambda l: p["glow_love1"] if l else p["glow_love0"],
        },
    )
    truth = None
    if p == LOVE_DEFAULTS:
        truth = {
            "tv": 0.25,
            "te": 0.0,
            "ate": 0.0,
            "nde": 0.0,
            "nie": 0.0,
            "pse": {},
        }
    return Scenario(
        id="love-confounder",
        title="Love as a common cause",
        story=(
            "Compulsive behavior and glowing happiness move together, but "
            "only because both are effects of being in love.  Prescribing "
            "the behavior would not produce the glow."
        ),
        scm=scm,
        query=EffectQuery(a="Behavior", a0=0, a1=1, y="Glow", y_pos=1),
        params=p,
        ground_truth=truth,
    )


# --- popularity mediation ---

POPULARITY_DEFAULTS = {
    "happiness_rate": 0.5,
    "smiling_h0": 0.30,
    "smiling_h1": 0.75,
    "helping_h0": 0.25,
    "helping_h1": 0.65,
    "popularity_base": 0.15,
    "popularity_happiness": 0.12,
    "popularity_smiling": 0.30,
    "popularity_helping": 0.25,
}


def popularity_mediation_scenario(params=None) -> Scenario:
    """Mediation: happiness raises popularity directly and through two
    behavioral mediators, smiling and helping."""
    p = _merge_params(POPULARITY_DEFAULTS, params)
    for key in ("happiness_rate", "smiling_h0", "smiling_h1",
                "helping_h0", "helping_h1"):
        _rate(key, p[key])
    scm = _binary_scm(
        nodes=("Happiness", "Helping", "Popularity", "Smiling"),
        edges=(
            ("Happiness", "Helping"),
            ("Happiness", "Popularity"),
            ("Happiness", "Smiling"),
            ("Helping", "Popularity"),
            ("Smiling", "Popularity"),
        ),
        rates={
            "Happiness": p["happiness_rate"],
            "Smiling": lambda h: p["smiling_h1"] if h else p["smiling_h0"],
            "Helping": lambda h: p["helping_h1"] if h else p["helping_h0"],
            # sorted parents: Happiness, Helping, Smiling
            "Popularity": lambda hap, help_, smile: (
                p["popularity_base"] + p["popularity_happiness"] * hap
                + p["popularity_helping"] * help_ + p["popularity_smiling"] * smile
            ),
        },
    )
    truth = None
    if p == POPULARITY_DEFAULTS:
        truth = {
            "tv": 0.355,
            "te": 0.355,
            "ate": 0.355,
            "nde": 0.12,
            "nie": 0.235,
            "pse": {
                "Happiness->Popularity": 0.12,
                "Happiness->Smiling->Popularity": 0.135,
                "Happiness->Helping->Popularity": 0.10,
            },
        }
    return Scenario(
        id="popularity-mediation",
        title="Popularity through mediators",
        story=(
            "Happy people end up more popular.  Part of the effect is "
            "direct, and part flows through smiling more and helping more "
            "often, two concrete behaviors that carry the indirect effect."
        ),
        scm=scm,
        query=EffectQuery(a="Happiness", a0=0, a1=1, y="Popularity", y_pos=1),
        params=p,
        ground_truth=truth,
    )


SCENARIO_BUILDERS = {
    "visa": visa_scenario,
    "hiring": hiring_scenario,
    "district": district_scenario,
    "banknote-collider": banknote_collider_scenario,
    "love-confounder": love_confounder_scenario,
    "popularity-mediation": popularity_mediation_scenario,
}


def scenario_ids() -> tuple:
    return tuple(sorted(SCENARIO_BUILDERS))


def get_scenario(scenario_id: str, params=None) -> Scenario:
    builder = SCENARIO_BUILDERS.get(scenario_id)
    if builder is None:
        known = ", ".join(scenario_ids())
        raise ParameterRangeError(
            f"unknown scenario {scenario_id!r}; known scenarios: {known}"
        )
    return builder(params)
