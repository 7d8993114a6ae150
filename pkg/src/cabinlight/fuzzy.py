"""Fuzzy variables, rule base and zero-order Takagi-Sugeno inference.

Four inputs (DGI, age, activity, chronotype) map through Gaussian or
singleton membership functions to a 180-rule base whose constant
consequents are averaged by normalized firing strength into a light
intensity in [0, 100].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace


class AllRulesSilent(Exception):
    """No rule fired for the given input."""


class RuleBaseError(Exception):
    """Generated rule base failed its construction self-check."""


#: Intensity levels addressable by rule consequents (duty-cycle percent).
OUTPUT_LEVELS = (0.0, 12.5, 25.0, 37.5, 50.0, 62.5, 75.0, 87.5, 100.0)
OUTPUT_LABELS = ("D5", "D4", "D3", "D2", "D1", "LU1", "LU2", "LU3", "LU4")

#: Gaussian activations are cut off this many sigmas from the mean (interior
#: side only; the outermost membership functions keep their outward tail so
#: extreme but legal inputs still fire something).
SUPPORT_SIGMA = 3.0

#: Absolute tolerance for singleton (crisp categorical) matching.
SINGLETON_TOL = 1e-9

VARIABLE_NAMES = ("dgi", "age", "activity", "chronotype")

ACTIVITY_CODES = {"sleeping": 2.0, "eating": 3.0, "entertainment": 5.0}
CHRONOTYPE_CODES = {"morning": 5.0, "intermediate": 15.0, "evening": 25.0}

# Consequent heuristic: ordinal output score = activity base + shifts,
# clamped to the nine levels.  Overridable via build_rule_base(scores=...).
ACTIVITY_BASE = (1, 4, 6)          # sleeping, eating, entertainment
DGI_SHIFT = (1, 0, 0, -1, -2)      # negligible .. very uncomfortable
AGE_SHIFT = (0, 0, 1, 2)           # 0-20, 20-40, 40-60, 60+
CHRONOTYPE_SHIFT = (1, 0, 0)       # morning, intermediate, evening


@dataclass
class MembershipFunction:
    label: str
    mean: float
    sigma: float
    kind: str = "gaussian"          # "gaussian" | "singleton"
    adaptable: bool = True

    def __post_init__(self):
        if self.kind not in ("gaussian", "singleton"):
            raise ValueError(f"unknown MF kind {self.kind!r}")
        if self.kind == "gaussian" and self.sigma <= 0:
            raise ValueError("gaussian MF needs sigma > 0")
        if self.kind == "singleton":
            if self.sigma != 0:
                raise ValueError("singleton MF needs sigma == 0")
            # mean adaptation divides by sigma^2; singletons are exempt
            self.adaptable = False


@dataclass
class FuzzyVariable:
    name: str
    mfs: list[MembershipFunction]
    domain: tuple[float, float]

    def __post_init__(self):
        means = [mf.mean for mf in self.mfs]
        if means != sorted(means) or len(set(means)) != len(means):
            raise ValueError(f"{self.name}: MF means must be strictly increasing")


@dataclass
class Rule:
    id: int
    antecedent: tuple[int, int, int, int]
    k: float
    label: str


@dataclass
class InputState:
    dgi: float
    age: float
    activity: float
    chronotype: float

    def as_tuple(self):
        return (self.dgi, self.age, self.activity, self.chronotype)


@dataclass
class FiringVector:
    weights: list[float]
    normalized: list[float]

    @property
    def total(self):
        return sum(self.weights)


def membership(x: float, mf: MembershipFunction) -> float:
    """Degree of membership of ``x`` in ``mf``, in [0, 1]."""
    if mf.kind == "singleton":
        return 1.0 if abs(x - mf.mean) <= SINGLETON_TOL else 0.0
    z = (x - mf.mean) / mf.sigma
    return math.exp(-0.5 * z * z)


def _activation(x, mf, first, last):
    """Membership as used for rule firing.

    Identical to :func:`membership` except that Gaussian activations more
    than SUPPORT_SIGMA sigmas from the mean are treated as inactive, so
    crisp table anchors are reproduced exactly.  The outward tail of the
    first/last MF of a variable is kept (shoulder behavior).
    """
    if mf.kind == "singleton":
        return membership(x, mf)
    z = abs(x - mf.mean) / mf.sigma
    if z >= SUPPORT_SIGMA:
        outward = (first and x < mf.mean) or (last and x > mf.mean)
        if not outward:
            return 0.0
    return membership(x, mf)


def build_default_variables() -> list[FuzzyVariable]:
    """The four input variables with the baseline MF parameters."""
    dgi = FuzzyVariable("dgi", [
        MembershipFunction("negligible", 14.0, 1.5),
        MembershipFunction("acceptable", 18.0, 1.0),
        MembershipFunction("comfortable", 22.0, 1.0),
        MembershipFunction("uncomfortable", 25.0, 1.0),
        MembershipFunction("very_uncomfortable", 29.0, 1.8),
    ], domain=(10.0, 32.0))
    age = FuzzyVariable("age", [
        MembershipFunction("0-20", 10.0, 5.0),
        MembershipFunction("20-40", 30.0, 5.0),
        MembershipFunction("40-60", 50.0, 5.0),
        MembershipFunction("60+", 75.0, 8.0),
    ], domain=(0.0, 100.0))
    activity = FuzzyVariable("activity", [
        MembershipFunction("sleeping", 2.0, 0.0, kind="singleton"),
        MembershipFunction("eating", 3.0, 0.0, kind="singleton"),
        MembershipFunction("entertainment", 5.0, 0.0, kind="singleton"),
    ], domain=(2.0, 5.0))
    chronotype = FuzzyVariable("chronotype", [
        MembershipFunction("morning", 5.0, 0.0, kind="singleton"),
        MembershipFunction("intermediate", 15.0, 0.0, kind="singleton"),
        MembershipFunction("evening", 25.0, 0.0, kind="singleton"),
    ], domain=(5.0, 25.0))
    return [dgi, age, activity, chronotype]


def variable_sizes(variables):
    return tuple(len(v.mfs) for v in variables)


def rule_count(variables):
    n = 1
    for v in variables:
        n *= len(v.mfs)
    return n


def antecedent_index(antecedent, variables):
    """Mixed-radix rule/state id, dgi-major."""
    idx = 0
    for a, v in zip(antecedent, variables):
        idx = idx * len(v.mfs) + a
    return idx


# (antecedent labels, expected k) anchors from the three reference scenarios;
# build_rule_base refuses to return a base that breaks any of them.
_ANCHORS = (
    (("comfortable", "20-40", "entertainment", "evening"), 75.0),
    (("negligible", "40-60", "eating", "morning"), 87.5),
    (("comfortable", "20-40", "sleeping", "evening"), 12.5),
)


def consequent_score(d: int, a: int, act: int, chrono: int) -> int:
    """Ordinal output level index (0..8) for one antecedent combination."""
    o = ACTIVITY_BASE[act] + DGI_SHIFT[d] + AGE_SHIFT[a] + CHRONOTYPE_SHIFT[chrono]
    return max(0, min(8, o))


def build_rule_base(variables, scores=consequent_score) -> list[Rule]:
    """Enumerate all antecedent combinations into rules.

    ``scores`` maps the four MF indices to an output level index; the
    default is the documented ordinal heuristic.
    """
    dgi, age, act_v, chr_v = variables
    rules = []
    for d in range(len(dgi.mfs)):
        for a in range(len(age.mfs)):
            for act in range(len(act_v.mfs)):
                for c in range(len(chr_v.mfs)):
                    o = scores(d, a, act, c)
                    rid = antecedent_index((d, a, act, c), variables)
                    rules.append(Rule(rid, (d, a, act, c),
                                      OUTPUT_LEVELS[o], OUTPUT_LABELS[o]))
    _check_anchors(rules, variables)
    return rules


def _check_anchors(rules, variables):
    by_label = [{mf.label: i for i, mf in enumerate(v.mfs)} for v in variables]
    for labels, expect_k in _ANCHORS:
        ante = tuple(by_label[i][lab] for i, lab in enumerate(labels))
        rule = rules[antecedent_index(ante, variables)]
        if rule.antecedent != ante or rule.k != expect_k:
            raise RuleBaseError(
                f"anchor {labels} expected k={expect_k}, got {rule.k}")


def clamp_input(x: InputState, variables) -> InputState:
    """Saturate numeric inputs to their variable domains."""
    dgi_lo, dgi_hi = variables[0].domain
    age_lo, age_hi = variables[1].domain
    return replace(x, dgi=min(max(x.dgi, dgi_lo), dgi_hi),
                   age=min(max(x.age, age_lo), age_hi))


def validate_input(x: InputState, variables):
    """Reject categorical codes that match no declared singleton."""
    for value, var in ((x.activity, variables[2]), (x.chronotype, variables[3])):
        if not any(abs(value - mf.mean) <= SINGLETON_TOL for mf in var.mfs):
            codes = [mf.mean for mf in var.mfs]
            raise ValueError(f"{var.name} code {value} not one of {codes}")


def firing_strengths(x: InputState, rules, variables) -> FiringVector:
    """Product t-norm firing strength of every rule, plus normalization."""
    x = clamp_input(x, variables)
    validate_input(x, variables)
    values = x.as_tuple()
    degrees = []
    for xi, var in zip(values, variables):
        last = len(var.mfs) - 1
        degrees.append([_activation(xi, mf, i == 0, i == last)
                        for i, mf in enumerate(var.mfs)])
    def combine(degs):
        out = []
        for rule in rules:
            w = 1.0
            for i, a in enumerate(rule.antecedent):
                w *= degs[i][a]
            out.append(w)
        return out

    weights = combine(degrees)
    total = sum(weights)
    if total <= 0.0:
        # Adapted means can drift until no Gaussian covers the input at
        # full support; fall back to the untruncated tails so numeric
        # inputs always fire something.
        degrees = [[membership(xi, mf) for mf in var.mfs]
                   for xi, var in zip(values, variables)]
        weights = combine(degrees)
        total = sum(weights)
    if total <= 0.0:
        raise AllRulesSilent(f"no rule fired for input {values}")
    normalized = [w / total for w in weights]
    return FiringVector(weights, normalized)


def infer(x: InputState, rules, variables) -> float:
    """Crisp FIS output: firing-strength-weighted average of consequents."""
    firing = firing_strengths(x, rules, variables)
    return sum(wn * r.k for wn, r in zip(firing.normalized, rules) if wn > 0.0)


def surface_grid(var_a: str, var_b: str, fixed: InputState, resolution: int,
                 rules, variables):
    """Sweep two variables over their domains, remaining inputs fixed.

    Returns (a_values, b_values, grid) where grid[i][j] is the inferred
    intensity at (a_values[i], b_values[j]).  Categorical axes sweep their
    declared codes only.
    """
    if var_a == var_b:
        raise ValueError("surface variables must differ")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    axes = {}
    for name in (var_a, var_b):
        var = variables[VARIABLE_NAMES.index(name)]
        if var.mfs[0].kind == "singleton":
            axes[name] = [mf.mean for mf in var.mfs]
        else:
            lo, hi = var.domain
            step = (hi - lo) / (resolution - 1)
            axes[name] = [lo + i * step for i in range(resolution)]
    grid = []
    for va in axes[var_a]:
        row = []
        for vb in axes[var_b]:
            x = replace(fixed, **{var_a: va, var_b: vb})
            row.append(infer(x, rules, variables))
        grid.append(row)
    return axes[var_a], axes[var_b], grid


def export_rules(rules, variables, path):
    """Write the rule base as a flat text table, one rule per line.

    Columns: four antecedent labels, consequent k (6 decimals), weight
    placeholder.  Round-trips k bit-exactly at that precision.
    """
    lines = ["# dgi age activity chronotype k weight"]
    for rule in rules:
        labels = [variables[i].mfs[a].label for i, a in enumerate(rule.antecedent)]
        lines.append(" ".join(labels) + f" {rule.k:.6f} 1.0")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def import_rules(path, variables) -> list[Rule]:
    by_label = [{mf.label: i for i, mf in enumerate(v.mfs)} for v in variables]
    rules = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 6:
                raise RuleBaseError(f"malformed rule line: {line!r}")
            ante = tuple(by_label[i][lab] for i, lab in enumerate(parts[:4]))
            k = float(parts[4])
            rid = antecedent_index(ante, variables)
            level = min(range(9), key=lambda i: abs(OUTPUT_LEVELS[i] - k))
            rules[rid] = Rule(rid, ante, k, OUTPUT_LABELS[level])
    expected = rule_count(variables)
    if len(rules) != expected:
        raise RuleBaseError(f"expected {expected} rules, got {len(rules)}")
    return [rules[i] for i in range(expected)]
