import math

import pytest

from cabinlight import fuzzy
from cabinlight.fuzzy import (
    ACTIVITY_CODES,
    CHRONOTYPE_CODES,
    OUTPUT_LEVELS,
    AllRulesSilent,
    FuzzyVariable,
    InputState,
    MembershipFunction,
    Rule,
    RuleBaseError,
    antecedent_index,
    build_default_variables,
    build_rule_base,
    clamp_input,
    firing_strengths,
    infer,
    membership,
    surface_grid,
    validate_input,
)


def default_setup():
    variables = build_default_variables()
    return variables, build_rule_base(variables)


def test_gaussian_membership_values():
    mf = MembershipFunction("g", 20.0, 2.0)
    assert membership(20.0, mf) == 1.0
    # one sigma out
    assert membership(22.0, mf) == pytest.approx(math.exp(-0.5), rel=1e-12)
    # four sigmas out: pure Gaussian, no truncation in the membership itself
    assert membership(28.0, mf) == pytest.approx(3.3546e-4, rel=1e-3)


def test_singleton_membership_is_crisp():
    mf = MembershipFunction("s", 3.0, 0.0, kind="singleton")
    assert membership(3.0, mf) == 1.0
    assert membership(3.0 + 5e-10, mf) == 1.0   # within serialization tolerance
    assert membership(3.1, mf) == 0.0
    assert mf.adaptable is False


def test_membership_function_validation():
    with pytest.raises(ValueError):
        MembershipFunction("bad", 0.0, -1.0)
    with pytest.raises(ValueError):
        MembershipFunction("bad", 0.0, 1.0, kind="singleton")
    with pytest.raises(ValueError):
        MembershipFunction("bad", 0.0, 1.0, kind="triangle")


def test_variable_means_must_increase():
    with pytest.raises(ValueError):
        FuzzyVariable("v", [MembershipFunction("a", 2.0, 1.0),
                            MembershipFunction("b", 1.0, 1.0)], (0.0, 5.0))


def test_default_variables_structure():
    variables = build_default_variables()
    assert [v.name for v in variables] == ["dgi", "age", "activity", "chronotype"]
    assert [len(v.mfs) for v in variables] == [5, 4, 3, 3]
    for var in variables[2:]:
        assert all(mf.kind == "singleton" and not mf.adaptable for mf in var.mfs)
    for var in variables[:2]:
        assert all(mf.kind == "gaussian" and mf.adaptable for mf in var.mfs)
    assert [mf.mean for mf in variables[2].mfs] == sorted(ACTIVITY_CODES.values())
    assert [mf.mean for mf in variables[3].mfs] == sorted(CHRONOTYPE_CODES.values())


def test_rule_base_size_and_uniqueness():
    variables, rules = default_setup()
    assert len(rules) == 180
    assert len({r.antecedent for r in rules}) == 180
    assert all(rules[i].id == i for i in range(180))
    assert all(r.k in OUTPUT_LEVELS for r in rules)


def test_rule_base_anchor_consequents():
    variables, rules = default_setup()
    by_label = [{mf.label: i for i, mf in enumerate(v.mfs)} for v in variables]

    def k_for(*labels):
        ante = tuple(by_label[i][lab] for i, lab in enumerate(labels))
        return rules[antecedent_index(ante, variables)].k

    assert k_for("comfortable", "20-40", "entertainment", "evening") == 75.0
    assert k_for("negligible", "40-60", "eating", "morning") == 87.5
    assert k_for("comfortable", "20-40", "sleeping", "evening") == 12.5


def test_rule_base_rejects_broken_scores():
    variables = build_default_variables()
    with pytest.raises(RuleBaseError):
        build_rule_base(variables, scores=lambda d, a, act, c: 0)


def test_antecedent_index_mixed_radix():
    variables = build_default_variables()
    assert antecedent_index((0, 0, 0, 0), variables) == 0
    assert antecedent_index((4, 3, 2, 2), variables) == 179
    assert antecedent_index((2, 1, 2, 2), variables) == 89


def test_infer_reproduces_baseline_anchors():
    variables, rules = default_setup()
    assert infer(InputState(22, 22, 5, 25), rules, variables) == 75.0
    assert infer(InputState(14, 50, 3, 5), rules, variables) == 87.5
    assert infer(InputState(22, 27, 2, 25), rules, variables) == 12.5


def test_firing_weights_normalize_to_one():
    variables, rules = default_setup()
    firing = firing_strengths(InputState(19.3, 41.0, 3, 15), rules, variables)
    assert sum(firing.normalized) == pytest.approx(1.0, abs=1e-12)
    assert all(w >= 0 for w in firing.weights)


def test_inference_bounded_by_fired_consequents():
    variables, rules = default_setup()
    for state in (InputState(16.5, 33.0, 5, 25), InputState(23.9, 66.0, 2, 5),
                  InputState(12.0, 8.0, 3, 15)):
        firing = firing_strengths(state, rules, variables)
        fired = [r.k for r, wn in zip(rules, firing.normalized) if wn > 0]
        y = infer(state, rules, variables)
        assert min(fired) - 1e-9 <= y <= max(fired) + 1e-9


def test_clamp_input_saturates_numeric_axes():
    variables = build_default_variables()
    clamped = clamp_input(InputState(5.0, 150.0, 5, 25), variables)
    assert clamped.dgi == 10.0 and clamped.age == 100.0
    assert clamped.activity == 5 and clamped.chronotype == 25


def test_validate_input_rejects_unknown_codes():
    variables = build_default_variables()
    with pytest.raises(ValueError):
        validate_input(InputState(22, 30, 4.0, 25), variables)
    with pytest.raises(ValueError):
        validate_input(InputState(22, 30, 5, 10.0), variables)


def test_activation_truncates_interior_but_keeps_shoulders():
    first = MembershipFunction("lo", 14.0, 1.5)
    # outward side of the first MF keeps its tail
    assert fuzzy._activation(9.0, first, True, False) > 0.0
    # interior side cuts off at three sigmas
    assert fuzzy._activation(19.0, first, True, False) == 0.0
    assert fuzzy._activation(18.0, first, True, False) > 0.0


def test_silent_truncation_falls_back_to_full_tails():
    variables, rules = default_setup()
    # Drift the age means until 22 sits exactly three sigmas from both
    # neighbours: every truncated activation dies, the fallback must not.
    variables[1].mfs[0].mean = 7.0
    variables[1].mfs[1].mean = 37.0
    firing = firing_strengths(InputState(22, 22, 5, 25), rules, variables)
    assert firing.total > 0.0


def test_all_rules_silent_raised_when_nothing_can_fire():
    variables = build_default_variables()
    # A rule base that only speaks for a different activity singleton can
    # never fire, even through the fallback.
    rules = [Rule(0, (0, 0, 0, 0), 50.0, "D1")]
    with pytest.raises(AllRulesSilent):
        firing_strengths(InputState(22, 30, 5, 25), rules, variables)


def test_surface_grid_shapes_and_axes():
    variables, rules = default_setup()
    fixed = InputState(22, 30, 5, 25)
    a_vals, b_vals, grid = surface_grid("dgi", "age", fixed, 7, rules, variables)
    assert len(a_vals) == 7 and len(b_vals) == 7
    assert a_vals[0] == 10.0 and a_vals[-1] == 32.0
    assert len(grid) == 7 and all(len(row) == 7 for row in grid)
    # categorical axis sweeps declared codes, not a numeric grid
    a_vals, b_vals, grid = surface_grid("activity", "dgi", fixed, 7, rules, variables)
    assert a_vals == [2.0, 3.0, 5.0]
    with pytest.raises(ValueError):
        surface_grid("dgi", "dgi", fixed, 7, rules, variables)
    with pytest.raises(ValueError):
        surface_grid("dgi", "age", fixed, 1, rules, variables)


def test_rule_export_import_roundtrip(tmp_path):
    variables, rules = default_setup()
    rules[17].k = 61.234567  # a learned, non-level value must survive
    path = tmp_path / "rules.txt"
    fuzzy.export_rules(rules, variables, path)
    back = fuzzy.import_rules(path, variables)
    assert len(back) == 180
    assert all(a.antecedent == b.antecedent for a, b in zip(rules, back))
    assert all(abs(a.k - b.k) < 1e-6 for a, b in zip(rules, back))


def test_import_rules_rejects_malformed_lines(tmp_path):
    path = tmp_path / "rules.txt"
    path.write_text("negligible 0-20 sleeping morning 37.5\n")
    variables = build_default_variables()
    with pytest.raises(RuleBaseError):
        fuzzy.import_rules(path, variables)
