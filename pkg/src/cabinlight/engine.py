"""Session orchestration and user-profile persistence.

An engine session owns one profile's mutable state (rules, membership
functions, Q-tables) and serializes the perceive -> infer -> feedback ->
adapt cycle.  Profiles round-trip through a versioned JSON document.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np

from . import fuzzy
from .fuzzy import FuzzyVariable, InputState, MembershipFunction, Rule
from .learning import AdaptationDelta, FeedbackEvent, LearnerConfig, QTablePair, adaptation_step

PROFILE_SCHEMA = "cabinlight-profile/1"


class CorruptProfile(Exception):
    """Profile file failed schema or invariant checks."""


class NoPendingSuggestion(Exception):
    """Feedback arrived before any suggestion was issued."""


class ConflictingSession(Exception):
    """The profile is already owned by another active session."""


def _f(v) -> float:
    """JSON emits full float repr, so round-trips are exact."""
    return float(v)


@dataclass
class TrialRecord:
    trial: int
    suggested: float
    target: float
    reward: float
    td_error: float
    means: list[float]


@dataclass
class UserProfile:
    profile_id: str
    age: float
    chronotype: float
    variables: list[FuzzyVariable]
    rules: list[Rule]
    q_tables: QTablePair
    cfg: LearnerConfig
    revision: int = 0

    @classmethod
    def fresh(cls, age: float, chronotype: float, cfg: LearnerConfig | None = None,
              profile_id: str | None = None):
        variables = fuzzy.build_default_variables()
        rules = fuzzy.build_rule_base(variables)
        return cls(profile_id=profile_id or uuid.uuid4().hex,
                   age=age, chronotype=chronotype,
                   variables=variables, rules=rules,
                   q_tables=QTablePair.zeros(states=len(rules)),
                   cfg=cfg or LearnerConfig())

    def adaptable_means(self) -> list[float]:
        return [mf.mean for var in self.variables for mf in var.mfs if mf.adaptable]

    def validate(self):
        expected = fuzzy.rule_count(self.variables)
        if len(self.rules) != expected:
            raise CorruptProfile(f"expected {expected} rules, got {len(self.rules)}")
        seen = set()
        for rule in self.rules:
            if rule.antecedent in seen:
                raise CorruptProfile(f"duplicate antecedent {rule.antecedent}")
            seen.add(rule.antecedent)
            if not 0.0 <= rule.k <= 100.0:
                raise CorruptProfile(f"rule {rule.id} consequent {rule.k} out of range")
        for table in (self.q_tables.bright, self.q_tables.dark):
            if table.shape != (expected, 9):
                raise CorruptProfile(f"Q-table shape {table.shape} != ({expected}, 9)")
        return self


# One writer per profile within this process.
_active_profiles: set[str] = set()
_registry_lock = threading.Lock()


@dataclass
class SessionState:
    profile: UserProfile
    current_input: InputState
    last_suggestion: float | None = None
    trace: list[TrialRecord] = field(default_factory=list)
    _closed: bool = False

    def suggest(self) -> float:
        if self.last_suggestion is None:
            self.last_suggestion = fuzzy.infer(self.current_input,
                                               self.profile.rules,
                                               self.profile.variables)
        return self.last_suggestion

    def close(self):
        if not self._closed:
            self._closed = True
            with _registry_lock:
                _active_profiles.discard(self.profile.profile_id)


def open_session(profile: UserProfile, x: InputState) -> SessionState:
    profile.validate()
    fuzzy.validate_input(x, profile.variables)
    with _registry_lock:
        if profile.profile_id in _active_profiles:
            raise ConflictingSession(profile.profile_id)
        _active_profiles.add(profile.profile_id)
    session = SessionState(profile=profile, current_input=x)
    session.suggest()
    return session


def submit_feedback(session: SessionState, corrected: float) -> AdaptationDelta:
    """Apply one user correction and re-suggest for the same input."""
    if session.last_suggestion is None:
        raise NoPendingSuggestion()
    if not 0.0 <= corrected <= 100.0:
        raise ValueError("corrected intensity must lie in [0, 100]")
    profile = session.profile
    event = FeedbackEvent(suggested=session.last_suggestion, target=corrected,
                          state=session.current_input)
    delta = adaptation_step(profile.rules, profile.variables, profile.q_tables,
                            event, profile.cfg)
    session.last_suggestion = fuzzy.infer(session.current_input, profile.rules,
                                          profile.variables)
    session.trace.append(TrialRecord(
        trial=len(session.trace) + 1,
        suggested=event.suggested, target=corrected,
        reward=delta.reward, td_error=delta.td_error,
        means=profile.adaptable_means()))
    profile.revision += 1
    return delta


def change_context(session: SessionState, new_input: InputState) -> float:
    """Swap the input state; recompute the suggestion without adapting."""
    fuzzy.validate_input(new_input, session.profile.variables)
    session.current_input = new_input
    session.last_suggestion = None
    return session.suggest()


def profile_to_dict(profile: UserProfile) -> dict:
    return {
        "schema": PROFILE_SCHEMA,
        "profile_id": profile.profile_id,
        "revision": profile.revision,
        "age": _f(profile.age),
        "chronotype": _f(profile.chronotype),
        "config": {
            "eta_k": _f(profile.cfg.eta_k),
            "eta_m": _f(profile.cfg.eta_m),
            "eta_q": _f(profile.cfg.eta_q),
            "gamma": _f(profile.cfg.gamma),
            "epsilon_bias": _f(profile.cfg.epsilon_bias),
        },
        "variables": [
            {
                "name": var.name,
                "domain": [_f(var.domain[0]), _f(var.domain[1])],
                "mfs": [
                    {"label": mf.label, "mean": _f(mf.mean),
                     "sigma": _f(mf.sigma), "kind": mf.kind,
                     "adaptable": mf.adaptable}
                    for mf in var.mfs
                ],
            }
            for var in profile.variables
        ],
        "rules": [_f(rule.k) for rule in profile.rules],
        "q_bright": [[_f(v) for v in row] for row in profile.q_tables.bright],
        "q_dark": [[_f(v) for v in row] for row in profile.q_tables.dark],
    }


def profile_from_dict(data: dict) -> UserProfile:
    try:
        if data["schema"] != PROFILE_SCHEMA:
            raise CorruptProfile(f"unsupported schema {data.get('schema')!r}")
        variables = [
            FuzzyVariable(
                v["name"],
                [MembershipFunction(m["label"], m["mean"], m["sigma"],
                                    kind=m["kind"], adaptable=m["adaptable"])
                 for m in v["mfs"]],
                tuple(v["domain"]))
            for v in data["variables"]
        ]
        base = fuzzy.build_rule_base(fuzzy.build_default_variables())
        ks = data["rules"]
        if len(ks) != len(base):
            raise CorruptProfile(f"expected {len(base)} rule consequents")
        rules = [Rule(r.id, r.antecedent, float(k), r.label)
                 for r, k in zip(base, ks)]
        tables = QTablePair(np.array(data["q_bright"], dtype=float),
                            np.array(data["q_dark"], dtype=float))
        cfg = LearnerConfig(**data["config"])
        profile = UserProfile(profile_id=data["profile_id"], age=data["age"],
                              chronotype=data["chronotype"], variables=variables,
                              rules=rules, q_tables=tables, cfg=cfg,
                              revision=data["revision"])
    except CorruptProfile:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptProfile(str(exc)) from exc
    return profile.validate()


def save_profile(profile: UserProfile, path):
    with open(path, "w") as fh:
        json.dump(profile_to_dict(profile), fh, indent=1)
        fh.write("\n")


def load_profile(path) -> UserProfile:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptProfile(str(exc)) from exc
    return profile_from_dict(data)
