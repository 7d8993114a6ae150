"""Simulated users and the closed-loop trial runner.

Stands in for human participants: a parametric user policy corrects each
suggestion, the engine adapts, and the trace records every trial until
the suggestion settles at the user's true preference.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace

import numpy as np

from . import engine as engine_mod
from .engine import TrialRecord, UserProfile
from .fuzzy import InputState
from .learning import LearnerConfig

FULL, PARTIAL, NOISY, ACCEPT_BAND = "full-correction", "partial-correction", "noisy", "accept-band"

#: Input states and preferences for the three reference experiment sets.
EXPERIMENT_PRESETS = {
    1: (InputState(dgi=22, age=22, activity=5, chronotype=25), 62.0),
    2: (InputState(dgi=14, age=50, activity=3, chronotype=5), 100.0),
    3: (InputState(dgi=22, age=27, activity=2, chronotype=25), 35.0),
}


@dataclass
class SimulatedUser:
    true_preference: float
    policy: str = FULL
    fraction: float = 1.0      # partial-correction blend
    stddev: float = 0.0        # noisy-policy jitter
    width: float = 0.0         # accept-band half-width
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.true_preference <= 100.0:
            raise ValueError("preference must lie in [0, 100]")
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError("fraction must lie in (0, 1]")
        if self.stddev < 0 or self.width < 0:
            raise ValueError("stddev and width must be >= 0")

    def rng(self):
        return np.random.default_rng(self.seed)


def user_respond(user: SimulatedUser, suggested: float, rng=None) -> float:
    """The intensity the user sets in response to a suggestion."""
    pref = user.true_preference
    if user.policy == FULL:
        return pref
    if user.policy == PARTIAL:
        return suggested + user.fraction * (pref - suggested)
    if user.policy == NOISY:
        rng = rng if rng is not None else user.rng()
        value = pref + rng.normal(0.0, user.stddev)
        return float(min(100.0, max(0.0, value)))
    if user.policy == ACCEPT_BAND:
        return suggested if abs(suggested - pref) <= user.width else pref
    raise ValueError(f"unknown policy {user.policy!r}")


@dataclass
class ExperimentSpec:
    input_state: InputState
    user: SimulatedUser
    cfg: LearnerConfig = field(default_factory=LearnerConfig)
    max_trials: int = 500
    convergence_tol: float = 0.5

    def __post_init__(self):
        if self.max_trials < 1:
            raise ValueError("max_trials must be >= 1")
        if self.convergence_tol <= 0:
            raise ValueError("tolerance must be positive")


@dataclass
class TrialTrace:
    records: list[TrialRecord] = field(default_factory=list)
    converged_at: int | None = None

    def suggested(self):
        return [r.suggested for r in self.records]


def preset_spec(set_number: int, cfg: LearnerConfig | None = None,
                seed: int = 0, **overrides) -> ExperimentSpec:
    """ExperimentSpec for reference sets 1-3 (full-correction user)."""
    try:
        state, pref = EXPERIMENT_PRESETS[set_number]
    except KeyError:
        raise ValueError(f"experiment set must be 1, 2 or 3, got {set_number}")
    user = SimulatedUser(true_preference=pref, seed=seed)
    return ExperimentSpec(input_state=state, user=user,
                          cfg=cfg or LearnerConfig(), **overrides)


def run_experiment(spec: ExperimentSpec, profile: UserProfile | None = None) -> TrialTrace:
    """Closed loop: infer, correct, adapt, until convergence or max_trials.

    Convergence requires |suggested - true_preference| <= tol on three
    consecutive trials; converged_at is the first trial of that run.
    """
    if profile is None:
        profile = UserProfile.fresh(age=spec.input_state.age,
                                    chronotype=spec.input_state.chronotype,
                                    cfg=copy.deepcopy(spec.cfg))
    session = engine_mod.open_session(profile, spec.input_state)
    rng = spec.user.rng()
    trace = TrialTrace()
    in_tol = 0
    try:
        for trial in range(1, spec.max_trials + 1):
            suggested = session.suggest()
            target = user_respond(spec.user, suggested, rng=rng)
            engine_mod.submit_feedback(session, target)
            trace.records.append(session.trace[-1])
            if abs(suggested - spec.user.true_preference) <= spec.convergence_tol:
                in_tol += 1
                if in_tol == 3:
                    trace.converged_at = trial - 2
                    break
            else:
                in_tol = 0
    finally:
        session.close()
    return trace


def learning_rate_sweep(base_spec: ExperimentSpec, etas, eta_m=None) -> dict:
    """Run one independent experiment per eta (applied to eta_k and eta_q)."""
    etas = list(etas)
    if len(set(etas)) != len(etas) or any(e <= 0 for e in etas):
        raise ValueError("etas must be distinct and positive")
    traces = {}
    for eta in etas:
        cfg = replace(base_spec.cfg, eta_k=eta, eta_q=eta,
                      eta_m=eta_m if eta_m is not None else base_spec.cfg.eta_m)
        spec = replace(base_spec, cfg=cfg)
        traces[eta] = run_experiment(spec)
    return traces


def export_trace(trace: TrialTrace, path, delimiter="\t"):
    """One row per trial; header mandatory.  Input format for plotting."""
    n_means = len(trace.records[0].means) if trace.records else 0
    header = ["trial", "suggested", "target", "reward", "td_error"]
    header += [f"mean_{i}" for i in range(n_means)]
    lines = [delimiter.join(header)]
    for rec in trace.records:
        row = [str(rec.trial)] + [f"{v:.12g}" for v in
                                  (rec.suggested, rec.target, rec.reward, rec.td_error)]
        row += [f"{m:.12g}" for m in rec.means]
        lines.append(delimiter.join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
